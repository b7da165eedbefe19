"""Command-line driver.

A thin client of the service layer: it builds the request models, calls
the service handlers (in-process by default, over HTTP with --server),
and writes the returned arrays as CSV/JSON files. Exit codes: 0 success,
2 config error, 3 domain/horizon error, 4 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import ExperimentConfig, config_from_dict, load_config
from .errors import (
    AtomChainError,
    ConfigError,
    HorizonError,
    IntegrationAbort,
)
from .service import models
from .service.app import (
    handle_consistency,
    handle_constants,
    handle_riemann,
    handle_simulate,
    handle_stability,
    handle_static,
)

_FLOAT_FMT = "%.17g"


class LocalClient:
    """Calls the service handlers in-process."""

    def simulate(self, cfg):
        return handle_simulate(cfg)

    def riemann(self, req):
        return handle_riemann(req)

    def static(self, req):
        return handle_static(req)

    def stability(self, req):
        return handle_stability(req)

    def consistency(self, req):
        return handle_consistency(req)

    def constants(self, req):
        return handle_constants(req)


class RemoteClient:
    """Same interface over HTTP."""

    def __init__(self, base_url: str):
        import httpx

        self._client = httpx.Client(base_url=base_url, timeout=600.0)

    def _post(self, path, payload, response_model):
        resp = self._client.post(path, json=payload.model_dump(mode="json"))
        if resp.status_code != 200:
            detail = resp.json()
            name = detail.get("error", "AtomChainError")
            message = detail.get("detail", resp.text)
            if name == "ConfigError":
                raise ConfigError(message)
            if name in ("IntegrationAbort", "StiffnessError"):
                raise IntegrationAbort(message, t=None)
            if name == "HorizonError":
                raise HorizonError(message)
            raise AtomChainError(f"{name}: {message}")
        return response_model.model_validate(resp.json())

    def simulate(self, cfg):
        return self._post("/simulate", cfg, models.SimulateResponse)

    def riemann(self, req):
        return self._post("/riemann", req, models.RiemannResponse)

    def static(self, req):
        return self._post("/static", req, models.StaticResponse)

    def stability(self, req):
        return self._post("/stability", req, models.StabilityResponse)

    def consistency(self, req):
        return self._post("/consistency", req, models.ConsistencyResponse)

    def constants(self, req):
        return self._post("/constants", req, models.ConstantsResponse)


def _make_client(args) -> LocalClient | RemoteClient:
    return RemoteClient(args.server) if args.server else LocalClient()


def _write_csv(path: Path, columns: dict) -> None:
    names = list(columns)
    rows = zip(*(columns[n] for n in names))
    with path.open("w") as fh:
        fh.write(",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(_FLOAT_FMT % value for value in row) + "\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _snapshot_columns(snap: models.SnapshotPayload) -> dict:
    cols = {"X": snap.x, "F": snap.F, "v": snap.v, "phi": snap.phi}
    if snap.F_avg is not None:
        cols["F_avg"] = snap.F_avg
        cols["v_avg"] = snap.v_avg
    return cols


def _write_plot(path: Path, snap: models.SnapshotPayload) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_f, ax_v) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax_f.plot(snap.x, snap.F, lw=0.9, label="F")
    if snap.F_avg is not None:
        ax_f.plot(snap.x, snap.F_avg, lw=1.4, label="F_avg")
        ax_f.legend(loc="best", fontsize=8)
    ax_f.set_ylabel("F")
    ax_v.plot(snap.x, snap.v, lw=0.9, label="v")
    if snap.v_avg is not None:
        ax_v.plot(snap.x, snap.v_avg, lw=1.4, label="v_avg")
        ax_v.legend(loc="best", fontsize=8)
    ax_v.set_ylabel("v")
    ax_v.set_xlabel("X")
    title = f"t={snap.t:g}"
    if snap.M:
        title += f", M={snap.M}"
    if snap.family:
        title += f", {snap.family}"
    ax_f.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _outdir(args, cfg_outdir: str | None = None) -> Path:
    out = os.environ.get("ATOMCHAIN_OUT") or getattr(args, "outdir", None) or cfg_outdir or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------- argument plumbing

def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="INI or JSON config file (or a run manifest)")
    pot = sub.add_argument_group("potential")
    pot.add_argument("--A", dest="A", type=float, help="energy scale A")
    pot.add_argument("--three-A", dest="three_A", type=float, help="stress prefactor 3A")
    pot.add_argument("--eta-cut", dest="eta_cut", type=float)
    pot.add_argument("--r0", type=float)
    dfc = sub.add_argument_group("defect")
    dfc.add_argument("--s1", type=float)
    dfc.add_argument("--s2", type=float)
    dfc.add_argument("--delta", type=float)
    run = sub.add_argument_group("run")
    run.add_argument("--meshes", type=str, help="comma-separated mesh sizes, e.g. 16,32,64,128")
    run.add_argument("--rho0", type=float)
    run.add_argument("--mu", type=float)
    run.add_argument("--bc", choices=("fixed", "end_load"))
    run.add_argument("--v0", type=float)
    run.add_argument("--times", type=str, help="comma-separated sample times")
    run.add_argument("--dt", type=float)
    run.add_argument("--nt", type=int)
    run.add_argument("--raw", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--mollified", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--viscous", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--eps", type=float, help="averaging scale override")
    run.add_argument("--rel-tol", dest="rel_tol", type=float)
    run.add_argument("--abs-tol", dest="abs_tol", type=float)
    run.add_argument("--max-step", dest="max_step", type=float)
    out = sub.add_argument_group("output")
    out.add_argument("--outdir", type=str)
    out.add_argument("--format", choices=("csv", "json"))
    out.add_argument("--plot", action=argparse.BooleanOptionalAction, default=None)


_POTENTIAL_KEYS = ("A", "three_A", "eta_cut", "r0")
_DEFECT_KEYS = ("s1", "s2", "delta")
_RUN_KEYS = (
    "meshes", "rho0", "mu", "bc", "v0", "times", "dt", "nt",
    "raw", "mollified", "viscous", "eps", "rel_tol", "abs_tol", "max_step",
    "outdir", "format", "plot",
)


def _config_from_args(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data = load_config(args.config).model_dump()
    for key in _POTENTIAL_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data.setdefault("potential", {})
            if not isinstance(data["potential"], dict):
                data["potential"] = dict(data["potential"])
            data["potential"][key] = value
            if key in ("A", "three_A"):
                data["potential"].pop("three_A" if key == "A" else "A", None)
    for key in _DEFECT_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data.setdefault("defect", {})
            data["defect"][key] = value
    if getattr(args, "times", None) is None and (
        getattr(args, "dt", None) is not None or getattr(args, "nt", None) is not None
    ):
        data.pop("times", None)  # recompute the grid from the overriding dt/nt
    for key in _RUN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            if key == "meshes":
                value = [int(v) for v in str(value).replace(",", " ").split()]
            elif key == "times":
                value = [float(v) for v in str(value).replace(",", " ").split()]
            data[key] = value
    return config_from_dict(data)


# ---------------------------------------------------------------- subcommands

def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    if args.cmd == "fracture" and args.bc is None and (not args.config):
        cfg = cfg.model_copy(update={"bc": "end_load"})
    client = _make_client(args)
    response = client.simulate(cfg)
    out = _outdir(args, cfg.outdir)
    files = []
    for snap in response.snapshots:
        base = f"sim_M{snap.M}_{snap.family}_t{snap.t:g}"
        if cfg.format == "csv":
            name = base + ".csv"
            _write_csv(out / name, _snapshot_columns(snap))
        else:
            name = base + ".json"
            _write_json(out / name, snap.model_dump(mode="json"))
        files.append(name)
        if cfg.plot:
            _write_plot(out / (base + ".svg"), snap)
            files.append(base + ".svg")
    manifest = {
        "config": response.config.model_dump(mode="json"),
        "constants": response.constants.model_dump(mode="json"),
        "events": [e.model_dump(mode="json") for e in response.events],
        "aborted": response.aborted,
        "files": files,
        "csv_schema": "X,F,v,phi[,F_avg,v_avg]",
    }
    _write_json(out / "manifest.json", manifest)
    for event in response.events:
        print(f"event: {event.model_dump(mode='json')}")
    print(f"wrote {len(files)} files and manifest.json to {out}")
    return 4 if response.aborted else 0


def cmd_riemann(args) -> int:
    cfg = _config_from_args(args)
    req = models.RiemannRequest(
        potential=cfg.potential,
        defect=cfg.defect,
        times=list(cfg.times),
        points=args.points,
    )
    response = _make_client(args).riemann(req)
    out = _outdir(args, cfg.outdir)
    files = []
    for snap in response.snapshots:
        name = f"riemann_t{snap.t:g}.csv"
        _write_csv(out / name, _snapshot_columns(snap))
        files.append(name)
        if cfg.plot:
            _write_plot(out / f"riemann_t{snap.t:g}.svg", snap)
    summary = {
        "constants": response.constants.model_dump(mode="json"),
        "waves": [w.model_dump(mode="json") for w in response.waves],
        "middle": response.middle,
        "t0": response.t0,
        "t_boundary": response.t_boundary,
        "files": files,
    }
    _write_json(out / "riemann_waves.json", summary)
    print(f"wave fan: {[w.kind for w in response.waves]}, t0={response.t0:g}")
    print(f"wrote {len(files)} snapshot files and riemann_waves.json to {out}")
    return 0


def cmd_static(args) -> int:
    cfg = _config_from_args(args)
    req = models.StaticRequest(potential=cfg.potential, a=args.a, c=args.c)
    response = _make_client(args).static(req)
    out = _outdir(args, cfg.outdir)
    _write_json(out / "static.json", response.model_dump(mode="json"))
    print(json.dumps(response.model_dump(mode="json"), indent=2))
    return 0


def cmd_stability(args) -> int:
    cfg = _config_from_args(args)
    req = models.StabilityRequest(
        potential=cfg.potential,
        a=args.a,
        M=args.mesh,
        rho0=cfg.rho0,
        measure_rate=args.measure_rate,
        t_end=args.t_end,
    )
    response = _make_client(args).stability(req)
    out = _outdir(args, cfg.outdir)
    _write_json(out / "stability.json", response.model_dump(mode="json"))
    print(json.dumps(response.model_dump(mode="json"), indent=2))
    return 0


def cmd_consistency(args) -> int:
    cfg = _config_from_args(args)
    req = models.ConsistencyRequest(
        config=cfg, measure=args.measure, reference=args.reference
    )
    response = _make_client(args).consistency(req)
    out = _outdir(args, cfg.outdir)
    _write_json(out / "consistency.json", response.model_dump(mode="json"))
    print(f"reference={response.reference} monotone_l2={response.monotone_l2}")
    for M in response.meshes:
        errs = " ".join(f"{e:.6g}" for e in response.l2[str(M)])
        print(f"  M={M:>4} l2: {errs}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomchain",
        description="Lennard-Jones chain dynamics, coarse-grained runs, exact wave fans",
    )
    parser.add_argument("--server", type=str, default=None, help="base URL of a running service (default: run in-process)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    for name, help_text in (
        ("simulate", "run conservative/viscous chain dynamics and write snapshots"),
        ("fracture", "simulate with an end load (alias of simulate with bc=end_load)"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _add_config_flags(sp)
        sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("riemann", help="sample the exact defect solution")
    _add_config_flags(sp)
    sp.add_argument("--points", type=int, default=256, help="grid points for sampling")
    sp.set_defaults(func=cmd_riemann)

    sp = sub.add_parser("static", help="equilibrium profile and its stability")
    _add_config_flags(sp)
    sp.add_argument("--a", type=float, required=True, help="end displacement")
    sp.add_argument("--c", type=float, default=None, help="stress level (a >= 1 only)")
    sp.set_defaults(func=cmd_static)

    sp = sub.add_parser("stability", help="linearized growth spectrum about a uniform strain")
    _add_config_flags(sp)
    sp.add_argument("--a", type=float, required=True, help="uniform strain")
    sp.add_argument("--mesh", type=int, default=2, help="cell count M")
    sp.add_argument("--measure-rate", action="store_true", help="cross-check by a linearized run")
    sp.add_argument("--t-end", dest="t_end", type=float, default=8.0)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("consistency", help="mesh sweep vs exact solution or finest mesh")
    _add_config_flags(sp)
    sp.add_argument("--measure", choices=("mollified", "viscous"), default="mollified")
    sp.add_argument("--reference", choices=("exact", "finest"), default="exact")
    sp.set_defaults(func=cmd_consistency)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 4
    except AtomChainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
