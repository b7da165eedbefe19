"""Exception hierarchy shared across the package."""


class AtomChainError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AtomChainError, ValueError):
    """An argument lies outside the physical domain of a function."""


class EllipticRegionError(DomainError):
    """A wave speed was requested where the operator is elliptic (sigma' < 0)."""


class ChainCrossingError(DomainError):
    """Adjacent particles have crossed (non-positive strain); the state is poisoned."""


class NoSolutionError(AtomChainError, ValueError):
    """No root/state with the requested properties exists."""


class ConstraintError(AtomChainError, ValueError):
    """Arguments are individually valid but violate a joint constraint."""


class InadmissibleShockError(AtomChainError, ValueError):
    """A constructed discontinuity fails the chord admissibility criterion."""


class WaveStructureError(AtomChainError, RuntimeError):
    """The wave-curve intersection could not be bracketed."""


class HorizonError(AtomChainError, ValueError):
    """A Riemann solution was sampled at or beyond its validity horizon."""


class IntegrationAbort(AtomChainError, RuntimeError):
    """Time integration stopped before reaching the requested time.

    Carries the time of the failure and the last accepted state vector so
    callers can report where things went wrong.
    """

    def __init__(self, message, t, y=None):
        super().__init__(f"{message} (t={t!r})")
        self.t = t
        self.y = y


class StiffnessError(IntegrationAbort):
    """Step size underflowed; the problem is stiffer than an explicit pair allows."""


class DiagnosticError(AtomChainError, RuntimeError):
    """A measurement could not be extracted from the supplied data."""


class ConfigError(AtomChainError, ValueError):
    """An experiment configuration failed validation."""
