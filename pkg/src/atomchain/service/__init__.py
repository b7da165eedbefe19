"""HTTP service: ``uvicorn atomchain.service:app`` or ``atomchain serve``."""

from .app import app, create_app

__all__ = ["app", "create_app"]
