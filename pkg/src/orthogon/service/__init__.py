from .app import app as fastapi_app

__all__ = ["fastapi_app"]
