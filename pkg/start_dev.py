"""
Development server with auto-reload.

Run: python start_dev.py
"""
import uvicorn

from config.settings import get_settings

if __name__ == "__main__":
    settings = get_settings()
    uvicorn.run("main:app", host=settings.api_host, port=settings.api_port, reload=True, log_level=settings.log_level.lower())
