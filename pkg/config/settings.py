from functools import lru_cache
from typing import List

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Runtime defaults shared by the CLI and the HTTP API.

    Every field can be overridden with an ``HAWKES_``-prefixed environment
    variable or a line in ``.env``.
    """

    model_config = SettingsConfigDict(env_prefix="HAWKES_", env_file=".env", extra="ignore")

    default_seed: int = 42
    strict_ingest: bool = True

    fit_restarts: int = 5
    fit_ftol: float = 1e-8
    fit_gtol: float = 1e-5
    fit_max_iterations: int = 500
    fixed_epsilon: float = 0.01

    sim_max_events: int = 1_000_000

    log_level: str = "INFO"

    api_host: str = "0.0.0.0"
    api_port: int = 8000
    cors_origins: List[str] = [
        "http://localhost:3000",
        "http://localhost:5173",
        "http://127.0.0.1:3000",
        "http://127.0.0.1:5173",
    ]


@lru_cache
def get_settings() -> Settings:
    return Settings()
