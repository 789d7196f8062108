"""
Settings
Padrões de processo lidos do ambiente (.env).
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


# === CONFIGURAÇÕES ===

ENV_PREFIX = "IONGATE_"


class Settings(BaseModel):
    """Padrões do processo; flags da CLI têm prioridade"""
    jobs: int = Field(default=1, ge=1)
    out_dir: str = "results"
    format: str = Field(default="csv", pattern="^(csv|json-lines)$")
    log_level: str = "INFO"


def load_settings(env_file: Optional[str] = None) -> Settings:
    """
    Carrega as configurações do ambiente.

    Args:
        env_file: caminho opcional de um arquivo .env

    Returns:
        Settings validado
    """
    load_dotenv(env_file)

    values = {
        "jobs": os.getenv(f"{ENV_PREFIX}JOBS"),
        "out_dir": os.getenv(f"{ENV_PREFIX}OUT_DIR"),
        "format": os.getenv(f"{ENV_PREFIX}FORMAT"),
        "log_level": os.getenv(f"{ENV_PREFIX}LOG_LEVEL"),
    }
    return Settings(**{k: v for k, v in values.items() if v is not None})
