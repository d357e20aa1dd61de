"""Engine configuration loaded from YAML."""

from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "isoformal" / "config.yaml"


class EngineConfig(BaseModel):
    """Caps and switches shared by the engines and the CLI."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    weyl_cap: int = Field(default=1_000_000, ge=1)
    # polynomial degree; None means sum(d_i - 1) for the ambient group
    degree_cap: Optional[int] = Field(default=None, ge=1)
    fast_path: bool = False
    jobs: int = Field(default=1, ge=1)
    seed: int = 20240601
    log_dir: Optional[str] = None

    def with_overrides(self, **overrides: Any) -> "EngineConfig":
        """Return a copy with every non-None override applied."""
        update = {key: value for key, value in overrides.items() if value is not None}
        if not update:
            return self
        try:
            return EngineConfig.model_validate({**self.model_dump(), **update})
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration override: {e}") from e


def load_config(path: Optional[str] = None) -> EngineConfig:
    """Load configuration from ``path`` or the default location.

    A missing default file yields the defaults; a missing explicit file is an
    error.
    """
    config_path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        if path:
            raise ConfigError(f"Config file not found: {path}")
        return EngineConfig()

    try:
        with open(config_path, "r") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {config_path}: {e}") from e

    if data is None:
        return EngineConfig()
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {config_path} must contain a mapping")

    try:
        return EngineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration in {config_path}: {e}") from e
