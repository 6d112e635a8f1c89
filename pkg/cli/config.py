"""
Run configuration for the batch commands.

Resolution order, later wins: built-in defaults, the JSON file given by
--config, the ORLICZ_IG_SEED environment variable, explicit flags.
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

from core.conf import get_setting
from core.exceptions import OrliczError
from gaussian_measure.integrators import GaussianIntegrator
from gaussian_measure.serializers import IntegratorSerializer
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)


class ConfigError(OrliczError):
    """Unreadable or invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    n: int = 1
    backend: Optional[str] = None
    order: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    tolerance: Optional[float] = None
    format: str = "json"
    functions: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_data(cls, data: dict) -> "RunConfig":
        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            raise ConfigError(f"Invalid run configuration: {json.dumps(serializer.errors, sort_keys=True)}")
        return cls(**serializer.validated_data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"Config file {path} does not exist")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file {path} is not valid JSON: {exc.msg} (line {exc.lineno})")
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        logger.info(f"Loaded run configuration from {path}")
        return cls.from_data(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @property
    def effective_tolerance(self) -> float:
        return self.tolerance if self.tolerance is not None else get_setting("TOLERANCE")

    def integrator(self, dim: Optional[int] = None, backend: Optional[str] = None) -> GaussianIntegrator:
        serializer = IntegratorSerializer(data={
            "n": dim or self.n,
            "backend": backend or self.backend,
            "order": self.order,
            "samples": self.samples,
            "seed": self.seed,
        })
        if not serializer.is_valid():
            raise ConfigError(f"Invalid integrator settings: {json.dumps(serializer.errors, sort_keys=True)}")
        return serializer.save()

    def function_spec(self, name: str, flag_value=None):
        if flag_value is not None:
            return flag_value
        return self.functions.get(name)


FLAG_KEYS = ("n", "backend", "order", "samples", "seed", "tolerance", "format")


def resolve_run_config(options: dict) -> RunConfig:
    config = RunConfig.load(options["config"]) if options.get("config") else RunConfig()
    env_seed = os.getenv("ORLICZ_IG_SEED")
    if env_seed:
        try:
            config = replace(config, seed=int(env_seed))
        except ValueError:
            raise ConfigError(f'ORLICZ_IG_SEED must be an integer, got "{env_seed}"')
    flags = {key: options.get(key) for key in FLAG_KEYS if options.get(key) is not None}
    return replace(config, **flags)
