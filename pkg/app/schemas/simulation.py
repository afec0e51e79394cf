"""Pydantic schemas for the simulated noisy backend."""
import json
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from app.config.settings import get_settings
from app.errors import ConfigError
from app.models.enums import BackendMode


# ============== Noise Schemas ==============

class NoiseModel(BaseModel):
    """Stochastic Pauli gate noise plus per-bit readout flips.

    3-qubit gates take p2 on each of their wires.
    """
    p1: float = Field(default=0.002, ge=0.0, le=1.0)
    p2: float = Field(default=0.02, ge=0.0, le=1.0)
    p_ro: float = Field(default=0.03, ge=0.0, le=1.0)
    seed: int = 7

    model_config = {"frozen": True, "extra": "forbid"}

    @classmethod
    def default(cls) -> "NoiseModel":
        settings = get_settings()
        return cls(
            p1=settings.noise_p1,
            p2=settings.noise_p2,
            p_ro=settings.noise_p_ro,
            seed=settings.seed,
        )

    @classmethod
    def noiseless(cls, seed: int = 7) -> "NoiseModel":
        return cls(p1=0.0, p2=0.0, p_ro=0.0, seed=seed)

    def with_seed(self, seed: int) -> "NoiseModel":
        return self.model_copy(update={"seed": seed})


def load_noise_model(path: str | Path) -> NoiseModel:
    """
    Read a noise config file.

    JSON objects and ``key = value`` / ``key: value`` text are both accepted;
    '#' starts a comment in the text form.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"noise config not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: cannot read noise config: {exc}") from exc
    try:
        stripped = text.strip()
        if stripped.startswith("{"):
            data = json.loads(stripped)
        else:
            data = {}
            for raw in stripped.splitlines():
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.replace(":", "=", 1).partition("=")
                if not sep:
                    raise ConfigError(f"{path}: cannot read line '{raw}'")
                data[key.strip()] = value.strip()
        return NoiseModel.model_validate(data)
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigError(f"{path}: invalid noise config: {exc}") from exc


# ============== Simulation API Schemas ==============

class SimulateRequest(BaseModel):
    """Request body for POST /circuits/simulate."""
    qasm: str
    mode: BackendMode = BackendMode.EXACT
    shots: int | None = Field(default=None, ge=1)
    noise: NoiseModel | None = None


class DistributionResponse(BaseModel):
    """Outcome distribution; bit i of every key is qubit i."""
    n_bits: int
    probs: dict[str, float]
