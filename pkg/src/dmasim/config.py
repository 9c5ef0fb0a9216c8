"""Campaign configuration: dataclass, validation, and the flat key-value
config-file format.

Config files are plain text, one ``key = value`` pair per line; ``#``
starts a comment and blank lines are ignored.  Keys match the
:class:`ExperimentConfig` field names exactly.  ``snr_grid_db`` accepts a
comma list (``0,5,10``) or a ``start:step:stop`` range (``0:5:30``,
inclusive).  Booleans are ``true``/``false``.  Keys of the form
``sweep_<field> = v1,v2,...`` do not configure the base campaign; they
declare a grid for the ``sweep`` command and are returned separately.
"""

import dataclasses
import hashlib
from dataclasses import dataclass

RECEIVERS = ("proposed", "bench-data-aided", "bench-pilot-aided")
TRAININGS = ("lorentzian", "semi-unitary-dft")
INNER_MODELS = ("random-phase", "physical")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent campaign configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    K: int = 8  # receive antennas
    T: int = 10  # symbols per block
    P: int = 32  # training slots
    N: int = 16  # radiating elements (must equal D * L)
    D: int = 4  # waveguides
    L: int = 4  # elements per waveguide
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 10_000
    receiver: str = "proposed"
    training: str = "lorentzian"
    inner_model: str = "random-phase"
    alpha: float = 0.0
    beta: float = 0.0
    spacing: float = 0.0
    qam_order: int = 64
    seed: int = 0
    tol: float = 1e-6
    max_iters: int = 1000
    rcond: float = 1e-12
    threads: int = 1
    noiseless: bool = False
    timing: bool = True


_BOOL_FIELDS = {"noiseless", "timing"}
_INT_FIELDS = {
    "K", "T", "P", "N", "D", "L", "trials", "qam_order", "seed",
    "max_iters", "threads",
}
_FLOAT_FIELDS = {"alpha", "beta", "spacing", "tol", "rcond"}
_STR_FIELDS = {"receiver", "training", "inner_model"}
_FIELD_NAMES = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_snr_grid(raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr_grid_db range must be start:step:stop, got {raw!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("snr_grid_db range step must be positive")
        grid = []
        v = start
        while v <= stop + 1e-9:
            grid.append(round(v, 9))
            v += step
        return tuple(grid)
    return tuple(float(p) for p in raw.split(",") if p.strip())


def coerce_value(key: str, raw: str):
    """Convert one raw config string to the typed value for ``key``."""
    raw = raw.strip()
    try:
        if key == "snr_grid_db":
            return _parse_snr_grid(raw)
        if key in _BOOL_FIELDS:
            return _parse_bool(raw, key)
        if key in _INT_FIELDS:
            return int(raw)
        if key in _FLOAT_FIELDS:
            return float(raw)
        if key in _STR_FIELDS:
            return raw
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str) -> tuple[dict, dict]:
    """Parse config-file text into (field values, sweep grids)."""
    values: dict = {}
    sweeps: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key.startswith("sweep_"):
            target = key[len("sweep_"):]
            if target not in _FIELD_NAMES or target == "snr_grid_db":
                raise ConfigError(f"line {lineno}: cannot sweep {target!r}")
            sweeps[target] = tuple(
                coerce_value(target, part) for part in raw.split(",") if part.strip()
            )
            continue
        if key not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = coerce_value(key, raw)
    return values, sweeps


def load_config_file(path: str) -> tuple[ExperimentConfig, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        values, sweeps = parse_config_text(fh.read())
    cfg = ExperimentConfig(**values)
    validate_config(cfg)
    return cfg, sweeps


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Raise ConfigError on hard violations; return advisory warnings."""
    warnings: list[str] = []
    for name in ("K", "T", "P", "N", "D", "L"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"{name} must be >= 1")
    if cfg.N != cfg.D * cfg.L:
        raise ConfigError(f"N must equal D*L, got N={cfg.N}, D*L={cfg.D * cfg.L}")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.max_iters < 1:
        raise ConfigError("max_iters must be >= 1")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if cfg.seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not (cfg.tol > 0.0):
        raise ConfigError("tol must be positive")
    if not (cfg.rcond > 0.0):
        raise ConfigError("rcond must be positive")
    if cfg.receiver not in RECEIVERS:
        raise ConfigError(f"receiver must be one of {RECEIVERS}")
    if cfg.training not in TRAININGS:
        raise ConfigError(f"training must be one of {TRAININGS}")
    if cfg.inner_model not in INNER_MODELS:
        raise ConfigError(f"inner_model must be one of {INNER_MODELS}")
    if cfg.receiver != "proposed" and cfg.training != "semi-unitary-dft":
        raise ConfigError(
            "benchmark receivers require training = semi-unitary-dft"
        )
    from .channels import _qam_side  # validation only

    try:
        _qam_side(cfg.qam_order)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.inner_model == "physical":
        if cfg.spacing <= 0:
            raise ConfigError("physical inner model requires spacing > 0")
        if cfg.alpha < 0:
            raise ConfigError("physical inner model requires alpha >= 0")
    if not cfg.noiseless and len(cfg.snr_grid_db) == 0:
        raise ConfigError("snr_grid_db must not be empty for a noisy campaign")
    if cfg.P < cfg.N:
        warnings.append(
            f"P={cfg.P} < N={cfg.N}: training cannot reach full column rank; "
            "estimation will likely fail"
        )
    return warnings


def format_config(cfg: ExperimentConfig) -> str:
    """Canonical key-value rendering (also valid as a config file)."""
    lines = []
    for f_ in dataclasses.fields(ExperimentConfig):
        value = getattr(cfg, f_.name)
        if f_.name == "snr_grid_db":
            value = ",".join(repr(float(v)) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f_.name} = {value}")
    return "\n".join(lines) + "\n"


def config_sha(cfg: ExperimentConfig) -> str:
    """Short content hash identifying a configuration."""
    return hashlib.sha256(format_config(cfg).encode()).hexdigest()[:12]
