"""Tracker hyperparameters and the flat ``key = value`` config format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError


@dataclass
class TrackerConfig:
    # ground-plane process noise compensation factors
    sigma_x: float = 5.0
    sigma_y: float = 5.0
    # association gates for stages 1-3
    alpha1: float = 0.5
    alpha2: float = 0.5
    alpha3: float = 0.5
    # max frames a coasted track survives without an update
    omega: int = 30
    # BIoU buffer scale
    b: float = 0.0
    d_high: float = 0.6
    d_low: float = 0.5
    # self-transition probabilities: static/dynamic camera, ground/image association
    p_ss: float = 0.9
    p_dd: float = 0.9
    p_ww: float = 0.9
    p_ii: float = 0.9
    # initial velocity variance, (m/s)^2
    v: float = 0.5
    sigma_m: float = 0.05
    n: int = 5
    m: int = 5
    chi2_dof: int = 24
    dt: float = 1.0 / 20.0
    # "imm" mixes BIoU and P(D) by association probabilities; "ground" uses P(D) only
    stage2_score: str = "imm"
    # couple coasted boxes to the projected ground prediction (False freezes them)
    coast_coupling: bool = True
    # False keeps R at its initial value instead of the windowed estimate
    adaptive_r: bool = True
    # camera-model likelihood inside the ground IMM: "gaussian" or "pd"
    camera_likelihood: str = "gaussian"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("alpha1", "alpha2", "alpha3", "d_high", "d_low", "p_ss", "p_dd", "p_ww", "p_ii"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {val}")
        if self.d_low > self.d_high:
            raise ConfigError(f"d_low ({self.d_low}) exceeds d_high ({self.d_high})")
        if self.omega < 1:
            raise ConfigError("omega must be at least 1")
        if self.n < 1 or self.m < 1:
            raise ConfigError("buffer and window lengths must be at least 1")
        if self.chi2_dof < 1:
            raise ConfigError("chi2_dof must be a positive integer")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.b < 0 or self.v < 0 or self.sigma_m <= 0:
            raise ConfigError("b and v must be non-negative and sigma_m positive")
        if self.sigma_x < 0 or self.sigma_y < 0:
            raise ConfigError("process noise factors must be non-negative")
        if self.stage2_score not in ("imm", "ground"):
            raise ConfigError(f"unknown stage2_score {self.stage2_score!r}")
        if self.camera_likelihood not in ("gaussian", "pd"):
            raise ConfigError(f"unknown camera_likelihood {self.camera_likelihood!r}")

    def replace(self, **changes) -> TrackerConfig:
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_fps(cls, fps: float, **kw) -> TrackerConfig:
        if fps <= 0:
            raise ConfigError("fps must be positive")
        return cls(dt=1.0 / fps, **kw)


_FIELDS = {f.name: f for f in fields(TrackerConfig)}
# accept the mixed-case spellings of the association transition probabilities
_ALIASES = {"p_WW": "p_ww", "p_II": "p_ii"}


def _coerce(name: str, raw: str):
    kind = type(getattr(TrackerConfig(), name))
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            val = float(raw)
            if val != int(val):
                raise ValueError(raw)
            return int(val)
        if kind is float:
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def parse_config(text: str, base: TrackerConfig | None = None, source: str = "<config>") -> TrackerConfig:
    values = dataclasses.asdict(base) if base is not None else {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return TrackerConfig(**values)


def load_config(path, base: TrackerConfig | None = None) -> TrackerConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base=base, source=str(path))


def format_config(cfg: TrackerConfig) -> str:
    lines = []
    for name, val in dataclasses.asdict(cfg).items():
        lines.append(f"{name} = {val!r}" if isinstance(val, float) else f"{name} = {val}")
    return "\n".join(lines) + "\n"
