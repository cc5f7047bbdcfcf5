"""Derivative-free tuning of tracker parameters by coordinate pattern search.

The search is Hooke-Jeeves exploratory polling without the pattern
(acceleration) move: every sweep visits the free parameters in a fixed
order, tries ``+step`` then ``-step`` on each, and keeps the first trial
that strictly improves the objective. A sweep without any improvement
halves every step. Search stops after ``max_iters`` sweeps or once every
step has shrunk below ``1e-4`` of its initial size.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import metrics
from .config import TrackerConfig
from .errors import ConfigError, ObjectiveFailure
from .synth import SceneSpec, benchmark_scenes, generate
from .tracker import run_sequence

MIN_STEP_FRACTION = 1e-4

INTEGER_FIELDS = {"omega", "n", "m", "chi2_dof"}


@dataclass
class ParamSpec:
    name: str
    initial: float
    step: float
    lower: float = -math.inf
    upper: float = math.inf
    fixed: bool = False
    integer: bool = False

    def __post_init__(self):
        if not self.lower <= self.initial <= self.upper:
            raise ConfigError(f"{self.name}: initial value {self.initial} outside [{self.lower}, {self.upper}]")
        if not self.step > 0:
            raise ConfigError(f"{self.name}: step must be positive")

    def clamp(self, x: float) -> float:
        x = float(min(max(x, self.lower), self.upper))
        return float(round(x)) if self.integer else x


@dataclass
class SearchSpace:
    params: list[ParamSpec]

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.params]

    def initial(self) -> np.ndarray:
        return np.array([p.clamp(p.initial) for p in self.params], dtype=float)

    def point(self, x) -> dict[str, float]:
        return {p.name: (int(v) if p.integer else float(v)) for p, v in zip(self.params, x)}

    @classmethod
    def for_config(cls, cfg: TrackerConfig, bounds: dict[str, tuple[float, float, float]]) -> SearchSpace:
        """Free parameters are those with bounds; they follow TrackerConfig field order."""
        known = {f.name for f in dataclasses.fields(TrackerConfig)}
        unknown = set(bounds) - known
        if unknown:
            raise ConfigError(f"unknown parameters in bounds: {sorted(unknown)}")
        params = []
        for f in dataclasses.fields(TrackerConfig):
            if f.name not in bounds:
                continue
            val = getattr(cfg, f.name)
            if isinstance(val, (str, bool)):
                raise ConfigError(f"{f.name} is not a numeric parameter")
            lo, hi, step = bounds[f.name]
            params.append(ParamSpec(f.name, float(val), step, lo, hi, integer=f.name in INTEGER_FIELDS))
        return cls(params)


@dataclass
class TraceEntry:
    iteration: int
    vector: tuple[float, ...]
    value: float
    best: float


@dataclass
class SearchResult:
    best: dict[str, float]
    value: float
    trace: list[TraceEntry] = field(default_factory=list)
    iterations: int = 0
    steps: np.ndarray | None = None


def pattern_search(
    objective: Callable[[dict[str, float]], float],
    space: SearchSpace,
    max_iters: int = 200,
) -> SearchResult:
    """Maximise ``objective`` over ``space``; the objective receives ``{name: value}``."""
    x = space.initial()
    steps = np.array([p.step for p in space.params], dtype=float)
    min_steps = steps * MIN_STEP_FRACTION
    free = [i for i, p in enumerate(space.params) if not p.fixed]
    cache: dict[tuple, float] = {}
    trace: list[TraceEntry] = []

    def evaluate(v: np.ndarray, it: int, best_so_far: float) -> float:
        key = tuple(float(a) for a in v)
        if key in cache:
            return cache[key]
        pt = space.point(v)
        try:
            val = float(objective(pt))
        except Exception as exc:
            raise ObjectiveFailure(pt, exc) from exc
        if math.isnan(val):
            raise ObjectiveFailure(pt, ValueError("objective returned NaN"))
        cache[key] = val
        trace.append(TraceEntry(it, key, val, max(val, best_so_far)))
        return val

    fx = evaluate(x, 0, -math.inf)
    it = 0
    while it < max_iters and any(steps[i] >= min_steps[i] for i in free):
        it += 1
        improved = False
        for i in free:
            p = space.params[i]
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] = p.clamp(x[i] + sign * steps[i])
                if trial[i] == x[i]:
                    continue
                ft = evaluate(trial, it, fx)
                if ft > fx:
                    x, fx = trial, ft
                    improved = True
                    break
        if not improved:
            steps = steps * 0.5
    return SearchResult(space.point(x), fx, trace, it, steps)


# -- tracker objective --------------------------------------------------------


def scene_objective(
    scenes: list[SceneSpec] | None = None,
    metric: str = "mota",
    base: TrackerConfig | None = None,
) -> Callable[[dict[str, float]], float]:
    """Mean MOTA or IDF1 of the tracker over fixed synthetic scenes."""
    if metric not in ("mota", "idf1"):
        raise ConfigError(f"unknown metric {metric!r}")
    base = base or TrackerConfig()
    generated = [generate(s) for s in (scenes if scenes is not None else benchmark_scenes())]

    def objective(point: dict[str, float]) -> float:
        cfg = base.replace(**point)
        vals = []
        for sc in generated:
            res = run_sequence(sc.detections, sc.h0, sc.affines, cfg, frames=sc.frames)
            summary = metrics.evaluate(sc.gt_boxes(), metrics.results_to_boxes(res))
            vals.append(summary.mota if metric == "mota" else summary.idf1)
        return float(np.mean(vals))

    return objective


def parse_bounds(text: str, source: str = "<bounds>") -> dict[str, tuple[float, float, float]]:
    """``name = lower, upper, step`` per line, ``#`` comments."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'name = lower, upper, step'")
        name, rhs = (s.strip() for s in line.split("=", 1))
        parts = [s.strip() for s in rhs.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"{source}:{lineno}: expected three numbers after '='")
        try:
            lo, hi, step = (float(s) for s in parts)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bounds must be numbers") from None
        if not lo <= hi or not step > 0:
            raise ConfigError(f"{source}:{lineno}: need lower <= upper and step > 0")
        out[name] = (lo, hi, step)
    return out


def format_trace(trace: list[TraceEntry]) -> str:
    lines = ["iter,param_vector,value\n"]
    for e in trace:
        vec = " ".join(repr(v) for v in e.vector)
        lines.append(f"{e.iteration},{vec},{e.value!r}\n")
    return "".join(lines)
