"""Interacting-multiple-model EKF over the joint ground/homography state.

Each track carries two extended Kalman filters over the 13-dim state
(x, vx, y, vy, h1, h4, h7, h2, h5, h8, h3, h6, h9). Both share the
constant-velocity ground motion; they differ in how the homography block
evolves between frames:

* ``static``  - the homography is carried over unchanged,
* ``dynamic`` - the homography is left-multiplied by the frame's affine
  camera motion.

Measurement and homography process noise are re-estimated online from
short windows of residual/innovation statistics (see :mod:`noise`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .association import p_of_d
from .config import TrackerConfig
from .errors import DegenerateMixing, DegenerateProjection, SingularInnovation
from .geometry import AffineMotion, Homography, affine_state_map, jacobian_ground, unproject
from .noise import (
    HOMOG,
    STATE_DIM,
    NoiseWindow,
    extract_homography_block,
    initial_r,
    measurement_noise_sample,
    process_noise_sample,
    psd_repair,
    window_mean,
)

STATIC, DYNAMIC = "static", "dynamic"
H9 = 12
_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class GroundState:
    v: np.ndarray
    p: np.ndarray

    def copy(self) -> GroundState:
        return GroundState(self.v.copy(), self.p.copy())

    @property
    def position(self) -> tuple[float, float]:
        return float(self.v[0]), float(self.v[2])

    @property
    def velocity(self) -> tuple[float, float]:
        return float(self.v[1]), float(self.v[3])

    @property
    def homography(self) -> Homography:
        return Homography.from_vec(self.v[HOMOG])


def _pin(v: np.ndarray, p: np.ndarray) -> GroundState:
    """Enforce h9 == 1 with zero variance, and exact covariance symmetry."""
    v = v.copy()
    v[H9] = 1.0
    p = 0.5 * (p + p.T)
    p[H9, :] = 0.0
    p[:, H9] = 0.0
    return GroundState(v, p)


@dataclass
class ModelFilter:
    """One camera-motion hypothesis with its own noise windows."""

    kind: str
    state: GroundState
    r0: np.ndarray
    r_window: NoiseWindow
    q_window: NoiseWindow

    def copy(self) -> ModelFilter:
        return ModelFilter(self.kind, self.state.copy(), self.r0.copy(), self.r_window.copy(), self.q_window.copy())

    def r_prev(self, adaptive: bool = True) -> np.ndarray:
        if adaptive and len(self.r_window):
            return psd_repair(window_mean(self.r_window))
        return self.r0

    def q_h(self) -> np.ndarray:
        if len(self.q_window):
            return psd_repair(window_mean(self.q_window))
        return np.zeros((9, 9))


def transition_matrix(p_ss: float, p_dd: float) -> np.ndarray:
    return np.array([[p_ss, 1.0 - p_ss], [1.0 - p_dd, p_dd]])


@dataclass
class ImmState:
    models: list[ModelFilter]
    mu: np.ndarray
    trans: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.trans = np.asarray(self.trans, dtype=float)

    def copy(self) -> ImmState:
        return ImmState([mf.copy() for mf in self.models], self.mu.copy(), self.trans.copy())

    def combined(self) -> GroundState:
        return combine([mf.state for mf in self.models], self.mu)


@dataclass
class Prediction:
    state: GroundState
    per_model: list[GroundState]
    mu_pred: np.ndarray
    mixed: list[GroundState] = field(default_factory=list)


@dataclass
class UpdateStats:
    innovations: list[np.ndarray]
    s: list[np.ndarray]
    r_used: list[np.ndarray]
    log_likelihoods: np.ndarray


def measure(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predicted bottom-centre pixel and the 2x13 measurement Jacobian at ``v``."""
    hv = v[HOMOG]
    h1, h4, h7, h2, h5, h8, h3, h6, h9 = hv
    x, y = v[0], v[2]
    b1 = h1 * x + h2 * y + h3
    b2 = h4 * x + h5 * y + h6
    b3 = h7 * x + h8 * y + h9
    if abs(b3) <= 1e-12:
        raise DegenerateProjection("track position projects to infinity")
    g = 1.0 / b3
    xi, yi = b1 * g, b2 * g
    j = np.zeros((2, STATE_DIM))
    j[0, 0] = g * (h1 - h7 * xi)
    j[0, 2] = g * (h2 - h8 * xi)
    j[1, 0] = g * (h4 - h7 * yi)
    j[1, 2] = g * (h5 - h8 * yi)
    j[0, 4:13] = g * np.array([x, 0.0, -xi * x, y, 0.0, -xi * y, 1.0, 0.0, 0.0])
    j[1, 4:13] = g * np.array([0.0, x, -yi * x, 0.0, y, -yi * y, 0.0, 1.0, 0.0])
    return np.array([xi, yi]), j


def _cv_block(dt: float) -> np.ndarray:
    return np.array([[1.0, dt, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, dt], [0, 0, 0, 1.0]])


def transition(kind: str, affine: AffineMotion | None, dt: float) -> np.ndarray:
    f = np.eye(STATE_DIM)
    f[:4, :4] = _cv_block(dt)
    if kind == DYNAMIC and affine is not None:
        f[HOMOG, HOMOG] = affine_state_map(affine)
    elif kind not in (STATIC, DYNAMIC):
        raise ValueError(f"unknown camera model {kind!r}")
    return f


def init_track_filter(
    box,
    h0: Homography,
    cfg: TrackerConfig,
    kinds: tuple[str, ...] = (STATIC, DYNAMIC),
    mu0=None,
    pos_cov: str = "inverse",
) -> ImmState:
    """Start a filter bank from a detection box and the current homography.

    The ground position is the back-projection of the box's bottom-centre;
    velocities start at zero with variance ``cfg.v``, and the homography
    block starts with zero covariance. ``pos_cov="inverse"`` maps the
    initial pixel noise to the ground plane through the inverse ground
    Jacobian; ``"literal"`` applies the forward Jacobian congruence.
    """
    foot = (0.5 * (box.l + box.r), box.b)
    gx, gy = unproject(h0, foot)
    r0 = initial_r(max(box.w, 1e-6), max(box.h, 1e-6), cfg.sigma_m)
    jg = jacobian_ground(h0, (gx, gy))
    if pos_cov == "inverse":
        jinv = np.linalg.inv(jg)
        pc = jinv @ r0 @ jinv.T
    elif pos_cov == "literal":
        pc = jg @ r0 @ jg.T
    else:
        raise ValueError(f"unknown pos_cov {pos_cov!r}")
    v = np.zeros(STATE_DIM)
    v[0], v[2] = gx, gy
    v[HOMOG] = h0.vec
    p = np.zeros((STATE_DIM, STATE_DIM))
    p[np.ix_([0, 2], [0, 2])] = pc
    p[1, 1] = p[3, 3] = cfg.v
    state = _pin(v, p)
    models = [
        ModelFilter(k, state.copy(), r0.copy(), NoiseWindow(2, cfg.m), NoiseWindow(9, cfg.m)) for k in kinds
    ]
    r = len(models)
    mu = np.full(r, 1.0 / r) if mu0 is None else np.asarray(mu0, dtype=float)
    trans = transition_matrix(cfg.p_ss, cfg.p_dd) if r == 2 else np.eye(r)
    return ImmState(models, mu, trans)


def combine(states: list[GroundState], weights) -> GroundState:
    w = np.asarray(weights, dtype=float)
    mean = sum(wi * s.v for wi, s in zip(w, states))
    cov = np.zeros((STATE_DIM, STATE_DIM))
    for wi, s in zip(w, states):
        if wi == 0.0:
            continue
        dx = s.v - mean
        cov += wi * (s.p + np.outer(dx, dx))
    return _pin(mean, cov)


def mix(s: ImmState) -> tuple[list[GroundState], np.ndarray]:
    """Mixed initial conditions; returns states and weights[j, i] = mu^{i|j}.

    A model whose predicted probability vanishes keeps its own estimate.
    """
    if not np.all(np.isfinite(s.mu)):
        raise DegenerateMixing("model probabilities are not finite")
    c = s.trans.T @ s.mu
    if c.sum() < 1e-15:
        raise DegenerateMixing("all predicted model probabilities vanish")
    r = len(s.models)
    w = np.zeros((r, r))
    mixed = []
    for i in range(r):
        if c[i] < 1e-15:
            w[i, i] = 1.0
            mixed.append(s.models[i].state.copy())
            continue
        w[:, i] = s.trans[:, i] * s.mu / c[i]
        mixed.append(combine([mf.state for mf in s.models], w[:, i]))
    return mixed, w


def predict(
    s: ImmState,
    affine: AffineMotion | None,
    q_ground: np.ndarray,
    dt: float,
    q_h: list[np.ndarray] | None = None,
) -> Prediction:
    """Mix, then propagate each model one frame ahead. ``s`` is not modified."""
    mixed, _ = mix(s)
    per_model = []
    for i, (mf, m0) in enumerate(zip(s.models, mixed)):
        f = transition(mf.kind, affine, dt)
        q = np.zeros((STATE_DIM, STATE_DIM))
        q[:4, :4] = q_ground
        q[HOMOG, HOMOG] = mf.q_h() if q_h is None else q_h[i]
        per_model.append(_pin(f @ m0.v, f @ m0.p @ f.T + q))
    mu_pred = s.trans.T @ s.mu
    mu_pred = mu_pred / mu_pred.sum()
    return Prediction(combine(per_model, mu_pred), per_model, mu_pred, mixed)


def coast(s: ImmState, pred: Prediction) -> ImmState:
    """Advance without a measurement: adopt the predictions as the new estimates."""
    out = s.copy()
    for mf, st in zip(out.models, pred.per_model):
        mf.state = st.copy()
    out.mu = pred.mu_pred.copy()
    return out


def _gain(p: np.ndarray, j: np.ndarray, r: np.ndarray):
    s = psd_repair(j @ p @ j.T + r)
    det = np.linalg.det(s)
    if not np.isfinite(det) or det <= 1e-300:
        raise SingularInnovation(f"innovation covariance is singular (det={det})")
    s_inv = np.linalg.inv(s)
    return p @ j.T @ s_inv, s, s_inv, det


def ekf_update(state: GroundState, z, r: np.ndarray) -> tuple[GroundState, np.ndarray, np.ndarray]:
    """Plain EKF update; returns the posterior, the innovation and its covariance."""
    zhat, j = measure(state.v)
    k, s, _, _ = _gain(state.p, j, r)
    d = np.asarray(z, dtype=float) - zhat
    ikj = np.eye(STATE_DIM) - k @ j
    p = ikj @ state.p @ ikj.T + k @ r @ k.T
    return _pin(state.v + k @ d, p), d, s


def model_update(mf: ModelFilter, prior: GroundState, z, adaptive_r: bool = True):
    """Dummy-then-real update of one model with online noise estimation.

    Mutates the model's windows and state; returns (innovation, S, R used).
    """
    z = np.asarray(z, dtype=float)
    zhat, j = measure(prior.v)
    d = z - zhat
    if adaptive_r:
        # the dummy pass only serves to produce the residual for the R sample
        k_dummy, _, _, _ = _gain(prior.p, j, mf.r_prev())
        v_dummy = prior.v + k_dummy @ d
        v_dummy[H9] = 1.0
        eps = z - measure(v_dummy)[0]
        mf.r_window.push(measurement_noise_sample(eps, j, prior.p))
        r = psd_repair(window_mean(mf.r_window))
    else:
        r = mf.r0
    k, s, _, _ = _gain(prior.p, j, r)
    ikj = np.eye(STATE_DIM) - k @ j
    p = ikj @ prior.p @ ikj.T + k @ r @ k.T
    mf.state = _pin(prior.v + k @ d, p)
    mf.q_window.push(extract_homography_block(process_noise_sample(k, d)))
    return d, s, r


def _loglik(d, s, kind: str, dof: int) -> float:
    if kind == "gaussian":
        _, logdet = np.linalg.slogdet(s)
        return float(-0.5 * (d @ np.linalg.solve(s, d)) - 0.5 * logdet - _LOG_2PI)
    dist = float(d @ np.linalg.solve(s, d) + np.linalg.slogdet(s)[1])
    pd = p_of_d(dist, dof)
    return float(np.log(pd)) if pd > 0 else -np.inf


def update(
    s: ImmState,
    meas,
    pred: Prediction,
    adaptive_r: bool = True,
    likelihood: str = "gaussian",
    dof: int = 24,
) -> tuple[ImmState, np.ndarray, UpdateStats]:
    """Measurement update of every model and of the model probabilities."""
    out = s.copy()
    innovations, covs, rs, logl = [], [], [], []
    for mf, prior in zip(out.models, pred.per_model):
        d, sc, r = model_update(mf, prior, meas, adaptive_r)
        innovations.append(d)
        covs.append(sc)
        rs.append(r)
        logl.append(_loglik(d, sc, likelihood, dof))
    logl = np.array(logl)
    out.mu = posterior_probs(pred.mu_pred, logl)
    lam = np.exp(logl)
    return out, lam, UpdateStats(innovations, covs, rs, logl)


def posterior_probs(mu_pred: np.ndarray, loglik: np.ndarray) -> np.ndarray:
    """mu_i proportional to mu_pred_i * exp(loglik_i), computed in the log domain."""
    with np.errstate(divide="ignore"):
        logw = np.log(mu_pred) + loglik
    top = np.max(logw)
    if not np.isfinite(top):
        return mu_pred.copy()
    w = np.exp(logw - top)
    return w / w.sum()
