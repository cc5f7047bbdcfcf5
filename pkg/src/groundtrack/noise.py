"""Adaptive noise covariance estimation over short moving windows."""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import EmptyWindow, InvalidBox

# state layout: x, vx, y, vy, then 9 homography entries (column-major)
POS = [0, 2]
HOMOG = slice(4, 13)
STATE_DIM = 13


def psd_repair(m: np.ndarray) -> np.ndarray:
    """Symmetrise and clamp negative eigenvalues to zero."""
    s = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(s)
    if w.min() >= 0.0:
        return s
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.T
    return 0.5 * (out + out.T)


class NoiseWindow:
    """Ring buffer of covariance samples whose mean is the running estimate."""

    def __init__(self, dim: int, m: int = 5):
        if m < 1:
            raise ValueError("window length must be at least 1")
        self.dim = dim
        self.m = m
        self.samples: deque[np.ndarray] = deque(maxlen=m)

    def __len__(self):
        return len(self.samples)

    def push(self, sample: np.ndarray) -> None:
        sample = np.asarray(sample, dtype=float)
        if sample.shape != (self.dim, self.dim):
            raise ValueError(f"expected {self.dim}x{self.dim} sample, got {sample.shape}")
        self.samples.append(0.5 * (sample + sample.T))

    def copy(self) -> NoiseWindow:
        out = NoiseWindow(self.dim, self.m)
        out.samples.extend(s.copy() for s in self.samples)
        return out


def window_mean(w: NoiseWindow) -> np.ndarray:
    if not w.samples:
        raise EmptyWindow("no samples in window")
    return np.mean(np.stack(w.samples), axis=0)


def initial_r(w: float, h: float, sigma_m: float = 0.05) -> np.ndarray:
    if w <= 0 or h <= 0:
        raise InvalidBox(f"box size must be positive, got w={w}, h={h}")
    return np.diag([(sigma_m * w) ** 2, (sigma_m * h) ** 2])


def ground_process_q(sigma_x: float, sigma_y: float, dt: float) -> np.ndarray:
    """Constant-velocity process noise for (x, vx, y, vy).

    The compensation factors enter the diagonal as given, not squared.
    """
    gamma = np.array(
        [
            [0.5 * dt * dt, 0.0],
            [dt, 0.0],
            [0.0, 0.5 * dt * dt],
            [0.0, dt],
        ]
    )
    return gamma @ np.diag([sigma_x, sigma_y]) @ gamma.T


def measurement_noise_sample(residual, j: np.ndarray, p_prior: np.ndarray) -> np.ndarray:
    """Residual outer product plus the prior covariance mapped into the image."""
    e = np.asarray(residual, dtype=float).reshape(2)
    return np.outer(e, e) + j @ p_prior @ j.T


def process_noise_sample(k: np.ndarray, innovation) -> np.ndarray:
    d = np.asarray(innovation, dtype=float).reshape(-1)
    kd = k @ d
    return np.outer(kd, kd)


def extract_homography_block(q_full: np.ndarray) -> np.ndarray:
    q = np.array(q_full[HOMOG, HOMOG], dtype=float)
    q[8, :] = 0.0
    q[:, 8] = 0.0
    return q
