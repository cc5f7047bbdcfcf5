"""Association scores, association-layer model probabilities and gated assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import gammainc

from .errors import SingularInnovation, ZeroLikelihoods
from .noise import psd_repair

CHI2_DOF = 24


@dataclass(frozen=True)
class AssocModelProbs:
    """Probabilities that the image-plane (mu_i) or ground-plane (mu_w) filter explains the track."""

    mu_i: float = 0.5
    mu_w: float = 0.5

    def __post_init__(self):
        if self.mu_i < 0 or self.mu_w < 0 or abs(self.mu_i + self.mu_w - 1.0) > 1e-12:
            raise ValueError(f"not a probability pair: ({self.mu_i}, {self.mu_w})")


def _normalised(a: float, b: float) -> AssocModelProbs:
    s = a + b
    mu_i = a / s
    return AssocModelProbs(mu_i, 1.0 - mu_i)


def innovation_stats(s: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse and log-determinant of an innovation covariance."""
    s = psd_repair(np.asarray(s, dtype=float))
    det = np.linalg.det(s)
    if not np.isfinite(det) or det <= 1e-300:
        raise SingularInnovation(f"innovation covariance is singular (det={det})")
    return np.linalg.inv(s), float(np.log(det))


def mahalanobis_d(innovation, s: np.ndarray) -> float:
    """Normalised distance d^T S^-1 d + ln|S|."""
    s_inv, logdet = innovation_stats(s)
    d = np.asarray(innovation, dtype=float).reshape(2)
    return float(d @ s_inv @ d + logdet)


def chi2_cdf(x: float, k: int = CHI2_DOF) -> float:
    if k < 1 or int(k) != k:
        raise ValueError(f"degrees of freedom must be a positive integer, got {k}")
    if x <= 0:
        return 0.0
    return float(gammainc(0.5 * k, 0.5 * x))


def p_of_d(d, k: int = CHI2_DOF):
    """Upper-tail chi-squared probability of a normalised distance.

    Negative distances (possible through ln|S| < 0) are clamped to zero.
    Works elementwise on arrays.
    """
    d = np.maximum(np.asarray(d, dtype=float), 0.0)
    out = 1.0 - gammainc(0.5 * k, 0.5 * d)
    return float(out) if out.ndim == 0 else out


def stage1_score(p_d, biou, conf):
    return p_d * biou * conf


def stage2_score(mu: AssocModelProbs, p_d, biou, conf):
    return (mu.mu_i * biou + mu.mu_w * p_d) * conf


def predict_assoc_probs(mu: AssocModelProbs, p_ii: float, p_ww: float) -> AssocModelProbs:
    # rows of the transition matrix: (p_ii, 1 - p_ii) from image, (1 - p_ww, p_ww) from ground
    a = p_ii * mu.mu_i + (1.0 - p_ww) * mu.mu_w
    b = (1.0 - p_ii) * mu.mu_i + p_ww * mu.mu_w
    return _normalised(a, b)


def update_assoc_probs(mu_pred: AssocModelProbs, lambda_i: float, lambda_w: float) -> AssocModelProbs:
    if lambda_i < 0 or lambda_w < 0:
        raise ValueError("likelihoods must be non-negative")
    a, b = mu_pred.mu_i * lambda_i, mu_pred.mu_w * lambda_w
    if a + b <= 0.0:
        raise ZeroLikelihoods("both association likelihoods vanish")
    return _normalised(a, b)


def solve_assignment(scores: np.ndarray, gate: float) -> list[tuple[int, int]]:
    """Maximum-total-score one-to-one matching over pairs scoring at least ``gate``.

    Gated pairs are excluded from the optimisation rather than filtered
    afterwards, so they can never displace an admissible pair.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.size == 0:
        return []
    if not np.all(np.isfinite(scores)):
        raise ValueError("score matrix has non-finite entries")
    allowed = scores >= gate
    if not allowed.any():
        return []
    # Padding every row and column with a zero-valued "unmatched" option turns
    # the partial matching into a full assignment; an admissible pair with
    # score s beats leaving both ends unmatched only if s > 0, and a forbidden
    # pair can never be chosen.
    n, m = scores.shape
    big = 1.0 + float(np.abs(scores[allowed]).sum()) * 2.0
    cost = np.full((n + m, m + n), 0.0)
    cost[:n, :m] = np.where(allowed, -scores, big)
    cost[:n, m:] = big
    cost[:n, m:][np.arange(n), np.arange(n)] = 0.0
    cost[n:, :m] = big
    cost[n:, :m][np.arange(m), np.arange(m)] = 0.0
    rows, cols = linear_sum_assignment(cost)
    return [(int(r), int(c)) for r, c in zip(rows, cols) if r < n and c < m and allowed[r, c]]
