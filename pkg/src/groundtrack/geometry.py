"""Projective geometry between the ground plane and the image plane.

Homographies map ground coordinates (metres) to image pixels and are kept
normalised so that the bottom-right entry is exactly one. Inside filter
states the nine entries are stored column by column, i.e. in the order
(h1, h4, h7, h2, h5, h8, h3, h6, h9); ``Homography.vec`` and
``Homography.from_vec`` convert to and from that layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateProjection, SingularHomography

EPS_DIV = 1e-12
EPS_DET = 1e-12


class GroundPoint(NamedTuple):
    x: float
    y: float


class ImagePoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, eq=False)
class Homography:
    """3x3 ground-to-image projective map with h9 pinned to 1."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise SingularHomography("homography has non-finite entries")
        if abs(m[2, 2]) < EPS_DIV:
            raise SingularHomography(f"h9 = {m[2, 2]!r} cannot be normalised")
        m = m / m[2, 2]
        m[2, 2] = 1.0
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> Homography:
        return cls(np.eye(3))

    @classmethod
    def from_entries(cls, h) -> Homography:
        """Build from nine row-major entries h1..h9."""
        h = np.asarray(h, dtype=float)
        if h.size != 9:
            raise SingularHomography(f"expected 9 entries, got {h.size}")
        return cls(h.reshape(3, 3))

    @classmethod
    def from_vec(cls, v) -> Homography:
        """Build from the column-major state layout."""
        return cls(np.asarray(v, dtype=float).reshape(3, 3, order="F"))

    @property
    def entries(self) -> np.ndarray:
        """Row-major h1..h9."""
        return self.m.ravel().copy()

    @property
    def vec(self) -> np.ndarray:
        """Column-major (h1, h4, h7, h2, h5, h8, h3, h6, h9)."""
        return self.m.ravel(order="F").copy()

    def __eq__(self, other):
        if not isinstance(other, Homography):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __repr__(self):
        return f"Homography({self.m.tolist()!r})"


@dataclass(frozen=True, eq=False)
class AffineMotion:
    """Per-frame camera motion in the image plane: x' = r @ x + t."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(2, 2)
        t = np.array(self.t, dtype=float).reshape(2)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(t))):
            raise ValueError("affine motion has non-finite entries")
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> AffineMotion:
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def translation(cls, tx: float, ty: float) -> AffineMotion:
        return cls(np.eye(2), np.array([tx, ty]))

    @classmethod
    def from_rows(cls, a) -> AffineMotion:
        """From (a11, a12, a13, a21, a22, a23)."""
        a = np.asarray(a, dtype=float).reshape(2, 3)
        return cls(a[:, :2], a[:, 2])

    @property
    def matrix(self) -> np.ndarray:
        a = np.eye(3)
        a[:2, :2] = self.r
        a[:2, 2] = self.t
        return a

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.r, np.eye(2)) and not np.any(self.t))

    def __eq__(self, other):
        if not isinstance(other, AffineMotion):
            return NotImplemented
        return bool(np.array_equal(self.r, other.r) and np.array_equal(self.t, other.t))

    def __repr__(self):
        return f"AffineMotion(r={self.r.tolist()!r}, t={self.t.tolist()!r})"


def _homogeneous(h: Homography, p) -> np.ndarray:
    b = h.m @ np.array([p[0], p[1], 1.0])
    if abs(b[2]) <= EPS_DIV:
        raise DegenerateProjection(f"point {tuple(p)!r} maps to the line at infinity")
    return b


def project(h: Homography, p) -> ImagePoint:
    b = _homogeneous(h, p)
    return ImagePoint(b[0] / b[2], b[1] / b[2])


def unproject(h: Homography, q) -> GroundPoint:
    if abs(np.linalg.det(h.m)) <= EPS_DET:
        raise SingularHomography("homography is not invertible")
    b = np.linalg.solve(h.m, np.array([q[0], q[1], 1.0]))
    if abs(b[2]) <= EPS_DIV:
        raise DegenerateProjection(f"image point {tuple(q)!r} maps to the line at infinity")
    return GroundPoint(b[0] / b[2], b[1] / b[2])


def jacobian_ground(h: Homography, p) -> np.ndarray:
    """d(image point) / d(ground x, ground y), 2x2."""
    b = _homogeneous(h, p)
    g = 1.0 / b[2]
    xi, yi = b[0] * g, b[1] * g
    m = h.m
    return g * np.array(
        [
            [m[0, 0] - m[2, 0] * xi, m[0, 1] - m[2, 1] * xi],
            [m[1, 0] - m[2, 0] * yi, m[1, 1] - m[2, 1] * yi],
        ]
    )


def jacobian_homography(h: Homography, p) -> np.ndarray:
    """d(image point) / d(homography entries), 2x9 in column-major order.

    The h9 column is zero because h9 is held fixed by normalisation.
    """
    b = _homogeneous(h, p)
    g = 1.0 / b[2]
    xi, yi = b[0] * g, b[1] * g
    xw, yw = float(p[0]), float(p[1])
    return g * np.array(
        [
            [xw, 0.0, -xi * xw, yw, 0.0, -xi * yw, 1.0, 0.0, 0.0],
            [0.0, xw, -yi * xw, 0.0, yw, -yi * yw, 0.0, 1.0, 0.0],
        ]
    )


def apply_affine(a: AffineMotion, h: Homography) -> Homography:
    m = a.matrix @ h.m
    if abs(m[2, 2]) < EPS_DIV:
        raise SingularHomography("affine product has vanishing h9")
    return Homography(m)


def affine_state_map(a: AffineMotion) -> np.ndarray:
    """Linear map on the column-major homography vector equivalent to ``a.matrix @ H``."""
    return np.kron(np.eye(3), a.matrix)


def apply_affine_wh(a: AffineMotion, w: float, h: float) -> tuple[float, float]:
    wh = a.r @ np.array([w, h])
    return float(wh[0]), float(wh[1])


def bottom_centre(box) -> ImagePoint:
    """Bottom-centre of a box exposing ``l, t, r, b`` attributes."""
    return ImagePoint(0.5 * (box.l + box.r), box.b)
