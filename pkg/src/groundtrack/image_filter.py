"""Image-plane box model: buffered velocity prediction, coasting boxes, BIoU."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBuffer, InvalidBox


@dataclass(frozen=True)
class BBox:
    l: float
    t: float
    r: float
    b: float

    def __post_init__(self):
        if self.r < self.l or self.b < self.t:
            raise InvalidBox(f"inverted box {self!r}")

    @classmethod
    def from_ltwh(cls, l, t, w, h) -> BBox:
        return cls(float(l), float(t), float(l + w), float(t + h))

    @classmethod
    def from_array(cls, a) -> BBox:
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def w(self) -> float:
        return self.r - self.l

    @property
    def h(self) -> float:
        return self.b - self.t

    @property
    def ltwh(self) -> tuple[float, float, float, float]:
        return self.l, self.t, self.w, self.h

    def as_array(self) -> np.ndarray:
        return np.array([self.l, self.t, self.r, self.b])


class BoxBuffer:
    """Most recent ``n`` associated boxes of one track."""

    def __init__(self, n: int = 5):
        if n < 1:
            raise ValueError("buffer capacity must be at least 1")
        self.n = n
        self.boxes: deque[BBox] = deque(maxlen=n)

    def __len__(self):
        return len(self.boxes)

    @property
    def last(self) -> BBox:
        if not self.boxes:
            raise EmptyBuffer("box buffer is empty")
        return self.boxes[-1]

    @property
    def last_wh(self) -> tuple[float, float]:
        box = self.last
        return box.w, box.h


def push_box(buf: BoxBuffer, box: BBox) -> None:
    buf.boxes.append(box)


def clear_and_seed(buf: BoxBuffer, box: BBox) -> None:
    buf.boxes.clear()
    buf.boxes.append(box)


def predict_box(buf: BoxBuffer) -> BBox:
    """Last box plus the mean frame-to-frame displacement over the buffer."""
    if not buf.boxes:
        raise EmptyBuffer("cannot predict from an empty buffer")
    if len(buf.boxes) < 2:
        return buf.boxes[-1]
    arr = np.array([b.as_array() for b in buf.boxes])
    # mean of consecutive diffs telescopes to (last - first) / (k - 1)
    vel = (arr[-1] - arr[0]) / (len(arr) - 1)
    pred = arr[-1] + vel
    # keep the box well-formed if the size is shrinking fast
    if pred[2] < pred[0]:
        pred[0] = pred[2] = 0.5 * (pred[0] + pred[2])
    if pred[3] < pred[1]:
        pred[1] = pred[3] = 0.5 * (pred[1] + pred[3])
    return BBox.from_array(pred)


def coast_box(ground_proj, wh) -> BBox:
    """Box of size ``wh`` whose bottom-centre sits on ``ground_proj``."""
    w, h = max(float(wh[0]), 0.0), max(float(wh[1]), 0.0)
    x, y = float(ground_proj[0]), float(ground_proj[1])
    return BBox(x - 0.5 * w, y - h, x + 0.5 * w, y)


def biou(a: BBox, c: BBox, buf_scale: float = 0.0) -> float:
    """IoU after growing both boxes about their centres by a factor of 2b+1."""
    if buf_scale < 0:
        raise ValueError("buffer scale must be non-negative")
    k = 0.5 * (2.0 * buf_scale + 1.0)
    ax, ay, aw, ah = 0.5 * (a.l + a.r), 0.5 * (a.t + a.b), k * a.w, k * a.h
    cx, cy, cw, ch = 0.5 * (c.l + c.r), 0.5 * (c.t + c.b), k * c.w, k * c.h
    iw = min(ax + aw, cx + cw) - max(ax - aw, cx - cw)
    ih = min(ay + ah, cy + ch) - max(ay - ah, cy - ch)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = 4 * aw * ah + 4 * cw * ch - inter
    if union <= 0:
        return 0.0
    return float(min(1.0, max(0.0, inter / union)))


def biou_matrix(boxes_a, boxes_c, buf_scale: float = 0.0) -> np.ndarray:
    """Pairwise BIoU between two box lists, vectorised."""
    if len(boxes_a) == 0 or len(boxes_c) == 0:
        return np.zeros((len(boxes_a), len(boxes_c)))
    k = 2.0 * buf_scale + 1.0
    a = np.array([b.as_array() for b in boxes_a])
    c = np.array([b.as_array() for b in boxes_c])

    def grow(x):
        ctr = 0.5 * (x[:, :2] + x[:, 2:])
        half = 0.5 * k * (x[:, 2:] - x[:, :2])
        return np.hstack([ctr - half, ctr + half])

    a, c = grow(a), grow(c)
    iw = np.minimum(a[:, None, 2], c[None, :, 2]) - np.maximum(a[:, None, 0], c[None, :, 0])
    ih = np.minimum(a[:, None, 3], c[None, :, 3]) - np.maximum(a[:, None, 1], c[None, :, 1])
    inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_c = (c[:, 2] - c[:, 0]) * (c[:, 3] - c[:, 1])
    union = area_a[:, None] + area_c[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0)
    return np.clip(out, 0.0, 1.0)
