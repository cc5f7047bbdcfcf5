"""Multi-object tracking with joint ground-plane and homography estimation."""

from .config import TrackerConfig
from .geometry import AffineMotion, GroundPoint, Homography, ImagePoint
from .image_filter import BBox
from .tracker import Detection, FrameResult, Tracker, run_sequence

__all__ = [
    "AffineMotion",
    "BBox",
    "Detection",
    "FrameResult",
    "GroundPoint",
    "Homography",
    "ImagePoint",
    "Tracker",
    "TrackerConfig",
    "run_sequence",
]
