"""Plain-text carriers for detections, calibrations, camera motion and results.

Detections and results use the MOTChallenge CSV layout
``frame,id,left,top,width,height,conf,x,y,z``. The homography file holds
nine whitespace-separated reals in row-major order, and the affine file
one ``frame a11 a12 a13 a21 a22 a23`` row per frame.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateFrame, IoError, NegativeDimensions, ParseError, SingularHomography
from .geometry import EPS_DIV, AffineMotion, Homography
from .image_filter import BBox
from .tracker import Detection, FrameResult, OutputRow

DETECTIONS_FILE = "det.txt"
HOMOGRAPHY_FILE = "homography.txt"
AFFINES_FILE = "affines.txt"
GT_FILE = "gt.txt"


class AffineTable(dict):
    """``frame -> AffineMotion`` map; frames without a row read as identity."""

    def __missing__(self, frame):
        return AffineMotion.identity()


@dataclass
class SequenceBundle:
    name: str
    detections: dict[int, list[Detection]]
    h0: Homography
    affines: AffineTable = field(default_factory=AffineTable)
    frame_rate: float = 20.0

    @property
    def frames(self) -> list[int]:
        return sorted(set(self.detections) | set(self.affines))


def _lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason})", path) from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _float(tok: str, path, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", path, lineno) from None
    if not math.isfinite(val):
        raise ParseError(f"non-finite value: {tok!r}", path, lineno)
    return val


def _frame(tok: str, path, lineno: int) -> int:
    val = _float(tok, path, lineno)
    if val != int(val):
        raise ParseError(f"frame index must be an integer, got {tok!r}", path, lineno)
    return int(val)


# -- readers ----------------------------------------------------------------


def read_detections(path) -> dict[int, list[Detection]]:
    """Detections grouped by frame, frames ascending, file order kept within a frame.

    Rows need at least ``frame,id,left,top,width,height``; the id column is
    ignored and a missing confidence reads as 1.
    """
    out: dict[int, list[Detection]] = {}
    for lineno, line in _lines(path):
        tok = [t.strip() for t in line.split(",")]
        if len(tok) < 6:
            raise ParseError(f"expected at least 6 fields, got {len(tok)}", path, lineno)
        frame = _frame(tok[0], path, lineno)
        l, t, w, h = (_float(v, path, lineno) for v in tok[2:6])
        conf = _float(tok[6], path, lineno) if len(tok) > 6 and tok[6] else 1.0
        if w < 0 or h < 0:
            warnings.warn(f"{path}:{lineno}: negative box size clamped to zero", NegativeDimensions, stacklevel=2)
            w, h = max(w, 0.0), max(h, 0.0)
        out.setdefault(frame, []).append(Detection(frame, BBox.from_ltwh(l, t, w, h), conf))
    return dict(sorted(out.items()))


def read_homography(path) -> Homography:
    vals = [_float(t, path, lineno) for lineno, line in _lines(path) for t in line.replace(",", " ").split()]
    if len(vals) != 9:
        raise ParseError(f"expected 9 numbers, got {len(vals)}", path)
    if abs(vals[8]) < EPS_DIV:
        raise SingularHomography(f"{path}: h9 = {vals[8]!r} cannot be normalised")
    return Homography.from_entries(vals)


def read_affines(path) -> AffineTable:
    out = AffineTable()
    for lineno, line in _lines(path):
        tok = line.replace(",", " ").split()
        if len(tok) != 7:
            raise ParseError(f"expected 7 fields, got {len(tok)}", path, lineno)
        frame = _frame(tok[0], path, lineno)
        a = [_float(v, path, lineno) for v in tok[1:]]
        if frame in out:
            warnings.warn(f"{path}:{lineno}: frame {frame} repeated, keeping this row", DuplicateFrame, stacklevel=2)
        out[frame] = AffineMotion.from_rows(a)
    return AffineTable(sorted(out.items()))


def read_results(path) -> list[FrameResult]:
    """Result or ground-truth CSV back to per-frame rows (frames and ids ascending)."""
    frames: dict[int, list[OutputRow]] = {}
    for lineno, line in _lines(path):
        tok = [t.strip() for t in line.split(",")]
        if len(tok) < 7:
            raise ParseError(f"expected at least 7 fields, got {len(tok)}", path, lineno)
        frame = _frame(tok[0], path, lineno)
        tid = _frame(tok[1], path, lineno)
        l, t, w, h, conf = (_float(v, path, lineno) for v in tok[2:7])
        if w < 0 or h < 0:
            raise ParseError("negative box size", path, lineno)
        frames.setdefault(frame, []).append(OutputRow(frame, tid, BBox.from_ltwh(l, t, w, h), conf))
    return [FrameResult(f, sorted(rows, key=lambda r: r.track_id)) for f, rows in sorted(frames.items())]


def read_bundle(directory, name: str | None = None, frame_rate: float = 20.0) -> SequenceBundle:
    d = Path(directory)
    aff_path = d / AFFINES_FILE
    return SequenceBundle(
        name=name or d.name,
        detections=read_detections(d / DETECTIONS_FILE),
        h0=read_homography(d / HOMOGRAPHY_FILE),
        affines=read_affines(aff_path) if aff_path.exists() else AffineTable(),
        frame_rate=frame_rate,
    )


# -- writers ----------------------------------------------------------------


def _fmt(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}"
    # never emit "-0.00": the sign of a value that rounds to zero is noise
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def _row(frame: int, tid: int, box: BBox, conf: float) -> str:
    geo = ",".join(_fmt(v, 2) for v in box.ltwh)
    return f"{frame},{tid},{geo},{_fmt(conf, 4)},-1,-1,-1\n"


def write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {os.fspath(path)}: {exc.strerror}") from exc


def format_results(results) -> str:
    """Accepts ``FrameResult`` objects or bare ``OutputRow`` objects."""
    rows = []
    for item in results:
        rows.extend(item.outputs if isinstance(item, FrameResult) else [item])
    rows.sort(key=lambda r: (r.frame, r.track_id))
    return "".join(_row(r.frame, r.track_id, r.box, r.conf) for r in rows)


def write_results(results, path) -> None:
    write_text(path, format_results(results))


def write_detections(detections: dict[int, list[Detection]], path) -> None:
    lines = []
    for f in sorted(detections):
        lines.extend(_row(f, -1, d.box, d.conf) for d in detections[f])
    write_text(path, "".join(lines))


def write_ground_truth(gt: dict[int, list[tuple[int, BBox]]], path) -> None:
    lines = []
    for f in sorted(gt):
        lines.extend(_row(f, gid, box, 1.0) for gid, box in sorted(gt[f], key=lambda e: e[0]))
    write_text(path, "".join(lines))


def write_homography(h: Homography, path) -> None:
    write_text(path, "\n".join(" ".join(repr(float(v)) for v in row) for row in h.m) + "\n")


def write_affines(affines: dict[int, AffineMotion], path) -> None:
    lines = []
    for f in sorted(affines):
        m = affines[f].matrix[:2].ravel()
        lines.append(" ".join([str(f)] + [repr(float(v)) for v in m]) + "\n")
    write_text(path, "".join(lines))


def write_bundle(directory, detections, h0: Homography, affines, gt=None) -> Path:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {d}: {exc.strerror}") from exc
    write_detections(detections, d / DETECTIONS_FILE)
    write_homography(h0, d / HOMOGRAPHY_FILE)
    write_affines(affines, d / AFFINES_FILE)
    if gt is not None:
        write_ground_truth(gt, d / GT_FILE)
    return d


def boxes_by_frame(results: list[FrameResult]) -> dict[int, list[tuple[int, BBox]]]:
    return {fr.frame: [(o.track_id, o.box) for o in fr.outputs] for fr in results}

