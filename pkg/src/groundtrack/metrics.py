"""CLEAR-MOT accuracy and identity F1 for box tracks.

Both ground truth and results are ``{frame: [(id, BBox), ...]}`` maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .image_filter import biou_matrix


@dataclass
class MotSummary:
    num_gt: int
    num_hyp: int
    matches: int
    fn: int
    fp: int
    idsw: int
    idtp: int
    mota: float
    idf1: float


def _iou(gt_boxes, hyp_boxes) -> np.ndarray:
    return biou_matrix(gt_boxes, hyp_boxes, 0.0)


def clear_mot(gt, res, iou_gate: float = 0.5) -> tuple[int, int, int, int, int]:
    """Frame-wise matching; returns (num_gt, matches, fn, fp, idsw).

    A ground-truth object keeps its previous hypothesis whenever that
    hypothesis is still present and overlaps enough; the rest is matched by
    maximum-IoU assignment. An identity switch is counted when an object is
    matched to a different hypothesis than at its previous match.
    """
    last: dict[int, int] = {}
    num_gt = matches = fn = fp = idsw = 0
    for f in sorted(set(gt) | set(res)):
        g = gt.get(f, [])
        h = res.get(f, [])
        num_gt += len(g)
        if not g or not h:
            fn += len(g)
            fp += len(h)
            continue
        iou = _iou([b for _, b in g], [b for _, b in h])
        ok = iou >= iou_gate
        hyp_index = {hid: j for j, (hid, _) in enumerate(h)}
        pairs = []
        used_g, used_h = set(), set()
        for i, (gid, _) in enumerate(g):
            j = hyp_index.get(last.get(gid))
            if j is not None and ok[i, j] and j not in used_h:
                pairs.append((i, j))
                used_g.add(i)
                used_h.add(j)
        rest_g = [i for i in range(len(g)) if i not in used_g]
        rest_h = [j for j in range(len(h)) if j not in used_h]
        if rest_g and rest_h:
            sub = np.where(ok[np.ix_(rest_g, rest_h)], iou[np.ix_(rest_g, rest_h)], 0.0)
            rows, cols = linear_sum_assignment(-sub)
            for r, c in zip(rows, cols):
                if sub[r, c] > 0 and ok[rest_g[r], rest_h[c]]:
                    pairs.append((rest_g[r], rest_h[c]))
        for i, j in pairs:
            gid, hid = g[i][0], h[j][0]
            if gid in last and last[gid] != hid:
                idsw += 1
            last[gid] = hid
        matches += len(pairs)
        fn += len(g) - len(pairs)
        fp += len(h) - len(pairs)
    return num_gt, matches, fn, fp, idsw


def id_true_positives(gt, res, iou_gate: float = 0.5) -> int:
    """IDTP under the best global one-to-one gt-id / hypothesis-id correspondence."""
    gids = sorted({gid for es in gt.values() for gid, _ in es})
    hids = sorted({hid for es in res.values() for hid, _ in es})
    if not gids or not hids:
        return 0
    gi = {g: k for k, g in enumerate(gids)}
    hi = {h: k for k, h in enumerate(hids)}
    overlap = np.zeros((len(gids), len(hids)))
    for f, g in gt.items():
        h = res.get(f, [])
        if not g or not h:
            continue
        ok = _iou([b for _, b in g], [b for _, b in h]) >= iou_gate
        for i, j in zip(*np.nonzero(ok)):
            overlap[gi[g[i][0]], hi[h[j][0]]] += 1
    rows, cols = linear_sum_assignment(-overlap)
    return int(overlap[rows, cols].sum())


def evaluate(gt, res, iou_gate: float = 0.5) -> MotSummary:
    num_gt, matches, fn, fp, idsw = clear_mot(gt, res, iou_gate)
    num_hyp = sum(len(v) for v in res.values())
    idtp = id_true_positives(gt, res, iou_gate)
    mota = 1.0 - (fn + fp + idsw) / num_gt if num_gt else float("nan")
    denom = num_gt + num_hyp
    idf1 = 2.0 * idtp / denom if denom else 1.0
    return MotSummary(num_gt, num_hyp, matches, fn, fp, idsw, idtp, mota, idf1)


def mota(gt, res, iou_gate: float = 0.5) -> float:
    """1 - (FN + FP + IDSW) / GT; NaN when there is no ground truth."""
    num_gt, _, fn, fp, idsw = clear_mot(gt, res, iou_gate)
    return 1.0 - (fn + fp + idsw) / num_gt if num_gt else float("nan")


def idf1(gt, res, iou_gate: float = 0.5) -> float:
    num_gt = sum(len(v) for v in gt.values())
    num_hyp = sum(len(v) for v in res.values())
    if num_gt + num_hyp == 0:
        return 1.0
    return 2.0 * id_true_positives(gt, res, iou_gate) / (num_gt + num_hyp)


def results_to_boxes(frame_results) -> dict:
    """Tracker ``FrameResult`` list to the ``{frame: [(id, BBox)]}`` layout."""
    out = {}
    for fr in frame_results:
        out[fr.frame] = [(o.track_id, o.box) for o in fr.outputs]
    return out
