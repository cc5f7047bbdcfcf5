"""Per-frame tracking pipeline: prediction, three association stages, lifecycle."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import imm
from .association import (
    AssocModelProbs,
    innovation_stats,
    p_of_d,
    predict_assoc_probs,
    solve_assignment,
    stage1_score,
    stage2_score,
    update_assoc_probs,
)
from .config import TrackerConfig
from .errors import InvalidThresholds, NonMonotonicFrame, ZeroLikelihoods
from .geometry import AffineMotion, Homography, apply_affine, apply_affine_wh, bottom_centre
from .image_filter import BBox, BoxBuffer, biou_matrix, clear_and_seed, coast_box, predict_box, push_box
from .noise import ground_process_q


@dataclass(frozen=True)
class Detection:
    frame: int
    box: BBox
    conf: float = 1.0


class Lifecycle(enum.Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    COASTED = "coasted"


@dataclass
class Track:
    id: int
    lifecycle: Lifecycle
    imm: imm.ImmState
    box_buf: BoxBuffer
    coast_wh: tuple[float, float]
    conf: float
    assoc_mu: AssocModelProbs = field(default_factory=AssocModelProbs)
    frames_since_update: int = 0
    consecutive_hits: int = 1
    # per-frame scratch, filled by the prediction pass
    pred: imm.Prediction | None = None
    pred_box: BBox | None = None
    assoc_mu_pred: AssocModelProbs | None = None
    zhat: np.ndarray | None = None
    s_inv: np.ndarray | None = None
    logdet: float = 0.0

    @property
    def camera_mu(self) -> np.ndarray:
        return self.imm.mu

    @property
    def ground_state(self) -> imm.GroundState:
        return self.imm.combined()

    @property
    def r_estimates(self) -> list[np.ndarray]:
        return [mf.r_prev() for mf in self.imm.models]


@dataclass
class OutputRow:
    frame: int
    track_id: int
    box: BBox
    conf: float


@dataclass
class FrameResult:
    frame: int
    outputs: list[OutputRow]
    diagnostics: dict = field(default_factory=dict)


def split_detections(dets, d_high: float, d_low: float):
    """Partition by confidence into (high, low); anything below ``d_low`` is dropped."""
    if not 0.0 <= d_low <= d_high <= 1.0:
        raise InvalidThresholds(f"need 0 <= d_low <= d_high <= 1, got {d_low}, {d_high}")
    high = [d for d in dets if d.conf >= d_high]
    low = [d for d in dets if d_low <= d.conf < d_high]
    return high, low


class Tracker:
    """Online tracker for one sequence.

    ``h0`` is the ground-to-image homography of the first processed frame;
    it is carried forward with the per-frame affines so that tracks born
    later start from the current camera pose.
    """

    def __init__(self, h0: Homography, cfg: TrackerConfig | None = None, keep_scores: bool = False):
        self.cfg = cfg or TrackerConfig()
        self.h_ref = h0
        self.tracks: list[Track] = []
        self.keep_scores = keep_scores
        self._next_id = 1
        self._last_frame: int | None = None

    # -- prediction ---------------------------------------------------------

    def _predict(self, tr: Track, affine: AffineMotion, dt: float) -> None:
        cfg = self.cfg
        q_ground = ground_process_q(cfg.sigma_x, cfg.sigma_y, dt)
        tr.pred = imm.predict(tr.imm, affine, q_ground, dt)
        tr.assoc_mu_pred = predict_assoc_probs(tr.assoc_mu, cfg.p_ii, cfg.p_ww)
        st = tr.pred.state
        zhat, j = imm.measure(st.v)
        if tr.lifecycle is Lifecycle.COASTED:
            tr.coast_wh = apply_affine_wh(affine, *tr.coast_wh)
            if cfg.coast_coupling:
                tr.pred_box = coast_box(zhat, tr.coast_wh)
            else:
                tr.pred_box = tr.box_buf.last
        else:
            tr.pred_box = predict_box(tr.box_buf)
        r_prev = sum(
            w * mf.r_prev(cfg.adaptive_r) for w, mf in zip(tr.pred.mu_pred, tr.imm.models)
        )
        tr.zhat = zhat
        tr.s_inv, tr.logdet = innovation_stats(j @ st.p @ j.T + r_prev)

    # -- scoring ------------------------------------------------------------

    def _pd_matrix(self, tracks, dets) -> np.ndarray:
        if not tracks or not dets:
            return np.zeros((len(tracks), len(dets)))
        z = np.array([bottom_centre(d.box) for d in dets])
        out = np.empty((len(tracks), len(dets)))
        for i, tr in enumerate(tracks):
            d = z - tr.zhat
            dist = np.einsum("ki,ij,kj->k", d, tr.s_inv, d) + tr.logdet
            out[i] = p_of_d(dist, self.cfg.chi2_dof)
        return out

    def _scores(self, tracks, dets, kind: str):
        pd = self._pd_matrix(tracks, dets)
        bi = biou_matrix([t.pred_box for t in tracks], [d.box for d in dets], self.cfg.b)
        conf = np.array([d.conf for d in dets])[None, :] if dets else np.zeros((1, 0))
        if kind == "stage1":
            sc = stage1_score(pd, bi, conf)
        elif kind == "ground":
            sc = pd * conf
        else:
            mu_i = np.array([t.assoc_mu_pred.mu_i for t in tracks])[:, None]
            mu_w = np.array([t.assoc_mu_pred.mu_w for t in tracks])[:, None]
            sc = (mu_i * bi + mu_w * pd) * conf
        return np.clip(sc, 0.0, 1.0), pd, bi

    def _associate(self, tracks, dets, kind, gate, stage, diag):
        if not tracks or not dets:
            return [], list(range(len(tracks))), list(range(len(dets))), None, None
        sc, pd, bi = self._scores(tracks, dets, kind)
        matches = solve_assignment(sc, gate)
        if self.keep_scores:
            diag.setdefault("scores", {})[stage] = {
                "tracks": [t.id for t in tracks],
                "scores": sc,
            }
        mt = {r for r, _ in matches}
        md = {c for _, c in matches}
        um_t = [i for i in range(len(tracks)) if i not in mt]
        um_d = [j for j in range(len(dets)) if j not in md]
        return matches, um_t, um_d, pd, bi

    # -- updates ------------------------------------------------------------

    def _update(self, tr: Track, det: Detection, biou_val: float, pd_val: float) -> None:
        cfg = self.cfg
        tr.imm, _, _ = imm.update(
            tr.imm,
            bottom_centre(det.box),
            tr.pred,
            adaptive_r=cfg.adaptive_r,
            likelihood=cfg.camera_likelihood,
            dof=cfg.chi2_dof,
        )
        try:
            tr.assoc_mu = update_assoc_probs(tr.assoc_mu_pred, biou_val, pd_val)
        except ZeroLikelihoods:
            tr.assoc_mu = tr.assoc_mu_pred
        if tr.lifecycle is Lifecycle.COASTED:
            clear_and_seed(tr.box_buf, det.box)
        else:
            push_box(tr.box_buf, det.box)
        tr.coast_wh = (det.box.w, det.box.h)
        tr.conf = det.conf
        tr.frames_since_update = 0

    def _miss(self, tr: Track) -> None:
        tr.imm = imm.coast(tr.imm, tr.pred)
        tr.assoc_mu = tr.assoc_mu_pred
        tr.frames_since_update += 1

    def _birth(self, det: Detection) -> Track:
        cfg = self.cfg
        state = imm.init_track_filter(det.box, self.h_ref, cfg)
        buf = BoxBuffer(cfg.n)
        push_box(buf, det.box)
        tr = Track(
            id=self._next_id,
            lifecycle=Lifecycle.TENTATIVE,
            imm=state,
            box_buf=buf,
            coast_wh=(det.box.w, det.box.h),
            conf=det.conf,
        )
        self._next_id += 1
        return tr

    # -- main loop ----------------------------------------------------------

    def step(self, frame: int, detections, affine: AffineMotion | None = None) -> FrameResult:
        cfg = self.cfg
        if self._last_frame is not None and frame <= self._last_frame:
            raise NonMonotonicFrame(f"frame {frame} does not follow {self._last_frame}")
        affine = affine if affine is not None else AffineMotion.identity()
        gap = 1 if self._last_frame is None else frame - self._last_frame
        dt = gap * cfg.dt
        if self._last_frame is not None:
            self.h_ref = apply_affine(affine, self.h_ref)
        self._last_frame = frame
        diag: dict = {}

        for tr in self.tracks:
            self._predict(tr, affine, dt)

        high, low = split_detections(detections, cfg.d_high, cfg.d_low)
        outputs: list[OutputRow] = []

        # stage 1: confirmed and coasted tracks against high-confidence detections
        active = [t for t in self.tracks if t.lifecycle is not Lifecycle.TENTATIVE]
        m1, um_t, um_d, pd1, bi1 = self._associate(active, high, "stage1", cfg.alpha1, 1, diag)
        updates = [(active[r], high[c], bi1[r, c], pd1[r, c]) for r, c in m1]

        # stage 2: leftover tracks against low-confidence plus leftover high
        rest_tracks = [active[i] for i in um_t]
        pool = [high[j] for j in um_d] + low
        kind2 = "ground" if cfg.stage2_score == "ground" else "stage2"
        m2, um_t2, um_d2, pd2, bi2 = self._associate(rest_tracks, pool, kind2, cfg.alpha2, 2, diag)
        updates += [(rest_tracks[r], pool[c], bi2[r, c], pd2[r, c]) for r, c in m2]

        for tr, det, bv, pv in updates:
            self._update(tr, det, float(bv), float(pv))
            tr.lifecycle = Lifecycle.CONFIRMED
            outputs.append(OutputRow(frame, tr.id, det.box, det.conf))

        dead = set()
        for i in um_t2:
            tr = rest_tracks[i]
            self._miss(tr)
            tr.lifecycle = Lifecycle.COASTED
            if tr.frames_since_update > cfg.omega:
                dead.add(tr.id)

        # stage 3: tentative tracks against the high-confidence leftovers
        n_high_left = len(um_d)
        left_high = [pool[j] for j in um_d2 if j < n_high_left]
        tentative = [t for t in self.tracks if t.lifecycle is Lifecycle.TENTATIVE]
        m3, um_t3, um_d3, pd3, bi3 = self._associate(tentative, left_high, "stage2", cfg.alpha3, 3, diag)
        for r, c in m3:
            tr, det = tentative[r], left_high[c]
            self._update(tr, det, float(bi3[r, c]), float(pd3[r, c]))
            tr.consecutive_hits += 1
            if tr.consecutive_hits >= 2:
                tr.lifecycle = Lifecycle.CONFIRMED
                outputs.append(OutputRow(frame, tr.id, det.box, det.conf))
        for i in um_t3:
            dead.add(tentative[i].id)

        self.tracks = [t for t in self.tracks if t.id not in dead]
        for j in um_d3:
            self.tracks.append(self._birth(left_high[j]))

        diag["tracks"] = {
            t.id: {
                "lifecycle": t.lifecycle.value,
                "camera_mu": t.imm.mu.copy(),
                "assoc_mu": (t.assoc_mu.mu_i, t.assoc_mu.mu_w),
                "frames_since_update": t.frames_since_update,
            }
            for t in self.tracks
        }
        outputs.sort(key=lambda o: o.track_id)
        return FrameResult(frame, outputs, diag)


def run_sequence(
    detections: dict[int, list[Detection]],
    h0: Homography,
    affines: dict[int, AffineMotion] | None = None,
    cfg: TrackerConfig | None = None,
    frames=None,
    tracker: Tracker | None = None,
) -> list[FrameResult]:
    """Track a whole sequence; frames without detections are still stepped.

    ``frames`` defaults to every integer frame between the first and last
    frame that carries a detection or an affine.
    """
    affines = affines or {}
    if frames is None:
        keys = list(detections) + list(affines)
        if not keys:
            return []
        frames = range(min(keys), max(keys) + 1)
    trk = tracker or Tracker(h0, cfg)
    return [trk.step(f, detections.get(f, []), affines.get(f)) for f in frames]
