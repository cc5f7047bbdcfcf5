"""Deterministic synthetic scenes: ground-plane walkers seen by a moving camera.

Randomness is drawn from numpy ``PCG64`` generators seeded with
``SeedSequence(seed, spawn_key=(k,))``: stream ``k = i`` belongs to agent
``i`` and stream ``k = CAMERA_STREAM`` to the reported camera motion. Each
agent stream is consumed in a fixed order per frame (dropout uniform, four
box normals, one confidence normal) whether or not the agent is visible,
so a scene is a pure function of its spec.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .geometry import AffineMotion, Homography, apply_affine, jacobian_ground, project
from .image_filter import BBox, coast_box
from .tracker import Detection

CAMERA_STREAM = 1_000_003

# A camera a few metres above the ground looking forward: ground x is
# lateral, ground y is depth. The horizon sits at v = 200 px.
DEFAULT_H0 = np.array([[120.0, 64.0, 640.0], [0.0, 20.0, 720.0], [0.0, 0.1, 1.0]])


@dataclass
class AgentSpec:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    # (first frame, duration, peak upward displacement in px)
    jumps: list[tuple[int, int, float]] = field(default_factory=list)
    # (first frame, duration) during which the agent is fully hidden
    occlusions: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class SceneSpec:
    agents: list[AgentSpec]
    seed: int = 0
    n_frames: int = 300
    fps: float = 20.0
    h0: np.ndarray = field(default_factory=lambda: DEFAULT_H0.copy())
    # true camera motion applied before frame f, keyed by frame (f >= 2)
    camera: dict[int, AffineMotion] = field(default_factory=dict)
    # std (px) of the jitter added to the reported affine translations
    affine_noise: float = 0.0
    noise_px: float = 1.0
    dropout: float = 0.0
    base_conf: float = 0.9
    conf_jitter: float = 0.02
    occlusion_penalty: float = 0.5
    # physical box width and height in metres
    size: tuple[float, float] = (0.5, 1.7)
    image_size: tuple[int, int] | None = (1280, 720)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def validate(self) -> None:
        if not self.agents:
            raise InvalidSpec("scene needs at least one agent")
        if self.n_frames < 0:
            raise InvalidSpec("n_frames must be non-negative")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidSpec("dropout must lie in [0, 1)")
        if self.noise_px < 0 or self.affine_noise < 0 or self.fps <= 0:
            raise InvalidSpec("noise levels must be non-negative and fps positive")


@dataclass
class GTEntry:
    agent_id: int
    box: BBox
    ground: tuple[float, float]


@dataclass
class Scene:
    spec: SceneSpec
    gt: dict[int, list[GTEntry]]
    detections: dict[int, list[Detection]]
    h0: Homography
    affines: dict[int, AffineMotion]
    # true homography per frame
    homographies: dict[int, Homography]
    # agent id of each detection, parallel to ``detections``
    det_agents: dict[int, list[int]]

    @property
    def frames(self) -> range:
        return range(1, self.spec.n_frames + 1)

    def gt_boxes(self) -> dict[int, list[tuple[int, BBox]]]:
        return {f: [(e.agent_id, e.box) for e in es] for f, es in self.gt.items()}


def pan_camera(n_frames: int, speed: float = 2.0, period: int = 30) -> dict[int, AffineMotion]:
    """Horizontal pan of ``speed`` px per frame, reversing every ``period`` frames."""
    out = {}
    for f in range(2, n_frames + 1):
        sign = 1.0 if ((f - 2) // period) % 2 == 0 else -1.0
        out[f] = AffineMotion.translation(sign * speed, 0.0)
    return out


def _in_window(f: int, start: int, dur: int) -> bool:
    return start <= f < start + dur


def _jump_offset(agent: AgentSpec, f: int) -> float:
    for start, dur, peak in agent.jumps:
        if _in_window(f, start, dur):
            u = (f - start + 1) / (dur + 1)
            return -4.0 * peak * u * (1.0 - u)
    return 0.0


def generate(spec: SceneSpec) -> Scene:
    spec.validate()
    n = spec.n_agents
    dt = 1.0 / spec.fps
    rngs = [np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(i,))) for i in range(n)]
    cam_rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(CAMERA_STREAM,)))

    h = Homography(spec.h0)
    h0 = h
    gt, dets, det_agents, homs, affines = {}, {}, {}, {}, {}
    for f in range(1, spec.n_frames + 1):
        if f >= 2:
            a = spec.camera.get(f, AffineMotion.identity())
            h = apply_affine(a, h)
            jitter = cam_rng.normal(0.0, 1.0, size=2) * spec.affine_noise
            affines[f] = AffineMotion(a.r, a.t + jitter)
        homs[f] = h

        truth = []
        for i, ag in enumerate(spec.agents):
            t = (f - 1) * dt
            pos = (ag.x + ag.vx * t, ag.y + ag.vy * t)
            foot = project(h, pos)
            scale = float(np.linalg.norm(jacobian_ground(h, pos)[:, 0]))
            w, hh = spec.size[0] * scale, spec.size[1] * scale
            box = coast_box((foot.x, foot.y + _jump_offset(ag, f)), (w, hh))
            visible = not any(_in_window(f, s, d) for s, d in ag.occlusions)
            if spec.image_size is not None:
                iw, ih = spec.image_size
                visible = visible and 0.0 <= foot.x < iw and 0.0 <= foot.y < ih
            truth.append((i, box, pos, visible))

        frame_gt, frame_dets, frame_ids = [], [], []
        for i, box, pos, visible in truth:
            rng = rngs[i]
            u_drop = rng.random()
            eps = rng.normal(0.0, 1.0, size=4) * spec.noise_px
            c_eps = rng.normal(0.0, 1.0) * spec.conf_jitter
            if not visible:
                continue
            frame_gt.append(GTEntry(i + 1, box, pos))
            # occluders are visible agents standing closer to the camera
            cover = 0.0
            for j, other, _, vis_j in truth:
                if j != i and vis_j and other.b > box.b:
                    cover = max(cover, _covered_fraction(box, other))
            conf = float(np.clip(spec.base_conf - spec.occlusion_penalty * cover + c_eps, 0.01, 1.0))
            if u_drop < spec.dropout:
                continue
            cx = 0.5 * (box.l + box.r) + eps[0]
            by = box.b + eps[1]
            w = max(box.w + eps[2], 1.0)
            hh = max(box.h + eps[3], 1.0)
            frame_dets.append(Detection(f, coast_box((cx, by), (w, hh)), conf))
            frame_ids.append(i + 1)
        gt[f] = frame_gt
        dets[f] = frame_dets
        det_agents[f] = frame_ids
    return Scene(spec, gt, dets, h0, affines, homs, det_agents)


def _covered_fraction(box: BBox, other: BBox) -> float:
    iw = min(box.r, other.r) - max(box.l, other.l)
    ih = min(box.b, other.b) - max(box.t, other.t)
    if iw <= 0 or ih <= 0 or box.w * box.h <= 0:
        return 0.0
    return iw * ih / (box.w * box.h)


# ---------------------------------------------------------------------------
# scene factories used by the tests, the CLI and the scripts


def camera_script(kind: str, n_frames: int, speed: float = 2.0) -> dict[int, AffineMotion]:
    if kind == "static":
        return {}
    if kind == "pan":
        return pan_camera(n_frames, speed)
    raise InvalidSpec(f"unknown camera script {kind!r}")


def crossing_scene(
    seed: int = 0,
    n_agents: int = 5,
    n_frames: int = 300,
    camera: str = "pan",
    noise_px: float = 1.0,
    dropout: float = 0.1,
    fps: float = 20.0,
    **kw,
) -> SceneSpec:
    """Agents at staggered depths walking in alternating directions.

    Every pair moving in opposite directions crosses in the image around
    the middle of the sequence.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(CAMERA_STREAM + 1,)))
    duration = n_frames / fps
    agents = []
    for i in range(n_agents):
        depth = 8.0 + 2.0 * i
        speed = rng.uniform(0.3, 0.6) * (1.0 if i % 2 == 0 else -1.0)
        meet = rng.uniform(-0.5, 0.5)
        agents.append(AgentSpec(x=meet - speed * duration / 2, y=depth, vx=speed, vy=rng.uniform(-0.05, 0.05)))
    return SceneSpec(
        agents=agents,
        seed=seed,
        n_frames=n_frames,
        fps=fps,
        camera=camera_script(camera, n_frames),
        noise_px=noise_px,
        dropout=dropout,
        **kw,
    )


def walkers_scene(
    seed: int = 0,
    n_agents: int = 3,
    n_frames: int = 300,
    camera: str = "static",
    noise_px: float = 1.0,
    dropout: float = 0.0,
    fps: float = 20.0,
    **kw,
) -> SceneSpec:
    """Well separated agents wandering slowly; no crossings."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(CAMERA_STREAM + 2,)))
    agents = []
    for i in range(n_agents):
        x = -3.0 + 6.0 * (i + 0.5) / n_agents
        agents.append(
            AgentSpec(x=x, y=rng.uniform(8.0, 14.0), vx=rng.uniform(-0.1, 0.1), vy=rng.uniform(-0.2, 0.2))
        )
    return SceneSpec(
        agents=agents,
        seed=seed,
        n_frames=n_frames,
        fps=fps,
        camera=camera_script(camera, n_frames),
        noise_px=noise_px,
        dropout=dropout,
        **kw,
    )


def benchmark_scenes(n_frames: int = 200) -> list[SceneSpec]:
    """Fixed set of scenes for tuning and regression checks."""
    return [
        crossing_scene(seed=11, n_agents=4, n_frames=n_frames, camera="pan", dropout=0.1),
        crossing_scene(seed=12, n_agents=4, n_frames=n_frames, camera="static", dropout=0.05),
        walkers_scene(seed=13, n_agents=4, n_frames=n_frames, camera="pan", dropout=0.1),
    ]


