"""Comparison-session state: timeline, scene, lens config, cached analysis.

A session owns one loaded AnimationSet plus everything the user can
change around it. Analysis results are memoized against content
fingerprints of exactly the state they depend on, so repeated reads
never re-run a kernel whose inputs did not change.
"""

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from .camera import CameraSpec, joint_curves
from .config import (
    DEFAULT_FPS,
    DEFAULT_K_MAX,
    DEFAULT_K_MIN,
    DEFAULT_KEYPOSE_K,
    DEFAULT_MEDIAN_WINDOW,
    DEFAULT_TRACE_N,
)
from .core import forward_kinematics
from .errors import NotFound, ParseError, ValidationError
from .io import AnimationSet, emit_clip_json, load_animation_set
from .scene import SceneObject
from .spatial import extract_keyposes, joint_path, path_collisions
from .temporal import cluster_poses

CAMERA_LENSES = ("overlay", "grid", "diff")
SPATIAL_LENSES = ("model", "skeleton", "keyposes", "trace", "path")
TEMPORAL_LENSES = ("pose", "joint")
PLAYBACK_MODES = ("concurrent", "sequential")

KERNELS = ("clustering", "keyposes", "joint_curves", "paths", "collisions")

DEFAULT_CAMERA = CameraSpec(position=(0.0, 1.0, 5.0), orientation=(1.0, 0.0, 0.0, 0.0))


@dataclass(frozen=True)
class ClipRow:
    """Timeline row: where a clip sits and whether it plays."""

    offset: int = 0
    selected: bool = True


@dataclass(frozen=True, eq=False)
class TimelineState:
    """Playback position and per-clip arrangement.

    rows follows the animation set's clip order. current_frame is the
    global timeline frame; frame_remainder carries the fractional part
    between ticks so slow playback still advances.
    """

    rows: tuple
    playback_mode: str = "concurrent"
    speed: float = 1.0
    current_frame: int = 0
    fps: float = DEFAULT_FPS
    playing: bool = False
    loop: bool = True
    frame_remainder: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.playback_mode not in PLAYBACK_MODES:
            raise ValidationError(f"playback_mode must be one of {PLAYBACK_MODES}")
        if self.speed <= 0:
            raise ValidationError(f"speed must be positive, got {self.speed}")
        if self.fps <= 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")
        if self.current_frame < 0:
            raise ValidationError(f"current_frame must be >= 0, got {self.current_frame}")


@dataclass(frozen=True, eq=False)
class LensConfig:
    """Which lenses are active and their parameters.

    joint_filter is the set of visible joint indices; spatial holds the
    enabled in-scene lenses. temporal_joint picks the joint tracked by
    the screen-space curve view.
    """

    camera_lens: str = "overlay"
    spatial: tuple = ("model",)
    joint_filter: tuple = ()
    temporal_lens: str = "pose"
    temporal_joint: int = 0
    trace_n: int = DEFAULT_TRACE_N
    keypose_k: int = DEFAULT_KEYPOSE_K
    median_window: int = DEFAULT_MEDIAN_WINDOW
    seed: int = 0
    k_min: int = DEFAULT_K_MIN
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self):
        object.__setattr__(self, "spatial", tuple(self.spatial))
        object.__setattr__(self, "joint_filter", tuple(int(i) for i in self.joint_filter))
        if self.camera_lens not in CAMERA_LENSES:
            raise ValidationError(f"camera_lens must be one of {CAMERA_LENSES}")
        if self.temporal_lens not in TEMPORAL_LENSES:
            raise ValidationError(f"temporal_lens must be one of {TEMPORAL_LENSES}")
        for name in self.spatial:
            if name not in SPATIAL_LENSES:
                raise ValidationError(f"unknown spatial lens {name!r}")
        if self.trace_n < 0:
            raise ValidationError("trace_n must be >= 0")
        if self.keypose_k < 2:
            raise ValidationError("keypose_k must be >= 2")
        if self.median_window < 1 or self.median_window % 2 == 0:
            raise ValidationError("median_window must be odd and >= 1")
        if not 1 <= self.k_min <= self.k_max:
            raise ValidationError("need 1 <= k_min <= k_max")


@dataclass(frozen=True, eq=False)
class ComparisonBundle:
    """Everything the lenses need, computed for one session snapshot."""

    clustering: object
    keyposes: tuple
    curves: object
    paths: tuple
    collisions: tuple


def active_frames(timeline, animation_set):
    """Local frame per clip at the timeline's current frame (None when
    the clip is not playing there).

    Concurrent mode: a clip is active when selected and the global
    frame minus its offset lands inside it. Sequential mode: selected
    clips play one after another in row order (offsets ignored).
    """
    if len(timeline.rows) != animation_set.num_clips:
        raise ValidationError(
            f"timeline has {len(timeline.rows)} rows for {animation_set.num_clips} clips"
        )
    current = timeline.current_frame
    result = []
    if timeline.playback_mode == "concurrent":
        for clip, row in zip(animation_set.clips, timeline.rows):
            local = current - row.offset
            if row.selected and 0 <= local < clip.num_frames:
                result.append(local)
            else:
                result.append(None)
    else:
        start = 0
        taken = False
        for clip, row in zip(animation_set.clips, timeline.rows):
            if not row.selected:
                result.append(None)
                continue
            local = current - start
            if not taken and 0 <= local < clip.num_frames:
                result.append(local)
                taken = True
            else:
                result.append(None)
            start += clip.num_frames
    return result


def timeline_extent(timeline, animation_set):
    """Number of global frames the selected clips span."""
    extent = 0
    if timeline.playback_mode == "concurrent":
        for clip, row in zip(animation_set.clips, timeline.rows):
            if row.selected:
                extent = max(extent, row.offset + clip.num_frames)
    else:
        for clip, row in zip(animation_set.clips, timeline.rows):
            if row.selected:
                extent += clip.num_frames
    return extent


def tick(timeline, animation_set, wall_dt):
    """Advance playback by wall_dt seconds.

    The frame step is wall_dt * fps * speed plus the remainder carried
    from earlier ticks; whole frames move current_frame, the fraction
    is carried forward. Past the end of the selected extent the frame
    wraps to the start (loop) or clamps and stops (play once).
    """
    if wall_dt < 0:
        raise ValidationError(f"wall_dt must be >= 0, got {wall_dt}")
    if not timeline.playing:
        return timeline
    advance = timeline.frame_remainder + wall_dt * timeline.fps * timeline.speed
    # tiny epsilon so ten 0.1-frame ticks add up to a full frame despite
    # float accumulation error
    whole = int(np.floor(advance + 1e-9))
    remainder = max(0.0, advance - whole)
    current = timeline.current_frame + whole
    playing = timeline.playing
    extent = timeline_extent(timeline, animation_set)
    if extent <= 0:
        current = 0
    elif current >= extent:
        if timeline.loop:
            current %= extent
        else:
            current = extent - 1
            playing = False
            remainder = 0.0
    return replace(
        timeline, current_frame=current, frame_remainder=remainder, playing=playing
    )


def _fingerprint(*parts):
    digest = hashlib.sha1()
    for part in _flatten(parts):
        digest.update(part)
    return digest.hexdigest()


def _flatten(part):
    if isinstance(part, (tuple, list)):
        for item in part:
            yield from _flatten(item)
    elif isinstance(part, np.ndarray):
        yield repr(part.shape).encode()
        yield part.tobytes()
    else:
        yield repr(part).encode()
    yield b"|"


def _set_fingerprint(animation_set):
    skeleton = animation_set.skeleton
    return _fingerprint(
        skeleton.names,
        skeleton.parents,
        skeleton.offsets,
        skeleton.up_axis,
        sorted(skeleton.chains.items()),
        [
            (clip.name, clip.fps, clip.root_translations, clip.rotations)
            for clip in animation_set.clips
        ],
    )


def _camera_fingerprint(camera):
    return _fingerprint(
        camera.position, camera.orientation, camera.vertical_fov, camera.aspect, camera.near
    )


def _scene_fingerprint(scene_objects):
    return _fingerprint(
        [
            (obj.object_id, obj.kind, obj.position, obj.rotation, obj.scale)
            for obj in scene_objects
        ]
    )


class Session:
    """One comparison workspace: a loaded set plus mutable view state.

    Lens results are served by recompute(), which only re-runs a kernel
    when its fingerprinted inputs changed; recompute_counts records how
    many times each kernel actually ran.
    """

    def __init__(self, animation_set, seed=0, fps=DEFAULT_FPS, lens=None):
        self.animation_set = animation_set
        self.camera = DEFAULT_CAMERA
        self.scene = {}
        self.timeline = TimelineState(
            rows=tuple(ClipRow() for _ in animation_set.clips), fps=fps
        )
        if lens is None:
            lens = LensConfig(
                seed=seed,
                joint_filter=tuple(range(animation_set.skeleton.num_joints)),
            )
        self.lens = lens
        self.diff_reverted = False
        self.recompute_counts = dict.fromkeys(KERNELS, 0)
        self._memo = {}

    # -- view state ---------------------------------------------------------

    def selected_count(self):
        return sum(1 for row in self.timeline.rows if row.selected)

    def set_timeline(self, timeline):
        if len(timeline.rows) != self.animation_set.num_clips:
            raise ValidationError(
                f"timeline has {len(timeline.rows)} rows for "
                f"{self.animation_set.num_clips} clips"
            )
        self.timeline = timeline
        if self.lens.camera_lens == "diff" and self.selected_count() != 2:
            self.lens = replace(self.lens, camera_lens="overlay")
            self.diff_reverted = True

    def set_lens(self, lens):
        if lens.camera_lens == "diff" and self.selected_count() != 2:
            raise ValidationError(
                f"diff compares exactly 2 clips; {self.selected_count()} selected"
            )
        self.lens = lens
        self.diff_reverted = False

    def set_camera(self, camera):
        self.camera = camera

    def tick(self, wall_dt):
        self.timeline = tick(self.timeline, self.animation_set, wall_dt)
        return self.timeline

    # -- scene --------------------------------------------------------------

    def add_object(self, obj):
        if obj.object_id in self.scene:
            raise ValidationError(f"scene object {obj.object_id!r} already exists")
        _check_scale(obj)
        self.scene[obj.object_id] = obj

    def update_object(self, object_id, **changes):
        if object_id not in self.scene:
            raise NotFound(f"no scene object {object_id!r}")
        obj = replace(self.scene[object_id], **changes)
        _check_scale(obj)
        self.scene[object_id] = obj
        return obj

    def remove_object(self, object_id):
        if object_id not in self.scene:
            raise NotFound(f"no scene object {object_id!r}")
        del self.scene[object_id]

    # -- playback sampling ---------------------------------------------------

    def frame_poses(self, t=None):
        """Per-clip (name, local frame, GlobalPose) for clips active at
        global frame t (default: the timeline's current frame)."""
        timeline = self.timeline if t is None else replace(self.timeline, current_frame=t)
        locals_ = active_frames(timeline, self.animation_set)
        out = []
        for clip, local in zip(self.animation_set.clips, locals_):
            if local is None:
                continue
            pose = forward_kinematics(
                clip.skeleton, clip.root_translations[local], clip.rotations[local]
            )
            out.append((clip.name, local, pose))
        return out

    # -- analysis ------------------------------------------------------------

    def _memoized(self, kernel, key, compute):
        cached = self._memo.get(kernel)
        if cached is not None and cached[0] == key:
            return cached[1]
        value = compute()
        self._memo[kernel] = (key, value)
        self.recompute_counts[kernel] += 1
        return value

    def recompute(self):
        """Compute (or fetch memoized) analysis results for the current
        session state."""
        lens = self.lens
        set_fp = _set_fingerprint(self.animation_set)
        camera_fp = _camera_fingerprint(self.camera)
        scene_fp = _scene_fingerprint(self.scene.values())

        clustering = self._memoized(
            "clustering",
            (set_fp, lens.seed, lens.k_min, lens.k_max, lens.median_window),
            lambda: cluster_poses(
                self.animation_set,
                seed=lens.seed,
                k_min=lens.k_min,
                k_max=lens.k_max,
                median_window=lens.median_window,
            ),
        )
        keyposes = self._memoized(
            "keyposes",
            (set_fp, lens.keypose_k),
            lambda: tuple(
                extract_keyposes(clip, lens.keypose_k) for clip in self.animation_set.clips
            ),
        )
        curves = self._memoized(
            "joint_curves",
            (set_fp, camera_fp, lens.temporal_joint),
            lambda: joint_curves(self.animation_set, self.camera, lens.temporal_joint),
        )
        paths = self._memoized("paths", (set_fp,), self._all_paths)
        collisions = self._memoized(
            "collisions", (set_fp, scene_fp), lambda: self._all_collisions(paths)
        )
        return ComparisonBundle(
            clustering=clustering,
            keyposes=keyposes,
            curves=curves,
            paths=paths,
            collisions=collisions,
        )

    def _all_paths(self):
        return tuple(
            joint_path(clip, joint)
            for clip in self.animation_set.clips
            for joint in range(self.animation_set.skeleton.num_joints)
        )

    def _all_collisions(self, paths):
        scene_objects = list(self.scene.values())
        events = []
        for path in paths:
            events.extend(path_collisions(path, scene_objects))
        return tuple(events)

    # -- persistence ----------------------------------------------------------

    def to_document(self):
        """Serialise the whole session to a JSON-compatible dict."""
        return {
            "version": 1,
            "clips": [
                {
                    "name": clip.name,
                    "source_name": self.animation_set.source_names[i],
                    "data": json.loads(emit_clip_json(clip)),
                }
                for i, clip in enumerate(self.animation_set.clips)
            ],
            "scene": [
                {
                    "id": obj.object_id,
                    "kind": obj.kind,
                    "position": obj.position.tolist(),
                    "rotation": obj.rotation.tolist(),
                    "scale": obj.scale.tolist(),
                }
                for obj in self.scene.values()
            ],
            "camera": {
                "position": self.camera.position.tolist(),
                "orientation": self.camera.orientation.tolist(),
                "vertical_fov": self.camera.vertical_fov,
                "aspect": self.camera.aspect,
                "near": self.camera.near,
            },
            "timeline": {
                "rows": [
                    {"offset": row.offset, "selected": row.selected}
                    for row in self.timeline.rows
                ],
                "playback_mode": self.timeline.playback_mode,
                "speed": self.timeline.speed,
                "current_frame": self.timeline.current_frame,
                "fps": self.timeline.fps,
                "playing": self.timeline.playing,
                "loop": self.timeline.loop,
            },
            "lens": {
                "camera_lens": self.lens.camera_lens,
                "spatial": list(self.lens.spatial),
                "joint_filter": list(self.lens.joint_filter),
                "temporal_lens": self.lens.temporal_lens,
                "temporal_joint": self.lens.temporal_joint,
                "params": {
                    "trace_n": self.lens.trace_n,
                    "keypose_k": self.lens.keypose_k,
                    "median_window": self.lens.median_window,
                    "seed": self.lens.seed,
                    "k_min": self.lens.k_min,
                    "k_max": self.lens.k_max,
                },
            },
            "diff_reverted": self.diff_reverted,
        }

    @classmethod
    def from_document(cls, document):
        """Rebuild a session saved by to_document."""
        version = document.get("version")
        if version != 1:
            raise ParseError(f"unsupported session version {version!r}")
        timeline_doc = document.get("timeline", {})
        fps = timeline_doc.get("fps", DEFAULT_FPS)
        files = [
            (f"{entry['name']}.json", json.dumps(entry["data"]))
            for entry in document.get("clips", [])
        ]
        animation_set = load_animation_set(files, fps=fps)
        source_names = tuple(
            entry.get("source_name", entry["name"]) for entry in document.get("clips", [])
        )
        animation_set = AnimationSet(
            skeleton=animation_set.skeleton,
            clips=animation_set.clips,
            source_names=source_names,
        )

        lens_doc = document.get("lens", {})
        params = lens_doc.get("params", {})
        lens = LensConfig(
            camera_lens=lens_doc.get("camera_lens", "overlay"),
            spatial=tuple(lens_doc.get("spatial", ("model",))),
            joint_filter=tuple(
                lens_doc.get(
                    "joint_filter", range(animation_set.skeleton.num_joints)
                )
            ),
            temporal_lens=lens_doc.get("temporal_lens", "pose"),
            temporal_joint=lens_doc.get("temporal_joint", 0),
            trace_n=params.get("trace_n", DEFAULT_TRACE_N),
            keypose_k=params.get("keypose_k", DEFAULT_KEYPOSE_K),
            median_window=params.get("median_window", DEFAULT_MEDIAN_WINDOW),
            seed=params.get("seed", 0),
            k_min=params.get("k_min", DEFAULT_K_MIN),
            k_max=params.get("k_max", DEFAULT_K_MAX),
        )
        session = cls(animation_set, fps=fps, lens=lens)

        camera_doc = document.get("camera")
        if camera_doc:
            session.camera = CameraSpec(
                position=camera_doc["position"],
                orientation=camera_doc["orientation"],
                vertical_fov=camera_doc.get("vertical_fov", np.pi / 3),
                aspect=camera_doc.get("aspect", 16.0 / 9.0),
                near=camera_doc.get("near", 0.1),
            )
        for entry in document.get("scene", []):
            session.add_object(
                SceneObject(
                    object_id=entry["id"],
                    kind=entry["kind"],
                    position=entry["position"],
                    rotation=entry["rotation"],
                    scale=entry["scale"],
                )
            )
        rows = tuple(
            ClipRow(offset=row.get("offset", 0), selected=row.get("selected", True))
            for row in timeline_doc.get("rows", [{}] * animation_set.num_clips)
        )
        session.timeline = TimelineState(
            rows=rows,
            playback_mode=timeline_doc.get("playback_mode", "concurrent"),
            speed=timeline_doc.get("speed", 1.0),
            current_frame=timeline_doc.get("current_frame", 0),
            fps=fps,
            playing=timeline_doc.get("playing", False),
            loop=timeline_doc.get("loop", True),
        )
        session.diff_reverted = bool(document.get("diff_reverted", False))
        return session


def _check_scale(obj):
    if np.any(obj.scale <= 0):
        raise ValidationError(
            f"scene object {obj.object_id!r} scale must be strictly positive, "
            f"got {obj.scale.tolist()}"
        )
