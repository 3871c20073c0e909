"""HTTP API for the comparison studio.

Sessions are held in memory, keyed by short sequential ids. All
analysis endpoints read through Session.recompute(), so unchanged
state is never re-analysed. Errors surface as JSON bodies
{code, message, detail} with a status matching the code.
"""

import os
import threading
from dataclasses import dataclass, replace

from fastapi import Body, FastAPI, File, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .camera import CameraSpec, diff_frames, joint_curves
from .config import (
    DEFAULT_FPS,
    DEFAULT_K_MAX,
    DEFAULT_K_MIN,
    DEFAULT_KEYPOSE_K,
    DEFAULT_MEDIAN_WINDOW,
    DEFAULT_TRACE_N,
    CLUSTER_PALETTE,
)
from .errors import MotionLensError, NotFound, ValidationError
from .io import load_animation_set
from .scene import SceneObject
from .session import ClipRow, LensConfig, Session, TimelineState

STATUS_BY_CODE = {
    "parse_error": 400,
    "validation": 400,
    "frame_out_of_range": 400,
    "not_found": 404,
    "incompatible_skeletons": 422,
}


@dataclass(frozen=True)
class ServerSettings:
    """Analysis defaults applied to new sessions."""

    seed: int = 0
    fps: float = DEFAULT_FPS
    trace_n: int = DEFAULT_TRACE_N
    keypose_k: int = DEFAULT_KEYPOSE_K
    k_min: int = DEFAULT_K_MIN
    k_max: int = DEFAULT_K_MAX
    median_window: int = DEFAULT_MEDIAN_WINDOW
    static_dir: str = None


def settings_from_env(environ=None):
    """Build ServerSettings from environment variables (SEED, FPS,
    TRACE_N, KEYPOSE_K, K_MIN, K_MAX, MEDIAN_WINDOW, STATIC_DIR)."""
    env = os.environ if environ is None else environ
    defaults = ServerSettings()

    def get(name, cast, fallback):
        raw = env.get(name)
        return cast(raw) if raw not in (None, "") else fallback

    return ServerSettings(
        seed=get("SEED", int, defaults.seed),
        fps=get("FPS", float, defaults.fps),
        trace_n=get("TRACE_N", int, defaults.trace_n),
        keypose_k=get("KEYPOSE_K", int, defaults.keypose_k),
        k_min=get("K_MIN", int, defaults.k_min),
        k_max=get("K_MAX", int, defaults.k_max),
        median_window=get("MEDIAN_WINDOW", int, defaults.median_window),
        static_dir=env.get("STATIC_DIR", defaults.static_dir),
    )


def _error_detail(exc):
    detail = {}
    for attr in ("line", "missing", "extra", "object_id"):
        value = getattr(exc, attr, None)
        if value not in (None, [], ()):
            detail[attr] = list(value) if isinstance(value, (list, tuple, set)) else value
    return detail


def _pose_document(pose):
    return {
        "positions": pose.positions.tolist(),
        "root_rotation": pose.root_rotation.tolist(),
    }


def create_app(settings=None):
    """Build the FastAPI application."""
    if settings is None:
        settings = settings_from_env()
    app = FastAPI(title="motionlens", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.settings = settings
    app.state.sessions = {}
    app.state.locks = {}
    app.state.counter = 0
    app.state.registry_lock = threading.Lock()

    @app.exception_handler(MotionLensError)
    async def handle_engine_error(request: Request, exc: MotionLensError):
        return JSONResponse(
            status_code=STATUS_BY_CODE.get(exc.code, 400),
            content={"code": exc.code, "message": str(exc), "detail": _error_detail(exc)},
        )

    def get_session(session_id):
        try:
            return app.state.sessions[session_id], app.state.locks[session_id]
        except KeyError:
            raise NotFound(f"no session {session_id!r}") from None

    def resolve_joint(session, name):
        skeleton = session.animation_set.skeleton
        if name is None:
            return session.lens.temporal_joint
        if name in skeleton.names:
            return skeleton.names.index(name)
        try:
            index = int(name)
        except ValueError:
            raise NotFound(f"no joint named {name!r}") from None
        if not 0 <= index < skeleton.num_joints:
            raise NotFound(f"joint index {index} out of range")
        return index

    # -- sessions -------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    async def create_session(files: list[UploadFile] = File(...), seed: int = None):
        payload = [(f.filename or "clip", await f.read()) for f in files]
        animation_set = load_animation_set(payload, fps=settings.fps)
        session = Session(
            animation_set,
            seed=settings.seed if seed is None else seed,
            fps=settings.fps,
        )
        session.lens = replace(
            session.lens,
            trace_n=settings.trace_n,
            keypose_k=settings.keypose_k,
            k_min=settings.k_min,
            k_max=settings.k_max,
            median_window=settings.median_window,
        )
        with app.state.registry_lock:
            app.state.counter += 1
            session_id = f"s{app.state.counter:04d}"
            app.state.sessions[session_id] = session
            app.state.locks[session_id] = threading.Lock()
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session_document(session_id: str):
        session, lock = get_session(session_id)
        with lock:
            return session.to_document()

    # -- state updates ---------------------------------------------------------

    @app.put("/sessions/{session_id}/timeline")
    def put_timeline(session_id: str, body: dict):
        session, lock = get_session(session_id)
        with lock:
            current = session.timeline
            rows_doc = body.get("rows")
            if rows_doc is None:
                rows = current.rows
            else:
                if len(rows_doc) != session.animation_set.num_clips:
                    raise ValidationError(
                        f"expected {session.animation_set.num_clips} rows, got {len(rows_doc)}"
                    )
                rows = tuple(
                    ClipRow(
                        offset=int(row.get("offset", current.rows[i].offset)),
                        selected=bool(row.get("selected", current.rows[i].selected)),
                    )
                    for i, row in enumerate(rows_doc)
                )
            session.set_timeline(
                TimelineState(
                    rows=rows,
                    playback_mode=body.get("playback_mode", current.playback_mode),
                    speed=body.get("speed", current.speed),
                    current_frame=body.get("current_frame", current.current_frame),
                    fps=current.fps,
                    playing=body.get("playing", current.playing),
                    loop=body.get("loop", current.loop),
                    frame_remainder=current.frame_remainder,
                )
            )
            return session.to_document()["timeline"] | {"diff_reverted": session.diff_reverted}

    @app.put("/sessions/{session_id}/scene/objects")
    def put_scene_objects(session_id: str, body: list = Body(...)):
        session, lock = get_session(session_id)
        with lock:
            staged = []
            seen = set()
            for entry in body:
                obj = SceneObject(
                    object_id=str(entry.get("id", "")),
                    kind=entry.get("kind", ""),
                    position=entry.get("position", (0.0, 0.0, 0.0)),
                    rotation=entry.get("rotation", (1.0, 0.0, 0.0, 0.0)),
                    scale=entry.get("scale", (1.0, 1.0, 1.0)),
                )
                if not obj.object_id:
                    raise ValidationError("scene object needs a non-empty id")
                if obj.object_id in seen:
                    raise ValidationError(f"duplicate scene object id {obj.object_id!r}")
                seen.add(obj.object_id)
                staged.append(obj)
            session.scene = {}
            for obj in staged:
                session.add_object(obj)
            return session.to_document()["scene"]

    @app.put("/sessions/{session_id}/scene/camera")
    def put_camera(session_id: str, body: dict):
        session, lock = get_session(session_id)
        with lock:
            current = session.camera
            session.set_camera(
                CameraSpec(
                    position=body.get("position", current.position),
                    orientation=body.get("orientation", current.orientation),
                    vertical_fov=body.get("vertical_fov", current.vertical_fov),
                    aspect=body.get("aspect", current.aspect),
                    near=body.get("near", current.near),
                )
            )
            return session.to_document()["camera"]

    @app.put("/sessions/{session_id}/lens")
    def put_lens(session_id: str, body: dict):
        session, lock = get_session(session_id)
        with lock:
            lens = session.lens
            params = body.get("params", {})
            joint_filter = body.get("joint_filter")
            chains = body.get("chains")
            if joint_filter is not None or chains is not None:
                visible = set() if joint_filter is None else {int(i) for i in joint_filter}
                skeleton = session.animation_set.skeleton
                for chain in chains or ():
                    if chain not in skeleton.chains:
                        raise NotFound(f"no chain named {chain!r}")
                    visible.update(skeleton.chains[chain])
                filter_value = tuple(sorted(visible))
            else:
                filter_value = lens.joint_filter
            temporal_joint = body.get("temporal_joint", lens.temporal_joint)
            if isinstance(temporal_joint, str):
                temporal_joint = resolve_joint(session, temporal_joint)
            session.set_lens(
                LensConfig(
                    camera_lens=body.get("camera_lens", lens.camera_lens),
                    spatial=tuple(body.get("spatial", lens.spatial)),
                    joint_filter=filter_value,
                    temporal_lens=body.get("temporal_lens", lens.temporal_lens),
                    temporal_joint=temporal_joint,
                    trace_n=params.get("trace_n", lens.trace_n),
                    keypose_k=params.get("keypose_k", lens.keypose_k),
                    median_window=params.get("median_window", lens.median_window),
                    seed=params.get("seed", lens.seed),
                    k_min=params.get("k_min", lens.k_min),
                    k_max=params.get("k_max", lens.k_max),
                )
            )
            return session.to_document()["lens"]

    # -- analysis reads ---------------------------------------------------------

    @app.get("/sessions/{session_id}/pose-clusters")
    def get_pose_clusters(session_id: str):
        session, lock = get_session(session_id)
        with lock:
            clustering = session.recompute().clustering
            clips = []
            for i, clip in enumerate(session.animation_set.clips):
                row = session.timeline.rows[i]
                clips.append(
                    {
                        "clip": clip.name,
                        "offset": row.offset,
                        "selected": row.selected,
                        "segments": [
                            {"cluster_id": s.cluster_id, "start": s.start, "end": s.end}
                            for s in clustering.segments[i]
                        ],
                    }
                )
            return {
                "n_clusters": clustering.n_clusters,
                "seed": clustering.seed,
                "palette": [
                    CLUSTER_PALETTE[i % len(CLUSTER_PALETTE)]
                    for i in range(clustering.n_clusters)
                ],
                "centroids": clustering.centroids.tolist(),
                "clips": clips,
            }

    @app.get("/sessions/{session_id}/joint-curves")
    def get_joint_curves(session_id: str, joint: str = None):
        session, lock = get_session(session_id)
        with lock:
            index = resolve_joint(session, joint)
            if index == session.lens.temporal_joint:
                curves = session.recompute().curves
            else:
                curves = joint_curves(session.animation_set, session.camera, index)
            return {
                "joint": curves.joint,
                "joint_name": session.animation_set.skeleton.names[curves.joint],
                "normalization": {
                    "min_x": curves.min_x,
                    "max_x": curves.max_x,
                    "min_y": curves.min_y,
                    "max_y": curves.max_y,
                },
                "clips": [
                    {
                        "clip": c.clip_id,
                        "samples": [
                            {
                                "frame": int(c.frames[t]),
                                "bar_x": float(c.bar_x[t]),
                                "bar_y": float(c.bar_y[t]),
                                "out_of_view": bool(c.out_of_view[t]),
                            }
                            for t in range(len(c.frames))
                        ],
                    }
                    for c in curves.clips
                ],
            }

    @app.get("/sessions/{session_id}/keyposes")
    def get_keyposes(session_id: str, clip: str = None):
        session, lock = get_session(session_id)
        with lock:
            if clip is None:
                raise ValidationError("query parameter 'clip' is required")
            names = [c.name for c in session.animation_set.clips]
            if clip not in names:
                raise NotFound(f"no clip named {clip!r}")
            keyposes = session.recompute().keyposes[names.index(clip)]
            return {
                "clip": keyposes.clip_id,
                "frames": list(keyposes.frames),
                "poses": [_pose_document(p) for p in keyposes.poses],
            }

    @app.get("/sessions/{session_id}/paths")
    def get_paths(session_id: str, joint: str = None):
        session, lock = get_session(session_id)
        with lock:
            index = resolve_joint(session, joint)
            paths = session.recompute().paths
            j = session.animation_set.skeleton.num_joints
            return {
                "joint": index,
                "joint_name": session.animation_set.skeleton.names[index],
                "clips": [
                    {
                        "clip": paths[i * j + index].clip_id,
                        "points": paths[i * j + index].points.tolist(),
                    }
                    for i in range(session.animation_set.num_clips)
                ],
            }

    @app.get("/sessions/{session_id}/collisions")
    def get_collisions(session_id: str):
        session, lock = get_session(session_id)
        with lock:
            events = session.recompute().collisions
            skeleton = session.animation_set.skeleton
            return {
                "events": [
                    {
                        "clip": e.clip_id,
                        "joint": e.joint,
                        "joint_name": skeleton.names[e.joint],
                        "object_id": e.object_id,
                        "frame_intervals": [list(iv) for iv in e.frame_intervals],
                    }
                    for e in events
                ]
            }

    @app.get("/sessions/{session_id}/diff")
    def get_diff(session_id: str, a: str = None, b: str = None, frame: int = None):
        session, lock = get_session(session_id)
        with lock:
            if a is None or b is None:
                raise ValidationError("query parameters 'a' and 'b' are required")
            offsets = {
                clip.name: row.offset
                for clip, row in zip(session.animation_set.clips, session.timeline.rows)
            }
            at = session.timeline.current_frame if frame is None else frame
            diff = diff_frames(session.animation_set, a, b, offsets, at)
            skeleton = session.animation_set.skeleton
            return {
                "frame": diff.frame,
                "a": diff.clip_a,
                "b": diff.clip_b,
                "joints": [
                    {
                        "joint": i,
                        "joint_name": skeleton.names[i],
                        "pos_a": diff.positions_a[i].tolist(),
                        "pos_b": diff.positions_b[i].tolist(),
                        "distance": float(diff.distances[i]),
                    }
                    for i in range(skeleton.num_joints)
                ],
            }

    @app.get("/sessions/{session_id}/frame")
    def get_frame(session_id: str, t: int = None):
        session, lock = get_session(session_id)
        with lock:
            at = session.timeline.current_frame if t is None else t
            if at < 0:
                raise ValidationError(f"frame must be >= 0, got {at}")
            return {
                "frame": at,
                "clips": [
                    {"clip": name, "local_frame": local} | _pose_document(pose)
                    for name, local, pose in session.frame_poses(at)
                ],
            }

    static_dir = settings.static_dir
    if static_dir is None:
        bundled = os.path.join(os.path.dirname(__file__), "..", "..", "frontend", "dist")
        static_dir = bundled if os.path.isdir(bundled) else None
    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
