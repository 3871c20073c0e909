"""Command line entry points: `motionlens serve` and `motionlens report`.

Flags win over environment variables (PORT, SEED, FPS, TRACE_N,
KEYPOSE_K, K_MIN, K_MAX, MEDIAN_WINDOW, STATIC_DIR); environment wins
over built-in defaults.
"""

import argparse
import itertools
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .camera import CameraSpec, diff_frames, joint_curves
from .config import CLUSTER_PALETTE
from .errors import MotionLensError
from .io import load_animation_set
from .scene import SceneObject
from .server import create_app, settings_from_env
from .session import DEFAULT_CAMERA
from .spatial import extract_keyposes, joint_path, path_collisions
from .temporal import cluster_poses


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="motionlens",
        description="Compare sets of character animations: serve the studio or write batch reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_parser = sub.add_parser("serve", help="run the HTTP API (and UI, if built)")
    serve_parser.add_argument("--host", default=None, help="bind address (default 127.0.0.1)")
    serve_parser.add_argument("--port", type=int, default=None, help="port (env PORT, default 8000)")
    _add_setting_flags(serve_parser)
    serve_parser.add_argument("--static-dir", default=None, help="serve this directory at /")

    report_parser = sub.add_parser("report", help="headless comparison report for a set of files")
    report_parser.add_argument("files", nargs="+", help="BVH or Clip-JSON animation files")
    report_parser.add_argument("--camera", default=None, help="camera JSON file for screen-space curves")
    report_parser.add_argument("--scene", default=None, help="scene JSON file (list of objects) for collisions")
    report_parser.add_argument("--joint", default=None, help="joint name for curve/path sections (default root)")
    report_parser.add_argument("--out", default="report", help="output directory (default ./report)")
    report_parser.add_argument("--svg", action="store_true", help="also write SVG timeline strips")
    _add_setting_flags(report_parser)

    args = parser.parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _report(args)


def _add_setting_flags(parser):
    parser.add_argument("--seed", type=int, default=None, help="clustering RNG seed (env SEED)")
    parser.add_argument("--fps", type=float, default=None, help="session frame rate (env FPS)")
    parser.add_argument("--trace-n", type=int, default=None, help="trace window half-width (env TRACE_N)")
    parser.add_argument("--keypose-k", type=int, default=None, help="keypose count (env KEYPOSE_K)")
    parser.add_argument("--k-min", type=int, default=None, help="minimum cluster count (env K_MIN)")
    parser.add_argument("--k-max", type=int, default=None, help="maximum cluster count (env K_MAX)")
    parser.add_argument(
        "--median-window", type=int, default=None, help="label smoothing window, odd (env MEDIAN_WINDOW)"
    )


def _merged_settings(args):
    settings = settings_from_env()
    overrides = {
        "seed": args.seed,
        "fps": args.fps,
        "trace_n": args.trace_n,
        "keypose_k": args.keypose_k,
        "k_min": args.k_min,
        "k_max": args.k_max,
        "median_window": args.median_window,
        "static_dir": getattr(args, "static_dir", None),
    }
    return replace(settings, **{k: v for k, v in overrides.items() if v is not None})


def _serve(args):
    import uvicorn

    settings = _merged_settings(args)
    host = args.host or os.environ.get("HOST", "127.0.0.1")
    port = args.port if args.port is not None else int(os.environ.get("PORT", "8000"))
    uvicorn.run(create_app(settings), host=host, port=port)
    return 0


def _fail(exc):
    payload = {"code": getattr(exc, "code", "validation"), "message": str(exc), "detail": {}}
    for attr in ("line", "missing", "extra", "object_id"):
        value = getattr(exc, attr, None)
        if value not in (None, [], ()):
            payload["detail"][attr] = (
                list(value) if isinstance(value, (list, tuple, set)) else value
            )
    print(json.dumps(payload), file=sys.stderr)
    return 2


def _load_scene(path):
    with open(path, encoding="utf-8") as handle:
        entries = json.load(handle)
    return [
        SceneObject(
            object_id=str(entry["id"]),
            kind=entry["kind"],
            position=entry.get("position", (0.0, 0.0, 0.0)),
            rotation=entry.get("rotation", (1.0, 0.0, 0.0, 0.0)),
            scale=entry.get("scale", (1.0, 1.0, 1.0)),
        )
        for entry in entries
    ]


def _load_camera(path):
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    return CameraSpec(
        position=doc.get("position", (0.0, 1.0, 5.0)),
        orientation=doc.get("orientation", (1.0, 0.0, 0.0, 0.0)),
        vertical_fov=doc.get("vertical_fov", np.pi / 3),
        aspect=doc.get("aspect", 16.0 / 9.0),
        near=doc.get("near", 0.1),
    )


def _path_stats(path_points, up_axis):
    deltas = np.diff(path_points, axis=0)
    up = 1 if up_axis == "Y" else 2
    return {
        "arc_length": float(np.sum(np.linalg.norm(deltas, axis=1))) if len(deltas) else 0.0,
        "bbox": {
            "min": path_points.min(axis=0).tolist(),
            "max": path_points.max(axis=0).tolist(),
        },
        "max_height": float(path_points[:, up].max()),
    }


def _report(args):
    settings = _merged_settings(args)
    try:
        payload = []
        for filename in args.files:
            with open(filename, "rb") as handle:
                payload.append((os.path.basename(filename), handle.read()))
        animation_set = load_animation_set(payload, fps=settings.fps)
        scene = _load_scene(args.scene) if args.scene else []
        camera = _load_camera(args.camera) if args.camera else DEFAULT_CAMERA

        clustering = cluster_poses(
            animation_set,
            seed=settings.seed,
            k_min=settings.k_min,
            k_max=settings.k_max,
            median_window=settings.median_window,
        )
        keyposes = [extract_keyposes(clip, settings.keypose_k) for clip in animation_set.clips]
        skeleton = animation_set.skeleton
        joint = skeleton.index_of(args.joint) if args.joint else 0

        paths_block = []
        collision_block = []
        for clip in animation_set.clips:
            joints_block = []
            for j in range(skeleton.num_joints):
                path = joint_path(clip, j)
                joints_block.append(
                    {"joint": j, "name": skeleton.names[j]}
                    | _path_stats(path.points, skeleton.up_axis)
                )
                for event in path_collisions(path, scene):
                    collision_block.append(
                        {
                            "clip": event.clip_id,
                            "joint": event.joint,
                            "joint_name": skeleton.names[event.joint],
                            "object_id": event.object_id,
                            "frame_intervals": [list(iv) for iv in event.frame_intervals],
                        }
                    )
            paths_block.append({"clip": clip.name, "joints": joints_block})

        diff_block = []
        for a, b in itertools.combinations(animation_set.clips, 2):
            overlap = min(a.num_frames, b.num_frames)
            distances = [
                diff_frames(animation_set, a.name, b.name, {}, frame).distances
                for frame in range(overlap)
            ]
            diff_block.append(
                {
                    "a": a.name,
                    "b": b.name,
                    "frames": overlap,
                    "mean_distance": float(np.mean(distances)) if distances else 0.0,
                }
            )

        curves = joint_curves(animation_set, camera, joint)
        curves_block = {
            "joint": curves.joint,
            "joint_name": skeleton.names[curves.joint],
            "normalization": {
                "min_x": curves.min_x,
                "max_x": curves.max_x,
                "min_y": curves.min_y,
                "max_y": curves.max_y,
            },
            "clips": [
                {
                    "clip": c.clip_id,
                    "frames_out_of_view": int(np.sum(c.out_of_view)),
                    "bar_x": c.bar_x.tolist(),
                    "bar_y": c.bar_y.tolist(),
                }
                for c in curves.clips
            ],
        }

        report = {
            "fps": settings.fps,
            "seed": settings.seed,
            "clips": [clip.name for clip in animation_set.clips],
            "clusters": {
                "n_clusters": clustering.n_clusters,
                "palette": [
                    CLUSTER_PALETTE[i % len(CLUSTER_PALETTE)]
                    for i in range(clustering.n_clusters)
                ],
                "clips": [
                    {
                        "clip": clip.name,
                        "segments": [
                            {"cluster_id": s.cluster_id, "start": s.start, "end": s.end}
                            for s in clustering.segments[i]
                        ],
                    }
                    for i, clip in enumerate(animation_set.clips)
                ],
            },
            "keyposes": [
                {"clip": ks.clip_id, "frames": list(ks.frames)} for ks in keyposes
            ],
            "paths": paths_block,
            "collisions": collision_block,
            "diff": diff_block,
            "joint_curves": curves_block,
        }
    except (MotionLensError, OSError) as exc:
        return _fail(exc)

    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "report.json")
    with open(out_path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    written = [out_path]

    if args.svg:
        pose_svg = os.path.join(args.out, "timeline_pose.svg")
        with open(pose_svg, "w", encoding="utf-8") as handle:
            handle.write(_pose_strip_svg(animation_set, clustering))
        joint_svg = os.path.join(args.out, "timeline_joint.svg")
        with open(joint_svg, "w", encoding="utf-8") as handle:
            handle.write(_joint_strip_svg(curves))
        written += [pose_svg, joint_svg]

    for path in written:
        print(path)
    return 0


def _pose_strip_svg(animation_set, clustering, frame_px=4, bar_height=18, gap=8, label_width=120):
    """Colour-coded cluster segments, one bar per clip."""
    width = label_width + frame_px * max(clip.num_frames for clip in animation_set.clips)
    height = len(animation_set.clips) * (bar_height + gap)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">'
    ]
    for i, clip in enumerate(animation_set.clips):
        y = i * (bar_height + gap)
        parts.append(
            f'<text x="0" y="{y + bar_height - 5}" fill="#333">{clip.name}</text>'
        )
        for seg in clustering.segments[i]:
            colour = CLUSTER_PALETTE[seg.cluster_id % len(CLUSTER_PALETTE)]
            x = label_width + seg.start * frame_px
            w = (seg.end - seg.start) * frame_px
            parts.append(
                f'<rect x="{x}" y="{y}" width="{w}" height="{bar_height}" fill="{colour}">'
                f"<title>cluster {seg.cluster_id}: frames {seg.start}..{seg.end - 1}</title></rect>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _joint_strip_svg(curves, frame_px=4, strip_height=60, gap=14, label_width=120):
    """Screen-space x/y curves of one joint, one strip per clip."""
    width = label_width + frame_px * max(len(c.frames) for c in curves.clips)
    height = len(curves.clips) * (strip_height + gap)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">'
    ]
    for i, clip_curve in enumerate(curves.clips):
        y0 = i * (strip_height + gap)
        parts.append(
            f'<text x="0" y="{y0 + 12}" fill="#333">{clip_curve.clip_id}</text>'
        )
        parts.append(
            f'<rect x="{label_width}" y="{y0}" width="{width - label_width}" '
            f'height="{strip_height}" fill="none" stroke="#ccc"/>'
        )
        for values, colour in ((clip_curve.bar_x, "#4e79a7"), (clip_curve.bar_y, "#e15759")):
            points = " ".join(
                f"{label_width + t * frame_px},{y0 + (1.0 - v) * strip_height:.2f}"
                for t, v in enumerate(values)
            )
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{colour}" stroke-width="1.5"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


if __name__ == "__main__":
    sys.exit(main())
