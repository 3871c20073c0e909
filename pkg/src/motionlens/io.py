"""File parsing (BVH, Clip-JSON) and animation-set assembly.

A loaded set holds clips that all reference one skeleton. Files may
declare joints in different orders; joints are matched across files by
name, and per-frame rotations are reordered to the first file's layout.
"""

import json
import os

import numpy as np

from . import quat
from .config import DEFAULT_FPS
from .core import AnimationClip, Skeleton, resample
from .errors import EmptySession, IncompatibleSkeletons, MotionLensError, ParseError

from dataclasses import dataclass

_POSITION_CHANNELS = {"Xposition": 0, "Yposition": 1, "Zposition": 2}
_ROTATION_CHANNELS = {"Xrotation": "X", "Yrotation": "Y", "Zrotation": "Z"}


@dataclass(frozen=True, eq=False)
class AnimationSet:
    """An ordered group of clips sharing one skeleton.

    Clip order is the timeline row order. source_names keeps the file
    stem each clip came from (clip names are de-duplicated stems).
    """

    skeleton: Skeleton
    clips: tuple
    source_names: tuple

    def __post_init__(self):
        object.__setattr__(self, "clips", tuple(self.clips))
        object.__setattr__(self, "source_names", tuple(self.source_names))
        names = [c.name for c in self.clips]
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate clip names: {sorted(names)}")

    @property
    def num_clips(self):
        return len(self.clips)

    def clip(self, name):
        for c in self.clips:
            if c.name == name:
                return c
        raise KeyError(name)


# ---------------------------------------------------------------------------
# BVH


class _Tokens:
    """Whitespace token stream that remembers source line numbers."""

    def __init__(self, text):
        self._items = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            for token in line.split():
                self._items.append((token, line_no))
        self._pos = 0
        self.line = 1

    def __bool__(self):
        return self._pos < len(self._items)

    def peek(self):
        if not self:
            raise ParseError("unexpected end of file", line=self.line)
        return self._items[self._pos][0]

    def next(self, expect=None):
        token = self.peek()
        self.line = self._items[self._pos][1]
        self._pos += 1
        if expect is not None and token != expect:
            raise ParseError(f"expected {expect!r}, got {token!r}", line=self.line)
        return token

    def next_float(self):
        token = self.next()
        try:
            return float(token)
        except ValueError:
            raise ParseError(f"expected a number, got {token!r}", line=self.line) from None

    def next_int(self):
        token = self.next()
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"expected an integer, got {token!r}", line=self.line) from None

    def rest(self):
        """Remaining (token, line) pairs without consuming them."""
        return self._items[self._pos :]


def parse_bvh(text):
    """Parse a BVH document into (Skeleton, AnimationClip).

    Euler rotation channels are composed intrinsically in the order the
    file declares them. End Sites become leaf joints named
    "<parent>_end". fps is round(1 / FrameTime). Position channels on
    non-root joints are read and discarded (the skeleton's rest offsets
    already carry bone geometry).
    """
    tokens = _Tokens(text)
    tokens.next("HIERARCHY")

    names, parents, offsets = [], [], []
    # flat channel layout: (joint index, channel keyword) per motion column
    layout = []

    def parse_joint(parent_index):
        keyword = tokens.next()
        if keyword not in ("ROOT", "JOINT"):
            raise ParseError(f"expected ROOT or JOINT, got {keyword!r}", line=tokens.line)
        name = tokens.next()
        index = _add_joint(name, parent_index)
        tokens.next("{")
        while True:
            head = tokens.peek()
            if head == "OFFSET":
                tokens.next()
                offsets[index] = [tokens.next_float() for _ in range(3)]
            elif head == "CHANNELS":
                tokens.next()
                count = tokens.next_int()
                for _ in range(count):
                    channel = tokens.next()
                    if channel not in _POSITION_CHANNELS and channel not in _ROTATION_CHANNELS:
                        raise ParseError(f"unknown channel {channel!r}", line=tokens.line)
                    layout.append((index, channel))
            elif head in ("JOINT", "ROOT"):
                parse_joint(index)
            elif head == "End":
                tokens.next()
                tokens.next("Site")
                end_index = _add_joint(f"{name}_end", index)
                tokens.next("{")
                tokens.next("OFFSET")
                offsets[end_index] = [tokens.next_float() for _ in range(3)]
                tokens.next("}")
            elif head == "}":
                tokens.next()
                return
            else:
                raise ParseError(f"unexpected token {head!r} in joint block", line=tokens.line)

    def _add_joint(name, parent_index):
        while name in names:
            name += "_"
        names.append(name)
        parents.append(parent_index)
        offsets.append([0.0, 0.0, 0.0])
        return len(names) - 1

    parse_joint(-1)

    if not tokens or tokens.peek() != "MOTION":
        raise ParseError("no motion section", line=tokens.line)
    tokens.next("MOTION")
    tokens.next("Frames:")
    frame_count = tokens.next_int()
    if frame_count < 1:
        raise ParseError("clip must have at least one frame", line=tokens.line)
    tokens.next("Frame")
    tokens.next("Time:")
    frame_time = tokens.next_float()
    if frame_time <= 0:
        raise ParseError(f"frame time must be positive, got {frame_time}", line=tokens.line)
    fps = round(1.0 / frame_time)

    data = tokens.rest()
    expected = frame_count * len(layout)
    if len(data) != expected:
        if len(data) > expected:
            bad_line = data[expected][1]
        else:
            bad_line = data[-1][1] if data else tokens.line
        raise ParseError(
            f"expected {expected} motion values ({frame_count} frames x {len(layout)} channels), "
            f"got {len(data)}",
            line=bad_line,
        )
    values = np.empty(expected)
    for k, (token, line_no) in enumerate(data):
        try:
            values[k] = float(token)
        except ValueError:
            raise ParseError(f"expected a number, got {token!r}", line=line_no) from None
    values = values.reshape(frame_count, len(layout))

    skeleton = Skeleton(names=names, parents=parents, offsets=offsets, up_axis="Y")

    j = skeleton.num_joints
    root_translations = np.zeros((frame_count, 3))
    rotations = np.broadcast_to(quat.IDENTITY, (frame_count, j, 4)).copy()
    # group rotation columns by joint, preserving declared order
    rot_axes = {}
    rot_columns = {}
    for column, (index, channel) in enumerate(layout):
        if channel in _POSITION_CHANNELS:
            if index == 0:
                root_translations[:, _POSITION_CHANNELS[channel]] = values[:, column]
        else:
            rot_axes.setdefault(index, []).append(_ROTATION_CHANNELS[channel])
            rot_columns.setdefault(index, []).append(column)
    for index, axes in rot_axes.items():
        angles = values[:, rot_columns[index]]
        rotations[:, index] = quat.from_euler_degrees(axes, angles)

    clip = AnimationClip(
        name="clip",
        skeleton=skeleton,
        fps=fps,
        root_translations=root_translations,
        rotations=quat.normalize(rotations),
    )
    return skeleton, clip


# ---------------------------------------------------------------------------
# Clip-JSON


def _expect(value, kind, path):
    if not isinstance(value, kind):
        names = {dict: "object", list: "array", str: "string"}
        raise ParseError(f"{path}: expected {names.get(kind, kind.__name__)}")
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{path}: expected number")
    return float(value)


def _vector(value, length, path):
    _expect(value, list, path)
    if len(value) != length:
        raise ParseError(f"{path}: expected {length} numbers, got {len(value)}")
    return [_number(v, f"{path}[{k}]") for k, v in enumerate(value)]


def parse_clip_json(text, name="clip"):
    """Parse a Clip-JSON document into (Skeleton, AnimationClip).

    The document layout is::

        { "skeleton": { "up_axis": "Y",
                        "joints": [ { "name": str, "parent": int, "offset": [x,y,z] }, ... ],
                        "chains": { name: [joint index, ...] } },
          "fps": number,
          "frames": [ { "root_translation": [x,y,z],
                        "rotations": [[w,x,y,z], ...] }, ... ] }

    parent is -1 for the root. Errors name the path of the offending
    field, e.g. ``frames[0].rotations[2]``.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    _expect(document, dict, "document")

    sk = _expect(document.get("skeleton"), dict, "skeleton")
    joints = _expect(sk.get("joints"), list, "skeleton.joints")
    if not joints:
        raise ParseError("skeleton.joints: must not be empty")
    names, parents, offsets = [], [], []
    for k, joint in enumerate(joints):
        path = f"skeleton.joints[{k}]"
        _expect(joint, dict, path)
        names.append(_expect(joint.get("name"), str, f"{path}.name"))
        parent = joint.get("parent", -1)
        if isinstance(parent, bool) or not isinstance(parent, int):
            raise ParseError(f"{path}.parent: expected integer")
        parents.append(parent)
        offsets.append(_vector(joint.get("offset"), 3, f"{path}.offset"))
    up_axis = sk.get("up_axis", "Y")
    _expect(up_axis, str, "skeleton.up_axis")
    chains = {}
    raw_chains = sk.get("chains", {})
    _expect(raw_chains, dict, "skeleton.chains")
    for chain_name, indices in raw_chains.items():
        _expect(indices, list, f"skeleton.chains.{chain_name}")
        cleaned = []
        for k, v in enumerate(indices):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ParseError(f"skeleton.chains.{chain_name}[{k}]: expected integer")
            cleaned.append(v)
        chains[chain_name] = cleaned

    fps = _number(document.get("fps"), "fps")
    if fps <= 0:
        raise ParseError("fps: must be positive")

    frames = _expect(document.get("frames"), list, "frames")
    if not frames:
        raise ParseError("frames: must not be empty")
    j = len(names)
    root_translations = np.empty((len(frames), 3))
    rotations = np.empty((len(frames), j, 4))
    for t, frame in enumerate(frames):
        path = f"frames[{t}]"
        _expect(frame, dict, path)
        root_translations[t] = _vector(frame.get("root_translation"), 3, f"{path}.root_translation")
        rots = _expect(frame.get("rotations"), list, f"{path}.rotations")
        if len(rots) != j:
            raise ParseError(f"{path}.rotations: expected {j} rotations, got {len(rots)}")
        for i, q in enumerate(rots):
            rotations[t, i] = _vector(q, 4, f"{path}.rotations[{i}]")
            norm = float(np.linalg.norm(rotations[t, i]))
            if abs(norm - 1.0) > 1e-6:
                raise ParseError(f"{path}.rotations[{i}]: quaternion norm {norm:.8f} is not 1")

    try:
        skeleton = Skeleton(
            names=names, parents=parents, offsets=offsets, up_axis=up_axis, chains=chains
        )
        clip = AnimationClip(
            name=name,
            skeleton=skeleton,
            fps=fps,
            root_translations=root_translations,
            rotations=rotations,
        )
    except MotionLensError as exc:
        raise ParseError(str(exc)) from None
    return skeleton, clip


def emit_clip_json(clip):
    """Serialise a clip to a Clip-JSON string; inverse of parse_clip_json."""
    skeleton = clip.skeleton
    document = {
        "skeleton": {
            "up_axis": skeleton.up_axis,
            "joints": [
                {
                    "name": skeleton.names[i],
                    "parent": skeleton.parents[i],
                    "offset": skeleton.offsets[i].tolist(),
                }
                for i in range(skeleton.num_joints)
            ],
            "chains": {name: list(indices) for name, indices in skeleton.chains.items()},
        },
        "fps": clip.fps,
        "frames": [
            {
                "root_translation": clip.root_translations[t].tolist(),
                "rotations": clip.rotations[t].tolist(),
            }
            for t in range(clip.num_frames)
        ],
    }
    return json.dumps(document)


# ---------------------------------------------------------------------------
# Set assembly


def _sniff_format(name, text):
    ext = os.path.splitext(name)[1].lower()
    if ext == ".bvh":
        return "bvh"
    if ext == ".json":
        return "json"
    return "json" if text.lstrip().startswith("{") else "bvh"


def _reorder_to(skeleton, file_skeleton, clip):
    """Remap a clip onto the canonical skeleton, matching joints by name."""
    canonical = set(skeleton.names)
    loaded = set(file_skeleton.names)
    if canonical != loaded:
        missing = canonical - loaded
        extra = loaded - canonical
        parts = []
        if missing:
            parts.append(f"missing {sorted(missing)}")
        if extra:
            parts.append(f"unexpected {sorted(extra)}")
        raise IncompatibleSkeletons(
            f"clip {clip.name!r} does not fit the set's skeleton: " + "; ".join(parts),
            missing=missing,
            extra=extra,
        )
    order = [file_skeleton.names.index(n) for n in skeleton.names]
    for i, src in enumerate(order):
        parent = skeleton.parents[i]
        file_parent = file_skeleton.parents[src]
        parent_name = None if parent < 0 else skeleton.names[parent]
        file_parent_name = None if file_parent < 0 else file_skeleton.names[file_parent]
        if parent_name != file_parent_name:
            raise IncompatibleSkeletons(
                f"clip {clip.name!r} parents {skeleton.names[i]!r} under "
                f"{file_parent_name!r}, the set's skeleton under {parent_name!r}"
            )
    rotations = clip.rotations[:, order, :]
    return AnimationClip(
        name=clip.name,
        skeleton=skeleton,
        fps=clip.fps,
        root_translations=clip.root_translations,
        rotations=rotations,
    )


def load_animation_set(files, fps=DEFAULT_FPS):
    """Parse uploaded files into an AnimationSet at a common frame rate.

    Args:
        files: list of (filename, bytes or str) pairs; each file is a
            BVH or Clip-JSON document (picked by extension, falling back
            to a content sniff).
        fps: rate every clip is resampled to (default 24).

    Raises:
        EmptySession: no files given.
        ParseError: any file fails to parse.
        IncompatibleSkeletons: a file's joint names or hierarchy differ
            from the first file's.
    """
    files = list(files)
    if not files:
        raise EmptySession("no animation files supplied")

    skeleton = None
    clips = []
    source_names = []
    used_names = set()
    for filename, data in files:
        if isinstance(data, bytes):
            try:
                text = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(f"{filename}: not UTF-8 ({exc})") from None
        else:
            text = data
        stem = os.path.splitext(os.path.basename(filename))[0] or "clip"
        name = stem
        counter = 2
        while name in used_names:
            name = f"{stem}-{counter}"
            counter += 1
        used_names.add(name)

        try:
            if _sniff_format(filename, text) == "bvh":
                file_skeleton, clip = parse_bvh(text)
                clip = AnimationClip(
                    name=name,
                    skeleton=file_skeleton,
                    fps=clip.fps,
                    root_translations=clip.root_translations,
                    rotations=clip.rotations,
                )
            else:
                file_skeleton, clip = parse_clip_json(text, name=name)
        except ParseError as exc:
            raise ParseError(f"{filename}: {exc}") from None

        if skeleton is None:
            skeleton = file_skeleton
        else:
            clip = _reorder_to(skeleton, file_skeleton, clip)
        clips.append(resample(clip, fps))
        source_names.append(stem)

    return AnimationSet(skeleton=skeleton, clips=tuple(clips), source_names=tuple(source_names))
