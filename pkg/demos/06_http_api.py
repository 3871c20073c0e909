"""
Driving the analysis server over HTTP
=====================================

Everything the library computes is also reachable over a JSON API -
this is what the browser studio talks to. The walk below runs the
app in-process with a test client; `motionlens serve` runs the same
app on a real port.
"""

import numpy as np
from fastapi.testclient import TestClient

from motionlens import AnimationClip, Skeleton, emit_clip_json
from motionlens.server import ServerSettings, create_app

# Two single-joint takes as uploadable JSON clip files.
skeleton = Skeleton(names=("root",), parents=(-1,), offsets=np.zeros((1, 3)))


def sway(frames, seed):
    rng = np.random.default_rng(seed)
    roots = np.zeros((frames, 3))
    roots[:, 0] = np.sin(np.linspace(0, 3 * np.pi, frames)) + rng.normal(0, 0.05, frames)
    roots[:, 1] = 1.0
    rotations = np.zeros((frames, 1, 4))
    rotations[..., 0] = 1.0
    return AnimationClip(
        name="clip", skeleton=skeleton, fps=24.0, root_translations=roots, rotations=rotations
    )


files = [
    ("files", (f"take{i}.json", emit_clip_json(sway(30, i)).encode(), "application/json"))
    for i in (1, 2)
]

client = TestClient(create_app(ServerSettings()), raise_server_exceptions=False)

# Upload the takes; the response names the new session.
response = client.post("/sessions", files=files)
session_id = response.json()["session_id"]
print(f"created session {session_id} ({response.status_code})")

# Pose clusters come back as per-clip coloured segments plus the
# palette the UI paints them with.
clusters = client.get(f"/sessions/{session_id}/pose-clusters").json()
print(f"\n{clusters['n_clusters']} clusters, palette {clusters['palette'][:3]}...")
for clip in clusters["clips"]:
    runs = " ".join(f"{s['cluster_id']}:{s['start']}-{s['end']}" for s in clip["segments"])
    print(f"  {clip['clip']}: {runs}")

# Screen-space curves for the root joint, normalised to [0, 1] bars.
curves = client.get(f"/sessions/{session_id}/joint-curves", params={"joint": "root"}).json()
first = curves["clips"][0]["samples"][0]
print(f"\njoint curves for {curves['joint_name']!r}: "
      f"first sample bar_x={first['bar_x']:.3f} bar_y={first['bar_y']:.3f}")

# The timeline is mutable state: shift take2 and ask for a frame.
client.put(f"/sessions/{session_id}/timeline", json={"rows": [{"offset": 0}, {"offset": 5}]})
frame = client.get(f"/sessions/{session_id}/frame", params={"t": 7}).json()
actives = {c["clip"]: c["local_frame"] for c in frame["clips"]}
print(f"\nframe 7 with take2 shifted by 5: local frames {actives}")

# Per-joint diff between the takes at that frame.
diff = client.get(
    f"/sessions/{session_id}/diff", params={"a": "take1", "b": "take2", "frame": 7}
).json()
for joint in diff["joints"]:
    print(f"diff at frame 7, joint {joint['joint_name']!r}: {joint['distance']:.3f}")

# Errors are structured: unknown clips are a 404 with a stable code.
bad = client.get(f"/sessions/{session_id}/diff", params={"a": "take1", "b": "ghost"})
print(f"\ndiff against a missing clip -> {bad.status_code} {bad.json()['code']}")
