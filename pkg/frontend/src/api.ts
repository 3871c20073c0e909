// Typed client for the analysis server. Every shape here mirrors a
// JSON response; the UI never computes analysis results itself.

export interface ErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }
}

export interface ClipRowDoc {
  offset: number;
  selected: boolean;
}

export interface TimelineDoc {
  rows: ClipRowDoc[];
  playback_mode: "concurrent" | "sequential";
  speed: number;
  current_frame: number;
  fps: number;
  playing: boolean;
  loop: boolean;
}

export interface LensParamsDoc {
  trace_n: number;
  keypose_k: number;
  median_window: number;
  seed: number;
  k_min: number;
  k_max: number;
}

export interface LensDoc {
  camera_lens: "overlay" | "grid" | "diff";
  spatial: string[];
  joint_filter: number[];
  temporal_lens: "pose" | "joint";
  temporal_joint: number;
  params: LensParamsDoc;
}

export interface CameraDoc {
  position: number[];
  orientation: number[];
  vertical_fov: number;
  aspect: number;
  near: number;
}

export interface SceneObjectDoc {
  id: string;
  kind: string;
  position: number[];
  rotation: number[];
  scale: number[];
}

export interface SkeletonDoc {
  up_axis: string;
  joints: { name: string; parent: number; offset: number[] }[];
  chains: Record<string, number[]>;
}

export interface ClipDataDoc {
  skeleton: SkeletonDoc;
  fps: number;
  frames: { root_translation: number[]; rotations: number[][] }[];
}

export interface SessionDoc {
  version: number;
  clips: { name: string; source_name: string; data: ClipDataDoc }[];
  timeline: TimelineDoc;
  lens: LensDoc;
  camera: CameraDoc;
  scene: SceneObjectDoc[];
  diff_reverted: boolean;
}

export interface SegmentDoc {
  cluster_id: number;
  start: number;
  end: number;
}

export interface PoseClustersDoc {
  n_clusters: number;
  seed: number;
  palette: string[];
  clips: {
    clip: string;
    offset: number;
    selected: boolean;
    segments: SegmentDoc[];
  }[];
}

export interface CurveSampleDoc {
  frame: number;
  bar_x: number;
  bar_y: number;
  out_of_view: boolean;
}

export interface JointCurvesDoc {
  joint: number;
  joint_name: string;
  normalization: { min_x: number; max_x: number; min_y: number; max_y: number };
  clips: { clip: string; samples: CurveSampleDoc[] }[];
}

export interface PoseDoc {
  positions: number[][];
  root_rotation: number[];
}

export interface KeyposesDoc {
  clip: string;
  frames: number[];
  poses: PoseDoc[];
}

export interface PathsDoc {
  joint: number;
  joint_name: string;
  clips: { clip: string; points: number[][] }[];
}

export interface CollisionsDoc {
  events: {
    clip: string;
    joint: number;
    joint_name: string;
    object_id: string;
    frame_intervals: number[][];
  }[];
}

export interface DiffDoc {
  frame: number;
  a: string;
  b: string;
  joints: {
    joint: number;
    joint_name: string;
    pos_a: number[];
    pos_b: number[];
    distance: number;
  }[];
}

export interface FrameClipDoc {
  clip: string;
  local_frame: number;
  positions: number[][];
  root_rotation: number[];
}

export interface FrameDoc {
  frame: number;
  clips: FrameClipDoc[];
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ErrorBody | null = null;
  try {
    body = (await response.json()) as ErrorBody;
  } catch {
    // non-JSON error page; fall through
  }
  return new ApiError(
    response.status,
    body?.code ?? "http_error",
    body?.message ?? `request failed with ${response.status}`,
    body?.detail,
  );
}

export class ApiClient {
  constructor(private base = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private put<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createSession(files: File[], seed?: number): Promise<string> {
    const form = new FormData();
    for (const file of files) form.append("files", file, file.name);
    const query = seed === undefined ? "" : `?seed=${seed}`;
    const doc = await this.request<{ session_id: string }>(`/sessions${query}`, {
      method: "POST",
      body: form,
    });
    return doc.session_id;
  }

  document(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}`);
  }

  putTimeline(
    id: string,
    patch: Partial<TimelineDoc> & { rows?: Partial<ClipRowDoc>[] },
  ): Promise<TimelineDoc & { diff_reverted?: boolean }> {
    return this.put(`/sessions/${id}/timeline`, patch);
  }

  putLens(id: string, patch: Record<string, unknown>): Promise<LensDoc> {
    return this.put(`/sessions/${id}/lens`, patch);
  }

  putCamera(id: string, patch: Partial<CameraDoc>): Promise<CameraDoc> {
    return this.put(`/sessions/${id}/scene/camera`, patch);
  }

  putObjects(id: string, objects: SceneObjectDoc[]): Promise<SceneObjectDoc[]> {
    return this.put(`/sessions/${id}/scene/objects`, objects);
  }

  poseClusters(id: string): Promise<PoseClustersDoc> {
    return this.request(`/sessions/${id}/pose-clusters`);
  }

  jointCurves(id: string, joint?: string | number): Promise<JointCurvesDoc> {
    const query = joint === undefined ? "" : `?joint=${encodeURIComponent(joint)}`;
    return this.request(`/sessions/${id}/joint-curves${query}`);
  }

  keyposes(id: string, clip: string): Promise<KeyposesDoc> {
    return this.request(`/sessions/${id}/keyposes?clip=${encodeURIComponent(clip)}`);
  }

  paths(id: string, joint?: string | number): Promise<PathsDoc> {
    const query = joint === undefined ? "" : `?joint=${encodeURIComponent(joint)}`;
    return this.request(`/sessions/${id}/paths${query}`);
  }

  collisions(id: string): Promise<CollisionsDoc> {
    return this.request(`/sessions/${id}/collisions`);
  }

  diff(id: string, a: string, b: string, frame?: number): Promise<DiffDoc> {
    const extra = frame === undefined ? "" : `&frame=${frame}`;
    return this.request(
      `/sessions/${id}/diff?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}${extra}`,
    );
  }

  frame(id: string, t?: number): Promise<FrameDoc> {
    const query = t === undefined ? "" : `?t=${t}`;
    return this.request(`/sessions/${id}/frame${query}`);
  }
}
