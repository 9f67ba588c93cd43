// Typed client for the game service's HTTP/JSON wire format.

export interface PuzzleNode {
  qubit: number;
  percent: number;
  color: string;
}

export interface PuzzleEdge {
  label: string;
  qubits: [number, number];
}

export interface Puzzle {
  round: number;
  nodes: PuzzleNode[];
  edges: PuzzleEdge[];
  replay?: boolean;
  done?: boolean;
}

export interface DeviceDoc {
  name: string;
  num_qubits: number;
  edges: PuzzleEdge[];
  layout: Record<string, [number, number]> | null;
}

export interface Feedback {
  round: number;
  success: number;
}

export interface CreateResponse {
  id: string;
  device: DeviceDoc;
  puzzle: Puzzle;
}

export interface SubmitResponse {
  puzzle: Puzzle | null;
  feedback: Feedback;
  done?: boolean;
}

export interface GameState {
  id: string;
  device: string;
  round: number;
  scores: number[];
  fuzz: number[];
  puzzle: Puzzle;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `network failure: ${String(err)}`);
  }
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message = typeof body?.error === "string" ? body.error : response.statusText;
    throw new ApiError(response.status, message);
  }
  return body as T;
}

export class GameClient {
  constructor(private base: string = "") {}

  devices(): Promise<{ devices: DeviceDoc[]; parametric_families: string[] }> {
    return request(`${this.base}/devices`);
  }

  create(body: { device?: string; seed?: number; shots?: number }): Promise<CreateResponse> {
    return request(`${this.base}/games`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  submit(id: string, labels: string[]): Promise<SubmitResponse> {
    return request(`${this.base}/games/${id}/pairing`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pairs: labels }),
    });
  }

  state(id: string): Promise<GameState> {
    return request(`${this.base}/games/${id}`);
  }
}
