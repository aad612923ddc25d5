/** Typed client for the melodyscope HTTP API. */

import type {
  ApplyResponse,
  AvailabilityWire,
  AnnotationWire,
  OperatorCode,
  ScoreMeta,
  ScoreRender,
  SelectionResponse,
  SessionDoc,
  StatsWire,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  listScores(): Promise<ScoreMeta[]> {
    return this.json("GET", "/scores");
  }

  getScore(scoreId: string): Promise<ScoreRender> {
    return this.json("GET", `/scores/${encodeURIComponent(scoreId)}`);
  }

  async createSession(scoreId: string): Promise<string> {
    const body = await this.json<{ session_id: string }>("POST", "/sessions", {
      score_id: scoreId,
    });
    return body.session_id;
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.json("GET", `/sessions/${sessionId}`);
  }

  select(
    sessionId: string,
    voice: string,
    firstNoteId: string,
    lastNoteId: string,
  ): Promise<SelectionResponse> {
    return this.json("POST", `/sessions/${sessionId}/selections`, {
      voice,
      first_note_id: firstNoteId,
      last_note_id: lastNoteId,
    });
  }

  operators(sessionId: string, nodeId: string): Promise<AvailabilityWire> {
    return this.json("GET", `/sessions/${sessionId}/nodes/${nodeId}/operators`);
  }

  apply(
    sessionId: string,
    nodeId: string,
    operator: OperatorCode,
  ): Promise<ApplyResponse> {
    return this.json("POST", `/sessions/${sessionId}/nodes/${nodeId}/apply`, {
      operator,
    });
  }

  annotate(
    sessionId: string,
    setId: string,
    patch: Partial<AnnotationWire>,
  ): Promise<AnnotationWire> {
    return this.json("PATCH", `/sessions/${sessionId}/sets/${setId}`, patch);
  }

  deleteSet(sessionId: string, setId: string): Promise<{ removed: string[] }> {
    return this.json("DELETE", `/sessions/${sessionId}/sets/${setId}`);
  }

  stats(sessionId: string, setId: string): Promise<StatsWire> {
    return this.json("GET", `/sessions/${sessionId}/sets/${setId}/stats`);
  }

  async heatmapCsv(sessionId: string): Promise<string> {
    const response = await this.request(
      "GET",
      `/sessions/${sessionId}/heatmap?format=csv`,
    );
    return response.text();
  }

  async graphDot(sessionId: string): Promise<string> {
    const response = await this.request(
      "GET",
      `/sessions/${sessionId}/graph?format=dot`,
    );
    return response.text();
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.request(method, path, body);
    return (await response.json()) as T;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `${method} ${path} failed with ${response.status}`;
      try {
        const payload = (await response.json()) as { code?: string; message?: string };
        code = payload.code ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }
}
