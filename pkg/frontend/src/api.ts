import type { AskResponse, ChunkPreview, HealthResponse } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

/** Thin client over the QA service endpoints. The fetch implementation is
 * injectable so tests can run without a browser or server. */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON error body; fall through with null
    }
    if (!response.ok) {
      const message =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  ask(question: string): Promise<AskResponse> {
    return this.request<AskResponse>("/ask", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question }),
    });
  }

  submitFeedback(
    responseId: string,
    rating: number,
    comment?: string,
  ): Promise<{ entry_id: string }> {
    return this.request<{ entry_id: string }>("/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ response_id: responseId, rating, comment }),
    });
  }

  chunkPreview(chunkKey: string): Promise<ChunkPreview> {
    return this.request<ChunkPreview>(`/chunks/${encodeURIComponent(chunkKey)}`);
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/health");
  }
}
