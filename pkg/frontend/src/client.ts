import type { HealthInfo, QueryRequest, QueryResponse } from "./types";

/** The service answered with an HTTP error and a reason string. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

async function toServiceError(res: Response): Promise<ServiceError> {
  let message = `request failed with status ${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body, keep the generic message
  }
  return new ServiceError(res.status, message);
}

export function createClient(baseUrl = "") {
  async function getJson<T>(path: string): Promise<T> {
    const res = await fetch(`${baseUrl}${path}`);
    if (!res.ok) throw await toServiceError(res);
    return res.json() as Promise<T>;
  }

  return {
    health: (): Promise<HealthInfo> => getJson("/api/health"),

    models: (): Promise<Record<string, unknown>> => getJson("/api/models"),

    neighbors: (id: string, k: number): Promise<QueryResponse> =>
      getJson(`/api/neighbors/${encodeURIComponent(id)}?k=${k}`),

    imageUrl: (id: string): string => `${baseUrl}/api/image/${encodeURIComponent(id)}`,

    async query(request: QueryRequest): Promise<QueryResponse> {
      const res = await fetch(`${baseUrl}/api/query`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
      });
      if (!res.ok) throw await toServiceError(res);
      return res.json() as Promise<QueryResponse>;
    },
  };
}

export type JointSpaceClient = ReturnType<typeof createClient>;

/**
 * Tokens for the one-in-flight-query rule: a response is rendered only
 * if no newer submission started while it was on the wire.
 */
export class LatestOnly {
  private current = 0;

  begin(): number {
    return ++this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}
