import { afterEach, describe, expect, it, vi } from "vitest";
import { createClient, LatestOnly, ServiceError } from "../src/client";
import type { QueryRequest } from "../src/types";
import fixture from "./fixtures/ranked_query.json";

const recordedRequest = fixture.request as QueryRequest;

function jsonResponse(status: number, body: unknown) {
  return { ok: status < 400, status, json: async () => body };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("query calls", () => {
  it("POSTs the request body as JSON to /api/query", async () => {
    const fetchStub = vi.fn(async (_url: string, _init?: RequestInit) =>
      jsonResponse(200, fixture.response),
    );
    vi.stubGlobal("fetch", fetchStub);

    const got = await createClient().query(recordedRequest);
    expect(got.results.map((r) => r.id)).toEqual(fixture.response.results.map((r) => r.id));

    expect(fetchStub).toHaveBeenCalledTimes(1);
    expect(fetchStub.mock.calls[0][0]).toBe("/api/query");
    const init = fetchStub.mock.calls[0][1]!;
    expect(init.method).toBe("POST");
    expect((init.headers as Record<string, string>)["Content-Type"]).toBe("application/json");
    expect(JSON.parse(init.body as string)).toEqual(fixture.request);
  });

  it("surfaces the service's reason for a 400", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(400, { error: "text term 'zzz' has no known word" })),
    );
    const err = await createClient()
      .query({ terms: [{ type: "text", value: "zzz", weight: 1 }], k: 4 })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.status).toBe(400);
    expect(err.message).toBe("text term 'zzz' has no known word");
  });

  it("falls back to a generic message for non-JSON error bodies", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 500,
        json: async () => {
          throw new Error("not json");
        },
      })),
    );
    const err = await createClient().health().catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.message).toBe("request failed with status 500");
  });

  it("lets transport failures propagate untouched", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    );
    const err = await createClient().query(recordedRequest).catch((e) => e);
    expect(err).toBeInstanceOf(TypeError);
    expect(err).not.toBeInstanceOf(ServiceError);
  });
});

describe("addressing", () => {
  it("URL-encodes item ids", async () => {
    const fetchStub = vi.fn(async (_url: string) => jsonResponse(200, { results: [] }));
    vi.stubGlobal("fetch", fetchStub);
    await createClient().neighbors("img 01/a", 5);
    expect(fetchStub.mock.calls[0][0]).toBe("/api/neighbors/img%2001%2Fa?k=5");
  });

  it("builds image URLs against the configured base", () => {
    expect(createClient("http://x").imageUrl("img 01")).toBe("http://x/api/image/img%2001");
  });
});

describe("one query in flight", () => {
  it("only the newest token stays current", () => {
    const gate = new LatestOnly();
    const first = gate.begin();
    const second = gate.begin();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });

  it("discards an older response that lands after a newer one", async () => {
    const gate = new LatestOnly();
    const rendered: string[] = [];
    const respond = async (token: number, payload: string, wait: Promise<void>) => {
      await wait;
      if (!gate.isCurrent(token)) return;
      rendered.push(payload);
    };
    let releaseSlow!: () => void;
    const slow = new Promise<void>((resolve) => (releaseSlow = resolve));
    const stale = respond(gate.begin(), "stale", slow);
    const fresh = respond(gate.begin(), "fresh", Promise.resolve());
    await fresh;
    releaseSlow();
    await stale;
    expect(rendered).toEqual(["fresh"]);
  });
});
