import type {
  ActionResponse,
  EntityInfo,
  MergedSnapshot,
  SceneListing,
  SceneSnapshot,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin client over the service endpoints. It never interprets rule
 * outcomes: decisions travel through verbatim.
 */
export class ApiClient {
  private fetchImpl: FetchLike;

  constructor(
    private baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = payload && typeof payload === "object" ? (payload.error ?? "HttpError") : "HttpError";
      const message = payload && typeof payload === "object" ? (payload.message ?? text) : text;
      throw new ApiError(response.status, code, message);
    }
    return payload as T;
  }

  async login(entity: string): Promise<{ token: string; entity: string }> {
    return this.request("POST", "/login", { entity });
  }

  async entities(): Promise<EntityInfo[]> {
    const body = await this.request<{ entities: EntityInfo[] }>("GET", "/entities");
    return body.entities;
  }

  async scenes(): Promise<SceneListing[]> {
    const body = await this.request<{ scenes: SceneListing[] }>("GET", "/scenes");
    return body.scenes;
  }

  async scene(sceneId: string): Promise<SceneSnapshot> {
    return this.request("GET", `/scenes/${encodeURIComponent(sceneId)}`);
  }

  async merge(sceneIds: string[]): Promise<MergedSnapshot> {
    return this.request("POST", "/merge", { scenes: sceneIds });
  }

  async submitAction(action: {
    token: string;
    actor: string;
    verb: string;
    subject: string;
    relation: string;
    object: string;
    scene: string;
  }): Promise<ActionResponse> {
    return this.request("POST", "/actions", action);
  }
}
