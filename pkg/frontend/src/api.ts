/**
 * HTTP client for the note service.
 *
 * One static bearer token authenticates the deployment; the participant
 * identity rides in the X-Participant header. All responses carry a
 * schema_version field, and errors come back as JSON objects with an
 * `error` message, surfaced here as ApiError.
 */

import type { RefPayload } from "./refs.js";
import type { EventBatch } from "./telemetry.js";

export interface NoteWire {
  id: string;
  author: string;
  text: string;
  refs: RefPayload[];
  created_at: number;
  updated_at: number;
  labels: Record<string, unknown>;
}

export interface SessionReply {
  session_id: string;
  participant: string;
}

export interface IntakeReply {
  accepted: number;
  dropped: number;
}

export interface DiscussionReply {
  root: string;
  notes: NoteWire[];
  links: { from: string; to: string }[];
}

export interface ScentReply {
  countries: Record<string, number>;
  years: Record<string, number>;
}

export interface CharacterizeReply {
  classes: string[];
  probabilities: number[];
  predicted: string;
  kappa_band: string | null;
}

export interface RecommendReply {
  mode: string;
  k: number;
  predicted: string;
  notes: NoteWire[];
}

export interface TaxonomyReply {
  version: number;
  checksum: string;
  actions: { token: string; group: string; flags: string[] }[];
}

export interface NoteDraftWire {
  text: string;
  refs: RefPayload[];
  labels?: Record<string, unknown>;
}

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export interface ClientOptions {
  baseUrl: string;
  participant: string;
  token?: string;
  fetchImpl?: typeof fetch;
}

export class ExplorerApi {
  private readonly baseUrl: string;
  private readonly participant: string;
  private readonly token: string | undefined;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.participant = options.participant;
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  async createSession(sessionId?: string): Promise<SessionReply> {
    return this.call("POST", "/sessions", sessionId ? { session_id: sessionId } : {});
  }

  async sendEvents(sessionId: string, batch: EventBatch): Promise<IntakeReply> {
    return this.call("POST", `/sessions/${encodeURIComponent(sessionId)}/events`, batch);
  }

  async createNote(draft: NoteDraftWire): Promise<NoteWire> {
    const reply = await this.call<{ note: NoteWire }>("POST", "/notes", draft);
    return reply.note;
  }

  async listNotes(filters: { country?: string; year?: number; mineOnly?: boolean } = {}): Promise<NoteWire[]> {
    const params = new URLSearchParams();
    if (filters.country !== undefined) params.set("country", filters.country);
    if (filters.year !== undefined) params.set("year", String(filters.year));
    if (filters.mineOnly) params.set("mine_only", "true");
    const query = params.size > 0 ? `?${params.toString()}` : "";
    const reply = await this.call<{ notes: NoteWire[] }>("GET", `/notes${query}`);
    return reply.notes;
  }

  async getNote(noteId: string): Promise<NoteWire> {
    const reply = await this.call<{ note: NoteWire }>(
      "GET",
      `/notes/${encodeURIComponent(noteId)}`,
    );
    return reply.note;
  }

  async updateNote(noteId: string, changes: Partial<NoteDraftWire>): Promise<NoteWire> {
    const reply = await this.call<{ note: NoteWire }>(
      "PUT",
      `/notes/${encodeURIComponent(noteId)}`,
      changes,
    );
    return reply.note;
  }

  async deleteNote(noteId: string): Promise<void> {
    await this.call("DELETE", `/notes/${encodeURIComponent(noteId)}`);
  }

  async discussion(noteId: string): Promise<DiscussionReply> {
    return this.call("GET", `/notes/${encodeURIComponent(noteId)}/discussion`);
  }

  async scent(): Promise<ScentReply> {
    return this.call("GET", "/scent");
  }

  async characterize(features: Record<string, number>): Promise<CharacterizeReply> {
    return this.call("POST", "/characterize", { features });
  }

  async recommend(mode: "similar" | "diverse", k = 5): Promise<RecommendReply> {
    return this.call("GET", `/recommend?mode=${mode}&k=${k}`);
  }

  async taxonomy(): Promise<TaxonomyReply> {
    return this.call("GET", "/taxonomy");
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {
      "X-Participant": this.participant,
    };
    if (this.token !== undefined) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      const message =
        typeof payload.error === "string" ? payload.error : response.statusText;
      throw new ApiError(response.status, message);
    }
    return payload as T;
  }
}
