/**
 * Client-side interaction telemetry.
 *
 * The recorder turns UI gestures into wire records shaped exactly like the
 * server's event log lines: `{v, ts, participant, session, action, target?,
 * duration_ms?}` with targets encoded as `kind:value` strings. Hovers are
 * timed on the client and recorded only once the dwell time reaches
 * HOVER_MIN_MS, mirroring the server-side filter so a well-behaved client
 * never has an event dropped at intake.
 */

import { HOVER_MIN_MS, HOVER_TOKENS, isKnownAction } from "./taxonomy.js";

export type TargetKind = "country" | "year" | "note" | "chart";

export interface EventRecord {
  v: number;
  ts: number;
  participant: string;
  session: string;
  action: string;
  target?: string;
  duration_ms?: number;
}

export interface EventBatch {
  events: EventRecord[];
}

export function countryTarget(code: string): string {
  return `country:${code}`;
}

export function yearTarget(year: number): string {
  return `year:${year}`;
}

export function noteTarget(noteId: string): string {
  return `note:${noteId}`;
}

export function chartTarget(chartId: string): string {
  return `chart:${chartId}`;
}

export interface RecorderOptions {
  participant: string;
  session: string;
  /** Millisecond clock; injectable for deterministic tests. */
  now?: () => number;
}

/**
 * Buffers one event per reported gesture until drained into a batch.
 *
 * `record` is for discrete gestures; `recordHover` applies the dwell-time
 * gate and reports whether the hover was kept. Unknown action tokens are
 * programming errors and throw immediately rather than being sent for the
 * server to drop.
 */
export class TelemetryRecorder {
  private readonly participant: string;
  private readonly session: string;
  private readonly now: () => number;
  private buffer: EventRecord[] = [];

  constructor(options: RecorderOptions) {
    this.participant = options.participant;
    this.session = options.session;
    this.now = options.now ?? Date.now;
  }

  record(action: string, target?: string): EventRecord {
    if (!isKnownAction(action)) {
      throw new Error(`unknown action token: ${action}`);
    }
    if (HOVER_TOKENS.has(action)) {
      throw new Error(`hover action ${action} must go through recordHover`);
    }
    return this.push(action, target);
  }

  /** Returns the record when dwell time passes the gate, null when discarded. */
  recordHover(action: string, durationMs: number, target?: string): EventRecord | null {
    if (!isKnownAction(action)) {
      throw new Error(`unknown action token: ${action}`);
    }
    if (!HOVER_TOKENS.has(action)) {
      throw new Error(`${action} is not a hover action`);
    }
    if (durationMs < HOVER_MIN_MS) {
      return null;
    }
    return this.push(action, target, durationMs);
  }

  private push(action: string, target?: string, durationMs?: number): EventRecord {
    const record: EventRecord = {
      v: 1,
      ts: this.now(),
      participant: this.participant,
      session: this.session,
      action,
    };
    if (target !== undefined) {
      record.target = target;
    }
    if (durationMs !== undefined) {
      record.duration_ms = durationMs;
    }
    this.buffer.push(record);
    return record;
  }

  get pending(): number {
    return this.buffer.length;
  }

  /** All buffered records, oldest first, without draining. */
  snapshot(): readonly EventRecord[] {
    return [...this.buffer];
  }

  /** Empties the buffer into the batch shape POST /sessions/{id}/events expects. */
  drain(): EventBatch {
    const events = this.buffer;
    this.buffer = [];
    return { events };
  }
}
