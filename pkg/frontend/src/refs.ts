/**
 * Entity references: the six citation kinds a note can attach.
 *
 * The wire payload is a JSON object with keys in the fixed order
 * `kind, year, countries, value, note_id`; absent fields are omitted.
 * The server stores and returns payloads in this exact shape, so the
 * client builds them canonically rather than normalizing after the fact.
 */

export const YEAR_MIN = 1960;
export const YEAR_MAX = 2013;

export const REF_KINDS = [
  "map",
  "line_chart",
  "map_point",
  "line",
  "vertical_reference_line",
  "note",
] as const;

export type RefKind = (typeof REF_KINDS)[number];

export interface EntityRef {
  readonly kind: RefKind;
  readonly year?: number;
  readonly countries?: readonly string[];
  readonly value?: number;
  readonly noteId?: string;
}

export interface RefPayload {
  kind: RefKind;
  year?: number;
  countries?: string[];
  value?: number;
  note_id?: string;
}

/** Canonical JSON object for a reference; absent payload fields are omitted. */
export function refPayload(ref: EntityRef): RefPayload {
  const payload: RefPayload = { kind: ref.kind };
  if (ref.year !== undefined) {
    payload.year = ref.year;
  }
  if (ref.countries !== undefined && ref.countries.length > 0) {
    payload.countries = [...ref.countries];
  }
  if (ref.value !== undefined) {
    payload.value = ref.value;
  }
  if (ref.noteId !== undefined) {
    payload.note_id = ref.noteId;
  }
  return payload;
}

/** Compact canonical serialization; stable byte-for-byte across clients. */
export function refWire(ref: EntityRef): string {
  return JSON.stringify(refPayload(ref));
}

export function refFromPayload(payload: RefPayload): EntityRef {
  return {
    kind: payload.kind,
    year: payload.year,
    countries: payload.countries,
    value: payload.value,
    noteId: payload.note_id,
  };
}

export interface RefVerdict {
  readonly ok: boolean;
  readonly rule?: string;
}

const OK: RefVerdict = { ok: true };

function fail(rule: string): RefVerdict {
  return { ok: false, rule };
}

/** Check the kind-specific payload invariant; returns a verdict, never throws. */
export function validateRef(ref: EntityRef): RefVerdict {
  if (!(REF_KINDS as readonly string[]).includes(ref.kind)) {
    return fail(`unknown kind '${ref.kind}'`);
  }
  const countries = ref.countries ?? [];
  if (new Set(countries).size !== countries.length) {
    return fail(`${ref.kind} countries contain duplicates`);
  }
  if (ref.year !== undefined && (ref.year < YEAR_MIN || ref.year > YEAR_MAX)) {
    return fail(`year ${ref.year} outside [${YEAR_MIN}, ${YEAR_MAX}]`);
  }
  if (ref.kind !== "note" && ref.noteId !== undefined) {
    return fail(`${ref.kind} must not carry a note_id`);
  }

  switch (ref.kind) {
    case "map":
      if (ref.year === undefined) return fail("map requires a year");
      if (countries.length > 0) return fail("map must not carry countries");
      if (ref.value !== undefined) return fail("map must not carry a value");
      break;
    case "line_chart":
      if (countries.length < 1) {
        return fail("line_chart requires at least one country");
      }
      if (ref.year !== undefined) return fail("line_chart must not carry a year");
      if (ref.value !== undefined) return fail("line_chart must not carry a value");
      break;
    case "map_point":
      if (ref.year === undefined) return fail("map_point requires a year");
      if (countries.length !== 1) {
        return fail("map_point requires exactly one country");
      }
      if (ref.value === undefined) return fail("map_point requires a value");
      break;
    case "line":
      if (countries.length !== 1) return fail("line requires exactly one country");
      if (ref.year !== undefined) return fail("line must not carry a year");
      if (ref.value !== undefined) return fail("line must not carry a value");
      break;
    case "vertical_reference_line":
      if (ref.year === undefined) {
        return fail("vertical_reference_line requires a year");
      }
      if (countries.length < 1) {
        return fail("vertical_reference_line requires at least one country");
      }
      if (ref.value !== undefined) {
        return fail("vertical_reference_line must not carry a value");
      }
      break;
    case "note":
      if (ref.noteId === undefined) return fail("note requires a note_id");
      if (ref.year !== undefined || countries.length > 0 || ref.value !== undefined) {
        return fail("note must not carry other payloads");
      }
      break;
  }
  return OK;
}

/** Two references are the same citation iff their wire forms match. */
export function sameRef(a: EntityRef, b: EntityRef): boolean {
  return refWire(a) === refWire(b);
}
