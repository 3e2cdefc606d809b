/**
 * Explorer view state: one user's session with the map, the line chart,
 * the year and country lists, and the note column.
 *
 * The state machine is headless; rendering layers subscribe to it. Every
 * completed user gesture routes through exactly one method here, which
 * applies the state transition and reports exactly one telemetry event.
 * Citation clicks are disambiguated from exploration clicks by citing
 * mode, active while a note draft is open; a settings toggle instead
 * requires a modifier key on citation clicks for users who prefer
 * ordinary clicks to keep their exploration meaning while drafting.
 */

import type { EntityRef } from "./refs.js";
import { refWire, sameRef, validateRef, YEAR_MAX, YEAR_MIN } from "./refs.js";
import type { EventRecord } from "./telemetry.js";
import {
  countryTarget,
  noteTarget,
  TelemetryRecorder,
  yearTarget,
} from "./telemetry.js";

/** Shown when a citation gesture has no open draft to receive the reference. */
export const CITE_TOOLTIP =
  "Open a note draft first, then click an element to cite it.";

/** Shown when the modifier-click setting is on and the modifier was not held. */
export const MODIFIER_TOOLTIP =
  "Hold the modifier key while clicking to cite this element.";

export type NotePanel = "hidden" | "list" | "discussion";

export type NoteFilter =
  | { kind: "country"; country: string }
  | { kind: "year"; year: number }
  | null;

export interface Draft {
  text: string;
  refs: EntityRef[];
  /** Set when the draft edits an existing note rather than creating one. */
  editingNoteId?: string;
}

export interface CiteOk {
  ok: true;
  ref: EntityRef;
  /** False when the identical reference was already pending. */
  added: boolean;
}

export interface CiteRejected {
  ok: false;
  tooltip: string;
}

export type CiteResult = CiteOk | CiteRejected;

/** Emission value lookup; undefined where the dataset has no value. */
export type EmissionLookup = (country: string, year: number) => number | undefined;

export interface ExplorerSettings {
  /** When true, citation clicks need a held modifier instead of citing mode alone. */
  citeRequiresModifier: boolean;
}

export interface ExplorerOptions {
  recorder: TelemetryRecorder;
  emissions?: EmissionLookup;
  initialYear?: number;
  settings?: Partial<ExplorerSettings>;
}

export interface ClickOptions {
  /** Whether the modifier key was held during the click. */
  modifier?: boolean;
}

const NO_VALUE: EmissionLookup = () => undefined;

export class ExplorerState {
  private readonly recorder: TelemetryRecorder;
  private readonly emissions: EmissionLookup;
  readonly settings: ExplorerSettings;

  private year: number;
  private countries: string[] = [];
  private playingAnimation = false;
  private panel: NotePanel = "hidden";
  private filter: NoteFilter = null;
  private mineOnly = false;
  private currentDraft: Draft | null = null;

  constructor(options: ExplorerOptions) {
    this.recorder = options.recorder;
    this.emissions = options.emissions ?? NO_VALUE;
    this.settings = { citeRequiresModifier: false, ...options.settings };
    this.year = options.initialYear ?? YEAR_MAX;
    this.assertYear(this.year);
  }

  // ---- read-only view ----

  get selectedYear(): number {
    return this.year;
  }

  /** The red vertical line in the line chart always marks the selected year. */
  get redIndicatorYear(): number {
    return this.year;
  }

  get selectedCountries(): readonly string[] {
    return [...this.countries];
  }

  get playing(): boolean {
    return this.playingAnimation;
  }

  get notePanel(): NotePanel {
    return this.panel;
  }

  get noteFilter(): NoteFilter {
    return this.filter;
  }

  get showOnlyMine(): boolean {
    return this.mineOnly;
  }

  get draft(): Draft | null {
    return this.currentDraft;
  }

  /** Citing mode: visual elements produce references while a draft is open. */
  get citing(): boolean {
    return this.currentDraft !== null;
  }

  // ---- data exploration gestures ----

  selectCountry(code: string): void {
    if (!this.countries.includes(code)) {
      this.countries.push(code);
    }
    this.recorder.record("select_country", countryTarget(code));
  }

  deselectCountry(code: string): void {
    this.countries = this.countries.filter((c) => c !== code);
    this.recorder.record("deselect_country", countryTarget(code));
  }

  deselectAllCountries(): void {
    this.countries = [];
    this.recorder.record("deselect_all_countries");
  }

  selectYear(year: number): void {
    this.assertYear(year);
    this.year = year;
    this.recorder.record("select_year", yearTarget(year));
  }

  play(): void {
    this.playingAnimation = true;
    this.recorder.record("play");
  }

  stopPlayback(): void {
    this.playingAnimation = false;
    this.recorder.record("stop");
  }

  hoverCountry(code: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_country", dwellMs, countryTarget(code));
  }

  hoverYear(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_year", dwellMs, yearTarget(year));
  }

  hoverMapPoint(code: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_map_point", dwellMs, countryTarget(code));
  }

  hoverLine(code: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_line", dwellMs, countryTarget(code));
  }

  hoverYearArea(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_year_area", dwellMs, yearTarget(year));
  }

  hoverVerticalLine(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_vertical_line", dwellMs, yearTarget(year));
  }

  // ---- note exploration gestures ----

  showNotes(): void {
    this.panel = "list";
    this.recorder.record("show_notes");
  }

  hideNotes(): void {
    this.panel = "hidden";
    this.recorder.record("hide_notes");
  }

  showOnlyMyNotes(): void {
    this.mineOnly = true;
    this.recorder.record("show_only_my_notes");
  }

  showPublicNotes(): void {
    this.mineOnly = false;
    this.recorder.record("show_public_notes");
  }

  viewNotesOfCountry(code: string): void {
    this.panel = "list";
    this.filter = { kind: "country", country: code };
    this.recorder.record("view_notes_of_country", countryTarget(code));
  }

  viewNotesOfYear(year: number): void {
    this.assertYear(year);
    this.panel = "list";
    this.filter = { kind: "year", year };
    this.recorder.record("view_notes_of_year", yearTarget(year));
  }

  removeNoteFilter(): void {
    this.filter = null;
    this.recorder.record("remove_note_filter");
  }

  viewDiscussions(noteId: string): void {
    this.panel = "discussion";
    this.recorder.record("view_discussions", noteTarget(noteId));
  }

  removeDiscussionFilter(): void {
    this.panel = "list";
    this.recorder.record("remove_discussion_filter");
  }

  dragNode(noteId: string): void {
    this.recorder.record("drag_node", noteTarget(noteId));
  }

  scrollNoteIntoView(noteId: string): void {
    this.recorder.record("scroll_note_into_view", noteTarget(noteId));
  }

  hoverNoteText(noteId: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_note_text", dwellMs, noteTarget(noteId));
  }

  hoverReferredNote(noteId: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_referred_note", dwellMs, noteTarget(noteId));
  }

  hoverNode(noteId: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_node", dwellMs, noteTarget(noteId));
  }

  // attached visualization of a note: same interactions, note_* tokens

  noteSelectYear(year: number): void {
    this.assertYear(year);
    this.recorder.record("note_select_year", yearTarget(year));
  }

  notePlay(): void {
    this.recorder.record("note_play");
  }

  noteStop(): void {
    this.recorder.record("note_stop");
  }

  noteHoverYear(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("note_hover_year", dwellMs, yearTarget(year));
  }

  noteHoverMapPoint(code: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("note_hover_map_point", dwellMs, countryTarget(code));
  }

  noteHoverLine(code: string, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("note_hover_line", dwellMs, countryTarget(code));
  }

  noteHoverYearArea(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("note_hover_year_area", dwellMs, yearTarget(year));
  }

  noteHoverVerticalLine(year: number, dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("note_hover_vertical_line", dwellMs, yearTarget(year));
  }

  // ---- note editing gestures ----

  openNoteInput(): void {
    if (this.currentDraft !== null) {
      throw new Error("a draft is already open");
    }
    this.currentDraft = { text: "", refs: [] };
    this.recorder.record("open_note_input");
  }

  openNoteEditing(noteId: string, text: string, refs: readonly EntityRef[]): void {
    if (this.currentDraft !== null) {
      throw new Error("a draft is already open");
    }
    this.currentDraft = { text, refs: [...refs], editingNoteId: noteId };
    this.recorder.record("open_note_editing", noteTarget(noteId));
  }

  cancelNoteInput(): void {
    this.requireDraft();
    this.currentDraft = null;
    this.recorder.record("cancel_note_input");
  }

  /** Text entry is not a vocabulary action; the text travels with the save. */
  setDraftText(text: string): void {
    this.requireDraft().text = text;
  }

  hoverTextArea(dwellMs: number): EventRecord | null {
    return this.recorder.recordHover("hover_text_area", dwellMs);
  }

  hoverReferredEntity(index: number, dwellMs: number): EventRecord | null {
    const draft = this.requireDraft();
    const ref = draft.refs[index];
    if (ref === undefined) {
      throw new RangeError(`no pending reference at index ${index}`);
    }
    return this.recorder.recordHover(
      "hover_referred_entity",
      dwellMs,
      refTarget(ref),
    );
  }

  // ---- citation gestures (the six entity kinds) ----

  /** Cite the map as shown: the current year's choropleth. */
  citeMap(click: ClickOptions = {}): CiteResult {
    return this.cite({ kind: "map", year: this.year }, click);
  }

  /** Cite the line chart: all currently selected countries. */
  citeLineChart(click: ClickOptions = {}): CiteResult {
    return this.cite(
      { kind: "line_chart", countries: [...this.countries] },
      click,
    );
  }

  /** Cite one country on the map: pins (country, year, value). */
  citeMapPoint(code: string, click: ClickOptions = {}): CiteResult {
    return this.cite(
      {
        kind: "map_point",
        year: this.year,
        countries: [code],
        value: this.emissions(code, this.year),
      },
      click,
    );
  }

  /** Cite one country's whole series by clicking its line. */
  citeLine(code: string, click: ClickOptions = {}): CiteResult {
    return this.cite({ kind: "line", countries: [code] }, click);
  }

  /** Cite one year across the selected countries by clicking the black line. */
  citeVerticalLine(year: number, click: ClickOptions = {}): CiteResult {
    return this.cite(
      { kind: "vertical_reference_line", year, countries: [...this.countries] },
      click,
    );
  }

  /**
   * Cite a prior note via its quote icon. With no draft open this is the
   * reply gesture: it opens a fresh draft carrying the note reference.
   */
  citeNote(noteId: string, click: ClickOptions = {}): CiteResult {
    const ref: EntityRef = { kind: "note", noteId };
    if (this.currentDraft === null) {
      const verdict = validateRef(ref);
      if (!verdict.ok) {
        return { ok: false, tooltip: verdict.rule ?? "invalid reference" };
      }
      this.currentDraft = { text: "", refs: [ref] };
      this.recorder.record("reply_to_note", noteTarget(noteId));
      return { ok: true, ref, added: true };
    }
    return this.cite(ref, click);
  }

  removeEntity(index: number): EntityRef {
    const draft = this.requireDraft();
    const ref = draft.refs[index];
    if (ref === undefined) {
      throw new RangeError(`no pending reference at index ${index}`);
    }
    draft.refs.splice(index, 1);
    this.recorder.record("remove_entity", refTarget(ref));
    return ref;
  }

  /**
   * Drop one country from a pending line-chart or vertical-line reference;
   * the removal affordance exists only on those two kinds, and never takes
   * the last country (an empty reference would be invalid).
   */
  removeCountryFromRef(index: number, code: string): CiteResult {
    const draft = this.requireDraft();
    const ref = draft.refs[index];
    if (ref === undefined) {
      throw new RangeError(`no pending reference at index ${index}`);
    }
    if (ref.kind !== "line_chart" && ref.kind !== "vertical_reference_line") {
      return { ok: false, tooltip: `${ref.kind} references have no removable countries` };
    }
    const countries = ref.countries ?? [];
    if (!countries.includes(code)) {
      return { ok: false, tooltip: `${code} is not part of this reference` };
    }
    if (countries.length === 1) {
      return { ok: false, tooltip: "a reference needs at least one country" };
    }
    const trimmed: EntityRef = {
      ...ref,
      countries: countries.filter((c) => c !== code),
    };
    draft.refs[index] = trimmed;
    const token =
      ref.kind === "line_chart"
        ? "remove_country_from_line_chart_ref"
        : "remove_country_from_vline_ref";
    this.recorder.record(token, countryTarget(code));
    return { ok: true, ref: trimmed, added: false };
  }

  /**
   * Validated draft contents for publication. Pending references are
   * checked once more and at least one must be present; the note id is
   * unknown until the server assigns one, so closing the draft happens
   * in completeSave once publication succeeded.
   */
  draftForPublish(): Draft {
    const draft = this.requireDraft();
    if (draft.refs.length === 0) {
      throw new Error("a note needs at least one reference");
    }
    for (const ref of draft.refs) {
      const verdict = validateRef(ref);
      if (!verdict.ok) {
        throw new Error(`invalid pending reference: ${verdict.rule}`);
      }
    }
    return { ...draft, refs: [...draft.refs] };
  }

  /** Close the draft after the server stored it under noteId. */
  completeSave(noteId: string): void {
    const draft = this.requireDraft();
    const token = draft.editingNoteId === undefined ? "save_note" : "update_note";
    this.currentDraft = null;
    this.recorder.record(token, noteTarget(noteId));
  }

  deleteNote(noteId: string): void {
    this.recorder.record("delete_note", noteTarget(noteId));
  }

  // ---- session bookkeeping gestures ----

  startSession(): void {
    this.recorder.record("start_session");
  }

  activateWindow(): void {
    this.recorder.record("activate_window");
  }

  deactivateWindow(): void {
    this.recorder.record("deactivate_window");
  }

  checkTutorial(): void {
    this.recorder.record("check_tutorial");
  }

  checkTask(): void {
    this.recorder.record("check_task");
  }

  checkQuestionnaire(): void {
    this.recorder.record("check_questionnaire");
  }

  goToQuestionnaire(): void {
    this.recorder.record("go_to_questionnaire");
  }

  // ---- internals ----

  private cite(ref: EntityRef, click: ClickOptions): CiteResult {
    const draft = this.currentDraft;
    if (draft === null) {
      return { ok: false, tooltip: CITE_TOOLTIP };
    }
    if (this.settings.citeRequiresModifier && click.modifier !== true) {
      return { ok: false, tooltip: MODIFIER_TOOLTIP };
    }
    const verdict = validateRef(ref);
    if (!verdict.ok) {
      return { ok: false, tooltip: verdict.rule ?? "invalid reference" };
    }
    const repeat = draft.refs.some((pending) => sameRef(pending, ref));
    if (repeat) {
      this.recorder.record("add_entity_repeatedly", refTarget(ref));
      return { ok: true, ref, added: false };
    }
    draft.refs.push(ref);
    this.recorder.record("add_entity", refTarget(ref));
    return { ok: true, ref, added: true };
  }

  private requireDraft(): Draft {
    if (this.currentDraft === null) {
      throw new Error("no draft is open");
    }
    return this.currentDraft;
  }

  private assertYear(year: number): void {
    if (!Number.isInteger(year) || year < YEAR_MIN || year > YEAR_MAX) {
      throw new RangeError(`year ${year} outside [${YEAR_MIN}, ${YEAR_MAX}]`);
    }
  }
}

/** Most specific event target for a reference-directed gesture. */
function refTarget(ref: EntityRef): string | undefined {
  const first = ref.countries?.[0];
  if (first !== undefined) {
    return countryTarget(first);
  }
  if (ref.year !== undefined) {
    return yearTarget(ref.year);
  }
  if (ref.noteId !== undefined) {
    return noteTarget(ref.noteId);
  }
  return undefined;
}

export { refWire };
