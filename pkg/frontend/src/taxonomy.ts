/**
 * Action vocabulary for the explorer client.
 *
 * Every user gesture the client reports maps to exactly one of these 55
 * tokens. The list mirrors the server's versioned taxonomy file; the
 * checksum is computed over the same canonical serialization (a
 * `version=N` line followed by `token|group|flags` lines sorted by token,
 * joined with newlines, hashed with SHA-256) so client and server can
 * verify they speak the same vocabulary before streaming events.
 */

import { createHash } from "node:crypto";

export type ActionGroup =
  | "data-exploration"
  | "note-exploration"
  | "edit"
  | "other";

export type ActionFlag = "personality" | "characterization" | "hover";

export interface ActionType {
  readonly token: string;
  readonly group: ActionGroup;
  readonly flags: readonly ActionFlag[];
}

export const TAXONOMY_VERSION = 1;

/** Expected digest of the canonical serialization below. */
export const TAXONOMY_CHECKSUM =
  "9babba162cbc05f72f658c4a7d829843f32bb956f9f6c1dd39cac43239b15bf6";

const PC: readonly ActionFlag[] = ["personality", "characterization"];
const HPC: readonly ActionFlag[] = ["hover", "personality", "characterization"];
const P: readonly ActionFlag[] = ["personality"];
const NONE: readonly ActionFlag[] = [];

function entry(token: string, group: ActionGroup, flags: readonly ActionFlag[]): ActionType {
  return { token, group, flags };
}

/** The 55 canonical actions, in vocabulary order. */
export const ACTIONS: readonly ActionType[] = [
  // data exploration (12)
  entry("select_country", "data-exploration", PC),
  entry("deselect_country", "data-exploration", PC),
  entry("deselect_all_countries", "data-exploration", PC),
  entry("hover_country", "data-exploration", HPC),
  entry("select_year", "data-exploration", PC),
  entry("hover_year", "data-exploration", HPC),
  entry("play", "data-exploration", PC),
  entry("stop", "data-exploration", NONE),
  entry("hover_map_point", "data-exploration", HPC),
  entry("hover_line", "data-exploration", HPC),
  entry("hover_year_area", "data-exploration", HPC),
  entry("hover_vertical_line", "data-exploration", HPC),
  // note exploration (22)
  entry("show_notes", "note-exploration", PC),
  entry("hide_notes", "note-exploration", P),
  entry("show_only_my_notes", "note-exploration", P),
  entry("show_public_notes", "note-exploration", P),
  entry("view_notes_of_country", "note-exploration", PC),
  entry("view_notes_of_year", "note-exploration", PC),
  entry("remove_note_filter", "note-exploration", PC),
  entry("hover_note_text", "note-exploration", HPC),
  entry("hover_referred_note", "note-exploration", HPC),
  entry("note_select_year", "note-exploration", PC),
  entry("note_hover_year", "note-exploration", HPC),
  entry("note_play", "note-exploration", PC),
  entry("note_stop", "note-exploration", NONE),
  entry("note_hover_map_point", "note-exploration", HPC),
  entry("note_hover_line", "note-exploration", HPC),
  entry("note_hover_year_area", "note-exploration", HPC),
  entry("note_hover_vertical_line", "note-exploration", HPC),
  entry("view_discussions", "note-exploration", PC),
  entry("remove_discussion_filter", "note-exploration", NONE),
  entry("drag_node", "note-exploration", PC),
  entry("hover_node", "note-exploration", ["hover"]),
  entry("scroll_note_into_view", "note-exploration", PC),
  // edit (14)
  entry("open_note_input", "edit", P),
  entry("reply_to_note", "edit", PC),
  entry("save_note", "edit", P),
  entry("cancel_note_input", "edit", P),
  entry("open_note_editing", "edit", P),
  entry("update_note", "edit", PC),
  entry("delete_note", "edit", P),
  entry("hover_text_area", "edit", HPC),
  entry("hover_referred_entity", "edit", HPC),
  entry("add_entity", "edit", PC),
  entry("add_entity_repeatedly", "edit", P),
  entry("remove_entity", "edit", PC),
  entry("remove_country_from_vline_ref", "edit", PC),
  entry("remove_country_from_line_chart_ref", "edit", PC),
  // other (7)
  entry("start_session", "other", NONE),
  entry("deactivate_window", "other", NONE),
  entry("activate_window", "other", P),
  entry("check_tutorial", "other", P),
  entry("check_task", "other", P),
  entry("check_questionnaire", "other", P),
  entry("go_to_questionnaire", "other", NONE),
];

const BY_TOKEN: ReadonlyMap<string, ActionType> = new Map(
  ACTIONS.map((a) => [a.token, a]),
);

export function isKnownAction(token: string): boolean {
  return BY_TOKEN.has(token);
}

export function actionOf(token: string): ActionType {
  const action = BY_TOKEN.get(token);
  if (action === undefined) {
    throw new Error(`unknown action token: ${token}`);
  }
  return action;
}

/** Tokens for timed mouse-overs, subject to the minimum-dwell filter. */
export const HOVER_TOKENS: ReadonlySet<string> = new Set(
  ACTIONS.filter((a) => a.flags.includes("hover")).map((a) => a.token),
);

/** Minimum dwell time before a hover is worth reporting, in milliseconds. */
export const HOVER_MIN_MS = 3000;

/**
 * SHA-256 over the canonical serialization shared with the server.
 * Must equal both TAXONOMY_CHECKSUM and the value GET /taxonomy reports.
 */
export function taxonomyChecksum(
  actions: readonly ActionType[] = ACTIONS,
  version: number = TAXONOMY_VERSION,
): string {
  const lines = [`version=${version}`];
  const sorted = [...actions].sort((a, b) => (a.token < b.token ? -1 : 1));
  for (const a of sorted) {
    lines.push(`${a.token}|${a.group}|${[...a.flags].sort().join(",")}`);
  }
  return createHash("sha256").update(lines.join("\n"), "utf-8").digest("hex");
}

function assertVocabulary(): void {
  if (ACTIONS.length !== 55) {
    throw new Error(`expected 55 actions, got ${ACTIONS.length}`);
  }
  if (BY_TOKEN.size !== ACTIONS.length) {
    throw new Error("action tokens are not unique");
  }
  const sizes: Record<ActionGroup, number> = {
    "data-exploration": 12,
    "note-exploration": 22,
    edit: 14,
    other: 7,
  };
  for (const [group, want] of Object.entries(sizes)) {
    const got = ACTIONS.filter((a) => a.group === group).length;
    if (got !== want) {
      throw new Error(`group ${group} must have ${want} actions, got ${got}`);
    }
  }
  const digest = taxonomyChecksum();
  if (digest !== TAXONOMY_CHECKSUM) {
    throw new Error(
      `vocabulary drifted: checksum ${digest} != ${TAXONOMY_CHECKSUM}`,
    );
  }
}

assertVocabulary();
