import { describe, expect, it } from "vitest";

import { buildResultView } from "../src/resultView.js";
import type { EntityRef } from "../src/refs.js";

describe("result view reconstruction", () => {
  it("merges multiple line-chart references into one chart", () => {
    const refs: EntityRef[] = [
      { kind: "line_chart", countries: ["FIN"] },
      { kind: "line_chart", countries: ["SWE"] },
    ];
    const view = buildResultView(refs);
    expect(view.lineChart.show).toBe(true);
    expect(view.lineChart.countries).toEqual(["FIN", "SWE"]);
    expect(view.map.show).toBe(false);
  });

  it("shows a single static map for one map reference, no year list", () => {
    const view = buildResultView([{ kind: "map", year: 2013 }]);
    expect(view.map.show).toBe(true);
    expect(view.map.years).toEqual([2013]);
    expect(view.map.showYearList).toBe(false);
    expect(view.lineChart.show).toBe(false);
  });

  it("adds a year list when maps from two years are cited", () => {
    const view = buildResultView([
      { kind: "map", year: 2013 },
      { kind: "map", year: 2000 },
    ]);
    expect(view.map.showYearList).toBe(true);
    expect(view.map.years).toEqual([2000, 2013]);
  });

  it("map points from various years also generate the year list", () => {
    const view = buildResultView([
      { kind: "map_point", year: 2000, countries: ["SWE"], value: 52.1 },
      { kind: "map_point", year: 2013, countries: ["SWE"], value: 37.5 },
    ]);
    expect(view.map.show).toBe(true);
    expect(view.map.showYearList).toBe(true);
    expect(view.map.years).toEqual([2000, 2013]);
    expect(view.points).toEqual([
      { country: "SWE", year: 2000, value: 52.1 },
      { country: "SWE", year: 2013, value: 37.5 },
    ]);
  });

  it("map points from one year stay a single static map", () => {
    const view = buildResultView([
      { kind: "map_point", year: 2013, countries: ["SWE"], value: 37.5 },
      { kind: "map_point", year: 2013, countries: ["FIN"], value: 45.1 },
    ]);
    expect(view.map.showYearList).toBe(false);
    expect(view.map.years).toEqual([2013]);
  });

  it("vertical references draw the black marker and their country series", () => {
    const view = buildResultView([
      { kind: "vertical_reference_line", year: 1970, countries: ["FIN", "SWE"] },
    ]);
    expect(view.lineChart.show).toBe(true);
    expect(view.lineChart.countries).toEqual(["FIN", "SWE"]);
    expect(view.lineChart.referenceYears).toEqual([1970]);
  });

  it("lines, charts, and vertical references share one merged chart", () => {
    const view = buildResultView([
      { kind: "line", countries: ["NOR"] },
      { kind: "line_chart", countries: ["FIN", "SWE"] },
      { kind: "vertical_reference_line", year: 2000, countries: ["SWE", "DNK"] },
      { kind: "vertical_reference_line", year: 1970, countries: ["FIN"] },
    ]);
    expect(view.lineChart.countries).toEqual(["NOR", "FIN", "SWE", "DNK"]);
    expect(view.lineChart.referenceYears).toEqual([1970, 2000]);
  });

  it("note references list the cited notes in citation order", () => {
    const view = buildResultView([
      { kind: "note", noteId: "note-000004" },
      { kind: "note", noteId: "note-000001" },
      { kind: "note", noteId: "note-000004" },
    ]);
    expect(view.notes).toEqual(["note-000004", "note-000001"]);
  });

  it("reconstructs a mixed reference list into both panels", () => {
    const view = buildResultView([
      { kind: "map", year: 2013 },
      { kind: "map_point", year: 2000, countries: ["SWE"], value: 52.1 },
      { kind: "line_chart", countries: ["FIN", "SWE"] },
      { kind: "vertical_reference_line", year: 1970, countries: ["FIN", "SWE"] },
      { kind: "note", noteId: "note-000002" },
    ]);
    expect(view.map.show).toBe(true);
    expect(view.map.years).toEqual([2000, 2013]);
    expect(view.map.showYearList).toBe(true);
    expect(view.lineChart.show).toBe(true);
    expect(view.lineChart.countries).toEqual(["FIN", "SWE"]);
    expect(view.lineChart.referenceYears).toEqual([1970]);
    expect(view.points).toEqual([{ country: "SWE", year: 2000, value: 52.1 }]);
    expect(view.notes).toEqual(["note-000002"]);
  });

  it("renders nothing from an empty reference list", () => {
    const view = buildResultView([]);
    expect(view.map.show).toBe(false);
    expect(view.lineChart.show).toBe(false);
    expect(view.points).toEqual([]);
    expect(view.notes).toEqual([]);
  });
});
