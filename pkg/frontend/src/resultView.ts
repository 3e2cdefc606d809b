/**
 * Result view reconstruction: what a published note renders from its
 * references.
 *
 * Map and map-point references put the choropleth back on screen; when
 * they span more than one year, a navigable year list appears so the
 * reader can step through them. All line-bearing references (line chart,
 * single line, vertical reference line) merge into one line chart whose
 * series are the union of the referred countries; vertical references
 * additionally draw their black year marker.
 */

import type { EntityRef } from "./refs.js";

export interface CitedPoint {
  country: string;
  year: number;
  value?: number;
}

export interface ResultView {
  map: {
    show: boolean;
    /** Distinct years cited via map or map-point references, ascending. */
    years: number[];
    /** Year navigation appears only when more than one year is cited. */
    showYearList: boolean;
  };
  lineChart: {
    show: boolean;
    /** Union of referred countries, in first-citation order. */
    countries: string[];
    /** Black vertical markers from vertical-reference-line citations. */
    referenceYears: number[];
  };
  /** Individual (country, year, value) pins, in citation order. */
  points: CitedPoint[];
  /** Cited prior notes, in citation order. */
  notes: string[];
}

export function buildResultView(refs: readonly EntityRef[]): ResultView {
  const mapYears = new Set<number>();
  const chartCountries: string[] = [];
  const referenceYears = new Set<number>();
  const points: CitedPoint[] = [];
  const notes: string[] = [];
  let showMap = false;
  let showChart = false;

  const addSeries = (countries: readonly string[] | undefined) => {
    for (const code of countries ?? []) {
      if (!chartCountries.includes(code)) {
        chartCountries.push(code);
      }
    }
  };

  for (const ref of refs) {
    switch (ref.kind) {
      case "map":
        showMap = true;
        if (ref.year !== undefined) {
          mapYears.add(ref.year);
        }
        break;
      case "map_point": {
        showMap = true;
        const country = ref.countries?.[0];
        if (ref.year !== undefined && country !== undefined) {
          mapYears.add(ref.year);
          points.push({ country, year: ref.year, value: ref.value });
        }
        break;
      }
      case "line_chart":
      case "line":
        showChart = true;
        addSeries(ref.countries);
        break;
      case "vertical_reference_line":
        showChart = true;
        addSeries(ref.countries);
        if (ref.year !== undefined) {
          referenceYears.add(ref.year);
        }
        break;
      case "note":
        if (ref.noteId !== undefined && !notes.includes(ref.noteId)) {
          notes.push(ref.noteId);
        }
        break;
    }
  }

  const years = [...mapYears].sort((a, b) => a - b);
  return {
    map: { show: showMap, years, showYearList: years.length > 1 },
    lineChart: {
      show: showChart,
      countries: chartCountries,
      referenceYears: [...referenceYears].sort((a, b) => a - b),
    },
    points,
    notes,
  };
}
