export * from "./taxonomy.js";
export * from "./refs.js";
export * from "./telemetry.js";
export * from "./state.js";
export * from "./resultView.js";
export * from "./api.js";
