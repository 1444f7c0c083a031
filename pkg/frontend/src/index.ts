export * from "./types.js";
export * from "./filter.js";
export * from "./api.js";
export * from "./viewmodel.js";
export * from "./layout.js";
export * from "./render.js";
