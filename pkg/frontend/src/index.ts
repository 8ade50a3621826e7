export * from "./protocol.js";
export * from "./geometry.js";
export * from "./model.js";
export * from "./hittest.js";
export * from "./gestures.js";
export * from "./audio.js";
export * from "./render.js";
export * from "./transport.js";
export * from "./client.js";
