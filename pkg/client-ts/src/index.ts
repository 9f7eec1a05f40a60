export * from "./wire.js";
export * from "./rng.js";
export * from "./agent.js";
export * from "./server.js";
