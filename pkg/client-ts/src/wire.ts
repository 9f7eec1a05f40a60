/**
 * Wire types and validation for protocol version 1.
 *
 * Implements docs/wire-protocol.md independently of the game runner: the
 * SDK speaks only this encoding. Decoding is strict -- wrong lengths,
 * unknown fields, or out-of-range values are rejected with the offending
 * field named -- because a lenient agent SDK just moves the failure to
 * the runner's substitution path where it is harder to debug.
 */

export const PROTOCOL_VERSION = "1";
export const PROTO_HEADER = "X-Pommer-Proto";

// Actions.
export const STOP = 0;
export const UP = 1;
export const LEFT = 2;
export const DOWN = 3;
export const RIGHT = 4;
export const BOMB = 5;

// Cell codes.
export const CELL_PASSAGE = 0;
export const CELL_RIGID = 1;
export const CELL_WOOD = 2;
export const CELL_BOMB = 3;
export const CELL_FLAME = 4;
export const CELL_FOG = 5;
export const CELL_EXTRA_BOMB = 6;
export const CELL_BLAST_RANGE = 7;
export const CELL_CAN_KICK = 8;
export const AGENT_BASE = 10;

const LEGAL_CELL_CODES = new Set([0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13]);

export class WireFormatError extends Error {
  readonly field: string;

  constructor(field: string, message: string) {
    super(`${field}: ${message}`);
    this.field = field;
  }
}

export interface Observation {
  board: number[];
  bombBlastStrength: number[];
  bombLife: number[];
  position: [number, number];
  ammo: number;
  blastStrength: number;
  canKick: number;
  teammate: number;
  enemies: number[];
  step: number;
  /** Present only in the radio mode; words in [0, 8], (0, 0) reserved. */
  message?: [number, number];
  /** Board side length, derived from the flattened board. */
  size: number;
}

export interface AgentAction {
  action: number;
  /** Required by the protocol in the radio mode; words in [1, 8]. */
  message?: [number, number];
}

const REQUIRED_FIELDS = [
  "board",
  "bomb_blast_strength",
  "bomb_life",
  "position",
  "ammo",
  "blast_strength",
  "can_kick",
  "teammate",
  "enemies",
  "step",
];

function requireInt(value: unknown, name: string, lo?: number, hi?: number): number {
  if (typeof value !== "number" || !Number.isInteger(value)) {
    throw new WireFormatError(name, `expected an integer, got ${JSON.stringify(value)}`);
  }
  if ((lo !== undefined && value < lo) || (hi !== undefined && value > hi)) {
    throw new WireFormatError(name, `value ${value} out of range [${lo}, ${hi}]`);
  }
  return value;
}

function requireIntArray(value: unknown, name: string, length?: number): number[] {
  if (!Array.isArray(value)) {
    throw new WireFormatError(name, `expected a list, got ${typeof value}`);
  }
  if (length !== undefined && value.length !== length) {
    throw new WireFormatError(name, `expected length ${length}, got ${value.length}`);
  }
  for (const v of value) {
    requireInt(v, name);
  }
  return value as number[];
}

export function decodeObservation(payload: string | Buffer): Observation {
  let raw: unknown;
  try {
    raw = JSON.parse(typeof payload === "string" ? payload : payload.toString("utf-8"));
  } catch (err) {
    throw new WireFormatError("body", `not valid JSON: ${err}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new WireFormatError("body", "top-level value must be an object");
  }
  const obj = raw as Record<string, unknown>;

  for (const field of REQUIRED_FIELDS) {
    if (!(field in obj)) {
      throw new WireFormatError(field, "missing field");
    }
  }
  for (const key of Object.keys(obj)) {
    if (!REQUIRED_FIELDS.includes(key) && key !== "message") {
      throw new WireFormatError(key, "unknown field");
    }
  }

  const board = requireIntArray(obj.board, "board");
  const size = Math.round(Math.sqrt(board.length));
  if (size * size !== board.length || size < 5) {
    throw new WireFormatError("board", `length ${board.length} is not a square board`);
  }
  for (const v of board) {
    if (!LEGAL_CELL_CODES.has(v)) {
      throw new WireFormatError("board", `illegal cell code ${v}`);
    }
  }
  const blast = requireIntArray(obj.bomb_blast_strength, "bomb_blast_strength", board.length);
  const life = requireIntArray(obj.bomb_life, "bomb_life", board.length);
  for (const [name, values] of [
    ["bomb_blast_strength", blast],
    ["bomb_life", life],
  ] as const) {
    for (const v of values) {
      if (v < 0) throw new WireFormatError(name, `negative entry ${v}`);
    }
  }
  const position = requireIntArray(obj.position, "position", 2);
  for (const v of position) {
    requireInt(v, "position", 0, size - 1);
  }
  const enemies = requireIntArray(obj.enemies, "enemies", 3);
  for (const v of enemies) {
    requireInt(v, "enemies", -1, 3);
  }

  let message: [number, number] | undefined;
  if ("message" in obj && obj.message !== undefined && obj.message !== null) {
    const m = requireIntArray(obj.message, "message", 2);
    for (const v of m) {
      requireInt(v, "message", 0, 8);
    }
    message = [m[0], m[1]];
  }

  return {
    board,
    bombBlastStrength: blast,
    bombLife: life,
    position: [position[0], position[1]],
    ammo: requireInt(obj.ammo, "ammo", 0),
    blastStrength: requireInt(obj.blast_strength, "blast_strength", 2),
    canKick: requireInt(obj.can_kick, "can_kick", 0, 1),
    teammate: requireInt(obj.teammate, "teammate", -1, 3),
    enemies,
    step: requireInt(obj.step, "step", 0),
    message,
    size,
  };
}

/** Cell code at (row, col); rows count from the top. */
export function cellAt(obs: Observation, row: number, col: number): number {
  return obs.board[row * obs.size + col];
}

export function encodeActResponse(action: AgentAction): string {
  const body: Record<string, unknown> = { action: action.action };
  if (action.message !== undefined) {
    body.message = action.message;
  }
  return JSON.stringify(body);
}

/**
 * Clamp a policy's output into something the runner will accept: the
 * action must be an integer in [0, 5]; in the radio mode (the incoming
 * observation carried a message field) a valid two-word message in
 * [1, 8] is mandatory, so a missing or invalid one becomes [1, 1].
 */
export function sanitizeAction(raw: AgentAction | number | undefined, radio: boolean): AgentAction {
  let action = typeof raw === "number" ? raw : raw?.action;
  if (typeof action !== "number" || !Number.isInteger(action) || action < 0 || action > 5) {
    action = STOP;
  }
  const out: AgentAction = { action };
  if (radio) {
    const msg = typeof raw === "object" ? raw?.message : undefined;
    const valid =
      Array.isArray(msg) &&
      msg.length === 2 &&
      msg.every((w) => Number.isInteger(w) && w >= 1 && w <= 8);
    out.message = valid ? [msg![0], msg![1]] : [1, 1];
  }
  return out;
}
