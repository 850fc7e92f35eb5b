/**
 * Payload schemas for the game service and their validation.
 *
 * Every payload the explorer consumes passes through a validator; a
 * mismatch raises SchemaError, which the shell turns into an error banner
 * (never a silent failure).
 */

export class SchemaError extends Error {}

export interface StructureDoc {
  signature: Record<string, number>;
  universe: string[];
  relations: Record<string, string[][]>;
}

export interface Status {
  state: "ongoing" | "finished";
  label: string;
  verdict?: string;
  inRounds?: number;
  winner?: string | null;
  reason?: string | null;
}

export interface PendingInfo {
  side: "left" | "right";
  quantifier: string;
  witness: string[][];
  response: string[][];
}

export interface HistoryEntry {
  player: 1 | 2;
  move: string;
  side?: string;
  quantifier?: string;
  witness?: string[][];
  tuple?: string[];
  detail?: string;
}

export interface RelationSummary {
  positions: number;
  levelSizes: number[];
  stabilized: boolean;
  stabilizationIndex: number | null;
}

export interface SessionPayload {
  id: string;
  k: number;
  quantifiers: string[];
  rounds: number | null;
  roundsLeft: number | null;
  left: StructureDoc;
  right: StructureDoc;
  position: { alpha: string[]; beta: string[] };
  phase: "awaiting_witness" | "awaiting_challenge" | "finished";
  pending: PendingInfo | null;
  history: HistoryEntry[];
  status: Status;
  relationSummary: RelationSummary;
  request?: unknown;
}

export interface ApiError {
  code: string;
  message: string;
}

function fail(path: string, expected: string): never {
  throw new SchemaError(`payload mismatch at ${path}: expected ${expected}`);
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function checkTupleList(x: unknown, path: string): string[][] {
  if (!Array.isArray(x)) fail(path, "a list of tuples");
  return x.map((t, i) => {
    if (!Array.isArray(t) || t.some((e) => typeof e !== "string")) {
      fail(`${path}[${i}]`, "a tuple of element names");
    }
    return t as string[];
  });
}

export function validateStructure(x: unknown, path = "structure"): StructureDoc {
  if (!isRecord(x)) fail(path, "an object");
  const { signature, universe, relations } = x as Partial<StructureDoc>;
  if (!isRecord(signature) || Object.values(signature).some((a) => typeof a !== "number")) {
    fail(`${path}.signature`, "relation name -> arity");
  }
  if (!Array.isArray(universe) || universe.some((e) => typeof e !== "string")) {
    fail(`${path}.universe`, "a list of element names");
  }
  if (!isRecord(relations)) fail(`${path}.relations`, "relation name -> tuples");
  for (const [name, tuples] of Object.entries(relations as Record<string, unknown>)) {
    checkTupleList(tuples, `${path}.relations.${name}`);
  }
  return x as unknown as StructureDoc;
}

export function validateStatus(x: unknown, path = "status"): Status {
  if (!isRecord(x)) fail(path, "an object");
  if (x.state !== "ongoing" && x.state !== "finished") fail(`${path}.state`, "ongoing|finished");
  if (typeof x.label !== "string") fail(`${path}.label`, "a string");
  return x as unknown as Status;
}

export function validateSession(x: unknown): SessionPayload {
  if (!isRecord(x)) fail("session", "an object");
  if (typeof x.id !== "string") fail("session.id", "a string");
  if (typeof x.k !== "number" || x.k < 1) fail("session.k", "a positive integer");
  if (!Array.isArray(x.quantifiers) || x.quantifiers.some((q) => typeof q !== "string")) {
    fail("session.quantifiers", "a list of quantifier names");
  }
  validateStructure(x.left, "session.left");
  validateStructure(x.right, "session.right");
  if (!isRecord(x.position)) fail("session.position", "an object");
  checkTupleList([ (x.position as Record<string, unknown>).alpha ], "session.position.alpha");
  checkTupleList([ (x.position as Record<string, unknown>).beta ], "session.position.beta");
  if (x.phase !== "awaiting_witness" && x.phase !== "awaiting_challenge" && x.phase !== "finished") {
    fail("session.phase", "a game phase");
  }
  if (x.pending !== null) {
    if (!isRecord(x.pending)) fail("session.pending", "an object or null");
    const pending = x.pending as Record<string, unknown>;
    if (pending.side !== "left" && pending.side !== "right") fail("session.pending.side", "left|right");
    if (typeof pending.quantifier !== "string") fail("session.pending.quantifier", "a string");
    checkTupleList(pending.witness, "session.pending.witness");
    checkTupleList(pending.response, "session.pending.response");
  }
  if (!Array.isArray(x.history)) fail("session.history", "a list");
  validateStatus(x.status, "session.status");
  if (!isRecord(x.relationSummary)) fail("session.relationSummary", "an object");
  return x as unknown as SessionPayload;
}

export function validateWitnessList(x: unknown): string[][][] {
  if (!isRecord(x) || !Array.isArray(x.witnesses)) fail("witnesses", "an object with a witnesses list");
  return (x.witnesses as unknown[]).map((w, i) => checkTupleList(w, `witnesses[${i}]`));
}
