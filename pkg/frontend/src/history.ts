/**
 * History export/import.
 *
 * The export is a canonical JSON text (sorted keys, fixed indentation);
 * importing and re-exporting reproduces the text byte for byte, so saved
 * games can be diffed and archived.
 */
import { HistoryEntry, SchemaError } from "./schema.js";

export interface HistoryDocument {
  kind: "kqlogic-game-history";
  id: string;
  request: unknown;
  history: HistoryEntry[];
}

function canonical(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(canonical);
  if (typeof value === "object" && value !== null) {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as Record<string, unknown>).sort()) {
      out[key] = canonical((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

export function exportHistory(doc: HistoryDocument): string {
  return JSON.stringify(canonical({ ...doc, kind: "kqlogic-game-history" }), null, 2) + "\n";
}

export function importHistory(text: string): HistoryDocument {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (error) {
    throw new SchemaError(`history file is not valid JSON: ${String(error)}`);
  }
  if (typeof parsed !== "object" || parsed === null) throw new SchemaError("history file must be an object");
  const doc = parsed as Partial<HistoryDocument>;
  if (doc.kind !== "kqlogic-game-history") throw new SchemaError("not a game history file");
  if (typeof doc.id !== "string") throw new SchemaError("history file is missing the session id");
  if (!Array.isArray(doc.history)) throw new SchemaError("history file is missing the move list");
  if (doc.request === undefined) throw new SchemaError("history file is missing the session request");
  return doc as HistoryDocument;
}

/** The Player 1 moves of a history, in order, as move payloads for replay. */
export function player1Moves(history: HistoryEntry[]): Array<Record<string, unknown>> {
  const moves: Array<Record<string, unknown>> = [];
  for (const entry of history) {
    if (entry.player !== 1) continue;
    if (entry.move === "witness") {
      moves.push({ side: entry.side, quantifier: entry.quantifier, witness: entry.witness });
    } else if (entry.move === "challenge") {
      moves.push({ challenge: entry.tuple });
    }
  }
  return moves;
}
