import { describe, expect, test } from "vitest";

import fixtures from "./fixtures/service_fixtures.json";
import { exportHistory, importHistory, player1Moves } from "../src/history.js";
import { SchemaError, HistoryEntry } from "../src/schema.js";

const session = fixtures.sessions.after_round;

function document() {
  return {
    kind: "kqlogic-game-history" as const,
    id: session.id,
    request: session.request,
    history: session.history as HistoryEntry[],
  };
}

describe("history export/import", () => {
  test("export -> import -> export is byte-identical", () => {
    const first = exportHistory(document());
    const second = exportHistory(importHistory(first));
    expect(second).toBe(first);
  });

  test("export is canonical regardless of key insertion order", () => {
    const doc = document();
    const shuffled = {
      history: doc.history,
      request: doc.request,
      id: doc.id,
      kind: doc.kind,
    };
    expect(exportHistory(shuffled as never)).toBe(exportHistory(doc));
  });

  test("import rejects junk with a schema error", () => {
    expect(() => importHistory("not json")).toThrow(SchemaError);
    expect(() => importHistory("{}")).toThrow(SchemaError);
    expect(() => importHistory(JSON.stringify({ kind: "kqlogic-game-history", id: "x" }))).toThrow(
      SchemaError,
    );
  });

  test("player-1 moves reconstruct the recorded round", () => {
    const moves = player1Moves(session.history as HistoryEntry[]);
    expect(moves).toEqual([
      { side: "left", quantifier: "dia[R]", witness: [["b"]] },
      { challenge: ["b"] },
    ]);
  });
});
