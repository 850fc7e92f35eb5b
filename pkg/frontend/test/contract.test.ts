/**
 * Contract tests against recorded service fixtures: the explorer displays
 * exactly the service's verdicts, and its legality pre-filter offers
 * exactly the moves the service accepted and none it rejected.
 */
import { describe, expect, test } from "vitest";

import fixtures from "./fixtures/service_fixtures.json";
import { SchemaError, validateSession } from "../src/schema.js";
import { deriveView, isMoveOffered, PaletteMap } from "../src/viewmodel.js";

const palettes: PaletteMap = new Map(
  Object.entries(fixtures.palettes as Record<string, string[][][]>),
);

function view(name: keyof typeof fixtures.sessions) {
  const session = validateSession((fixtures.sessions as Record<string, unknown>)[name]);
  return { session, view: deriveView(session, palettes) };
}

describe("verdict display", () => {
  for (const name of Object.keys(fixtures.sessions)) {
    test(`banner for ${name} equals the service's label`, () => {
      const { session, view: vm } = view(name as keyof typeof fixtures.sessions);
      expect(vm.banner).toBe(session.status.label);
    });
  }

  test("banner kinds follow the service verdicts", () => {
    expect(view("awaiting_witness").view.bannerKind).toBe("safe");
    expect(view("forced_win").view.bannerKind).toBe("forced");
    expect(view("finished").view.bannerKind).toBe("finished");
  });

  test("bounded sessions surface the round budget", () => {
    const { session, view: vm } = view("bounded");
    expect(vm.roundsLeft).toBe(session.roundsLeft);
    expect(session.rounds).toBe(2);
  });
});

describe("move legality mirroring", () => {
  test("witness moves are offered iff the service accepted them", () => {
    const { view: vm } = view("awaiting_witness");
    for (const attempt of fixtures.witness_attempts) {
      const offered = isMoveOffered(vm, attempt.move as never);
      expect(offered, JSON.stringify(attempt.move)).toBe(attempt.status_code === 200);
    }
  });

  test("challenges are offered iff they sit in the engine's witness", () => {
    const { view: vm } = view("awaiting_challenge");
    for (const attempt of fixtures.challenge_attempts) {
      const offered = isMoveOffered(vm, attempt.move as never);
      expect(offered, JSON.stringify(attempt.move)).toBe(attempt.status_code === 200);
    }
  });

  test("no witness palette is shown outside the witness phase", () => {
    expect(view("awaiting_challenge").view.palette).toHaveLength(0);
    expect(view("finished").view.palette).toHaveLength(0);
  });

  test("rejections carry machine-readable codes for the banner", () => {
    for (const attempt of [...fixtures.witness_attempts, ...fixtures.challenge_attempts]) {
      if (attempt.status_code !== 200) {
        const error = (attempt as { error?: { code?: string; message?: string } }).error;
        expect(typeof error?.code).toBe("string");
        expect(typeof error?.message).toBe("string");
      }
    }
    for (const failure of fixtures.creation_errors) {
      expect(failure.status_code).toBe(422);
      expect(typeof failure.error.code).toBe("string");
    }
  });
});

describe("payload validation", () => {
  test("recorded sessions are schema-valid", () => {
    for (const session of Object.values(fixtures.sessions)) {
      expect(() => validateSession(session)).not.toThrow();
    }
  });

  test("mismatched payloads raise (and become error banners, never silence)", () => {
    const broken = JSON.parse(JSON.stringify(fixtures.sessions.awaiting_witness));
    delete broken.status;
    expect(() => validateSession(broken)).toThrow(SchemaError);
    const badPhase = JSON.parse(JSON.stringify(fixtures.sessions.awaiting_witness));
    badPhase.phase = "thinking";
    expect(() => validateSession(badPhase)).toThrow(SchemaError);
    expect(() => validateSession({})).toThrow(SchemaError);
  });

  test("history timeline mirrors the recorded entries one to one", () => {
    const { session, view: vm } = view("after_round");
    expect(vm.timeline).toHaveLength(session.history.length);
    expect(vm.timeline[0].player).toBe(1);
    expect(vm.timeline[0].text).toContain("dia[R]");
  });
});
