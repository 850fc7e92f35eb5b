/** Explorer shell: session setup form, move round-trips, replay, export. */
import { createSession, fetchSession, fetchWitnesses, postMove, ServiceRejection } from "./api.js";
import { exportHistory, importHistory, player1Moves } from "./history.js";
import { SchemaError, SessionPayload } from "./schema.js";
import { deriveView, paletteKey, PaletteMap, WitnessOption } from "./viewmodel.js";
import { renderError, renderSession } from "./render.js";

const K1 = {
  signature: { R: 2, P: 1 },
  universe: ["a", "b", "c"],
  relations: { R: [["a", "b"], ["b", "c"]], P: [["b"]] },
};

const app = document.getElementById("app")!;
const setup = document.getElementById("setup")!;
const board = document.getElementById("board")!;

let currentId: string | null = null;
let currentSession: SessionPayload | null = null;

function field(id: string): HTMLTextAreaElement | HTMLInputElement {
  return document.getElementById(id) as HTMLTextAreaElement | HTMLInputElement;
}

function initForm(): void {
  (field("left-doc") as HTMLTextAreaElement).value = JSON.stringify(K1, null, 1);
  (field("right-doc") as HTMLTextAreaElement).value = JSON.stringify(K1, null, 1);
  field("k").value = "1";
  field("alpha").value = "a";
  field("beta").value = "c";
  field("quantifiers").value = "dia[R],some";
  document.getElementById("create")!.addEventListener("click", () => void startSession());
  document.getElementById("import")!.addEventListener("click", () => void importGame());
}

async function startSession(): Promise<void> {
  try {
    const rounds = field("rounds").value.trim();
    const payload = {
      left: JSON.parse((field("left-doc") as HTMLTextAreaElement).value),
      right: JSON.parse((field("right-doc") as HTMLTextAreaElement).value),
      k: Number(field("k").value),
      alpha: field("alpha").value,
      beta: field("beta").value,
      quantifiers: field("quantifiers").value.split(",").map((q) => q.trim()).filter(Boolean),
      ...(rounds ? { rounds: Number(rounds) } : {}),
    };
    const created = await createSession(payload);
    currentId = created.id;
    await refresh();
  } catch (error) {
    showError(error);
  }
}

async function collectPalettes(session: SessionPayload): Promise<PaletteMap> {
  const palettes: PaletteMap = new Map();
  if (session.phase !== "awaiting_witness") return palettes;
  for (const side of ["left", "right"] as const) {
    for (const quantifier of session.quantifiers) {
      palettes.set(paletteKey(side, quantifier), await fetchWitnesses(session.id, side, quantifier));
    }
  }
  return palettes;
}

async function refresh(): Promise<void> {
  if (!currentId) return;
  currentSession = await fetchSession(currentId);
  const palettes = await collectPalettes(currentSession);
  const view = deriveView(currentSession, palettes);
  renderSession(board, view, {
    onWitness: (option: WitnessOption) =>
      void submit({ side: option.side, quantifier: option.quantifier, witness: option.witness }),
    onChallenge: (tuple: string[]) => void submit({ challenge: tuple }),
    onReplay: () => void replay(),
    onExport: () => exportGame(),
  });
  setup.classList.add("collapsed");
}

async function submit(move: unknown): Promise<void> {
  if (!currentId) return;
  try {
    currentSession = await postMove(currentId, move);
    await refresh();
  } catch (error) {
    showError(error);
  }
}

/** Rebuild the whole game by re-running the recorded Player 1 moves. */
async function replay(): Promise<void> {
  if (!currentSession) return;
  try {
    const created = await createSession(currentSession.request);
    let session = await fetchSession(created.id);
    for (const move of player1Moves(currentSession.history)) {
      session = await postMove(created.id, move);
    }
    currentId = created.id;
    currentSession = session;
    await refresh();
  } catch (error) {
    showError(error);
  }
}

function exportGame(): void {
  if (!currentSession) return;
  const text = exportHistory({
    kind: "kqlogic-game-history",
    id: currentSession.id,
    request: currentSession.request,
    history: currentSession.history,
  });
  const blob = new Blob([text], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `kqlogic-game-${currentSession.id}.json`;
  link.click();
  URL.revokeObjectURL(link.href);
}

async function importGame(): Promise<void> {
  try {
    const text = (field("history-doc") as HTMLTextAreaElement).value;
    const doc = importHistory(text);
    const created = await createSession(doc.request);
    currentId = created.id;
    for (const move of player1Moves(doc.history)) {
      await postMove(created.id, move);
    }
    await refresh();
  } catch (error) {
    showError(error);
  }
}

function showError(error: unknown): void {
  if (error instanceof ServiceRejection) {
    renderError(app, `rejected (${error.code}): ${error.message}`);
  } else if (error instanceof SchemaError) {
    renderError(app, `payload mismatch: ${error.message}`);
  } else {
    renderError(app, String(error));
  }
}

initForm();
