/**
 * Deterministic graph layout: positions depend only on the structure
 * document, so the same input always renders the same picture.
 *
 * Nodes start on a circle in universe order, then a few rounds of a tiny
 * force relaxation (seeded by a hash of the document) separate clusters.
 */
import { StructureDoc } from "./schema.js";

export interface NodePosition {
  id: string;
  x: number;
  y: number;
}

function hashString(text: string): number {
  let h = 2166136261 >>> 0;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619) >>> 0;
  }
  return h >>> 0;
}

/** mulberry32: tiny deterministic PRNG. */
function seededRandom(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutStructure(doc: StructureDoc, width = 320, height = 260): NodePosition[] {
  const seed = hashString(JSON.stringify([doc.signature, doc.universe, doc.relations]));
  const random = seededRandom(seed);
  const n = doc.universe.length;
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 2 - 40;

  const positions = doc.universe.map((id, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    return {
      id,
      x: cx + radius * Math.cos(angle) + (random() - 0.5) * 14,
      y: cy + radius * Math.sin(angle) + (random() - 0.5) * 14,
    };
  });
  if (n === 1) {
    positions[0].x = cx;
    positions[0].y = cy;
    return positions;
  }

  const edges: Array<[number, number]> = [];
  const index = new Map(doc.universe.map((e, i) => [e, i] as const));
  for (const [name, arity] of Object.entries(doc.signature)) {
    if (arity !== 2) continue;
    for (const tuple of doc.relations[name] ?? []) {
      const a = index.get(tuple[0]);
      const b = index.get(tuple[1]);
      if (a !== undefined && b !== undefined && a !== b) edges.push([a, b]);
    }
  }
  // a few relaxation rounds: edges attract, all pairs repel, fixed-point free
  for (let round = 0; round < 30; round++) {
    const fx = positions.map(() => 0);
    const fy = positions.map(() => 0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = positions[i].x - positions[j].x;
        const dy = positions[i].y - positions[j].y;
        const d2 = Math.max(dx * dx + dy * dy, 25);
        const push = 1800 / d2;
        const d = Math.sqrt(d2);
        fx[i] += (dx / d) * push;
        fy[i] += (dy / d) * push;
        fx[j] -= (dx / d) * push;
        fy[j] -= (dy / d) * push;
      }
    }
    for (const [a, b] of edges) {
      const dx = positions[b].x - positions[a].x;
      const dy = positions[b].y - positions[a].y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = (d - 90) * 0.02;
      fx[a] += (dx / d) * pull;
      fy[a] += (dy / d) * pull;
      fx[b] -= (dx / d) * pull;
      fy[b] -= (dy / d) * pull;
    }
    for (let i = 0; i < n; i++) {
      positions[i].x = Math.min(width - 24, Math.max(24, positions[i].x + fx[i]));
      positions[i].y = Math.min(height - 24, Math.max(24, positions[i].y + fy[i]));
    }
  }
  return positions;
}
