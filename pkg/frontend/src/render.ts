/** DOM/SVG rendering of a ViewModel. No game logic lives here. */
import { GraphView, ViewModel, WitnessOption } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderGraph(view: GraphView): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 320 260");
  svg.setAttribute("class", "graph");

  const marker = document.createElementNS(SVG_NS, "marker");
  const markerId = `arrow-${view.title}`;
  marker.setAttribute("id", markerId);
  marker.setAttribute("viewBox", "0 0 10 10");
  marker.setAttribute("refX", "22");
  marker.setAttribute("refY", "5");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
  tip.setAttribute("fill", "#777");
  marker.appendChild(tip);
  svg.appendChild(marker);

  const at = new Map(view.nodes.map((n) => [n.id, n] as const));
  for (const edge of view.edges) {
    const from = at.get(edge.from);
    const to = at.get(edge.to);
    if (!from || !to) continue;
    if (edge.from === edge.to) {
      const loop = document.createElementNS(SVG_NS, "path");
      loop.setAttribute(
        "d",
        `M ${from.x} ${from.y - 14} C ${from.x - 26} ${from.y - 44}, ${from.x + 26} ${from.y - 44}, ${from.x} ${from.y - 14}`,
      );
      loop.setAttribute("class", "edge");
      svg.appendChild(loop);
      continue;
    }
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("class", "edge");
    line.setAttribute("marker-end", `url(#${markerId})`);
    svg.appendChild(line);
  }

  for (const node of view.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "14");
    circle.setAttribute("class", node.marks.length ? "node current" : "node");
    group.appendChild(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y + 4));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "node-label");
    label.textContent = node.id;
    group.appendChild(label);
    if (node.badges.length) {
      const badge = document.createElementNS(SVG_NS, "text");
      badge.setAttribute("x", String(node.x));
      badge.setAttribute("y", String(node.y - 18));
      badge.setAttribute("text-anchor", "middle");
      badge.setAttribute("class", "badge");
      badge.textContent = node.badges.join(",");
      group.appendChild(badge);
    }
    if (node.marks.length) {
      const mark = document.createElementNS(SVG_NS, "text");
      mark.setAttribute("x", String(node.x + 18));
      mark.setAttribute("y", String(node.y + 18));
      mark.setAttribute("class", "mark");
      mark.textContent = node.marks.join("");
      group.appendChild(mark);
    }
    svg.appendChild(group);
  }
  return svg;
}

export interface RenderCallbacks {
  onWitness: (option: WitnessOption) => void;
  onChallenge: (tuple: string[]) => void;
  onReplay: () => void;
  onExport: () => void;
}

export function renderSession(root: HTMLElement, view: ViewModel, callbacks: RenderCallbacks): void {
  root.replaceChildren();

  const banner = el("div", `banner banner-${view.bannerKind}`, view.banner);
  if (view.roundsLeft !== null) {
    banner.appendChild(el("span", "rounds", ` — ${view.roundsLeft} round(s) left`));
  }
  root.appendChild(banner);

  const boards = el("div", "boards");
  for (const side of [view.left, view.right]) {
    const panel = el("div", "panel");
    panel.appendChild(el("h3", undefined, side.title));
    panel.appendChild(renderGraph(side));
    boards.appendChild(panel);
  }
  root.appendChild(boards);

  const controls = el("div", "controls");
  if (view.phase === "awaiting_witness") {
    controls.appendChild(el("h3", undefined, "Your challenge (side, quantifier, witness)"));
    const list = el("div", "palette");
    for (const option of view.palette) {
      const label = option.witness.map((t) => `(${t.join(",")})`).join(" ") || "{}";
      const button = el("button", "move", `${option.side} · ${option.quantifier} · ${label}`);
      button.addEventListener("click", () => callbacks.onWitness(option));
      list.appendChild(button);
    }
    if (!view.palette.length) {
      list.appendChild(el("p", "note", "No challenge is available: every quantifier has an empty witness family here."));
    }
    controls.appendChild(list);
  } else if (view.phase === "awaiting_challenge") {
    controls.appendChild(el("h3", undefined, "Pick a tuple from the engine's witness"));
    const list = el("div", "palette");
    for (const tuple of view.challengeChoices) {
      const button = el("button", "move", `(${tuple.join(",")})`);
      button.addEventListener("click", () => callbacks.onChallenge(tuple));
      list.appendChild(button);
    }
    controls.appendChild(list);
  }
  root.appendChild(controls);

  const timeline = el("div", "timeline");
  timeline.appendChild(el("h3", undefined, "History"));
  const list = el("ol");
  for (const item of view.timeline) {
    list.appendChild(el("li", item.player === 1 ? "challenger" : "engine", item.text));
  }
  timeline.appendChild(list);
  const actions = el("div", "actions");
  const replay = el("button", "secondary", "Replay from history");
  replay.addEventListener("click", callbacks.onReplay);
  const save = el("button", "secondary", "Export history");
  save.addEventListener("click", callbacks.onExport);
  actions.append(replay, save);
  timeline.appendChild(actions);
  root.appendChild(timeline);
}

export function renderError(root: HTMLElement, message: string): void {
  const banner = el("div", "banner banner-error", message);
  root.prepend(banner);
  setTimeout(() => banner.remove(), 6000);
}
