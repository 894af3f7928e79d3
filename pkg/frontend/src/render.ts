/** Pure rendering: session state in, HTML string out.
 *
 * Keeping these as pure functions lets tests assert on the exact rendered
 * output (in particular that blinded sessions leak no engine identity)
 * without a browser.
 */

import type { RecommendationCard, SessionState } from "./types.js";

const PIECE_GLYPHS: Record<string, string> = {
  K: "♔", Q: "♕", R: "♖", B: "♗", N: "♘", P: "♙",
  k: "♚", q: "♛", r: "♜", b: "♝", n: "♞", p: "♟",
};

const FILES = "abcdefgh";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface Arrow {
  from: string;
  to: string;
  label: string; // "A" | "B"
}

function squareCenter(square: string): { x: number; y: number } {
  const file = FILES.indexOf(square[0]);
  const rank = Number(square[1]) - 1;
  return { x: file * 10 + 5, y: (7 - rank) * 10 + 5 };
}

/** 8x8 board from the FEN placement field, with an SVG arrow overlay. */
export function renderBoard(fen: string, arrows: Arrow[] = []): string {
  const placement = fen.split(" ")[0];
  const rows = placement.split("/");
  const cells: string[] = [];
  for (let rank = 7; rank >= 0; rank--) {
    const row = rows[7 - rank];
    let file = 0;
    for (const ch of row) {
      if (/\d/.test(ch)) {
        for (let i = 0; i < Number(ch); i++) {
          cells.push(cell(file++, rank, ""));
        }
      } else {
        cells.push(cell(file++, rank, PIECE_GLYPHS[ch] ?? "?"));
      }
    }
  }
  const overlay = arrows.map(renderArrow).join("");
  return (
    `<div class="board" data-fen="${escapeHtml(fen)}">` +
    `<div class="squares">${cells.join("")}</div>` +
    `<svg class="arrows" viewBox="0 0 80 80">${overlay}</svg>` +
    `</div>`
  );

  function cell(f: number, r: number, glyph: string): string {
    const square = FILES[f] + String(r + 1);
    const shade = (f + r) % 2 === 0 ? "dark" : "light";
    return (
      `<div class="square ${shade}" data-square="${square}">` +
      `${glyph}</div>`
    );
  }
}

function renderArrow(arrow: Arrow): string {
  const from = squareCenter(arrow.from);
  const to = squareCenter(arrow.to);
  return (
    `<line x1="${from.x}" y1="${from.y}" x2="${to.x}" y2="${to.y}" ` +
    `class="arrow arrow-${arrow.label.toLowerCase()}" ` +
    `marker-end="url(#head-${arrow.label.toLowerCase()})"/>`
  );
}

export function renderCard(
  label: string,
  card: RecommendationCard,
  enabled: boolean,
): string {
  const engine = card.engine
    ? `<span class="engine">${escapeHtml(card.engine)}</span>`
    : "";
  const disabled = enabled ? "" : " disabled";
  return (
    `<button class="card" data-choice="${escapeHtml(label)}"${disabled}>` +
    `<span class="label">${escapeHtml(label)}</span>` +
    `<span class="san">${escapeHtml(card.san)}</span>` +
    `<span class="uci">${escapeHtml(card.move)}</span>` +
    engine +
    `</button>`
  );
}

export function renderStatus(state: SessionState): string {
  const text = {
    awaiting_human: "Your decision: the team members disagree.",
    engine_thinking: "Engines thinking…",
    finished: "Game over.",
  }[state.status];
  return `<div class="status status-${state.status}">${text}</div>`;
}

export function renderHistory(moves: string[]): string {
  const parts: string[] = [];
  moves.forEach((move, i) => {
    if (i % 2 === 0) parts.push(`${i / 2 + 1}.`);
    parts.push(move);
  });
  return `<div class="history">${escapeHtml(parts.join(" "))}</div>`;
}

export function renderResult(state: SessionState): string {
  const result = state.result;
  if (!result) return "";
  const reveal = result.unblinding
    .map(
      (entry) =>
        `<li>ply ${entry.ply}: chose ${escapeHtml(entry.chosen)} ` +
        `(${Object.entries(entry.labels)
          .map(([label, member]) => `${escapeHtml(label)}=${escapeHtml(member)}`)
          .join(", ")})</li>`,
    )
    .join("");
  const engines = Object.entries(result.engines)
    .map(([key, name]) => `<li>${escapeHtml(key)}: ${escapeHtml(name)}</li>`)
    .join("");
  return (
    `<div class="result">` +
    `<p class="outcome">${escapeHtml(result.result)} ` +
    `(${escapeHtml(result.termination)})</p>` +
    `<ul class="engines">${engines}</ul>` +
    `<ul class="unblinding">${reveal}</ul>` +
    `</div>`
  );
}

/** Full view; buttons only render enabled while a decision awaits. */
export function renderApp(state: SessionState): string {
  const awaiting = state.status === "awaiting_human";
  const arrows: Arrow[] = [];
  const cards: string[] = [];
  if (state.pending) {
    for (const [label, card] of Object.entries(state.pending)) {
      arrows.push({ from: card.origin, to: card.destination, label });
      cards.push(renderCard(label, card, awaiting));
    }
  }
  return (
    `<div class="session" data-status="${state.status}">` +
    renderStatus(state) +
    renderBoard(state.fen, arrows) +
    `<div class="cards">${cards.join("")}</div>` +
    renderHistory(state.moves) +
    (state.status === "finished" ? renderResult(state) : "") +
    `</div>`
  );
}
