import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { renderApp, renderBoard, renderCard } from "../src/render.js";
import { FixtureServer, SCRIPT } from "./fixture.js";
import type { SessionState } from "../src/types.js";

const IDENTITY_TOKENS = ["stub-m", "stub-l", "maia", "leela"];

function labelFor(state: SessionState, move: string): string {
  for (const [label, card] of Object.entries(state.pending ?? {})) {
    if (card.move === move) return label;
  }
  throw new Error(`move ${move} not offered`);
}

describe("board rendering", () => {
  it("renders 64 squares with pieces from the fen", () => {
    const html = renderBoard(SCRIPT[0].fen);
    expect(html.match(/data-square=/g)).toHaveLength(64);
    expect(html).toContain("♖"); // the white rook
    expect(html).toContain('data-square="a1"');
    expect(html).toContain(`data-fen="${SCRIPT[0].fen}"`);
  });

  it("draws one arrow per recommendation", () => {
    const html = renderApp({
      session_id: "x",
      status: "awaiting_human",
      fen: SCRIPT[0].fen,
      team_color: "white",
      moves: [],
      ply: 0,
      pending: {
        A: { move: "a1a5", san: "Ra5", origin: "a1", destination: "a5" },
        B: { move: "a1a4", san: "Ra4", origin: "a1", destination: "a4" },
      },
      result: null,
      version: 0,
    });
    expect(html.match(/<line /g)).toHaveLength(2);
    expect(html).toContain("arrow-a");
    expect(html).toContain("arrow-b");
  });
});

describe("choice buttons", () => {
  it("enabled only while awaiting the human", () => {
    const card = { move: "a1a5", san: "Ra5", origin: "a1", destination: "a5" };
    expect(renderCard("A", card, true)).not.toContain("disabled");
    expect(renderCard("A", card, false)).toContain("disabled");
  });

  it("escapes text from the wire", () => {
    const card = {
      move: "a1a5",
      san: '<img src="x">',
      origin: "a1",
      destination: "a5",
    };
    const html = renderCard("A", card, true);
    expect(html).not.toContain("<img");
    expect(html).toContain("&lt;img");
  });
});

describe("blinding", () => {
  it("no identity appears in any rendered frame before the end", async () => {
    const server = new FixtureServer(true);
    const client = new SessionClient(server.transport());
    const frames: string[] = [];
    client.subscribe((state) => {
      if (state.status !== "finished") frames.push(renderApp(state));
    });
    let state = await client.create({ blind: true });
    const line = ["a1a5", "a5a6", "a6a7"];
    let step = 0;
    while (state.status === "awaiting_human") {
      state = await client.choose(labelFor(state, line[step++]));
    }
    expect(frames.length).toBeGreaterThanOrEqual(3);
    for (const frame of frames) {
      for (const token of IDENTITY_TOKENS) {
        expect(frame.toLowerCase()).not.toContain(token);
      }
    }
    // the finished frame reveals the unblinding log
    const finale = renderApp(state);
    expect(finale).toContain("stub-m");
    expect(finale).toContain("unblinding");
    client.close();
  });

  it("unblinded sessions may show engine names on the cards", async () => {
    const server = new FixtureServer(false);
    const client = new SessionClient(server.transport());
    const state = await client.create({ blind: false });
    const html = renderApp(state);
    expect(html).toContain("stub-m");
    expect(html).toContain("stub-l");
    client.close();
  });

  it("displayed fen always equals server fen", async () => {
    const server = new FixtureServer(true);
    const client = new SessionClient(server.transport());
    let state = await client.create({ blind: true });
    const line = ["a1a5", "a5a6", "a6a7"];
    let step = 0;
    for (;;) {
      const html = renderApp(state);
      expect(html).toContain(`data-fen="${state.fen}"`);
      if (state.status !== "awaiting_human") break;
      state = await client.choose(labelFor(state, line[step++]));
    }
    client.close();
  });
});
