/** Scripted fixture server implementing the session wire protocol
 * in-process.  State payloads were generated by the real harness, so the
 * fixture's FENs, SANs and move lists match genuine wire data.
 */

import type {
  SocketHandle,
  SocketHandlers,
  Transport,
} from "../src/client.js";
import type {
  RecommendationCard,
  SessionResult,
  SessionState,
  UnblindingEntry,
} from "../src/types.js";

interface DecisionStep {
  fen: string;
  moves: string[];
  ply: number;
  pending: Record<"M" | "L", RecommendationCard> | null;
}

// a three-decision game ending in adjudication after six plies
export const SCRIPT: DecisionStep[] = [
  {
    fen: "6k1/5ppp/8/8/1p6/8/1r3PPP/R5K1 w - - 0 1",
    moves: [],
    ply: 0,
    pending: {
      M: { move: "a1a5", san: "Ra5", origin: "a1", destination: "a5" },
      L: { move: "a1a4", san: "Ra4", origin: "a1", destination: "a4" },
    },
  },
  {
    fen: "6k1/5ppp/8/R7/8/1p6/1r3PPP/6K1 w - - 0 2",
    moves: ["a1a5", "b4b3"],
    ply: 2,
    pending: {
      M: { move: "a5a6", san: "Ra6", origin: "a5", destination: "a6" },
      L: { move: "a5a4", san: "Ra4", origin: "a5", destination: "a4" },
    },
  },
  {
    fen: "6k1/5pp1/R6p/8/8/1p6/1r3PPP/6K1 w - - 0 3",
    moves: ["a1a5", "b4b3", "a5a6", "h7h6"],
    ply: 4,
    pending: {
      M: { move: "a6a7", san: "Ra7", origin: "a6", destination: "a7" },
      L: { move: "a6a4", san: "Ra4", origin: "a6", destination: "a4" },
    },
  },
  {
    fen: "6k1/R4pp1/8/7p/8/1p6/1r3PPP/6K1 w - - 0 4",
    moves: ["a1a5", "b4b3", "a5a6", "h7h6", "a6a7", "h6h5"],
    ply: 6,
    pending: null,
  },
];

const ENGINE_NAMES: Record<string, string> = {
  M: "stub-m",
  L: "stub-l",
  adversary: "stub-adv",
  manager: "human:fixture",
};

/** The fixture expects the M-line to be chosen at every decision; the
 * label mapped to M alternates to exercise blinding. */
export class FixtureServer {
  blind: boolean;
  step = 0;
  version = 0;
  unblinding: UnblindingEntry[] = [];
  requests: string[] = [];
  sockets: FixtureSocket[] = [];

  constructor(blind = true) {
    this.blind = blind;
  }

  private labelMap(): Record<string, "M" | "L"> {
    // deterministic alternation stands in for the server's seeded shuffle
    return this.step % 2 === 0 ? { A: "M", B: "L" } : { A: "L", B: "M" };
  }

  private stateJson(): SessionState {
    const step = SCRIPT[this.step];
    let pending: SessionState["pending"] = null;
    if (step.pending) {
      pending = {};
      for (const [label, member] of Object.entries(this.labelMap())) {
        const card = { ...step.pending[member] };
        if (!this.blind) card.engine = ENGINE_NAMES[member];
        pending[label] = card;
      }
    }
    const finished = step.pending === null;
    return {
      session_id: "fixture-1",
      status: finished ? "finished" : "awaiting_human",
      fen: step.fen,
      team_color: "white",
      moves: step.moves,
      ply: step.ply,
      pending,
      result: finished ? this.resultJson() : null,
      version: this.version,
    };
  }

  private resultJson(): SessionResult {
    return {
      result: "draw",
      termination: "adjudicated",
      reward: 0.5,
      moves: SCRIPT[SCRIPT.length - 1].moves,
      unblinding: this.unblinding,
      engines: ENGINE_NAMES,
    };
  }

  private broadcast(): void {
    const state = this.stateJson();
    for (const socket of [...this.sockets]) {
      if (!socket.closed) socket.handlers.onMessage(state);
    }
  }

  /** Simulate an unexpected network loss on every open socket. */
  dropSockets(): void {
    for (const socket of [...this.sockets]) socket.drop();
  }

  transport(): Transport {
    return {
      fetchJson: async (path, init) => {
        this.requests.push(`${init?.method ?? "GET"} ${path}`);
        if (path === "/sessions" && init?.method === "POST") {
          return { status: 200, body: this.stateJson() };
        }
        if (path === "/sessions/fixture-1") {
          return { status: 200, body: this.stateJson() };
        }
        if (path === "/sessions/fixture-1/choice") {
          const label = (init?.body as { label: string }).label;
          const step = SCRIPT[this.step];
          if (!step.pending) {
            return { status: 409, body: { detail: "not awaiting" } };
          }
          const member = this.labelMap()[label];
          if (!member) {
            return { status: 422, body: { detail: "bad label" } };
          }
          if (member !== "M") {
            // the script only covers the M continuation
            return { status: 409, body: { detail: "off-script branch" } };
          }
          this.unblinding.push({
            ply: step.ply,
            labels: this.labelMap(),
            chosen: label,
          });
          this.step += 1;
          this.version += 1;
          this.broadcast();
          return { status: 200, body: this.stateJson() };
        }
        if (path === "/sessions/fixture-1/result") {
          if (SCRIPT[this.step].pending !== null) {
            return { status: 409, body: { detail: "not finished" } };
          }
          return { status: 200, body: this.resultJson() };
        }
        return { status: 404, body: { detail: "unknown path" } };
      },
      openSocket: (path, handlers) => {
        this.requests.push(`WS ${path}`);
        const socket = new FixtureSocket(handlers);
        this.sockets.push(socket);
        queueMicrotask(() => {
          if (!socket.closed) handlers.onMessage(this.stateJson());
        });
        return socket;
      },
    };
  }
}

class FixtureSocket implements SocketHandle {
  closed = false;

  constructor(readonly handlers: SocketHandlers) {}

  close(): void {
    this.closed = true;
  }

  drop(): void {
    if (this.closed) return;
    this.closed = true;
    this.handlers.onError();
    this.handlers.onClose();
  }
}
