/** Wire types of the session service; FENs and UCI moves travel as strings. */

export type SessionStatus = "awaiting_human" | "engine_thinking" | "finished";

export interface RecommendationCard {
  move: string; // uci
  san: string;
  origin: string; // square name, e.g. "e2"
  destination: string;
  /** Present only on unblinded sessions. */
  engine?: string;
}

export interface UnblindingEntry {
  ply: number;
  labels: Record<string, string>; // label -> member tag
  chosen: string;
}

export interface SessionResult {
  result: "win" | "draw" | "loss";
  termination: string;
  reward: number;
  moves: string[];
  unblinding: UnblindingEntry[];
  engines: Record<string, string>;
}

export interface SessionState {
  session_id: string;
  status: SessionStatus;
  fen: string;
  team_color: "white" | "black";
  moves: string[];
  ply: number;
  pending: Record<string, RecommendationCard> | null;
  result: SessionResult | null;
  version: number;
}

export interface CreateSessionOptions {
  team_color?: "white" | "black";
  blind?: boolean;
  opening_fen?: string;
  seed?: number;
}
