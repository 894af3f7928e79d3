/** Session client: event-driven, server state is the sole source of truth.
 *
 * Transports are injected so tests can drive the client from a scripted
 * fixture server; the default transport wraps fetch and WebSocket.
 */

import type {
  CreateSessionOptions,
  SessionState,
} from "./types.js";

export interface SocketHandlers {
  onMessage(data: unknown): void;
  onClose(): void;
  onError(): void;
}

export interface SocketHandle {
  close(): void;
}

export interface Transport {
  fetchJson(
    path: string,
    init?: { method?: string; body?: unknown },
  ): Promise<{ status: number; body: unknown }>;
  openSocket(path: string, handlers: SocketHandlers): SocketHandle;
}

export function httpTransport(baseUrl: string): Transport {
  const wsBase = baseUrl.replace(/^http/, "ws");
  return {
    async fetchJson(path, init) {
      const response = await fetch(baseUrl + path, {
        method: init?.method ?? "GET",
        headers: { "content-type": "application/json" },
        body: init?.body === undefined ? undefined : JSON.stringify(init.body),
      });
      return { status: response.status, body: await response.json() };
    },
    openSocket(path, handlers) {
      const socket = new WebSocket(wsBase + path);
      socket.onmessage = (event) =>
        handlers.onMessage(JSON.parse(event.data as string));
      socket.onclose = () => handlers.onClose();
      socket.onerror = () => handlers.onError();
      return { close: () => socket.close() };
    },
  };
}

export class ChoiceRejectedError extends Error {}

export interface SessionClientOptions {
  /** Reconnect attempts after an unexpected socket loss. */
  maxReconnects?: number;
  /** Delay before each reconnect attempt, milliseconds. */
  reconnectDelayMs?: number;
}

type Listener = (state: SessionState) => void;

export class SessionClient {
  private transport: Transport;
  private current: SessionState | null = null;
  private listeners: Listener[] = [];
  private socket: SocketHandle | null = null;
  private closed = false;
  private reconnectsLeft: number;
  private readonly reconnectDelayMs: number;
  /** Resolved after each (re)connect; exposed for tests. */
  reconnects = 0;

  constructor(transport: Transport, options: SessionClientOptions = {}) {
    this.transport = transport;
    this.reconnectsLeft = options.maxReconnects ?? 5;
    this.reconnectDelayMs = options.reconnectDelayMs ?? 250;
  }

  state(): SessionState | null {
    return this.current;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    if (this.current) listener(this.current);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private accept(state: SessionState): void {
    // server events may race the HTTP responses: never go backwards
    if (this.current && state.version < this.current.version) return;
    this.current = state;
    for (const listener of [...this.listeners]) listener(state);
  }

  async create(options: CreateSessionOptions = {}): Promise<SessionState> {
    const { status, body } = await this.transport.fetchJson("/sessions", {
      method: "POST",
      body: options,
    });
    if (status !== 200) {
      throw new Error(`session creation failed: HTTP ${status}`);
    }
    this.accept(body as SessionState);
    this.openEvents();
    return this.current!;
  }

  private openEvents(): void {
    const state = this.current;
    if (!state || state.status === "finished" || this.closed) return;
    this.socket = this.transport.openSocket(
      `/sessions/${state.session_id}/events`,
      {
        onMessage: (data) => this.accept(data as SessionState),
        onClose: () => void this.handleSocketLoss(),
        onError: () => undefined, // close always follows
      },
    );
  }

  private async handleSocketLoss(): Promise<void> {
    if (this.closed || !this.current) return;
    if (this.current.status === "finished") return; // orderly end
    if (this.reconnectsLeft <= 0) return;
    this.reconnectsLeft -= 1;
    this.reconnects += 1;
    await sleep(this.reconnectDelayMs);
    const latest = await this.refetch(); // resume from authoritative state
    if (latest.status !== "finished") {
      this.openEvents();
    }
  }

  async refetch(): Promise<SessionState> {
    const state = this.current;
    if (!state) throw new Error("no session");
    const { status, body } = await this.transport.fetchJson(
      `/sessions/${state.session_id}`,
    );
    if (status === 200) this.accept(body as SessionState);
    return this.current!;
  }

  /** Post a choice for the pending decision.
   *
   * The client never originates a move outside the recommendation pair:
   * unknown labels are rejected locally, and a stale choice (server 409)
   * resolves by refetching the authoritative state.
   */
  async choose(label: string): Promise<SessionState> {
    const state = this.current;
    if (!state) throw new Error("no session");
    if (state.status !== "awaiting_human" || !state.pending) {
      throw new ChoiceRejectedError("no decision is pending");
    }
    if (!(label in state.pending)) {
      throw new ChoiceRejectedError(`label ${label} is not offered`);
    }
    const { status, body } = await this.transport.fetchJson(
      `/sessions/${state.session_id}/choice`,
      { method: "POST", body: { label } },
    );
    if (status === 409) {
      return this.refetch(); // stale: someone else advanced the session
    }
    if (status !== 200) {
      throw new Error(`choice failed: HTTP ${status}`);
    }
    this.accept(body as SessionState);
    return this.current!;
  }

  async result(): Promise<unknown> {
    const state = this.current;
    if (!state) throw new Error("no session");
    const { status, body } = await this.transport.fetchJson(
      `/sessions/${state.session_id}/result`,
    );
    if (status !== 200) throw new Error(`result not ready: HTTP ${status}`);
    return body;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
