/** DOM glue: mount the session view and forward card clicks. */

import { ChoiceRejectedError, SessionClient, httpTransport } from "./client.js";
import { renderApp } from "./render.js";
import type { CreateSessionOptions } from "./types.js";

export { SessionClient, httpTransport } from "./client.js";
export * from "./render.js";
export * from "./types.js";

export function mount(
  root: { innerHTML: string; addEventListener: Element["addEventListener"] },
  client: SessionClient,
): () => void {
  const unsubscribe = client.subscribe((state) => {
    root.innerHTML = renderApp(state);
  });
  const onClick = (event: Event) => {
    const target = event.target as Element | null;
    const button = target?.closest?.("[data-choice]");
    if (!button || button.hasAttribute("disabled")) return;
    const label = button.getAttribute("data-choice");
    if (!label) return;
    client.choose(label).catch((error) => {
      if (!(error instanceof ChoiceRejectedError)) throw error;
      // stale click: the subscription already re-rendered fresh state
    });
  };
  root.addEventListener("click", onClick);
  return () => {
    unsubscribe();
  };
}

export async function startSession(
  root: { innerHTML: string; addEventListener: Element["addEventListener"] },
  baseUrl: string,
  options: CreateSessionOptions = {},
): Promise<SessionClient> {
  const client = new SessionClient(httpTransport(baseUrl));
  mount(root, client);
  await client.create(options);
  return client;
}
