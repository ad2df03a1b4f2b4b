import type { UiState } from "./controller.js";
import type { MethodSide } from "./types.js";

export interface ViewActions {
  submit(label: string): void;
  skip(): void;
  retry(): void;
}

const LABEL_KEYS: Record<string, string> = {
  "1": "Type1",
  "2": "Type2",
  "3": "Type3",
  "4": "Type4",
  "5": "NotClone",
};

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

function methodPane(side: MethodSide, which: string): HTMLElement {
  const pane = el("section", "pane");
  const header = el("header", "pane-header");
  header.appendChild(el("span", "pane-which", which));
  header.appendChild(el("span", "pane-name", side.name));
  header.appendChild(el("span", "pane-file", `${side.file}:${side.start_line}-${side.end_line}`));
  pane.appendChild(header);
  const code = el("pre", "code");
  code.textContent = side.body;
  pane.appendChild(code);
  return pane;
}

export function render(root: HTMLElement, state: UiState, actions: ViewActions): void {
  root.textContent = "";

  const bar = el("div", "topbar");
  bar.appendChild(el("h1", "title", "Clone pair labeling"));
  if (state.progress) {
    const p = state.progress;
    bar.appendChild(
      el(
        "span",
        "progress",
        `${p.labeled}/${p.total} pairs labeled, ${p.consensus} with consensus, you: ${state.submitted}`,
      ),
    );
  }
  root.appendChild(bar);

  if (state.error) {
    const banner = el("div", "banner error");
    banner.appendChild(el("span", undefined, state.error));
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => actions.retry());
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  if (state.phase === "loading" || state.phase === "idle") {
    root.appendChild(el("p", "status", "Loading next pair..."));
    return;
  }

  if (state.phase === "exhausted") {
    const done = el("div", "done");
    done.appendChild(el("h2", undefined, "All done"));
    done.appendChild(
      el("p", undefined, `No pairs left for you. You submitted ${state.submitted} judgments this session.`),
    );
    root.appendChild(done);
    return;
  }

  const pair = state.pair;
  if (!pair) return;

  const score = el("p", "score", `filter similarity ${(100 * pair.filter_score).toFixed(1)}%`);
  root.appendChild(score);

  const panes = el("div", "panes");
  panes.appendChild(methodPane(pair.a, "A"));
  panes.appendChild(methodPane(pair.b, "B"));
  root.appendChild(panes);

  const defs = el("aside", "definitions");
  defs.appendChild(el("h2", undefined, "Clone types"));
  for (const d of pair.definitions) {
    const item = el("div", "definition");
    item.appendChild(el("strong", undefined, `${d.label} - ${d.title}: `));
    item.appendChild(el("span", undefined, d.text));
    defs.appendChild(item);
  }
  root.appendChild(defs);

  const buttons = el("div", "buttons");
  for (const [key, label] of Object.entries(LABEL_KEYS)) {
    const b = el("button", "label-btn", `${label} [${key}]`);
    b.disabled = state.pending;
    b.addEventListener("click", () => actions.submit(label));
    buttons.appendChild(b);
  }
  const skip = el("button", "skip-btn", "Skip [s]");
  skip.disabled = state.pending;
  skip.addEventListener("click", () => actions.skip());
  buttons.appendChild(skip);
  root.appendChild(buttons);
}

export function bindKeyboard(actions: ViewActions, isShowing: () => boolean): void {
  document.addEventListener("keydown", (ev) => {
    if (!isShowing()) return;
    const label = LABEL_KEYS[ev.key];
    if (label) actions.submit(label);
    else if (ev.key === "s" || ev.key === "S") actions.skip();
  });
}
