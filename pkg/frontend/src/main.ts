import { ApiClient } from "./api.js";
import { Workbench } from "./controller.js";
import { bindKeyboard, render, type ViewActions } from "./render.js";
import { CLONE_LABELS, type CloneLabel } from "./types.js";

function raterFromUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const existing = params.get("rater");
  if (existing) return existing;
  const entered = window.prompt("Enter your rater id (any handle you will reuse):") || "";
  const token = entered.trim() || `anon-${Math.random().toString(36).slice(2, 8)}`;
  params.set("rater", token);
  window.history.replaceState(null, "", `${window.location.pathname}?${params}`);
  return token;
}

function isCloneLabel(value: string): value is CloneLabel {
  return (CLONE_LABELS as readonly string[]).includes(value);
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const rater = raterFromUrl();
  const api = new ApiClient("");
  const bench = new Workbench(api, rater, (state) => render(root, state, actions));
  const actions: ViewActions = {
    submit: (label: string) => {
      if (isCloneLabel(label)) void bench.submit(label);
    },
    skip: () => void bench.skip(),
    retry: () => void bench.retry(),
  };
  bindKeyboard(actions, () => bench.getState().phase === "showing" && !bench.getState().pending);
  void bench.start();
}

start();
