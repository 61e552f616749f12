import { createClient, LatestOnly, ServiceError } from "./client";
import {
  addTextChip,
  buildQueryRequest,
  canSubmit,
  emptyDraft,
  faultyChipIndexes,
  pickImageAsTerm,
  removeChip,
  setResultSize,
  stepChipWeight,
  toggleChip,
} from "./draft";
import { SessionHistory } from "./history";
import { renderBanner, renderChips, renderGrid, renderHistory } from "./render";
import type { QueryDraft, ResultItem } from "./types";

const client = createClient();
const history = new SessionHistory();
const inflight = new LatestOnly();

let draft: QueryDraft = emptyDraft();
let results: ResultItem[] = [];
let banner = "";
let retryable = false;
let faultyChips = new Set<number>();

function shell(): string {
  return `
    <header>
      <h1>jointspace explorer</h1>
      <span id="health" class="hint"></span>
    </header>
    <section class="composer">
      <div id="chips"></div>
      <form id="add-form">
        <input id="add-text" type="text" placeholder="concept, e.g. concept0" autocomplete="off" />
        <button type="submit">add text</button>
        <label>k <input id="k" type="number" min="1" max="50" /></label>
        <button type="button" id="submit">search</button>
      </form>
      <div id="banner"></div>
    </section>
    <section id="grid-box"></section>
    <aside>
      <h2>session history</h2>
      <div id="history-box"></div>
    </aside>
  `;
}

function refresh(): void {
  byId("chips").innerHTML = renderChips(draft.chips, faultyChips);
  (byId("k") as HTMLInputElement).value = String(draft.k);
  (byId("submit") as HTMLButtonElement).disabled = !canSubmit(draft);
  byId("banner").innerHTML = banner ? renderBanner(banner, retryable) : "";
  byId("grid-box").innerHTML = renderGrid(results);
  byId("history-box").innerHTML = renderHistory(history.list());
}

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function setDraft(next: QueryDraft): void {
  draft = next;
  faultyChips = new Set();
  banner = "";
  refresh();
}

async function submit(): Promise<void> {
  if (!canSubmit(draft)) return;
  const submitted = draft; // log this draft, not whatever it becomes while waiting
  const request = buildQueryRequest(submitted);
  const token = inflight.begin();
  banner = "";
  try {
    const response = await client.query(request);
    if (!inflight.isCurrent(token)) return; // superseded by a newer submit
    results = response.results;
    history.record(submitted, results.map((r) => r.id));
    faultyChips = new Set();
  } catch (err) {
    if (!inflight.isCurrent(token)) return;
    if (err instanceof ServiceError) {
      banner = err.message;
      retryable = false;
      faultyChips = faultyChipIndexes(draft.chips, err.message);
    } else {
      banner = "service unreachable";
      retryable = true;
    }
  }
  refresh();
}

function wire(root: HTMLElement): void {
  root.innerHTML = shell();
  refresh();

  byId("add-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = byId("add-text") as HTMLInputElement;
    setDraft(addTextChip(draft, input.value));
    input.value = "";
  });

  byId("k").addEventListener("change", () => {
    setDraft(setResultSize(draft, Number((byId("k") as HTMLInputElement).value)));
  });

  byId("submit").addEventListener("click", () => void submit());

  byId("chips").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const act = target.dataset.act;
    if (!act) return;
    const chipEl = target.closest("[data-chip]") as HTMLElement | null;
    if (!chipEl) return;
    const index = Number(chipEl.dataset.chip);
    if (act === "plus") setDraft(stepChipWeight(draft, index, 1));
    else if (act === "minus") setDraft(stepChipWeight(draft, index, -1));
    else if (act === "toggle") setDraft(toggleChip(draft, index));
    else if (act === "remove") setDraft(removeChip(draft, index));
  });

  byId("grid-box").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const picked = target.dataset.pick;
    if (picked) setDraft(pickImageAsTerm(draft, picked));
  });

  byId("history-box").addEventListener("click", (ev) => {
    const target = (ev.target as HTMLElement).closest(".restore") as HTMLElement | null;
    if (target) setDraft(history.restore(Number(target.dataset.entry)));
  });

  byId("banner").addEventListener("click", (ev) => {
    if ((ev.target as HTMLElement).id === "retry") void submit();
  });

  client
    .health()
    .then((h) => {
      byId("health").textContent =
        `${h.method}, ${h.dim}-dim space, ${h.index_size} items indexed`;
    })
    .catch(() => {
      byId("health").textContent = "service offline";
    });
}

const root = document.getElementById("app");
if (root) wire(root);
