import type { HistoryEntry, QueryDraft, ResultItem, TermChip } from "./types";

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

function esc(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

export function formatWeight(weight: number): string {
  return (weight > 0 ? "+" : "") + weight.toFixed(1);
}

export function renderChip(chip: TermChip, index: number, faulty = false): string {
  const classes = ["chip", chip.type === "image_id" ? "chip-image" : "chip-text"];
  if (!chip.enabled) classes.push("chip-off");
  if (faulty) classes.push("chip-error");
  const label = chip.type === "image_id" ? `img ${chip.value}` : chip.value;
  return (
    `<span class="${classes.join(" ")}" data-chip="${index}">` +
    `<button data-act="minus" title="weight -0.5">-</button>` +
    `<b class="chip-weight">${formatWeight(chip.weight)}</b>` +
    `<button data-act="plus" title="weight +0.5">+</button>` +
    `<span class="chip-label">${esc(label)}</span>` +
    `<button data-act="toggle" title="include/exclude">${chip.enabled ? "on" : "off"}</button>` +
    `<button data-act="remove" title="remove">x</button>` +
    `</span>`
  );
}

export function renderChips(chips: TermChip[], faulty: Set<number> = new Set()): string {
  if (chips.length === 0) {
    return `<p class="hint">type a concept or pick a result image to build a query</p>`;
  }
  return chips.map((chip, i) => renderChip(chip, i, faulty.has(i))).join("");
}

/** Cards appear exactly in response order: the grid IS the ranking. */
export function renderGrid(results: ResultItem[]): string {
  if (results.length === 0) return `<p class="hint">no results</p>`;
  return `<div class="grid">${results.map(renderCard).join("")}</div>`;
}

function renderCard(item: ResultItem): string {
  return (
    `<figure class="card" data-id="${esc(item.id)}">` +
    `<img src="${esc(item.thumb)}" alt="${esc(item.id)}" loading="lazy" />` +
    `<figcaption>` +
    `<span class="score">${item.score.toFixed(4)}</span>` +
    `<span class="tags">${item.tags.map(esc).join(", ")}</span>` +
    `<button class="pick" data-pick="${esc(item.id)}">+ add to query</button>` +
    `</figcaption>` +
    `</figure>`
  );
}

export function describeDraft(draft: QueryDraft): string {
  return draft.chips
    .filter((chip) => chip.enabled)
    .map((chip) => {
      const label = chip.type === "image_id" ? `[${chip.value}]` : chip.value;
      return `${formatWeight(chip.weight)} ${label}`;
    })
    .join("  ");
}

export function renderHistory(entries: readonly HistoryEntry[]): string {
  if (entries.length === 0) return `<p class="hint">nothing submitted yet</p>`;
  const rows = entries.map((entry, index) => {
    const when = new Date(entry.at).toLocaleTimeString();
    return (
      `<li><button class="restore" data-entry="${index}" title="restore this query">` +
      `<span class="when">${when}</span> ` +
      `<span class="what">${esc(describeDraft(entry.draft))}</span> ` +
      `<span class="count">${entry.resultIds.length} hits</span>` +
      `</button></li>`
    );
  });
  return `<ol class="history">${rows.reverse().join("")}</ol>`;
}

export function renderBanner(message: string, retryable: boolean): string {
  const retry = retryable ? `<button id="retry">retry</button>` : "";
  return `<div class="banner">${esc(message)} ${retry}</div>`;
}
