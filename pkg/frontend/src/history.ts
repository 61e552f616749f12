import { cloneDraft } from "./draft";
import type { HistoryEntry, QueryDraft } from "./types";

/**
 * Append-only record of submitted queries. Entries are defensive
 * copies, so later edits to a live draft never rewrite what was
 * actually sent; restore hands back a fresh copy for further editing.
 */
export class SessionHistory {
  private entries: HistoryEntry[] = [];

  record(draft: QueryDraft, resultIds: string[], at: number = Date.now()): void {
    this.entries.push({ draft: cloneDraft(draft), resultIds: [...resultIds], at });
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  get size(): number {
    return this.entries.length;
  }

  restore(index: number): QueryDraft {
    const entry = this.entries[index];
    if (!entry) throw new Error(`no history entry at ${index}`);
    return cloneDraft(entry.draft);
  }
}
