import type { QueryDraft, QueryRequest, TermChip } from "./types";

export const WEIGHT_MIN = -3;
export const WEIGHT_MAX = 3;
export const WEIGHT_STEP = 0.5;
export const DEFAULT_K = 12;

/**
 * Clamp into [WEIGHT_MIN, WEIGHT_MAX] and snap to the nearest half step.
 * Half steps are exact in binary floating point, so snapped weights
 * serialize cleanly.
 */
export function snapWeight(weight: number): number {
  if (!Number.isFinite(weight)) return 0;
  const clamped = Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, weight));
  return Math.round(clamped / WEIGHT_STEP) * WEIGHT_STEP;
}

export function emptyDraft(k: number = DEFAULT_K): QueryDraft {
  return { chips: [], k };
}

export function cloneDraft(draft: QueryDraft): QueryDraft {
  return { chips: draft.chips.map((chip) => ({ ...chip })), k: draft.k };
}

export function addTextChip(draft: QueryDraft, text: string, weight = 1): QueryDraft {
  const value = text.trim();
  if (!value) return cloneDraft(draft);
  const chip: TermChip = { type: "text", value, weight: snapWeight(weight), enabled: true };
  return { chips: [...draft.chips.map((c) => ({ ...c })), chip], k: draft.k };
}

/**
 * Append a result image as a query term with weight +1. Picking the
 * same image twice is allowed: two chips compose linearly into an
 * effective weight of 2.
 */
export function pickImageAsTerm(draft: QueryDraft, itemId: string): QueryDraft {
  const chip: TermChip = { type: "image_id", value: itemId, weight: 1, enabled: true };
  return { chips: [...draft.chips.map((c) => ({ ...c })), chip], k: draft.k };
}

function mapChip(
  draft: QueryDraft,
  index: number,
  change: (chip: TermChip) => TermChip,
): QueryDraft {
  if (index < 0 || index >= draft.chips.length) return cloneDraft(draft);
  return {
    chips: draft.chips.map((chip, i) => (i === index ? change({ ...chip }) : { ...chip })),
    k: draft.k,
  };
}

export function setChipWeight(draft: QueryDraft, index: number, weight: number): QueryDraft {
  return mapChip(draft, index, (chip) => ({ ...chip, weight: snapWeight(weight) }));
}

export function stepChipWeight(draft: QueryDraft, index: number, direction: 1 | -1): QueryDraft {
  const chip = draft.chips[index];
  if (!chip) return cloneDraft(draft);
  return setChipWeight(draft, index, chip.weight + direction * WEIGHT_STEP);
}

export function toggleChip(draft: QueryDraft, index: number): QueryDraft {
  return mapChip(draft, index, (chip) => ({ ...chip, enabled: !chip.enabled }));
}

export function removeChip(draft: QueryDraft, index: number): QueryDraft {
  return {
    chips: draft.chips.filter((_, i) => i !== index).map((c) => ({ ...c })),
    k: draft.k,
  };
}

export function setResultSize(draft: QueryDraft, k: number): QueryDraft {
  const size = Number.isFinite(k) ? Math.min(50, Math.max(1, Math.round(k))) : DEFAULT_K;
  return { chips: draft.chips.map((c) => ({ ...c })), k: size };
}

/**
 * The service quotes the offending term value in its 400 reason.
 * Returns the indexes of chips whose value appears quoted in the message,
 * so the error can be pinned on the culprit chip instead of a global banner.
 */
export function faultyChipIndexes(chips: TermChip[], message: string): Set<number> {
  const out = new Set<number>();
  chips.forEach((chip, i) => {
    if (message.includes(`'${chip.value}'`)) out.add(i);
  });
  return out;
}

export function enabledChips(draft: QueryDraft): TermChip[] {
  return draft.chips.filter((chip) => chip.enabled);
}

export function canSubmit(draft: QueryDraft): boolean {
  return enabledChips(draft).length > 0;
}

/**
 * The request body sent to POST /api/query. A pure function of the
 * draft: enabled chips only, in chip order, weights as rendered.
 */
export function buildQueryRequest(draft: QueryDraft): QueryRequest {
  return {
    terms: enabledChips(draft).map(({ type, value, weight }) => ({ type, value, weight })),
    k: draft.k,
  };
}
