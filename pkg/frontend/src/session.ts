// Review session state: the pending queue in forge order, the item under
// review, and decision submission with client-side edit validation. The
// server stays the ordering authority; after a successful decision the item
// is removed locally and the next pending item comes up.

import type { ReviewApi } from './api.js';
import { DecisionOutbox, type SubmitOutcome } from './retry.js';
import type { Decision, QueueItem, Stats, Verdict } from './types.js';
import { validateEdit } from './validation.js';

export type DecideResult =
  | { ok: true; outcome: SubmitOutcome; warnings: string[] }
  | { ok: false; errors: string[] };

export class ReviewSession {
  items: QueueItem[] = [];
  stats: Stats | null = null;
  reviewer: string;
  readonly outbox: DecisionOutbox;

  constructor(
    private readonly api: ReviewApi,
    options: { reviewer?: string; outbox?: DecisionOutbox } = {},
  ) {
    this.reviewer = options.reviewer ?? 'reviewer';
    this.outbox = options.outbox ?? new DecisionOutbox((d) => api.postDecision(d));
  }

  async load(kind?: string): Promise<void> {
    const response = await this.api.fetchQueue(kind);
    this.items = response.items;
    this.stats = response.stats;
  }

  current(): QueueItem | null {
    return this.items.length > 0 ? this.items[0] : null;
  }

  skip(): void {
    // local-only reordering; the item stays pending on the server
    if (this.items.length > 1) {
      const [head, ...rest] = this.items;
      this.items = [...rest, head];
    }
  }

  async decide(
    verdict: Verdict,
    options: { edited?: Record<string, unknown>; note?: string } = {},
  ): Promise<DecideResult> {
    const item = this.current();
    if (item === null) {
      return { ok: false, errors: ['no item under review'] };
    }
    if (verdict === 'edit') {
      if (!options.edited) {
        return { ok: false, errors: ['edit requires an edited payload'] };
      }
      const errors = validateEdit(item.kind, options.edited);
      if (errors.length > 0) {
        return { ok: false, errors };
      }
    }
    const decision: Decision = {
      item_id: item.item_id,
      verdict,
      reviewer: this.reviewer,
      ...(options.edited ? { edited_item: options.edited } : {}),
      ...(options.note ? { note: options.note } : {}),
    };
    const outcome = await this.outbox.submit(decision);
    if (outcome.status === 'rejected') {
      // surfaced verbatim; the item stays under review
      return { ok: true, outcome, warnings: [] };
    }
    // sent or queued for retry: advance optimistically
    this.items = this.items.filter((i) => i.item_id !== item.item_id);
    const warnings = outcome.status === 'sent' ? outcome.response.warnings : [];
    if (outcome.status === 'sent') {
      this.stats = outcome.response.stats;
    }
    return { ok: true, outcome, warnings };
  }
}
