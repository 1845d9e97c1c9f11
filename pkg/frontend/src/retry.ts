// Outbox for decisions that could not reach the server. Network failures
// queue the decision for retry (never dropped); server rejections are NOT
// retried, they surface to the caller verbatim.

import { ApiRejection } from './api.js';
import type { Decision, DecisionResponse } from './types.js';

export interface OutboxStorage {
  load(): Decision[];
  save(pending: Decision[]): void;
}

export class MemoryStorage implements OutboxStorage {
  private pending: Decision[] = [];
  load(): Decision[] {
    return [...this.pending];
  }
  save(pending: Decision[]): void {
    this.pending = [...pending];
  }
}

export class LocalStorageAdapter implements OutboxStorage {
  constructor(private readonly key = 'telebench-review-outbox') {}
  load(): Decision[] {
    try {
      return JSON.parse(localStorage.getItem(this.key) ?? '[]') as Decision[];
    } catch {
      return [];
    }
  }
  save(pending: Decision[]): void {
    localStorage.setItem(this.key, JSON.stringify(pending));
  }
}

export type SubmitOutcome =
  | { status: 'sent'; response: DecisionResponse }
  | { status: 'queued' }
  | { status: 'rejected'; httpStatus: number; detail: string };

export class DecisionOutbox {
  private pending: Decision[];

  constructor(
    private readonly send: (decision: Decision) => Promise<DecisionResponse>,
    private readonly storage: OutboxStorage = new MemoryStorage(),
  ) {
    this.pending = storage.load();
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  /** Submit one decision; on network failure it is retained for retry. */
  async submit(decision: Decision): Promise<SubmitOutcome> {
    try {
      const response = await this.send(decision);
      return { status: 'sent', response };
    } catch (error) {
      if (error instanceof ApiRejection) {
        return { status: 'rejected', httpStatus: error.status, detail: error.detail };
      }
      this.pending.push(decision);
      this.storage.save(this.pending);
      return { status: 'queued' };
    }
  }

  /** Retry everything queued, in order; stops queueing on server rejections. */
  async flush(): Promise<{ sent: number; rejected: number; remaining: number }> {
    const queue = this.pending;
    this.pending = [];
    let sent = 0;
    let rejected = 0;
    for (const decision of queue) {
      try {
        await this.send(decision);
        sent += 1;
      } catch (error) {
        if (error instanceof ApiRejection) {
          rejected += 1; // the server saw and refused it; do not retry
        } else {
          this.pending.push(decision);
        }
      }
    }
    this.storage.save(this.pending);
    return { sent, rejected, remaining: this.pending.length };
  }
}
