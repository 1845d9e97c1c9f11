// DOM wiring: render the item under review, submit decisions, keyboard
// shortcuts (a accept / r reject / e edit / n skip), progress counts and
// the outbox indicator. Item content is rendered byte-faithful via
// textContent, never innerHTML.

import { ReviewApi } from './api.js';
import { DecisionOutbox, LocalStorageAdapter } from './retry.js';
import { ReviewSession } from './session.js';
import type { QueueItem } from './types.js';
import { bannedTokenWarnings } from './validation.js';

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderMcq(item: QueueItem, card: HTMLElement): void {
  card.appendChild(el('h3', 'question', String(item.question ?? '')));
  const options = Array.isArray(item.options) ? (item.options as string[]) : [];
  const answerIndex = typeof item.answer_index === 'number' ? item.answer_index : -1;
  const list = el('ol', 'options');
  options.forEach((option, i) => {
    const li = el('li', i + 1 === answerIndex ? 'option claimed-answer' : 'option', option);
    list.appendChild(li);
  });
  card.appendChild(list);
  if (typeof item.explanation === 'string' && item.explanation) {
    card.appendChild(el('p', 'explanation', item.explanation));
  }
  card.appendChild(el('p', 'meta', `category: ${String(item.category ?? '')}`));
  const banned = bannedTokenWarnings(item);
  if (banned.length > 0) {
    card.appendChild(el('span', 'badge banned', `banned tokens: ${banned.join(', ')}`));
  }
}

function renderGeneric(item: QueueItem, card: HTMLElement): void {
  const skip = new Set(['item_id', 'kind', 'review_status']);
  for (const [key, value] of Object.entries(item)) {
    if (skip.has(key)) continue;
    card.appendChild(el('h4', 'field-name', key));
    const body = typeof value === 'string' ? value : JSON.stringify(value, null, 2);
    const pre = el('pre', 'field-value');
    pre.textContent = body;
    card.appendChild(pre);
  }
}

export class App {
  private session: ReviewSession;
  private editOpen = false;

  constructor(private readonly root: HTMLElement) {
    const api = new ReviewApi('');
    const outbox = new DecisionOutbox((d) => api.postDecision(d), new LocalStorageAdapter());
    this.session = new ReviewSession(api, { outbox });
  }

  async start(): Promise<void> {
    await this.session.load();
    this.bindKeys();
    this.render();
    // retry anything left over from an interrupted session
    void this.session.outbox.flush().then(() => this.render());
  }

  private bindKeys(): void {
    document.addEventListener('keydown', (event) => {
      if (this.editOpen || event.target instanceof HTMLTextAreaElement) return;
      if (event.key === 'a') void this.decide('accept');
      if (event.key === 'r') void this.decide('reject');
      if (event.key === 'e') this.openEditor();
      if (event.key === 'n') {
        this.session.skip();
        this.render();
      }
    });
  }

  private async decide(verdict: 'accept' | 'reject'): Promise<void> {
    const note =
      verdict === 'reject'
        ? (document.getElementById('note-input') as HTMLInputElement | null)?.value ?? ''
        : '';
    const result = await this.session.decide(verdict, note ? { note } : {});
    this.flash(result.ok ? `${verdict} submitted` : result.errors.join('; '));
    this.render();
  }

  private openEditor(): void {
    const item = this.session.current();
    if (!item) return;
    this.editOpen = true;
    this.render();
  }

  private async saveEdit(textarea: HTMLTextAreaElement): Promise<void> {
    const item = this.session.current();
    if (!item) return;
    let payload: Record<string, unknown>;
    try {
      payload = JSON.parse(textarea.value) as Record<string, unknown>;
    } catch (error) {
      this.flash(`invalid JSON: ${String(error)}`);
      return;
    }
    const result = await this.session.decide('edit', { edited: payload });
    if (!result.ok) {
      this.flash(`edit blocked: ${result.errors.join('; ')}`);
      return;
    }
    if (result.outcome.status === 'rejected') {
      this.flash(`server rejected edit: ${result.outcome.detail}`);
      return;
    }
    this.editOpen = false;
    this.flash(result.warnings.length > 0 ? `saved with warnings: ${result.warnings.join('; ')}` : 'edit saved');
    this.render();
  }

  private flash(message: string): void {
    const bar = document.getElementById('flash');
    if (bar) bar.textContent = message;
  }

  render(): void {
    this.root.textContent = '';
    const stats = this.session.stats;
    const header = el('div', 'progress');
    if (stats) {
      header.textContent =
        `pending ${stats.pending} / total ${stats.total} — ` +
        `accepted ${stats.accept}, rejected ${stats.reject}, edited ${stats.edit}` +
        (this.session.outbox.pendingCount > 0
          ? ` — ${this.session.outbox.pendingCount} unsent (retrying)`
          : '');
    }
    this.root.appendChild(header);
    this.root.appendChild(el('div', 'flash-bar', ''));
    this.root.lastElementChild!.id = 'flash';

    const item = this.session.current();
    if (!item) {
      this.root.appendChild(el('p', 'done', 'Queue empty: nothing pending review.'));
      return;
    }

    const card = el('div', `card kind-${item.kind}`);
    card.appendChild(el('div', 'item-id', `${item.item_id} (${item.kind})`));
    if (item.kind === 'mcq') {
      renderMcq(item, card);
    } else {
      renderGeneric(item, card);
    }
    this.root.appendChild(card);

    if (this.editOpen) {
      const editable: Record<string, unknown> = {};
      for (const [key, value] of Object.entries(item)) {
        if (key !== 'item_id' && key !== 'review_status') editable[key] = value;
      }
      const textarea = el('textarea', 'edit-area') as HTMLTextAreaElement;
      textarea.value = JSON.stringify(editable, null, 2);
      this.root.appendChild(textarea);
      const save = el('button', 'action save', 'Save edit');
      save.addEventListener('click', () => void this.saveEdit(textarea));
      const cancel = el('button', 'action cancel', 'Cancel');
      cancel.addEventListener('click', () => {
        this.editOpen = false;
        this.render();
      });
      this.root.appendChild(save);
      this.root.appendChild(cancel);
      return;
    }

    const actions = el('div', 'actions');
    const accept = el('button', 'action accept', 'Accept (a)');
    accept.addEventListener('click', () => void this.decide('accept'));
    const reject = el('button', 'action reject', 'Reject (r)');
    reject.addEventListener('click', () => void this.decide('reject'));
    const edit = el('button', 'action edit', 'Edit (e)');
    edit.addEventListener('click', () => this.openEditor());
    const skip = el('button', 'action skip', 'Skip (n)');
    skip.addEventListener('click', () => {
      this.session.skip();
      this.render();
    });
    const note = el('input', 'note') as HTMLInputElement;
    note.id = 'note-input';
    note.placeholder = 'optional reject note';
    actions.append(accept, reject, edit, skip, note);
    this.root.appendChild(actions);
  }
}

if (typeof document !== 'undefined') {
  window.addEventListener('DOMContentLoaded', () => {
    const root = document.getElementById('app');
    if (root) void new App(root).start();
  });
}
