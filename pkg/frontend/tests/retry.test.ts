import { describe, expect, it } from 'vitest';

import { ApiRejection } from '../src/api.js';
import { DecisionOutbox, MemoryStorage } from '../src/retry.js';
import type { Decision, DecisionResponse } from '../src/types.js';

const STATS = { accept: 0, reject: 0, edit: 0, pending: 0, total: 0 };

function decision(id: string): Decision {
  return { item_id: id, verdict: 'accept', reviewer: 'r' };
}

function flakySender(failFirst: number) {
  let calls = 0;
  const sent: string[] = [];
  const send = async (d: Decision): Promise<DecisionResponse> => {
    calls += 1;
    if (calls <= failFirst) throw new TypeError('network down');
    sent.push(d.item_id);
    return { decided: d.item_id, warnings: [], stats: STATS };
  };
  return { send, sent, callCount: () => calls };
}

describe('DecisionOutbox', () => {
  it('sends directly when the network is up', async () => {
    const { send, sent } = flakySender(0);
    const outbox = new DecisionOutbox(send);
    const outcome = await outbox.submit(decision('a'));
    expect(outcome.status).toBe('sent');
    expect(sent).toEqual(['a']);
    expect(outbox.pendingCount).toBe(0);
  });

  it('retains decisions on network failure and retries them in order', async () => {
    const { send, sent } = flakySender(2);
    const outbox = new DecisionOutbox(send);
    expect((await outbox.submit(decision('a'))).status).toBe('queued');
    expect((await outbox.submit(decision('b'))).status).toBe('queued');
    expect(outbox.pendingCount).toBe(2);

    const result = await outbox.flush();
    expect(result).toEqual({ sent: 2, rejected: 0, remaining: 0 });
    expect(sent).toEqual(['a', 'b']);
  });

  it('keeps unsent decisions across a reload via storage', async () => {
    const storage = new MemoryStorage();
    const broken = new DecisionOutbox(async () => {
      throw new TypeError('offline');
    }, storage);
    await broken.submit(decision('a'));
    expect(storage.load()).toHaveLength(1);

    const { send, sent } = flakySender(0);
    const revived = new DecisionOutbox(send, storage);
    expect(revived.pendingCount).toBe(1);
    await revived.flush();
    expect(sent).toEqual(['a']);
    expect(storage.load()).toHaveLength(0);
  });

  it('does not retry server rejections', async () => {
    const outbox = new DecisionOutbox(async () => {
      throw new ApiRejection(409, 'already decided');
    });
    const outcome = await outbox.submit(decision('a'));
    expect(outcome.status).toBe('rejected');
    expect(outcome.status === 'rejected' && outcome.detail).toBe('already decided');
    expect(outbox.pendingCount).toBe(0);
  });

  it('flush drops decisions the server rejects but keeps network failures', async () => {
    let calls = 0;
    const outbox = new DecisionOutbox(async (d: Decision) => {
      calls += 1;
      if (d.item_id === 'dup') throw new ApiRejection(409, 'already decided');
      if (d.item_id === 'net' && calls < 10) throw new TypeError('still offline');
      return { decided: d.item_id, warnings: [], stats: STATS };
    });
    // seed the queue through failed submits
    const offline = new DecisionOutbox(async () => {
      throw new TypeError('offline');
    });
    await offline.submit(decision('dup'));
    await offline.submit(decision('net'));
    // move its queue over by replaying through storage semantics
    const storage = new MemoryStorage();
    storage.save([decision('dup'), decision('net')]);
    const revived = new DecisionOutbox(
      async (d: Decision) => {
        if (d.item_id === 'dup') throw new ApiRejection(409, 'already decided');
        throw new TypeError('still offline');
      },
      storage,
    );
    const result = await revived.flush();
    expect(result.rejected).toBe(1);
    expect(result.remaining).toBe(1);
    expect(revived.pendingCount).toBe(1);
  });
});
