import { describe, expect, it } from 'vitest';

import { bannedTokenWarnings, validateEdit } from '../src/validation.js';

function mcqPayload(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    kind: 'mcq',
    question: 'Which duplexing mode separates directions in frequency?',
    options: ['FDD', 'TDD'],
    answer_index: 1,
    explanation: 'Frequency-division duplexing uses paired bands.',
    category: 'lexicon',
    ...overrides,
  };
}

describe('validateEdit for MCQs', () => {
  it('accepts a well-formed payload', () => {
    expect(validateEdit('mcq', mcqPayload())).toEqual([]);
  });

  it('blocks an out-of-range answer index, mirroring the server rule', () => {
    const errors = validateEdit('mcq', mcqPayload({ answer_index: 9 }));
    expect(errors.some((e) => e.includes('answer_index'))).toBe(true);
  });

  it('blocks zero and non-integer answer indexes', () => {
    expect(validateEdit('mcq', mcqPayload({ answer_index: 0 }))).not.toEqual([]);
    expect(validateEdit('mcq', mcqPayload({ answer_index: 1.5 }))).not.toEqual([]);
  });

  it('requires at least two non-empty options', () => {
    expect(validateEdit('mcq', mcqPayload({ options: ['only'], answer_index: 1 }))).not.toEqual([]);
    expect(validateEdit('mcq', mcqPayload({ options: ['a', '  '] }))).not.toEqual([]);
  });

  it('requires a known category', () => {
    expect(validateEdit('mcq', mcqPayload({ category: 'trivia' }))).not.toEqual([]);
  });

  it('requires a non-empty question', () => {
    expect(validateEdit('mcq', mcqPayload({ question: '   ' }))).not.toEqual([]);
  });
});

describe('validateEdit for other kinds', () => {
  it('checks instruct items', () => {
    expect(
      validateEdit('instruct', {
        instruct_kind: 'open-qa',
        instruction: 'Explain handover.',
        input: '',
        response: 'A handover moves the session between cells.',
      }),
    ).toEqual([]);
    expect(
      validateEdit('instruct', { instruct_kind: 'open-qa', instruction: '', input: '', response: 'x' }),
    ).not.toEqual([]);
  });

  it('checks the single-mask invariant on masked equations', () => {
    expect(
      validateEdit('masked-equation', {
        doc_id: 'd',
        context: 'before <MASK> after',
        ground_truth_equation: 'x = y + z',
        equation_ordinal: 0,
      }),
    ).toEqual([]);
    expect(
      validateEdit('masked-equation', {
        doc_id: 'd',
        context: 'no mask at all',
        ground_truth_equation: 'x = y + z',
        equation_ordinal: 0,
      }),
    ).not.toEqual([]);
  });

  it('checks the single-fill invariant on infill code tasks', () => {
    expect(
      validateEdit('code-task', {
        task: 'infill',
        language: 'python',
        prompt: 'a\n<FILL>\nc',
        ground_truth: 'b',
        source_id: 'f.py',
      }),
    ).toEqual([]);
    expect(
      validateEdit('code-task', {
        task: 'infill',
        language: 'python',
        prompt: 'no placeholder',
        ground_truth: 'b',
        source_id: 'f.py',
      }),
    ).not.toEqual([]);
  });

  it('rejects identical preference pair sides', () => {
    expect(
      validateEdit('preference-pair', { prompt: 'p', chosen: 'same', rejected: 'same' }),
    ).not.toEqual([]);
  });

  it('flags unknown kinds', () => {
    expect(validateEdit('mystery', {})).toEqual(['unknown item kind mystery']);
  });
});

describe('bannedTokenWarnings', () => {
  it('finds banned tokens in question, options and explanation', () => {
    const warnings = bannedTokenWarnings(
      mcqPayload({
        question: 'What does the proposed scheme do?',
        options: ['Reads the text', 'Nothing'],
        explanation: 'See the paper.',
      }),
    );
    expect(warnings.sort()).toEqual(['paper', 'proposed', 'text']);
  });

  it('matches whole words only', () => {
    expect(bannedTokenWarnings(mcqPayload({ question: 'What is the context of a handover?' }))).toEqual(
      [],
    );
    expect(bannedTokenWarnings(mcqPayload({ question: 'textbook knowledge of newspapers' }))).toEqual(
      [],
    );
  });

  it('detects the two-word phrase with flexible spacing', () => {
    expect(bannedTokenWarnings(mcqPayload({ explanation: 'per the  invention disclosed' }))).toEqual([
      'the invention',
    ]);
  });
});
