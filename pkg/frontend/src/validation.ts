// Client-side mirror of the server's edit invariants. Structural failures
// block submission with the same rules the server enforces; banned-token
// findings only badge the item (the server accepts such edits with a
// warning, since a human reviewer outranks the generation-time filter).

import { INSTRUCT_KINDS, MCQ_CATEGORIES } from './types.js';

const BANNED_PATTERNS: Array<[string, RegExp]> = [
  ['proposed', /\bproposed\b/i],
  ['the invention', /\bthe\s+invention\b/i],
  ['text', /\btext\b/i],
  ['paper', /\bpaper\b/i],
];

export function validateEdit(kind: string, payload: Record<string, unknown>): string[] {
  switch (kind) {
    case 'mcq':
      return validateMcq(payload);
    case 'instruct':
      return validateInstruct(payload);
    case 'masked-equation':
      return validateMaskedEquation(payload);
    case 'code-task':
      return validateCodeTask(payload);
    case 'tdoc-class':
      return requireNonEmpty(payload, ['text', 'label']);
    case 'preference-pair':
      return validatePreferencePair(payload);
    default:
      return [`unknown item kind ${kind}`];
  }
}

function validateMcq(payload: Record<string, unknown>): string[] {
  const errors: string[] = [];
  const question = payload.question;
  if (typeof question !== 'string' || question.trim() === '') {
    errors.push('question must be non-empty');
  }
  const options = payload.options;
  if (!Array.isArray(options) || options.length < 2) {
    errors.push('an MCQ needs at least two options');
  } else if (options.some((o) => typeof o !== 'string' || o.trim() === '')) {
    errors.push('options must be non-empty');
  }
  const answer = payload.answer_index;
  const count = Array.isArray(options) ? options.length : 0;
  if (typeof answer !== 'number' || !Number.isInteger(answer) || answer < 1 || answer > count) {
    errors.push(`answer_index must be an integer in 1..${count}`);
  }
  const category = payload.category;
  if (typeof category !== 'string' || !(MCQ_CATEGORIES as readonly string[]).includes(category)) {
    errors.push('unknown MCQ category');
  }
  return errors;
}

function validateInstruct(payload: Record<string, unknown>): string[] {
  const errors = requireNonEmpty(payload, ['instruction', 'response']);
  const kind = payload.instruct_kind;
  if (typeof kind !== 'string' || !(INSTRUCT_KINDS as readonly string[]).includes(kind)) {
    errors.push('unknown instruct kind');
  }
  return errors;
}

function validateMaskedEquation(payload: Record<string, unknown>): string[] {
  const errors = requireNonEmpty(payload, ['context', 'ground_truth_equation']);
  const context = payload.context;
  if (typeof context === 'string') {
    const masks = context.split('<MASK>').length - 1;
    if (masks !== 1) errors.push('context must contain exactly one <MASK>');
  }
  return errors;
}

function validateCodeTask(payload: Record<string, unknown>): string[] {
  const errors = requireNonEmpty(payload, ['prompt', 'ground_truth']);
  if (payload.task === 'infill' && typeof payload.prompt === 'string') {
    const fills = payload.prompt.split('<FILL>').length - 1;
    if (fills !== 1) errors.push('infill prompts must contain exactly one <FILL>');
  }
  return errors;
}

function validatePreferencePair(payload: Record<string, unknown>): string[] {
  const errors = requireNonEmpty(payload, ['chosen', 'rejected']);
  if (payload.chosen === payload.rejected) {
    errors.push('chosen and rejected must differ');
  }
  return errors;
}

function requireNonEmpty(payload: Record<string, unknown>, fields: string[]): string[] {
  const errors: string[] = [];
  for (const field of fields) {
    const value = payload[field];
    if (typeof value !== 'string' || value.trim() === '') {
      errors.push(`${field} must be non-empty`);
    }
  }
  return errors;
}

/** Banned tokens found in the visible text of an MCQ payload. */
export function bannedTokenWarnings(payload: Record<string, unknown>): string[] {
  const parts: string[] = [];
  if (typeof payload.question === 'string') parts.push(payload.question);
  if (Array.isArray(payload.options)) {
    for (const option of payload.options) {
      if (typeof option === 'string') parts.push(option);
    }
  }
  if (typeof payload.explanation === 'string') parts.push(payload.explanation);
  const haystack = parts.join('\n');
  return BANNED_PATTERNS.filter(([, re]) => re.test(haystack)).map(([name]) => name);
}
