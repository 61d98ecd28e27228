// Console state and its transitions. Writes follow a strict
// refresh-after-write discipline: a train action is only reflected once the
// server's latest hypothesis has been re-fetched, so the displayed version
// always matches the server.

import type { HypothesisBody, TrainStepBody, VerdictBody } from './api.js';

export interface TimelineEntry {
  window: string;
  action: string;
  before: string[];
  after: string[];
  note: string;
}

export interface VerdictCard {
  handle: string;
  status: 'ethical' | 'unethical' | 'unknown';
  firedRules: string[];
  verdict: VerdictBody;
}

export interface ConsoleState {
  version: number;
  clauses: string[];
  supportSizes: number[];
  vocabulary: string[];
  timeline: TimelineEntry[];
  lastVerdict: VerdictCard | null;
  banner: string | null;
}

export function initialState(): ConsoleState {
  return {
    version: 0,
    clauses: [],
    supportSizes: [],
    vocabulary: [],
    timeline: [],
    lastVerdict: null,
    banner: null,
  };
}

export function withHypothesis(state: ConsoleState, body: HypothesisBody): ConsoleState {
  return {
    ...state,
    version: body.version,
    clauses: body.clauses.map((c) => c.text),
    supportSizes: body.clauses.map((c) => c.supportSize),
    vocabulary: body.annotationVocabulary,
    timeline: body.revisionLog.map((entry) => ({
      window: entry.window,
      action: entry.action,
      before: entry.before,
      after: entry.after,
      note: entry.note,
    })),
    banner: null,
  };
}

export function withTrainStep(
  state: ConsoleState,
  step: TrainStepBody,
  refreshed: HypothesisBody,
): ConsoleState {
  // the step's own action is what the timeline shows; clause state comes from
  // the post-write fetch so version and text cannot drift from the server
  const next = withHypothesis(state, refreshed);
  if (next.timeline.length === 0) {
    next.timeline = [
      {
        window: step.window,
        action: step.action,
        before: step.before,
        after: step.after,
        note: step.note,
      },
    ];
  }
  return next;
}

export function withVerdict(
  state: ConsoleState,
  handle: string,
  verdict: VerdictBody,
): ConsoleState {
  return {
    ...state,
    lastVerdict: {
      handle,
      status: verdict.status,
      firedRules: verdict.firedRules.map((f) => f.rule),
      verdict,
    },
    banner: null,
  };
}

export function withBanner(state: ConsoleState, message: string): ConsoleState {
  return { ...state, banner: message };
}

export function diffLiterals(before: string, after: string): string[] {
  // crude but honest: report body literals present in `after` and not in
  // `before`, using only the server's canonical renderings
  const bodyOf = (text: string) => {
    const idx = text.indexOf(':-');
    if (idx < 0) return [] as string[];
    return text
      .slice(idx + 2)
      .replace(/\.$/, '')
      .split(',')
      .map((s) => s.trim())
      .filter(Boolean);
  };
  const old = new Set(bodyOf(before));
  return bodyOf(after).filter((lit) => !old.has(lit));
}
