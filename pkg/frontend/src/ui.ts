// DOM rendering. Every rule string on screen is a server rendering; the
// console never parses or rebuilds rule text.

import type { DerivationNode } from './api.js';
import type { ConsoleState, TimelineEntry } from './state.js';
import { diffLiterals } from './state.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderDerivation(node: DerivationNode): HTMLElement {
  if (node.kind === 'fact') {
    const leaf = el('div', 'derivation-leaf fact');
    leaf.append(el('span', 'atom', node.atom), el('span', 'leaf-kind', 'fact'));
    return leaf;
  }
  if (node.kind === 'naf') {
    const leaf = el('div', 'derivation-leaf naf');
    leaf.append(el('span', 'atom', node.atom), el('span', 'leaf-kind', 'assumed absent'));
    return leaf;
  }
  const details = el('details', 'derivation-node');
  details.open = true;
  const summary = el('summary');
  summary.append(el('span', 'atom', node.atom), el('code', 'rule', node.rule ?? ''));
  details.append(summary);
  for (const child of node.children ?? []) {
    details.append(renderDerivation(child));
  }
  return details;
}

function renderTimelineEntry(entry: TimelineEntry): HTMLElement {
  const item = el('li', `timeline-entry action-${entry.action}`);
  item.dataset.window = entry.window;
  item.dataset.action = entry.action;
  const head = el('div', 'timeline-head');
  head.append(el('span', 'window-id', entry.window), el('span', 'action-badge', entry.action));
  item.append(head);

  const rows = el('div', 'timeline-diff');
  const beforeCol = el('div', 'diff-before');
  beforeCol.append(el('h4', undefined, 'before'));
  for (const clause of entry.before) beforeCol.append(el('code', 'clause', clause));
  if (!entry.before.length) beforeCol.append(el('code', 'clause empty', '(empty)'));
  const afterCol = el('div', 'diff-after');
  afterCol.append(el('h4', undefined, 'after'));
  const beforeSet = new Set(entry.before);
  for (const clause of entry.after) {
    const node = el('code', beforeSet.has(clause) ? 'clause' : 'clause changed', clause);
    afterCol.append(node);
  }
  if (!entry.after.length) afterCol.append(el('code', 'clause empty', '(empty)'));
  rows.append(beforeCol, afterCol);
  item.append(rows);

  const added = entry.after.flatMap((after) =>
    entry.before.flatMap((before) => diffLiterals(before, after)),
  );
  if (entry.action === 'specialize' && added.length) {
    item.append(el('div', 'added-literals', `added: ${[...new Set(added)].join(', ')}`));
  }
  return item;
}

export function render(state: ConsoleState, root: HTMLElement): void {
  root.textContent = '';

  if (state.banner) {
    const banner = el('div', 'banner error', state.banner);
    banner.id = 'banner';
    root.append(banner);
  }

  // --- hypothesis panel ---
  const hypothesis = el('section', 'hypothesis-panel');
  hypothesis.id = 'hypothesis';
  hypothesis.append(el('h2', undefined, `Hypothesis (version ${state.version})`));
  const clauseList = el('ul', 'clauses');
  for (const [i, clause] of state.clauses.entries()) {
    const item = el('li', 'clause-item');
    item.append(
      el('code', 'clause', clause),
      el('span', 'support-size', `support: ${state.supportSizes[i] ?? 0}`),
    );
    clauseList.append(item);
  }
  if (!state.clauses.length) clauseList.append(el('li', 'clause-item empty', 'no learned rules yet'));
  hypothesis.append(clauseList);
  root.append(hypothesis);

  // --- training form ---
  const trainSection = el('section', 'train-panel');
  const trainForm = el('form');
  trainForm.id = 'train-form';
  trainForm.append(el('h2', undefined, 'Train'));
  const product = el('input');
  product.id = 'train-product';
  product.placeholder = 'product handle';
  const handle = el('input');
  handle.id = 'train-handle';
  handle.placeholder = 'response handle';
  trainForm.append(product, handle);

  const annotations = el('fieldset', 'annotations');
  annotations.append(el('legend', undefined, 'annotations'));
  for (const name of state.vocabulary) {
    const label = el('label', 'annotation');
    const box = el('input');
    box.type = 'checkbox';
    box.name = 'annotation';
    box.value = name;
    label.append(box, el('span', undefined, name));
    annotations.append(label);
  }
  trainForm.append(annotations);

  const labels = el('fieldset', 'labels');
  labels.append(el('legend', undefined, 'label'));
  for (const value of ['ethical', 'unethical']) {
    const label = el('label', 'label-choice');
    const radio = el('input');
    radio.type = 'radio';
    radio.name = 'label';
    radio.value = value;
    label.append(radio, el('span', undefined, value));
    labels.append(label);
  }
  trainForm.append(labels);

  const trainSubmit = el('button', undefined, 'train');
  trainSubmit.id = 'train-submit';
  trainSubmit.type = 'submit';
  trainForm.append(trainSubmit);
  trainSection.append(trainForm);
  root.append(trainSection);

  // --- chat (test phase) form ---
  const chatSection = el('section', 'chat-panel');
  const chatForm = el('form');
  chatForm.id = 'chat-form';
  chatForm.append(el('h2', undefined, 'Chat'));
  const chatProduct = el('input');
  chatProduct.id = 'chat-product';
  chatProduct.placeholder = 'product handle';
  const chatHandle = el('input');
  chatHandle.id = 'chat-handle';
  chatHandle.placeholder = 'response handle';
  chatForm.append(chatProduct, chatHandle);
  const chatAnnotations = el('fieldset', 'annotations');
  chatAnnotations.append(el('legend', undefined, 'annotations'));
  for (const name of state.vocabulary) {
    const label = el('label', 'annotation');
    const box = el('input');
    box.type = 'checkbox';
    box.name = 'chat-annotation';
    box.value = name;
    label.append(box, el('span', undefined, name));
    chatAnnotations.append(label);
  }
  chatForm.append(chatAnnotations);
  const chatSubmit = el('button', undefined, 'evaluate');
  chatSubmit.id = 'chat-submit';
  chatSubmit.type = 'submit';
  chatForm.append(chatSubmit);
  chatSection.append(chatForm);

  if (state.lastVerdict) {
    const card = el('div', `verdict-card ${state.lastVerdict.status}`);
    card.id = 'verdict-card';
    card.dataset.status = state.lastVerdict.status;
    card.append(
      el('h3', undefined, state.lastVerdict.handle),
      el('div', 'verdict-status', state.lastVerdict.status),
    );
    if (state.lastVerdict.verdict.contested) {
      card.append(el('div', 'contested', 'worlds disagree: review this case'));
    }
    for (const rule of state.lastVerdict.firedRules) {
      card.append(el('code', 'fired-rule', rule));
    }
    const derivation = state.lastVerdict.verdict.derivation;
    if (derivation) {
      const tree = el('div', 'derivation');
      tree.id = 'derivation';
      tree.append(renderDerivation(derivation));
      card.append(tree);
    }
    chatSection.append(card);
  }
  root.append(chatSection);

  // --- revision timeline ---
  const timelineSection = el('section', 'timeline-panel');
  timelineSection.append(el('h2', undefined, 'Revision timeline'));
  const list = el('ol', 'timeline');
  list.id = 'timeline';
  for (const entry of state.timeline) list.append(renderTimelineEntry(entry));
  timelineSection.append(list);
  root.append(timelineSection);

  syncSubmitState(root);
}

export function syncSubmitState(root: HTMLElement): void {
  const trainForm = root.querySelector<HTMLFormElement>('#train-form');
  if (trainForm) {
    const product = trainForm.querySelector<HTMLInputElement>('#train-product')!;
    const handle = trainForm.querySelector<HTMLInputElement>('#train-handle')!;
    const label = trainForm.querySelector<HTMLInputElement>('input[name="label"]:checked');
    const submit = trainForm.querySelector<HTMLButtonElement>('#train-submit')!;
    submit.disabled = !product.value.trim() || !handle.value.trim() || !label;
  }
  const chatForm = root.querySelector<HTMLFormElement>('#chat-form');
  if (chatForm) {
    const product = chatForm.querySelector<HTMLInputElement>('#chat-product')!;
    const handle = chatForm.querySelector<HTMLInputElement>('#chat-handle')!;
    const submit = chatForm.querySelector<HTMLButtonElement>('#chat-submit')!;
    submit.disabled = !product.value.trim() || !handle.value.trim();
  }
}
