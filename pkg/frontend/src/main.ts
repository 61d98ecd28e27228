// Bootstraps the console: initial hypothesis fetch, form wiring, and the
// refresh-after-write loop around training.

import { ApiClient, ApiError } from './api.js';
import type { ScenarioBody } from './api.js';
import {
  ConsoleState,
  initialState,
  withBanner,
  withHypothesis,
  withTrainStep,
  withVerdict,
} from './state.js';
import { render, syncSubmitState } from './ui.js';

export class Console {
  state: ConsoleState = initialState();

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.state = withHypothesis(this.state, await this.client.hypothesis());
    this.renderAndWire();
  }

  private renderAndWire(): void {
    render(this.state, this.root);
    const trainForm = this.root.querySelector<HTMLFormElement>('#train-form')!;
    trainForm.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitTraining();
    });
    trainForm.addEventListener('input', () => syncSubmitState(this.root));
    const chatForm = this.root.querySelector<HTMLFormElement>('#chat-form')!;
    chatForm.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitChat();
    });
    chatForm.addEventListener('input', () => syncSubmitState(this.root));
  }

  private scenarioFrom(prefix: 'train' | 'chat'): ScenarioBody {
    const value = (id: string) =>
      this.root.querySelector<HTMLInputElement>(`#${id}`)?.value.trim() ?? '';
    const boxes = this.root.querySelectorAll<HTMLInputElement>(
      prefix === 'train'
        ? 'input[name="annotation"]:checked'
        : 'input[name="chat-annotation"]:checked',
    );
    const scenario: ScenarioBody = {
      request: { product: value(`${prefix}-product`) },
      response: { handle: value(`${prefix}-handle`) },
      annotations: Array.from(boxes, (b) => b.value),
    };
    if (prefix === 'train') {
      const label = this.root.querySelector<HTMLInputElement>(
        'input[name="label"]:checked',
      );
      if (label) scenario.label = label.value as 'ethical' | 'unethical';
    }
    return scenario;
  }

  async submitTraining(): Promise<void> {
    const scenario = this.scenarioFrom('train');
    try {
      const step = await this.client.train(scenario);
      // strict refresh-after-write: display only the server's latest state
      const refreshed = await this.client.hypothesis();
      this.state = withTrainStep(this.state, step, refreshed);
    } catch (err) {
      this.state = withBanner(this.state, describe(err));
    }
    this.renderAndWire();
  }

  async submitChat(): Promise<void> {
    const scenario = this.scenarioFrom('chat');
    try {
      const verdict = await this.client.evaluate(scenario);
      this.state = withVerdict(this.state, scenario.response.handle, verdict);
    } catch (err) {
      this.state = withBanner(this.state, describe(err));
    }
    this.renderAndWire();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    const detail = err.detail ? ` — ${err.detail}` : '';
    return `${err.code}: ${err.message}${detail}`;
  }
  return String(err);
}

export async function bootstrap(root: HTMLElement, baseUrl = ''): Promise<Console> {
  const console_ = new Console(root, new ApiClient(baseUrl));
  await console_.start();
  return console_;
}

declare global {
  interface Window {
    ethoschatConsole?: Console;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void bootstrap(document.getElementById('app')!).then((instance) => {
    window.ethoschatConsole = instance;
  });
}
