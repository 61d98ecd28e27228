// Typed client for the /api/v1 endpoints. All rule text shown in the console
// comes from these responses verbatim; the client never re-renders rules.

export interface ScenarioBody {
  id?: string;
  request: { product: string };
  response: { handle: string };
  annotations: string[];
  label?: 'ethical' | 'unethical';
}

export interface FiredRule {
  rule: string;
  substitution: Record<string, string>;
}

export interface DerivationNode {
  atom: string;
  kind: 'rule' | 'fact' | 'naf';
  rule?: string;
  ground_rule?: string;
  substitution?: Record<string, string>;
  children?: DerivationNode[];
}

export interface VerdictBody {
  status: 'ethical' | 'unethical' | 'unknown';
  firedRules: FiredRule[];
  derivation?: DerivationNode;
  hypothesisVersion: number;
  contested: boolean;
  note?: string;
}

export interface TrainStepBody {
  window: string;
  action: string;
  before: string[];
  after: string[];
  note: string;
  hypothesisVersion: number;
  verdictBefore: VerdictBody;
}

export interface ClauseBody {
  text: string;
  ast: unknown;
  support: { window: string; head: string; body: string[] }[];
  supportSize: number;
}

export interface HypothesisBody {
  version: number;
  clauses: ClauseBody[];
  pool: { window: string; head: string; body: string[] }[];
  revisionLog: {
    window: string;
    action: string;
    before: string[];
    after: string[];
    note: string;
  }[];
  annotationVocabulary: string[];
  background: string;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public detail: string = '',
    public status: number = 0,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const err = body?.error ?? {};
    throw new ApiError(
      err.code ?? 'io',
      err.message ?? `request failed with ${response.status}`,
      err.detail ?? '',
      response.status,
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  async evaluate(scenario: ScenarioBody): Promise<VerdictBody> {
    const response = await fetch(this.url('/evaluate'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(scenario),
    });
    return asJson<VerdictBody>(response);
  }

  async train(scenario: ScenarioBody): Promise<TrainStepBody> {
    const response = await fetch(this.url('/train'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(scenario),
    });
    return asJson<TrainStepBody>(response);
  }

  async hypothesis(version?: number): Promise<HypothesisBody> {
    const suffix = version === undefined ? '' : `?version=${version}`;
    return asJson<HypothesisBody>(await fetch(this.url(`/hypothesis${suffix}`)));
  }

  async explain(atom: string): Promise<{ atom: string; derivation: DerivationNode }> {
    const query = encodeURIComponent(atom);
    return asJson(await fetch(this.url(`/explain?atom=${query}`)));
  }
}
