// Typed client for the reasoning service. The fetch implementation is
// injectable so tests can run against a mock or a live server from
// node.

export interface FactView {
  index: number;
  text: string;
  rendered: string;
}

export interface AnswerView {
  id: string;
  rendered: string;
  atom: string;
  refutations: number;
}

export interface QueryResponse {
  goal: string;
  answers: AnswerView[];
  truncated: boolean;
  limits_hit: string[];
}

export interface ProvenanceView {
  law_refs: string[];
  case_refs: string[];
  commentary_refs: string[];
}

export interface PremiseRef {
  node_id: string;
  rendered: string;
  is_fact: boolean;
}

export interface AlternativeView {
  rule_id: string;
  rendered_rule: string;
  provenance: ProvenanceView;
  premises: PremiseRef[];
}

export interface NodeView {
  id: string;
  rendered: string;
  is_fact: boolean;
  alternatives: AlternativeView[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }

  /** The service answers 409 when stored node ids were invalidated. */
  get isStale(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail: unknown;
      try {
        detail = ((await response.json()) as { detail?: unknown }).detail;
      } catch {
        detail = response.statusText;
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(): Promise<{ id: string; facts: FactView[] }> {
    return this.request("POST", "/sessions");
  }

  listFacts(sessionId: string): Promise<{ facts: FactView[] }> {
    return this.request("GET", `/sessions/${sessionId}/facts`);
  }

  addFact(sessionId: string, text: string): Promise<FactView> {
    return this.request("POST", `/sessions/${sessionId}/facts`, { text });
  }

  removeFact(sessionId: string, index: number): Promise<{ facts: FactView[] }> {
    return this.request("DELETE", `/sessions/${sessionId}/facts/${index}`);
  }

  runQuery(sessionId: string, goal: string): Promise<QueryResponse> {
    return this.request("POST", `/sessions/${sessionId}/query`, { goal });
  }

  node(sessionId: string, answerId: string, nodeId: string): Promise<NodeView> {
    return this.request(
      "GET",
      `/sessions/${sessionId}/answers/${answerId}/nodes/${nodeId}`,
    );
  }

  provenance(ruleId: string): Promise<ProvenanceView & { rule_id: string }> {
    return this.request("GET", `/rules/${encodeURIComponent(ruleId)}/provenance`);
  }
}

/** Parse-diagnostic details arrive as {message, line?, col?}. */
export function describeDetail(detail: unknown): string {
  if (detail && typeof detail === "object" && "message" in detail) {
    const d = detail as { message: string; line?: number; col?: number };
    return d.line ? `${d.message} (line ${d.line}, column ${d.col})` : d.message;
  }
  return String(detail);
}
