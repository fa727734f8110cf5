/**
 * Typed client for the abstraction service. All computation happens on the
 * server; this module only moves JSON.
 */

export type Target = "hypotheses" | "actions";
export type Metric = "euclidean" | "weighted" | "chebyshev";
export type LinkageKind = "complete" | "single";
export type Rule = "eu" | "minimax";
export type Mode = "conditional" | "average" | "interval";

export interface ModelDoc {
  actions: string[];
  hypotheses: string[];
  attributes: { id: string; weight: number }[];
  outcomes: Record<string, number[]>;
  priors?: Record<string, number>;
}

export type NodeRef = { leaf: number } | { merge: number };

export interface MergeDoc {
  left: NodeRef;
  right: NodeRef;
  height: number;
}

export interface DendrogramDoc {
  kind: Target;
  metric: Metric;
  linkage: LinkageKind;
  leaves: string[];
  merges: MergeDoc[];
}

export interface PartitionDoc {
  kind: Target;
  cutoff: number | null;
  categories: { members: string[]; max_span?: number }[];
}

export interface DistDoc {
  evidence_label?: string;
  probs: Record<string, number>;
}

export interface DecisionDoc {
  rule: Rule;
  scores: Record<string, number>;
  chosen: string | null;
  dominated: boolean | null;
  tie: boolean;
  intervals?: Record<string, [number, number]>;
  fallback?: DecisionDoc;
}

export interface ClusterRequest {
  target: Target;
  metric: Metric;
  linkage: LinkageKind;
  weights?: number[];
  subset?: { actions?: string[]; hypotheses?: string[] };
  dist?: DistDoc;
}

export interface CutRequest extends Partial<ClusterRequest> {
  dendrogram?: DendrogramDoc;
  tolerance?: number;
  k?: number;
}

export interface DecideRequest {
  dist: DistDoc;
  partition?: PartitionDoc;
  rule: Rule;
  mode?: Mode;
  weights?: number[];
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown,
                           signal?: AbortSignal): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    if (!response.ok) {
      let message = `${response.status}`;
      try {
        message = (JSON.parse(text) as { message?: string }).message ?? message;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ServiceError(response.status, message);
    }
    return JSON.parse(text) as T;
  }

  uploadModel(doc: ModelDoc, signal?: AbortSignal): Promise<{ id: string }> {
    return this.request("POST", "/models", doc, signal);
  }

  getModel(id: string, signal?: AbortSignal): Promise<ModelDoc> {
    return this.request("GET", `/models/${id}`, undefined, signal);
  }

  cluster(id: string, req: ClusterRequest,
          signal?: AbortSignal): Promise<DendrogramDoc> {
    return this.request("POST", `/models/${id}/cluster`, req, signal);
  }

  cut(id: string, req: CutRequest, signal?: AbortSignal): Promise<PartitionDoc> {
    return this.request("POST", `/models/${id}/cut`, req, signal);
  }

  decide(id: string, req: DecideRequest,
         signal?: AbortSignal): Promise<DecisionDoc> {
    return this.request("POST", `/models/${id}/decide`, req, signal);
  }
}
