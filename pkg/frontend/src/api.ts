/** Typed client for the annotation HTTP API.
 *
 * All knowledge about the server lives here: paths, request bodies, and
 * the `{detail: string}` error envelope. Non-2xx responses become
 * ApiError (with the HTTP status and the server's message); transport
 * failures reject with whatever fetch threw, so views can distinguish
 * "the server said no" from "the network is down".
 */

export type Scores = Record<string, number>;

export interface RubricCriterion {
  code: string;
  name: string;
  description: string;
  level_descriptors: Record<string, string>;
}

export interface ItemRow {
  item_id: string;
  system_name: string;
  source: string;
  output: string;
  status: string;
  rated_by: string[];
  your_rating?: Scores | null;
}

export interface ItemsResponse {
  items: ItemRow[];
  rubric: RubricCriterion[];
  annotators: string[];
}

export interface Disagreement {
  item_id: string;
  criteria: string[];
  ratings: Record<string, Scores>;
}

export interface AgreementResponse {
  annotators: string[];
  n_items: number;
  n_fully_rated: number;
  pending: number;
  as_of: number;
  rates: Record<string, number | null>;
  kappa: Record<string, number> | null;
  disagreements: Disagreement[];
  warning?: string;
}

export interface SummaryRow {
  system_name: string;
  n_items: number;
  means: Record<string, number>;
  overall: number;
}

export interface RatingPayload {
  annotator: string;
  item_id: string;
  scores: Scores;
  note?: string;
}

export interface ConsensusPayload {
  item_id: string;
  scores: Scores;
  resolved_by: string[];
  as_of: number | null;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request(path: string, init?: RequestInit): Promise<unknown> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let detail = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body: keep the generic message
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

function post(path: string, body: unknown): Promise<unknown> {
  return request(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export async function getItems(
  params: { annotator?: string; status?: string } = {},
): Promise<ItemsResponse> {
  const query = new URLSearchParams();
  if (params.annotator) query.set("annotator", params.annotator);
  if (params.status) query.set("status", params.status);
  const suffix = query.toString() ? `?${query.toString()}` : "";
  return (await request(`/api/items${suffix}`)) as ItemsResponse;
}

export async function postRating(payload: RatingPayload): Promise<unknown> {
  return post("/api/ratings", payload);
}

export async function getAgreement(): Promise<AgreementResponse> {
  return (await request("/api/agreement")) as AgreementResponse;
}

export async function postConsensus(payload: ConsensusPayload): Promise<unknown> {
  return post("/api/consensus", payload);
}

export async function getSummary(): Promise<{ systems: SummaryRow[] }> {
  return (await request("/api/summary")) as { systems: SummaryRow[] };
}
