/** In-memory stand-in for the annotation API, installed as global
 * fetch. Mirrors the real service's routes, status codes, and error
 * message shapes ({detail: string}; 422 messages that name the
 * offending criterion; 409 on stale consensus offsets) so the views
 * exercise the same contract the server enforces.
 *
 * Rubric descriptors here are sentinel strings, not the real texts:
 * tests assert these exact strings reach the DOM, proving the UI
 * renders what the server sent rather than a client-side copy.
 */

import type { RubricCriterion, Scores } from "../src/api.js";

export const CRITERIA = ["G", "R", "M", "S"] as const;

export const SENTINEL_RUBRIC: RubricCriterion[] = CRITERIA.map((code) => ({
  code,
  name: `Criterion ${code}`,
  description: `SERVER-DESCRIPTION-${code}`,
  level_descriptors: Object.fromEntries(
    [0, 1, 2, 3, 4].map((level) => [String(level), `SERVER-DESCRIPTOR-${code}${level}`]),
  ),
}));

export interface FakeItem {
  item_id: string;
  system_name: string;
  source: string;
  output: string;
}

interface ConsensusRecord {
  scores: Scores;
  resolved_by: string[];
  auto: boolean;
}

interface RequestLogEntry {
  method: string;
  path: string;
  body: unknown;
}

function validationMessage(scores: unknown): string | null {
  if (typeof scores !== "object" || scores === null || Array.isArray(scores)) {
    return "scores must be an object keyed by criterion code";
  }
  const record = scores as Record<string, unknown>;
  const unknown = Object.keys(record).filter(
    (key) => !(CRITERIA as readonly string[]).includes(key),
  );
  if (unknown.length > 0) {
    return `unknown criteria in scores: ${unknown.sort().join(", ")}`;
  }
  for (const code of CRITERIA) {
    if (!(code in record)) return `missing score for criterion ${code}`;
  }
  for (const code of CRITERIA) {
    const value = record[code];
    if (typeof value !== "number" || !Number.isInteger(value) || value < 0 || value > 4) {
      return `score for criterion ${code} must be an integer in 0..4, got ${JSON.stringify(value)}`;
    }
  }
  return null;
}

function sameScores(a: Scores, b: Scores): boolean {
  return (
    Object.keys(a).length === Object.keys(b).length &&
    Object.entries(a).every(([key, value]) => b[key] === value)
  );
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

export class FakeServer {
  items: FakeItem[] = [];
  annotators: string[] = [];
  ratings = new Map<string, Map<string, Scores>>(); // item -> annotator -> scores
  consensus = new Map<string, ConsensusRecord>();
  offset = 0;
  lastRatingOffset = 0;
  offline = false;
  requests: RequestLogEntry[] = [];

  install(): void {
    globalThis.fetch = ((input: RequestInfo | URL, init?: RequestInit) =>
      this.dispatch(String(input), init)) as typeof fetch;
  }

  assign(items: FakeItem[], annotators: string[]): void {
    this.items.push(...items);
    this.annotators.push(...annotators);
    for (const item of items) this.ratings.set(item.item_id, new Map());
    this.offset += 1;
  }

  /** Seed a rating directly (bumps the log offset like a real event). */
  rate(annotator: string, itemId: string, scores: Scores): void {
    this.ratings.get(itemId)?.set(annotator, { ...scores });
    this.offset += 1;
    this.lastRatingOffset = this.offset;
    this.autoConsensus(itemId);
  }

  private autoConsensus(itemId: string): void {
    if (this.consensus.has(itemId)) return;
    const byAnnotator = this.ratings.get(itemId);
    if (!byAnnotator) return;
    if (!this.annotators.every((name) => byAnnotator.has(name))) return;
    const all = [...byAnnotator.values()];
    const first = all[0];
    if (!first || !all.every((scores) => sameScores(scores, first))) return;
    this.consensus.set(itemId, {
      scores: { ...first },
      resolved_by: [...this.annotators].sort(),
      auto: true,
    });
    this.offset += 1;
  }

  private itemStatus(itemId: string): string {
    if (this.consensus.has(itemId)) return "consensus";
    const byAnnotator = this.ratings.get(itemId);
    if (byAnnotator && this.annotators.every((name) => byAnnotator.has(name))) {
      const all = [...byAnnotator.values()];
      const first = all[0];
      return first && all.every((scores) => sameScores(scores, first))
        ? "rated"
        : "disputed";
    }
    return "pending";
  }

  private json(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }

  async dispatch(url: string, init?: RequestInit): Promise<Response> {
    if (this.offline) throw new TypeError("fetch failed: connection refused");
    const parsed = new URL(url, "http://testhost");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    this.requests.push({ method, path: parsed.pathname, body });

    if (method === "GET" && parsed.pathname === "/api/items") {
      return this.handleItems(parsed.searchParams);
    }
    if (method === "POST" && parsed.pathname === "/api/ratings") {
      return this.handleRating(body);
    }
    if (method === "GET" && parsed.pathname === "/api/agreement") {
      return this.json(200, this.agreement());
    }
    if (method === "POST" && parsed.pathname === "/api/consensus") {
      return this.handleConsensus(body);
    }
    if (method === "GET" && parsed.pathname === "/api/summary") {
      return this.json(200, { systems: this.summary() });
    }
    return this.json(404, { detail: `no route for ${method} ${parsed.pathname}` });
  }

  private handleItems(params: URLSearchParams): Response {
    const annotator = params.get("annotator");
    const status = params.get("status");
    const rows = [];
    for (const item of this.items) {
      const byAnnotator = this.ratings.get(item.item_id) ?? new Map<string, Scores>();
      const itemStatus = this.itemStatus(item.item_id);
      if (annotator && status === "pending") {
        if (byAnnotator.has(annotator)) continue;
      } else if (status && itemStatus !== status) {
        continue;
      }
      const row: Record<string, unknown> = {
        ...item,
        status: itemStatus,
        rated_by: [...byAnnotator.keys()].sort(),
      };
      if (annotator) {
        const mine = byAnnotator.get(annotator);
        row.your_rating = mine ? { ...mine } : null;
      }
      rows.push(row);
    }
    return this.json(200, {
      items: rows,
      rubric: SENTINEL_RUBRIC,
      annotators: [...this.annotators].sort(),
    });
  }

  private handleRating(body: any): Response {
    const itemId = String(body?.item_id ?? "");
    const annotator = String(body?.annotator ?? "");
    if (!this.ratings.has(itemId)) {
      return this.json(404, { detail: `unknown item: ${itemId}` });
    }
    if (!this.annotators.includes(annotator)) {
      return this.json(403, {
        detail: `annotator ${annotator} is not assigned to ${itemId}`,
      });
    }
    const problem = validationMessage(body?.scores);
    if (problem) return this.json(422, { detail: problem });
    const scores = body.scores as Scores;

    const existing = this.consensus.get(itemId);
    const current = this.ratings.get(itemId)!.get(annotator);
    if (existing && (!current || !sameScores(current, scores))) {
      return this.json(409, {
        detail: `ratings for ${itemId} are frozen after consensus`,
      });
    }
    if (!current || !sameScores(current, scores)) {
      this.rate(annotator, itemId, scores);
    }
    return this.json(200, {
      item_id: itemId,
      annotator,
      scores,
      status: this.itemStatus(itemId),
    });
  }

  private agreement(): Record<string, unknown> {
    const fullyRated = this.items.filter((item) =>
      this.annotators.every((name) => this.ratings.get(item.item_id)?.has(name)),
    );
    const rates: Record<string, number | null> = {};
    for (const code of CRITERIA) {
      if (fullyRated.length === 0) {
        rates[code] = null;
        continue;
      }
      const agreed = fullyRated.filter((item) => {
        const values = this.annotators.map(
          (name) => this.ratings.get(item.item_id)!.get(name)![code],
        );
        return new Set(values).size === 1;
      });
      rates[code] = agreed.length / fullyRated.length;
    }
    const disagreements = fullyRated
      .filter((item) => !this.consensus.has(item.item_id))
      .map((item) => {
        const byAnnotator = this.ratings.get(item.item_id)!;
        const criteria = CRITERIA.filter((code) => {
          const values = this.annotators.map((name) => byAnnotator.get(name)![code]);
          return new Set(values).size > 1;
        });
        return {
          item_id: item.item_id,
          criteria,
          ratings: Object.fromEntries(
            this.annotators.map((name) => [name, { ...byAnnotator.get(name)! }]),
          ),
        };
      })
      .filter((entry) => entry.criteria.length > 0);
    return {
      annotators: [...this.annotators].sort(),
      n_items: this.items.length,
      n_fully_rated: fullyRated.length,
      pending: this.items.length - fullyRated.length,
      as_of: this.offset,
      rates,
      kappa: null,
      disagreements,
    };
  }

  private handleConsensus(body: any): Response {
    const itemId = String(body?.item_id ?? "");
    if (!this.ratings.has(itemId)) {
      return this.json(404, { detail: `unknown item: ${itemId}` });
    }
    const problem = validationMessage(body?.scores);
    if (problem) return this.json(422, { detail: problem });
    const scores = body.scores as Scores;
    const byAnnotator = this.ratings.get(itemId)!;
    const waiting = this.annotators.filter((name) => !byAnnotator.has(name));
    if (waiting.length > 0) {
      return this.json(422, {
        detail: `item ${itemId} is not fully rated yet, waiting on: ${waiting.join(", ")}`,
      });
    }
    const asOf = body?.as_of;
    if (asOf !== null && asOf !== undefined && this.lastRatingOffset > asOf) {
      return this.json(409, {
        detail:
          `ratings changed after offset ${asOf} ` +
          `(latest rating at offset ${this.lastRatingOffset})`,
      });
    }
    const existing = this.consensus.get(itemId);
    if (existing) {
      if (sameScores(existing.scores, scores)) {
        return this.json(200, { item_id: itemId, ...existing });
      }
      return this.json(409, {
        detail: `consensus for ${itemId} already recorded with different scores`,
      });
    }
    const record: ConsensusRecord = {
      scores: { ...scores },
      resolved_by: [...(body?.resolved_by ?? [])].sort(),
      auto: false,
    };
    this.consensus.set(itemId, record);
    this.offset += 1;
    return this.json(200, { item_id: itemId, ...record });
  }

  private summary(): Record<string, unknown>[] {
    const bySystem = new Map<string, Scores[]>();
    for (const item of this.items) {
      const record = this.consensus.get(item.item_id);
      if (!record) continue;
      const list = bySystem.get(item.system_name) ?? [];
      list.push(record.scores);
      bySystem.set(item.system_name, list);
    }
    return [...bySystem.entries()]
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([systemName, scoresList]) => {
        const rawMeans = CRITERIA.map(
          (code) =>
            scoresList.reduce((total, scores) => total + (scores[code] ?? 0), 0) /
            scoresList.length,
        );
        const means = Object.fromEntries(
          CRITERIA.map((code, index) => [code, round2(rawMeans[index]!)]),
        );
        const overall = round2(rawMeans.reduce((a, b) => a + b, 0) / rawMeans.length);
        return {
          system_name: systemName,
          n_items: scoresList.length,
          means,
          overall,
        };
      });
  }
}

/** Standard scenario: five items for one system, two annotators. */
export function seededServer(): FakeServer {
  const server = new FakeServer();
  server.assign(
    [1, 2, 3, 4, 5].map((k) => ({
      item_id: `item-${k}`,
      system_name: "demo-sys",
      source: `Keeruline lähtelause number ${k}.`,
      output: `Lihtne lause ${k}.`,
    })),
    ["ann-a", "ann-b"],
  );
  server.install();
  return server;
}

/** Let queued promise callbacks (fetch handling, view updates) run. */
export async function flush(turns = 4): Promise<void> {
  for (let i = 0; i < turns; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}
