import type { Approvals, ElectionDoc, ErrorEnvelope, ResultsDoc } from "./types";

/** A non-2xx service response, carrying the error envelope's fields. */
export class ServiceError extends Error {
  status: number;
  code: string;
  location?: string;

  constructor(status: number, code: string, message: string, location?: string) {
    super(message);
    this.status = status;
    this.code = code;
    this.location = location;
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  } catch (err) {
    throw new ServiceError(0, "Unreachable", `service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    let envelope: ErrorEnvelope | null = null;
    try {
      envelope = (await response.json()) as ErrorEnvelope;
    } catch {
      // non-JSON error body; fall through to a generic error
    }
    if (envelope && envelope.error) {
      throw new ServiceError(
        response.status,
        envelope.error.code,
        envelope.error.message,
        envelope.error.location,
      );
    }
    throw new ServiceError(response.status, "HttpError", `HTTP ${response.status}`);
  }
  return (await response.json()) as T;
}

export interface ApiClient {
  createElection(doc: ElectionDoc): Promise<string>;
  getSession(sessionId: string): Promise<{ election: ElectionDoc; n: number }>;
  submitBallot(sessionId: string, voterId: string, approvals: Approvals): Promise<number>;
  tallySession(sessionId: string): Promise<ResultsDoc>;
  tallyFile(election: ElectionDoc, ballotsCsv: string): Promise<ResultsDoc>;
}

export function makeClient(base = ""): ApiClient {
  return {
    async createElection(doc) {
      const out = await request<{ session_id: string }>(base, "POST", "/api/elections", doc);
      return out.session_id;
    },
    async getSession(sessionId) {
      return request(base, "GET", `/api/elections/${encodeURIComponent(sessionId)}`);
    },
    async submitBallot(sessionId, voterId, approvals) {
      const out = await request<{ n: number }>(
        base,
        "POST",
        `/api/elections/${encodeURIComponent(sessionId)}/ballots`,
        { voter_id: voterId, approvals },
      );
      return out.n;
    },
    async tallySession(sessionId) {
      return request(base, "POST", `/api/elections/${encodeURIComponent(sessionId)}/tally`);
    },
    async tallyFile(election, ballotsCsv) {
      return request(base, "POST", "/api/tally-file", {
        election,
        ballots_csv: ballotsCsv,
      });
    },
  };
}
