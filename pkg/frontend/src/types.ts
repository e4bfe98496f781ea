// Wire types for the election service. The UI only ever displays values
// received in these shapes; it never computes scores itself.

export interface CandidateDoc {
  id: string;
  name: string;
}

export interface OfficeDoc {
  id: string;
  name: string;
  candidates: CandidateDoc[];
}

export interface ElectionDoc {
  name: string;
  offices: OfficeDoc[];
}

/** Exact score: numerator/denominator, never a float. */
export interface FractionPair {
  num: number;
  den: number;
}

export interface RoundDoc {
  round: number;
  scores: Record<string, FractionPair>;
  winner_office: string;
  winner_candidate: string;
  tied_with: [string, string][];
  satisfied_voters: string[];
  zero_support: boolean;
}

export interface GjrViolationDoc {
  candidate: string;
  office: string;
  deserted_group: string[];
  group_size: number;
  threshold: FractionPair;
}

export interface ResultsDoc {
  schema_version: number;
  committee: Record<string, string>;
  rounds: RoundDoc[];
  gjr: { violations: GjrViolationDoc[] };
}

export interface ErrorEnvelope {
  schema_version: number;
  error: { code: string; message: string; location?: string };
}

export type Approvals = Record<string, string[]>;
