import type { ElectionDoc, ResultsDoc } from "./types";

// Wizard steps mirror the demo flow: define the offices, collect votes,
// show results. Forward motion is only possible with the server's
// blessing: the votes step needs a session id, the results step needs a
// tally response.

export type Step = "offices" | "votes" | "results";

export interface WizardState {
  step: Step;
  sessionId: string | null;
  election: ElectionDoc | null;
  voterCount: number;
  submittedVoters: string[];
  results: ResultsDoc | null;
}

export function initialState(): WizardState {
  return {
    step: "offices",
    sessionId: null,
    election: null,
    voterCount: 0,
    submittedVoters: [],
    results: null,
  };
}

/** The server accepted the draft election and opened a session. */
export function electionAccepted(
  state: WizardState,
  sessionId: string,
  election: ElectionDoc,
): WizardState {
  return {
    ...state,
    step: "votes",
    sessionId,
    election,
    voterCount: 0,
    submittedVoters: [],
    results: null,
  };
}

/** Rebuild state from an existing session (page reload with #s=...). */
export function hydrated(
  sessionId: string,
  election: ElectionDoc,
  voterCount: number,
): WizardState {
  return {
    step: "votes",
    sessionId,
    election,
    voterCount,
    submittedVoters: [],
    results: null,
  };
}

/** A ballot was stored; n is the server's current voter count. */
export function ballotStored(
  state: WizardState,
  voterId: string,
  voterCount: number,
): WizardState {
  if (state.step !== "votes" || state.sessionId === null) {
    throw new Error("ballots can only be recorded on the votes step");
  }
  const submittedVoters = state.submittedVoters.includes(voterId)
    ? state.submittedVoters
    : [...state.submittedVoters, voterId];
  // a stale results payload must never survive a ballot change
  return { ...state, voterCount, submittedVoters, results: null };
}

/** A tally response arrived; only now may the wizard show results. */
export function resultsReceived(state: WizardState, results: ResultsDoc): WizardState {
  if (state.sessionId === null) {
    throw new Error("results require a session");
  }
  return { ...state, step: "results", results };
}

/** Back to vote entry (keeps the session and its ballots). */
export function backToVotes(state: WizardState): WizardState {
  if (state.sessionId === null) {
    throw new Error("no session to return to");
  }
  return { ...state, step: "votes" };
}

export function canTally(state: WizardState): boolean {
  return state.sessionId !== null && state.voterCount > 0;
}

/** Session id carried in the URL fragment so reloads keep the wizard. */
export function sessionFromFragment(fragment: string): string | null {
  const match = /^#s=([A-Za-z0-9_-]+)$/.exec(fragment);
  return match ? match[1]! : null;
}

export function fragmentForSession(sessionId: string): string {
  return `#s=${sessionId}`;
}
