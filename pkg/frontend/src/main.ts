import { makeClient, ServiceError } from "./api";
import {
  ballotStored,
  backToVotes,
  canTally,
  electionAccepted,
  fragmentForSession,
  hydrated,
  initialState,
  resultsReceived,
  sessionFromFragment,
  type WizardState,
} from "./state";
import { renderErrorBanner, renderResultsView, escapeHtml } from "./render";
import type { Approvals, ElectionDoc } from "./types";

const api = makeClient("");

let state: WizardState = initialState();
let roundsPage = 0;

interface OfficeDraft {
  name: string;
  candidates: string[];
}

let draftName = "My government";
let draftOffices: OfficeDraft[] = [
  { name: "", candidates: ["", ""] },
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

// ---------------------------------------------------------------- ids
// Users type display names; stable ids are derived from them. Slugs are
// deduplicated so the disjointness rule cannot trip over twins like
// "Dana Cohen" twice.

function slug(text: string, fallback: string): string {
  const base = text
    .toLowerCase()
    .replace(/[^\p{L}\p{N}]+/gu, "-")
    .replace(/^-+|-+$/g, "");
  return base || fallback;
}

export function draftToElection(name: string, offices: OfficeDraft[]): ElectionDoc {
  const seenOffices = new Set<string>();
  const seenCandidates = new Set<string>();
  const unique = (candidate: string, seen: Set<string>): string => {
    let id = candidate;
    let k = 2;
    while (seen.has(id)) id = `${candidate}-${k++}`;
    seen.add(id);
    return id;
  };
  return {
    name,
    offices: offices.map((office, j) => {
      const officeId = unique(slug(office.name, `office-${j + 1}`), seenOffices);
      return {
        id: officeId,
        name: office.name || officeId,
        candidates: office.candidates.map((candidate, i) => {
          const candidateId = unique(
            slug(candidate, `${officeId}-c${i + 1}`),
            seenCandidates,
          );
          return { id: candidateId, name: candidate || candidateId };
        }),
      };
    }),
  };
}

// ---------------------------------------------------------- error display

function showError(target: HTMLElement, err: unknown): void {
  if (err instanceof ServiceError) {
    target.innerHTML = renderErrorBanner(err.code, err.message, err.location);
  } else {
    target.innerHTML = renderErrorBanner("Error", String(err));
  }
}

/** Highlight the input the server's error location points at. */
function markOffendingField(location: string | undefined): void {
  document.querySelectorAll(".field-error").forEach((node) => {
    node.classList.remove("field-error");
  });
  if (!location) return;
  const match = /offices\[(\d+)\](?:\.candidates\[(\d+)\])?/.exec(location);
  if (!match) return;
  const officeIndex = Number(match[1]);
  const candidateIndex = match[2] === undefined ? null : Number(match[2]);
  const selector =
    candidateIndex === null
      ? `[data-office-input="${officeIndex}"]`
      : `[data-candidate-input="${officeIndex}-${candidateIndex}"]`;
  document.querySelector(selector)?.classList.add("field-error");
}

// ------------------------------------------------------------ offices step

function renderOfficesStep(): void {
  const offices = draftOffices
    .map((office, j) => {
      const candidates = office.candidates
        .map(
          (candidate, i) =>
            `<li><input data-candidate-input="${j}-${i}" placeholder="Candidate name"` +
            ` value="${escapeHtml(candidate)}">` +
            `<button type="button" class="link" data-remove-candidate="${j}-${i}">remove</button></li>`,
        )
        .join("");
      return (
        `<fieldset data-office="${j}"><legend>Office ${j + 1}</legend>` +
        `<input data-office-input="${j}" placeholder="Office name (e.g. Health)"` +
        ` value="${escapeHtml(office.name)}">` +
        `<button type="button" class="link" data-remove-office="${j}">remove office</button>` +
        `<ol class="candidates">${candidates}</ol>` +
        `<button type="button" data-add-candidate="${j}">Add candidate</button>` +
        `</fieldset>`
      );
    })
    .join("");
  el("offices-list").innerHTML = offices;

  el("offices-list").querySelectorAll("input[data-office-input]").forEach((node) => {
    node.addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      draftOffices[Number(input.dataset.officeInput)]!.name = input.value;
    });
  });
  el("offices-list").querySelectorAll("input[data-candidate-input]").forEach((node) => {
    node.addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      const [j, i] = input.dataset.candidateInput!.split("-").map(Number);
      draftOffices[j!]!.candidates[i!] = input.value;
    });
  });
  el("offices-list").querySelectorAll("[data-add-candidate]").forEach((node) => {
    node.addEventListener("click", () => {
      draftOffices[Number((node as HTMLElement).dataset.addCandidate)]!.candidates.push("");
      renderOfficesStep();
    });
  });
  el("offices-list").querySelectorAll("[data-remove-candidate]").forEach((node) => {
    node.addEventListener("click", () => {
      const [j, i] = (node as HTMLElement).dataset.removeCandidate!.split("-").map(Number);
      draftOffices[j!]!.candidates.splice(i!, 1);
      renderOfficesStep();
    });
  });
  el("offices-list").querySelectorAll("[data-remove-office]").forEach((node) => {
    node.addEventListener("click", () => {
      draftOffices.splice(Number((node as HTMLElement).dataset.removeOffice), 1);
      renderOfficesStep();
    });
  });
}

async function submitElection(): Promise<void> {
  const errors = el("offices-errors");
  errors.innerHTML = "";
  const doc = draftToElection(
    (el<HTMLInputElement>("election-name")).value || draftName,
    draftOffices,
  );
  try {
    const sessionId = await api.createElection(doc);
    state = electionAccepted(state, sessionId, doc);
    window.location.hash = fragmentForSession(sessionId);
    showStep();
  } catch (err) {
    showError(errors, err);
    if (err instanceof ServiceError) markOffendingField(err.location);
  }
}

// -------------------------------------------------------------- votes step

function renderVotesStep(): void {
  const election = state.election;
  if (!election) return;
  const groups = election.offices
    .map((office) => {
      const boxes = office.candidates
        .map(
          (candidate) =>
            `<label><input type="checkbox" data-approve="${escapeHtml(office.id)}"` +
            ` value="${escapeHtml(candidate.id)}"> ${escapeHtml(candidate.name)}</label>`,
        )
        .join("");
      return (
        `<fieldset><legend>${escapeHtml(office.name)}</legend>` +
        `<div class="choices">${boxes}</div></fieldset>`
      );
    })
    .join("");
  el("ballot-offices").innerHTML = groups;
  refreshVotesSummary();
}

function refreshVotesSummary(): void {
  el("voter-count").textContent = String(state.voterCount);
  el("voter-list").innerHTML = state.submittedVoters
    .map((voter) => `<li><code>${escapeHtml(voter)}</code></li>`)
    .join("");
  const tallyButton = el<HTMLButtonElement>("tally-button");
  tallyButton.disabled = !canTally(state);
  el("tally-hint").textContent = canTally(state)
    ? ""
    : "Enter at least one ballot before tallying.";
}

async function submitBallot(): Promise<void> {
  const errors = el("votes-errors");
  errors.innerHTML = "";
  const voterInput = el<HTMLInputElement>("voter-id");
  const voterId = voterInput.value.trim();
  if (!voterId) {
    errors.innerHTML = renderErrorBanner("MissingVoterId", "enter a voter id first");
    return;
  }
  const approvals: Approvals = {};
  document.querySelectorAll<HTMLInputElement>("input[data-approve]:checked").forEach((box) => {
    const officeId = box.dataset.approve!;
    (approvals[officeId] ??= []).push(box.value);
  });
  try {
    const n = await api.submitBallot(state.sessionId!, voterId, approvals);
    state = ballotStored(state, voterId, n);
    voterInput.value = "";
    document
      .querySelectorAll<HTMLInputElement>("input[data-approve]:checked")
      .forEach((box) => (box.checked = false));
    refreshVotesSummary();
  } catch (err) {
    showError(errors, err);
  }
}

async function tally(): Promise<void> {
  const errors = el("votes-errors");
  errors.innerHTML = "";
  try {
    const results = await api.tallySession(state.sessionId!);
    state = resultsReceived(state, results);
    roundsPage = 0;
    showStep();
  } catch (err) {
    showError(errors, err);
  }
}

// ------------------------------------------------------------ results step

function renderResultsStep(): void {
  if (!state.results) return;
  el("results-view").innerHTML = renderResultsView(state.election, state.results, roundsPage);
  el("results-view").querySelectorAll(".round-pager button").forEach((node) => {
    node.addEventListener("click", () => {
      roundsPage = Number((node as HTMLElement).dataset.page);
      renderResultsStep();
    });
  });
}

// -------------------------------------------------------------- upload tab

async function tallyUpload(): Promise<void> {
  const errors = el("upload-errors");
  const view = el("upload-results");
  errors.innerHTML = "";
  view.innerHTML = "";
  let election: ElectionDoc;
  try {
    election = JSON.parse(el<HTMLTextAreaElement>("upload-election").value) as ElectionDoc;
  } catch (err) {
    errors.innerHTML = renderErrorBanner(
      "MalformedDocument",
      `election JSON does not parse: ${String(err)}`,
    );
    return;
  }
  try {
    const results = await api.tallyFile(election, el<HTMLTextAreaElement>("upload-ballots").value);
    view.innerHTML = renderResultsView(election, results, 0);
    view.querySelectorAll(".round-pager button").forEach((node) => {
      node.addEventListener("click", () => {
        view.innerHTML = renderResultsView(
          election,
          results,
          Number((node as HTMLElement).dataset.page),
        );
      });
    });
  } catch (err) {
    showError(errors, err);
  }
}

function wireFilePicker(inputId: string, targetId: string): void {
  el<HTMLInputElement>(inputId).addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (file) {
      el<HTMLTextAreaElement>(targetId).value = await file.text();
    }
  });
}

// ----------------------------------------------------------------- wiring

function showStep(): void {
  const panels: Record<string, string> = {
    offices: "step-offices",
    votes: "step-votes",
    results: "step-results",
  };
  for (const [step, id] of Object.entries(panels)) {
    el(id).hidden = step !== state.step;
  }
  if (state.step === "offices") renderOfficesStep();
  if (state.step === "votes") renderVotesStep();
  if (state.step === "results") renderResultsStep();
}

function showTab(tab: "demo" | "upload"): void {
  el("tab-demo").classList.toggle("active", tab === "demo");
  el("tab-upload").classList.toggle("active", tab === "upload");
  el("panel-demo").hidden = tab !== "demo";
  el("panel-upload").hidden = tab !== "upload";
}

async function boot(): Promise<void> {
  el("tab-demo").addEventListener("click", () => showTab("demo"));
  el("tab-upload").addEventListener("click", () => showTab("upload"));
  el("add-office").addEventListener("click", () => {
    draftOffices.push({ name: "", candidates: ["", ""] });
    renderOfficesStep();
  });
  el("submit-election").addEventListener("click", () => void submitElection());
  el("submit-ballot").addEventListener("click", () => void submitBallot());
  el("tally-button").addEventListener("click", () => void tally());
  el("back-to-votes").addEventListener("click", () => {
    state = backToVotes(state);
    showStep();
  });
  el("upload-tally").addEventListener("click", () => void tallyUpload());
  wireFilePicker("upload-election-file", "upload-election");
  wireFilePicker("upload-ballots-file", "upload-ballots");

  const sessionId = sessionFromFragment(window.location.hash);
  if (sessionId) {
    try {
      const session = await api.getSession(sessionId);
      state = hydrated(sessionId, session.election, session.n);
    } catch {
      window.location.hash = "";
    }
  }
  showTab("demo");
  showStep();
}

document.addEventListener("DOMContentLoaded", () => void boot());
