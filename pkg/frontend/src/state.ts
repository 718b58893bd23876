// View state and its pure transitions. The navigation stack holds the
// node ids visited under the selected answer; an empty stack means the
// answer list is showing, so popping the last entry restores it. Fact
// leaves never enter the stack: selecting one shows its notice in
// place, which keeps Back stepping through rule applications only.

import type { AnswerView, FactView, NodeView } from "./api.js";

export type Pane = "answers" | "node";

export interface NavEntry {
  nodeId: string;
  node: NodeView;
}

export interface ViewState {
  sessionId: string | null;
  facts: FactView[];
  answers: AnswerView[] | null; // null until a query has run
  truncated: boolean;
  selectedAnswer: string | null;
  nav: NavEntry[];
  factNotice: string | null; // rendered text of a selected fact leaf
  openProvenance: string | null; // rule id whose sources are shown
  busy: boolean;
  error: string | null; // network banner
  diagnostic: string | null; // inline fact-entry diagnostic
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    facts: [],
    answers: null,
    truncated: false,
    selectedAnswer: null,
    nav: [],
    factNotice: null,
    openProvenance: null,
    busy: false,
    error: null,
    diagnostic: null,
  };
}

export function pane(state: ViewState): Pane {
  return state.selectedAnswer !== null && state.nav.length > 0 ? "node" : "answers";
}

export function currentNode(state: ViewState): NavEntry | null {
  return state.nav.length > 0 ? state.nav[state.nav.length - 1]! : null;
}

export function backEnabled(state: ViewState): boolean {
  // The answer list is the stack bottom; Back is live once anything
  // sits on top of it.
  return state.nav.length > 0;
}

export function withFacts(state: ViewState, facts: FactView[]): ViewState {
  // Any fact mutation invalidates stored results and navigation.
  return {
    ...state,
    facts,
    answers: null,
    truncated: false,
    selectedAnswer: null,
    nav: [],
    factNotice: null,
    openProvenance: null,
    diagnostic: null,
  };
}

export function withAnswers(
  state: ViewState,
  answers: AnswerView[],
  truncated: boolean,
): ViewState {
  return {
    ...state,
    answers,
    truncated,
    selectedAnswer: null,
    nav: [],
    factNotice: null,
    openProvenance: null,
  };
}

export function selectAnswer(
  state: ViewState,
  answerId: string,
  root: NodeView,
): ViewState {
  return {
    ...state,
    selectedAnswer: answerId,
    nav: [{ nodeId: "root", node: root }],
    factNotice: null,
    openProvenance: null,
  };
}

export function pushNode(state: ViewState, nodeId: string, node: NodeView): ViewState {
  return {
    ...state,
    nav: [...state.nav, { nodeId, node }],
    factNotice: null,
    openProvenance: null,
  };
}

export function showFactNotice(state: ViewState, rendered: string): ViewState {
  return { ...state, factNotice: rendered };
}

export function back(state: ViewState): ViewState {
  if (state.nav.length === 0) {
    return state;
  }
  const nav = state.nav.slice(0, -1);
  return {
    ...state,
    nav,
    selectedAnswer: nav.length > 0 ? state.selectedAnswer : null,
    factNotice: null,
    openProvenance: null,
  };
}

export function toggleProvenance(state: ViewState, ruleId: string): ViewState {
  return {
    ...state,
    openProvenance: state.openProvenance === ruleId ? null : ruleId,
  };
}
