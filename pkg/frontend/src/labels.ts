// All user-facing strings live here so a translated set is a single
// file swap. Everything that renders an atom or a rule comes from the
// service; these are chrome only.

export const LABELS = {
  title: "Case navigator",
  insertFacts: "Insert Facts",
  factPlaceholder: "e.g. Road(road1)",
  addFact: "Add",
  factListHint: "Click a fact to remove it.",
  query: "Query",
  back: "Back",
  answersHeading: "Answers",
  noAnswers: "No answers found.",
  refutations: (n: number) => (n === 1 ? "1 derivation" : `${n} derivations`),
  truncated: "Search truncated: results may be incomplete.",
  factNotice: "given as input — no further explanation",
  casesBacking: "Cases backing reasoning",
  lawRefs: "Law",
  caseRefs: "Cases",
  commentaryRefs: "Commentary",
  noProvenance: "No recorded sources.",
  explanationsHeading: "Immediate explanations",
  premisesVia: (ruleId: string) => `via ${ruleId}`,
  networkError: "Cannot reach the reasoning service.",
  staleResult: "The case changed; run the query again.",
  working: "Working…",
};
