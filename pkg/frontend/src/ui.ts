// DOM layer: builds the two-pane layout, re-renders it from a ViewState,
// and serializes every service call through a queue so one session never
// has two requests in flight. Rendered atom and rule strings always come
// from the service; this file only arranges them.

import { ApiClient, ApiError, describeDetail } from "./api.js";
import type { AlternativeView, PremiseRef } from "./api.js";
import { LABELS } from "./labels.js";
import {
  back,
  backEnabled,
  currentNode,
  initialState,
  pane,
  pushNode,
  selectAnswer,
  showFactNotice,
  toggleProvenance,
  withAnswers,
  withFacts,
  type ViewState,
} from "./state.js";

export interface MountOptions {
  baseUrl: string;
  fetchImpl?: (input: string, init?: RequestInit) => Promise<Response>;
  window?: Window & typeof globalThis;
}

export interface Controller {
  state(): ViewState;
  whenIdle(): Promise<void>;
  client: ApiClient;
}

const STYLE = `
  body { font: 15px system-ui, sans-serif; margin: 0; color: #1c2431; }
  header { padding: 10px 16px; background: #1c3d5a; color: white; }
  .banner { background: #b3261e; color: white; padding: 8px 16px; }
  .panes { display: grid; grid-template-columns: minmax(280px, 1fr) 2fr; gap: 16px; padding: 16px; }
  .pane { border: 1px solid #ccd4df; border-radius: 8px; padding: 12px; }
  .entry-box { background: #fdeaea; padding: 8px; border-radius: 6px; }
  .fact-list { background: #e8f0fe; border-radius: 6px; list-style: none;
               margin: 8px 0; padding: 6px; max-height: 320px; overflow-y: auto; }
  .fact-list li { padding: 4px 6px; cursor: pointer; border-radius: 4px; }
  .fact-list li:hover { background: #d2e3fc; text-decoration: line-through; }
  .diagnostic { color: #b3261e; margin: 6px 0; }
  .hint { color: #5f6b7a; font-size: 13px; }
  .toolbar { display: flex; gap: 8px; align-items: center; margin-bottom: 10px; }
  .toolbar input { flex: 1; }
  .answer-box { background: #e6f4ea; border-radius: 6px; padding: 8px; }
  .answer-box li, .premise { cursor: pointer; }
  .answer-box li:hover, .premise:hover { text-decoration: underline; }
  .badge { background: #e37400; color: white; border-radius: 10px; padding: 2px 8px; font-size: 12px; }
  .node-atom { font-weight: 600; }
  .alternative { margin: 10px 0; padding: 8px; border-left: 3px solid #1c3d5a; background: #f4f7fb; }
  .rule-caption { margin: 0 0 6px; font-style: italic; }
  .prov-panel { background: #fff8e1; border-radius: 4px; padding: 6px; margin: 6px 0; }
  .fact-notice { background: #fff8e1; padding: 6px 8px; border-radius: 4px; margin: 8px 0; }
  .fact-mark { color: #5f6b7a; font-size: 12px; margin-left: 6px; }
  button { padding: 6px 12px; border-radius: 6px; border: 1px solid #9aa7b5; background: #f5f7fa; cursor: pointer; }
  button:disabled { opacity: 0.5; cursor: default; }
  #query-btn { background: #1c3d5a; color: white; }
  #back-btn { background: #f9c74f; }
`;

export function mount(doc: Document, options: MountOptions): Controller {
  const win = options.window ?? (doc.defaultView as Window & typeof globalThis);
  const client = new ApiClient(options.baseUrl, options.fetchImpl);

  let state: ViewState = initialState();
  let tail: Promise<void> = Promise.resolve();

  doc.body.innerHTML = `
    <style>${STYLE}</style>
    <header><strong>${LABELS.title}</strong></header>
    <div id="error-banner" class="banner" hidden></div>
    <main class="panes">
      <section class="pane" id="left-pane">
        <h2>${LABELS.insertFacts}</h2>
        <form id="fact-form" class="entry-box">
          <input id="fact-input" placeholder="${LABELS.factPlaceholder}" autocomplete="off">
          <button id="fact-add" type="submit">${LABELS.addFact}</button>
        </form>
        <div id="fact-diagnostic" class="diagnostic" hidden></div>
        <p class="hint">${LABELS.factListHint}</p>
        <ul id="fact-list" class="fact-list"></ul>
      </section>
      <section class="pane" id="right-pane">
        <div class="toolbar">
          <input id="goal-input" value="BrokenLaw(P, X, T)" autocomplete="off">
          <button id="query-btn">${LABELS.query}</button>
          <button id="back-btn" disabled>${LABELS.back}</button>
          <span id="truncation-badge" class="badge" hidden>${LABELS.truncated}</span>
        </div>
        <div id="content" class="answer-box"></div>
      </section>
    </main>
  `;

  const el = {
    banner: doc.getElementById("error-banner") as HTMLElement,
    factForm: doc.getElementById("fact-form") as HTMLFormElement,
    factInput: doc.getElementById("fact-input") as HTMLInputElement,
    factDiagnostic: doc.getElementById("fact-diagnostic") as HTMLElement,
    factList: doc.getElementById("fact-list") as HTMLElement,
    goalInput: doc.getElementById("goal-input") as HTMLInputElement,
    queryBtn: doc.getElementById("query-btn") as HTMLButtonElement,
    backBtn: doc.getElementById("back-btn") as HTMLButtonElement,
    badge: doc.getElementById("truncation-badge") as HTMLElement,
    content: doc.getElementById("content") as HTMLElement,
  };

  function setState(next: ViewState): void {
    state = next;
    render();
  }

  function enqueue(
    op: () => Promise<void>,
    onApiError?: (err: ApiError) => void,
  ): Promise<void> {
    const run = tail.then(async () => {
      setState({ ...state, busy: true, error: null });
      try {
        await op();
      } catch (err) {
        if (err instanceof ApiError && err.isStale) {
          setState({
            ...withAnswers(state, [], false),
            answers: null,
            error: LABELS.staleResult,
          });
        } else if (err instanceof ApiError) {
          if (onApiError) {
            onApiError(err);
          } else {
            setState({ ...state, error: describeDetail(err.detail) });
          }
        } else {
          setState({ ...state, error: LABELS.networkError });
        }
      } finally {
        setState({ ...state, busy: false });
      }
    });
    tail = run;
    return run;
  }

  // -- renderers -----------------------------------------------------

  function text(value: string): Text {
    return doc.createTextNode(value);
  }

  function render(): void {
    el.banner.hidden = state.error === null;
    el.banner.textContent = state.error ?? "";
    el.factDiagnostic.hidden = state.diagnostic === null;
    el.factDiagnostic.textContent = state.diagnostic ?? "";
    el.queryBtn.disabled = state.busy;
    el.backBtn.disabled = !backEnabled(state) || state.busy;
    el.badge.hidden = !state.truncated;
    renderFacts();
    renderContent();
  }

  function renderFacts(): void {
    el.factList.innerHTML = "";
    for (const fact of state.facts) {
      const li = doc.createElement("li");
      li.dataset["index"] = String(fact.index);
      li.title = fact.text;
      li.appendChild(text(fact.rendered));
      el.factList.appendChild(li);
    }
  }

  function renderContent(): void {
    el.content.innerHTML = "";
    if (pane(state) === "answers") {
      renderAnswers();
    } else {
      renderNode();
    }
  }

  function renderAnswers(): void {
    const heading = doc.createElement("h2");
    heading.appendChild(text(LABELS.answersHeading));
    el.content.appendChild(heading);
    if (state.answers === null) {
      return;
    }
    if (state.answers.length === 0) {
      const p = doc.createElement("p");
      p.appendChild(text(LABELS.noAnswers));
      el.content.appendChild(p);
      return;
    }
    const ul = doc.createElement("ul");
    ul.id = "answer-list";
    for (const answer of state.answers) {
      const li = doc.createElement("li");
      li.dataset["answerId"] = answer.id;
      li.appendChild(text(`${answer.rendered} (${LABELS.refutations(answer.refutations)})`));
      ul.appendChild(li);
    }
    el.content.appendChild(ul);
  }

  function renderPremise(premise: PremiseRef): HTMLElement {
    const li = doc.createElement("li");
    li.className = "premise";
    li.dataset["nodeId"] = premise.node_id;
    li.dataset["isFact"] = String(premise.is_fact);
    li.appendChild(text(premise.rendered));
    if (premise.is_fact) {
      const mark = doc.createElement("span");
      mark.className = "fact-mark";
      mark.appendChild(text("[fact]"));
      li.appendChild(mark);
    }
    return li;
  }

  function renderAlternative(alt: AlternativeView): HTMLElement {
    const box = doc.createElement("li");
    box.className = "alternative";

    const caption = doc.createElement("p");
    caption.className = "rule-caption";
    caption.appendChild(text(`${LABELS.premisesVia(alt.rule_id)}: ${alt.rendered_rule}`));
    box.appendChild(caption);

    const provBtn = doc.createElement("button");
    provBtn.className = "prov-btn";
    provBtn.dataset["ruleId"] = alt.rule_id;
    provBtn.appendChild(text(LABELS.casesBacking));
    box.appendChild(provBtn);

    if (state.openProvenance === alt.rule_id) {
      const panel = doc.createElement("div");
      panel.className = "prov-panel";
      const rows: Array<[string, string[]]> = [
        [LABELS.lawRefs, alt.provenance.law_refs],
        [LABELS.caseRefs, alt.provenance.case_refs],
        [LABELS.commentaryRefs, alt.provenance.commentary_refs],
      ];
      let any = false;
      for (const [label, refs] of rows) {
        if (refs.length > 0) {
          any = true;
          const row = doc.createElement("div");
          row.appendChild(text(`${label}: ${refs.join("; ")}`));
          panel.appendChild(row);
        }
      }
      if (!any) {
        panel.appendChild(text(LABELS.noProvenance));
      }
      box.appendChild(panel);
    }

    const premises = doc.createElement("ul");
    premises.className = "premises";
    for (const premise of alt.premises) {
      premises.appendChild(renderPremise(premise));
    }
    box.appendChild(premises);
    return box;
  }

  function renderNode(): void {
    const entry = currentNode(state);
    if (entry === null) {
      return;
    }
    const atom = doc.createElement("p");
    atom.className = "node-atom";
    atom.appendChild(text(entry.node.rendered));
    el.content.appendChild(atom);

    if (state.factNotice !== null) {
      const notice = doc.createElement("div");
      notice.className = "fact-notice";
      notice.id = "fact-notice";
      notice.appendChild(text(`${state.factNotice}: ${LABELS.factNotice}`));
      el.content.appendChild(notice);
    }

    if (entry.node.is_fact) {
      const notice = doc.createElement("div");
      notice.className = "fact-notice";
      notice.id = "fact-notice";
      notice.appendChild(text(LABELS.factNotice));
      el.content.appendChild(notice);
      return;
    }

    const heading = doc.createElement("h3");
    heading.appendChild(text(LABELS.explanationsHeading));
    el.content.appendChild(heading);

    const list = doc.createElement("ol");
    list.className = "alternatives";
    for (const alt of entry.node.alternatives) {
      list.appendChild(renderAlternative(alt));
    }
    el.content.appendChild(list);
  }

  // -- event wiring ----------------------------------------------------

  el.factForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const entered = el.factInput.value.trim();
    if (entered === "" || state.sessionId === null) {
      return;
    }
    const sid = state.sessionId;
    enqueue(
      async () => {
        await client.addFact(sid, entered);
        const { facts } = await client.listFacts(sid);
        el.factInput.value = ""; // cleared only on success; errors keep it
        setState(withFacts(state, facts));
      },
      (err) => setState({ ...state, diagnostic: describeDetail(err.detail) }),
    );
  });

  el.factList.addEventListener("click", (event) => {
    const li = (event.target as Element).closest("li[data-index]");
    if (!li || state.sessionId === null) {
      return;
    }
    const sid = state.sessionId;
    const index = Number((li as HTMLElement).dataset["index"]);
    enqueue(async () => {
      const { facts } = await client.removeFact(sid, index);
      setState(withFacts(state, facts));
    });
  });

  el.queryBtn.addEventListener("click", () => {
    if (state.sessionId === null) {
      return;
    }
    const sid = state.sessionId;
    const goal = el.goalInput.value;
    enqueue(async () => {
      const response = await client.runQuery(sid, goal);
      setState(withAnswers(state, response.answers, response.truncated));
    });
  });

  el.backBtn.addEventListener("click", () => {
    setState(back(state));
  });

  el.content.addEventListener("click", (event) => {
    const target = event.target as Element;

    const answer = target.closest("li[data-answer-id]");
    if (answer && state.sessionId !== null) {
      const sid = state.sessionId;
      const answerId = (answer as HTMLElement).dataset["answerId"]!;
      enqueue(async () => {
        const root = await client.node(sid, answerId, "root");
        setState(selectAnswer(state, answerId, root));
      });
      return;
    }

    const provBtn = target.closest("button.prov-btn");
    if (provBtn) {
      setState(toggleProvenance(state, (provBtn as HTMLElement).dataset["ruleId"]!));
      return;
    }

    const premise = target.closest("li.premise");
    if (premise && state.sessionId !== null && state.selectedAnswer !== null) {
      const sid = state.sessionId;
      const answerId = state.selectedAnswer;
      const nodeId = (premise as HTMLElement).dataset["nodeId"]!;
      enqueue(async () => {
        const node = await client.node(sid, answerId, nodeId);
        if (node.is_fact) {
          // Facts are given as input: show the notice in place rather
          // than descending, so Back walks rule applications only.
          setState(showFactNotice(state, node.rendered));
        } else {
          setState(pushNode(state, nodeId, node));
        }
      });
    }
  });

  // -- boot --------------------------------------------------------------

  function sessionFromFragment(): string | null {
    const match = /[#&]session=([A-Za-z0-9]+)/.exec(win.location.hash);
    return match ? match[1]! : null;
  }

  enqueue(async () => {
    const existing = sessionFromFragment();
    if (existing !== null) {
      const { facts } = await client.listFacts(existing);
      setState({ ...withFacts(state, facts), sessionId: existing });
      return;
    }
    const created = await client.createSession();
    win.location.hash = `session=${created.id}`;
    setState({ ...withFacts(state, created.facts), sessionId: created.id });
  });

  render();

  return {
    state: () => state,
    whenIdle: () => tail,
    client,
  };
}
