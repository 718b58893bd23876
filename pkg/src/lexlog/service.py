"""HTTP session service.

A session holds a mutable list of case facts over the fixed knowledge
base.  Clients add and remove facts, run queries, and walk the stored
proof views node by node.  Fact lists persist as one JSON document per
session, written atomically; query results live in memory only and are
invalidated by any fact mutation, a new query, or a restart, so a stale
node id can never return stale data.

Endpoints::

    POST   /sessions
    GET    /sessions/{sid}/facts
    POST   /sessions/{sid}/facts            {"text": "Road(road1)."}
    DELETE /sessions/{sid}/facts/{index}
    POST   /sessions/{sid}/query            {"goal": "BrokenLaw(P, X, T)"}
    GET    /sessions/{sid}/answers/{aid}/nodes/{nid}
    GET    /sessions/{sid}/answers/{aid}/tree
    GET    /rules/{rule_id}/provenance
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import corpus
from .engine import Goal, SolveLimits, solve
from .errors import LexlogError, ParseError, UnknownRuleError
from .explain import (
    build_proof_view,
    build_derivation_tree,
    derivation_tree_export,
    instantiate_refutation,
    proof_view_export,
)
from .kb import CompiledKb, assemble_program, compile_file, facts_to_rules
from .language import atom_diagnostics, pad_atoms
from .parser import parse_fact, parse_goal
from .render import render_atom, render_rule
from .terms import Atom


class FactIn(BaseModel):
    text: str


class QueryIn(BaseModel):
    goal: str
    max_depth: Optional[int] = None
    max_refutations: Optional[int] = None


@dataclass(slots=True)
class QueryResult:
    goal_text: str
    answers: list[dict]                      # wire forms, in discovery order
    node_docs: list[dict]                    # per answer: proof view export
    tree_docs: list[dict]                    # per answer: derivation tree export
    truncated: bool


@dataclass(slots=True)
class Session:
    id: str
    facts: list[str] = field(default_factory=list)
    last_result: Optional[QueryResult] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """One JSON document per session under ``root``; writes go through a
    temp file and an atomic rename."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._cache: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _path(self, sid: str) -> Path:
        return self.root / f"{sid}.json"

    def create(self) -> Session:
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except (OSError, FileExistsError) as exc:
            raise HTTPException(500, f"session storage unavailable: {exc}") from exc
        session = Session(id=uuid.uuid4().hex)
        with self._lock:
            self._cache[session.id] = session
        self.save(session)
        return session

    def get(self, sid: str) -> Session:
        with self._lock:
            if sid in self._cache:
                return self._cache[sid]
        path = self._path(sid)
        if not path.is_file():
            raise HTTPException(404, f"no session {sid!r}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise HTTPException(500, f"session storage unreadable: {exc}") from exc
        session = Session(id=sid, facts=list(doc.get("facts", [])))
        with self._lock:
            return self._cache.setdefault(sid, session)

    def save(self, session: Session) -> None:
        doc = {"id": session.id, "facts": session.facts}
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, ensure_ascii=False, indent=1)
            os.replace(tmp, self._path(session.id))
        except OSError as exc:
            raise HTTPException(500, f"session storage unavailable: {exc}") from exc


def create_app(
    kb_path: Optional[str] = None,
    data_dir: str | Path = "lexlog_sessions",
    limits: SolveLimits = SolveLimits(),
) -> FastAPI:
    kb: CompiledKb = compile_file(kb_path) if kb_path else corpus.builtin_kb()
    decls = kb.decl_map()
    rules_by_id = kb.rules_by_id()
    store = SessionStore(Path(data_dir))

    app = FastAPI(title="lexlog", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.kb = kb
    app.state.store = store

    def parse_or_400(text: str, parser) -> tuple[Atom, ...]:
        try:
            parsed = parser(text)
        except ParseError as exc:
            raise HTTPException(400, {
                "message": exc.message, "line": exc.line, "col": exc.col,
            }) from exc
        atoms = parsed if isinstance(parsed, tuple) else (parsed,)
        for atom in atoms:
            for d in atom_diagnostics(atom, decls):
                raise HTTPException(400, {
                    "message": d.message, "code": d.code,
                })
        return atoms

    def fact_wire(index: int, text: str) -> dict:
        atom = parse_fact(text)
        padded = pad_atoms((atom,), decls, shared_scope=False)[0]
        return {
            "index": index,
            "text": text,
            "rendered": render_atom(padded, decls).text,
        }

    def rendered_rule(rule_id: str) -> str:
        return render_rule(rules_by_id[rule_id], decls).text

    # -- sessions -------------------------------------------------------

    @app.post("/sessions")
    def create_session() -> dict:
        session = store.create()
        return {"id": session.id, "facts": []}

    @app.get("/sessions/{sid}/facts")
    def list_facts(sid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            return {"facts": [fact_wire(i, t) for i, t in enumerate(session.facts)]}

    @app.post("/sessions/{sid}/facts")
    def add_fact(sid: str, body: FactIn) -> dict:
        session = store.get(sid)
        atoms = parse_or_400(body.text, parse_fact)
        with session.lock:
            session.facts.append(body.text)
            session.last_result = None
            store.save(session)
            return fact_wire(len(session.facts) - 1, body.text) | {
                "atom": atoms[0].source_form()
            }

    @app.delete("/sessions/{sid}/facts/{index}")
    def remove_fact(sid: str, index: int) -> dict:
        session = store.get(sid)
        with session.lock:
            if not 0 <= index < len(session.facts):
                raise HTTPException(
                    404, f"fact index {index} out of range (have {len(session.facts)})"
                )
            del session.facts[index]
            session.last_result = None
            store.save(session)
            return {"facts": [fact_wire(i, t) for i, t in enumerate(session.facts)]}

    # -- queries and explanations ----------------------------------------

    @app.post("/sessions/{sid}/query")
    def run_query(sid: str, body: QueryIn) -> dict:
        session = store.get(sid)
        goal_atoms = parse_or_400(body.goal, parse_goal)
        if len(goal_atoms) != 1:
            raise HTTPException(400, {"message": "queries take a single atom"})
        query_limits = SolveLimits(
            max_depth=body.max_depth or limits.max_depth,
            max_refutations=body.max_refutations or limits.max_refutations,
        )
        with session.lock:
            session_atoms = [parse_fact(t) for t in session.facts]
            fact_rules = facts_to_rules(
                pad_atoms(tuple(session_atoms), decls, shared_scope=False),
                start=len(kb.fact_rules) + 1,
            )
            program = assemble_program(kb, fact_rules)
            user_vars = tuple(dict.fromkeys(
                name for a in goal_atoms for name in a.variables()
            ))
            padded_goal = Goal(pad_atoms(goal_atoms, decls))
            result = solve(padded_goal, program, query_limits, answer_vars=user_vars)

            answers: list[dict] = []
            node_docs: list[dict] = []
            tree_docs: list[dict] = []
            for i, entry in enumerate(result.entries):
                instantiated = [instantiate_refutation(r) for r in entry.refutations]
                answer_atom = instantiated[0].query.atoms[0]
                view = build_proof_view(instantiated, answer_atom)
                node_docs.append(proof_view_export(
                    view,
                    lambda a: render_atom(a, decls).text,
                    rendered_rule,
                ))
                tree = build_derivation_tree(instantiated)
                tree_docs.append(derivation_tree_export(
                    tree,
                    lambda g: " and ".join(
                        render_atom(a, decls).text for a in g.atoms
                    ) or "nothing left to prove",
                ))
                answers.append({
                    "id": f"a{i + 1}",
                    "rendered": render_atom(answer_atom, decls).text,
                    "atom": answer_atom.source_form(),
                    "refutations": len(entry.refutations),
                })
            session.last_result = QueryResult(
                goal_text=body.goal,
                answers=answers,
                node_docs=node_docs,
                tree_docs=tree_docs,
                truncated=result.truncated,
            )
            return {
                "goal": body.goal,
                "answers": answers,
                "truncated": result.truncated,
                "limits_hit": list(result.limits_hit),
            }

    def current_result(session: Session) -> QueryResult:
        if session.last_result is None:
            raise HTTPException(
                409,
                "no current query result; the fact list changed or no query ran",
            )
        return session.last_result

    def answer_index(result: QueryResult, aid: str) -> int:
        for i, a in enumerate(result.answers):
            if a["id"] == aid:
                return i
        raise HTTPException(404, f"no answer {aid!r} in the current result")

    @app.get("/sessions/{sid}/answers/{aid}/nodes/{nid}")
    def explanation_node(sid: str, aid: str, nid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            result = current_result(session)
            doc = result.node_docs[answer_index(result, aid)]
            node = doc["nodes"].get(nid)
            if node is None:
                raise HTTPException(404, f"no node {nid!r} in answer {aid!r}")
            return {
                "id": nid,
                "rendered": node["rendered"],
                "is_fact": node["is_fact"],
                "alternatives": [
                    {
                        "rule_id": alt["rule_id"],
                        "rendered_rule": alt["rendered_rule"],
                        "provenance": alt["provenance"],
                        "premises": [
                            {
                                "node_id": pid,
                                "rendered": doc["nodes"][pid]["rendered"],
                                "is_fact": doc["nodes"][pid]["is_fact"],
                            }
                            for pid in alt["premises"]
                        ],
                    }
                    for alt in node["alternatives"]
                ],
            }

    @app.get("/sessions/{sid}/answers/{aid}/tree")
    def derivation_tree(sid: str, aid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            result = current_result(session)
            return result.tree_docs[answer_index(result, aid)]

    # -- rules ------------------------------------------------------------

    @app.get("/rules/{rule_id}/provenance")
    def rule_provenance(rule_id: str) -> dict:
        try:
            p = kb.provenance_of(rule_id)
        except UnknownRuleError as exc:
            raise HTTPException(404, str(exc)) from exc
        return {
            "rule_id": rule_id,
            "law_refs": list(p.law_refs),
            "case_refs": list(p.case_refs),
            "commentary_refs": list(p.commentary_refs),
        }

    @app.exception_handler(LexlogError)
    def lexlog_error(_request, exc: LexlogError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    return app
