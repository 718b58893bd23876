"""The extended rule language: declarations, sugared rules, and the
transformations that lower them to pure Datalog.

Source programs may use body disjunction (``\\/``), tight conjunction
(``/\\``) next to the ordinary comma, bracketed grouping, and the
``'OR'`` operator between argument terms.  Desugaring turns each rule
into the disjuncts of its body's disjunctive normal form, one pure rule
per disjunct.  Temporal padding gives every atom a time slot: an atom
written without one holds at all times, which padding expresses with a
fresh variable.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Optional, Union

from .errors import ArityError, ExpansionLimitError, UndeclaredPredicateError
from .terms import Atom, Provenance, Rule, Term, var

EMPTY_PROVENANCE = Provenance()

DEFAULT_EXPANSION_CAP = 10_000

_TEMPLATE_PARAM = re.compile(r"\b[A-Z_][A-Za-z0-9_]*\b")


@dataclass(frozen=True, slots=True)
class PredicateDecl:
    """A predicate's base arity and its display template.

    The template is plain text in which each capitalized token is a
    parameter; parameters map to argument positions in order of first
    occurrence ("P is driving C" puts P first, C second).
    """

    name: str
    base_arity: int
    template: str

    def params(self) -> tuple[str, ...]:
        return template_params(self.template)


@lru_cache(maxsize=None)
def template_params(template: str) -> tuple[str, ...]:
    """Distinct parameter tokens of a template, in first-occurrence order."""
    seen: dict[str, None] = {}
    for m in _TEMPLATE_PARAM.finditer(template):
        seen.setdefault(m.group(0))
    return tuple(seen)


@lru_cache(maxsize=None)
def template_segments(template: str) -> tuple[Union[str, int], ...]:
    """The template split into literal strings and parameter indices."""
    params = {name: i for i, name in enumerate(template_params(template))}
    out: list[Union[str, int]] = []
    pos = 0
    for m in _TEMPLATE_PARAM.finditer(template):
        if m.start() > pos:
            out.append(template[pos:m.start()])
        out.append(params[m.group(0)])
        pos = m.end()
    if pos < len(template):
        out.append(template[pos:])
    return tuple(out)


@dataclass(frozen=True, slots=True)
class ExtendedAtom:
    """An atom whose arguments are OR-sets; a singleton OR-set is an
    ordinary argument."""

    pred: str
    argsets: tuple[tuple[Term, ...], ...] = ()
    temporal: Optional[Term] = None
    padded: bool = field(default=False, compare=False)
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def has_or(self) -> bool:
        return any(len(s) > 1 for s in self.argsets)

    def terms(self) -> Iterator[Term]:
        for s in self.argsets:
            yield from s
        if self.temporal is not None:
            yield self.temporal

    def variables(self) -> Iterator[str]:
        for t in self.terms():
            if t.is_var:
                yield t.name

    def source_form(self) -> str:
        parts = [" 'OR' ".join(t.source_form() for t in s) for s in self.argsets]
        if self.temporal is not None:
            parts.append(self.temporal.source_form())
        if not parts:
            return self.pred
        return f"{self.pred}({', '.join(parts)})"

    def __str__(self) -> str:
        return self.source_form()


def plain_atom(a: Atom) -> ExtendedAtom:
    return ExtendedAtom(a.pred, tuple((t,) for t in a.args), a.temporal, a.padded)


@dataclass(frozen=True, slots=True)
class BodyAtom:
    atom: ExtendedAtom

    def source_form(self) -> str:
        return self.atom.source_form()


@dataclass(frozen=True, slots=True)
class BodyConj:
    parts: tuple["BodyNode", ...]
    tight: bool = False  # written with /\ instead of commas

    def source_form(self) -> str:
        sep = " /\\ " if self.tight else ", "
        return sep.join(_grouped(p, self) for p in self.parts)


@dataclass(frozen=True, slots=True)
class BodyDisj:
    parts: tuple["BodyNode", ...]

    def source_form(self) -> str:
        return " \\/ ".join(_grouped(p, self) for p in self.parts)


BodyNode = Union[BodyAtom, BodyConj, BodyDisj]

# Binding strength, loosest first: comma, \/, /\.  A child that binds
# more loosely than its parent needs brackets to survive reparsing.
def _level(node: BodyNode) -> int:
    if isinstance(node, BodyAtom):
        return 3
    if isinstance(node, BodyConj):
        return 2 if node.tight else 0
    return 1


def _grouped(child: BodyNode, parent: BodyNode) -> str:
    text = child.source_form()
    if _level(child) < _level(parent) or (
        _level(child) == _level(parent) and not isinstance(child, BodyAtom)
    ):
        return f"[{text}]"
    return text


def body_leaves(node: BodyNode) -> Iterator[ExtendedAtom]:
    if isinstance(node, BodyAtom):
        yield node.atom
    else:
        for p in node.parts:
            yield from body_leaves(p)


@dataclass(frozen=True, slots=True)
class ExtendedRule:
    """A pre-desugaring rule: plain head, formula body with sugar."""

    id: str
    head: Atom
    body: BodyNode
    provenance: Provenance = EMPTY_PROVENANCE
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def source_form(self) -> str:
        return f"{self.head.source_form()} <- {self.body.source_form()}."


@dataclass(frozen=True, slots=True)
class ParsedProgram:
    """Declarations, rules, and facts in source order."""

    decls: tuple[PredicateDecl, ...] = ()
    rules: tuple[ExtendedRule, ...] = ()
    facts: tuple[Atom, ...] = ()
    fact_positions: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def decl_map(self) -> dict[str, PredicateDecl]:
        return {d.name: d for d in self.decls}

    def source_form(self) -> str:
        lines: list[str] = []
        for d in self.decls:
            escaped = d.template.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'#pred {d.name}/{d.base_arity} "{escaped}".')
        for r in self.rules:
            lines.extend(_refs_lines(r.provenance))
            lines.append(r.source_form())
        for f in self.facts:
            lines.append(f"{f.source_form()}.")
        return "\n".join(lines) + ("\n" if lines else "")


def _refs_lines(p: Provenance) -> list[str]:
    entries = [("law", s) for s in p.law_refs]
    entries += [("case", s) for s in p.case_refs]
    entries += [("commentary", s) for s in p.commentary_refs]
    if not entries:
        return []
    body = ", ".join(f'{tag} "{text}"' for tag, text in entries)
    return [f"#refs {body}."]


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """One machine-readable validation finding."""

    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        where = f"{self.line}:{self.col}: " if self.line else ""
        return f"{where}[{self.code}] {self.message}"


# ---------------------------------------------------------------------------
# OR-argument expansion and body DNF


def expand_or_arguments(ea: ExtendedAtom) -> tuple[Atom, ...]:
    """Expand OR-sets into the disjunction of their cross product.

    Atoms come out in source order of the OR-set elements, leftmost
    argument varying slowest.
    """
    combos = itertools.product(*ea.argsets) if ea.argsets else iter(((),))
    return tuple(
        Atom(ea.pred, tuple(combo), ea.temporal, ea.padded) for combo in combos
    )


def dnf_size(node: BodyNode) -> int:
    """Number of disjuncts the body's DNF will have, computed without
    materializing them."""
    if isinstance(node, BodyAtom):
        n = 1
        for s in node.atom.argsets:
            n *= len(s)
        return n
    if isinstance(node, BodyDisj):
        return sum(dnf_size(p) for p in node.parts)
    n = 1
    for p in node.parts:
        n *= dnf_size(p)
    return n


def to_body_dnf(node: BodyNode, cap: int = DEFAULT_EXPANSION_CAP) -> tuple[tuple[Atom, ...], ...]:
    """The disjuncts of the body's disjunctive normal form.

    OR-set arguments are expanded first; distribution preserves each
    atom's left-to-right source order inside every disjunct, and
    disjuncts are not deduplicated.
    """
    size = dnf_size(node)
    if size > cap:
        raise ExpansionLimitError(
            f"body would expand into {size} disjuncts (cap {cap})"
        )
    return _dnf(node)


def _dnf(node: BodyNode) -> tuple[tuple[Atom, ...], ...]:
    if isinstance(node, BodyAtom):
        return tuple((a,) for a in expand_or_arguments(node.atom))
    if isinstance(node, BodyDisj):
        out: list[tuple[Atom, ...]] = []
        for p in node.parts:
            out.extend(_dnf(p))
        return tuple(out)
    combos: list[tuple[Atom, ...]] = [()]
    for p in node.parts:
        child = _dnf(p)
        combos = [c + d for c in combos for d in child]
    return tuple(combos)


def desugar_rule(rule: ExtendedRule, cap: int = DEFAULT_EXPANSION_CAP) -> tuple[Rule, ...]:
    """One pure rule per DNF disjunct, sharing the head and provenance.

    A rule that needs no expansion keeps its id; expansions are numbered
    ``<id>#1`` onward in disjunct order.
    """
    disjuncts = to_body_dnf(rule.body, cap)
    if len(disjuncts) == 1:
        return (Rule(rule.id, rule.head, disjuncts[0], rule.provenance),)
    return tuple(
        Rule(f"{rule.id}#{k}", rule.head, body, rule.provenance)
        for k, body in enumerate(disjuncts, 1)
    )


# ---------------------------------------------------------------------------
# Temporal padding


def _fresh_temporal_names(used: set[str]) -> Iterator[str]:
    k = 1
    while True:
        name = f"_T{k}"
        if name not in used:
            used.add(name)
            yield name
        k += 1


def _pad_atom(a: Atom, base_arity: int, fresh: Iterator[str]) -> Atom:
    if a.temporal is not None:
        return a
    if len(a.args) == base_arity:
        return replace(a, temporal=var(next(fresh)), padded=True)
    if len(a.args) == base_arity + 1:
        return replace(a, args=a.args[:-1], temporal=a.args[-1], padded=False)
    raise ArityError(
        f"{a.pred} takes {base_arity} or {base_arity + 1} arguments, got {len(a.args)}"
    )


def _pad_extended_atom(ea: ExtendedAtom, base_arity: int, fresh: Iterator[str]) -> ExtendedAtom:
    if ea.temporal is not None:
        return ea
    if len(ea.argsets) == base_arity:
        return replace(ea, temporal=var(next(fresh)), padded=True)
    if len(ea.argsets) == base_arity + 1:
        last = ea.argsets[-1]
        if len(last) != 1:
            raise ArityError(
                f"{ea.pred}: the temporal argument cannot be an 'OR' set"
            )
        return replace(ea, argsets=ea.argsets[:-1], temporal=last[0], padded=False)
    raise ArityError(
        f"{ea.pred} takes {base_arity} or {base_arity + 1} arguments, got {len(ea.argsets)}"
    )


def _pad_body(node: BodyNode, decls: dict[str, PredicateDecl], fresh: Iterator[str]) -> BodyNode:
    if isinstance(node, BodyAtom):
        decl = _decl_for(node.atom.pred, decls)
        return BodyAtom(_pad_extended_atom(node.atom, decl.base_arity, fresh))
    parts = tuple(_pad_body(p, decls, fresh) for p in node.parts)
    return replace(node, parts=parts)


def _decl_for(pred: str, decls: dict[str, PredicateDecl]) -> PredicateDecl:
    try:
        return decls[pred]
    except KeyError:
        raise UndeclaredPredicateError(f"undeclared predicate {pred}") from None


def pad_temporal(program: ParsedProgram) -> ParsedProgram:
    """Give every atom a temporal slot.

    Atoms written with a final extra argument have it moved into the
    slot; atoms written at base arity get a fresh variable and are
    flagged as originally atemporal.  Idempotent.
    """
    decls = program.decl_map()

    rules = []
    for r in program.rules:
        used = {name for name in r.head.variables()}
        for leaf in body_leaves(r.body):
            used.update(leaf.variables())
        fresh = _fresh_temporal_names(used)
        head = _pad_atom(r.head, _decl_for(r.head.pred, decls).base_arity, fresh)
        body = _pad_body(r.body, decls, fresh)
        rules.append(replace(r, head=head, body=body))

    facts = []
    for f in program.facts:
        fresh = _fresh_temporal_names(set(f.variables()))
        facts.append(_pad_atom(f, _decl_for(f.pred, decls).base_arity, fresh))

    return replace(program, rules=tuple(rules), facts=tuple(facts))


def pad_atoms(
    atoms: tuple[Atom, ...],
    decls: dict[str, PredicateDecl],
    *,
    shared_scope: bool = True,
) -> tuple[Atom, ...]:
    """Pad loose atoms (a goal, or facts entered one by one).

    With ``shared_scope`` the atoms are treated as one statement, as in
    a goal whose atoms share variables; otherwise each atom is its own
    scope, as facts are.
    """
    if shared_scope:
        used: set[str] = set()
        for a in atoms:
            used.update(a.variables())
        fresh = _fresh_temporal_names(used)
        return tuple(
            _pad_atom(a, _decl_for(a.pred, decls).base_arity, fresh) for a in atoms
        )
    out = []
    for a in atoms:
        fresh = _fresh_temporal_names(set(a.variables()))
        out.append(_pad_atom(a, _decl_for(a.pred, decls).base_arity, fresh))
    return tuple(out)


# ---------------------------------------------------------------------------
# Validation


def atom_diagnostics(a: Atom, decls: dict[str, PredicateDecl]) -> tuple[Diagnostic, ...]:
    """Validate one raw atom against declarations (used for facts and
    goals entered at the boundary)."""
    decl = decls.get(a.pred)
    if decl is None:
        return (Diagnostic("undeclared-predicate", f"undeclared predicate {a.pred}"),)
    count = len(a.args) + (1 if a.temporal is not None else 0)
    if count not in (decl.base_arity, decl.base_arity + 1):
        return (Diagnostic(
            "arity",
            f"{a.pred} takes {decl.base_arity} or {decl.base_arity + 1} "
            f"arguments, got {count}",
        ),)
    return ()


def validate_program(program: ParsedProgram) -> tuple[Diagnostic, ...]:
    """Check a parsed program against its declarations.

    Reports undeclared predicates, arity mismatches, templates whose
    parameter count disagrees with the declared arity, and OR-sets in
    temporal position.  Returns diagnostics instead of raising.
    """
    out: list[Diagnostic] = []
    decls = program.decl_map()

    for d in program.decls:
        n = len(template_params(d.template))
        if n != d.base_arity:
            out.append(Diagnostic(
                "template-arity",
                f"template for {d.name}/{d.base_arity} references {n} parameter(s)",
            ))

    def check_arity(pred: str, count: int, last_or: bool, line: int, col: int) -> None:
        decl = decls.get(pred)
        if decl is None:
            out.append(Diagnostic(
                "undeclared-predicate", f"undeclared predicate {pred}", line, col,
            ))
            return
        if count not in (decl.base_arity, decl.base_arity + 1):
            out.append(Diagnostic(
                "arity",
                f"{pred} takes {decl.base_arity} or {decl.base_arity + 1} "
                f"arguments, got {count}",
                line, col,
            ))
        elif count == decl.base_arity + 1 and last_or:
            out.append(Diagnostic(
                "temporal-or",
                f"{pred}: the temporal argument cannot be an 'OR' set",
                line, col,
            ))

    for r in program.rules:
        already = r.head.temporal is not None
        check_arity(r.head.pred, len(r.head.args) + (1 if already else 0), False, r.line, r.col)
        for leaf in body_leaves(r.body):
            count = len(leaf.argsets) + (1 if leaf.temporal is not None else 0)
            last_or = (
                leaf.temporal is None
                and bool(leaf.argsets)
                and len(leaf.argsets[-1]) > 1
            )
            check_arity(leaf.pred, count, last_or, leaf.line, leaf.col)

    for i, f in enumerate(program.facts):
        line, col = (
            program.fact_positions[i] if i < len(program.fact_positions) else (0, 0)
        )
        count = len(f.args) + (1 if f.temporal is not None else 0)
        check_arity(f.pred, count, False, line, col)

    return tuple(out)
