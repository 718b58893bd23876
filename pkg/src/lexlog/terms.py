"""Terms, atoms, rules, substitutions, and unification.

Everything in this module is immutable and side-effect free; the
resolution and explanation layers rely on that to share structure
freely across threads without coordination.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Optional, Union

VARIABLE_NAME = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
BARE_CONSTANT_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Term:
    """A constant (a named object) or a variable (an unknown object)."""

    kind: str  # "const" | "var"
    name: str

    def __post_init__(self) -> None:
        if self.kind not in ("const", "var"):
            raise ValueError(f"bad term kind: {self.kind!r}")
        if not self.name:
            raise ValueError("term name must be non-empty")
        if self.kind == "var" and not VARIABLE_NAME.match(self.name):
            raise ValueError(f"bad variable name: {self.name!r}")

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    def source_form(self) -> str:
        """The term as written in rule-language source text.

        Constants whose names do not fit the bare lexical shape (section
        marks, clock times, spaces, ...) come out double-quoted.
        """
        if self.is_var or BARE_CONSTANT_NAME.match(self.name):
            return self.name
        escaped = self.name.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'

    def __str__(self) -> str:
        return self.name


def var(name: str) -> Term:
    return Term("var", name)


def const(name: str) -> Term:
    return Term("const", name)


@dataclass(frozen=True, slots=True)
class Atom:
    """A predicate applied to terms, with the time slot kept apart.

    ``temporal`` is None until temporal padding has run.  ``padded``
    records that the slot was invented by padding rather than written in
    source; rendering needs that distinction, the engine must not (the
    slot unifies exactly like a final argument).
    """

    pred: str
    args: tuple[Term, ...] = ()
    temporal: Optional[Term] = None
    padded: bool = field(default=False, compare=False)

    def terms(self) -> Iterator[Term]:
        yield from self.args
        if self.temporal is not None:
            yield self.temporal

    def variables(self) -> Iterator[str]:
        for t in self.terms():
            if t.is_var:
                yield t.name

    @property
    def is_ground(self) -> bool:
        return all(not t.is_var for t in self.terms())

    def source_form(self) -> str:
        parts = [t.source_form() for t in self.terms()]
        if not parts:
            return self.pred
        return f"{self.pred}({', '.join(parts)})"

    def __str__(self) -> str:
        return self.source_form()


@dataclass(frozen=True, slots=True)
class Provenance:
    """Citations attached to a rule: statute paragraphs, precedent cases,
    reference works.  Entries are opaque display strings."""

    law_refs: tuple[str, ...] = ()
    case_refs: tuple[str, ...] = ()
    commentary_refs: tuple[str, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.law_refs or self.case_refs or self.commentary_refs)


EMPTY_PROVENANCE = Provenance()


@dataclass(frozen=True, slots=True)
class Rule:
    """A pure Datalog rule; an empty body makes it a fact.

    Range restriction is not required here: the top-down engine handles
    unrestricted rules, only the bottom-up evaluator refuses them.
    """

    id: str
    head: Atom
    body: tuple[Atom, ...] = ()
    provenance: Provenance = EMPTY_PROVENANCE

    @property
    def is_fact(self) -> bool:
        return not self.body

    def atoms(self) -> Iterator[Atom]:
        yield self.head
        yield from self.body

    def variables(self) -> Iterator[str]:
        for a in self.atoms():
            yield from a.variables()

    def source_form(self) -> str:
        if self.is_fact:
            return f"{self.head.source_form()}."
        premises = ", ".join(a.source_form() for a in self.body)
        return f"{self.head.source_form()} <- {premises}."

    def __str__(self) -> str:
        return self.source_form()


class Substitution(Mapping[str, Term]):
    """A finite map from variable names to terms, applied simultaneously.

    Construction drops self-bindings, so a variable is never bound to
    itself.  Substitutions produced by :func:`unify` and chained through
    :func:`compose` during resolution stay idempotent because rule
    variants are always fresh.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Union[Mapping[str, Term], Iterable[tuple[str, Term]]] = ()):
        clean: dict[str, Term] = {}
        for name, value in dict(bindings).items():
            if value.is_var and value.name == name:
                continue
            clean[name] = value
        self._bindings = clean

    def __getitem__(self, name: str) -> Term:
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        inner = ", ".join(f"{k} -> {v.source_form()}" for k, v in sorted(self._bindings.items()))
        return "{" + inner + "}"

    def term(self, t: Term) -> Term:
        if t.is_var:
            return self._bindings.get(t.name, t)
        return t

    def atom(self, a: Atom) -> Atom:
        if a.is_ground:
            return a
        return replace(
            a,
            args=tuple(self.term(t) for t in a.args),
            temporal=self.term(a.temporal) if a.temporal is not None else None,
        )

    def atoms(self, atoms: Iterable[Atom]) -> tuple[Atom, ...]:
        return tuple(self.atom(a) for a in atoms)

    def rule(self, r: Rule) -> Rule:
        return replace(r, head=self.atom(r.head), body=self.atoms(r.body))

    def compose(self, other: "Substitution") -> "Substitution":
        """Sequential composition: applying the result equals applying
        ``self`` first and ``other`` second."""
        merged: dict[str, Term] = {}
        for name, value in self._bindings.items():
            merged[name] = other.term(value)
        for name, value in other._bindings.items():
            if name not in self._bindings:
                merged[name] = value
        return Substitution(merged)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({k: v for k, v in self._bindings.items() if k in keep})


EMPTY_SUBSTITUTION = Substitution()


def apply_substitution(s: Substitution, x):
    """Apply ``s`` to a term, atom, rule, goal-like object, or tuple of
    those, returning the same kind of value."""
    if isinstance(x, Term):
        return s.term(x)
    if isinstance(x, Atom):
        return s.atom(x)
    if isinstance(x, Rule):
        return s.rule(x)
    if isinstance(x, tuple):
        return tuple(apply_substitution(s, item) for item in x)
    if hasattr(x, "atoms") and isinstance(getattr(x, "atoms"), tuple):
        return type(x)(s.atoms(x.atoms))
    raise TypeError(f"cannot apply a substitution to {type(x).__name__}")


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    return s1.compose(s2)


def unify(a: Atom, b: Atom) -> Optional[Substitution]:
    """Most general unifier of two atoms, or None when there is none.

    The temporal slot unifies like a final argument; a present slot
    never unifies with an absent one (that is an arity clash).  There is
    no occurs check: with function-free terms cyclic bindings cannot
    arise.
    """
    if a.pred != b.pred:
        return None
    if (a.temporal is None) != (b.temporal is None):
        return None
    left = tuple(a.terms())
    right = tuple(b.terms())
    if len(left) != len(right):
        return None

    bindings: dict[str, Term] = {}

    def walk(t: Term) -> Term:
        while t.is_var and t.name in bindings:
            t = bindings[t.name]
        return t

    for s, t in zip(left, right):
        s = walk(s)
        t = walk(t)
        if s == t:
            continue
        if s.is_var:
            bindings[s.name] = t
        elif t.is_var:
            bindings[t.name] = s
        else:
            return None
    # Flattening the chains here is what makes the result idempotent.
    return Substitution({name: walk(value) for name, value in bindings.items()})


def rename_apart(rule: Rule, index: int) -> Rule:
    """A variant of ``rule`` with every variable suffixed ``_{index}``.

    Callers draw ``index`` from a source that never repeats within one
    resolution search, which keeps successive variants disjoint from one
    another and from every goal produced so far.
    """
    if not any(True for _ in rule.variables()):
        return rule

    def rt(t: Term) -> Term:
        return var(f"{t.name}_{index}") if t.is_var else t

    def ra(a: Atom) -> Atom:
        return replace(
            a,
            args=tuple(rt(t) for t in a.args),
            temporal=rt(a.temporal) if a.temporal is not None else None,
        )

    return replace(rule, head=ra(rule.head), body=tuple(ra(a) for a in rule.body))
