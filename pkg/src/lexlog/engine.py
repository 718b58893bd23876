"""Top-down SLD-resolution: depth-first enumeration of answers and
refutations.

Selection is always leftmost and rules are tried in program order, so
two runs over identical inputs produce identical results, including the
order of refutations.  A branch is cut when its resultant (the
instantiated query paired with the current goal) is a variant of an
ancestor's on the same branch; that loop check terminates programs
whose goals stay bounded and never discards a shortest refutation, so
no answer is lost to it.
"""

from __future__ import annotations

import itertools
import re
import sys
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .terms import (
    EMPTY_SUBSTITUTION,
    Atom,
    Rule,
    Substitution,
    Term,
    rename_apart,
    unify,
    var,
)

_TRAILING_INDEX = re.compile(r"_(\d+)\Z")


@dataclass(frozen=True, slots=True)
class Goal:
    """An ordered sequence of atoms still to be proven; empty means
    success."""

    atoms: tuple[Atom, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def variables(self) -> Iterator[str]:
        for a in self.atoms:
            yield from a.variables()

    def source_form(self) -> str:
        return ", ".join(a.source_form() for a in self.atoms)

    def __str__(self) -> str:
        return self.source_form()


@dataclass(frozen=True, slots=True)
class SolveLimits:
    max_depth: int = 512
    max_refutations: int = 1000


@dataclass(frozen=True, slots=True)
class DerivationStep:
    """One resolution step.  ``rule`` is the renamed-apart instance that
    was applied; its id is the program rule's id."""

    goal_before: Goal
    selected_index: int
    rule: Rule
    mgu: Substitution
    goal_after: Goal

    @property
    def rule_id(self) -> str:
        return self.rule.id


@dataclass(frozen=True, slots=True)
class Refutation:
    """A derivation that reached the empty goal.  ``computed_answer`` is
    the composition of the step unifiers restricted to the query's
    variables."""

    query: Goal
    steps: tuple[DerivationStep, ...]
    computed_answer: Substitution


@dataclass(frozen=True, slots=True)
class AnswerEntry:
    answer: Substitution
    refutations: tuple[Refutation, ...]


@dataclass(frozen=True, slots=True)
class AnswerSet:
    """Answers grouped by equality up to renaming, in order of first
    discovery.  ``truncated`` marks that a limit cut the search short;
    the results returned are still valid, just possibly incomplete."""

    query: Goal
    entries: tuple[AnswerEntry, ...]
    truncated: bool = False
    limits_hit: tuple[str, ...] = ()

    @property
    def answers(self) -> tuple[Substitution, ...]:
        return tuple(e.answer for e in self.entries)

    def refutation_count(self) -> int:
        return sum(len(e.refutations) for e in self.entries)


@dataclass(frozen=True, slots=True)
class ResolveOutcome:
    goal: Goal
    mgu: Substitution
    rule_instance: Rule


def resolve_step(goal: Goal, rule: Rule, fresh_index: int) -> Optional[ResolveOutcome]:
    """Resolve the leftmost atom of ``goal`` against ``rule``.

    The rule is renamed apart with ``fresh_index``, its head unified
    with the selected atom, and on success the rule body replaces the
    atom with the unifier applied to the whole new goal.
    """
    if goal.is_empty:
        raise ValueError("cannot resolve the empty goal")
    renamed = rename_apart(rule, fresh_index)
    mgu = unify(goal.atoms[0], renamed.head)
    if mgu is None:
        return None
    new_atoms = mgu.atoms(renamed.body + goal.atoms[1:])
    return ResolveOutcome(Goal(new_atoms), mgu, renamed)


def ordered_query_vars(query: Goal) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for name in query.variables():
        seen.setdefault(name)
    return tuple(seen)


def _fresh_start(query: Goal) -> int:
    """First rename index guaranteed not to recreate a query variable."""
    start = 1
    for name in query.variables():
        m = _TRAILING_INDEX.search(name)
        if m:
            start = max(start, int(m.group(1)) + 1)
    return start


def _term_key(t: Term, renaming: dict[str, int]) -> tuple:
    if t.is_var:
        return ("v", renaming.setdefault(t.name, len(renaming)))
    return ("c", t.name)


def _atoms_key(atoms: Sequence[Atom]) -> tuple:
    renaming: dict[str, int] = {}
    out = []
    for a in atoms:
        out.append((
            a.pred,
            tuple(_term_key(t, renaming) for t in a.args),
            _term_key(a.temporal, renaming) if a.temporal is not None else None,
        ))
    return tuple(out)


def _answer_key(answer: Substitution, qvars: Sequence[str]) -> tuple:
    renaming: dict[str, int] = {}
    return tuple(
        _term_key(answer.term(var(name)), renaming) for name in qvars
    )


class _Stop(Exception):
    pass


def solve(
    query: Goal,
    program: Sequence[Rule],
    limits: SolveLimits = SolveLimits(),
    answer_vars: Optional[Sequence[str]] = None,
) -> AnswerSet:
    """Enumerate every refutation of ``query`` up to the given limits.

    ``answer_vars`` names the variables answers are restricted to and
    grouped by; it defaults to all variables of the query.  Callers that
    pad a goal before solving pass the pre-padding variables here so
    invented temporal variables do not split answers.
    """
    qvars = tuple(answer_vars) if answer_vars is not None else ordered_query_vars(query)
    counter = itertools.count(_fresh_start(query))

    entries: dict[tuple, list[Refutation]] = {}
    order: list[tuple] = []
    limits_hit: set[str] = set()

    needed = limits.max_depth + 200
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)

    total = 0

    def record(steps: list[DerivationStep], sigma: Substitution) -> None:
        nonlocal total
        if total >= limits.max_refutations:
            limits_hit.add("max_refutations")
            raise _Stop
        answer = sigma.restrict(qvars)
        refutation = Refutation(query, tuple(steps), answer)
        key = _answer_key(answer, qvars)
        if key not in entries:
            entries[key] = []
            order.append(key)
        entries[key].append(refutation)
        total += 1

    def search(
        goal: Goal,
        depth: int,
        steps: list[DerivationStep],
        sigma: Substitution,
        ancestors: set[tuple],
    ) -> None:
        if goal.is_empty:
            record(steps, sigma)
            return
        if depth >= limits.max_depth:
            limits_hit.add("max_depth")
            return
        key = _atoms_key(sigma.atoms(query.atoms) + goal.atoms)
        if key in ancestors:
            return
        ancestors.add(key)
        try:
            for rule in program:
                outcome = resolve_step(goal, rule, next(counter))
                if outcome is None:
                    continue
                steps.append(DerivationStep(
                    goal_before=goal,
                    selected_index=0,
                    rule=outcome.rule_instance,
                    mgu=outcome.mgu,
                    goal_after=outcome.goal,
                ))
                try:
                    search(
                        outcome.goal,
                        depth + 1,
                        steps,
                        sigma.compose(outcome.mgu),
                        ancestors,
                    )
                finally:
                    steps.pop()
        finally:
            ancestors.discard(key)

    try:
        search(query, 0, [], EMPTY_SUBSTITUTION, set())
    except _Stop:
        pass

    return AnswerSet(
        query=query,
        entries=tuple(
            AnswerEntry(entries[key][0].computed_answer, tuple(entries[key]))
            for key in order
        ),
        truncated=bool(limits_hit),
        limits_hit=tuple(sorted(limits_hit)),
    )
