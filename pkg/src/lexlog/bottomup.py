"""Bottom-up fixpoint evaluation by semi-naive iteration.

This evaluator is the engine's independent check: it derives the least
model of a range-restricted program directly, without resolution, so
the two can be compared on the same inputs.  Facts whose only variable
is a padded temporal slot are closed over the time constants observed
in the program plus one distinguished "anytime" constant, which makes
"holds at all times" finite on the active domain.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Optional, Sequence

from .errors import NotRangeRestrictedError
from .terms import Atom, Rule, Term, const

ANYTIME = const("anytime")


def _check_range_restricted(rule: Rule) -> None:
    if rule.is_fact:
        if rule.head.is_ground:
            return
        free = set(rule.head.variables())
        t = rule.head.temporal
        padded_only = (
            rule.head.padded
            and t is not None
            and t.is_var
            and free == {t.name}
        )
        if not padded_only:
            raise NotRangeRestrictedError(
                rule.id, f"non-ground fact {rule.head.source_form()}"
            )
        return
    body_vars: set[str] = set()
    for a in rule.body:
        body_vars.update(a.variables())
    missing = set(rule.head.variables()) - body_vars
    if missing:
        raise NotRangeRestrictedError(
            rule.id,
            f"head variable(s) {', '.join(sorted(missing))} do not occur in the body",
        )


def _time_constants(program: Sequence[Rule]) -> set[Term]:
    times: set[Term] = set()
    for rule in program:
        for atom in rule.atoms():
            t = atom.temporal
            if t is not None and not t.is_var:
                times.add(t)
    return times


def _initial_facts(program: Sequence[Rule], times: set[Term]) -> set[Atom]:
    out: set[Atom] = set()
    for rule in program:
        if not rule.is_fact:
            continue
        head = rule.head
        if head.is_ground:
            out.add(head)
        else:
            for t in sorted(times | {ANYTIME}, key=lambda c: c.name):
                out.add(replace(head, temporal=t))
    return out


def _match(
    pattern: Atom, fact: Atom, bindings: dict[str, Term]
) -> Optional[dict[str, Term]]:
    if pattern.pred != fact.pred:
        return None
    p_terms = tuple(pattern.terms())
    f_terms = tuple(fact.terms())
    if len(p_terms) != len(f_terms):
        return None
    if (pattern.temporal is None) != (fact.temporal is None):
        return None
    out = dict(bindings)
    for p, f in zip(p_terms, f_terms):
        if p.is_var:
            bound = out.get(p.name)
            if bound is None:
                out[p.name] = f
            elif bound != f:
                return None
        elif p != f:
            return None
    return out


def _instantiate(atom: Atom, bindings: dict[str, Term]) -> Atom:
    return replace(
        atom,
        args=tuple(bindings.get(t.name, t) if t.is_var else t for t in atom.args),
        temporal=(
            bindings.get(atom.temporal.name, atom.temporal)
            if atom.temporal is not None and atom.temporal.is_var
            else atom.temporal
        ),
    )


def _by_pred(atoms: Iterable[Atom]) -> dict[str, list[Atom]]:
    out: dict[str, list[Atom]] = {}
    for a in atoms:
        out.setdefault(a.pred, []).append(a)
    return out


def bottomup_eval(program: Sequence[Rule]) -> frozenset[Atom]:
    """The set of ground atoms derivable from a range-restricted program.

    Raises :class:`NotRangeRestrictedError` for rules whose head
    variables are not covered by the body, and for non-ground facts
    other than padded atemporal ones.
    """
    for rule in program:
        _check_range_restricted(rule)

    rules = [r for r in program if not r.is_fact]
    times = _time_constants(program)
    total = _initial_facts(program, times)
    total_idx = _by_pred(total)
    delta = set(total)

    while delta:
        delta_idx = _by_pred(delta)
        new: set[Atom] = set()
        for rule in rules:
            for pivot in range(len(rule.body)):
                if rule.body[pivot].pred not in delta_idx:
                    continue
                stack = [(0, {})]
                while stack:
                    i, bindings = stack.pop()
                    if i == len(rule.body):
                        derived = _instantiate(rule.head, bindings)
                        if derived not in total:
                            new.add(derived)
                        continue
                    source = delta_idx if i == pivot else total_idx
                    for fact in source.get(rule.body[i].pred, ()):
                        nxt = _match(rule.body[i], fact, bindings)
                        if nxt is not None:
                            stack.append((i + 1, nxt))
        total.update(new)
        for a in new:
            total_idx.setdefault(a.pred, []).append(a)
        delta = new

    return frozenset(total)
