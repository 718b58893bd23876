"""Shared test helpers: program assembly shortcuts, refutation replay,
random program generators, and brute-force reference evaluators."""

from __future__ import annotations

import random

from lexlog import (
    Atom,
    CompiledKb,
    Goal,
    Refutation,
    Rule,
    assemble_program,
    facts_to_rules,
    parse_goal,
    unify,
    var,
    const,
)
from lexlog.language import pad_atoms
from lexlog.terms import EMPTY_SUBSTITUTION


def case_program(kb: CompiledKb, facts: tuple[Atom, ...]) -> tuple[Rule, ...]:
    padded = pad_atoms(facts, kb.decl_map(), shared_scope=False)
    return assemble_program(
        kb, facts_to_rules(padded, start=len(kb.fact_rules) + 1)
    )


def padded_goal(kb: CompiledKb, text: str) -> tuple[Goal, tuple[str, ...]]:
    atoms = parse_goal(text)
    user_vars = tuple(dict.fromkeys(n for a in atoms for n in a.variables()))
    return Goal(pad_atoms(atoms, kb.decl_map())), user_vars


def replay(refutation: Refutation) -> None:
    """Re-execute a refutation's steps from its query and check that
    every recorded goal and the computed answer reproduce."""
    goal = refutation.query
    sigma = EMPTY_SUBSTITUTION
    for step in refutation.steps:
        assert step.goal_before == goal
        assert step.selected_index == 0
        mgu = unify(goal.atoms[0], step.rule.head)
        assert mgu is not None and mgu == step.mgu
        goal = Goal(mgu.atoms(step.rule.body + goal.atoms[1:]))
        assert goal == step.goal_after
        sigma = sigma.compose(step.mgu)
    assert goal.is_empty
    qvars = tuple(dict.fromkeys(refutation.query.variables()))
    assert sigma.restrict(qvars) == refutation.computed_answer


# ---------------------------------------------------------------------------
# Random pure programs whose SLD search terminates under the loop check:
# recursion is allowed only in a rule's last body position, guarded by at
# least one strictly lower predicate, so goals stay bounded.


def random_safe_program(rng: random.Random) -> tuple[list[Rule], str, int]:
    n_pred = rng.randint(2, 5)
    arities = [rng.randint(1, 2) for _ in range(n_pred)]
    consts = [const(f"c{i}") for i in range(rng.randint(2, 6))]
    varpool = ["X", "Y", "Z", "W"]
    rules: list[Rule] = []
    serial = 0

    def fresh_id(prefix: str) -> str:
        nonlocal serial
        serial += 1
        return f"{prefix}{serial}"

    # Fact density stays modest: the engine enumerates every refutation,
    # and dense bases under recursion make proof counts explode.
    for i in range(n_pred):
        for _ in range(rng.randint(1, 3) if i == 0 else rng.randint(0, 2)):
            args = tuple(rng.choice(consts) for _ in range(arities[i]))
            rules.append(Rule(fresh_id("g"), Atom(f"p{i}", args)))

    for i in range(1, n_pred):
        for _ in range(rng.randint(1, 2)):
            body: list[Atom] = []
            n_body = rng.randint(1, 3)
            recursive = rng.random() < 0.4 and n_body >= 2
            for _ in range(n_body - (1 if recursive else 0)):
                j = rng.randrange(0, i)
                args = tuple(
                    var(rng.choice(varpool)) if rng.random() < 0.7 else rng.choice(consts)
                    for _ in range(arities[j])
                )
                body.append(Atom(f"p{j}", args))
            if recursive:
                args = tuple(
                    var(rng.choice(varpool)) if rng.random() < 0.8 else rng.choice(consts)
                    for _ in range(arities[i])
                )
                body.append(Atom(f"p{i}", args))
            body_vars = sorted({v for a in body for v in a.variables()})
            head_args = tuple(
                var(rng.choice(body_vars))
                if body_vars and rng.random() < 0.85
                else rng.choice(consts)
                for _ in range(arities[i])
            )
            rules.append(Rule(fresh_id("r"), Atom(f"p{i}", head_args), tuple(body)))

    query_pred = rng.randrange(1, n_pred)
    return rules, f"p{query_pred}", arities[query_pred]


def open_query(pred: str, arity: int) -> Goal:
    return Goal((Atom(pred, tuple(var(f"Q{i}") for i in range(arity))),))


def solved_ground_atoms(pred: str, arity: int, answers) -> set[Atom]:
    """Ground instances of an all-variable query under its answers."""
    out = set()
    for answer in answers:
        args = tuple(answer.term(var(f"Q{i}")) for i in range(arity))
        assert all(not t.is_var for t in args), "expected ground answers"
        out.add(Atom(pred, args))
    return out


def naive_ground_eval(rules: list[Rule]) -> set[Atom]:
    """Dead-simple fixpoint by repeated full instantiation; the check on
    the semi-naive evaluator."""
    consts = sorted(
        {t.name for r in rules for a in r.atoms() for t in a.terms() if not t.is_var}
    )
    pool = [const(c) for c in consts] or [const("c0")]
    total: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            rule_vars = sorted(set(rule.variables()))
            for combo in _assignments(rule_vars, pool):
                sub = {v: t for v, t in zip(rule_vars, combo)}
                if all(_ground(a, sub) in total for a in rule.body):
                    head = _ground(rule.head, sub)
                    if head not in total:
                        total.add(head)
                        changed = True
    return total


def _assignments(names, pool):
    if not names:
        yield ()
        return
    for t in pool:
        for rest in _assignments(names[1:], pool):
            yield (t,) + rest


def _ground(atom: Atom, sub: dict) -> Atom:
    from dataclasses import replace

    def g(t):
        return sub[t.name] if t.is_var else t

    return replace(
        atom,
        args=tuple(g(t) for t in atom.args),
        temporal=g(atom.temporal) if atom.temporal is not None else None,
    )


def random_wild_program(rng: random.Random) -> tuple[list[Rule], str, int]:
    """Range-restricted programs with no structural safety at all:
    recursion may be left, mutual, or both, so resolution may only
    terminate by truncation.  Facts stay ground, which keeps answers
    ground and the fixpoint comparable.  Kept deliberately tiny: with
    growing goals the depth cap is the only bound on failing branches,
    and the search tree is exponential in it.
    """
    n_pred = rng.randint(2, 3)
    arities = [rng.randint(1, 2) for _ in range(n_pred)]
    consts = [const(f"c{i}") for i in range(rng.randint(2, 4))]
    varpool = ["X", "Y", "Z"]
    rules: list[Rule] = []
    serial = 0
    for i in range(n_pred):
        for _ in range(rng.randint(0, 2)):
            serial += 1
            args = tuple(rng.choice(consts) for _ in range(arities[i]))
            rules.append(Rule(f"g{serial}", Atom(f"p{i}", args)))
    for _ in range(rng.randint(1, 3)):
        head_pred = rng.randrange(n_pred)
        body: list[Atom] = []
        for _ in range(rng.randint(1, 2)):
            j = rng.randrange(n_pred)
            args = tuple(
                var(rng.choice(varpool)) if rng.random() < 0.7 else rng.choice(consts)
                for _ in range(arities[j])
            )
            body.append(Atom(f"p{j}", args))
        body_vars = sorted({v for a in body for v in a.variables()})
        head_args = tuple(
            var(rng.choice(body_vars))
            if body_vars and rng.random() < 0.85
            else rng.choice(consts)
            for _ in range(arities[head_pred]))
        serial += 1
        rules.append(Rule(f"r{serial}", Atom(f"p{head_pred}", head_args), tuple(body)))
    query_pred = rng.randrange(n_pred)
    return rules, f"p{query_pred}", arities[query_pred]


# ---------------------------------------------------------------------------
# Ground-level equivalence of desugaring: the extended body holds under a
# fact set exactly when some expanded rule body does, for every variable
# instantiation over a three-constant universe and every fact subset.

import itertools

from lexlog import desugar_rule, expand_or_arguments
from lexlog.language import (
    BodyAtom,
    BodyConj,
    BodyDisj,
    ExtendedAtom,
    ExtendedRule,
    body_leaves,
)

EQUIV_PREDS = {"A": 1, "B": 1, "C": 2}
EQUIV_CONSTS = (const("u"), const("v"), const("w"))


def random_extended_body(rng: random.Random, max_or_sets: int = 2):
    """A random body formula: at most three binary operators (so at most
    three disjunctions) over four leaves, with up to ``max_or_sets``
    multi-element OR-sets injected afterwards."""

    def plain_leaf():
        pred = rng.choice(list(EQUIV_PREDS))
        pool = [var("X"), var("Y"), *EQUIV_CONSTS]
        return BodyAtom(ExtendedAtom(
            pred,
            tuple((rng.choice(pool),) for _ in range(EQUIV_PREDS[pred])),
        ))

    def tree(depth):
        if depth >= 2 or rng.random() < 0.45:
            return plain_leaf()
        parts = tuple(tree(depth + 1) for _ in range(2))
        return rng.choice([
            BodyConj(parts, tight=bool(rng.getrandbits(1))),
            BodyDisj(parts),
        ])

    def inject(node, budget):
        if budget <= 0:
            return node, 0
        if isinstance(node, BodyAtom):
            argsets = list(node.atom.argsets)
            used = 0
            for i in range(len(argsets)):
                if budget - used > 0 and rng.random() < 0.35:
                    argsets[i] = tuple(
                        rng.sample(list(EQUIV_CONSTS), rng.choice([2, 3]))
                    )
                    used += 1
            return BodyAtom(ExtendedAtom(node.atom.pred, tuple(argsets))), used
        parts = []
        used = 0
        for p in node.parts:
            new, n = inject(p, budget - used)
            parts.append(new)
            used += n
        if isinstance(node, BodyConj):
            return BodyConj(tuple(parts), node.tight), used
        return BodyDisj(tuple(parts)), used

    body, _ = inject(tree(0), max_or_sets)
    return body


def eval_extended_body(node, assignment: dict, facts: set) -> bool:
    """Direct recursive semantics of the formula tree; the independent
    side of the desugaring check."""
    if isinstance(node, BodyAtom):
        for choice in expand_or_arguments(node.atom):
            grounded = Atom(
                choice.pred,
                tuple(assignment.get(t.name, t) if t.is_var else t
                      for t in choice.args),
            )
            if grounded in facts:
                return True
        return False
    if isinstance(node, BodyDisj):
        return any(eval_extended_body(p, assignment, facts) for p in node.parts)
    return all(eval_extended_body(p, assignment, facts) for p in node.parts)


def check_desugar_equivalence(body, max_subset_atoms: int = 8) -> int:
    """Exhaustively compare formula truth with expanded-rule truth over
    all variable instantiations and fact subsets.  Returns the number of
    (instantiation, subset) pairs checked."""
    rule = ExtendedRule("r1", Atom("H", (var("X"),)), body)
    expanded = desugar_rule(rule)
    variables = sorted({v for leaf in body_leaves(body) for v in leaf.variables()})
    checked = 0
    for combo in itertools.product(EQUIV_CONSTS, repeat=len(variables)):
        assignment = dict(zip(variables, combo))
        ground_atoms = sorted(
            {
                Atom(g.pred, tuple(assignment.get(t.name, t) if t.is_var else t
                                   for t in g.args))
                for leaf in body_leaves(body)
                for g in expand_or_arguments(leaf)
            },
            key=lambda a: a.source_form(),
        )[:max_subset_atoms]
        for mask in range(2 ** len(ground_atoms)):
            facts = {a for i, a in enumerate(ground_atoms) if mask >> i & 1}
            via_formula = eval_extended_body(body, assignment, facts)
            via_rules = any(
                all(
                    Atom(a.pred, tuple(assignment.get(t.name, t) if t.is_var else t
                                       for t in a.args)) in facts
                    for a in r.body
                )
                for r in expanded
            )
            assert via_formula == via_rules, (
                f"formula and expansion disagree on {body.source_form()} "
                f"under {assignment} with facts {sorted(map(str, facts))}"
            )
            checked += 1
    return checked
