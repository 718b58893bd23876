"""Explanation structures built from refutations.

Two views are derived from the refutations of one query.  The
derivation tree merges the refutations' shared prefixes into one tree
whose root-to-leaf paths are exactly the input refutations.  The proof
view regroups the same information around atoms: each node is an
instantiated atom with the alternative rule applications that derive
it, each alternative carrying its instantiated premises as child nodes,
and leaves are the facts given as input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterator, Optional, Sequence

from .errors import MixedRootError, ReconstructionError
from .terms import EMPTY_SUBSTITUTION, Atom, Provenance, Rule, Substitution
from .engine import DerivationStep, Goal, Refutation


@dataclass(frozen=True, slots=True)
class InstantiatedRefutation:
    """A refutation with its full composed substitution applied to every
    goal and every rule instance in its steps."""

    query: Goal
    steps: tuple[DerivationStep, ...]
    computed_answer: Substitution


def instantiate_refutation(r: Refutation | InstantiatedRefutation) -> InstantiatedRefutation:
    """Apply the composition of all step unifiers to all atoms of the
    refutation.  Idempotent."""
    sigma = reduce(
        lambda acc, step: acc.compose(step.mgu), r.steps, EMPTY_SUBSTITUTION
    )
    steps = tuple(
        DerivationStep(
            goal_before=Goal(sigma.atoms(step.goal_before.atoms)),
            selected_index=step.selected_index,
            rule=sigma.rule(step.rule),
            mgu=step.mgu,
            goal_after=Goal(sigma.atoms(step.goal_after.atoms)),
        )
        for step in r.steps
    )
    return InstantiatedRefutation(
        query=Goal(sigma.atoms(r.query.atoms)),
        steps=steps,
        computed_answer=r.computed_answer,
    )


# ---------------------------------------------------------------------------
# Derivation tree (prefix-merged refutations)


@dataclass(slots=True)
class TreeNode:
    """A goal reached during resolution.  ``edge_label`` is the id of
    the rule whose application produced it (None at the root)."""

    goal: Goal
    edge_label: Optional[str] = None
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True, slots=True)
class DerivationTree:
    root: TreeNode

    def leaves(self) -> list[TreeNode]:
        out: list[TreeNode] = []

        def walk(node: TreeNode) -> None:
            if node.is_leaf:
                out.append(node)
            for c in node.children:
                walk(c)

        walk(self.root)
        return out

    def paths(self) -> list[tuple[tuple[Optional[str], Goal], ...]]:
        """Root-to-leaf paths as (rule id, goal) pairs, the root pair
        carrying no rule id."""
        out: list[tuple[tuple[Optional[str], Goal], ...]] = []

        def walk(node: TreeNode, prefix: tuple) -> None:
            here = prefix + ((node.edge_label, node.goal),)
            if node.is_leaf:
                out.append(here)
            for c in node.children:
                walk(c, here)

        walk(self.root, ())
        return out


def build_derivation_tree(rs: Sequence[InstantiatedRefutation]) -> DerivationTree:
    """Merge refutations into one tree, sharing a node exactly when the
    whole prefix of (rule id, instantiated goal) pairs matches.

    Children are ordered by the first refutation that reaches them, and
    the tree has one leaf per refutation.
    """
    if not rs:
        raise MixedRootError("cannot build a tree from zero refutations")
    roots = {r.query for r in rs}
    if len(roots) != 1:
        raise MixedRootError(
            "refutations start from different instantiated queries: "
            + "; ".join(sorted(g.source_form() for g in roots))
        )
    root = TreeNode(goal=rs[0].query)
    for r in rs:
        node = root
        for step in r.steps:
            key = (step.rule_id, step.goal_after)
            for child in node.children:
                if (child.edge_label, child.goal) == key:
                    node = child
                    break
            else:
                child = TreeNode(goal=step.goal_after, edge_label=step.rule_id)
                node.children.append(child)
                node = child
    return DerivationTree(root)


def derivation_tree_export(
    tree: DerivationTree, label: Callable[[Goal], str]
) -> dict:
    """Flat document form of the tree: node ids to label, rule id, and
    child ids.  Ids are assigned in preorder and are stable for a given
    tree."""
    nodes: dict[str, dict] = {}
    counter = 0

    def walk(node: TreeNode) -> str:
        nonlocal counter
        node_id = "root" if not nodes else f"n{counter}"
        counter += 1
        entry = {
            "label": label(node.goal),
            "rule_id": node.edge_label,
            "children": [],
        }
        nodes[node_id] = entry
        for child in node.children:
            entry["children"].append(walk(child))
        return node_id

    walk(tree.root)
    return {"root": "root", "nodes": nodes}


# ---------------------------------------------------------------------------
# Proof view (premise-oriented navigation)


@dataclass(frozen=True, slots=True)
class Alternative:
    """One way to derive a proof node: a rule application with its
    instantiated premises."""

    rule_id: str
    provenance: Provenance
    premises: tuple["ProofNode", ...]
    rule_instance: Rule = field(compare=False)


@dataclass(frozen=True, slots=True)
class ProofNode:
    """An instantiated atom with every alternative derivation observed
    across the refutations.  ``fact_ids`` lists the input facts that
    ground it directly; a node backed only by facts has no alternatives
    and no further explanation."""

    atom: Atom
    alternatives: tuple[Alternative, ...] = ()
    fact_ids: tuple[str, ...] = ()

    @property
    def is_fact(self) -> bool:
        return bool(self.fact_ids) and not self.alternatives


@dataclass(slots=True)
class _Draft:
    atom: Atom
    alts: list[tuple[str, Provenance, list["_Draft"], Rule]] = field(default_factory=list)
    fact_ids: dict[str, None] = field(default_factory=dict)


def build_proof_view(
    rs: Sequence[InstantiatedRefutation], answer_atom: Atom
) -> ProofNode:
    """Reconstruct the proof tree each refutation implies under leftmost
    selection and merge them, deduplicating alternatives that share the
    rule id and the instantiated premise list."""
    root = _Draft(atom=answer_atom)
    for r in rs:
        if len(r.query.atoms) != 1 or r.query.atoms[0] != answer_atom:
            raise ReconstructionError(
                f"refutation proves {r.query.source_form()!r}, "
                f"not {answer_atom.source_form()!r}"
            )
        pending: list[_Draft] = [root]
        for step in r.steps:
            if not pending:
                raise ReconstructionError("refutation has more steps than goals")
            node = pending.pop(0)
            selected = step.goal_before.atoms[step.selected_index]
            if node.atom != selected:
                raise ReconstructionError(
                    f"refutation resolves {selected.source_form()!r} where the "
                    f"proof expects {node.atom.source_form()!r}"
                )
            rule = step.rule
            if rule.is_fact:
                node.fact_ids.setdefault(rule.id)
                continue
            for alt in node.alts:
                if alt[0] == rule.id and tuple(d.atom for d in alt[2]) == rule.body:
                    premises = alt[2]
                    break
            else:
                premises = [_Draft(atom=a) for a in rule.body]
                node.alts.append((rule.id, rule.provenance, premises, rule))
            pending = premises + pending
        if pending:
            raise ReconstructionError("refutation ended with unproven atoms")
    return _freeze(root)


def _freeze(draft: _Draft) -> ProofNode:
    return ProofNode(
        atom=draft.atom,
        alternatives=tuple(
            Alternative(
                rule_id=rule_id,
                provenance=provenance,
                premises=tuple(_freeze(d) for d in premises),
                rule_instance=rule,
            )
            for rule_id, provenance, premises, rule in draft.alts
        ),
        fact_ids=tuple(draft.fact_ids),
    )


def derivation_ways(node: ProofNode) -> int:
    """How many distinct refutations the view encodes below ``node``:
    one per grounding fact plus, per alternative, the product of its
    premises' counts."""
    total = len(node.fact_ids)
    for alt in node.alternatives:
        ways = 1
        for p in alt.premises:
            ways *= derivation_ways(p)
        total += ways
    return total


def proof_nodes(root: ProofNode) -> Iterator[ProofNode]:
    yield root
    for alt in root.alternatives:
        for p in alt.premises:
            yield from proof_nodes(p)


def proof_view_export(
    root: ProofNode,
    render_atom: Callable[[Atom], str],
    render_rule: Callable[[str], str],
) -> dict:
    """Flat document form of a proof view.

    ``render_rule`` receives a rule id and returns its display string.
    Node ids are assigned in preorder, the root id is "root".
    """
    nodes: dict[str, dict] = {}
    counter = 0

    def walk(node: ProofNode) -> str:
        nonlocal counter
        node_id = "root" if not nodes else f"n{counter}"
        counter += 1
        entry: dict = {
            "rendered": render_atom(node.atom),
            "is_fact": node.is_fact,
            "fact_ids": list(node.fact_ids),
            "alternatives": [],
        }
        nodes[node_id] = entry
        for alt in node.alternatives:
            entry["alternatives"].append({
                "rule_id": alt.rule_id,
                "rendered_rule": render_rule(alt.rule_id),
                "provenance": {
                    "law_refs": list(alt.provenance.law_refs),
                    "case_refs": list(alt.provenance.case_refs),
                    "commentary_refs": list(alt.provenance.commentary_refs),
                },
                "premises": [walk(p) for p in alt.premises],
            })
        return node_id

    walk(root)
    return {"root": "root", "nodes": nodes}
