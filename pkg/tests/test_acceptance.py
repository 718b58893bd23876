"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

One criterion is intentionally expected to fail and is marked strict
xfail: after removing Has(lines, no_overtaking) and additionally
On(defendant, road1, "15:15"), the stated expectation of one remaining
derivation is unattainable, because that On fact also supports the
statute rule's own "person on the road" premise, so its removal leaves
no derivation at all.  Hand enumeration and the bottom-up evaluator
agree on zero; the companion tests nail down the true counts, including
the single-derivation outcome when the car's position On(reg1, road1,
"15:15") is removed instead.
"""

from __future__ import annotations

import random
import time

import pytest
from fastapi.testclient import TestClient

from lexlog import (
    Atom,
    Substitution,
    bottomup_eval,
    builtin_program,
    const,
    desugar_rule,
    fixture_case_facts,
    instantiate_refutation,
    build_derivation_tree,
    pad_temporal,
    render_atom,
    solve,
    SolveLimits,
    var,
)
from lexlog.cli import main as cli_main
from lexlog.service import create_app

from util import (
    case_program,
    check_desugar_equivalence,
    open_query,
    padded_goal,
    random_extended_body,
    random_safe_program,
    solved_ground_atoms,
)


def report(name: str, ok: bool, note: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({note})" if note else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")


FIXTURE_TEXTS = [f"{a.source_form()}." for a in fixture_case_facts("tailgating")]


def fixture_client(tmp_path) -> tuple[TestClient, str]:
    client = TestClient(create_app(data_dir=tmp_path / "sessions"))
    sid = client.post("/sessions").json()["id"]
    for text in FIXTURE_TEXTS:
        assert client.post(
            f"/sessions/{sid}/facts", json={"text": text}
        ).status_code == 200
    return client, sid


def remove_fact(client, sid, text) -> None:
    facts = client.get(f"/sessions/{sid}/facts").json()["facts"]
    index = next(f["index"] for f in facts if f["text"] == text)
    assert client.delete(f"/sessions/{sid}/facts/{index}").status_code == 200


def run_query(client, sid) -> dict:
    response = client.post(
        f"/sessions/{sid}/query", json={"goal": "BrokenLaw(P, X, T)"}
    )
    assert response.status_code == 200
    return response.json()


# ---------------------------------------------------------------------------


def test_fixture_reproduction(kb, tailgating_program):
    goal, user_vars = padded_goal(kb, "BrokenLaw(P, X, T)")
    t0 = time.perf_counter()
    result = solve(goal, tailgating_program, answer_vars=user_vars)
    elapsed = time.perf_counter() - t0

    ok = (
        not result.truncated
        and len(result.entries) == 1
        and result.entries[0].answer == Substitution({
            "P": const("defendant"), "X": const("§4.1"), "T": const("15:15"),
        })
        and len(result.entries[0].refutations) == 4
        and elapsed < 1.0
    )
    report("fixture-reproduction", ok, f"{elapsed * 1000:.0f} ms, "
           f"{len(result.entries)} answer(s), "
           f"{result.refutation_count()} refutation(s)")
    assert ok


def test_expansion_count(capsys):
    padded = pad_temporal(builtin_program())
    statute_rule = padded.rules[0]
    expanded = desugar_rule(statute_rule)

    assert cli_main(["check"]) == 0
    out = capsys.readouterr().out
    with capsys.disabled():
        ok = len(expanded) == 6 and "total pure rules: 8" in out
        report("expansion-count", ok,
               f"statute rule -> {len(expanded)} pure rules")
    assert ok


def test_explanation_tree_shape(tailgating_result):
    refutations = tailgating_result.entries[0].refutations
    instantiated = [instantiate_refutation(r) for r in refutations]
    tree = build_derivation_tree(instantiated)

    leaves = tree.leaves()
    paths = [tuple(path[1:]) for path in tree.paths()]
    wanted = [
        tuple((s.rule_id, s.goal_after) for s in r.steps) for r in instantiated
    ]
    ok = len(leaves) == 4 and paths == wanted
    report("explanation-tree-shape", ok, f"{len(leaves)} leaves")
    assert ok


def test_rendering_goldens(kb):
    decls = kb.decl_map()
    road_user = render_atom(
        Atom("RoadUser", (const("defendant"),), const("15:15")), decls
    ).text
    verdict = render_atom(
        Atom("BrokenLaw", (const("defendant"), const("§4.1")), const("15:15")),
        decls,
    ).text
    ok = (
        road_user == "defendant is a road user at 15:15"
        and verdict == "defendant has broken §4.1 at 15:15"
    )
    report("rendering-goldens", ok)
    assert ok


def test_what_if_first_removal(tmp_path):
    client, sid = fixture_client(tmp_path)
    remove_fact(client, sid, "Has(lines, no_overtaking).")
    body = run_query(client, sid)
    ok = (
        len(body["answers"]) == 1 and body["answers"][0]["refutations"] == 2
    )
    report("what-if-remove-marking-instruction", ok,
           f"{len(body['answers'])} answer(s), "
           f"{body['answers'][0]['refutations'] if body['answers'] else 0} refutation(s)")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason=(
        "On(defendant, road1, \"15:15\") also supports the statute rule's own "
        "On(P, R, T) premise; removing it leaves zero derivations, not one "
        "(hand enumeration and the bottom-up evaluator agree)"
    ),
)
def test_what_if_second_removal_as_stated(tmp_path):
    client, sid = fixture_client(tmp_path)
    remove_fact(client, sid, "Has(lines, no_overtaking).")
    remove_fact(client, sid, 'On(defendant, road1, "15:15").')
    body = run_query(client, sid)
    ok = (
        len(body["answers"]) == 1 and body["answers"][0]["refutations"] == 1
    )
    report("what-if-remove-defendant-position-as-stated", ok,
           f"unattainable: engine correctly finds {len(body['answers'])} answer(s)")
    assert ok


def test_what_if_second_removal_true_counts(tmp_path):
    """The oracle-verified counterpart of the criterion above: removing
    the defendant's position yields zero answers; removing the car's
    position instead yields the single surviving derivation."""
    client, sid = fixture_client(tmp_path)
    remove_fact(client, sid, "Has(lines, no_overtaking).")
    remove_fact(client, sid, 'On(defendant, road1, "15:15").')
    none_left = run_query(client, sid)

    client2, sid2 = fixture_client(tmp_path)
    remove_fact(client2, sid2, "Has(lines, no_overtaking).")
    remove_fact(client2, sid2, 'On(reg1, road1, "15:15").')
    one_left = run_query(client2, sid2)

    # cross-check the zero-answer case against the bottom-up evaluator
    from lexlog import builtin_kb

    kb = builtin_kb()
    removed = {
        Atom("Has", (const("lines"), const("no_overtaking"))),
        Atom("On", (const("defendant"), const("road1"), const("15:15"))),
    }
    remaining = tuple(
        a for a in fixture_case_facts("tailgating") if a not in removed
    )
    fixpoint = bottomup_eval(case_program(kb, remaining))
    broken = {a for a in fixpoint if a.pred == "BrokenLaw"}

    ok = (
        none_left["answers"] == []
        and broken == set()
        and len(one_left["answers"]) == 1
        and one_left["answers"][0]["refutations"] == 1
    )
    report("what-if-remove-position-true-counts", ok,
           "defendant's position -> 0 answers; car's position -> 1 answer, "
           "1 refutation")
    assert ok


def test_oracle_equivalence_500_programs():
    rng = random.Random(20240810)
    limits = SolveLimits(max_depth=400, max_refutations=200_000)
    t0 = time.perf_counter()
    programs = 0
    for _ in range(500):
        rules, pred, arity = random_safe_program(rng)
        fixpoint = bottomup_eval(tuple(rules))
        result = solve(open_query(pred, arity), tuple(rules), limits)
        assert not result.truncated, "limit flag raised"
        got = solved_ground_atoms(pred, arity, result.answers)
        want = {a for a in fixpoint if a.pred == pred}
        assert got == want, f"disagreement on program {programs}"
        programs += 1
    elapsed = time.perf_counter() - t0
    ok = programs == 500 and elapsed < 60.0
    report("oracle-equivalence", ok, f"{programs} programs in {elapsed:.1f} s")
    assert ok


def test_termination_on_cycle():
    from lexlog import Rule

    nodes = ["n1", "n2", "n3", "n4"]
    rules = [
        Rule(f"e{i}", Atom("edge", (const(a), const(b))))
        for i, (a, b) in enumerate(zip(nodes, nodes[1:] + nodes[:1]), 1)
    ] + [
        Rule("p1", Atom("path", (var("X"), var("Y"))),
             (Atom("edge", (var("X"), var("Y"))),)),
        Rule("p2", Atom("path", (var("X"), var("Y"))),
             (Atom("edge", (var("X"), var("Z"))),
              Atom("path", (var("Z"), var("Y"))))),
    ]
    result = solve(open_query("path", 2), tuple(rules),
                   SolveLimits(max_depth=200, max_refutations=100_000))
    got = solved_ground_atoms("path", 2, result.answers)
    want = {Atom("path", (const(a), const(b))) for a in nodes for b in nodes}
    ok = not result.truncated and got == want
    report("termination-on-cycle", ok, f"{len(got)} reachability tuples")
    assert ok


def test_desugaring_equivalence_100_rules():
    rng = random.Random(424242)
    t0 = time.perf_counter()
    pairs = 0
    for _ in range(100):
        pairs += check_desugar_equivalence(random_extended_body(rng))
    elapsed = time.perf_counter() - t0
    ok = pairs > 0
    report("desugaring-equivalence", ok,
           f"100 rules, {pairs} instantiation/subset pairs in {elapsed:.1f} s")
    assert ok
