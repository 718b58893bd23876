"""Template-based rendering of atoms and rules."""

from __future__ import annotations

import random

import pytest

from lexlog import (
    Atom,
    Rule,
    UndeclaredPredicateError,
    const,
    render_atom,
    render_rule,
    render_term,
    var,
)


@pytest.fixture(scope="module")
def decls(kb):
    return kb.decl_map()


class TestRenderAtom:
    def test_road_user_golden(self, decls):
        a = Atom("RoadUser", (const("defendant"),), const("15:15"))
        assert render_atom(a, decls).text == "defendant is a road user at 15:15"

    def test_atemporal_omits_time(self, decls):
        a = Atom("On", (const("sign"), const("road1")), var("_T1"), padded=True)
        assert render_atom(a, decls).text == "sign is on road1"
        bare = Atom("On", (const("sign"), const("road1")))
        assert render_atom(bare, decls).text == "sign is on road1"

    def test_padded_slot_bound_to_a_time_shows_it(self, decls):
        a = Atom("Driving", (const("defendant"), const("reg1")), const("15:15"),
                 padded=True)
        assert render_atom(a, decls).text == "defendant is driving reg1 at 15:15"

    def test_source_temporal_variable_shows_its_name(self, decls):
        a = Atom("RoadUser", (var("P"),), var("T"))
        assert render_atom(a, decls).text == "P is a road user at T"

    def test_quoted_constant_displays_unquoted(self, decls):
        a = Atom("BrokenLaw", (const("defendant"), const("§4.1")), const("15:15"))
        assert render_atom(a, decls).text == "defendant has broken §4.1 at 15:15"

    def test_undeclared_predicate(self, decls):
        with pytest.raises(UndeclaredPredicateError):
            render_atom(Atom("Foo", (const("a"),)), decls)

    def test_unsplit_temporal_argument_rejected(self, decls):
        from lexlog import ArityError

        raw = Atom("Driving", (const("a"), const("b"), const("15:15")))
        with pytest.raises(ArityError):
            render_atom(raw, decls)

    def test_inconsistent_template_rejected(self):
        from lexlog import KbError, PredicateDecl

        decls = {"Pair": PredicateDecl("Pair", 2, "only A shows")}
        with pytest.raises(KbError):
            render_atom(Atom("Pair", (const("x"), const("y"))), decls)

    def test_deterministic(self, decls):
        a = Atom("Has", (const("sign"), const("no_overtaking")), const("15:15"))
        assert render_atom(a, decls).text == render_atom(a, decls).text

    def test_repeated_parameter_template(self):
        from lexlog import PredicateDecl

        decls = {"Loves": PredicateDecl("Loves", 1, "P loves P")}
        a = Atom("Loves", (const("narcissus"),))
        assert render_atom(a, decls).text == "narcissus loves narcissus"

    def test_totality_over_declared_predicates(self, decls):
        rng = random.Random(3)
        pool = [const("a"), const("§9"), var("X"), const("15:15")]
        for decl in decls.values():
            for _ in range(5):
                a = Atom(
                    decl.name,
                    tuple(rng.choice(pool) for _ in range(decl.base_arity)),
                    rng.choice([None, const("t"), var("T")]),
                )
                assert render_atom(a, decls).text


class TestRenderRule:
    def test_road_user_rule_golden(self, kb, decls):
        rule = next(r for r in kb.rules if r.id == "r3")
        assert render_rule(rule, decls).text == (
            "P is a road user at T if P is driving C at T and C is on R at T "
            "and R is a road at T"
        )

    def test_fact_renders_as_head(self, decls):
        fact = Rule("f1", Atom("Road", (const("road1"),)))
        assert render_rule(fact, decls).text == "road1 is a road"

    def test_undeclared_predicate(self, decls):
        rule = Rule("r", Atom("Mystery", (var("X"),)), (Atom("Road", (var("X"),)),))
        with pytest.raises(UndeclaredPredicateError):
            render_rule(rule, decls)


def test_render_term():
    assert render_term(const("§4.1")) == "§4.1"
    assert render_term(const("aston martin")) == "aston martin"
    assert render_term(var("P")) == "P"
