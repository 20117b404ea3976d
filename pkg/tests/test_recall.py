import random

import pytest

from dynobs import fixtures
from dynobs import formulas as fm
from dynobs.formulas import parse_formula
from dynobs.ktree import KTree, leaf
from dynobs.model import parse_model
from dynobs.recall import (
    Verdict,
    equiv_histories,
    eval_bounded,
    info_set_enum,
    ktree_enum,
    lastobs,
    obslist,
)

from conftest import rand_model, rand_history_formula, rand_point


def recs(m, record):
    return {m.agents[0]: tuple(record)}


def three_obs_model():
    return parse_model(
        """
observations: oi o1 o2 o3 ;
atoms: ;
states: s0 ;
init: s0 ;
initobs: oi ;
trans: s0 -> s0 ;
"""
    )


def test_obslist_worked_example():
    m = three_obs_model()
    r = recs(m, [("o1", 0), ("o2", 3), ("o3", 3)])
    assert obslist(m, r, "a", 0) == ["oi", "o1"]
    assert obslist(m, r, "a", 1) == ["o1"]
    assert obslist(m, r, "a", 2) == ["o1"]
    assert obslist(m, r, "a", 3) == ["o1", "o2", "o3"]
    assert obslist(m, r, "a", 4) == ["o3"]
    assert obslist(m, recs(m, []), "a", 5) == ["oi"]


def test_lastobs():
    m = three_obs_model()
    r = recs(m, [("o1", 0), ("o2", 3), ("o3", 3)])
    assert lastobs(m, r, "a", 5) == "o3"
    assert lastobs(m, recs(m, []), "a", 3) == "oi"
    assert lastobs(m, recs(m, [("o2", 0)]), "a", 1) == "o2"


def test_equiv_histories_security_example():
    m = fixtures.fig1()
    got = set(equiv_histories(m, ("s0", "s2", "s5"), recs(m, []), "a"))
    assert got == {("s0", "s1", "s4"), ("s0", "s2", "s5")}
    assert equiv_histories(m, ("s0",), recs(m, []), "a") == [("s0",)]


def test_equiv_histories_perfect_observation_is_identity():
    m = fixtures.fig2()
    r = recs(m, [("o2", 0)])
    for h in [("s1",), ("s1", "s2"), ("s1", "s1", "s2")]:
        assert equiv_histories(m, h, r, "a") == [h]


def test_record_must_stop_at_history():
    m = fixtures.fig2()
    with pytest.raises(ValueError, match="stop"):
        equiv_histories(m, ("s1",), recs(m, [("o2", 3)]), "a")


def test_info_set_examples():
    m = fixtures.fig1()
    assert info_set_enum(m, ("s0", "s2", "s5"), recs(m, [])) == {"s4", "s5"}
    assert info_set_enum(m, ("s0", "s2", "s5"), recs(m, [("o2", 2)])) == {"s5"}
    m2 = fixtures.fig2()
    assert info_set_enum(m2, ("s1",), recs(m2, [])) == {"s1", "s2"}


def test_info_set_requires_mono():
    text = "agents: a b ;\n" + fixtures.FIG1.replace("initobs: o1 ;", "initobs: a = o1  b = o2 ;")
    m = parse_model(text)
    with pytest.raises(ValueError, match="mono"):
        info_set_enum(m, ("s0",), {"a": (), "b": ()})


def test_ktree_enum_base_case():
    rng = random.Random(3)
    for _ in range(10):
        m = rand_model(rng, n_agents=rng.choice([1, 2]))
        h, records = rand_point(rng, m)
        t = ktree_enum(m, h, records, 0)
        assert t == leaf(h[-1], len(m.agents))


def test_ktree_enum_depth1_matches_info_set():
    rng = random.Random(4)
    for _ in range(25):
        m = rand_model(rng)
        h, records = rand_point(rng, m)
        t = ktree_enum(m, h, records, 1)
        assert t.root == h[-1]
        assert {u.root for u in t.forests[0]} == info_set_enum(m, h, records)


def test_ktree_enum_two_agent_example():
    text = "agents: a b ;\n" + fixtures.FIG1.replace("initobs: o1 ;", "initobs: a = o1  b = o2 ;")
    m = parse_model(text)
    t = ktree_enum(m, ("s0", "s2"), {"a": (), "b": ()}, 1)
    assert t.root == "s2"
    assert {u.root for u in t.forests[0]} == {"s1", "s2"}
    assert {u.root for u in t.forests[1]} == {"s2"}


def test_eval_bounded_examples():
    m1 = fixtures.fig1()
    f = parse_formula("K !p", m1)
    assert eval_bounded(m1, ("s0",), None, f, 0) is Verdict.HOLDS
    m2 = fixtures.fig2()
    f = parse_formula("A X true", m2)
    assert eval_bounded(m2, ("s1",), None, f, 1) is Verdict.HOLDS
    f = parse_formula("K p", m1)
    assert eval_bounded(m1, ("s0", "s2", "s5"), recs(m1, [("o2", 2)]), f, 0) is Verdict.HOLDS


def test_eval_bounded_reports_unknown_honestly():
    m = fixtures.fig1()
    f = parse_formula("A G !p", m)
    # on the loop at s4 this is true but unprovable at any finite horizon
    assert eval_bounded(m, ("s0", "s1", "s4"), None, f, 3) is Verdict.UNKNOWN
    # a finite witness settles the negation
    f2 = parse_formula("E F p", m)
    assert eval_bounded(m, ("s0",), None, f2, 2) is Verdict.HOLDS


def test_eval_bounded_monotone_in_horizon():
    rng = random.Random(9)
    checked = 0
    for _ in range(40):
        m = rand_model(rng, n_agents=rng.choice([1, 2]), max_states=4)
        f = rand_history_formula(rng, m, size=rng.randint(1, 7), max_kd=1)
        h, records = rand_point(rng, m, max_len=2)
        v3 = eval_bounded(m, h, records, f, 3)
        v4 = eval_bounded(m, h, records, f, 4)
        if v3 is not Verdict.UNKNOWN:
            checked += 1
            assert v4 is v3
    assert checked >= 10


def test_equiv_histories_is_equivalence():
    rng = random.Random(10)
    for _ in range(15):
        m = rand_model(rng, max_states=4)
        h, records = rand_point(rng, m, max_len=3)
        cls = equiv_histories(m, h, records, "a")
        assert tuple(h) in cls  # reflexive
        for h2 in cls:
            cls2 = set(equiv_histories(m, h2, records, "a"))
            assert set(cls) == cls2  # symmetric + transitive on the class
