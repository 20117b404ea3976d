import random

import pytest

from dynobs import fixtures
from dynobs import formulas as fm
from dynobs.formulas import (
    FormulaError,
    delta_pairs,
    format_formula,
    innermost_epistemic,
    knowledge_depth,
    parse_formula,
    strip_deltas,
    substitute,
)
from dynobs.model import parse_model

from conftest import rand_model, rand_history_formula


def two_agent_model():
    text = "agents: a b ;\n" + fixtures.FIG1.replace("initobs: o1 ;", "initobs: a = o1  b = o2 ;")
    return parse_model(text)


def test_parse_example_formula_shape():
    m = fixtures.fig2()
    f = parse_formula(fixtures.FIG2_FORMULA, m)
    assert f == fm.SetObs(
        "a",
        "o2",
        fm.Or(
            fm.Knows("a", fm.Atom("q")),
            fm.SetObs("a", "o1", fm.Knows("a", fm.AllPaths(fm.Next(fm.Atom("q"))))),
        ),
    )


def test_stratification():
    m = fixtures.fig2()
    assert parse_formula("A (q U q)", m)
    with pytest.raises(FormulaError, match="temporal operator outside path context"):
        parse_formula("q U q", m)
    with pytest.raises(FormulaError, match="temporal operator"):
        parse_formula("K (X q)", m)


def test_diag_formula_parses():
    m = fixtures.diag()
    f = parse_formula(fixtures.DIAG_FULL, m)
    assert isinstance(f, fm.SetObs) and f.obs == "o_sc"
    inner = f.sub
    assert isinstance(inner, fm.AllPaths)
    assert isinstance(inner.sub, fm.Always)


def test_unknown_names():
    m = fixtures.fig2()
    with pytest.raises(FormulaError, match="unknown atom"):
        parse_formula("zz", m)
    with pytest.raises(FormulaError, match="unknown observation"):
        parse_formula("D[o9] q", m)
    with pytest.raises(FormulaError, match="unknown agent"):
        parse_formula("K[bob] q", m)


def test_mono_shorthand_rejected_on_multi():
    m = two_agent_model()
    with pytest.raises(FormulaError, match="ambiguous"):
        parse_formula("K p", m)
    with pytest.raises(FormulaError, match="ambiguous"):
        parse_formula("D[o1] p", m)
    assert parse_formula("K[a] p", m) == fm.Knows("a", fm.Atom("p"))
    assert parse_formula("D[b,o1] p", m) == fm.SetObs("b", "o1", fm.Atom("p"))


def test_exists_stored_as_not_all_not():
    m = fixtures.fig2()
    f = parse_formula("E X q", m)
    assert f == fm.Not(fm.AllPaths(fm.Not(fm.Next(fm.Atom("q")))))


def test_knowledge_depth():
    m = two_agent_model()
    assert knowledge_depth(parse_formula("p", m)) == 0
    assert knowledge_depth(parse_formula("K[a] K[b] p", m)) == 2
    m2 = fixtures.fig2()
    assert knowledge_depth(parse_formula(fixtures.FIG2_FORMULA, m2)) == 1
    # observation change does not add depth
    assert knowledge_depth(parse_formula("D[o1] D[o2] K q", m2)) == 1


def test_substitute():
    m = fixtures.fig2()
    phi = parse_formula(fixtures.FIG2_FORMULA, m)
    kq = fm.Knows("a", fm.Atom("q"))
    out, n = substitute(phi, kq, "p1")
    assert n == 1
    assert out == fm.SetObs(
        "a",
        "o2",
        fm.Or(fm.Atom("p1"), fm.SetObs("a", "o1", fm.Knows("a", fm.AllPaths(fm.Next(fm.Atom("q")))))),
    )
    out, n = substitute(fm.Atom("p1"), fm.Atom("q"), "r")
    assert (out, n) == (fm.Atom("p1"), 0)
    dup = fm.And(kq, kq)
    out, n = substitute(dup, kq, "p1")
    assert out == fm.And(fm.Atom("p1"), fm.Atom("p1")) and n == 2
    with pytest.raises(FormulaError, match="already occurs"):
        substitute(fm.And(fm.Atom("p1"), kq), kq, "p1")


def test_innermost_epistemic():
    m = fixtures.fig2()
    phi = parse_formula(fixtures.FIG2_FORMULA, m)
    assert innermost_epistemic(phi) == fm.Knows("a", fm.Atom("q"))
    assert innermost_epistemic(parse_formula("A G q", m)) is None
    got = innermost_epistemic(parse_formula("D[o1] K q", m))
    assert got == fm.Knows("a", fm.Atom("q"))


def test_elimination_loop_terminates_in_operator_count():
    rng = random.Random(5)
    for _ in range(60):
        m = rand_model(rng, n_agents=rng.choice([1, 2]))
        f = rand_history_formula(rng, m, size=rng.randint(1, 12))
        count = 0
        g = f

        def epi_nodes(h):
            n = 1 if isinstance(h, (fm.Knows, fm.SetObs)) else 0
            return n + sum(epi_nodes(c) for c in fm.children(h))

        expected = epi_nodes(f)
        while True:
            cand = innermost_epistemic(g)
            if cand is None:
                break
            g, hits = substitute(g, cand, f"@t{count}")
            count += hits
        assert count == expected
        assert knowledge_depth(g) == 0


def test_depth_never_grows_under_substitution():
    rng = random.Random(6)
    for _ in range(50):
        m = rand_model(rng, n_agents=2)
        f = rand_history_formula(rng, m, size=10)
        cand = innermost_epistemic(f)
        if cand is None:
            continue
        g, _ = substitute(f, cand, "@x")
        assert knowledge_depth(g) <= knowledge_depth(f)


def test_print_parse_round_trip():
    rng = random.Random(7)
    for _ in range(120):
        m = rand_model(rng, n_agents=rng.choice([1, 2]))
        f = rand_history_formula(rng, m, size=rng.randint(1, 14))
        text = format_formula(f)
        assert parse_formula(text, m) == f


def test_strip_and_pairs():
    m = fixtures.fig2()
    f = parse_formula(fixtures.FIG2_FORMULA, m)
    assert delta_pairs(f) == {("a", "o1"), ("a", "o2")}
    assert strip_deltas(f) == fm.Or(
        fm.Knows("a", fm.Atom("q")), fm.Knows("a", fm.AllPaths(fm.Next(fm.Atom("q"))))
    )
