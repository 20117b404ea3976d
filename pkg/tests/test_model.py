import pytest

from dynobs import fixtures
from dynobs.model import Model, ModelError, parse_model, serialize_model

from conftest import rand_model
import random


def test_parse_fig2_shape():
    m = fixtures.fig2()
    assert len(m.states) == 2
    assert len(m.transitions) == 3
    assert m.initial_state == "s1"
    assert m.initial_obs == {"a": "o1"}
    assert m.eq_class("o1", "s1") == {"s1", "s2"}
    assert m.eq_class("o2", "s1") == {"s1"}


def test_parse_fig1_shape():
    m = fixtures.fig1()
    assert len(m.states) == 7
    assert len(m.transitions) == 9
    assert m.eq_class("o1", "s5") == {"s4", "s5", "s6"}
    assert m.eq_class("o2", "s2") == {"s2", "s3"}
    assert m.validate() == []


def test_not_left_total_rejected():
    text = """\
observations: o1 ;
atoms: ;
states: s0 s1 ;
init: s0 ;
initobs: o1 ;
trans: s0 -> s1 ;
"""
    with pytest.raises(ModelError, match="left-total"):
        parse_model(text)


def test_duplicate_state_rejected():
    text = fixtures.FIG2.replace("states: s1 s2 ;", "states: s1 s1 ;")
    with pytest.raises(ModelError, match="duplicate"):
        parse_model(text)


def test_unknown_identifier_in_later_section():
    text = fixtures.FIG2.replace("init: s1 ;", "init: s9 ;")
    with pytest.raises(ModelError, match="unknown state 's9'"):
        parse_model(text)


def test_state_in_two_blocks_rejected():
    text = fixtures.FIG2.replace("obs o1 : { s1 s2 } ;", "obs o1 : { s1 s2 } { s1 } ;")
    with pytest.raises(ModelError, match="two blocks"):
        parse_model(text)


def test_syntax_error_carries_position():
    with pytest.raises(ModelError, match=r"^\d+:\d+:"):
        parse_model("observations o1 ;")


def test_unlisted_states_become_singletons():
    m = fixtures.fig1()
    assert m.eq_class("o1", "s0") == {"s0"}
    assert m.eq_class("o1", "s3") == {"s3"}
    # perfect observation written as an empty section
    m2 = fixtures.fig2()
    for s in m2.states:
        assert m2.eq_class("o2", s) == {s}


def test_validate_reports_dangling_initobs():
    m = fixtures.fig2()
    broken = Model(
        atoms=m.atoms,
        agents=m.agents,
        observations=m.observations,
        states=m.states,
        transitions=m.transitions,
        valuation=m.valuation,
        obs_partitions={o: m.obs_partitions[o] for o in m.observations},
        initial_state=m.initial_state,
        initial_obs={"a": "o9"},
    )
    codes = [v.code for v in broken.validate()]
    assert codes == ["initobs-unknown-observation"]


def test_successors_and_lifted_post():
    m2 = fixtures.fig2()
    assert set(m2.successors("s1")) == {"s1", "s2"}
    m1 = fixtures.fig1()
    assert set(m1.successors("s4")) == {"s4"}
    assert m1.post({"s1", "s2"}) == {"s4", "s5"}
    with pytest.raises(ModelError):
        m1.successors("nope")


def test_mono_file_gets_implicit_agent():
    m = fixtures.fig2()
    assert m.agents == ("a",)


def test_explicit_agents_section():
    text = "agents: alice bob ;\n" + fixtures.FIG2.replace("initobs: o1 ;", "initobs: alice = o1  bob = o2 ;")
    m = parse_model(text)
    assert m.agents == ("alice", "bob")
    assert m.initial_obs == {"alice": "o1", "bob": "o2"}


def test_partition_laws_random():
    rng = random.Random(11)
    for _ in range(40):
        m = rand_model(rng)
        for o in m.observations:
            blocks = m.obs_partitions[o]
            union = set()
            for b in blocks:
                assert not (union & b), "blocks overlap"
                union |= b
            assert union == set(m.states)
            for s in m.states:
                cls = m.eq_class(o, s)
                assert s in cls
                for s2 in cls:
                    assert s in m.eq_class(o, s2)


def test_serialize_round_trip():
    rng = random.Random(12)
    models = [fixtures.fig1(), fixtures.fig2(), fixtures.fig4(), fixtures.diag()]
    models += [rand_model(rng, n_agents=rng.choice([1, 2])) for _ in range(20)]
    for m in models:
        m2 = parse_model(serialize_model(m))
        assert set(m2.states) == set(m.states)
        assert m2.transitions == m.transitions
        assert m2.atoms == m.atoms
        assert m2.agents == m.agents
        assert m2.valuation == m.valuation
        assert m2.initial_state == m.initial_state
        assert m2.initial_obs == m.initial_obs
        for o in m.observations:
            assert set(m2.obs_partitions[o]) == set(m.obs_partitions[o])


def test_validated_models_never_have_empty_successor_sets():
    rng = random.Random(13)
    for _ in range(25):
        m = rand_model(rng)
        assert m.validate() == []
        for s in m.states:
            assert m.successors(s)
