"""Static-observation encoding of observation change.

The model is copied once per observation assignment; moving between
copies of the same underlying state simulates an observation switch.
The formula translation guards path quantifiers so paths stay inside
one copy, and turns each observation change into a guarded next step
into the matching copy.  The result is decided by the static pipeline
and doubles as an independent engine for cross-validation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import formulas as fm
from .checker import CheckRun, check_static
from .model import Model

COPY_ATOM_PREFIX = "@obs_"
VIEW_OBS_PREFIX = "@view_"


class ReductionError(Exception):
    pass


def copy_atom(ovec: tuple[str, ...]) -> str:
    return COPY_ATOM_PREFIX + "__".join(ovec)


def copy_state(s: str, ovec: tuple[str, ...]) -> str:
    return s + "__" + "__".join(ovec)


@dataclass
class ReducedInstance:
    model: Model
    formula: fm.Formula | None
    copy_index: dict[tuple[str, tuple[str, ...]], str]
    obs_vectors: list[tuple[str, ...]]


def observation_vectors(m: Model) -> list[tuple[str, ...]]:
    obs = sorted(m.observations)
    return [tuple(v) for v in itertools.product(obs, repeat=len(m.agents))]


def reduce_model(m: Model) -> ReducedInstance:
    """One copy of the model per observation assignment, with jump edges
    between copies of the same state and one static view per agent."""
    vectors = observation_vectors(m)
    copy_atoms = {ov: copy_atom(ov) for ov in vectors}
    clash = set(copy_atoms.values()) & m.atoms
    if clash:
        raise ReductionError(f"copy atoms collide with model atoms: {sorted(clash)}")

    copy_index: dict[tuple[str, tuple[str, ...]], str] = {}
    states: list[str] = []
    used: set[str] = set()
    for ov in vectors:
        for s in m.states:
            name = copy_state(s, ov)
            if name in used:
                raise ReductionError(f"state name collision in reduction: '{name}'")
            used.add(name)
            copy_index[(s, ov)] = name
            states.append(name)

    transitions: set[tuple[str, str]] = set()
    for ov in vectors:
        for (a, b) in m.transitions:
            transitions.add((copy_index[(a, ov)], copy_index[(b, ov)]))
    for s in m.states:
        for ov in vectors:
            for ov2 in vectors:
                if ov != ov2:
                    transitions.add((copy_index[(s, ov)], copy_index[(s, ov2)]))

    valuation: dict[str, set[str]] = {}
    for ov in vectors:
        for s in m.states:
            valuation[copy_index[(s, ov)]] = set(m.label_of(s)) | {copy_atoms[ov]}

    view_names = {a: VIEW_OBS_PREFIX + a for a in m.agents}
    obs_partitions: dict[str, list[list[str]]] = {name: [] for name in view_names.values()}
    for idx, a in enumerate(m.agents):
        for ov in vectors:
            for block in m.obs_partitions[ov[idx]]:
                obs_partitions[view_names[a]].append([copy_index[(s, ov)] for s in block])

    ovec_init = m.initial_obs_vector()
    model2 = Model(
        atoms=set(m.atoms) | set(copy_atoms.values()),
        agents=m.agents,
        observations=view_names.values(),
        states=states,
        transitions=transitions,
        valuation=valuation,
        obs_partitions=obs_partitions,
        initial_state=copy_index[(m.initial_state, ovec_init)],
        initial_obs={a: view_names[a] for a in m.agents},
    )
    bad = model2.validate()
    if bad:
        raise ReductionError("reduced model invalid: " + "; ".join(str(v) for v in bad))
    return ReducedInstance(model2, None, copy_index, vectors)


def translate(f: fm.Formula, m: Model, ovec: tuple[str, ...] | None = None) -> fm.Formula:
    """Remove observation-change operators relative to the current
    observation assignment; all other operators distribute."""
    if ovec is None:
        ovec = m.initial_obs_vector()
    f = fm.desugar_exists(f)

    def tr(g: fm.Formula, ov: tuple[str, ...]) -> fm.Formula:
        if isinstance(g, fm.SetObs):
            idx = m.agents.index(g.agent)
            ov2 = tuple(g.obs if i == idx else o for i, o in enumerate(ov))
            if ov[idx] == g.obs:
                return tr(g.sub, ov2)
            return fm.AllPaths(fm.Next(fm.Implies(fm.Atom(copy_atom(ov2)), tr(g.sub, ov2))))
        if isinstance(g, fm.AllPaths):
            return fm.AllPaths(fm.Implies(fm.Always(fm.Atom(copy_atom(ov))), tr(g.sub, ov)))
        if isinstance(g, fm.Knows):
            return fm.Knows(g.agent, tr(g.sub, ov))
        kids = fm.children(g)
        if not kids:
            return g
        return fm._rebuild(g, tuple(tr(c, ov) for c in kids))

    return tr(f, ovec)


@dataclass
class ReductionRun:
    verdict: bool
    instance: ReducedInstance
    inner: CheckRun


def check_via_reduction(m: Model, f: fm.Formula, budget: int | None = None) -> ReductionRun:
    """Decide the formula by compiling away observation change and
    running the static checker on the copied model."""
    ri = reduce_model(m)
    f2 = translate(f, m)
    ri.formula = f2
    run = check_static(ri.model, f2, budget=budget)
    return ReductionRun(run.verdict, ri, run)
