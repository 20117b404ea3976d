"""Shared random generators for models, formulas and evaluation points."""

from __future__ import annotations

import random

import pytest

from dynobs import formulas as fm
from dynobs.model import Model


def rand_partition(rng: random.Random, states: list[str]) -> list[list[str]]:
    """Random partition, biased toward a couple of non-trivial blocks."""
    k = rng.randint(1, max(1, len(states)))
    blocks: list[list[str]] = [[] for _ in range(k)]
    for s in states:
        blocks[rng.randrange(k)].append(s)
    return [b for b in blocks if b]


def rand_model(
    rng: random.Random,
    n_agents: int = 1,
    max_states: int = 5,
    max_obs: int = 3,
    min_states: int = 2,
    max_succ: int = 2,
    n_atoms: int = 2,
) -> Model:
    n = rng.randint(min_states, max_states)
    states = [f"s{i}" for i in range(n)]
    n_obs = rng.randint(1, max_obs)
    observations = [f"o{i}" for i in range(n_obs)]
    atoms = [f"p{i}" for i in range(n_atoms)]
    agents = [f"ag{i}" for i in range(n_agents)] if n_agents > 1 else ["a"]
    transitions = set()
    for s in states:
        for _ in range(rng.randint(1, max_succ)):
            transitions.add((s, rng.choice(states)))
    valuation = {s: {p for p in atoms if rng.random() < 0.4} for s in states}
    obs_partitions = {o: rand_partition(rng, states) for o in observations}
    return Model(
        atoms=atoms,
        agents=agents,
        observations=observations,
        states=states,
        transitions=transitions,
        valuation=valuation,
        obs_partitions=obs_partitions,
        initial_state=rng.choice(states),
        initial_obs={a: rng.choice(observations) for a in agents},
    )


def rand_history_formula(
    rng: random.Random,
    m: Model,
    size: int,
    max_kd: int = 2,
    allow_delta: bool = True,
) -> fm.Formula:
    atoms = sorted(m.atoms)
    obs = sorted(m.observations)

    def hist(budget: int, kd: int) -> fm.Formula:
        if budget <= 1:
            return fm.Atom(rng.choice(atoms))
        ops = ["atom", "not", "and", "or", "A", "E"]
        if kd > 0:
            ops += ["K", "K"]
        if allow_delta:
            ops += ["D", "D"]
        op = rng.choice(ops)
        if op == "atom":
            return fm.Atom(rng.choice(atoms))
        if op == "not":
            return fm.Not(hist(budget - 1, kd))
        if op in ("and", "or"):
            a = rng.randint(1, max(1, budget - 2))
            cls = fm.And if op == "and" else fm.Or
            return cls(hist(a, kd), hist(budget - 1 - a, kd))
        if op == "A":
            return fm.AllPaths(path(budget - 1, kd))
        if op == "E":
            return fm.Not(fm.AllPaths(fm.Not(path(budget - 1, kd))))
        if op == "K":
            return fm.Knows(rng.choice(m.agents), hist(budget - 1, kd - 1))
        return fm.SetObs(rng.choice(m.agents), rng.choice(obs), hist(budget - 1, kd))

    def path(budget: int, kd: int) -> fm.Formula:
        if budget <= 1:
            return hist(budget, kd)
        op = rng.choice(["hist", "not", "and", "or", "X", "U", "F", "G"])
        if op == "hist":
            return hist(budget, kd)
        if op == "not":
            return fm.Not(path(budget - 1, kd))
        if op in ("and", "or"):
            a = rng.randint(1, max(1, budget - 2))
            cls = fm.And if op == "and" else fm.Or
            return cls(path(a, kd), path(budget - 1 - a, kd))
        if op == "X":
            return fm.Next(path(budget - 1, kd))
        if op == "U":
            a = rng.randint(1, max(1, budget - 2))
            return fm.Until(path(a, kd), path(budget - 1 - a, kd))
        if op == "F":
            return fm.Eventually(path(budget - 1, kd))
        return fm.Always(path(budget - 1, kd))

    return hist(size, max_kd)


def rand_point(rng: random.Random, m: Model, max_len: int = 3, max_changes: int = 2, pairs=None):
    """A history from the initial state plus a record built from the given
    (agent, observation) pairs, stopping at the history."""
    h = [m.initial_state]
    for _ in range(rng.randint(0, max_len - 1)):
        h.append(rng.choice(m.successors(h[-1])))
    records = {a: [] for a in m.agents}
    pool = sorted(pairs) if pairs else [(a, o) for a in m.agents for o in sorted(m.observations)]
    if pool:
        times = sorted(rng.randint(0, len(h) - 1) for _ in range(rng.randint(0, max_changes)))
        for t in times:
            a, o = rng.choice(pool)
            records[a].append((o, t))
    return tuple(h), {a: tuple(r) for a, r in records.items()}


def formula_size(f: fm.Formula) -> int:
    return 1 + sum(formula_size(c) for c in fm.children(f))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
