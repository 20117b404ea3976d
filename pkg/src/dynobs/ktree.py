"""Bounded epistemic state: information sets, knowledge trees and updates.

A depth-k tree carries the current state plus, per agent, the set of
depth-(k-1) trees she considers possible.  For a single agent a depth-1
tree is just (state, information set); that pair is kept as a dedicated
fast-path type.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Model


class EmptyUpdateError(Exception):
    """An update emptied an information set or forest.

    This cannot happen along real histories; it signals an inconsistent
    (history, record) query or a caller bug.
    """


class KTree:
    """Canonical knowledge tree: hashable, uniform depth, duplicate-free."""

    __slots__ = ("root", "forests", "depth", "_hash")

    def __init__(self, root: str, forests: Sequence[frozenset["KTree"]]):
        self.root = root
        self.forests = tuple(frozenset(f) for f in forests)
        self.depth = 0
        for f in self.forests:
            for t in f:
                if t.depth + 1 > self.depth:
                    self.depth = t.depth + 1
        self._hash = hash((root, self.forests))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, KTree):
            return NotImplemented
        return self._hash == other._hash and self.root == other.root and self.forests == other.forests

    def __repr__(self) -> str:
        return f"KTree({self.root!r}, depth={self.depth})"

    def forest(self, m: Model, agent: str) -> frozenset["KTree"]:
        return self.forests[m.agents.index(agent)]


def leaf(state: str, n_agents: int) -> KTree:
    return KTree(state, tuple(frozenset() for _ in range(n_agents)))


def tree_key(t: KTree):
    """Deterministic total order on trees (root, then sorted forests)."""
    return (t.root, tuple(tuple(sorted(tree_key(u) for u in f)) for f in t.forests))


def sorted_forest(f: Iterable[KTree]) -> list[KTree]:
    return sorted(f, key=tree_key)


@dataclass(frozen=True)
class InfoState:
    """Mono-agent epistemic state: current state plus information set."""

    current: str
    iset: frozenset[str]


# -- mono-agent updates ------------------------------------------------------


def ut(m: Model, i: InfoState, nxt: str, o: str) -> InfoState:
    """Transition update: successors of the information set, filtered by
    what the new state looks like under observation o."""
    iset = m.post(i.iset) & m.eq_class(o, nxt)
    if not iset:
        raise EmptyUpdateError(f"transition update emptied the information set at '{nxt}'")
    return InfoState(nxt, iset)


def ud(m: Model, i: InfoState, o2: str) -> InfoState:
    """Observation-change update: refine the information set by the new
    observation's view of the current state.  Never empty."""
    return InfoState(i.current, i.iset & m.eq_class(o2, i.current))


def initial_infostate(m: Model) -> InfoState:
    o = m.initial_obs[m.agents[0]]
    return InfoState(m.initial_state, m.eq_class(o, m.initial_state))


# -- k-tree updates ----------------------------------------------------------


def utk(m: Model, t: KTree, nxt: str, ovec: Sequence[str]) -> KTree:
    """Transition update on a knowledge tree; depth is preserved."""
    if t.depth == 0:
        return leaf(nxt, len(m.agents))
    forests = []
    for idx in range(len(m.agents)):
        cls = m.eq_class(ovec[idx], nxt)
        out: set[KTree] = set()
        for sub in t.forests[idx]:
            for s2 in m.successors(sub.root):
                if s2 in cls:
                    out.add(utk(m, sub, s2, ovec))
        if not out:
            raise EmptyUpdateError(f"transition update emptied a forest at depth {t.depth}")
        forests.append(frozenset(out))
    return KTree(nxt, forests)


def udk(m: Model, t: KTree, o2: str, agent: str) -> KTree:
    """Observation-change update: wherever the tree refers to the changing
    agent's knowledge, drop subtrees no longer compatible with o2."""
    if t.depth == 0:
        return t
    aidx = m.agents.index(agent)
    forests = []
    for idx in range(len(m.agents)):
        subs = t.forests[idx]
        if idx == aidx:
            cls = m.eq_class(o2, t.root)
            subs = frozenset(u for u in subs if u.root in cls)
        forests.append(frozenset(udk(m, u, o2, agent) for u in subs))
    return KTree(t.root, forests)


def initial_ktree(m: Model, k: int) -> KTree:
    """Tree of the one-state initial history under the initial observations."""

    def build(s: str, depth: int) -> KTree:
        if depth == 0:
            return leaf(s, len(m.agents))
        forests = []
        for a in m.agents:
            cls = m.eq_class(m.initial_obs[a], s)
            forests.append(frozenset(build(s2, depth - 1) for s2 in cls))
        return KTree(s, forests)

    return build(m.initial_state, k)


def infostate_of(t: KTree, m: Model) -> InfoState:
    """Project a mono-agent depth-1 tree onto its information-set form."""
    if len(m.agents) != 1 or t.depth != 1:
        raise ValueError("projection requires a mono-agent depth-1 tree")
    return InfoState(t.root, frozenset(u.root for u in t.forests[0]))


def render_tree(t: KTree, m: Model, indent: str = "") -> str:
    """Indented text rendering, stable across runs."""
    lines = [f"{indent}{t.root}"]
    if t.depth > 0:
        for a, f in zip(m.agents, t.forests):
            lines.append(f"{indent}  [{a}]")
            for u in sorted_forest(f):
                lines.append(render_tree(u, m, indent + "    "))
    return "\n".join(lines)


def compact_tree(t: KTree, m: Model) -> str:
    """One-line rendering used in DOT captions and reports."""
    if t.depth == 0:
        return t.root
    parts = []
    for a, f in zip(m.agents, t.forests):
        inner = ",".join(compact_tree(u, m) for u in sorted_forest(f))
        parts.append(f"{a}:{{{inner}}}")
    return t.root + "<" + " ".join(parts) + ">"
