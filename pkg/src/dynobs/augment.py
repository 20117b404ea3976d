"""Reachable augmented structures over epistemic states.

Nodes pair a bounded epistemic state with the observations currently in
force.  The mono-agent graph uses (state, information set, observation)
triples on a single level; the general graph is stratified by tree depth
with links from each node to its subtree nodes one level down, because
knowledge marking reads labels there.
"""

from __future__ import annotations

import hashlib
import os
from collections import deque
from typing import Iterable

from .model import Model
from .ktree import InfoState, KTree, initial_infostate, initial_ktree, sorted_forest, ud, udk, ut, utk, compact_tree

DEFAULT_BUDGET = 5_000_000

InfoNode = tuple[str, frozenset[str], str]  # (state, information set, observation)
TreeNode = tuple[KTree, tuple[str, ...]]  # (tree, observation per agent)


class BudgetExceeded(Exception):
    def __init__(self, budget: int, frontier: int):
        self.budget = budget
        self.frontier = frontier
        super().__init__(f"node budget {budget} exceeded with {frontier} nodes queued")


def node_budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("DYNOBS_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


def tower(a: int, b: int, cap_bits: int = 1_000_000) -> int | None:
    """Iterated exponential a, a*2^a, ...; None once past the display cap."""
    v = a
    for _ in range(b):
        if v > cap_bits:
            return None
        v = a * (2 ** v)
    return v


def tower_bound(m_count: int, l: int, k: int) -> int | None:
    """Upper bound on the number of distinct depth-k trees (None = astronomically large)."""
    t = tower(m_count * l, k)
    if t is None:
        return None
    return t // m_count


class AugmentedModel:
    """Reachable closure of epistemic-state nodes with labels.

    kind is "infostate" (mono-agent fast path, all nodes on level 1 for
    k >= 1) or "ktree" (stratified levels 0..k).  Labels start as the
    valuation of the node's underlying state; marking passes add fresh
    atoms on top.
    """

    def __init__(self, m: Model, k: int, delta_pairs: Iterable[tuple[str, str]], kind: str):
        self.m = m
        self.k = k
        self.kind = kind
        self.delta_pairs = tuple(sorted(set(delta_pairs)))
        self.levels: dict[int, list] = {}
        self.t_edges: dict = {}
        self.delta_edges: dict = {}
        self.subtree_links: dict = {}
        self.labels: dict = {}
        self.node_level: dict = {}
        self.initial = None

    def nodes(self) -> Iterable:
        for lvl in sorted(self.levels):
            yield from self.levels[lvl]

    def node_count(self) -> int:
        return sum(len(v) for v in self.levels.values())

    def level_counts(self) -> dict[int, int]:
        return {lvl: len(v) for lvl, v in sorted(self.levels.items())}

    def obs_tuples(self, level: int) -> list[tuple]:
        seen = []
        for node in self.levels[level]:
            ov = self._obs_of(node)
            if ov not in seen:
                seen.append(ov)
        return seen

    def _obs_of(self, node):
        if self.kind == "infostate":
            return (node[2],)
        return node[1]

    def component_of(self, ovec, level: int) -> tuple[list, dict]:
        """Induced subgraph on the nodes of one observation assignment."""
        if not isinstance(ovec, tuple):
            ovec = (ovec,)
        nodes = [n for n in self.levels[level] if self._obs_of(n) == ovec]
        if not nodes:
            raise KeyError(f"no nodes with observations {ovec} at level {level}")
        edges = {n: self.t_edges[n] for n in nodes}
        return nodes, edges

    def component_counts(self, level: int) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for n in self.levels[level]:
            ov = self._obs_of(n)
            out[ov] = out.get(ov, 0) + 1
        return out


def _base_label(m: Model, state: str) -> set[str]:
    return set(m.label_of(state))


def build_infostate_graph(
    m: Model,
    delta_pairs: Iterable[tuple[str, str]],
    budget: int | None = None,
) -> AugmentedModel:
    """Mono-agent reachable graph over (state, information set, observation).

    Closed under transitions, observation jumps for the given pairs, and
    information-set membership (knowledge marking reads sibling nodes).
    """
    if len(m.agents) != 1:
        raise ValueError("information-set graph requires a mono-agent model")
    cap = node_budget(budget)
    am = AugmentedModel(m, 1, delta_pairs, "infostate")
    i0 = initial_infostate(m)
    init: InfoNode = (i0.current, i0.iset, m.initial_obs[m.agents[0]])
    am.initial = init
    level: list[InfoNode] = []
    am.levels[1] = level
    seen: set[InfoNode] = set()
    queue: deque[InfoNode] = deque()

    def discover(node: InfoNode) -> None:
        if node in seen:
            return
        if len(seen) >= cap:
            raise BudgetExceeded(cap, len(seen))
        seen.add(node)
        level.append(node)
        am.labels[node] = _base_label(m, node[0])
        am.node_level[node] = 1
        queue.append(node)

    discover(init)
    while queue:
        node = queue.popleft()
        s, iset, o = node
        info = InfoState(s, iset)
        succs = []
        for s2 in m.successors(s):
            i2 = ut(m, info, s2, o)
            succs.append((i2.current, i2.iset, o))
        for tgt in succs:
            discover(tgt)
        am.t_edges[node] = tuple(succs)
        for (_, o2) in am.delta_pairs:
            i2 = ud(m, info, o2)
            tgt = (i2.current, i2.iset, o2)
            discover(tgt)
            am.delta_edges[(node, m.agents[0], o2)] = tgt
        for s2 in sorted(iset):
            discover((s2, iset, o))
    return am


def build_ktree_graph(
    m: Model,
    k: int,
    delta_pairs: Iterable[tuple[str, str]],
    budget: int | None = None,
) -> AugmentedModel:
    """Stratified reachable graph over (tree, observation tuple) nodes."""
    cap = node_budget(budget)
    am = AugmentedModel(m, k, delta_pairs, "ktree")
    for j in range(k + 1):
        am.levels[j] = []
    ovec0 = m.initial_obs_vector()
    init: TreeNode = (initial_ktree(m, k), ovec0)
    am.initial = init
    seen: set[TreeNode] = set()
    queue: deque[TreeNode] = deque()
    total = 0

    def discover(node: TreeNode) -> None:
        nonlocal total
        if node in seen:
            return
        if total >= cap:
            raise BudgetExceeded(cap, total)
        seen.add(node)
        total += 1
        lvl = node[0].depth
        am.levels[lvl].append(node)
        am.labels[node] = _base_label(m, node[0].root)
        am.node_level[node] = lvl
        queue.append(node)

    discover(init)
    while queue:
        node = queue.popleft()
        t, ovec = node
        succs = []
        for s2 in m.successors(t.root):
            t2 = utk(m, t, s2, ovec)
            succs.append((t2, ovec))
        for tgt in succs:
            discover(tgt)
        am.t_edges[node] = tuple(succs)
        for (a, o2) in am.delta_pairs:
            t2 = udk(m, t, o2, a)
            ovec2 = tuple(o2 if ag == a else ov for ag, ov in zip(m.agents, ovec))
            tgt = (t2, ovec2)
            discover(tgt)
            am.delta_edges[(node, a, o2)] = tgt
        if t.depth > 0:
            links = {}
            for a, forest in zip(m.agents, t.forests):
                targets = []
                for u in sorted_forest(forest):
                    tgt = (u, ovec)
                    discover(tgt)
                    targets.append(tgt)
                links[a] = tuple(targets)
            am.subtree_links[node] = links
    return am


def build_augmented(
    m: Model,
    k: int,
    delta_pairs: Iterable[tuple[str, str]],
    budget: int | None = None,
    force_ktree: bool = False,
) -> AugmentedModel:
    """Build the reachable augmented structure appropriate for the model."""
    if m.mono and not force_ktree:
        return build_infostate_graph(m, delta_pairs, budget)
    return build_ktree_graph(m, k, delta_pairs, budget)


# -- rendering ---------------------------------------------------------------


def _node_id(am: AugmentedModel, node) -> str:
    if am.kind == "infostate":
        key = f"{node[0]}|{','.join(sorted(node[1]))}|{node[2]}"
    else:
        key = f"{compact_tree(node[0], am.m)}|{','.join(node[1])}"
    return "n" + hashlib.sha1(key.encode()).hexdigest()[:10]


def node_caption(am: AugmentedModel, node) -> str:
    if am.kind == "infostate":
        s, iset, o = node
        return f"{s}, {{{' '.join(sorted(iset))}}}, {o}"
    t, ovec = node
    return f"{compact_tree(t, am.m)}, ({' '.join(ovec)})"


def to_dot(am: AugmentedModel, marks_only: bool = False) -> str:
    """DOT export, one cluster per observation assignment per level."""
    out = ["digraph augmented {", "  rankdir=LR;", '  node [shape=box, fontsize=10];']
    base_atoms = am.m.atoms
    cluster = 0
    for lvl in sorted(am.levels, reverse=True):
        groups: dict[tuple, list] = {}
        for n in am.levels[lvl]:
            groups.setdefault(am._obs_of(n), []).append(n)
        for ovec in sorted(groups):
            out.append(f"  subgraph cluster_{cluster} {{")
            out.append(f'    label="level {lvl} / obs {" ".join(ovec)}";')
            for n in groups[ovec]:
                labels = sorted(am.labels[n])
                if marks_only:
                    labels = [x for x in labels if x not in base_atoms]
                shown = (" [" + " ".join(labels) + "]") if labels else ""
                init_mark = " peripheries=2" if n == am.initial else ""
                out.append(f'    {_node_id(am, n)} [label="{node_caption(am, n)}{shown}"{init_mark}];')
            out.append("  }")
            cluster += 1
    for src, targets in am.t_edges.items():
        for tgt in targets:
            out.append(f"  {_node_id(am, src)} -> {_node_id(am, tgt)};")
    for (src, a, o2), tgt in am.delta_edges.items():
        out.append(f'  {_node_id(am, src)} -> {_node_id(am, tgt)} [style=dashed, label="{a}:{o2}"];')
    for src, links in am.subtree_links.items():
        for a, targets in links.items():
            for tgt in targets:
                out.append(f'  {_node_id(am, src)} -> {_node_id(am, tgt)} [style=dotted, label="{a}"];')
    out.append("}")
    return "\n".join(out) + "\n"
