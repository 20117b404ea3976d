"""CTL* labeling over finite left-total labeled graphs.

Path subformulas are compiled into generalized Buchi automata with
transition-based acceptance (one acceptance index per until subformula).
Existential path quantification is decided by searching the synchronous
product for a reachable cycle whose edges cover every acceptance index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import formulas as fm


class ContractViolation(Exception):
    """An epistemic operator reached the path-checking layer."""


# -- negation normal form ----------------------------------------------------


class NNF:
    __slots__ = ()


@dataclass(frozen=True)
class NLit(NNF):
    name: str
    neg: bool


@dataclass(frozen=True)
class NTrue(NNF):
    pass


@dataclass(frozen=True)
class NFalse(NNF):
    pass


@dataclass(frozen=True)
class NAnd(NNF):
    left: NNF
    right: NNF


@dataclass(frozen=True)
class NOr(NNF):
    left: NNF
    right: NNF


@dataclass(frozen=True)
class NX(NNF):
    sub: NNF


@dataclass(frozen=True)
class NU(NNF):
    left: NNF
    right: NNF


@dataclass(frozen=True)
class NR(NNF):
    left: NNF
    right: NNF


_NTRUE = NTrue()
_NFALSE = NFalse()


def to_nnf(f: fm.Formula, neg: bool = False) -> NNF:
    """Push negations to literals; F/G/-> are expanded on the way."""
    if isinstance(f, fm.Atom):
        return NLit(f.name, neg)
    if isinstance(f, fm.TrueF):
        return _NFALSE if neg else _NTRUE
    if isinstance(f, fm.FalseF):
        return _NTRUE if neg else _NFALSE
    if isinstance(f, fm.Not):
        return to_nnf(f.sub, not neg)
    if isinstance(f, fm.And):
        cls = NOr if neg else NAnd
        return cls(to_nnf(f.left, neg), to_nnf(f.right, neg))
    if isinstance(f, fm.Or):
        cls = NAnd if neg else NOr
        return cls(to_nnf(f.left, neg), to_nnf(f.right, neg))
    if isinstance(f, fm.Implies):
        cls = NAnd if neg else NOr
        return cls(to_nnf(f.left, not neg), to_nnf(f.right, neg))
    if isinstance(f, fm.Next):
        return NX(to_nnf(f.sub, neg))
    if isinstance(f, fm.Until):
        if neg:
            return NR(to_nnf(f.left, True), to_nnf(f.right, True))
        return NU(to_nnf(f.left, False), to_nnf(f.right, False))
    if isinstance(f, fm.Eventually):
        if neg:
            return NR(_NFALSE, to_nnf(f.sub, True))
        return NU(_NTRUE, to_nnf(f.sub, False))
    if isinstance(f, fm.Always):
        if neg:
            return NU(_NTRUE, to_nnf(f.sub, True))
        return NR(_NFALSE, to_nnf(f.sub, False))
    raise ContractViolation(f"not a pure path formula: {f!r}")


# -- generalized Buchi automaton ---------------------------------------------


@dataclass(frozen=True)
class Transition:
    pos: frozenset[str]
    neg: frozenset[str]
    dst: frozenset
    marks: frozenset[int]


class PathAutomaton:
    """Tableau automaton for one path formula.

    States are obligation sets; a transition constrains the letter read
    now (pos must hold, neg must not) and carries acceptance marks: index
    i is present when until subformula i was not postponed on this step.
    A run is accepting when every index recurs infinitely often.
    """

    def __init__(self, formula: NNF):
        self.formula = formula
        self.untils: list[NU] = []
        seen: set[NU] = set()

        def collect(g: NNF) -> None:
            if isinstance(g, NU) and g not in seen:
                seen.add(g)
                self.untils.append(g)
            if isinstance(g, (NAnd, NOr, NU, NR)):
                collect(g.left)
                collect(g.right)
            elif isinstance(g, NX):
                collect(g.sub)

        collect(formula)
        self.acc_count = len(self.untils)
        self._uidx = {u: i for i, u in enumerate(self.untils)}
        self.initial: frozenset = frozenset((formula,))
        self.transitions: dict[frozenset, tuple[Transition, ...]] = {}
        todo = [self.initial]
        while todo:
            state = todo.pop()
            if state in self.transitions:
                continue
            outs = []
            for pos, neg, nxt, pending in self._expand(state):
                marks = frozenset(i for i in range(self.acc_count) if i not in pending)
                dst = frozenset(nxt)
                outs.append(Transition(frozenset(pos), frozenset(neg), dst, marks))
                if dst not in self.transitions:
                    todo.append(dst)
            self.transitions[state] = tuple(outs)

    def _expand(self, obligations: frozenset):
        """All consistent ways to satisfy the obligations now.

        Yields (pos, neg, next_obligations, pending_until_indices);
        disjunctions and until/release unfoldings branch.
        """
        alts: list[tuple[set, set, set, set]] = [(set(), set(), set(), set())]
        for ob in sorted(obligations, key=repr):
            new_alts = []
            for pos, neg, nxt, pending in alts:
                for dp, dn, dx, dpend in self._expand_one(ob):
                    p2 = pos | dp
                    n2 = neg | dn
                    if p2 & n2:
                        continue
                    new_alts.append((p2, n2, nxt | dx, pending | dpend))
            alts = new_alts
        dedup: dict[tuple, tuple] = {}
        for pos, neg, nxt, pending in alts:
            key = (frozenset(pos), frozenset(neg), frozenset(nxt), frozenset(pending))
            dedup[key] = (pos, neg, nxt, pending)
        return list(dedup.values())

    def _expand_one(self, g: NNF):
        if isinstance(g, NTrue):
            return [(set(), set(), set(), set())]
        if isinstance(g, NFalse):
            return []
        if isinstance(g, NLit):
            if g.neg:
                return [(set(), {g.name}, set(), set())]
            return [({g.name}, set(), set(), set())]
        if isinstance(g, NX):
            return [(set(), set(), {g.sub}, set())]
        if isinstance(g, NAnd):
            out = []
            for lp, ln, lx, lpend in self._expand_one(g.left):
                for rp, rn, rx, rpend in self._expand_one(g.right):
                    pos, neg = lp | rp, ln | rn
                    if pos & neg:
                        continue
                    out.append((pos, neg, lx | rx, lpend | rpend))
            return out
        if isinstance(g, NOr):
            return self._expand_one(g.left) + self._expand_one(g.right)
        if isinstance(g, NU):
            idx = self._uidx[g]
            out = list(self._expand_one(g.right))
            for lp, ln, lx, lpend in self._expand_one(g.left):
                out.append((lp, ln, lx | {g}, lpend | {idx}))
            return out
        if isinstance(g, NR):
            out = []
            for rp, rn, rx, rpend in self._expand_one(g.right):
                for lp, ln, lx, lpend in self._expand_one(g.left):
                    pos, neg = rp | lp, rn | ln
                    if pos & neg:
                        continue
                    out.append((pos, neg, rx | lx, rpend | lpend))
                out.append((rp, rn, rx | {g}, rpend))
            return out
        raise ContractViolation(f"unexpected obligation {g!r}")

def compile_path_formula(f: fm.Formula) -> PathAutomaton:
    """Compile a (state-subformula-free) path formula into an automaton."""
    return PathAutomaton(to_nnf(f))


class DegeneralizedAutomaton:
    """Counter construction collapsing all acceptance indices into one.

    Exposes the same (initial, transitions, acc_count) surface as
    PathAutomaton, so the product machinery runs on it unchanged.
    """

    def __init__(self, aut: PathAutomaton):
        k = aut.acc_count
        self.acc_count = 1 if k else 0
        self.initial = (aut.initial, 0)
        self.transitions: dict[tuple, tuple[Transition, ...]] = {}
        todo = [self.initial]
        while todo:
            state = todo.pop()
            if state in self.transitions:
                continue
            q, c = state
            outs = []
            for tr in aut.transitions[q]:
                c2 = c
                marks: frozenset[int] = frozenset()
                if k:
                    while c2 < k and c2 in tr.marks:
                        c2 += 1
                    if c2 == k:
                        c2 = 0
                        marks = frozenset((0,))
                dst = (tr.dst, c2)
                outs.append(Transition(tr.pos, tr.neg, dst, marks))
                if dst not in self.transitions:
                    todo.append(dst)
            self.transitions[state] = tuple(outs)


# -- ultimately periodic word acceptance --------------------------------------


def _fair_lasso_exists_word(aut: PathAutomaton, word: list[frozenset[str]], n_pref: int, n_cyc: int) -> bool:
    succ = {}
    nodes = []
    for i in range(len(word)):
        i2 = i + 1 if i + 1 < len(word) else n_pref
        nodes.append(i)
        succ[i] = (i2,)
    labels = {i: word[i] for i in nodes}
    ls = LabeledStructure(nodes, succ, labels)
    return 0 in sat_exists(ls, aut)


def accepts_lasso(aut: PathAutomaton, prefix: Iterable[frozenset[str]], cycle: Iterable[frozenset[str]]) -> bool:
    """Whether the automaton accepts prefix . cycle^w."""
    pref = [frozenset(x) for x in prefix]
    cyc = [frozenset(x) for x in cycle]
    if not cyc:
        raise ValueError("empty cycle")
    return _fair_lasso_exists_word(aut, pref + cyc, len(pref), len(cyc))


# -- labeled structures and products ------------------------------------------


class LabeledStructure:
    """Finite left-total graph with per-node proposition sets."""

    def __init__(
        self,
        nodes: Sequence[Hashable],
        succ: Mapping[Hashable, Sequence[Hashable]],
        labels: Mapping[Hashable, Iterable[str]] | Callable[[Hashable], Iterable[str]],
    ):
        self.nodes = tuple(nodes)
        self.succ = {n: tuple(succ[n]) for n in self.nodes}
        for n in self.nodes:
            if not self.succ[n]:
                raise ValueError(f"node {n!r} has no successor (structure must be left-total)")
        if callable(labels):
            self._label_fn = labels
        else:
            mapping = {n: frozenset(labels[n]) for n in self.nodes}
            self._label_fn = mapping.__getitem__
        self._sat_cache: dict[fm.Formula, frozenset] = {}
        self._fresh = 0

    def label(self, n) -> frozenset[str]:
        return frozenset(self._label_fn(n))


def sat_exists(ls: LabeledStructure, aut: PathAutomaton) -> frozenset:
    """Nodes from which some path is accepted by the automaton.

    One pass: build the synchronous product, find its strongly connected
    components iteratively, mark components whose internal edges cover
    every acceptance index, and propagate reachability backwards through
    the condensation.
    """
    letters = {n: ls.label(n) for n in ls.nodes}
    prod_succ: dict[tuple, list[tuple[tuple, frozenset[int]]]] = {}
    starts = [(n, aut.initial) for n in ls.nodes]
    stack = list(starts)
    seen = set(starts)
    while stack:
        node = stack.pop()
        n, q = node
        outs = []
        letter = letters[n]
        for tr in aut.transitions[q]:
            if tr.pos <= letter and not (tr.neg & letter):
                for n2 in ls.succ[n]:
                    tgt = (n2, tr.dst)
                    outs.append((tgt, tr.marks))
                    if tgt not in seen:
                        seen.add(tgt)
                        stack.append(tgt)
        prod_succ[node] = outs

    # Tarjan SCC, iterative.
    index: dict[tuple, int] = {}
    low: dict[tuple, int] = {}
    on_stack: set[tuple] = set()
    scc_of: dict[tuple, int] = {}
    sccs: list[list[tuple]] = []
    stack2: list[tuple] = []
    counter = 0
    for root in prod_succ:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack2.append(v)
                on_stack.add(v)
            advanced = False
            outs = prod_succ[v]
            while pi < len(outs):
                w = outs[pi][0]
                pi += 1
                if w not in index:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack2.pop()
                    on_stack.discard(w)
                    scc_of[w] = len(sccs)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    all_marks = frozenset(range(aut.acc_count))
    fair = [False] * len(sccs)
    internal_edge = [False] * len(sccs)
    marks_in: list[set[int]] = [set() for _ in sccs]
    for v, outs in prod_succ.items():
        cv = scc_of[v]
        for w, marks in outs:
            if scc_of[w] == cv:
                internal_edge[cv] = True
                marks_in[cv] |= marks
    for c in range(len(sccs)):
        fair[c] = internal_edge[c] and all_marks <= frozenset(marks_in[c])

    # Tarjan emits components in reverse topological order: successors first.
    can_reach = list(fair)
    for c in range(len(sccs)):
        if can_reach[c]:
            continue
        for v in sccs[c]:
            for w, _ in prod_succ[v]:
                if scc_of[w] != c and can_reach[scc_of[w]]:
                    can_reach[c] = True
                    break
            if can_reach[c]:
                break

    out = set()
    for n, q in starts:
        if q == aut.initial and can_reach[scc_of[(n, q)]]:
            out.add(n)
    return frozenset(out)


def product_nonempty(ls: LabeledStructure, start, aut: PathAutomaton) -> bool:
    """Whether some path from `start` is accepted by the automaton."""
    return start in sat_exists(ls, aut)


# -- CTL* labeling -------------------------------------------------------------


def label_states(ls: LabeledStructure, f: fm.Formula) -> frozenset:
    """The set of nodes satisfying a state formula (no K, no D).

    Boolean structure is set algebra; each path quantifier replaces its
    maximal state subformulas by their satisfaction sets and runs the
    automaton product over the remaining pure path formula.
    """
    cached = ls._sat_cache.get(f)
    if cached is not None:
        return cached
    all_nodes = frozenset(ls.nodes)
    if isinstance(f, fm.Atom):
        sat = frozenset(n for n in ls.nodes if f.name in ls.label(n))
    elif isinstance(f, fm.TrueF):
        sat = all_nodes
    elif isinstance(f, fm.FalseF):
        sat = frozenset()
    elif isinstance(f, fm.Not):
        sat = all_nodes - label_states(ls, f.sub)
    elif isinstance(f, fm.And):
        sat = label_states(ls, f.left) & label_states(ls, f.right)
    elif isinstance(f, fm.Or):
        sat = label_states(ls, f.left) | label_states(ls, f.right)
    elif isinstance(f, fm.Implies):
        sat = (all_nodes - label_states(ls, f.left)) | label_states(ls, f.right)
    elif isinstance(f, fm.SomePaths):
        sat = _sat_epath(ls, f.sub)
    elif isinstance(f, fm.AllPaths):
        sat = all_nodes - _sat_epath(ls, fm.Not(f.sub))
    elif isinstance(f, (fm.Knows, fm.SetObs)):
        raise ContractViolation(f"epistemic operator reached the path engine: {f!r}")
    else:
        raise ContractViolation(f"temporal operator in state position: {f!r}")
    ls._sat_cache[f] = sat
    return sat


def _sat_epath(ls: LabeledStructure, psi: fm.Formula) -> frozenset:
    """Nodes with some path satisfying psi (a path formula)."""
    overlay: dict = {n: set() for n in ls.nodes}
    psi2 = _replace_state_subformulas(ls, psi, overlay)
    aut = PathAutomaton(to_nnf(psi2))
    view = LabeledStructure(
        ls.nodes,
        ls.succ,
        lambda n: ls.label(n) | frozenset(overlay[n]),
    )
    return sat_exists(view, aut)


def _replace_state_subformulas(ls: LabeledStructure, f: fm.Formula, overlay: dict) -> fm.Formula:
    """Swap maximal state subformulas for marker atoms carrying their
    satisfaction sets; literals stay as they are."""
    if isinstance(f, (fm.Atom, fm.TrueF, fm.FalseF)):
        return f
    if isinstance(f, fm.Not) and isinstance(f.sub, fm.Atom):
        return f
    if fm.is_history(f):
        sat = label_states(ls, f)
        name = f"$h{ls._fresh}"
        ls._fresh += 1
        for n in sat:
            overlay[n].add(name)
        return fm.Atom(name)
    kids = fm.children(f)
    rebuilt = tuple(_replace_state_subformulas(ls, c, overlay) for c in kids)
    return fm._rebuild(f, rebuilt)
