"""Top-level decision procedure for temporal-epistemic formulas with
observation change.

Knowledge and observation-change subformulas are eliminated innermost
first: each one's argument is labeled on the augmented structure with
the path engine, the subformula itself becomes a fresh mark computed
from information-set membership (K) or the jump target (D), and the
mark's atom replaces it in the formula.  What remains is a plain CTL*
check at the initial node.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from . import formulas as fm
from .augment import AugmentedModel, build_augmented
from .ctlstar import LabeledStructure, label_states
from .model import Model
from .recall import Verdict

FRESH_PREFIX = "@sub"


class CheckError(Exception):
    pass


@dataclass
class Elimination:
    """One marking pass: which subformula became which fresh atom."""

    source: fm.Formula  # in original terms (earlier fresh atoms substituted back)
    atom: str
    kind: str  # "K", "D" or "arg"
    sat_by_level: dict[int, frozenset] = field(repr=False, default_factory=dict)

    @property
    def source_text(self) -> str:
        return fm.format_formula(self.source)


@dataclass
class CheckRun:
    model: Model
    formula: fm.Formula
    augmented: AugmentedModel
    eliminated: list[Elimination]
    residual: fm.Formula
    final_sat: frozenset
    verdict: bool
    stats: dict

    def node_verdict(self, node) -> bool:
        """Alternative-semantics verdict of the checked formula at a node
        of the top level."""
        if node not in self.augmented.labels:
            raise CheckError(f"node not in the built structure: {node!r}")
        return node in self.final_sat

    def mark_atom_for(self, source_text: str) -> str | None:
        for e in self.eliminated:
            if e.source_text == source_text:
                return e.atom
        return None

    def report(self, include_labels: bool = False, label_cap: int = 200) -> dict:
        am = self.augmented
        rep = {
            "verdict": "HOLDS" if self.verdict else "FAILS",
            "engine": am.kind,
            "formula": fm.format_formula(self.formula),
            "knowledge_depth": fm.knowledge_depth(self.formula),
            "levels": {str(lvl): n for lvl, n in am.level_counts().items()},
            "components": {str(lvl): len(am.component_counts(lvl)) for lvl in sorted(am.levels)},
            "eliminated": [{"formula": e.source_text, "atom": e.atom, "kind": e.kind} for e in self.eliminated],
            "residual": fm.format_formula(self.residual),
            "initial": _node_text(am, am.initial),
            "passes": self.stats["passes"],
            "wall_ms": self.stats["wall_ms"],
        }
        if include_labels and am.node_count() <= label_cap:
            rep["labels"] = {_node_text(am, n): sorted(am.labels[n]) for n in am.nodes()}
        return rep


def _node_text(am: AugmentedModel, node) -> str:
    from .augment import node_caption

    return node_caption(am, node)


def _unsubstitute(f: fm.Formula, back: dict[str, fm.Formula]) -> fm.Formula:
    """Replace fresh atoms by their source subformulas, recursively."""
    if isinstance(f, fm.Atom) and f.name in back:
        return _unsubstitute(back[f.name], back)
    kids = fm.children(f)
    if not kids:
        return f
    return fm._rebuild(f, tuple(_unsubstitute(c, back) for c in kids))


def _check_formula_against_model(m: Model, f: fm.Formula) -> None:
    for name in fm.atoms_of(f):
        if name not in m.atoms:
            raise CheckError(f"formula atom '{name}' not declared in the model")
    for a, o in fm.delta_pairs(f):
        if a not in m.agents:
            raise CheckError(f"formula agent '{a}' not declared in the model")
        if o not in m.observations:
            raise CheckError(f"formula observation '{o}' not declared in the model")
    fm.validate_stratification(f)


class _Engine:
    """One check run over one augmented structure."""

    def __init__(self, m: Model, am: AugmentedModel):
        self.m = m
        self.am = am
        self.structs: dict[int, LabeledStructure] = {}
        self.min_level: dict[str, int] = {}
        self.counter = 0
        self.forbidden = set(m.atoms)

    def structure(self, level: int) -> LabeledStructure:
        ls = self.structs.get(level)
        if ls is None:
            am = self.am
            nodes = am.levels[level]
            succ = {n: am.t_edges[n] for n in nodes}
            ls = LabeledStructure(nodes, succ, lambda n: am.labels[n])
            self.structs[level] = ls
        return ls

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"{FRESH_PREFIX}{self.counter}"
            if name not in self.forbidden:
                self.forbidden.add(name)
                return name

    def ml(self, f: fm.Formula) -> int:
        return max((self.min_level.get(a, 0) for a in fm.atoms_of(f)), default=0)

    def levels_from(self, lo: int) -> list[int]:
        if self.am.kind == "infostate":
            return [1]
        return [j for j in range(lo, self.am.k + 1)]

    def sat_of(self, f: fm.Formula, level: int) -> frozenset:
        return label_states(self.structure(level), f)

    def mark(self, atom: str, level: int, nodes: Iterable) -> None:
        for n in nodes:
            self.am.labels[n].add(atom)

    def eliminate(self, cand: fm.Formula, back: dict[str, fm.Formula]) -> list[Elimination]:
        out: list[Elimination] = []
        arg = cand.sub
        lo = self.ml(arg)
        arg_sat = {lvl: self.sat_of(arg, lvl) for lvl in self.levels_from(lo)}

        # Node-local Boolean arguments get their own mark, like the
        # marking step of the elimination procedure prescribes; temporal
        # arguments live only inside the path engine.
        if fm.is_boolean(arg) and not isinstance(arg, (fm.Atom, fm.TrueF, fm.FalseF)):
            arg_atom = self.fresh()
            for lvl, sat in arg_sat.items():
                self.mark(arg_atom, lvl, sat)
            self.min_level[arg_atom] = lo
            out.append(Elimination(_unsubstitute(arg, back), arg_atom, "arg", dict(arg_sat)))

        atom = self.fresh()
        if isinstance(cand, fm.Knows):
            sat_by_level: dict[int, frozenset] = {}
            if self.am.kind == "infostate":
                sat = arg_sat[1]
                hit = set()
                for node in self.am.levels[1]:
                    s, iset, o = node
                    if all((s2, iset, o) in sat for s2 in iset):
                        hit.add(node)
                self.mark(atom, 1, hit)
                sat_by_level[1] = frozenset(hit)
                self.min_level[atom] = 1
            else:
                for lvl in self.levels_from(lo + 1):
                    sat = arg_sat[lvl - 1]
                    hit = set()
                    for node in self.am.levels[lvl]:
                        targets = self.am.subtree_links[node][cand.agent]
                        if all(t in sat for t in targets):
                            hit.add(node)
                    self.mark(atom, lvl, hit)
                    sat_by_level[lvl] = frozenset(hit)
                self.min_level[atom] = lo + 1
            out.append(Elimination(_unsubstitute(cand, back), atom, "K", sat_by_level))
        else:
            assert isinstance(cand, fm.SetObs)
            sat_by_level = {}
            for lvl in self.levels_from(lo):
                sat = arg_sat[lvl]
                hit = set()
                for node in self.am.levels[lvl]:
                    tgt = self.am.delta_edges[(node, cand.agent, cand.obs)]
                    if tgt in sat:
                        hit.add(node)
                self.mark(atom, lvl, hit)
                sat_by_level[lvl] = frozenset(hit)
            self.min_level[atom] = lo
            out.append(Elimination(_unsubstitute(cand, back), atom, "D", sat_by_level))
        return out


def check(
    m: Model,
    f: fm.Formula,
    budget: int | None = None,
    force_ktree: bool = False,
    extra_delta_pairs: Iterable[tuple[str, str]] = (),
) -> CheckRun:
    """Decide whether the model satisfies the formula (at the initial
    state with empty records), returning the full run."""
    _check_formula_against_model(m, f)
    t0 = time.perf_counter()
    work = fm.desugar_exists(f)
    k = fm.knowledge_depth(work)
    pairs = set(fm.delta_pairs(work)) | set(extra_delta_pairs)
    am = build_augmented(m, k, pairs, budget=budget, force_ktree=force_ktree)

    engine = _Engine(m, am)
    engine.forbidden |= fm.atoms_of(work)
    eliminated: list[Elimination] = []
    back: dict[str, fm.Formula] = {}
    passes = 0
    while True:
        cand = fm.innermost_epistemic(work)
        if cand is None:
            break
        passes += 1
        for e in engine.eliminate(cand, back):
            eliminated.append(e)
            back[e.atom] = e.source
        work, n = fm.substitute(work, cand, eliminated[-1].atom)
        if n == 0:
            raise CheckError("internal: eliminated subformula not found")

    top = am.k if am.kind == "ktree" else 1
    if engine.ml(work) > top:
        raise CheckError("internal: residual formula needs a deeper structure")
    final_sat = engine.sat_of(work, top)
    verdict = am.initial in final_sat
    wall = (time.perf_counter() - t0) * 1000.0
    stats = {
        "passes": passes + 1,
        "wall_ms": round(wall, 3),
        "nodes": am.node_count(),
        "levels": am.level_counts(),
    }
    return CheckRun(m, f, am, eliminated, work, final_sat, verdict, stats)


def check_static(
    m: Model,
    f: fm.Formula,
    budget: int | None = None,
    force_ktree: bool = False,
) -> CheckRun:
    """Same pipeline restricted to static observations (no D operator)."""
    if fm.delta_pairs(f):
        raise CheckError("static check requires a formula without observation change")
    return check(m, f, budget=budget, force_ktree=force_ktree)


def verdict_of(run: CheckRun) -> Verdict:
    return Verdict.HOLDS if run.verdict else Verdict.FAILS
