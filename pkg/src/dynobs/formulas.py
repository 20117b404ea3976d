"""Formula AST, parser and structural utilities.

History formulas may quantify over paths (A/E), query knowledge (K) and
switch an agent's observation (D).  Temporal operators (X, U, F, G) are
only legal below a path quantifier; the parser builds a unified AST and
then enforces this stratification.
"""

from __future__ import annotations

from dataclasses import dataclass
from .model import Model


class FormulaError(Exception):
    pass


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class AllPaths(Formula):
    """Universal path quantifier (A)."""

    sub: Formula


@dataclass(frozen=True)
class SomePaths(Formula):
    """Existential path quantifier (E); the parser emits !A! instead."""

    sub: Formula


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    sub: Formula


@dataclass(frozen=True)
class Always(Formula):
    sub: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class SetObs(Formula):
    """Observation change: the agent switches to the named observation."""

    agent: str
    obs: str
    sub: Formula


TRUE = TrueF()
FALSE = FalseF()

_UNARY = (Not, AllPaths, SomePaths, Next, Eventually, Always)
_BINARY = (And, Or, Implies, Until)
_TEMPORAL = (Next, Until, Eventually, Always)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.sub,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, (Knows, SetObs)):
        return (f.sub,)
    return ()


def _rebuild(f: Formula, subs: tuple[Formula, ...]) -> Formula:
    if isinstance(f, Not):
        return Not(subs[0])
    if isinstance(f, AllPaths):
        return AllPaths(subs[0])
    if isinstance(f, SomePaths):
        return SomePaths(subs[0])
    if isinstance(f, Next):
        return Next(subs[0])
    if isinstance(f, Eventually):
        return Eventually(subs[0])
    if isinstance(f, Always):
        return Always(subs[0])
    if isinstance(f, And):
        return And(subs[0], subs[1])
    if isinstance(f, Or):
        return Or(subs[0], subs[1])
    if isinstance(f, Implies):
        return Implies(subs[0], subs[1])
    if isinstance(f, Until):
        return Until(subs[0], subs[1])
    if isinstance(f, Knows):
        return Knows(f.agent, subs[0])
    if isinstance(f, SetObs):
        return SetObs(f.agent, f.obs, subs[0])
    return f


def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    out: set[str] = set()
    for c in children(f):
        out |= atoms_of(c)
    return frozenset(out)


def is_history(f: Formula) -> bool:
    """Whether f reads as a history (state) formula: no bare temporal operator."""
    if isinstance(f, _TEMPORAL):
        return False
    if isinstance(f, (AllPaths, SomePaths, Knows, SetObs, Atom, TrueF, FalseF)):
        return True
    return all(is_history(c) for c in children(f))


def is_boolean(f: Formula) -> bool:
    """Whether f is a pure Boolean combination of atoms and constants."""
    if isinstance(f, (Atom, TrueF, FalseF)):
        return True
    if isinstance(f, (Not, And, Or, Implies)):
        return all(is_boolean(c) for c in children(f))
    return False


def validate_stratification(f: Formula, in_path: bool = False) -> None:
    """Raise FormulaError if a temporal operator occurs outside path context."""
    if isinstance(f, _TEMPORAL):
        if not in_path:
            raise FormulaError("temporal operator outside path context")
        for c in children(f):
            validate_stratification(c, True)
        return
    if isinstance(f, (AllPaths, SomePaths)):
        validate_stratification(f.sub, True)
        return
    if isinstance(f, (Knows, SetObs)):
        validate_stratification(f.sub, False)
        return
    for c in children(f):
        validate_stratification(c, in_path)


def knowledge_depth(f: Formula) -> int:
    """Maximum nesting of K operators; observation change adds no depth."""
    if isinstance(f, Knows):
        return 1 + knowledge_depth(f.sub)
    kids = children(f)
    return max((knowledge_depth(c) for c in kids), default=0)


def substitute(f: Formula, target: Formula, atom_name: str) -> tuple[Formula, int]:
    """Replace every occurrence of `target` in f by Atom(atom_name).

    Returns the rewritten formula and the occurrence count.  Raises if the
    atom name already occurs in f (freshness violation).
    """
    if atom_name in atoms_of(f):
        raise FormulaError(f"substitution atom '{atom_name}' already occurs")
    count = 0

    def walk(g: Formula) -> Formula:
        nonlocal count
        if g == target:
            count += 1
            return Atom(atom_name)
        kids = children(g)
        if not kids:
            return g
        return _rebuild(g, tuple(walk(c) for c in kids))

    out = walk(f)
    return out, count


def innermost_epistemic(f: Formula) -> Formula | None:
    """Leftmost K/D subformula whose argument contains no K and no D."""

    def epistemic_free(g: Formula) -> bool:
        if isinstance(g, (Knows, SetObs)):
            return False
        return all(epistemic_free(c) for c in children(g))

    def walk(g: Formula) -> Formula | None:
        if isinstance(g, (Knows, SetObs)) and epistemic_free(g.sub):
            return g
        for c in children(g):
            hit = walk(c)
            if hit is not None:
                return hit
        return None

    return walk(f)


def delta_pairs(f: Formula) -> frozenset[tuple[str, str]]:
    """All (agent, observation) pairs appearing in observation changes."""
    out: set[tuple[str, str]] = set()
    if isinstance(f, SetObs):
        out.add((f.agent, f.obs))
    for c in children(f):
        out |= delta_pairs(c)
    return frozenset(out)


def strip_deltas(f: Formula) -> Formula:
    """Remove every observation-change operator, keeping its argument."""
    if isinstance(f, SetObs):
        return strip_deltas(f.sub)
    kids = children(f)
    if not kids:
        return f
    return _rebuild(f, tuple(strip_deltas(c) for c in kids))


def desugar_exists(f: Formula) -> Formula:
    """Rewrite every E node into !A! form."""
    kids = children(f)
    g = f if not kids else _rebuild(f, tuple(desugar_exists(c) for c in kids))
    if isinstance(g, SomePaths):
        return Not(AllPaths(Not(g.sub)))
    return g


# -- parsing ---------------------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_@")
_IDENT_CONT = _IDENT_START | set("0123456789")
_KEYWORDS = {"A", "E", "X", "F", "G", "K", "D", "U", "true", "false"}


def _lex(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            toks.append(("->", "->", i))
            i += 2
            continue
        if c in "()[],!&|":
            toks.append((c, c, i))
            i += 1
            continue
        if c in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            toks.append((kind, word, i))
            i = j
            continue
        raise FormulaError(f"unexpected character {c!r} at offset {i}")
    toks.append(("eof", "", n))
    return toks


class _FormulaParser:
    def __init__(self, text: str, m: Model):
        self.toks = _lex(text)
        self.pos = 0
        self.m = m

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.pos]

    def next(self) -> tuple[str, str, int]:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> tuple[str, str, int]:
        t = self.next()
        if t[0] != kind:
            raise FormulaError(f"expected '{kind}', found {t[1]!r} at offset {t[2]}")
        return t

    def sole_agent(self, offset: int) -> str:
        if len(self.m.agents) != 1:
            raise FormulaError(f"ambiguous agent shorthand on multi-agent model at offset {offset}")
        return self.m.agents[0]

    def parse(self) -> Formula:
        f = self.implies()
        t = self.peek()
        if t[0] != "eof":
            raise FormulaError(f"unexpected trailing input {t[1]!r} at offset {t[2]}")
        return f

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.until()
        while self.peek()[0] == "&":
            self.next()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.peek()[0] == "U":
            self.next()
            return Until(left, self.until())
        return left

    def unary(self) -> Formula:
        kind, word, off = self.peek()
        if kind == "!":
            self.next()
            return Not(self.unary())
        if kind == "A":
            self.next()
            return AllPaths(self.unary())
        if kind == "E":
            self.next()
            return Not(AllPaths(Not(self.unary())))
        if kind == "X":
            self.next()
            return Next(self.unary())
        if kind == "F":
            self.next()
            return Eventually(self.unary())
        if kind == "G":
            self.next()
            return Always(self.unary())
        if kind == "K":
            self.next()
            if self.peek()[0] == "[":
                self.next()
                agent = self.expect("ident")[1]
                self.expect("]")
            else:
                agent = self.sole_agent(off)
            if agent not in self.m.agents:
                raise FormulaError(f"unknown agent '{agent}'")
            return Knows(agent, self.unary())
        if kind == "D":
            self.next()
            self.expect("[")
            first = self.expect("ident")[1]
            if self.peek()[0] == ",":
                self.next()
                obs = self.expect("ident")[1]
                agent = first
            else:
                agent = self.sole_agent(off)
                obs = first
            self.expect("]")
            if agent not in self.m.agents:
                raise FormulaError(f"unknown agent '{agent}'")
            if obs not in self.m.observations:
                raise FormulaError(f"unknown observation '{obs}'")
            return SetObs(agent, obs, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, word, off = self.next()
        if kind == "(":
            f = self.implies()
            self.expect(")")
            return f
        if kind == "true":
            return TRUE
        if kind == "false":
            return FALSE
        if kind == "ident":
            if word not in self.m.atoms:
                raise FormulaError(f"unknown atom '{word}'")
            return Atom(word)
        raise FormulaError(f"unexpected token {word!r} at offset {off}")


def parse_formula(text: str, m: Model) -> Formula:
    """Parse a history formula and check stratification against the model."""
    f = _FormulaParser(text, m).parse()
    validate_stratification(f, in_path=False)
    return f


# precedence levels: -> 0, | 1, & 2, U 3, unary 4, primary 5
def _level(f: Formula) -> int:
    if isinstance(f, Implies):
        return 0
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    if isinstance(f, Until):
        return 3
    if isinstance(f, (Atom, TrueF, FalseF)):
        return 5
    return 4


def format_formula(f: Formula) -> str:
    """Render a formula back into concrete syntax (round-trippable)."""

    def at(g: Formula, need: int) -> str:
        s = render(g)
        if _level(g) < need:
            return f"({s})"
        return s

    def render(g: Formula) -> str:
        if isinstance(g, Atom):
            return g.name
        if isinstance(g, TrueF):
            return "true"
        if isinstance(g, FalseF):
            return "false"
        if isinstance(g, Not):
            return "!" + at(g.sub, 4)
        if isinstance(g, And):
            return f"{at(g.left, 2)} & {at(g.right, 3)}"
        if isinstance(g, Or):
            return f"{at(g.left, 1)} | {at(g.right, 2)}"
        if isinstance(g, Implies):
            return f"{at(g.left, 1)} -> {at(g.right, 0)}"
        if isinstance(g, Until):
            return f"{at(g.left, 4)} U {at(g.right, 3)}"
        if isinstance(g, AllPaths):
            return "A " + at(g.sub, 4)
        if isinstance(g, SomePaths):
            return "E " + at(g.sub, 4)
        if isinstance(g, Next):
            return "X " + at(g.sub, 4)
        if isinstance(g, Eventually):
            return "F " + at(g.sub, 4)
        if isinstance(g, Always):
            return "G " + at(g.sub, 4)
        if isinstance(g, Knows):
            return f"K[{g.agent}] " + at(g.sub, 4)
        if isinstance(g, SetObs):
            return f"D[{g.agent},{g.obs}] " + at(g.sub, 4)
        raise FormulaError(f"cannot render {g!r}")

    return render(f)
