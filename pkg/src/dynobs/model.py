"""Kripke structures with named observation relations.

A model is a finite transition system with a valuation, one equivalence
relation per observation name (stored as a partition of the state set),
a designated initial state, and one initial observation per agent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class ModelError(Exception):
    """Raised on unparseable or structurally invalid model input."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class Model:
    """Immutable multi-agent Kripke structure with observations.

    Partition blocks are completed with singletons for unlisted states at
    construction time, so every stored partition covers the state set.
    """

    def __init__(
        self,
        atoms: Iterable[str],
        agents: Sequence[str],
        observations: Iterable[str],
        states: Sequence[str],
        transitions: Iterable[tuple[str, str]],
        valuation: Mapping[str, Iterable[str]],
        obs_partitions: Mapping[str, Iterable[Iterable[str]]],
        initial_state: str,
        initial_obs: Mapping[str, str],
    ):
        self.atoms = frozenset(atoms)
        self.agents = tuple(agents)
        self.observations = frozenset(observations)
        self.states = tuple(states)
        self.state_set = frozenset(states)
        self.transitions = frozenset(transitions)
        self.valuation = {s: frozenset(valuation.get(s, ())) for s in self.states}
        self.initial_state = initial_state
        self.initial_obs = dict(initial_obs)

        self._succ: dict[str, tuple[str, ...]] = {s: () for s in self.states}
        succ_sets: dict[str, set[str]] = {s: set() for s in self.states}
        for a, b in self.transitions:
            if a in succ_sets:
                succ_sets[a].add(b)
        for s in self.states:
            self._succ[s] = tuple(sorted(succ_sets[s]))

        # Complete partitions: states not mentioned in any block are singletons.
        self.obs_partitions: dict[str, tuple[frozenset[str], ...]] = {}
        self._block: dict[tuple[str, str], frozenset[str]] = {}
        for o in sorted(self.observations):
            blocks = [frozenset(b) for b in obs_partitions.get(o, ())]
            covered: set[str] = set()
            for b in blocks:
                covered |= b
            for s in self.states:
                if s not in covered:
                    blocks.append(frozenset((s,)))
            blocks.sort(key=lambda b: sorted(b))
            self.obs_partitions[o] = tuple(blocks)
            for b in blocks:
                for s in b:
                    if (o, s) not in self._block:
                        self._block[(o, s)] = b

    # -- queries -----------------------------------------------------------

    def successors(self, s: str) -> tuple[str, ...]:
        """All transition successors of a single state."""
        if s not in self.state_set:
            raise ModelError(f"unknown state '{s}'")
        return self._succ[s]

    def post(self, states: Iterable[str]) -> frozenset[str]:
        """Set-lifted successor map: union of successors over the input set."""
        out: set[str] = set()
        for s in states:
            out.update(self.successors(s))
        return frozenset(out)

    def eq_class(self, o: str, s: str) -> frozenset[str]:
        """The partition block of observation o containing state s."""
        if o not in self.observations:
            raise ModelError(f"unknown observation '{o}'")
        if s not in self.state_set:
            raise ModelError(f"unknown state '{s}'")
        return self._block[(o, s)]

    def label_of(self, s: str) -> frozenset[str]:
        return self.valuation[s]

    def initial_obs_vector(self) -> tuple[str, ...]:
        return tuple(self.initial_obs[a] for a in self.agents)

    @property
    def mono(self) -> bool:
        return len(self.agents) == 1

    def validate(self) -> list[Violation]:
        """Check every structural invariant; an empty list means valid."""
        out: list[Violation] = []
        if not self.agents:
            out.append(Violation("agents-empty", "model declares no agents"))
        if not self.observations:
            out.append(Violation("observations-empty", "model declares no observations"))
        if len(set(self.states)) != len(self.states):
            out.append(Violation("duplicate-state", "duplicate state name"))
        for a, b in sorted(self.transitions):
            for end in (a, b):
                if end not in self.state_set:
                    out.append(Violation("transition-unknown-state", f"transition mentions unknown state '{end}'"))
        for s in self.states:
            if not self._succ[s]:
                out.append(Violation("not-left-total", f"state '{s}' has no outgoing transition"))
        for s, props in self.valuation.items():
            extra = props - self.atoms
            if extra:
                out.append(Violation("valuation-unknown-atom", f"state '{s}' labeled with undeclared atoms {sorted(extra)}"))
        if self.initial_state not in self.state_set:
            out.append(Violation("initial-state-unknown", f"initial state '{self.initial_state}' not declared"))
        for a in self.agents:
            o = self.initial_obs.get(a)
            if o is None:
                out.append(Violation("initobs-missing-agent", f"agent '{a}' has no initial observation"))
            elif o not in self.observations:
                out.append(Violation("initobs-unknown-observation", f"agent '{a}' starts with undeclared observation '{o}'"))
        for a in self.initial_obs:
            if a not in self.agents:
                out.append(Violation("initobs-unknown-agent", f"initial observation given for undeclared agent '{a}'"))
        for o, blocks in self.obs_partitions.items():
            seen: set[str] = set()
            for b in blocks:
                for s in b:
                    if s not in self.state_set:
                        out.append(Violation("partition-unknown-state", f"observation '{o}' mentions unknown state '{s}'"))
                    elif s in seen:
                        out.append(Violation("partition-overlap", f"state '{s}' occurs in two blocks of observation '{o}'"))
                    seen.add(s)
            missing = self.state_set - seen
            if missing:
                out.append(Violation("partition-incomplete", f"observation '{o}' misses states {sorted(missing)}"))
        return out


# -- parsing ---------------------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_@")
_IDENT_CONT = _IDENT_START | set("0123456789")


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            toks.append(_Tok("arrow", "->", line, col))
            i += 2
            col += 2
            continue
        if c in ":;={},":
            toks.append(_Tok(c, c, line, col))
            i += 1
            col += 1
            continue
        if c in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            toks.append(_Tok("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ModelError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _ModelParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise ModelError(f"expected '{kind}', found {t.text!r}", t.line, t.col)
        return t

    def keyword(self, word: str) -> _Tok:
        t = self.next()
        if t.kind != "ident" or t.text != word:
            raise ModelError(f"expected section '{word}', found {t.text!r}", t.line, t.col)
        return t

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text == word

    def ident_list(self) -> list[_Tok]:
        out = []
        while self.peek().kind == "ident":
            out.append(self.next())
        return out

    def name_section(self, word: str, what: str) -> list[str]:
        self.keyword(word)
        self.expect(":")
        toks = self.ident_list()
        self.expect(";")
        seen: set[str] = set()
        for t in toks:
            if t.text in seen:
                raise ModelError(f"duplicate {what} '{t.text}'", t.line, t.col)
            seen.add(t.text)
        return [t.text for t in toks]


def parse_model(text: str) -> Model:
    """Parse the model grammar and return a validated Model."""
    p = _ModelParser(text)

    agents = ["a"]
    if p.at_keyword("agents"):
        agents = p.name_section("agents", "agent")
        if not agents:
            raise ModelError("agents section is empty")
    observations = p.name_section("observations", "observation")
    if not observations:
        raise ModelError("observations section is empty")
    atoms = p.name_section("atoms", "atom")
    states = p.name_section("states", "state")
    if not states:
        raise ModelError("states section is empty")
    state_set = set(states)
    obs_set = set(observations)

    p.keyword("init")
    p.expect(":")
    t = p.expect("ident")
    if t.text not in state_set:
        raise ModelError(f"unknown state '{t.text}' in init", t.line, t.col)
    initial_state = t.text
    p.expect(";")

    p.keyword("initobs")
    p.expect(":")
    initial_obs: dict[str, str] = {}
    first = p.expect("ident")
    if p.peek().kind == "=":
        p.next()
        val = p.expect("ident")
        pairs = [(first, val)]
        while p.peek().kind == "ident":
            key = p.next()
            p.expect("=")
            pairs.append((key, p.expect("ident")))
        for key, val in pairs:
            if key.text not in agents:
                raise ModelError(f"unknown agent '{key.text}' in initobs", key.line, key.col)
            if val.text not in obs_set:
                raise ModelError(f"unknown observation '{val.text}' in initobs", val.line, val.col)
            if key.text in initial_obs:
                raise ModelError(f"duplicate initial observation for agent '{key.text}'", key.line, key.col)
            initial_obs[key.text] = val.text
    else:
        if len(agents) != 1:
            raise ModelError("plain 'initobs: o ;' needs a mono-agent model", first.line, first.col)
        if first.text not in obs_set:
            raise ModelError(f"unknown observation '{first.text}' in initobs", first.line, first.col)
        initial_obs[agents[0]] = first.text
    p.expect(";")
    for a in agents:
        if a not in initial_obs:
            raise ModelError(f"agent '{a}' has no initial observation")

    valuation: dict[str, set[str]] = {s: set() for s in states}
    while p.at_keyword("label"):
        p.next()
        st = p.expect("ident")
        if st.text not in state_set:
            raise ModelError(f"unknown state '{st.text}' in label", st.line, st.col)
        p.expect(":")
        for t in p.ident_list():
            if t.text not in atoms:
                raise ModelError(f"unknown atom '{t.text}' in label", t.line, t.col)
            valuation[st.text].add(t.text)
        p.expect(";")

    p.keyword("trans")
    p.expect(":")
    transitions: set[tuple[str, str]] = set()
    while p.peek().kind == "ident":
        src = p.next()
        p.expect("arrow")
        dst = p.expect("ident")
        for t in (src, dst):
            if t.text not in state_set:
                raise ModelError(f"unknown state '{t.text}' in trans", t.line, t.col)
        transitions.add((src.text, dst.text))
    p.expect(";")

    obs_partitions: dict[str, list[list[str]]] = {}
    while p.at_keyword("obs"):
        p.next()
        name = p.expect("ident")
        if name.text not in obs_set:
            raise ModelError(f"unknown observation '{name.text}'", name.line, name.col)
        if name.text in obs_partitions:
            raise ModelError(f"duplicate obs section for '{name.text}'", name.line, name.col)
        p.expect(":")
        blocks: list[list[str]] = []
        placed: set[str] = set()
        while p.peek().kind == "{":
            p.next()
            block = []
            for t in p.ident_list():
                if t.text not in state_set:
                    raise ModelError(f"unknown state '{t.text}' in obs block", t.line, t.col)
                if t.text in placed:
                    raise ModelError(f"state '{t.text}' occurs in two blocks of '{name.text}'", t.line, t.col)
                placed.add(t.text)
                block.append(t.text)
            p.expect("}")
            blocks.append(block)
        p.expect(";")
        obs_partitions[name.text] = blocks

    t = p.peek()
    if t.kind != "eof":
        raise ModelError(f"unexpected input {t.text!r}", t.line, t.col)

    m = Model(
        atoms=atoms,
        agents=agents,
        observations=observations,
        states=states,
        transitions=transitions,
        valuation=valuation,
        obs_partitions=obs_partitions,
        initial_state=initial_state,
        initial_obs=initial_obs,
    )
    bad = m.validate()
    if bad:
        raise ModelError("; ".join(str(v) for v in bad))
    return m


def serialize_model(m: Model) -> str:
    """Render a model back into the input grammar (round-trippable)."""
    lines = []
    lines.append("agents: " + " ".join(m.agents) + " ;")
    lines.append("observations: " + " ".join(sorted(m.observations)) + " ;")
    lines.append("atoms: " + " ".join(sorted(m.atoms)) + " ;")
    lines.append("states: " + " ".join(m.states) + " ;")
    lines.append(f"init: {m.initial_state} ;")
    lines.append("initobs: " + "  ".join(f"{a} = {m.initial_obs[a]}" for a in m.agents) + " ;")
    for s in m.states:
        if m.valuation[s]:
            lines.append(f"label {s} : " + " ".join(sorted(m.valuation[s])) + " ;")
    pairs = "  ".join(f"{a} -> {b}" for a, b in sorted(m.transitions))
    lines.append(f"trans: {pairs} ;")
    for o in sorted(m.observations):
        blocks = [b for b in m.obs_partitions[o] if len(b) > 1]
        rendered = " ".join("{ " + " ".join(sorted(b)) + " }" for b in blocks)
        lines.append(f"obs {o} : {rendered} ;".replace("  ;", " ;"))
    return "\n".join(lines) + "\n"
