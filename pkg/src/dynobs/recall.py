"""Definition-level machinery for synchronous perfect recall.

Everything here works by direct enumeration over explicit histories and
observation-change records.  It never calls the incremental update
functions, which makes it the independent reference for all of them.

A record is a tuple of (observation, time) pairs per agent; an entry
(o, n) means the agent switched to observation o at time n, before the
(n+1)-th transition.
"""

from __future__ import annotations

import enum
from typing import Mapping, Sequence

from .model import Model
from . import formulas as fm
from .ktree import KTree, leaf

Record = tuple[tuple[str, int], ...]
History = tuple[str, ...]


class Verdict(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    UNKNOWN = "UNKNOWN"


def _tri_to_verdict(v: bool | None) -> Verdict:
    if v is None:
        return Verdict.UNKNOWN
    return Verdict.HOLDS if v else Verdict.FAILS


def empty_records(m: Model) -> dict[str, Record]:
    return {a: () for a in m.agents}


def normalize_records(m: Model, records: Mapping[str, Sequence[tuple[str, int]]] | None) -> dict[str, Record]:
    out = {a: () for a in m.agents}
    if records:
        for a, r in records.items():
            if a not in out:
                raise ValueError(f"unknown agent '{a}' in record tuple")
            out[a] = tuple((o, int(n)) for o, n in r)
    return out


def append_change(records: Mapping[str, Record], agent: str, o: str, time: int) -> dict[str, Record]:
    out = dict(records)
    out[agent] = out[agent] + ((o, time),)
    return out


def record_stops_at(record: Record, n: int) -> bool:
    return all(t <= n for _, t in record)


def stops_at_history(records: Mapping[str, Record], h: History) -> bool:
    return all(record_stops_at(r, len(h) - 1) for r in records.values())


def obslist(m: Model, records: Mapping[str, Record], agent: str, n: int) -> list[str]:
    """Observations the agent uses at time step n, in order.

    Starts from the initial observation at time 0 and threads the last
    observation of each step into the next; never empty.
    """
    if agent not in m.agents:
        raise ValueError(f"unknown agent '{agent}'")
    record = records[agent]
    current = [m.initial_obs[agent]]
    for step in range(n + 1):
        here = [o for o, t in record if t == step]
        if step == 0:
            current = [m.initial_obs[agent]] + here
        else:
            current = [current[-1]] + here
    return current


def lastobs(m: Model, records: Mapping[str, Record], agent: str, h_len: int) -> str:
    """The observation in force after a history of the given length."""
    return obslist(m, records, agent, h_len - 1)[-1]


def lastobs_map(m: Model, records: Mapping[str, Record], h_len: int) -> dict[str, str]:
    return {a: lastobs(m, records, a, h_len) for a in m.agents}


def lastobs_vector(m: Model, records: Mapping[str, Record], h_len: int) -> tuple[str, ...]:
    return tuple(lastobs(m, records, a, h_len) for a in m.agents)


def is_history_of(m: Model, h: Sequence[str]) -> bool:
    if not h:
        return False
    if any(s not in m.state_set for s in h):
        return False
    return all((h[i], h[i + 1]) in m.transitions for i in range(len(h) - 1))


def equiv_histories(m: Model, h: History, records: Mapping[str, Record], agent: str) -> list[History]:
    """All same-length histories the agent cannot tell apart from h.

    At every position the candidate state must be indistinguishable from
    h's state under every observation used there.  Candidates are built
    by levelwise product enumeration over the transition relation,
    starting from any state.
    """
    if not stops_at_history(records, h):
        raise ValueError("record does not stop at the history")
    allowed: list[frozenset[str]] = []
    for i, s in enumerate(h):
        cls = frozenset(m.state_set)
        for o in obslist(m, records, agent, i):
            cls &= m.eq_class(o, s)
        allowed.append(cls)
    out: list[History] = []
    prefix: list[str] = []

    def extend(i: int) -> None:
        if i == len(h):
            out.append(tuple(prefix))
            return
        if i == 0:
            cands = sorted(allowed[0])
        else:
            cands = [s for s in m.successors(prefix[-1]) if s in allowed[i]]
        for s in cands:
            prefix.append(s)
            extend(i + 1)
            prefix.pop()

    extend(0)
    return out


def info_set_enum(m: Model, h: History, records: Mapping[str, Record]) -> frozenset[str]:
    """Mono-agent information set: last states of all equivalent histories."""
    if len(m.agents) != 1:
        raise ValueError("information sets are a mono-agent notion; use ktree_enum")
    return frozenset(h2[-1] for h2 in equiv_histories(m, h, records, m.agents[0]))


def ktree_enum(m: Model, h: History, records: Mapping[str, Record], k: int) -> KTree:
    """Depth-k knowledge tree after (h, records), by direct enumeration."""
    if not stops_at_history(records, h):
        raise ValueError("record does not stop at the history")
    memo: dict[tuple[History, int], KTree] = {}

    def build(h2: History, depth: int) -> KTree:
        key = (h2, depth)
        got = memo.get(key)
        if got is not None:
            return got
        if depth == 0:
            t = leaf(h2[-1], len(m.agents))
        else:
            forests = []
            for a in m.agents:
                forests.append(frozenset(build(h3, depth - 1) for h3 in equiv_histories(m, h2, records, a)))
            t = KTree(h2[-1], forests)
        memo[key] = t
        return t

    return build(tuple(h), k)


# -- bounded three-valued evaluation ----------------------------------------


def _k_not(v: bool | None) -> bool | None:
    return None if v is None else not v


def _k_all(values) -> bool | None:
    saw_unknown = False
    for v in values:
        if v is False:
            return False
        if v is None:
            saw_unknown = True
    return None if saw_unknown else True


def _k_any(values) -> bool | None:
    saw_unknown = False
    for v in values:
        if v is True:
            return True
        if v is None:
            saw_unknown = True
    return None if saw_unknown else False


def eval_bounded(
    m: Model,
    h: Sequence[str],
    records: Mapping[str, Sequence[tuple[str, int]]] | None,
    f: fm.Formula,
    horizon: int,
) -> Verdict:
    """Three-valued evaluation of a history formula at (h, records).

    Boolean, knowledge and observation-change cases are exact.  Path
    quantification explores every extension of the history by up to
    `horizon` transitions; a temporal verdict that would depend on states
    beyond the horizon comes back UNKNOWN.  Definite verdicts are sound
    at every larger horizon.
    """
    hist = tuple(h)
    recs = normalize_records(m, records)
    if not is_history_of(m, hist):
        raise ValueError("not a history of the model")
    if not stops_at_history(recs, hist):
        raise ValueError("record does not stop at the history")
    return _tri_to_verdict(_hist_eval(m, hist, recs, f, horizon))


def _hist_eval(m: Model, h: History, recs: dict[str, Record], f: fm.Formula, horizon: int) -> bool | None:
    if isinstance(f, fm.Atom):
        return f.name in m.label_of(h[-1])
    if isinstance(f, fm.TrueF):
        return True
    if isinstance(f, fm.FalseF):
        return False
    if isinstance(f, fm.Not):
        return _k_not(_hist_eval(m, h, recs, f.sub, horizon))
    if isinstance(f, fm.And):
        return _k_all(_hist_eval(m, h, recs, g, horizon) for g in (f.left, f.right))
    if isinstance(f, fm.Or):
        return _k_any(_hist_eval(m, h, recs, g, horizon) for g in (f.left, f.right))
    if isinstance(f, fm.Implies):
        return _k_any((_k_not(_hist_eval(m, h, recs, f.left, horizon)), _hist_eval(m, h, recs, f.right, horizon)))
    if isinstance(f, fm.Knows):
        return _k_all(_hist_eval(m, h2, recs, f.sub, horizon) for h2 in equiv_histories(m, h, recs, f.agent))
    if isinstance(f, fm.SetObs):
        recs2 = append_change(recs, f.agent, f.obs, len(h) - 1)
        return _hist_eval(m, h, recs2, f.sub, horizon)
    if isinstance(f, fm.AllPaths):
        return _k_all(
            _path_eval(m, pi, len(h) - 1, recs, f.sub, horizon) for pi in _extensions(m, h, horizon)
        )
    if isinstance(f, fm.SomePaths):
        return _k_any(
            _path_eval(m, pi, len(h) - 1, recs, f.sub, horizon) for pi in _extensions(m, h, horizon)
        )
    raise fm.FormulaError(f"temporal operator outside path context: {f!r}")


def _extensions(m: Model, h: History, horizon: int) -> list[History]:
    """All extensions of h by exactly `horizon` transition steps."""
    out = [h]
    for _ in range(horizon):
        nxt = []
        for pi in out:
            for s in m.successors(pi[-1]):
                nxt.append(pi + (s,))
        out = nxt
    return out


def _path_eval(m: Model, pi: History, n: int, recs: dict[str, Record], f: fm.Formula, horizon: int) -> bool | None:
    limit = len(pi)
    if n >= limit:
        return None
    if fm.is_history(f):
        return _hist_eval(m, pi[: n + 1], recs, f, horizon)
    if isinstance(f, fm.Not):
        return _k_not(_path_eval(m, pi, n, recs, f.sub, horizon))
    if isinstance(f, fm.And):
        return _k_all(_path_eval(m, pi, n, recs, g, horizon) for g in (f.left, f.right))
    if isinstance(f, fm.Or):
        return _k_any(_path_eval(m, pi, n, recs, g, horizon) for g in (f.left, f.right))
    if isinstance(f, fm.Implies):
        return _k_any((_k_not(_path_eval(m, pi, n, recs, f.left, horizon)), _path_eval(m, pi, n, recs, f.right, horizon)))
    if isinstance(f, fm.Next):
        if n + 1 >= limit:
            return None
        return _path_eval(m, pi, n + 1, recs, f.sub, horizon)
    if isinstance(f, fm.Until):
        acc: bool | None = None  # verdict beyond the horizon is open
        for j in range(limit - 1, n - 1, -1):
            v2 = _path_eval(m, pi, j, recs, f.right, horizon)
            v1 = _path_eval(m, pi, j, recs, f.left, horizon)
            acc = _k_any((v2, _k_all((v1, acc))))
        return acc
    if isinstance(f, fm.Eventually):
        acc = None
        for j in range(limit - 1, n - 1, -1):
            acc = _k_any((_path_eval(m, pi, j, recs, f.sub, horizon), acc))
        return acc
    if isinstance(f, fm.Always):
        acc = None
        for j in range(limit - 1, n - 1, -1):
            acc = _k_all((_path_eval(m, pi, j, recs, f.sub, horizon), acc))
        return acc
    raise fm.FormulaError(f"unsupported path formula {f!r}")
