"""Bounded breadth-first exploration of Reidemeister move graphs.

States are deduplicated by canonical key.  Every visited state keeps the
exact projection it was first reached as, so a witness path (move texts
resolved against those representatives) replays from the start curve.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Callable, Iterable, Sequence

from .curve import TRIVIAL, KnotProjection
from .moves import MoveKind, apply_move, enumerate_moves, format_move

log = logging.getLogger(__name__)

HOMOTOPY_13 = frozenset({MoveKind.R1_UP, MoveKind.R1_DOWN, MoveKind.R3})
FULL = frozenset(MoveKind)
MOVESETS = {"13": HOMOTOPY_13, "full": FULL}

DEFAULT_MAX_STATES = 500_000

CAVEAT = (
    "bounded search only: a negative answer says nothing about move sequences "
    "that leave the stated crossing, state or depth bounds"
)


@dataclass(frozen=True)
class Bounds:
    max_crossings: int | None = None
    max_states: int | None = DEFAULT_MAX_STATES
    max_depth: int | None = None

    def __post_init__(self) -> None:
        for name in ("max_crossings", "max_states", "max_depth"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")

    @classmethod
    def default_for(cls, P: KnotProjection) -> "Bounds":
        return cls(max_crossings=P.n + 2, max_states=DEFAULT_MAX_STATES, max_depth=None)

    def to_tree(self) -> dict:
        return {"max_crossings": self.max_crossings, "max_states": self.max_states, "max_depth": self.max_depth}


@dataclass
class ExplorationReport:
    start_key: bytes
    visited: set[bytes]
    truncated: dict[str, bool]
    trivial_reached: bool
    min_crossings_seen: int
    witness_path: list[str] | None
    bounds: Bounds
    moves: frozenset[MoveKind]
    states_by_crossings: Counter = field(default_factory=Counter)
    depth_reached: int = 0
    goal_reached: bool = False

    @property
    def complete(self) -> bool:
        return not (self.truncated["states"] or self.truncated["depth"])

    def to_tree(self) -> dict:
        return {
            "bounds": self.bounds.to_tree(),
            "moves": sorted(k.value for k in self.moves),
            "states": len(self.visited),
            "states_by_crossings": {str(k): v for k, v in sorted(self.states_by_crossings.items())},
            "depth_reached": self.depth_reached,
            "truncated": dict(self.truncated),
            "complete": self.complete,
            "trivial_reached": self.trivial_reached,
            "min_crossings_seen": self.min_crossings_seen,
            "witness_path": self.witness_path,
            "caveat": CAVEAT,
        }


def _children(P: KnotProjection, moves: Sequence[MoveKind], max_crossings: int | None) -> tuple[list[tuple[bytes, KnotProjection, str]], bool]:
    out = []
    capped = False
    for kind in moves:
        if max_crossings is not None and P.n + kind.delta > max_crossings:
            if enumerate_moves(P, kind):
                capped = True
            continue
        for m in enumerate_moves(P, kind):
            R = apply_move(P, m, validate=False)
            out.append((R.canonical_key(), R, format_move(P, m)))
    return out, capped


def _expand_chunk(args: tuple[list[tuple[int, ...]], tuple[str, ...], int | None]) -> list[tuple[list[tuple[bytes, tuple[int, ...], str]], bool]]:
    alphas, kinds, cap = args
    moves = [MoveKind(k) for k in kinds]
    res = []
    for a in alphas:
        kids, capped = _children(KnotProjection(a, validate=False), moves, cap)
        res.append(([(k, R.alpha, t) for k, R, t in kids], capped))
    return res


def explore(
    P: KnotProjection,
    moves: Iterable[MoveKind] = HOMOTOPY_13,
    bounds: Bounds | None = None,
    *,
    jobs: int = 1,
    goal: Callable[[KnotProjection], bool] | None = None,
    stop_at_goal: bool = False,
) -> ExplorationReport:
    """Breadth-first closure of the states reachable from ``P``.

    ``goal`` defaults to "is the trivial projection".  The visited set does
    not depend on ``jobs``: frontier children are merged in parent order.
    """
    bounds = bounds or Bounds.default_for(P)
    kinds = [k for k in MoveKind if k in set(moves)]
    goal = goal or (lambda Q: Q.is_trivial)
    cap = bounds.max_crossings
    start = P.canonical_key()
    parent: dict[bytes, tuple[bytes | None, str | None]] = {start: (None, None)}
    counts: Counter = Counter({P.n: 1})
    truncated = {"crossings": False, "states": False, "depth": False}
    found: bytes | None = start if goal(P) else None
    frontier = [P]
    depth = 0
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while frontier and not (found is not None and stop_at_goal):
            if bounds.max_depth is not None and depth >= bounds.max_depth:
                expanded = _expand(frontier, kinds, cap, pool, jobs)
                if any(k not in parent for kids, _ in expanded for k, _, _ in kids):
                    truncated["depth"] = True
                break
            expanded = _expand(frontier, kinds, cap, pool, jobs)
            nxt: list[KnotProjection] = []
            full = False
            for Q, (kids, capped) in zip(frontier, expanded):
                truncated["crossings"] |= capped
                qkey = Q.canonical_key()
                for key, R, text in kids:
                    if key in parent:
                        continue
                    if bounds.max_states is not None and len(parent) >= bounds.max_states:
                        truncated["states"] = True
                        full = True
                        break
                    parent[key] = (qkey, text)
                    counts[R.n] += 1
                    nxt.append(R)
                    if found is None and goal(R):
                        found = key
                if full:
                    break
            depth += 1
            log.debug("depth %d: %d new states, %d total", depth, len(nxt), len(parent))
            if full:
                break
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()

    path = None
    if found is not None:
        path = []
        k = found
        while parent[k][0] is not None:
            pk, text = parent[k]
            path.append(text)
            k = pk
        path.reverse()
    return ExplorationReport(
        start_key=start,
        visited=set(parent),
        truncated=truncated,
        trivial_reached=TRIVIAL.canonical_key() in parent,
        goal_reached=found is not None,
        min_crossings_seen=min(counts),
        witness_path=path,
        bounds=bounds,
        moves=frozenset(kinds),
        states_by_crossings=counts,
        depth_reached=depth,
    )


def _expand(frontier, kinds, cap, pool, jobs):
    if pool is None or len(frontier) < 2 * jobs:
        return [_children(Q, kinds, cap) for Q in frontier]
    size = max(1, len(frontier) // (4 * jobs))
    chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
    args = [([Q.alpha for Q in ch], tuple(k.value for k in kinds), cap) for ch in chunks]
    out = []
    for res in pool.map(_expand_chunk, args):
        for kids, capped in res:
            out.append(([(k, KnotProjection(a, validate=False), t) for k, a, t in kids], capped))
    return out


class Reachability(str, Enum):
    REACHED = "Reached"
    NOT_REACHED_COMPLETE = "NotReachedComplete"
    NOT_REACHED_TRUNCATED = "NotReachedTruncated"


def is_13_trivial_bounded(P: KnotProjection, bounds: Bounds | None = None, *, jobs: int = 1) -> tuple[Reachability, ExplorationReport]:
    rep = explore(P, HOMOTOPY_13, bounds, jobs=jobs, stop_at_goal=True)
    if rep.trivial_reached:
        return Reachability.REACHED, rep
    if rep.complete:
        return Reachability.NOT_REACHED_COMPLETE, rep
    return Reachability.NOT_REACHED_TRUNCATED, rep


def cmin_bounded(P: KnotProjection, bounds: Bounds | None = None, *, jobs: int = 1) -> tuple[int, bool]:
    """Smallest crossing count seen in the bounded (1,3)-reachable region.

    An upper bound on the minimal crossing number; ``complete`` is False when
    the region was cut off by the state or depth bound.
    """
    rep = explore(P, HOMOTOPY_13, bounds, jobs=jobs)
    return rep.min_crossings_seen, rep.complete


@dataclass
class Reduction:
    path: list[str]
    success: bool
    final: KnotProjection

    def to_tree(self) -> dict:
        return {"success": self.success, "moves": self.path, "final_crossings": self.final.n}


def reduce_full(P: KnotProjection, bounds: Bounds | None = None) -> Reduction:
    """Move sequence to the trivial projection using all five move kinds.

    Crossing-decreasing moves are taken greedily; when none applies, a
    bounded breadth-first plateau search looks for any state with fewer
    crossings.  On failure the partial path is returned with success False.
    """
    from .moves import replay

    cur = P
    path: list[str] = []
    while not cur.is_trivial:
        step = None
        for kind in (MoveKind.R1_DOWN, MoveKind.R2_DOWN):
            ms = enumerate_moves(cur, kind)
            if ms:
                step = [format_move(cur, ms[0])]
                break
        if step is None:
            cap = cur.n + 2
            if bounds is not None and bounds.max_crossings is not None:
                cap = max(cur.n, bounds.max_crossings)
            b = Bounds(
                max_crossings=cap,
                max_states=bounds.max_states if bounds else DEFAULT_MAX_STATES,
                max_depth=bounds.max_depth if bounds else None,
            )
            target = cur.n
            rep = explore(cur, FULL, b, goal=lambda Q: Q.n < target, stop_at_goal=True)
            if rep.witness_path is None:
                return Reduction(path, False, cur)
            step = rep.witness_path
        cur = replay(cur, step)
        path.extend(step)
    return Reduction(path, True, cur)
