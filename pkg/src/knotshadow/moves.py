"""Reidemeister moves on knot projections: enumeration, surgery, inverses.

Face-based moves (R1_DOWN, R2_DOWN, R3) name their site by the corner darts
of the face being collapsed or flipped.  R1_UP names an edge by its smaller
dart and the side (relative to that dart's direction) the kink sits on.
R2_UP names a face and an ordered pair of corner positions: the edge
leaving the first corner is pushed across the edge leaving the second.
Equal positions push the edge across itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import os
import re
from typing import Iterable

from .curve import (
    TRIVIAL,
    KnotProjection,
    from_signed_gauss,
    sigma,
    sigma_inv,
)
from .errors import ParseError, StaleMoveInstance

DEBUG = os.environ.get("KNOTSHADOW_DEBUG", "") not in ("", "0")


class MoveKind(str, Enum):
    R1_UP = "R1_UP"
    R1_DOWN = "R1_DOWN"
    R2_UP = "R2_UP"
    R2_DOWN = "R2_DOWN"
    R3 = "R3"

    @property
    def delta(self) -> int:
        return _DELTA[self]

    @property
    def inverse(self) -> "MoveKind":
        return _INVERSE[self]


_DELTA = {
    MoveKind.R1_UP: 1,
    MoveKind.R1_DOWN: -1,
    MoveKind.R2_UP: 2,
    MoveKind.R2_DOWN: -2,
    MoveKind.R3: 0,
}
_INVERSE = {
    MoveKind.R1_UP: MoveKind.R1_DOWN,
    MoveKind.R1_DOWN: MoveKind.R1_UP,
    MoveKind.R2_UP: MoveKind.R2_DOWN,
    MoveKind.R2_DOWN: MoveKind.R2_UP,
    MoveKind.R3: MoveKind.R3,
}

ALL_KINDS = tuple(MoveKind)


@dataclass(frozen=True)
class MoveInstance:
    kind: MoveKind
    face: tuple[int, ...] = ()
    dart: int = -1
    side: str = ""
    corners: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Surgery:
    """Result of a move plus the bookkeeping certificate transport needs.

    ``vmap`` sends surviving old vertices to new ids; ``created`` lists new
    vertex ids; ``touched`` lists the old vertices the move rearranges.
    """

    result: KnotProjection
    vmap: dict[int, int]
    created: tuple[int, ...]
    touched: tuple[int, ...]


# -- enumeration -------------------------------------------------------------

def enumerate_moves(P: KnotProjection, kind: MoveKind | str) -> list[MoveInstance]:
    kind = MoveKind(kind)
    if P.is_trivial:
        if kind is MoveKind.R1_UP:
            return [MoveInstance(kind, dart=-1, side="L"), MoveInstance(kind, dart=-1, side="R")]
        if kind is MoveKind.R2_UP:
            return [MoveInstance(kind, face=(), corners=(f, f)) for f in (0, 1)]
        return []
    out = []
    if kind is MoveKind.R1_UP:
        for d in range(P.num_darts):
            if d < P.alpha[d]:
                out.append(MoveInstance(kind, dart=d, side="L"))
                out.append(MoveInstance(kind, dart=d, side="R"))
        return out
    for f in P.faces():
        r = f.degree
        if kind is MoveKind.R2_UP:
            for i in range(r):
                for j in range(r):
                    out.append(MoveInstance(kind, face=f.darts, corners=(i, j)))
        elif kind is MoveKind.R1_DOWN and r == 1:
            out.append(MoveInstance(kind, face=f.darts))
        elif kind is MoveKind.R2_DOWN and r == 2 and f.distinct_vertices == 2:
            out.append(MoveInstance(kind, face=f.darts))
        elif kind is MoveKind.R3 and r == 3 and f.distinct_vertices == 3:
            out.append(MoveInstance(kind, face=f.darts))
    return out


def enumerate_all(P: KnotProjection, kinds: Iterable[MoveKind | str] = ALL_KINDS) -> list[MoveInstance]:
    out: list[MoveInstance] = []
    for k in kinds:
        out.extend(enumerate_moves(P, k))
    return out


# -- site validation -----------------------------------------------------------

def _check_face(P: KnotProjection, face: tuple[int, ...], degree: int | None) -> None:
    if not face or any(not P.has_dart(d) for d in face):
        raise StaleMoveInstance(f"face {face} has darts outside the projection")
    a = P.alpha
    for k, d in enumerate(face):
        if sigma(a[d]) != face[(k + 1) % len(face)]:
            raise StaleMoveInstance(f"{face} is not a face of this projection")
    if degree is not None and len(face) != degree:
        raise StaleMoveInstance(f"face {face} has degree {len(face)}, expected {degree}")


def check_applicable(P: KnotProjection, m: MoveInstance) -> None:
    k = m.kind
    if P.is_trivial:
        if k is MoveKind.R1_UP and m.side in ("L", "R"):
            return
        if k is MoveKind.R2_UP and not m.face:
            return
        raise StaleMoveInstance(f"{k.value} is not applicable to the trivial projection")
    if k is MoveKind.R1_UP:
        if m.side not in ("L", "R") or not P.has_dart(m.dart):
            raise StaleMoveInstance(f"bad R1_UP site dart={m.dart} side={m.side!r}")
        return
    if k is MoveKind.R2_UP:
        _check_face(P, m.face, None)
        i, j = m.corners
        r = len(m.face)
        if not (0 <= i < r and 0 <= j < r):
            raise StaleMoveInstance(f"bad R2_UP corners {m.corners}")
        return
    need = {MoveKind.R1_DOWN: 1, MoveKind.R2_DOWN: 2, MoveKind.R3: 3}[k]
    _check_face(P, m.face, need)
    if len({d >> 2 for d in m.face}) != need:
        raise StaleMoveInstance(f"{k.value} site {m.face} does not meet {need} distinct vertices")


# -- surgery -----------------------------------------------------------------

def _remove(P: KnotProjection, dead: set[int], route: dict[int, int]) -> tuple[list[int], dict[int, int]]:
    """Delete the vertices in ``dead`` and reconnect the curve through them.

    ``route[e]`` is the dart by which the curve leaves the deleted region
    after entering it through ``e``.
    """
    a = P.alpha
    keep = [v for v in range(P.n) if v not in dead]
    vmap = {v: i for i, v in enumerate(keep)}
    if not keep:
        return [], vmap
    new = [0] * (4 * len(keep))
    for v in keep:
        for j in range(4):
            d = 4 * v + j
            t = a[d]
            steps = 0
            while (t >> 2) in dead:
                t = a[route[t]]
                steps += 1
                if steps > 4 * len(dead) + 2:
                    raise StaleMoveInstance("rerouting did not leave the deleted region")
            new[4 * vmap[v] + j] = 4 * vmap[t >> 2] + (t & 3)
    return new, vmap


_TRIVIAL_R2_UP: KnotProjection | None = None


def _trivial_r2_up() -> KnotProjection:
    # circle pushed across itself: two monogons, one bigon, one 4-gon
    global _TRIVIAL_R2_UP
    if _TRIVIAL_R2_UP is None:
        _TRIVIAL_R2_UP = from_signed_gauss("1+ 1+ 2+ 2+")
    return _TRIVIAL_R2_UP


def surgery(P: KnotProjection, m: MoveInstance, *, validate: bool | None = None) -> Surgery:
    check_applicable(P, m)
    if validate is None:
        validate = DEBUG
    k = m.kind
    a = list(P.alpha)
    n = P.n
    ident = {v: v for v in range(n)}

    if k is MoveKind.R1_UP:
        q = 3 if m.side == "L" else 1
        w = n
        if P.is_trivial:
            new = [0] * 4
            new[2], new[q] = q, 2
            new[q ^ 2], new[0] = 0, q ^ 2
        else:
            d = m.dart
            e = a[d]
            new = a + [0] * 4
            base = 4 * w
            new[d], new[base] = base, d
            new[base + 2], new[base + q] = base + q, base + 2
            new[base + (q ^ 2)], new[e] = e, base + (q ^ 2)
        res = KnotProjection(new, validate=validate)
        return Surgery(res, ident, (w,), ())

    if k is MoveKind.R2_UP:
        if P.is_trivial:
            return Surgery(_trivial_r2_up(), {}, (0, 1), ())
        i, j = m.corners
        fi, fj = m.face[i], m.face[j]
        ai, aj = a[fi], a[fj]
        p, q = 4 * n, 4 * (n + 1)
        new = a + [0] * 8

        def link(x: int, y: int) -> None:
            new[x], new[y] = y, x

        if i == j:
            # the start of the edge is pushed across its own end: word gains "q p p q"
            link(fi, q + 3)
            link(q + 1, p + 1)
            link(p + 3, p + 2)
            link(p + 0, q + 2)
            link(q + 0, ai)
            res = KnotProjection(new, validate=validate)
            return Surgery(res, ident, (n, n + 1), ())

        link(fi, p + 3)
        link(p + 1, q + 1)
        link(q + 3, ai)
        link(fj, q + 2)
        link(q + 0, p + 2)
        link(p + 0, aj)
        res = KnotProjection(new, validate=validate)
        return Surgery(res, ident, (n, n + 1), ())

    if k is MoveKind.R1_DOWN:
        d = m.face[0]
        d2 = sigma_inv(d)
        v = d >> 2
        x, y = d ^ 2, d2 ^ 2
        new, vmap = _remove(P, {v}, {x: y, y: x})
        res = KnotProjection(new, validate=validate) if new else TRIVIAL
        return Surgery(res, vmap, (), (v,))

    if k is MoveKind.R2_DOWN:
        d1, d2 = m.face
        h, g = a[d1], a[d2]
        route = {d1 ^ 2: h ^ 2, h ^ 2: d1 ^ 2, d2 ^ 2: g ^ 2, g ^ 2: d2 ^ 2}
        dead = {d1 >> 2, d2 >> 2}
        new, vmap = _remove(P, dead, route)
        res = KnotProjection(new, validate=validate) if new else TRIVIAL
        return Surgery(res, vmap, (), tuple(sorted(dead)))

    # R3: every line keeps its direction, the two crossings on it swap order
    new = list(a)
    ren: dict[int, int] = {}
    for c in m.face:
        x, y = c, a[c]
        ren[x ^ 2] = y
        ren[y ^ 2] = x
        new[x ^ 2], new[y ^ 2] = y ^ 2, x ^ 2
    for o, r in ren.items():
        p_ = a[o]
        tgt = ren.get(p_, p_)
        new[r] = tgt
        new[tgt] = r
    res = KnotProjection(new, validate=validate)
    return Surgery(res, ident, (), tuple(sorted(c >> 2 for c in m.face)))


def apply_move(P: KnotProjection, m: MoveInstance, *, validate: bool | None = None) -> KnotProjection:
    res = surgery(P, m, validate=validate).result
    if res.n != P.n + m.kind.delta:
        raise AssertionError(f"{m.kind.value} changed crossing count {P.n} -> {res.n}")
    return res


# -- inverses ------------------------------------------------------------------

def inverse_of(P: KnotProjection, m: MoveInstance, P2: KnotProjection) -> MoveInstance:
    """An instance on ``P2`` whose application is canonically equal to ``P``."""
    check_applicable(P, m)
    target = P.canonical_key()
    want = m.kind.inverse
    s = surgery(P, m)
    if s.result != P2 and not s.result.canonically_equal(P2):
        raise StaleMoveInstance("P2 is not the result of applying m to P")
    # candidates near the site first, then everything of the paired kind
    cands = enumerate_moves(P2, want)
    if m.kind in (MoveKind.R1_UP, MoveKind.R2_UP, MoveKind.R3):
        local = set(s.created) | {s.vmap[v] for v in s.touched if v in s.vmap}
        near = [c for c in cands if c.face and local <= {d >> 2 for d in c.face}]
        cands = near + [c for c in cands if c not in near]
    for c in cands:
        try:
            if apply_move(P2, c).canonical_key() == target:
                return c
        except StaleMoveInstance:
            continue
    raise StaleMoveInstance("no inverse instance found")


# -- text form -----------------------------------------------------------------

_FACE_RE = re.compile(r"^(R1_DOWN|R2_DOWN|R3|R2_UP)@face:(\d+)(?:,corners:(\d+),(\d+))?$")
_DART_RE = re.compile(r"^R1_UP@dart:(-?\d+),side:([LR])$")


def _face_index(P: KnotProjection, face: tuple[int, ...]) -> int:
    for f in P.faces():
        if f.darts == face:
            return f.index
    raise StaleMoveInstance(f"face {face} not found")


def format_move(P: KnotProjection, m: MoveInstance) -> str:
    if m.kind is MoveKind.R1_UP:
        return f"R1_UP@dart:{m.dart},side:{m.side}"
    idx = m.corners[0] if (P.is_trivial and m.kind is MoveKind.R2_UP) else _face_index(P, m.face)
    if m.kind is MoveKind.R2_UP:
        return f"R2_UP@face:{idx},corners:{m.corners[0]},{m.corners[1]}"
    return f"{m.kind.value}@face:{idx}"


def parse_move(P: KnotProjection, text: str) -> MoveInstance:
    text = text.strip()
    md = _DART_RE.match(text)
    if md:
        return MoveInstance(MoveKind.R1_UP, dart=int(md.group(1)), side=md.group(2))
    mf = _FACE_RE.match(text)
    if not mf:
        raise ParseError(f"bad move text {text!r}")
    kind = MoveKind(mf.group(1))
    idx = int(mf.group(2))
    if kind is MoveKind.R2_UP and P.is_trivial:
        return MoveInstance(kind, face=(), corners=(idx, idx))
    fs = P.faces()
    if idx >= len(fs):
        raise StaleMoveInstance(f"face index {idx} out of range")
    face = fs[idx].darts
    if kind is MoveKind.R2_UP:
        if mf.group(3) is None:
            raise ParseError("R2_UP needs corners")
        return MoveInstance(kind, face=face, corners=(int(mf.group(3)), int(mf.group(4))))
    return MoveInstance(kind, face=face)


def replay(P: KnotProjection, texts: Iterable[str]) -> KnotProjection:
    """Apply a sequence of text-form moves, each resolved against the current curve."""
    cur = P
    for t in texts:
        cur = apply_move(cur, parse_move(cur, t))
    return cur


def random_walk(
    P: KnotProjection,
    steps: int,
    rng,
    kinds: Iterable[MoveKind | str] = ALL_KINDS,
    *,
    max_crossings: int | None = None,
) -> list[tuple[MoveInstance, KnotProjection]]:
    """Random move sequence from ``P``: a kind uniformly among those with a site, then a site.

    ``rng`` is a :class:`random.Random`.  Kinds that would exceed
    ``max_crossings`` are skipped.  Returns (move, resulting curve) pairs.
    """
    kinds = [MoveKind(k) for k in kinds]
    out: list[tuple[MoveInstance, KnotProjection]] = []
    cur = P
    for _ in range(steps):
        avail = []
        for k in kinds:
            if max_crossings is not None and cur.n + k.delta > max_crossings:
                continue
            if k is MoveKind.R2_UP:
                avail.append(k)  # always has a site; enumerated only when picked
                continue
            ms = enumerate_moves(cur, k)
            if ms:
                avail.append(ms)
        if not avail:
            break
        pick = rng.choice(avail)
        if pick is MoveKind.R2_UP:
            pick = enumerate_moves(cur, pick)
        m = rng.choice(pick)
        cur = apply_move(cur, m)
        out.append((m, cur))
    return out
