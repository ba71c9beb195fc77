"""Seven-box certificates: verification, transport across moves, file format.

A certificate is combinatorial.  Each box is a set of crossings plus six
portals, the points where the box boundary meets the curve.  A portal sits
on the edge leaving a passage, identified by the exit dart of that passage
and a slot counting markers from that end.  All portals of one certificate
use the same direction of travel.

Ports are listed top to bottom as seen with the gaze face above the box, so
going counterclockwise around a box meets L0, L1, L2, R2, R1, R0.  The wall
from R0 to L0 lies in the gaze face and the wall from L2 to R2 in the other
starred face.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
import json
import random
from pathlib import Path
from typing import Iterable, Sequence

from .curve import KnotProjection, from_signed_gauss, parse_signed
from .errors import CertificateContradiction, MalformedCertificate, UnclassifiableCase
from .moves import MoveInstance, MoveKind, apply_move, enumerate_moves, surgery

BOX_COUNT = 7
FORMAT = "knotshadow-box-certificate"
FORMAT_VERSION = 1

# (strand at the right port of a box, strand at the left port of its successor)
ALLOWED_ARCS = frozenset({(3, 1), (2, 3), (2, 1)})


@dataclass(frozen=True, order=True)
class Portal:
    dart: int
    slot: int = 0


@dataclass(frozen=True)
class Box:
    id: int
    members: frozenset[int]
    left: tuple[Portal, Portal, Portal]
    right: tuple[Portal, Portal, Portal]
    left_labels: tuple[int, int, int]
    right_labels: tuple[int, int, int]

    def ports(self) -> list[tuple[str, int, Portal]]:
        return [("L", i, p) for i, p in enumerate(self.left)] + [("R", i, p) for i, p in enumerate(self.right)]


@dataclass(frozen=True)
class BoxCertificate:
    boxes: tuple[Box, ...]
    starred: tuple[int, int]
    gaze: int = 0

    def box(self, box_id: int) -> Box:
        for b in self.boxes:
            if b.id == box_id:
                return b
        raise KeyError(box_id)


@dataclass(frozen=True)
class Violation:
    rule: int
    detail: str

    def __str__(self) -> str:
        return f"rule {self.rule}: {self.detail}"


# -- event stream ----------------------------------------------------------------

# events are ("p", entry dart) or ("m", (box index, side, port index))
Event = tuple[str, object]


def _events(P: KnotProjection, c: BoxCertificate) -> list[Event]:
    if P.is_trivial:
        raise MalformedCertificate("the trivial projection has no edges to place portals on")
    ids = [b.id for b in c.boxes]
    if len(set(ids)) != len(ids):
        raise MalformedCertificate(f"duplicate box ids {ids}")
    seen_v: dict[int, int] = {}
    for b in c.boxes:
        for v in b.members:
            if not 0 <= v < P.n:
                raise MalformedCertificate(f"box {b.id} names vertex {v}, projection has {P.n}")
            if v in seen_v:
                raise MalformedCertificate(f"vertex {v} is in boxes {seen_v[v]} and {b.id}")
            seen_v[v] = b.id
        for lab in b.left_labels + b.right_labels:
            if lab not in (1, 2, 3):
                raise MalformedCertificate(f"box {b.id} has strand label {lab}")
    for d in c.starred:
        if not P.has_dart(d):
            raise MalformedCertificate(f"starred face corner {d} is not a dart")
    if len(c.starred) != 2 or c.gaze not in (0, 1):
        raise MalformedCertificate("need two starred faces and gaze 0 or 1")

    on_edge: dict[int, list[tuple[int, tuple]]] = {}
    for bi, b in enumerate(c.boxes):
        if len(b.left) != 3 or len(b.right) != 3:
            raise MalformedCertificate(f"box {b.id} must have three ports per side")
        for side, i, p in b.ports():
            if not P.has_dart(p.dart):
                raise MalformedCertificate(f"box {b.id} port {side}{i}: dart {p.dart} not in projection")
            on_edge.setdefault(p.dart, []).append((p.slot, (bi, side, i)))
    first = c.boxes[0].left[0].dart if c.boxes else 0
    walk = P.walk(P.alpha[first])
    exits = {e ^ 2 for e in walk}
    for d, lst in on_edge.items():
        if d not in exits:
            raise MalformedCertificate(f"portal dart {d} points against the direction of the other portals")
        slots = sorted(s for s, _ in lst)
        if slots != list(range(len(slots))):
            raise MalformedCertificate(f"slots on edge {d} are {slots}, expected 0..{len(slots) - 1}")
    out: list[Event] = []
    for e in walk:
        out.append(("p", e))
        for _, key in sorted(on_edge.get(e ^ 2, [])):
            out.append(("m", key))
    return out


@dataclass
class _Run:
    box: int
    start: tuple
    end: tuple | None = None
    passages: list[int] = field(default_factory=list)

    @property
    def label(self) -> int:
        sides = {self.start[1], self.end[1]}
        if sides == {"L"}:
            return 1
        if sides == {"R"}:
            return 2
        return 3


@dataclass
class _Scan:
    runs: list[_Run]
    outside: list[tuple[tuple, tuple]]  # (exit marker, next entry marker)
    kind: dict[tuple, str]  # marker -> "in" | "out"
    edge: dict[tuple, int]  # marker -> forward exit dart of its edge
    owner: dict[int, int]  # vertex -> box index by position
    violations: list[Violation]


def _scan(P: KnotProjection, ev: Sequence[Event], members: dict[int, int] | None, start_box: int | None = None) -> _Scan:
    """Walk the event cycle tracking which box the curve is in."""
    viol: list[Violation] = []
    if start_box is None:
        start_box = next((k[0] for t, k in ev if t == "m"), None)
    state = start_box
    runs: list[_Run] = []
    outside: list[tuple[tuple, tuple]] = []
    kind: dict[tuple, str] = {}
    edge: dict[tuple, int] = {}
    owner: dict[int, int] = {}
    cur: _Run | None = None
    head: _Run | None = None  # run cut by the start of the cycle
    last_exit: tuple | None = None
    last_dart = ev[0][1] if ev else 0
    if state is not None:
        cur = head = _Run(state, None)  # type: ignore[arg-type]
    for t, obj in ev:
        if t == "p":
            e = obj
            last_dart = e
            v = e >> 2
            if state is None:
                viol.append(Violation(3, f"double point {v} lies outside every box"))
                continue
            if members is not None and members.get(v) != state:
                viol.append(Violation(3, f"double point {v} lies inside box index {state} but is assigned to {members.get(v)}"))
            if owner.setdefault(v, state) != state:
                viol.append(Violation(2, f"double point {v} is met inside two different boxes"))
            cur.passages.append(e)
            continue
        key = obj
        edge[key] = last_dart ^ 2
        b = key[0]
        if state == b:
            kind[key] = "out"
            cur.end = key
            runs.append(cur)
            cur = None
            state = None
            last_exit = key
        elif state is None:
            kind[key] = "in"
            if last_exit is not None:
                outside.append((last_exit, key))
            else:
                head_entry = key
            state = b
            cur = _Run(b, key)
        else:
            viol.append(Violation(3, f"boundary of box index {b} is met inside box index {state}"))
            return _Scan(runs, outside, kind, edge, owner, viol)
    if state != start_box:
        viol.append(Violation(3, "the curve does not close up consistently with the box walls"))
        return _Scan(runs, outside, kind, edge, owner, viol)
    if head is not None:
        # glue the run cut at the start of the cycle
        runs = [r for r in runs if r is not head]
        cur.end = head.end
        cur.passages.extend(head.passages)
        if cur.start is None or cur.end is None:
            viol.append(Violation(3, "curve never leaves its starting box"))
            return _Scan(runs, outside, kind, edge, owner, viol)
        runs.append(cur)
    elif last_exit is not None:
        outside.append((last_exit, head_entry))
    return _Scan(runs, outside, kind, edge, owner, viol)


# -- verification ------------------------------------------------------------------

def _face_after(P: KnotProjection, sc: _Scan, key: tuple) -> int:
    """Face on the counterclockwise side of the outward ray at a portal."""
    x = sc.edge[key]
    return P.face_of[P.alpha[x]] if sc.kind[key] == "out" else P.face_of[x]


def _face_before(P: KnotProjection, sc: _Scan, key: tuple) -> int:
    x = sc.edge[key]
    return P.face_of[x] if sc.kind[key] == "out" else P.face_of[P.alpha[x]]


CCW = (("L", 0), ("L", 1), ("L", 2), ("R", 2), ("R", 1), ("R", 0))


def _euler_ok(P: KnotProjection, ev: Sequence[Event], sc: _Scan, nbox: int) -> bool:
    """Curve plus box walls must still be a planar map (Euler characteristic 2)."""
    base = P.num_darts
    idx: dict[tuple, int] = {}
    for t, k in ev:
        if t == "m":
            idx[k] = base + 4 * len(idx)
    new = list(P.alpha) + [0] * (4 * len(idx))

    def link(a: int, b: int) -> None:
        new[a], new[b] = b, a

    def off(k: tuple) -> dict[str, int]:
        d = idx[k]
        if sc.kind[k] == "out":
            return {"fwd": d, "next": d + 1, "bwd": d + 2, "prev": d + 3}
        return {"fwd": d, "prev": d + 1, "bwd": d + 2, "next": d + 3}

    chain: dict[int, list[tuple]] = {}
    for t, k in ev:
        if t == "m":
            chain.setdefault(sc.edge[k], []).append(k)
    for x, ks in chain.items():
        y = P.alpha[x]
        prev = x
        for k in ks:
            o = off(k)
            link(prev, o["bwd"])
            prev = o["fwd"]
        link(prev, y)
    for bi in range(nbox):
        for a, b in zip(CCW, CCW[1:] + CCW[:1]):
            link(off((bi, *a))["next"], off((bi, *b))["prev"])
    seen = bytearray(len(new))
    faces = 0
    for d in range(len(new)):
        if seen[d]:
            continue
        faces += 1
        e = d
        while not seen[e]:
            seen[e] = 1
            x = new[e]
            e = (x & ~3) | ((x + 1) & 3)
    V = len(new) // 4
    E = len(new) // 2
    return V - E + faces == 2


def rule1_face_ok(P: KnotProjection, face: int, marked_edges: set[int]) -> tuple[bool, str]:
    """Reading of the starred-face rule: at least four distinct double points
    on the boundary and at least four sides that leave some box.

    Wall containment is checked separately by the caller.
    """
    f = P.faces()[face]
    if f.distinct_vertices < 4:
        return False, f"starred face {face} has {f.distinct_vertices} distinct double points"
    sides = sum(1 for d in f.darts if d in marked_edges or P.alpha[d] in marked_edges)
    if sides < 4:
        return False, f"starred face {face} has {sides} sides partially outside boxes"
    return True, ""


def verify_certificate(P: KnotProjection, c: BoxCertificate, *, box_count: int = BOX_COUNT) -> list[Violation]:
    """All violations of the box rules; empty means the certificate holds.

    Raises MalformedCertificate when the certificate does not refer to
    valid parts of ``P`` or its stored strand labels disagree with the ones
    its portals imply.
    """
    viol: list[Violation] = []
    if P.n < 2 * box_count:
        viol.append(Violation(2, f"{P.n} double points cannot give 2 per box in {box_count} boxes"))
    if len(c.boxes) != box_count:
        viol.append(Violation(2, f"certificate has {len(c.boxes)} boxes, expected {box_count}"))
    if P.is_trivial:
        return viol or [Violation(2, "trivial projection")]
    ev = _events(P, c)
    nb = len(c.boxes)
    members = {v: bi for bi, b in enumerate(c.boxes) for v in b.members}
    for v in range(P.n):
        if v not in members:
            viol.append(Violation(3, f"double point {v} is not assigned to any box"))
    sc = _scan(P, ev, members)
    viol += sc.violations
    if sc.violations:
        return viol

    # rule 2: strand pattern and strand 1 x strand 2 count
    lab: dict[tuple, int] = {}
    runs_of: dict[int, list[_Run]] = {}
    for r in sc.runs:
        runs_of.setdefault(r.box, []).append(r)
        lab[r.start] = lab[r.end] = r.label
    for bi, b in enumerate(c.boxes):
        rs = runs_of.get(bi, [])
        got = sorted(r.label for r in rs)
        if got != [1, 2, 3]:
            viol.append(Violation(2, f"box {b.id} strand pattern is {got}, expected [1, 2, 3]"))
            continue
        where: dict[int, list[int]] = {}
        for r in rs:
            for e in r.passages:
                where.setdefault(e >> 2, []).append(r.label)
        x12 = sum(1 for ls in where.values() if sorted(ls) == [1, 2])
        if x12 != 2:
            viol.append(Violation(2, f"strands 1 and 2 of box {b.id} meet in {x12} double points"))

    # box walls must run through faces without meeting the curve
    for bi, b in enumerate(c.boxes):
        for a, z in zip(CCW, CCW[1:] + CCW[:1]):
            if _face_after(P, sc, (bi, *a)) != _face_before(P, sc, (bi, *z)):
                viol.append(Violation(2, f"wall {a[0]}{a[1]}-{z[0]}{z[1]} of box {b.id} would cross the curve"))
    if not viol and not _euler_ok(P, ev, sc, nb):
        viol.append(Violation(2, "boxes cannot be drawn disjointly on the sphere"))

    # rule 3: wiring between boxes
    succ: dict[int, set[int]] = {}
    for p, q in sc.outside:
        if p[1] == q[1]:
            viol.append(Violation(3, f"outside arc joins side {p[1]} of box {c.boxes[p[0]].id} to side {q[1]} of box {c.boxes[q[0]].id}"))
            continue
        rp, lp = (p, q) if p[1] == "R" else (q, p)
        if rp[0] == lp[0]:
            viol.append(Violation(3, f"outside arc returns to box {c.boxes[rp[0]].id}"))
            continue
        succ.setdefault(rp[0], set()).add(lp[0])
        pair = (lab.get(rp), lab.get(lp))
        if None not in pair and pair not in ALLOWED_ARCS:
            viol.append(Violation(3, f"outside arc joins strand {pair[0]} of box {c.boxes[rp[0]].id} to strand {pair[1]} of box {c.boxes[lp[0]].id}"))
    if all(len(s) == 1 for s in succ.values()) and len(succ) == nb:
        nxt = {a: next(iter(s)) for a, s in succ.items()}
        cyc, x = 0, 0
        while True:
            x = nxt[x]
            cyc += 1
            if x == 0 or cyc > nb:
                break
        if cyc != nb:
            viol.append(Violation(3, "outside arcs do not link the boxes into a single ring"))
    else:
        viol.append(Violation(3, "right ports of a box do not all lead to one adjacent box"))

    # rule 1: starred faces
    top = {_face_after(P, sc, (bi, "R", 0)) for bi in range(nb)}
    bot = {_face_after(P, sc, (bi, "L", 2)) for bi in range(nb)}
    if len(top) != 1 or len(bot) != 1 or top == bot:
        viol.append(Violation(1, f"top walls lie in faces {sorted(top)}, bottom walls in {sorted(bot)}"))
    else:
        T, B = top.pop(), bot.pop()
        fs = (P.face_of[c.starred[c.gaze]], P.face_of[c.starred[1 - c.gaze]])
        if fs != (T, B):
            viol.append(Violation(1, f"starred faces {fs} are not the wall faces {(T, B)}"))
        marked = set(sc.edge.values())
        for F in (T, B):
            ok, why = rule1_face_ok(P, F, marked)
            if not ok:
                viol.append(Violation(1, why))

    if not viol:
        for bi, b in enumerate(c.boxes):
            got_l = tuple(lab[(bi, "L", i)] for i in range(3))
            got_r = tuple(lab[(bi, "R", i)] for i in range(3))
            if got_l != b.left_labels or got_r != b.right_labels:
                raise MalformedCertificate(
                    f"box {b.id} stores strand labels {b.left_labels}/{b.right_labels}, ports imply {got_l}/{got_r}"
                )
    return viol


# -- building certificates from event streams -----------------------------------------

def certificate_from_events(
    P: KnotProjection, ev: Sequence[Event], box_ids: Sequence[int], gaze: int = 0, start_box: int | None = None
) -> BoxCertificate:
    """Certificate whose portals sit at the marker positions of ``ev``.

    Members and strand labels are read off the stream; the starred faces are
    the faces holding the top and bottom walls.
    """
    sc = _scan(P, ev, None, start_box)
    if sc.violations:
        raise MalformedCertificate("; ".join(map(str, sc.violations)))
    port: dict[tuple, Portal] = {}
    slot = 0
    last = None
    for t, obj in ev:
        if t == "p":
            last = obj ^ 2
            slot = 0
        else:
            port[obj] = Portal(last, slot)
            slot += 1
    lab: dict[tuple, int] = {}
    for r in sc.runs:
        lab[r.start] = lab[r.end] = r.label
    members: dict[int, set[int]] = {bi: set() for bi in range(len(box_ids))}
    for v, bi in sc.owner.items():
        members[bi].add(v)
    boxes = []
    for bi, bid in enumerate(box_ids):
        boxes.append(Box(
            bid,
            frozenset(members[bi]),
            tuple(port[(bi, "L", i)] for i in range(3)),
            tuple(port[(bi, "R", i)] for i in range(3)),
            tuple(lab.get((bi, "L", i), 0) for i in range(3)),
            tuple(lab.get((bi, "R", i), 0) for i in range(3)),
        ))
    top = _face_after(P, sc, (0, "R", 0))
    bot = _face_after(P, sc, (0, "L", 2))
    rep = lambda f: min(P.faces()[f].darts)  # noqa: E731
    starred = (rep(top), rep(bot)) if gaze == 0 else (rep(bot), rep(top))
    return BoxCertificate(tuple(boxes), starred, gaze)


# -- transport ---------------------------------------------------------------------

def _interleavings(fixed: list, extra: list) -> Iterable[list]:
    n = len(fixed) + len(extra)
    for pos in combinations(range(n), len(extra)):
        out, fi, xi = [], 0, 0
        ps = set(pos)
        for i in range(n):
            if i in ps:
                out.append(extra[xi])
                xi += 1
            else:
                out.append(fixed[fi])
                fi += 1
        yield out


def _gap_ok(seq: list[Event], state: int, end_state: int, assign: dict[int, int]) -> dict[int, int] | None:
    a = dict(assign)
    for t, obj in seq:
        if t == "m":
            b = obj[0]
            if state == b:
                state = None
            elif state is None:
                state = b
            else:
                return None
        else:
            if state is None:
                return None
            v = obj >> 2
            if a.setdefault(v, state) != state:
                return None
    return a if state == end_state else None


def classify_move(P: KnotProjection, c: BoxCertificate, m: MoveInstance) -> str:
    """Which case of the induction a move falls under.

    Raises CertificateContradiction for a monogon removal whose loop leaves a
    box, and UnclassifiableCase when no case applies.
    """
    ev = _events(P, c)
    marked: dict[int, int] = {}
    last = None
    for t, obj in ev:
        if t == "p":
            last = obj ^ 2
        else:
            marked[last] = marked.get(last, 0) + 1
    members = {v: b.id for b in c.boxes for v in b.members}
    if m.kind is MoveKind.R1_UP:
        if marked.get(m.dart, 0) or marked.get(P.alpha[m.dart], 0):
            return "kink on a boundary arc"
        return "within box"
    if m.kind is MoveKind.R1_DOWN:
        d = m.face[0]
        if marked.get(d, 0) or marked.get(P.alpha[d], 0):
            raise CertificateContradiction(f"monogon at double point {d >> 2} meets a box wall")
        return "within box"
    if m.kind is MoveKind.R3:
        vs = sorted({d >> 2 for d in m.face})
        bs = [members.get(v) for v in vs]
        if all(b is None for b in bs):
            raise UnclassifiableCase("no vertex of the trigon is inside a box")
        sides = sum(1 for d in m.face if marked.get(d, 0) or marked.get(P.alpha[d], 0))
        k = len(set(bs))
        if k == 1 and sides == 0:
            return "within box"
        if k == 2:
            return "case 1"
        if k == 3:
            return "case 2"
        raise UnclassifiableCase(f"trigon {vs} in boxes {bs} with {sides} walled sides")
    raise UnclassifiableCase(f"{m.kind.value} is not a (1,3) move")


def transport_with_case(P: KnotProjection, c: BoxCertificate, m: MoveInstance, *, box_count: int = BOX_COUNT) -> tuple[BoxCertificate, str]:
    """Certificate for the result of ``m`` together with the case it fell under.

    A trigon that is not inside one box is first pulled into one by pushing
    walls across its corners (sphere isotopy of the boxes); the move is then
    carried out inside that box.
    """
    case = classify_move(P, c, m)
    if m.kind is MoveKind.R3 and case != "within box":
        c = _gather_trigon(P, c, m, box_count)
    return _transport_local(P, c, m, box_count), case


def _transport_local(P: KnotProjection, c: BoxCertificate, m: MoveInstance, box_count: int) -> BoxCertificate:
    s = surgery(P, m)
    Q = s.result
    ev = _events(P, c)
    touched = set(s.touched)
    inv = {w: v for v, w in s.vmap.items() if v not in touched}
    members = {v: bi for bi, b in enumerate(c.boxes) for v in b.members}

    # split the old stream at untouched passages
    anchors: list[int] = []  # old entry darts
    old_gaps: list[list[Event]] = []  # markers and touched passages after each anchor
    lead: list[Event] = []
    for t, obj in ev:
        if t == "p" and (obj >> 2) not in touched:
            anchors.append(obj)
            old_gaps.append([])
        elif anchors:
            old_gaps[-1].append((t, obj))
        else:
            lead.append((t, obj))
    if not anchors:
        raise UnclassifiableCase("every passage is touched by the move")
    old_gaps[-1].extend(lead)

    def new_dart(d: int) -> int:
        return 4 * s.vmap[d >> 2] + (d & 3)

    walk = Q.walk(new_dart(anchors[0]))
    new_anchors = [e for e in walk if (e >> 2) in inv]
    if new_anchors != [new_dart(a) for a in anchors]:
        raise UnclassifiableCase("untouched passages changed order")
    new_gaps: list[list[int]] = []
    for e in walk:
        if (e >> 2) in inv:
            new_gaps.append([])
        else:
            new_gaps[-1].append(e)

    # candidate orderings per gap, cheapest first
    box_of_anchor = [members[a >> 2] for a in anchors]
    per_gap: list[list[tuple[int, list[Event]]]] = []
    for g, (old, new) in enumerate(zip(old_gaps, new_gaps)):
        marks = [x for x in old if x[0] == "m"]
        extra = [("p", e) for e in new]
        if not extra:
            per_gap.append([(0, marks)])
            continue
        before: dict[tuple[int, int], int] = {}
        occ: dict[int, int] = {}
        cnt = 0
        for t, obj in old:
            if t == "m":
                cnt += 1
            else:
                w = s.vmap.get(obj >> 2, -1)
                k = occ.get(w, 0)
                occ[w] = k + 1
                before[(w, k)] = cnt
        opts = []
        for seq in _interleavings(marks, extra):
            cost, cnt, occ = 0, 0, {}
            for t, obj in seq:
                if t == "m":
                    cnt += 1
                else:
                    w = obj >> 2
                    k = occ.get(w, 0)
                    occ[w] = k + 1
                    cost += abs(before.get((w, k), 0) - cnt)
            opts.append((cost, seq))
        opts.sort(key=lambda x: x[0])
        per_gap.append(opts)

    ids = [b.id for b in c.boxes]
    flex = [g for g, o in enumerate(per_gap) if len(o) > 1]
    base_assign = {}
    tried = 0

    def search(i: int, chosen: dict[int, list[Event]], assign: dict[int, int]):
        nonlocal tried
        if i == len(flex):
            stream: list[Event] = []
            for g, a in enumerate(new_anchors):
                stream.append(("p", a))
                stream.extend(chosen.get(g, per_gap[g][0][1]))
            tried += 1
            try:
                cand = certificate_from_events(Q, stream, ids, c.gaze, box_of_anchor[0])
            except MalformedCertificate:
                return None
            if not verify_certificate(Q, cand, box_count=box_count):
                return cand
            return None
        g = flex[i]
        nxt_box = box_of_anchor[(g + 1) % len(anchors)]
        for _, seq in per_gap[g]:
            a2 = _gap_ok(seq, box_of_anchor[g], nxt_box, assign)
            if a2 is None:
                continue
            chosen[g] = seq
            r = search(i + 1, chosen, a2)
            if r is not None:
                return r
        chosen.pop(g, None)
        return None

    out = search(0, {}, base_assign)
    if out is None:
        raise UnclassifiableCase(f"no box redefinition verifies after {m.kind.value} ({tried} tried)")
    return out



def _rotate(ev: list[Event]) -> list[Event]:
    i = next(i for i, e in enumerate(ev) if e[0] == "p")
    return ev[i:] + ev[:i]


def _pushes(ev: list[Event], v: int) -> Iterable[list[Event]]:
    """Streams with one wall pushed across double point ``v``.

    The nearest portals on both passages through ``v`` are slid past it.
    Where the lines cross, the two portals may trade places along the wall,
    so both assignments are produced.
    """
    L = len(ev)
    at = [i for i, (t, o) in enumerate(ev) if t == "p" and o >> 2 == v]
    if len(at) != 2:
        return
    for d1 in (-1, 1):
        for d2 in (-1, 1):
            i1, i2 = (at[0] + d1) % L, (at[1] + d2) % L
            a, b = ev[i1], ev[i2]
            if a[0] != "m" or b[0] != "m" or i1 == i2 or a[1][0] != b[1][0]:
                continue
            for swap in (False, True):
                new = list(ev)
                new[at[0]], new[i1] = ev[i1], ev[at[0]]
                new[at[1]], new[i2] = ev[i2], ev[at[1]]
                if swap:
                    new[at[0]], new[at[1]] = new[at[1]], new[at[0]]
                yield _rotate(new)


def _trigon_inside(P: KnotProjection, ev: list[Event], m: MoveInstance) -> bool:
    sc = _scan(P, ev, None)
    if sc.violations:
        return False
    boxes = {sc.owner.get(d >> 2) for d in m.face}
    if len(boxes) != 1 or None in boxes:
        return False
    marked = set(sc.edge.values())
    return not any(d in marked or P.alpha[d] in marked for d in m.face)


def _gather_trigon(P: KnotProjection, c: BoxCertificate, m: MoveInstance, box_count: int, depth: int = 4) -> BoxCertificate:
    """Push walls across trigon corners until the trigon lies in one box."""
    ids = [b.id for b in c.boxes]
    start = _events(P, c)
    vs = sorted({d >> 2 for d in m.face})
    seen = {tuple(start)}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for ev in frontier:
            for v in vs:
                for new in _pushes(ev, v):
                    key = tuple(new)
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append(new)
                    if not _trigon_inside(P, new, m):
                        continue
                    try:
                        cand = certificate_from_events(P, new, ids, c.gaze)
                    except MalformedCertificate:
                        continue
                    if not verify_certificate(P, cand, box_count=box_count):
                        return cand
        frontier = nxt
    raise UnclassifiableCase(f"trigon {vs} cannot be pulled into one box within {depth} wall pushes")


def transport_certificate(P: KnotProjection, c: BoxCertificate, m: MoveInstance, *, box_count: int = BOX_COUNT) -> BoxCertificate:
    return transport_with_case(P, c, m, box_count=box_count)[0]


# -- nontriviality ----------------------------------------------------------------------

@dataclass
class NontrivialityReport:
    nontrivial: bool
    floor: int | None
    violations: list[Violation]
    box_count: int = BOX_COUNT

    def to_tree(self) -> dict:
        if self.nontrivial:
            return {
                "nontrivial": True,
                "conclusion": "not (1,3)-homotopic to the trivial projection",
                "reason": f"the {self.box_count}-box certificate verifies, and the box rules are preserved by every RI and RIII move",
                "crossing_floor": self.floor,
                "floor_reason": f"2 strand-1/strand-2 double points in each of {self.box_count} boxes",
            }
        return {"nontrivial": None, "conclusion": "no conclusion", "violations": [str(v) for v in self.violations]}


def assert_nontrivial(P: KnotProjection, c: BoxCertificate, *, box_count: int = BOX_COUNT) -> NontrivialityReport:
    try:
        viol = verify_certificate(P, c, box_count=box_count)
    except MalformedCertificate as e:
        viol = [Violation(2, f"malformed certificate: {e}")]
    if viol:
        return NontrivialityReport(False, None, viol, box_count)
    return NontrivialityReport(True, 2 * box_count, [], box_count)


# -- file format ------------------------------------------------------------------------

def _positions(P: KnotProjection) -> tuple[list[int], dict[int, int], list[tuple[int, int]]]:
    walk = P.walk(0)
    word = P.code().word
    occ: dict[int, int] = {}
    where = []
    for lab in word:
        occ[lab] = occ.get(lab, 0) + 1
        where.append((lab, occ[lab]))
    index = {e: k for k, e in enumerate(walk)}
    return walk, index, where


def certificate_to_tree(P: KnotProjection, c: BoxCertificate) -> dict:
    """Serialize relative to ``P.code()``: positions are (label, occurrence, slot).

    A portal lies on the edge leaving the given occurrence of the label, in
    the direction of the code; the slot counts portals along that edge.
    Portals must run along the code direction.
    """
    walk, index, where = _positions(P)
    fwd = {e ^ 2 for e in walk}

    def pos(p: Portal) -> list[int]:
        if p.dart not in fwd:
            raise MalformedCertificate("portals run against the code direction")
        lab, occ = where[index[p.dart ^ 2]]
        return [lab, occ, p.slot]

    def corner(d: int) -> list:
        # face to the right of d -> alpha(d); express via the passage leaving along that edge
        if d in fwd:
            lab, occ = where[index[d ^ 2]]
            return [lab, occ, "right"]
        lab, occ = where[index[P.alpha[d] ^ 2]]
        return [lab, occ, "left"]

    vlabel = {e >> 2: where[k][0] for k, e in enumerate(walk)}

    return {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "code": str(P.code()),
        "gaze": c.gaze,
        "starred": [corner(d) for d in c.starred],
        "boxes": [
            {
                "id": b.id,
                "members": sorted(vlabel[v] for v in b.members),
                "left": [pos(p) for p in b.left],
                "right": [pos(p) for p in b.right],
                "left_strands": list(b.left_labels),
                "right_strands": list(b.right_labels),
            }
            for b in c.boxes
        ],
    }


def certificate_from_tree(tree: dict, P: KnotProjection | None = None) -> tuple[KnotProjection, BoxCertificate]:
    """Parse a certificate tree.

    With ``P`` given, the certificate is carried over to ``P`` through an
    orientation-preserving isomorphism from the stored code's curve.
    """
    try:
        if tree.get("format") != FORMAT:
            raise MalformedCertificate(f"unknown certificate format {tree.get('format')!r}")
        if tree.get("version") != FORMAT_VERSION:
            raise MalformedCertificate(f"unsupported certificate version {tree.get('version')!r}")
        R = from_signed_gauss(parse_signed(tree["code"]))
        walk, _, where = _positions(R)
        at = {w: walk[k] for k, w in enumerate(where)}

        def entry(lab: int, occ: int) -> int:
            if (lab, occ) not in at:
                raise MalformedCertificate(f"no occurrence {occ} of label {lab}")
            return at[(lab, occ)]

        def portal(x) -> Portal:
            lab, occ, slot = (int(t) for t in x)
            return Portal(entry(lab, occ) ^ 2, slot)

        def corner(x) -> int:
            lab, occ, side = int(x[0]), int(x[1]), x[2]
            d = entry(lab, occ) ^ 2
            if side == "right":
                return d
            if side == "left":
                return R.alpha[d]
            raise MalformedCertificate(f"corner side must be left or right, got {side!r}")

        boxes = []
        for b in tree["boxes"]:
            mem = frozenset(entry(int(l), 1) >> 2 for l in b["members"])
            boxes.append(Box(
                int(b["id"]), mem,
                tuple(portal(x) for x in b["left"]),
                tuple(portal(x) for x in b["right"]),
                tuple(int(x) for x in b["left_strands"]),
                tuple(int(x) for x in b["right_strands"]),
            ))
        c = BoxCertificate(tuple(boxes), tuple(corner(x) for x in tree["starred"]), int(tree["gaze"]))
    except MalformedCertificate:
        raise
    except Exception as e:  # missing keys, wrong types
        raise MalformedCertificate(f"bad certificate tree: {e}") from e
    if P is None or P == R:
        return R, c
    return P, carry_certificate(R, c, P)


def isomorphism(R: KnotProjection, P: KnotProjection) -> dict[int, int] | None:
    """Dart map R -> P preserving the rotation, or None."""
    if R.n != P.n:
        return None
    if R.is_trivial:
        return {}
    wr = R.walk(0)
    target = R.code()
    for s in range(P.num_darts):
        if P.code(s) != target:
            continue
        wp = P.walk(s)
        dm = {}
        for a, b in zip(wr, wp):
            dm[a], dm[a ^ 2] = b, b ^ 2
        if all(dm[R.alpha[d]] == P.alpha[dm[d]] for d in dm):
            return dm
    return None


def carry_certificate(R: KnotProjection, c: BoxCertificate, P: KnotProjection) -> BoxCertificate:
    dm = isomorphism(R, P)
    if dm is None:
        if isomorphism(R.mirror(), P) is not None or isomorphism(R, P.mirror()) is not None:
            raise MalformedCertificate("curve matches the certificate only as a mirror image")
        raise MalformedCertificate("curve does not match the certificate's code")
    boxes = tuple(
        replace(
            b,
            members=frozenset(dm[4 * v] >> 2 for v in b.members),
            left=tuple(Portal(dm[p.dart], p.slot) for p in b.left),
            right=tuple(Portal(dm[p.dart], p.slot) for p in b.right),
        )
        for b in c.boxes
    )
    return BoxCertificate(boxes, tuple(dm[d] for d in c.starred), c.gaze)


def save_certificate(path: str | Path, P: KnotProjection, c: BoxCertificate) -> None:
    Path(path).write_text(json.dumps(certificate_to_tree(P, c), indent=1) + "\n")


def load_certificate(path: str | Path, P: KnotProjection | None = None) -> tuple[KnotProjection, BoxCertificate]:
    try:
        tree = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise MalformedCertificate(f"cannot read certificate {path}: {e}") from e
    return certificate_from_tree(tree, P)


# -- testing harnesses ---------------------------------------------------------------

def mutate(P: KnotProjection, c: BoxCertificate, rng: random.Random) -> tuple[BoxCertificate, str]:
    """One random single-element change to a certificate."""
    kind = rng.choice(["vertex", "swap", "move", "gaze"])
    boxes = list(c.boxes)
    if kind == "gaze":
        return replace(c, gaze=1 - c.gaze), "gaze flipped"
    if kind == "vertex":
        src = rng.choice([i for i, b in enumerate(boxes) if b.members])
        v = rng.choice(sorted(boxes[src].members))
        dst = rng.choice([i for i in range(len(boxes)) if i != src])
        boxes[src] = replace(boxes[src], members=boxes[src].members - {v})
        boxes[dst] = replace(boxes[dst], members=boxes[dst].members | {v})
        return replace(c, boxes=tuple(boxes)), f"vertex {v} moved from box {boxes[src].id} to {boxes[dst].id}"
    slots = [(i, s, k) for i in range(len(boxes)) for s in "LR" for k in range(3)]

    def get(i, s, k):
        b = boxes[i]
        return (b.left if s == "L" else b.right)[k], (b.left_labels if s == "L" else b.right_labels)[k]

    def put(i, s, k, p, lab):
        b = boxes[i]
        ps = list(b.left if s == "L" else b.right)
        ls = list(b.left_labels if s == "L" else b.right_labels)
        ps[k], ls[k] = p, lab
        if s == "L":
            boxes[i] = replace(b, left=tuple(ps), left_labels=tuple(ls))
        else:
            boxes[i] = replace(b, right=tuple(ps), right_labels=tuple(ls))

    if kind == "swap":
        a, b = rng.sample(slots, 2)
        pa, la = get(*a)
        pb, lb = get(*b)
        put(*a, pb, lb)
        put(*b, pa, la)
        return replace(c, boxes=tuple(boxes)), f"ports {a} and {b} swapped"
    # move a portal to the end of another edge in the same direction
    a = rng.choice(slots)
    pa, la = get(*a)
    walk = P.walk(P.alpha[c.boxes[0].left[0].dart])
    exits = [e ^ 2 for e in walk if (e ^ 2) != pa.dart]
    d = rng.choice(exits)
    used = sum(1 for b in boxes for _, _, p in b.ports() if p.dart == d)
    # close the slot gap left behind
    for i, s, k in slots:
        p, l = get(i, s, k)
        if p.dart == pa.dart and p.slot > pa.slot:
            put(i, s, k, Portal(p.dart, p.slot - 1), l)
    put(*a, Portal(d, used), la)
    return replace(c, boxes=tuple(boxes)), f"port {a} moved to edge {d}"


@dataclass
class ReplayResult:
    seed: int
    steps: int
    ok: bool
    cases: dict[str, int]
    final_crossings: int
    min_crossings: int
    failure: str | None = None

    def to_tree(self) -> dict:
        return {
            "seed": self.seed, "steps": self.steps, "ok": self.ok, "cases": dict(sorted(self.cases.items())),
            "final_crossings": self.final_crossings, "min_crossings": self.min_crossings, "failure": self.failure,
        }


def replay_induction(
    P: KnotProjection, c: BoxCertificate, steps: int, seed: int, *, extra_crossings: int = 6, box_count: int = BOX_COUNT
) -> ReplayResult:
    """Random (1,3) walk with certificate transport and verification at every step.

    Each step picks a move kind uniformly among those with a site, then a
    site uniformly; kinks are not added once the walk is ``extra_crossings``
    above the start.
    """
    rng = random.Random(seed)
    cap = P.n + extra_crossings
    cases: dict[str, int] = {}
    lo = P.n
    cur, cert = P, c
    for step in range(steps):
        opts = {}
        for k in (MoveKind.R1_UP, MoveKind.R1_DOWN, MoveKind.R3):
            if k is MoveKind.R1_UP and cur.n >= cap:
                continue
            ms = enumerate_moves(cur, k)
            if ms:
                opts[k] = ms
        k = rng.choice(sorted(opts, key=lambda x: x.value))
        m = rng.choice(opts[k])
        try:
            cert, case = transport_with_case(cur, cert, m, box_count=box_count)
        except (CertificateContradiction, UnclassifiableCase, MalformedCertificate) as e:
            return ReplayResult(seed, step, False, cases, cur.n, lo, f"{type(e).__name__}: {e}")
        cur = apply_move(cur, m)
        cases[f"{k.value}: {case}"] = cases.get(f"{k.value}: {case}", 0) + 1
        lo = min(lo, cur.n)
        viol = verify_certificate(cur, cert, box_count=box_count)
        if viol or cur.is_trivial:
            return ReplayResult(seed, step + 1, False, cases, cur.n, lo, "; ".join(map(str, viol)) or "reached trivial")
    return ReplayResult(seed, steps, True, cases, cur.n, lo)
