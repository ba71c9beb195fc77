"""Polyline construction of ring-of-boxes curves.

Each box is a (3,3)-tangle drawn in a 10x6 rectangle with ports at heights
5, 3, 1 on both sides.  Boxes sit side by side; equal-height ports of
neighbouring boxes are joined by straight arcs and the last box is joined to
the first by nested loops around the whole row.  The closed polyline is then
intersected with itself to read off the signed Gauss code, and every port
crossing is kept as a marker so a box certificate can be produced.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

PORT_Y = (5, 3, 1)
WIDTH = 10
PITCH = 14

Point = tuple[Fraction, Fraction]


def _pts(*xy: tuple[float, float]) -> list[Point]:
    return [(Fraction(x).limit_denominator(10**6), Fraction(y).limit_denominator(10**6)) for x, y in xy]


@dataclass
class BoxDrawing:
    """Strands of one box as polylines between ports.

    ``strands[label]`` runs between two ports given as ``(side, index)`` with
    side in "LR" and index 0..2 counted from the top.
    """

    strands: dict[int, tuple[tuple[str, int], tuple[str, int], list[Point]]]


def _dips(count: int, x0: float = 0.5, x1: float = 3.7, top: float = 5, low: float = 2.2) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    if count == 0:
        return out
    w = (x1 - x0) / count
    for k in range(count):
        xs = x0 + k * w
        out += [(xs, top), (xs + 0.45 * w, low), (xs + 0.9 * w, top)]
    return out


def top_box(dips: int = 0) -> BoxDrawing:
    """Strand 3 along the top, strand 1 hooked on the left, strand 2 on the right.

    Strands 1 and 2 cross twice; each dip adds two strand 3 / strand 1 crossings.
    """
    s3 = _pts((0, 5), *_dips(dips), (WIDTH, 5))
    s1 = _pts((0, 3), (6, 3.2), (6, 0.8), (0, 1))
    s2 = _pts((WIDTH, 3), (4, 2.6), (4, 1.4), (WIDTH, 1))
    return BoxDrawing({1: (("L", 1), ("L", 2), s1), 2: (("R", 1), ("R", 2), s2), 3: (("L", 0), ("R", 0), s3)})


def bottom_box(dips: int = 0) -> BoxDrawing:
    """The top box reflected upside down."""
    t = top_box(dips)
    flip = {0: 2, 1: 1, 2: 0}
    out = {}
    for lab, (a, b, pts) in t.strands.items():
        out[lab] = ((a[0], flip[a[1]]), (b[0], flip[b[1]]), [(x, 6 - y) for x, y in pts])
    return BoxDrawing(out)


def shift_box() -> BoxDrawing:
    """Strand 3 enters at middle height, leaves at the top and crosses strand 1 once."""
    s1 = _pts((0, 5), (6, 5.2), (6, 0.8), (0, 1))
    s2 = _pts((WIDTH, 3), (4, 2.6), (4, 1.4), (WIDTH, 1))
    s3 = _pts((0, 3), (5, 3.8), (8, 4.4), (WIDTH, 5))
    return BoxDrawing({1: (("L", 0), ("L", 2), s1), 2: (("R", 1), ("R", 2), s2), 3: (("L", 1), ("R", 0), s3)})


@dataclass
class Traced:
    """Result of tracing a drawing: word, signs and port markers in curve order.

    ``events`` lists ``("p", position)`` for the position-th passage of the
    word and ``("m", (box, side, index))`` for a port, in traversal order,
    starting with passage 0.
    """

    word: list[int]
    signs: list[int]
    events: list[tuple[str, object]]


def _seg_cross(p, q, r, s):
    """Parameters (t, u) of a proper crossing of segments pq and rs, else None."""
    d1 = (q[0] - p[0], q[1] - p[1])
    d2 = (s[0] - r[0], s[1] - r[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        return None
    w = (r[0] - p[0], r[1] - p[1])
    t = (w[0] * d2[1] - w[1] * d2[0]) / den
    u = (w[0] * d1[1] - w[1] * d1[0]) / den
    if 0 <= t <= 1 and 0 <= u <= 1:
        if t in (0, 1) or u in (0, 1):
            raise ValueError("drawing is not in general position")
        return t, u
    return None


def trace_ring(boxes: list[BoxDrawing]) -> Traced:
    k = len(boxes)
    # pieces keyed by endpoint ports: ((box, side, idx), (box, side, idx), points)
    pieces = []
    for i, b in enumerate(boxes):
        ox = PITCH * i
        for a, c, pts in b.strands.values():
            pieces.append(((i, *a), (i, *c), [(x + ox, y) for x, y in pts]))
    xr = PITCH * (k - 1) + WIDTH
    for idx, y in enumerate(PORT_Y):
        for i in range(k - 1):
            pieces.append(((i, "R", idx), (i + 1, "L", idx), _pts((PITCH * i + WIDTH, y), (PITCH * (i + 1), y))))
        e = 1 + 0.5 * y
        pieces.append(((k - 1, "R", idx), (0, "L", idx), _pts((xr, y), (xr + e, y), (xr + e, -e), (-e, -e), (-e, y), (0, y))))

    at: dict[tuple, list[int]] = {}
    for n, (a, c, _) in enumerate(pieces):
        at.setdefault(a, []).append(n)
        at.setdefault(c, []).append(n)
    if any(len(v) != 2 for v in at.values()):
        raise ValueError("port is not used exactly twice")

    # walk the closed curve
    path: list[Point] = []
    marks: list[tuple[int, tuple]] = []  # (index into path, port)
    used = set()
    port = pieces[0][0]
    piece = 0
    while piece not in used:
        used.add(piece)
        a, c, pts = pieces[piece]
        if a != port:
            pts = pts[::-1]
            a, c = c, a
        marks.append((len(path), port))
        path.extend(pts[:-1])
        port = c
        nxt = [p for p in at[port] if p != piece]
        piece = nxt[0]
    if len(used) != len(pieces):
        raise ValueError("drawing has more than one component")

    m = len(path)
    segs = [(path[j], path[(j + 1) % m]) for j in range(m)]
    hits: list[tuple[Fraction, int]] = []  # (curve parameter, crossing id)
    dirs: dict[int, list] = {}
    cid = 0
    for j in range(m):
        for l in range(j + 1, m):
            if l == j + 1 or (j == 0 and l == m - 1):
                continue
            r = _seg_cross(*segs[j], *segs[l])
            if r is None:
                continue
            t, u = r
            hits.append((j + t, cid))
            hits.append((l + u, cid))
            dj = (segs[j][1][0] - segs[j][0][0], segs[j][1][1] - segs[j][0][1])
            dl = (segs[l][1][0] - segs[l][0][0], segs[l][1][1] - segs[l][0][1])
            dirs[cid] = [(j + t, dj), (l + u, dl)]
            cid += 1

    events: list[tuple[Fraction, str, object]] = [(Fraction(pos), "m", p) for pos, p in marks]
    events += [(pos, "x", c) for pos, c in hits]
    events.sort(key=lambda e: e[0])
    first = next(i for i, e in enumerate(events) if e[1] == "x")
    events = events[first:] + events[:first]

    label: dict[int, int] = {}
    word: list[int] = []
    out: list[tuple[str, object]] = []
    for _, kind, obj in events:
        if kind == "m":
            out.append(("m", obj))
            continue
        if obj not in label:
            label[obj] = len(label) + 1
        out.append(("p", len(word)))
        word.append(label[obj])
    signs = [0] * len(label)
    base = events[0][0]
    for c, ((p0, u), (p1, v)) in dirs.items():
        # first visit in traversal order from the chosen start
        if (p0 - base) % m > (p1 - base) % m:
            u, v = v, u
        cr = u[0] * v[1] - u[1] * v[0]
        signs[label[c] - 1] = 1 if cr > 0 else -1
    return Traced(word, signs, out)


def ring_layout(count: int, dips: dict[int, int] | None = None) -> list[BoxDrawing]:
    """Boxes for a ring of ``count`` boxes; ``dips`` maps box index to dip count.

    Even rings alternate top and bottom boxes.  Odd rings start with a shift
    box followed by bottom, top, ..., top.
    """
    dips = dips or {}
    boxes: list[BoxDrawing] = []
    odd = count % 2 == 1
    for i in range(count):
        d = dips.get(i, 0)
        if odd and i == 0:
            if d:
                raise ValueError("the shift box carries no dips")
            boxes.append(shift_box())
        elif i % 2 == 0:
            boxes.append(top_box(d))
        else:
            boxes.append(bottom_box(d))
    return boxes
