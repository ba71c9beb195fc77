"""Knot projections as combinatorial maps.

A projection with ``n`` double points has ``4n`` darts.  The darts of
vertex ``v`` are ``4v .. 4v+3`` listed counterclockwise, so the vertex
rotation ``sigma`` is implicit and the dart straight across from ``d`` is
``d ^ 2``.  Only the edge involution ``alpha`` is stored.

Walking the curve means entering a vertex through a dart ``e``, leaving
through ``e ^ 2`` and arriving at ``alpha[e ^ 2]``.  Faces are the orbits
of ``d -> sigma(alpha(d))``; each orbit traces the face lying to the right
of the oriented edges ``d -> alpha(d)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import itertools
import re
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DartNotInProjection,
    Disconnected,
    InvalidMap,
    NotDoubleOccurrence,
    NotSpherical,
    ParseError,
)

FORMAT_VERSION = 1


def sigma(d: int) -> int:
    return (d & ~3) | ((d + 1) & 3)


def sigma_inv(d: int) -> int:
    return (d & ~3) | ((d - 1) & 3)


def vertex_of(d: int) -> int:
    return d >> 2


@dataclass(frozen=True)
class SignedGaussCode:
    """Double-occurrence word plus one sign per crossing label.

    ``word`` holds labels ``1..n``.  ``signs[label - 1]`` is ``+1`` when the
    second visit to that crossing crosses the first from right to left
    (it heads toward the first strand's left), ``-1`` otherwise.
    """

    word: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return " ".join(f"{lab}{'+' if self.signs[lab - 1] > 0 else '-'}" for lab in self.word)

    def mirror(self) -> "SignedGaussCode":
        return SignedGaussCode(self.word, tuple(-s for s in self.signs))


def _relabel(word: Sequence[int]) -> tuple[tuple[int, ...], dict[int, int]]:
    mapping: dict[int, int] = {}
    for lab in word:
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
    return tuple(mapping[lab] for lab in word), mapping


def check_double_occurrence(word: Sequence[int]) -> None:
    counts: dict[int, int] = {}
    for lab in word:
        counts[lab] = counts.get(lab, 0) + 1
    bad = sorted(lab for lab, c in counts.items() if c != 2)
    if bad:
        raise NotDoubleOccurrence(f"labels not occurring exactly twice: {bad}")


def make_code(word: Sequence[int], signs: dict[int, int] | Sequence[int]) -> SignedGaussCode:
    """Build a code from arbitrary positive labels, relabelling by first appearance."""
    check_double_occurrence(word)
    new_word, mapping = _relabel(word)
    if isinstance(signs, dict):
        by_old = signs
    else:
        by_old = {lab: signs[i] for i, lab in enumerate(sorted(mapping))}
    out = [0] * len(mapping)
    for old, new in mapping.items():
        s = by_old[old]
        if s not in (1, -1):
            raise ParseError(f"sign of crossing {old} must be +1 or -1, got {s!r}")
        out[new - 1] = s
    return SignedGaussCode(new_word, tuple(out))


_TOKEN = re.compile(r"^(\d+)([+-]?)$")


def parse_line(line: str) -> tuple[list[int], dict[int, int] | None]:
    """Parse one line of the text format.

    Returns the raw labels and a sign map, or ``None`` for the sign map when
    the line is unsigned.  Mixed signed/unsigned tokens are an error.
    """
    body = line.split("#", 1)[0].split()
    labels: list[int] = []
    signs: dict[int, int] = {}
    signed = None
    for tok in body:
        m = _TOKEN.match(tok)
        if not m or int(m.group(1)) <= 0:
            raise ParseError(f"bad token {tok!r}")
        lab = int(m.group(1))
        has_sign = bool(m.group(2))
        if signed is None:
            signed = has_sign
        elif signed != has_sign:
            raise ParseError("mixed signed and unsigned tokens")
        labels.append(lab)
        if has_sign:
            s = 1 if m.group(2) == "+" else -1
            if signs.setdefault(lab, s) != s:
                raise ParseError(f"conflicting signs for crossing {lab}")
    return labels, (signs if signed else None)


def parse_signed(line: str) -> SignedGaussCode:
    labels, signs = parse_line(line)
    if signs is None:
        if labels:
            raise ParseError("expected signed tokens such as '1+'")
        signs = {}
    return make_code(labels, signs)


def iter_curve_lines(text: str) -> Iterable[str]:
    """Yield the non-blank, non-comment lines of a curve file.

    A line holding only ``0`` or ``-`` stands for the trivial projection.
    """
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


@dataclass(frozen=True)
class Face:
    """One complementary region: its corner darts in face-permutation order.

    ``degree`` counts corners; ``distinct_vertices`` counts double points,
    which differs when a vertex meets the face twice.
    """

    darts: tuple[int, ...]
    index: int = 0

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(d >> 2 for d in self.darts)

    @property
    def distinct_vertices(self) -> int:
        return len(set(self.vertices))


class KnotProjection:
    """Immutable combinatorial map of a generic closed curve on the sphere."""

    __slots__ = ("alpha", "__dict__")

    def __init__(self, alpha: Sequence[int] = (), *, validate: bool = True):
        self.alpha: tuple[int, ...] = tuple(int(a) for a in alpha)
        if validate:
            self.validate()

    # -- basic structure -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.alpha) // 4

    @property
    def num_darts(self) -> int:
        return len(self.alpha)

    @property
    def is_trivial(self) -> bool:
        return not self.alpha

    def __repr__(self) -> str:
        return f"KnotProjection(n={self.n}, code='{self.code()}')"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnotProjection) and self.alpha == other.alpha

    def __hash__(self) -> int:
        return hash(self.alpha)

    def has_dart(self, d: int) -> bool:
        return 0 <= d < len(self.alpha)

    def next_entry(self, e: int) -> int:
        return self.alpha[e ^ 2]

    def walk(self, start: int = 0) -> list[int]:
        """Entry darts of the 2n passages, following the curve from ``start``."""
        if self.is_trivial:
            return []
        out = [start]
        e = self.alpha[start ^ 2]
        while e != start:
            out.append(e)
            e = self.alpha[e ^ 2]
        return out

    def validate(self) -> None:
        a = self.alpha
        m = len(a)
        if m % 4:
            raise InvalidMap("dart count must be a multiple of 4")
        for d, x in enumerate(a):
            if not 0 <= x < m:
                raise InvalidMap(f"alpha[{d}]={x} out of range")
            if x == d:
                raise InvalidMap(f"alpha has fixed point {d}")
            if a[x] != d:
                raise InvalidMap(f"alpha is not an involution at {d}")
        if m == 0:
            return
        seen = bytearray(m)
        cycles = 0
        for d in range(m):
            if seen[d]:
                continue
            cycles += 1
            e = d
            while not seen[e]:
                seen[e] = 1
                e = a[e ^ 2]
        if cycles != 2:
            raise Disconnected(f"straight-ahead walk has {cycles} cycles, expected 2")
        if len(self.faces()) != self.n + 2:
            raise NotSpherical(f"{len(self.faces())} faces for n={self.n}; expected {self.n + 2}")

    # -- faces -------------------------------------------------------------
    def faces(self) -> tuple[Face, ...]:
        cached = self.__dict__.get("_faces")
        if cached is not None:
            return cached
        if self.is_trivial:
            out = (Face((), 0), Face((), 1))
        else:
            a = self.alpha
            seen = bytearray(len(a))
            found = []
            for d in range(len(a)):
                if seen[d]:
                    continue
                orbit = []
                e = d
                while not seen[e]:
                    seen[e] = 1
                    orbit.append(e)
                    x = a[e]
                    e = (x & ~3) | ((x + 1) & 3)
                found.append(Face(tuple(orbit), len(found)))
            out = tuple(found)
        self.__dict__["_faces"] = out
        return out

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        """Index of the face to the right of each oriented edge ``d -> alpha(d)``."""
        out = [0] * len(self.alpha)
        for f in self.faces():
            for d in f.darts:
                out[d] = f.index
        return tuple(out)

    # -- codes -----------------------------------------------------------
    def code(self, basepoint: int = 0, direction: str = "forward") -> SignedGaussCode:
        return to_signed_gauss(self, basepoint, direction)

    @cached_property
    def _canon(self) -> tuple[bytes, SignedGaussCode, int, bool]:
        return _canonicalize(self)

    def canonical_key(self) -> bytes:
        return self._canon[0]

    def canonical_code(self) -> SignedGaussCode:
        return self._canon[1]

    def canonical_start(self) -> tuple[int, bool]:
        """A (start dart, mirrored) pair whose traversal yields the canonical code."""
        return self._canon[2], self._canon[3]

    def canonically_equal(self, other: "KnotProjection") -> bool:
        return self.canonical_key() == other.canonical_key()

    def mirror(self) -> "KnotProjection":
        """Orientation-reversed map: every rotation is reversed."""
        flip = [0, 3, 2, 1]

        def f(d: int) -> int:
            return (d & ~3) | flip[d & 3]

        alpha = [0] * len(self.alpha)
        for d, x in enumerate(self.alpha):
            alpha[f(d)] = f(x)
        return KnotProjection(alpha, validate=False)

    def to_structured(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "n": self.n,
            "alpha": list(self.alpha),
            "sigma": [sigma(d) for d in range(len(self.alpha))],
        }


TRIVIAL = KnotProjection(())


def from_structured(tree: dict) -> KnotProjection:
    """Inverse of :meth:`KnotProjection.to_structured`.

    Any ``sigma`` whose cycles all have length 4 is accepted; darts are
    renumbered into the standard vertex blocks when needed.
    """
    try:
        version = tree["version"]
        n = int(tree["n"])
        alpha = [int(x) for x in tree["alpha"]]
        sig = [int(x) for x in tree["sigma"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad structured projection: {exc}") from exc
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version}")
    if len(alpha) != 4 * n or len(sig) != 4 * n:
        raise InvalidMap("alpha and sigma must have 4n entries")
    if sorted(sig) != list(range(4 * n)):
        raise InvalidMap("sigma is not a permutation")
    renum = [-1] * (4 * n)
    nxt = 0
    for d in range(4 * n):
        if renum[d] >= 0:
            continue
        cyc = [d]
        e = sig[d]
        while e != d:
            cyc.append(e)
            e = sig[e]
            if len(cyc) > 4:
                break
        if len(cyc) != 4:
            raise InvalidMap(f"sigma cycle through dart {d} does not have length 4")
        for k, x in enumerate(cyc):
            renum[x] = 4 * nxt + k
        nxt += 1
    new_alpha = [0] * (4 * n)
    for d in range(4 * n):
        new_alpha[renum[d]] = renum[alpha[d]]
    return KnotProjection(new_alpha)


def _alpha_from_code(word: Sequence[int], signs: Sequence[int]) -> list[int]:
    n = len(signs)
    seen = [False] * n
    entries = []
    for lab in word:
        v = lab - 1
        if not seen[v]:
            seen[v] = True
            entries.append(4 * v)
        else:
            entries.append(4 * v + (1 if signs[v] > 0 else 3))
    alpha = [0] * (4 * n)
    m = len(entries)
    for k in range(m):
        out = entries[k] ^ 2
        nxt = entries[(k + 1) % m]
        alpha[out] = nxt
        alpha[nxt] = out
    return alpha


def from_signed_gauss(code: SignedGaussCode | str) -> KnotProjection:
    """Build the map of a signed code; vertex ``k`` is label ``k+1`` after relabelling.

    The traversal of the result from dart 0 reproduces the code.
    """
    if isinstance(code, str):
        code = parse_signed(code)
    check_double_occurrence(code.word)
    word, mapping = _relabel(code.word)
    if len(mapping) != len(code.signs):
        raise ParseError("sign vector length does not match number of labels")
    signs = [0] * len(mapping)
    for old, new in mapping.items():
        signs[new - 1] = code.signs[old - 1]
    return KnotProjection(_alpha_from_code(word, signs))


def to_signed_gauss(P: KnotProjection, basepoint: int = 0, direction: str = "forward") -> SignedGaussCode:
    if P.is_trivial:
        return SignedGaussCode((), ())
    if not P.has_dart(basepoint):
        raise DartNotInProjection(f"dart {basepoint} not in projection with {P.num_darts} darts")
    if direction not in ("forward", "reverse"):
        raise ValueError("direction must be 'forward' or 'reverse'")
    start = basepoint if direction == "forward" else basepoint ^ 2
    entries = P.walk(start)
    labels: dict[int, int] = {}
    first_entry: dict[int, int] = {}
    word = []
    signs = [0] * P.n
    for e in entries:
        v = e >> 2
        if v not in labels:
            labels[v] = len(labels) + 1
            first_entry[v] = e
        else:
            signs[labels[v] - 1] = 1 if ((e - first_entry[v]) & 3) == 1 else -1
        word.append(labels[v])
    return SignedGaussCode(tuple(word), tuple(signs))


def _canonicalize(P: KnotProjection) -> tuple[bytes, SignedGaussCode, int, bool]:
    """Lexicographic minimum over all basepoints, both directions and mirror.

    Every dart is an entry dart of exactly one traversal direction, so the
    4n darts cover basepoint x direction; the mirror flips every sign.
    Tokens are ``2*label + signbit`` with ``signbit`` 0 for ``+``.
    """
    n = P.n
    if n == 0:
        return b"", SignedGaussCode((), ()), 0, False
    m = 2 * n
    alpha = np.asarray(P.alpha, dtype=np.int64)
    rows = 4 * n
    E = np.empty((rows, m), dtype=np.int64)
    E[:, 0] = np.arange(rows)
    for k in range(1, m):
        E[:, k] = alpha[E[:, k - 1] ^ 2]
    V = E >> 2
    order = np.argsort(V, axis=1, kind="stable")
    first = order[:, 0::2]
    second = order[:, 1::2]
    label = np.argsort(np.argsort(first, axis=1), axis=1)
    r = np.arange(rows)[:, None]
    j1 = E[r, first] & 3
    j2 = E[r, second] & 3
    signbit = (((j2 - j1) & 3) != 1).astype(np.int64)
    tok_v = 2 * label + signbit
    T = tok_v[r, V]
    allrows = np.vstack([T, T ^ 1])
    best = int(np.lexsort(allrows[:, ::-1].T)[0])
    tokens = allrows[best]
    key = tokens.astype(">u2").tobytes()
    word = tuple(int(t >> 1) + 1 for t in tokens)
    signs = [0] * n
    for t in tokens:
        signs[t >> 1] = -1 if t & 1 else 1
    return key, SignedGaussCode(word, tuple(signs)), best % rows, best >= rows


def canonical_form(P: KnotProjection) -> SignedGaussCode:
    return P.canonical_code()


def faces(P: KnotProjection) -> tuple[Face, ...]:
    return P.faces()


# -- realization of unsigned words ------------------------------------------

def _face_upper_bound(n: int, word: Sequence[int], signs: list[int]) -> int:
    """Upper bound on the face count of any completion of a partial sign vector.

    Signs of 0 are unassigned.  Closed orbits of the face permutation are
    final faces; every other final face contains a dart whose partner is
    still unknown.
    """
    m = len(word)
    entries: list[int | None] = []
    seen = [False] * n
    for lab in word:
        v = lab - 1
        if not seen[v]:
            seen[v] = True
            entries.append(4 * v)
        elif signs[v]:
            entries.append(4 * v + (1 if signs[v] > 0 else 3))
        else:
            entries.append(None)
    alpha: list[int | None] = [None] * (4 * n)
    for k in range(m):
        a, b = entries[k], entries[(k + 1) % m]
        if a is not None and b is not None:
            alpha[a ^ 2] = b
            alpha[b] = a ^ 2
    unknown = sum(1 for x in alpha if x is None)
    closed = 0
    seen_d = bytearray(4 * n)
    for d in range(4 * n):
        if seen_d[d] or alpha[d] is None:
            continue
        e = d
        path = []
        ok = True
        while True:
            if seen_d[e]:
                ok = e == d and bool(path)
                break
            seen_d[e] = 1
            path.append(e)
            x = alpha[e]
            if x is None:
                ok = False
                break
            e = sigma(x)
        if ok:
            closed += 1
    return closed + unknown


def realize_unsigned(word: Sequence[int], *, prune: bool = True) -> list[KnotProjection]:
    """All spherical curves with this Gauss word, up to homeomorphism and mirror.

    Exhaustive over sign vectors with the sign of the first crossing fixed
    (the mirror flips all signs).  An empty result means the word is not
    realizable on the sphere.
    """
    check_double_occurrence(word)
    w, _ = _relabel(word)
    n = len(set(w))
    if n == 0:
        return [TRIVIAL]
    target = n + 2
    found: dict[bytes, KnotProjection] = {}
    signs = [0] * n
    signs[0] = 1

    def leaf() -> None:
        try:
            P = KnotProjection(_alpha_from_code(w, signs))
        except (NotSpherical, Disconnected, InvalidMap):
            return
        found.setdefault(P.canonical_key(), P)

    def rec(i: int) -> None:
        if prune and _face_upper_bound(n, w, signs) < target:
            return
        if i == n:
            leaf()
            return
        for s in (1, -1):
            signs[i] = s
            rec(i + 1)
        signs[i] = 0

    rec(1)
    return [found[k] for k in sorted(found)]


def double_occurrence_words(n: int) -> Iterable[tuple[int, ...]]:
    """Every double-occurrence word on n labels in first-appearance normal form."""

    def rec(word: list[int], used: int, counts: list[int]) -> Iterable[tuple[int, ...]]:
        if len(word) == 2 * n:
            yield tuple(word)
            return
        # reuse an open label or open the next new one
        for lab in range(1, used + 1):
            if counts[lab] == 1:
                counts[lab] = 2
                word.append(lab)
                yield from rec(word, used, counts)
                word.pop()
                counts[lab] = 1
        if used < n:
            counts[used + 1] = 1
            word.append(used + 1)
            yield from rec(word, used + 1, counts)
            word.pop()
            counts[used + 1] = 0

    yield from rec([], 0, [0] * (n + 2))


def census(n: int) -> dict[bytes, KnotProjection]:
    """Canonical curves with exactly n crossings, by realizing every word."""
    if n == 0:
        return {TRIVIAL.canonical_key(): TRIVIAL}
    out: dict[bytes, KnotProjection] = {}
    for word in double_occurrence_words(n):
        for P in realize_unsigned(word):
            out.setdefault(P.canonical_key(), P)
    return out


def census_bruteforce(n: int) -> dict[bytes, KnotProjection]:
    """Same as :func:`census` but trying every sign vector of every word, unpruned."""
    if n == 0:
        return {TRIVIAL.canonical_key(): TRIVIAL}
    out: dict[bytes, KnotProjection] = {}
    for word in double_occurrence_words(n):
        for signs in itertools.product((1, -1), repeat=n):
            try:
                P = KnotProjection(_alpha_from_code(word, signs))
            except (NotSpherical, Disconnected, InvalidMap):
                continue
            out.setdefault(P.canonical_key(), P)
    return out
