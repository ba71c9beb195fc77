"""Named curves and curve families.

The box-ring families are shipped as data files (signed Gauss code plus,
where available, a box certificate).  Parameter values without a shipped
file are built from the polyline drawing in ``_drawing``; the tests check
that every shipped file agrees with that drawing.

Ring families: ``P_LMN(l, m, n)`` is a ring of ``n`` boxes, with ``l - 1``
extra strand-3 dips in box 1 and ``m - 1`` in box 2.  Each dip adds two
double points, and an odd ring carries one extra double point in its shift
box, so the crossing count is ``2n + (n odd) + 2(l - 1) + 2(m - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
import os
from pathlib import Path
import re

from . import _drawing
from .certify import BoxCertificate, certificate_from_events, load_certificate
from .curve import TRIVIAL, KnotProjection, from_signed_gauss, iter_curve_lines, make_code, parse_signed
from .errors import ParameterOutOfDomain, ParseError

DATA_ENV = "KNOTSHADOW_DATA"
NAMES = ("trivial", "figure_eight", "kink_chain", "bigon", "trefoil_shadow", "p_hy", "p15", "p_lmn", "p_even", "p_odd")
PARAMS = {"kink_chain": ("k",), "p_lmn": ("l", "m", "n"), "p_even": ("i",), "p_odd": ("i",)}


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else Path(__file__).parent / "data"


@dataclass(frozen=True)
class FamilyId:
    name: str
    params: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if self.name not in NAMES:
            raise ParameterOutOfDomain(f"unknown family {self.name!r}; known: {', '.join(NAMES)}")
        want = PARAMS.get(self.name, ())
        got = tuple(k for k, _ in self.params)
        if got != want:
            raise ParameterOutOfDomain(f"{self.name} takes parameters {want}, got {got}")
        p = dict(self.params)
        if self.name == "kink_chain" and p["k"] < 1:
            raise ParameterOutOfDomain("kink_chain needs k >= 1")
        if self.name == "p_lmn" and (p["l"] < 1 or p["m"] < 1 or p["n"] < 4):
            raise ParameterOutOfDomain("p_lmn needs l >= 1, m >= 1, n >= 4")
        if self.name in ("p_even", "p_odd") and p["i"] < 1:
            raise ParameterOutOfDomain(f"{self.name} needs i >= 1")

    @property
    def p(self) -> dict[str, int]:
        return dict(self.params)

    @property
    def stem(self) -> str:
        """File name stem, e.g. ``p_odd_i3``."""
        return self.name + "".join(f"_{k}{v}" for k, v in self.params)

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v}" for k, v in self.params) + ")"


def family(name: str, **params: int) -> FamilyId:
    name = name.lower().replace("-", "_")
    if name not in NAMES:
        raise ParameterOutOfDomain(f"unknown family {name!r}; known: {', '.join(NAMES)}")
    order = PARAMS.get(name, ())
    extra = set(params) - set(order)
    if extra:
        raise ParameterOutOfDomain(f"{name} does not take {sorted(extra)}")
    missing = [k for k in order if k not in params]
    if missing:
        raise ParameterOutOfDomain(f"{name} needs parameters {missing}")
    return FamilyId(name, tuple((k, int(params[k])) for k in order))


_FAMILY_RE = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$")


def parse_family(text: str, extra: dict[str, int] | None = None) -> FamilyId:
    """Parse ``p_odd(i=3)`` or ``p_lmn(l=1,m=2,n=5)``; ``extra`` adds more parameters."""
    m = _FAMILY_RE.match(text.lower().replace("-", "_"))
    if not m:
        raise ParameterOutOfDomain(f"cannot parse family {text!r}")
    params: dict[str, int] = dict(extra or {})
    if m.group(2):
        for part in m.group(2).split(","):
            if not part.strip():
                continue
            k, _, v = part.partition("=")
            try:
                params[k.strip()] = int(v)
            except ValueError:
                raise ParameterOutOfDomain(f"parameter {part.strip()!r} is not k=integer") from None
    return family(m.group(1), **params)


# -- ring construction ------------------------------------------------------------------

def ring_params(f: FamilyId) -> tuple[int, int, int] | None:
    """(l, m, n) of a ring family member, or None for the small curves."""
    p = f.p
    if f.name == "p_lmn":
        return p["l"], p["m"], p["n"]
    if f.name == "p_hy":
        return 1, 1, 8
    if f.name == "p15":
        return 1, 1, 7
    if f.name == "p_even":
        return p["i"], 1, 8
    if f.name == "p_odd":
        return p["i"], 1, 7
    return None


def ring_crossings(l: int, m: int, n: int) -> int:
    return 2 * n + (n % 2) + 2 * (l - 1) + 2 * (m - 1)


def build_ring(l: int, m: int, n: int) -> tuple[KnotProjection, BoxCertificate]:
    """Curve and n-box certificate from the drawing; vertex k is code label k+1."""
    boxes = _drawing.ring_layout(n, {1: l - 1, 2: m - 1})
    t = _drawing.trace_ring(boxes)
    P = from_signed_gauss(make_code(t.word, t.signs))
    walk = P.walk(0)
    ev = [("p", walk[o]) if k == "p" else ("m", o) for k, o in t.events]
    return P, certificate_from_events(P, ev, list(range(n)))


def _kink_chain(k: int) -> KnotProjection:
    word, signs = [], []
    for j in range(1, k + 1):
        word += [j, j]
        signs.append(1 if j % 2 else -1)
    return from_signed_gauss(make_code(word, signs))


SMALL = {
    "figure_eight": "1+ 1+",
    "bigon": "1+ 1+ 2+ 2+",
    "trefoil_shadow": "1+ 2- 3+ 1+ 2- 3+",
}


def _data_path(f: FamilyId, ext: str) -> Path:
    return data_dir() / f.name / f"{f.stem}.{ext}"


def read_gauss_file(path: Path) -> KnotProjection:
    lines = list(iter_curve_lines(path.read_text()))
    if len(lines) != 1:
        raise ParseError(f"{path}: expected one curve, found {len(lines)}")
    if lines[0] in ("0", "-"):
        return TRIVIAL
    return from_signed_gauss(parse_signed(lines[0]))


def generate(f: FamilyId | str) -> KnotProjection:
    if isinstance(f, str):
        f = parse_family(f)
    if f.name == "trivial":
        return TRIVIAL
    if f.name == "kink_chain":
        return _kink_chain(f.p["k"])
    if f.name in SMALL:
        return from_signed_gauss(SMALL[f.name])
    path = _data_path(f, "gauss")
    if path.exists():
        return read_gauss_file(path)
    return build_ring(*ring_params(f))[0]


def box_count(f: FamilyId) -> int | None:
    r = ring_params(f)
    return r[2] if r else None


def certificate(f: FamilyId | str) -> tuple[KnotProjection, BoxCertificate] | None:
    """Shipped (or drawn) box certificate for a ring family member."""
    if isinstance(f, str):
        f = parse_family(f)
    r = ring_params(f)
    if r is None:
        return None
    path = _data_path(f, "cert")
    if path.exists():
        return load_certificate(path, generate(f))
    if _data_path(f, "gauss").exists():
        return None
    return build_ring(*r)


def certificate_path(f: FamilyId | str) -> Path:
    if isinstance(f, str):
        f = parse_family(f)
    return _data_path(f, "cert")


SHIPPED = (
    [family("p15"), family("p_hy")]
    + [family("p_odd", i=i) for i in range(1, 6)]
    + [family("p_even", i=i) for i in range(1, 6)]
    + [family("p_lmn", l=1, m=1, n=n) for n in (4, 5, 6)]
)


def write_data(root: Path | None = None) -> list[Path]:
    """Regenerate the shipped data files from the drawing."""
    from .certify import certificate_to_tree, verify_certificate
    import json

    root = root or data_dir()
    out = []
    for f in SHIPPED:
        P, c = build_ring(*ring_params(f))
        d = root / f.name
        d.mkdir(parents=True, exist_ok=True)
        g = d / f"{f.stem}.gauss"
        g.write_text(f"# {f}: {P.n} double points, ring of {box_count(f)} boxes\n{P.code()}\n")
        out.append(g)
        if verify_certificate(P, c, box_count=box_count(f)):
            continue
        cp = d / f"{f.stem}.cert"
        tree = certificate_to_tree(P, c)
        tree["boxes_expected"] = box_count(f)
        text = json.dumps(tree, indent=1)
        # keep each position triple and label list on one line
        text = re.sub(r"\[\s+([^\[\]{}]*?)\s+\]", lambda m: "[" + re.sub(r"\s+", " ", m.group(1)) + "]", text)
        cp.write_text(text + "\n")
        out.append(cp)
    return out
