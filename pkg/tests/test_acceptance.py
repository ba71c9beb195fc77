"""Acceptance suite: nine end-to-end criteria, each with a time budget.

Every test prints one ``PASS``/``FAIL`` line (shown even under pytest's
output capture).  Run directly with ``python3 tests/test_acceptance.py`` to
get just the summary lines.
"""
from __future__ import annotations

import random
import sys
import time

import pytest

from knotshadow import families
from knotshadow.certify import assert_nontrivial, mutate, replay_induction, verify_certificate
from knotshadow.curve import TRIVIAL, census, census_bruteforce, from_signed_gauss
from knotshadow.moves import ALL_KINDS, apply_move, enumerate_all, inverse_of, random_walk, replay
from knotshadow.search import HOMOTOPY_13, Bounds, Reachability, cmin_bounded, explore, is_13_trivial_bounded, reduce_full


@pytest.fixture(autouse=True)
def _reporter(capsys):
    def report(name: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
        within = elapsed <= limit
        line = f"{'PASS' if ok and within else 'FAIL'} {name} ({elapsed:.1f}s of {limit:.0f}s){': ' + detail if detail else ''}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, detail
        assert within, f"took {elapsed:.1f}s, budget {limit}s"

    yield report


def straight_ahead_cycles(P) -> int:
    a = P.alpha
    seen = [False] * len(a)
    cycles = 0
    for s in range(len(a)):
        if seen[s]:
            continue
        cycles += 1
        e = s
        while not seen[e]:
            seen[e] = True
            e = a[e ^ 2]
    return cycles


def test_c1_structural_invariants(_reporter):
    rng = random.Random(20261015)
    t0 = time.perf_counter()
    bad = []
    curves = 0
    for _ in range(10_000):
        for m, Q in random_walk(TRIVIAL, rng.randint(1, 30), rng):
            curves += 1
            if Q.is_trivial:
                ok = Q.num_darts == 0 and len(Q.faces()) == 2
            else:
                cc = Q.canonical_code()
                R = from_signed_gauss(cc)
                ok = (
                    len(Q.faces()) == Q.n + 2
                    and Q.num_darts == 4 * Q.n
                    and straight_ahead_cycles(Q) == 2
                    and R.canonical_code() == cc
                    and R.canonical_key() == Q.canonical_key()
                )
            if not ok:
                bad.append(str(Q.code()))
    _reporter("C1 structural invariants", not bad, time.perf_counter() - t0, 60,
              f"{curves} intermediate curves from 10000 walks, {len(bad)} bad")


def test_c2_move_round_trips(_reporter):
    rng = random.Random(7)
    t0 = time.perf_counter()
    bad = []
    pairs = 0
    while pairs < 1000:
        walk = random_walk(TRIVIAL, rng.randint(0, 12), rng)
        P = walk[-1][1] if walk else TRIVIAL
        m = rng.choice(enumerate_all(P, ALL_KINDS))
        Q = apply_move(P, m)
        back = apply_move(Q, inverse_of(P, m, Q))
        pairs += 1
        if not (
            back.canonically_equal(P)
            and Q.n - P.n == m.kind.delta
            and len(Q.faces()) - len(P.faces()) == m.kind.delta
        ):
            bad.append(f"{P.code()} {m.kind.value}")
    _reporter("C2 move round-trips", not bad, time.perf_counter() - t0, 30, f"{pairs} pairs, {len(bad)} bad")


# Number of curves on the sphere with n double points, up to relabelling,
# basepoint, direction and mirror (published census: 1, 2, 6, 19, 76, ...).
CENSUS = {0: 1, 1: 1, 2: 2, 3: 6}


def test_c3_census(_reporter):
    t0 = time.perf_counter()
    detail = []
    ok = True
    for n, want in CENSUS.items():
        a = census(n)
        b = census_bruteforce(n)
        same = set(a) == set(b) and len(a) == want
        ok &= same
        detail.append(f"n={n}: {len(a)}/{len(b)}")
    _reporter("C3 census cross-check", ok, time.perf_counter() - t0, 60, ", ".join(detail))


def test_c4_13_trivial_positives(_reporter):
    t0 = time.perf_counter()
    names = ["figure_eight", "trefoil_shadow"] + [f"kink_chain(k={k})" for k in range(1, 6)]
    bad = []
    for name in names:
        P = families.generate(name)
        verdict, rep = is_13_trivial_bounded(P, Bounds(max_crossings=P.n + 2))
        if verdict is not Reachability.REACHED or not replay(P, rep.witness_path).is_trivial:
            bad.append(name)
    _reporter("C4 (1,3)-trivial positives", not bad, time.perf_counter() - t0, 60,
              f"{len(names) - len(bad)}/{len(names)} reached with replayable witness")


@pytest.mark.parametrize("name,cap,cmin", [("p15", 16, 15), ("p_hy", 17, 16)])
def test_c5_counterexamples_bounded(_reporter, name, cap, cmin):
    P = families.generate(name)
    t0 = time.perf_counter()
    rep = explore(P, HOMOTOPY_13, Bounds(max_crossings=cap, max_states=500_000))
    value, complete = cmin_bounded(P, Bounds(max_crossings=cap, max_states=500_000))
    ok = not rep.trivial_reached and value == cmin
    _reporter(f"C5 bounded search {name}", ok, time.perf_counter() - t0, 300,
              f"{len(rep.visited)} states, trivial_reached={rep.trivial_reached}, cmin={value}, complete={complete}")


def test_c6_certificates(_reporter):
    t0 = time.perf_counter()
    detail = []
    ok = True
    for name in ["p15"] + [f"p_odd(i={i})" for i in (1, 2, 3)]:
        f = families.parse_family(name)
        P, c = families.certificate(f)
        k = families.box_count(f)
        viol = verify_certificate(P, c, box_count=k)
        rep = assert_nontrivial(P, c, box_count=k)
        good = not viol and rep.nontrivial and rep.floor is not None and rep.floor >= 14 and P.n >= rep.floor
        ok &= good
        detail.append(f"{name}:{'ok' if good else 'no'}")
    P, c = families.certificate("p15")
    rng = random.Random(3)
    caught = 0
    for _ in range(50):
        mc, _ = mutate(P, c, rng)
        try:
            caught += bool(verify_certificate(P, mc))
        except Exception:  # a malformed mutation is also a rejection
            caught += 1
    ok &= caught == 50
    detail.append(f"mutations rejected {caught}/50")
    _reporter("C6 certificate verification", ok, time.perf_counter() - t0, 30, ", ".join(detail))


def test_c7_induction_replay(_reporter):
    P, c = families.certificate("p15")
    t0 = time.perf_counter()
    bad = []
    for seed in range(10):
        res = replay_induction(P, c, 1000, seed)
        if not res.ok:
            bad.append(f"seed {seed}: {res.failure}")
    _reporter("C7 induction replay", not bad, time.perf_counter() - t0, 300, "; ".join(bad) or "10 seeds x 1000 steps")


def test_c8_family_arithmetic(_reporter):
    t0 = time.perf_counter()
    got = {i: (families.generate(f"p_odd(i={i})").n, families.generate(f"p_even(i={i})").n) for i in range(1, 6)}
    ok = all(got[i] == (2 * i + 13, 2 * i + 14) for i in got)
    _reporter("C8 family arithmetic", ok, time.perf_counter() - t0, 5, str(got))


def test_c9_full_move_completeness(_reporter):
    t0 = time.perf_counter()
    total = 0
    bad = []
    for n in range(0, 6):
        for P in census(n).values():
            total += 1
            r = reduce_full(P)
            if not (r.success and replay(P, r.path).is_trivial):
                bad.append(str(P.code()))
    _reporter("C9 full-move completeness", not bad, time.perf_counter() - t0, 300, f"{total - len(bad)}/{total} reduced")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
