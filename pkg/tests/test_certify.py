import json
import random
from dataclasses import replace

import pytest

from knotshadow import families
from knotshadow.certify import (
    BOX_COUNT,
    assert_nontrivial,
    certificate_from_tree,
    certificate_to_tree,
    classify_move,
    load_certificate,
    mutate,
    replay_induction,
    save_certificate,
    transport_certificate,
    transport_with_case,
    verify_certificate,
)
from knotshadow.curve import from_signed_gauss
from knotshadow.errors import CertificateContradiction, MalformedCertificate, UnclassifiableCase
from knotshadow.moves import MoveKind, apply_move, enumerate_moves


@pytest.fixture(scope="module")
def p15():
    return families.certificate("p15")


@pytest.mark.parametrize("name", [str(f) for f in families.SHIPPED if families.certificate_path(f).exists()])
def test_shipped_certificates_verify(name):
    f = families.parse_family(name)
    P, c = families.certificate(f)
    assert verify_certificate(P, c, box_count=families.box_count(f)) == []


def test_ring_sizes_shipped():
    have = {str(f) for f in families.SHIPPED if families.certificate_path(f).exists()}
    assert {"p15", "p_hy"} | {f"p_odd(i={i})" for i in range(1, 6)} <= have


def test_report_floor(p15):
    P, c = p15
    rep = assert_nontrivial(P, c)
    assert rep.nontrivial and rep.floor == 2 * BOX_COUNT == 14
    assert rep.to_tree()["crossing_floor"] == 14


def test_wrong_box_count(p15):
    P, c = p15
    assert verify_certificate(P, c, box_count=8)
    assert not assert_nontrivial(P, c, box_count=8).nontrivial


def test_box_order_does_not_matter(p15):
    P, c = p15
    assert verify_certificate(P, replace(c, boxes=tuple(reversed(c.boxes)))) == []


def test_gaze_matters(p15):
    P, c = p15
    assert verify_certificate(P, replace(c, gaze=1 - c.gaze))


def test_pigeonhole(p15):
    P, c = p15
    b0, b1 = c.boxes[0], c.boxes[1]
    moved = replace(b0, members=b0.members | b1.members)
    emptied = replace(b1, members=frozenset())
    viol = verify_certificate(P, replace(c, boxes=(moved, emptied) + c.boxes[2:]))
    assert viol


def test_mutations_all_rejected(p15):
    P, c = p15
    rng = random.Random(99)
    for _ in range(200):
        mc, what = mutate(P, c, rng)
        try:
            assert verify_certificate(P, mc), what
        except MalformedCertificate:
            pass


def test_tree_round_trip(p15, tmp_path):
    P, c = p15
    tree = certificate_to_tree(P, c)
    json.dumps(tree)
    Q, c2 = certificate_from_tree(tree, P)
    assert verify_certificate(Q, c2) == []
    path = tmp_path / "x.cert"
    save_certificate(path, P, c)
    Q, c3 = load_certificate(path)
    assert verify_certificate(Q, c3) == []


def test_carried_to_other_basepoint(p15):
    P, _ = p15
    Q = from_signed_gauss(P.code(17))
    R, c = load_certificate(families.certificate_path("p15"), Q)
    assert R == Q and verify_certificate(R, c) == []


def test_mirror_rejected():
    # p_odd(i=2) is chiral; p15 is isomorphic to its own mirror
    P = families.generate("p_odd(i=2)")
    with pytest.raises(MalformedCertificate):
        load_certificate(families.certificate_path("p_odd(i=2)"), P.mirror())


def test_malformed_inputs(tmp_path):
    bad = tmp_path / "bad.cert"
    bad.write_text("{not json")
    with pytest.raises(MalformedCertificate):
        load_certificate(bad)
    bad.write_text(json.dumps({"format": "something else"}))
    with pytest.raises(MalformedCertificate):
        load_certificate(bad)


def test_trigon_classification(p15):
    P, c = p15
    box_of = {v: b.id for b in c.boxes for v in b.members}
    for m in enumerate_moves(P, MoveKind.R3):
        k = len({box_of[d >> 2] for d in m.face})
        case = classify_move(P, c, m)
        assert case == {2: "case 1", 3: "case 2"}.get(k, case)
        if k == 1:
            assert case == "within box"


def test_r2_is_not_classified(p15):
    P, c = p15
    m = enumerate_moves(P, MoveKind.R2_UP)[0]
    with pytest.raises(UnclassifiableCase):
        classify_move(P, c, m)


def test_wall_kink_round_trip(p15):
    P, c = p15
    m = next(m for m in enumerate_moves(P, MoveKind.R1_UP) if classify_move(P, c, m) == "kink on a boundary arc")
    Q = apply_move(P, m)
    c2 = transport_certificate(P, c, m)
    assert verify_certificate(Q, c2) == []
    # the new loop carries no wall, so removing it again is an ordinary case
    back = [d for d in enumerate_moves(Q, MoveKind.R1_DOWN) if apply_move(Q, d).canonically_equal(P)]
    assert back
    cases = set()
    for d in back:
        try:
            cases.add(classify_move(Q, c2, d))
        except CertificateContradiction:
            cases.add("contradiction")
    assert "within box" in cases


def test_transport_each_site_once(p15):
    P, c = p15
    seen = set()
    for kind in (MoveKind.R1_UP, MoveKind.R3):
        for m in enumerate_moves(P, kind):
            c2, case = transport_with_case(P, c, m)
            seen.add(case)
            assert verify_certificate(apply_move(P, m), c2) == []
    assert {"within box", "kink on a boundary arc"} <= seen


def test_replay_short(p15):
    P, c = p15
    res = replay_induction(P, c, 300, seed=5)
    assert res.ok, res.failure
    assert res.min_crossings >= 15
    assert sum(res.cases.values()) == 300


def test_replay_hits_both_trigon_cases(p15):
    P, c = p15
    cases = {}
    for seed in range(3):
        for k, v in replay_induction(P, c, 1000, seed).cases.items():
            cases[k] = cases.get(k, 0) + v
    assert cases.get("R3: case 1") and cases.get("R3: case 2")


def test_eight_box_ring():
    P, c = families.certificate("p_hy")
    assert verify_certificate(P, c, box_count=8) == []
    res = replay_induction(P, c, 200, seed=1, box_count=8)
    assert res.ok, res.failure


def test_box_ids_permuted(p15):
    P, c = p15
    perm = {b.id: (3 * b.id + 2) % 7 for b in c.boxes}
    assert verify_certificate(P, replace(c, boxes=tuple(replace(b, id=perm[b.id]) for b in c.boxes))) == []


def test_starred_swap_with_gaze_refixed(p15):
    P, c = p15
    swapped = replace(c, starred=c.starred[::-1], gaze=1 - c.gaze)
    assert verify_certificate(P, swapped) == []


def test_too_few_crossings():
    # a 4-box ring has 8 double points, short of two per box for seven boxes
    P, c = families.build_ring(1, 1, 4)
    assert P.n < 14
    assert verify_certificate(P, c)
    assert not assert_nontrivial(P, c).nontrivial
