from hypothesis import given, settings, strategies as st
import pytest

from conftest import walk_curve
from knotshadow import TRIVIAL, StaleMoveInstance, from_signed_gauss
from knotshadow.errors import ParseError
from knotshadow.moves import (
    ALL_KINDS,
    MoveInstance,
    MoveKind,
    apply_move,
    check_applicable,
    enumerate_all,
    enumerate_moves,
    format_move,
    inverse_of,
    parse_move,
    replay,
    surgery,
)

TREFOIL = from_signed_gauss("1+ 2- 3+ 1+ 2- 3+")
FIG8 = from_signed_gauss("1+ 1+")


def test_kind_algebra():
    for k in ALL_KINDS:
        assert k.inverse.inverse is k
        assert k.delta == -k.inverse.delta


def test_site_counts_trefoil():
    assert len(enumerate_moves(TREFOIL, "R1_DOWN")) == 0
    assert len(enumerate_moves(TREFOIL, "R2_DOWN")) == 3
    assert len(enumerate_moves(TREFOIL, "R3")) == 2
    # every edge, on either side
    assert len(enumerate_moves(TREFOIL, "R1_UP")) == 2 * 2 * TREFOIL.n


def test_site_counts_trivial():
    assert len(enumerate_moves(TRIVIAL, MoveKind.R1_UP)) == 2
    assert len(enumerate_moves(TRIVIAL, MoveKind.R2_UP)) == 2
    for k in (MoveKind.R1_DOWN, MoveKind.R2_DOWN, MoveKind.R3):
        assert enumerate_moves(TRIVIAL, k) == []


def test_kink_and_unkink():
    P = apply_move(TRIVIAL, enumerate_moves(TRIVIAL, "R1_UP")[0])
    assert P.canonically_equal(FIG8)
    assert apply_move(FIG8, enumerate_moves(FIG8, "R1_DOWN")[0]).is_trivial


def test_self_push_from_trivial():
    P = apply_move(TRIVIAL, enumerate_moves(TRIVIAL, "R2_UP")[0])
    assert P.n == 2
    assert enumerate_moves(P, "R2_DOWN")
    assert apply_move(P, enumerate_moves(P, "R2_DOWN")[0]).is_trivial


def test_r3_keeps_crossings_and_is_involutive():
    for m in enumerate_moves(TREFOIL, "R3"):
        Q = apply_move(TREFOIL, m)
        assert Q.n == 3
        back = apply_move(Q, inverse_of(TREFOIL, m, Q))
        assert back.canonically_equal(TREFOIL)


def test_stale_instances():
    with pytest.raises(StaleMoveInstance):
        check_applicable(FIG8, MoveInstance(MoveKind.R1_UP, dart=99, side="L"))
    with pytest.raises(StaleMoveInstance):
        apply_move(TREFOIL, MoveInstance(MoveKind.R3, face=(0, 5, 9)))
    m = enumerate_moves(TREFOIL, "R2_DOWN")[0]
    with pytest.raises(StaleMoveInstance):
        apply_move(FIG8, m)


def test_text_form_round_trip():
    P = walk_curve(4)
    for m in enumerate_all(P):
        t = format_move(P, m)
        assert apply_move(P, parse_move(P, t)) == apply_move(P, m)


@pytest.mark.parametrize("bad", ["R4@face:0", "R1_UP@dart:x,side:L", "R2_UP@face:0"])
def test_bad_move_text(bad):
    with pytest.raises((ParseError, StaleMoveInstance)):
        parse_move(TREFOIL, bad)


def test_replay():
    assert replay(TREFOIL, ["R2_DOWN@face:1", "R1_DOWN@face:1"]).is_trivial


def test_surgery_bookkeeping():
    m = enumerate_moves(FIG8, "R1_UP")[0]
    s = surgery(FIG8, m)
    assert s.created == (1,) and s.vmap == {0: 0}
    m = enumerate_moves(TREFOIL, "R3")[0]
    s = surgery(TREFOIL, m)
    assert len(s.touched) == 3 and s.created == ()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_round_trip_property(seed, pick):
    P = walk_curve(seed, steps=8)
    ms = enumerate_all(P)
    m = ms[pick % len(ms)]
    Q = apply_move(P, m)
    assert Q.n == P.n + m.kind.delta
    assert len(Q.faces()) == len(P.faces()) + m.kind.delta
    inv = inverse_of(P, m, Q)
    assert inv.kind is m.kind.inverse
    assert apply_move(Q, inv).canonically_equal(P)
