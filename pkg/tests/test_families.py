import pytest

from knotshadow import families
from knotshadow.certify import verify_certificate
from knotshadow.errors import ParameterOutOfDomain
from knotshadow.families import build_ring, family, parse_family, ring_crossings


@pytest.mark.parametrize("f", families.SHIPPED, ids=str)
def test_shipped_data_matches_drawing(f):
    P = families.generate(f)
    Q, _ = build_ring(*families.ring_params(f))
    assert P.canonically_equal(Q)
    assert P.n == ring_crossings(*families.ring_params(f))


@pytest.mark.parametrize("lmn", [(1, 1, 4), (2, 3, 5), (3, 1, 6), (1, 2, 9), (2, 2, 8)])
def test_crossing_formula(lmn):
    P, c = build_ring(*lmn)
    assert P.n == ring_crossings(*lmn)
    assert len(c.boxes) == lmn[2]


@pytest.mark.parametrize("lmn", [(2, 3, 7), (1, 2, 9), (3, 1, 8)])
def test_larger_rings_certify(lmn):
    P, c = build_ring(*lmn)
    assert verify_certificate(P, c, box_count=lmn[2]) == []


def test_named_members():
    assert families.generate("p15").n == 15
    assert families.generate("p_hy").n == 16
    assert families.generate("p_odd(i=1)").canonically_equal(families.generate("p15"))
    assert families.generate("p_even(i=1)").canonically_equal(families.generate("p_hy"))


def test_small_curves():
    assert families.generate("trivial").is_trivial
    assert families.generate("figure_eight").n == 1
    assert families.generate("trefoil_shadow").n == 3
    for k in range(1, 6):
        assert families.generate(family("kink_chain", k=k)).n == k


@pytest.mark.parametrize(
    "text",
    ["p_odd(i=0)", "p_even", "p_lmn(l=1,m=1,n=3)", "kink_chain(k=0)", "unknown", "p15(i=1)", "p_odd(i=x)"],
)
def test_domains(text):
    with pytest.raises(ParameterOutOfDomain):
        parse_family(text)


def test_parse_family_forms():
    f = parse_family("P-LMN(l=2, m=1, n=5)")
    assert f.name == "p_lmn" and f.p == {"l": 2, "m": 1, "n": 5}
    assert str(f) == "p_lmn(l=2,m=1,n=5)" and f.stem == "p_lmn_l2_m1_n5"
    assert parse_family("kink_chain", {"k": 3}) == family("kink_chain", k=3)


def test_certificate_lookup():
    assert families.certificate("figure_eight") is None
    # small rings ship a code but no certificate
    assert families.certificate("p_lmn(l=1,m=1,n=4)") is None
    P, c = families.certificate("p_odd(i=4)")
    assert verify_certificate(P, c) == []


def test_data_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv(families.DATA_ENV, str(tmp_path))
    written = families.write_data()
    assert all(p.is_relative_to(tmp_path) for p in written)
    assert (tmp_path / "p15" / "p15.cert").exists()
    assert not (tmp_path / "p_lmn" / "p_lmn_l1_m1_n4.cert").exists()
    # the regenerated files are byte-identical to the shipped ones
    monkeypatch.delenv(families.DATA_ENV)
    shipped = families.data_dir()
    for p in written:
        assert p.read_text() == (shipped / p.relative_to(tmp_path)).read_text()
