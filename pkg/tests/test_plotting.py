from knotshadow import TRIVIAL, families, from_signed_gauss
from knotshadow.plotting import render_chord_diagram, search_histogram


def test_svg_is_deterministic():
    P = from_signed_gauss("1+ 2- 3+ 1+ 2- 3+")
    a = render_chord_diagram(P)
    assert a == render_chord_diagram(P)
    assert b"<svg" in a


def test_trivial_and_large():
    assert b"<svg" in render_chord_diagram(TRIVIAL)
    assert b"<svg" in render_chord_diagram(families.generate("p15"), fmt="svg", title="P15")


def test_histogram(tmp_path):
    path = tmp_path / "h.png"
    search_histogram({15: 1, "16": 40}, path, title="demo", fmt="png")
    assert path.read_bytes()[:4] == b"\x89PNG"
