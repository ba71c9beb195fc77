import io
import json

import pytest

from knotshadow import families
from knotshadow.cli import main

TREFOIL = "1+ 2- 3+ 1+ 2- 3+"


def run(argv, stdin="", monkeypatch=None):
    if monkeypatch is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def lines(text):
    return [json.loads(x) for x in text.splitlines() if x.strip()]


def test_canon_from_stdin(monkeypatch):
    code, out, _ = run(["canon"], "# a comment\n" + TREFOIL + "\n0\n", monkeypatch)
    assert code == 0
    assert out.splitlines()[1] == "0"


def test_parse_unsigned(monkeypatch):
    code, out, _ = run(["parse"], "1 1 2 2\n", monkeypatch)
    assert code == 0
    assert len(lines(out)[0]["realizations"]) == 2


def test_parse_errors(monkeypatch):
    code, _, err = run(["parse"], "1 2 1 2\n", monkeypatch)
    assert code == 2 and lines(err)[0]["error"] == "NotRealizable"
    code, _, err = run(["canon"], "1+ 2\n", monkeypatch)
    assert code == 2 and lines(err)[0]["error"] == "ParseError"
    code, _, err = run(["canon"], "1 1 2 2\n", monkeypatch)
    assert code == 2 and lines(err)[0]["error"] == "AmbiguousWord"


def test_usage_errors(monkeypatch):
    assert run(["frobnicate"])[0] == 1
    assert run([])[0] == 1
    assert run(["search", "--jobs", "0"], TREFOIL, monkeypatch)[0] == 1
    assert run(["canon", "/nonexistent/file"])[0] == 1


def test_moves(monkeypatch):
    code, out, _ = run(["moves", "--kind", "R3"], TREFOIL, monkeypatch)
    assert code == 0 and len(out.split()) == 2


def test_search_and_plot(monkeypatch, tmp_path):
    plot = tmp_path / "h.svg"
    code, out, _ = run(["search", "--plot", str(plot)], TREFOIL, monkeypatch)
    rec = lines(out)[0]
    assert code == 0 and rec["result"] == "Reached" and rec["witness_path"]
    assert plot.read_text().lstrip().startswith("<?xml")


def test_search_truncated_exit(monkeypatch):
    code, out, _ = run(["search", "--max-states", "5", "--max-crossings", "18"], str(families.generate("p15").code()), monkeypatch)
    assert code == 3 and lines(out)[0]["result"] == "NotReachedTruncated"


def test_cmin(monkeypatch):
    code, out, _ = run(["cmin", "--max-crossings", "16"], str(families.generate("p15").code()), monkeypatch)
    assert code == 0 and lines(out)[0]["cmin_upper_bound"] == 15


def test_reduce(monkeypatch):
    code, out, _ = run(["reduce"], "1+ 1+ 2- 2-\n", monkeypatch)
    assert code == 0 and lines(out)[0]["success"]


def test_gen():
    code, out, _ = run(["gen", "--family", "p_odd(i=2)"])
    assert code == 0 and len(out.split()) == 2 * 17
    code, out, _ = run(["gen", "--family", "kink_chain", "--param", "k=2"])
    assert out.strip() == "1+ 1+ 2- 2-"
    assert run(["gen", "--family", "p_odd(i=0)"])[0] == 2
    assert run(["gen", "--family", "kink_chain", "--param", "k=two"])[0] == 1


def test_cert_verify(monkeypatch):
    cert = str(families.certificate_path("p_hy"))
    code, out, _ = run(["cert-verify", "--cert", cert], str(families.generate("p_hy").code()), monkeypatch)
    rec = lines(out)[0]
    assert code == 0 and rec["nontrivial"] and rec["boxes"] == 8 and rec["crossing_floor"] == 16
    code, out, _ = run(["cert-verify", "--cert", cert, "--boxes", "7"], str(families.generate("p_hy").code()), monkeypatch)
    assert code == 2 and lines(out)[0]["violations"]


def test_cert_verify_wrong_curve(monkeypatch):
    code, _, err = run(["cert-verify", "--cert", str(families.certificate_path("p15"))], TREFOIL, monkeypatch)
    assert code == 2 and lines(err)[0]["error"] == "MalformedCertificate"


def test_cert_replay(monkeypatch):
    code, out, _ = run(
        ["cert-replay", "--cert", str(families.certificate_path("p15")), "--steps", "50", "--seed", "3"],
        str(families.generate("p15").code()),
        monkeypatch,
    )
    rec = lines(out)[0]
    assert code == 0 and rec["ok"] and rec["steps"] == 50


@pytest.mark.parametrize("fmt,magic", [("svg", b"<?xml"), ("png", b"\x89PNG")])
def test_render(monkeypatch, tmp_path, fmt, magic):
    path = tmp_path / f"c.{fmt}"
    code, out, _ = run(["render", "--format", fmt, "--out", str(path)], TREFOIL, monkeypatch)
    assert code == 0 and path.read_bytes().startswith(magic)


def test_render_svg_to_stdout(monkeypatch):
    code, out, _ = run(["render"], TREFOIL, monkeypatch)
    assert code == 0 and "<svg" in out


def test_data_dir_flag(tmp_path):
    (tmp_path / "p15").mkdir()
    (tmp_path / "p15" / "p15.gauss").write_text("1+ 1+\n")
    code, out, _ = run(["--data-dir", str(tmp_path), "gen", "--family", "p15"])
    assert code == 0 and out.strip() == "1+ 1+"
    assert families.generate("p15").n == 15


P15_CANONICAL = (
    "1+ 2+ 3- 4+ 5- 1+ 6+ 7+ 8- 5- 4+ 9+ 10- 11+ 7+ 8- 9+ 12+ 13- 10- 11+ 14- 15+ 13- 12+ 3- 2+ 15+ 14- 6+"
)


def test_p15_canonical_code_is_locked(monkeypatch):
    _, code_text, _ = run(["gen", "--family", "p15"])
    _, out, _ = run(["canon"], code_text, monkeypatch)
    assert out.strip() == P15_CANONICAL


def test_canon_idempotent(monkeypatch):
    text = "\n".join([TREFOIL, "1+ 1+ 2- 2-", str(families.generate("p_odd(i=2)").code())])
    _, once, _ = run(["canon"], text, monkeypatch)
    _, twice, _ = run(["canon"], once, monkeypatch)
    assert once == twice


def test_params_alias():
    assert run(["gen", "--family", "kink_chain", "--params", "k=3"])[1].strip() == "1+ 1+ 2- 2- 3+ 3+"
