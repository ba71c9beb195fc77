"""Command-line interface.

Curves are read one per line (text Gauss-code format) from the given files
or standard input.  Reports are written as one JSON object per line.
Errors go to standard error as a JSON record ``{"error": ..., "message": ...}``.

Exit codes: 0 success, 1 usage error, 2 validation failure,
3 search bounds exhausted without an answer.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Iterator, TextIO

from . import families
from .certify import (
    BOX_COUNT,
    assert_nontrivial,
    certificate_from_tree,
    replay_induction,
    verify_certificate,
)
from .curve import TRIVIAL, KnotProjection, from_signed_gauss, iter_curve_lines, make_code, parse_line, realize_unsigned
from .errors import KnotShadowError, MalformedCertificate
from .moves import ALL_KINDS, MoveKind, enumerate_moves, format_move
from .search import MOVESETS, Bounds, Reachability, cmin_bounded, explore, reduce_full

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_TRUNCATED = 0, 1, 2, 3

log = logging.getLogger("knotshadow")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        raise UsageError(message)


def _emit(obj: object, out: TextIO) -> None:
    out.write(json.dumps(obj, sort_keys=False) + "\n")


def _error_record(exc: BaseException, line: int | None = None) -> dict:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    if line is not None:
        rec["line"] = line
    return rec


class NotRealizable(KnotShadowError):
    pass


class AmbiguousWord(KnotShadowError):
    pass


def curve_from_line(line: str) -> KnotProjection:
    """Signed lines are built directly; unsigned words must have one realization."""
    if line.strip() in ("0", "-"):
        return TRIVIAL
    labels, signs = parse_line(line)
    if signs is not None:
        return from_signed_gauss(make_code(labels, signs))
    found = realize_unsigned(labels)
    if not found:
        raise NotRealizable(f"word {line.strip()!r} has no realization on the sphere")
    if len(found) > 1:
        raise AmbiguousWord(f"word {line.strip()!r} has {len(found)} realizations; give signs")
    return found[0]


def _lines(paths: list[str]) -> Iterator[tuple[int, str]]:
    if not paths or paths == ["-"]:
        text = sys.stdin.read()
        for k, line in enumerate(iter_curve_lines(text), 1):
            yield k, line
        return
    k = 0
    for p in paths:
        try:
            text = Path(p).read_text()
        except OSError as e:
            raise UsageError(f"cannot read {p}: {e}") from e
        for line in iter_curve_lines(text):
            k += 1
            yield k, line


def _curves(args) -> Iterator[tuple[int, KnotProjection]]:
    for k, line in _lines(args.inputs):
        try:
            yield k, curve_from_line(line)
        except KnotShadowError as e:
            e.line = k  # type: ignore[attr-defined]
            raise


def _code_text(P: KnotProjection) -> str:
    return "0" if P.is_trivial else str(P.code())


def _bounds(args, P: KnotProjection) -> Bounds:
    return Bounds(
        max_crossings=args.max_crossings if args.max_crossings is not None else P.n + 2,
        max_states=args.max_states,
        max_depth=args.max_depth,
    )


# -- commands ------------------------------------------------------------------

def cmd_parse(args, out) -> int:
    for k, line in _lines(args.inputs):
        labels, signs = parse_line(line) if line.strip() not in ("0", "-") else ([], {})
        if signs is None:
            found = realize_unsigned(labels)
            if not found:
                raise NotRealizable(f"line {k}: word has no realization on the sphere")
            _emit({"line": k, "realizations": [dict(P.to_structured(), code=_code_text(P)) for P in found]}, out)
        else:
            P = curve_from_line(line)
            _emit(dict(P.to_structured(), code=_code_text(P), line=k), out)
    return EXIT_OK


def cmd_canon(args, out) -> int:
    for _, P in _curves(args):
        out.write(("0" if P.is_trivial else str(P.canonical_code())) + "\n")
    return EXIT_OK


def cmd_moves(args, out) -> int:
    kinds = [MoveKind(args.kind)] if args.kind else list(ALL_KINDS)
    for _, P in _curves(args):
        for kind in kinds:
            for m in enumerate_moves(P, kind):
                out.write(format_move(P, m) + "\n")
        if len(args.inputs) > 1 or args.separate:
            out.write("\n")
    return EXIT_OK


def cmd_search(args, out) -> int:
    status = EXIT_OK
    for k, P in _curves(args):
        b = _bounds(args, P)
        rep = explore(P, MOVESETS[args.moveset], b, jobs=args.jobs, stop_at_goal=args.stop_at_trivial)
        tree = rep.to_tree()
        if rep.trivial_reached:
            verdict = Reachability.REACHED
        elif rep.complete:
            verdict = Reachability.NOT_REACHED_COMPLETE
        else:
            verdict = Reachability.NOT_REACHED_TRUNCATED
            status = EXIT_TRUNCATED
        tree = {"line": k, "code": _code_text(P), "result": verdict.value, **tree}
        if args.plot:
            from .plotting import search_histogram

            path = Path(args.plot)
            if k > 1:
                path = path.with_name(f"{path.stem}_{k}{path.suffix}")
            search_histogram(rep.states_by_crossings, path, title=f"{args.moveset}-moves from n = {P.n}", fmt=path.suffix.lstrip(".") or "svg")
            tree["plot"] = str(path)
        _emit(tree, out)
    return status


def cmd_cmin(args, out) -> int:
    status = EXIT_OK
    for k, P in _curves(args):
        value, complete = cmin_bounded(P, _bounds(args, P), jobs=args.jobs)
        if not complete:
            status = EXIT_TRUNCATED
        _emit({"line": k, "code": _code_text(P), "cmin_upper_bound": value, "complete": complete}, out)
    return status


def cmd_reduce(args, out) -> int:
    status = EXIT_OK
    for k, P in _curves(args):
        b = Bounds(max_crossings=args.max_crossings, max_states=args.max_states, max_depth=args.max_depth)
        red = reduce_full(P, b)
        if not red.success:
            status = EXIT_TRUNCATED
        _emit({"line": k, "code": _code_text(P), **red.to_tree()}, out)
    return status


def cmd_gen(args, out) -> int:
    extra = {}
    for p in args.param or []:
        key, _, val = p.partition("=")
        try:
            extra[key.strip()] = int(val)
        except ValueError:
            raise UsageError(f"--param expects key=integer, got {p!r}") from None
    f = families.parse_family(args.family, extra)
    P = families.generate(f)
    out.write(_code_text(P) + "\n")
    return EXIT_OK


def _load_cert(args, P: KnotProjection):
    path = Path(args.cert)
    try:
        tree = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise MalformedCertificate(f"cannot read certificate {path}: {e}") from e
    if not isinstance(tree, dict):
        raise MalformedCertificate(f"{path}: top level is not an object")
    boxes = args.boxes or int(tree.get("boxes_expected", BOX_COUNT))
    Q, c = certificate_from_tree(tree, P)
    return Q, c, boxes


def cmd_cert_verify(args, out) -> int:
    status = EXIT_OK
    for k, P in _curves(args):
        Q, c, boxes = _load_cert(args, P)
        rep = assert_nontrivial(Q, c, box_count=boxes)
        tree = {"line": k, "code": _code_text(P), "boxes": boxes, **rep.to_tree()}
        if not rep.nontrivial:
            status = EXIT_INVALID
        _emit(tree, out)
    return status


def cmd_cert_replay(args, out) -> int:
    status = EXIT_OK
    for k, P in _curves(args):
        Q, c, boxes = _load_cert(args, P)
        viol = verify_certificate(Q, c, box_count=boxes)
        if viol:
            _emit({"line": k, "ok": False, "violations": [str(v) for v in viol]}, out)
            status = EXIT_INVALID
            continue
        res = replay_induction(Q, c, args.steps, args.seed, extra_crossings=args.extra_crossings, box_count=boxes)
        if not res.ok:
            status = EXIT_INVALID
        _emit({"line": k, **res.to_tree()}, out)
    return status


def cmd_render(args, out) -> int:
    from .plotting import render_chord_diagram

    for k, P in _curves(args):
        if args.out:
            path = Path(args.out)
            if k > 1:
                path = path.with_name(f"{path.stem}_{k}{path.suffix}")
            render_chord_diagram(P, path, args.format)
            _emit({"line": k, "code": _code_text(P), "file": str(path), "format": args.format}, out)
        else:
            if args.format != "svg":
                raise UsageError("binary formats need --out")
            out.write(render_chord_diagram(P, None, "svg").decode())
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="knotshadow", description="Knot projections, Reidemeister moves and box certificates.")
    p.add_argument("--data-dir", help=f"family data directory (default: ${families.DATA_ENV} or the packaged data)")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name: str, fn, help: str):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("inputs", nargs="*", help="curve files (default: standard input)")
        sp.set_defaults(fn=fn)
        return sp

    cmd("parse", cmd_parse, "validate and print the structured form")
    cmd("canon", cmd_canon, "print the canonical signed code")
    sp = cmd("moves", cmd_moves, "list move sites in text form")
    sp.add_argument("--kind", choices=[k.value for k in ALL_KINDS])
    sp.add_argument("--separate", action="store_true", help="blank line after each curve")

    def bounds(sp, default_cross: str):
        sp.add_argument("--max-crossings", type=int, help=f"default: {default_cross}")
        sp.add_argument("--max-states", type=int, default=500_000)
        sp.add_argument("--max-depth", type=int)
        sp.add_argument("--jobs", type=int, default=1)

    sp = cmd("search", cmd_search, "bounded breadth-first exploration")
    sp.add_argument("--moveset", choices=sorted(MOVESETS), default="13")
    bounds(sp, "n + 2")
    sp.add_argument("--stop-at-trivial", action="store_true")
    sp.add_argument("--plot", help="write a histogram of visited states (svg or png by suffix)")
    sp = cmd("cmin", cmd_cmin, "bounded minimal crossing number under RI and RIII")
    bounds(sp, "n + 2")
    sp = cmd("reduce", cmd_reduce, "move sequence to the trivial projection using all moves")
    bounds(sp, "n + 2 per plateau")

    sp = sub.add_parser("gen", help="emit a family curve")
    sp.add_argument("--family", required=True, help="e.g. p15, p_odd(i=3), kink_chain --param k=4")
    sp.add_argument("--param", "--params", dest="param", action="append", help="key=value, repeatable")
    sp.set_defaults(fn=cmd_gen)

    sp = cmd("cert-verify", cmd_cert_verify, "check a box certificate")
    sp.add_argument("--cert", required=True)
    sp.add_argument("--boxes", type=int, help="expected box count (default: from the file, else 7)")
    sp = cmd("cert-replay", cmd_cert_replay, "random RI/RIII walk with certificate transport")
    sp.add_argument("--cert", required=True)
    sp.add_argument("--boxes", type=int)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--extra-crossings", type=int, default=6)

    sp = cmd("render", cmd_render, "chord diagram")
    sp.add_argument("--format", choices=["svg", "png", "pdf"], default="svg")
    sp.add_argument("--out", help="output file (svg may go to standard output)")
    return p


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        if not args.data_dir:
            return args.fn(args, out)
        saved = os.environ.get(families.DATA_ENV)
        os.environ[families.DATA_ENV] = args.data_dir
        try:
            return args.fn(args, out)
        finally:
            if saved is None:
                del os.environ[families.DATA_ENV]
            else:
                os.environ[families.DATA_ENV] = saved
    except UsageError as e:
        _emit(_error_record(e), err)
        return EXIT_USAGE
    except (KnotShadowError, ValueError) as e:
        _emit(_error_record(e, getattr(e, "line", None)), err)
        return EXIT_INVALID
    except BrokenPipeError:
        return EXIT_OK


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
