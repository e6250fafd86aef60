"""Command-line front end."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .filtration import FiltrationConfig, run_filtration
from .paths import DEFAULT_ORDER, Window
from .quipu import InvalidQuipu, alpha_within, from_document, to_dot, validate
from .render import assembly_svg
from .tas import NotConfluent, ParseError, grow_max, load_tas

EXIT = {"halt": 0, "grid": 2, "inconclusive": 3, "not-confluent": 4}


@dataclass(frozen=True)
class RunConfig:
    window: int = 20
    margin: int | None = None
    cap: int = 12
    order: str = DEFAULT_ORDER
    out: str | None = None
    dot: str | None = None
    svg: str | None = None


def _dump(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _window(n: int, margin: int | None) -> Window:
    return Window.square(n, 8 if margin is None else margin)


def cmd_build(args: argparse.Namespace) -> int:
    cfg = RunConfig(args.window, args.margin, args.cap, args.order, args.out, args.dot)
    tas = load_tas(args.tas)
    result = run_filtration(tas, FiltrationConfig(cfg.window, cfg.margin, cfg.cap, cfg.order))
    _dump(result.to_document(), cfg.out)
    if cfg.dot and result.quipu is not None:
        Path(cfg.dot).write_text(to_dot(result.quipu), encoding="utf-8")
    return EXIT[result.outcome]


def cmd_simulate(args: argparse.Namespace) -> int:
    tas = load_tas(args.tas)
    try:
        asm = grow_max(tas, _window(args.window, args.margin))
    except NotConfluent as exc:
        _dump({"result": "not-confluent",
               "witness": {"point": list(exc.point), "tiles": list(exc.tiles)}}, None)
        return 4
    if args.svg:
        Path(args.svg).write_text(assembly_svg(asm, tas), encoding="utf-8")
    doc = {"result": "ok", "placements": [{"point": list(p), "tile": t}
                                         for p, t in sorted(asm.placements.items())]}
    _dump(doc, args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    tas = load_tas(args.tas)
    doc = json.loads(Path(args.quipu).read_text(encoding="utf-8"))
    q = from_document(doc)
    window = _window(args.window, args.margin)
    problems = validate(q, tas)
    ref = grow_max(tas, window).placements
    got = alpha_within(q, window).placements
    missing = sorted(set(ref) - set(got))
    extra = sorted(set(got) - set(ref))
    wrong = sorted(p for p in set(ref) & set(got) if ref[p] != got[p])
    equal = not (missing or extra or wrong or problems)
    _dump({"equal": equal, "violations": problems, "missing": [list(p) for p in missing],
           "extra": [list(p) for p in extra], "mismatched": [list(p) for p in wrong]}, None)
    return 0 if equal else 3


def cmd_check_confluence(args: argparse.Namespace) -> int:
    tas = load_tas(args.tas)
    try:
        grow_max(tas, _window(args.window, args.margin))
    except NotConfluent as exc:
        _dump({"result": "not-confluent",
               "witness": {"point": list(exc.point), "tiles": list(exc.tiles)}}, None)
        return 4
    _dump({"result": "confluent-in-window"}, None)
    return 0


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilequipu", description="Temperature-1 tile assembly analysis")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, window: int) -> None:
        p.add_argument("tas", help="TAS document (JSON)")
        p.add_argument("--window", type=int, default=window, help="half-size of the square window")
        p.add_argument("--margin", type=int, default=None, help="growth margin around the window")

    b = sub.add_parser("build", help="run the quipu filtration")
    common(b, 20)
    b.add_argument("--cap", type=int, default=12, help="largest |m|+|p| considered")
    b.add_argument("--order", default=DEFAULT_ORDER, help="direction order, e.g. SEWN")
    b.add_argument("--out", help="write the result document here")
    b.add_argument("--dot", help="write a DOT graph of the quipu here")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("simulate", help="grow the maximal assembly in a window")
    common(s, 10)
    s.add_argument("--svg", help="write an SVG rendering here")
    s.add_argument("--out", help="write the placements document here")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="compare a quipu with the window assembly")
    common(v, 20)
    v.add_argument("quipu", help="quipu document produced by build")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check-confluence", help="search for a confluence witness")
    common(c, 10)
    c.set_defaults(func=cmd_check_confluence)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    try:
        return args.func(args)
    except (ParseError, InvalidQuipu, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
