"""Run the filtration on the bundled example systems and write artifacts."""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import dataclass
from pathlib import Path

from tilequipu import example
from tilequipu.filtration import FiltrationConfig, run_filtration
from tilequipu.paths import Window
from tilequipu.quipu import to_dot
from tilequipu.render import assembly_svg
from tilequipu.tas import NotConfluent, grow_max


@dataclass(frozen=True)
class ExampleRun:
    names: tuple[str, ...] = ("ex1", "grid1", "bad1")
    window: int = 20
    cap: int = 12
    svg_window: int = 6


def run(cfg: ExampleRun, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in cfg.names:
        tas = example(name)
        t0 = time.perf_counter()
        res = run_filtration(tas, FiltrationConfig(window=cfg.window, cap=cfg.cap))
        elapsed = time.perf_counter() - t0
        (out_dir / f"{name}.result.json").write_text(
            json.dumps(res.to_document(), indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        if res.quipu is not None:
            (out_dir / f"{name}.quipu.dot").write_text(to_dot(res.quipu))
        try:
            asm = grow_max(tas, Window.square(cfg.svg_window))
            (out_dir / f"{name}.svg").write_text(assembly_svg(asm, tas))
        except NotConfluent:
            pass
        extra = ""
        if res.outcome == "halt":
            extra = f" vertices={len(res.quipu)} cycles={' '.join(res.cycle_trace)}"
        elif res.witness is not None:
            extra = f" witness={res.witness.to_document()}"
        elif res.conflict is not None:
            extra = f" point={res.conflict.point} tiles={sorted(res.conflict.tiles)}"
        print(f"{name:6s} {res.outcome:14s} {elapsed:6.2f}s{extra}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="artifacts", help="output directory")
    ap.add_argument("--window", type=int, default=20)
    ap.add_argument("--cap", type=int, default=12)
    args = ap.parse_args()
    run(ExampleRun(window=args.window, cap=args.cap), Path(args.out))


if __name__ == "__main__":
    main()
