"""Check how the filtration outcome on EX1 depends on window size and cap.

Small windows or caps should degrade to inconclusive, never to a wrong halt:
every halt is compared with direct growth on a larger window.
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from tilequipu import example
from tilequipu.filtration import FiltrationConfig, run_filtration
from tilequipu.paths import Window
from tilequipu.quipu import alpha_within
from tilequipu.tas import grow_max


@dataclass(frozen=True)
class Sweep:
    name: str = "ex1"
    windows: tuple[int, ...] = (6, 8, 10, 14, 20, 28)
    caps: tuple[int, ...] = (3, 4, 6, 12)
    check_window: int = 35


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--name", default="ex1")
    cfg = Sweep(name=ap.parse_args().name)
    tas = example(cfg.name)
    big = Window.square(cfg.check_window, 0)
    reference = grow_max(tas, big).placements
    print(f"{'window':>6} {'cap':>4} {'outcome':>14} {'time':>7} agrees-at-{cfg.check_window}")
    for w in cfg.windows:
        for cap in cfg.caps:
            t0 = time.perf_counter()
            res = run_filtration(tas, FiltrationConfig(window=w, cap=cap))
            dt = time.perf_counter() - t0
            agrees = "-"
            if res.outcome == "halt":
                agrees = str(alpha_within(res.quipu, big).placements == reference)
            print(f"{w:>6} {cap:>4} {res.outcome:>14} {dt:6.2f}s {agrees}")


if __name__ == "__main__":
    main()
