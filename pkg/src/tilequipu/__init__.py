"""Temperature-1 tile assembly analysis with quipu automata."""
from importlib.resources import files

from .filtration import FiltrationConfig, FiltrationResult, run_filtration
from .paths import UltimatelyPeriodic, Window
from .quipu import Quipu
from .tas import TAS, TileType, load_tas


def example(name: str) -> TAS:
    """Load a bundled system: "ex1", "grid1" or "bad1"."""
    return load_tas((files(__package__) / "data" / f"{name}.json").read_text())


__all__ = ["FiltrationConfig", "FiltrationResult", "Quipu", "TAS", "TileType",
           "UltimatelyPeriodic", "Window", "example", "load_tas", "run_filtration"]
