from .config import RunConfig, load_config, parse_config, serialize
from .experiments import COMMANDS, cmd_eig, cmd_ksweep, cmd_refine, cmd_stepstudy
from .svg import emit_svg
from .table import CsvTable

__all__ = ["RunConfig", "load_config", "parse_config", "serialize", "COMMANDS",
           "cmd_eig", "cmd_ksweep", "cmd_refine", "cmd_stepstudy", "emit_svg", "CsvTable"]
