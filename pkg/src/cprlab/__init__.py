"""cprlab: carrier-phase-recovery laboratory for n-PSK coherent optical links."""

__version__ = "0.1.0"

from .noise import (C_LIGHT, LinkParams, PhaseTrack, crossover_distance,
                    effective_linewidth, eepn_variance, generate_wiener_phase,
                    laser_pn_variance, total_variance)
from .modem import Constellation, SymbolFrame, count_errors, hard_decide, modulate
from .channel import add_awgn, apply_cd, apply_phase, eepn_path
from .analytics import (FloorQuery, bwa_symbol_variance, coding_rate, complexity,
                        erfc, floor_bwa, floor_nlms, floor_vv, spectral_efficiency)
from .cpr import CprConfig, CprOutput, bwa, nlms, optimize_mu, unwrap_ambiguity, vv
from .experiments import (FloorResult, McSettings, Scenario, SweepSpec,
                          measure_floor, preset_spec, run_sweep)

__all__ = [
    "C_LIGHT", "LinkParams", "PhaseTrack", "crossover_distance",
    "effective_linewidth", "eepn_variance", "generate_wiener_phase",
    "laser_pn_variance", "total_variance",
    "Constellation", "SymbolFrame", "count_errors", "hard_decide", "modulate",
    "add_awgn", "apply_cd", "apply_phase", "eepn_path",
    "FloorQuery", "bwa_symbol_variance", "coding_rate", "complexity", "erfc",
    "floor_bwa", "floor_nlms", "floor_vv", "spectral_efficiency",
    "CprConfig", "CprOutput", "bwa", "nlms", "optimize_mu", "unwrap_ambiguity", "vv",
    "FloorResult", "McSettings", "Scenario", "SweepSpec", "measure_floor",
    "preset_spec", "run_sweep",
    "__version__",
]
