"""Monte-Carlo BER-floor measurement and the named sweeps behind the figure datasets.

Floors are measured noiseless by default (the phase-noise-limited asymptote).
Each frame draws from an independent, schedule-independent RNG stream derived
as SeedSequence(base_seed, spawn_key=(point_index, frame_index)), with a fixed
draw order (phase increments, then symbol data, then any additive noise), so a
result is reproducible regardless of how frames are batched.

For the floor cross-validation runs the harness pairs each algorithm with the
decoding convention its closed-form floor actually models: differential
decoding for the NLMS loop, genie-referenced absolute decoding with
phase-domain averaging for the two n-th-power algorithms.  When a scenario is
noiseless the estimator chain collapses algebraically (NLMS at mu=1 reduces to
increment quantization; genie phase-averaging BWA/VV reduce to exact block or
window means of the true phase), and the harness uses equivalent fast kernels;
`tests/test_experiments.py` pins fast-vs-generic equality on shared streams.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional

import numba
import numpy as np
from scipy.stats import beta as _beta

from . import analytics
from .analytics import FloorQuery
from .channel import eepn_path, guard_symbols
from .cpr import CprConfig, run_cpr
from .modem import Constellation, _POPCOUNT, indices_to_bits, modulate, decide_indices
from .noise import LinkParams, PhaseTrack, total_variance

DECODING_MODES = ("differential", "genie-referenced")
EEPN_MODES = ("variance-equivalent", "physical")

MIN_MC_SYMBOLS = 10_000

#: default per-point budget rule: max(1e6, 100/floor) capped at 1e8 bits-worth
BUDGET_TARGET_ERRORS = 100
BUDGET_MIN_SYMBOLS = 1_000_000
BUDGET_CAP_SYMBOLS = 100_000_000


@dataclass(frozen=True)
class Scenario:
    """One physics + algorithm configuration for a floor measurement."""

    algorithm: str
    order: int
    sigma2_total: Optional[float] = None
    link: Optional[LinkParams] = None
    block_length: int = 11
    mu: float = 1.0
    decoding: Optional[str] = None      # None -> per-algorithm default
    eepn: str = "variance-equivalent"
    snr_db: Optional[float] = None      # None -> noiseless
    averaging: Optional[str] = None     # None -> per-decoding default (bwa/vv)

    def __post_init__(self):
        if self.algorithm not in analytics.ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.sigma2_total is None and self.link is None:
            raise ValueError("scenario needs sigma2_total or a link")
        if self.decoding is not None and self.decoding not in DECODING_MODES:
            raise ValueError(f"decoding must be one of {DECODING_MODES}")
        if self.eepn not in EEPN_MODES:
            raise ValueError(f"eepn must be one of {EEPN_MODES}")
        if self.eepn == "physical" and self.link is None:
            raise ValueError("physical EEPN injection needs a link")

    @property
    def sigma2(self) -> float:
        if self.sigma2_total is not None:
            return self.sigma2_total
        return total_variance(self.link)

    @property
    def decoding_mode(self) -> str:
        if self.decoding is not None:
            return self.decoding
        return "differential" if self.algorithm == "nlms" else "genie-referenced"

    @property
    def averaging_mode(self) -> str:
        if self.averaging is not None:
            return self.averaging
        # the closed-form floors model linear phase averaging; keep the raw
        # phasor form for differential runs of the n-th-power algorithms
        return "phase" if self.decoding_mode == "genie-referenced" else "phasor"

    def floor_query(self) -> FloorQuery:
        return FloorQuery(order=self.order, sigma2_total=self.sigma2,
                          algorithm=self.algorithm, block_length=self.block_length)


@dataclass(frozen=True)
class McSettings:
    symbols_per_point: Optional[int] = None   # None -> default_symbol_budget
    frame_length: int = 1 << 16
    base_seed: int = 0
    point_index: int = 0


@dataclass(frozen=True)
class FloorResult:
    """One measured-or-analytic BER-floor data point with full provenance."""

    algorithm: str
    order: int
    block_length: int
    sigma2_total: float
    mu: float
    decoding: str
    eepn: str
    mode: str
    analytic_floor: float
    measured_floor: Optional[float] = None
    below_resolution: Optional[bool] = None
    bit_errors: int = 0
    bits: int = 0
    symbol_errors: int = 0
    symbols: int = 0
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    seed: Optional[int] = None
    runtime_s: float = 0.0
    linewidth_hz: Optional[float] = None
    distance_km: Optional[float] = None


def binomial_ci(errors: int, trials: int, confidence: float = 0.95):
    """Clopper-Pearson interval, stable for very large trial counts."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    alpha = 1.0 - confidence
    lo = 0.0 if errors == 0 else float(_beta.ppf(alpha / 2, errors, trials - errors + 1))
    hi = 1.0 if errors == trials else float(_beta.ppf(1 - alpha / 2, errors + 1, trials - errors))
    return lo, hi


def default_symbol_budget(analytic_floor: float, bits_per_symbol: int) -> int:
    """max(1e6, enough for ~100 expected errors), capped at 1e8 symbols."""
    if analytic_floor <= 0:
        return BUDGET_MIN_SYMBOLS
    need = BUDGET_TARGET_ERRORS / (analytic_floor * bits_per_symbol)
    return int(min(BUDGET_CAP_SYMBOLS, max(BUDGET_MIN_SYMBOLS, np.ceil(need))))


def _frame_rng(base_seed: int, point_index: int, frame_index: int):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=base_seed, spawn_key=(point_index, frame_index)))


# ---------------------------------------------------------------------------
# fast kernels (noiseless, variance-equivalent): algebraic collapses of the
# generic pipeline, consuming the identical RNG stream
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _nlms_fast_loop(g, data, labels, pop, order, period, prefix):  # pragma: no cover
    half = 0.5 * period
    be = 0
    se = 0
    for j in range(prefix, data.shape[0]):
        d = g[j + 1]
        if d > half or d < -half:
            s = int(np.rint(d / period))
            di = ((data[j] + s) % order + order) % order
            be += pop[labels[di] ^ labels[data[j]]]
            se += 1
    return be, se


def _counts_nlms_fast(rng, order: int, sigma2: float, frame_len: int, prefix: int):
    # at mu=1 the decision-directed loop reduces to per-symbol increment
    # quantization: decoded_increment = data + rint(g/period)
    period = 2.0 * np.pi / order
    bps = int(np.log2(order))
    g = rng.standard_normal(frame_len) * np.sqrt(sigma2)
    data = rng.integers(0, order, frame_len - 1)
    labels = np.array([m ^ (m >> 1) for m in range(order)], dtype=np.int64)
    be, se = _nlms_fast_loop(g, data, labels, _POPCOUNT, order, period, prefix)
    symbols = len(data) - prefix
    return int(be), symbols * bps, int(se), symbols


@numba.njit(cache=True)
def _vv_fast_loop(g, m, labels, pop, order, half, period):  # pragma: no cover
    # phi accumulated exactly like np.cumsum; window sums via a delayed ring
    # of cumsum prefixes, matching the cumsum-difference rounding bit for bit
    f = g.shape[0]
    n_win = 2 * half + 1
    phi = np.empty(f, np.float64)
    acc = 0.0
    for k in range(f):
        acc += g[k]
        phi[k] = acc
    ring = np.zeros(n_win + 1, np.float64)
    c = 0.0
    boundary = 0.5 * period
    be = 0
    se = 0
    for j in range(f):
        c += phi[j]
        ring[(j + 1) % (n_win + 1)] = c
        k = j - half
        if k < half:
            continue
        if k >= f - half:
            break
        w = c - ring[(j - n_win + 1) % (n_win + 1)]
        d = phi[k] - w / n_win
        if d > boundary or d < -boundary:
            s = int(np.rint(d / period))
            di = ((m[k] + s) % order + order) % order
            be += pop[labels[di] ^ labels[m[k]]]
            se += 1
    return be, se


def _counts_block_fast(rng, algorithm: str, order: int, sigma2: float,
                       frame_len: int, block: int):
    # genie-referenced phase-averaging BWA/VV: the estimate equals the exact
    # block (or truncated window) mean of the true phase track
    period = 2.0 * np.pi / order
    bps = int(np.log2(order))
    g = rng.standard_normal(frame_len) * np.sqrt(sigma2)
    g[0] = 0.0
    m = rng.integers(0, order, frame_len)
    labels = np.array([q ^ (q >> 1) for q in range(order)], dtype=np.int64)
    if algorithm == "bwa":
        phi = np.cumsum(g)
        starts = np.arange(0, frame_len, block)
        counts = np.minimum(starts + block, frame_len) - starts
        est_b = np.add.reduceat(phi, starts) / counts
        est = np.repeat(est_b, counts)
        shift = np.rint((phi - est) / period).astype(np.int64)
        d = m
        bit_errors = int(_POPCOUNT[labels[(d + shift) % order] ^ labels[d]].sum())
        symbol_errors = int(np.count_nonzero(shift))
        symbols = frame_len
    else:
        half = (block - 1) // 2
        be, se = _vv_fast_loop(g, m, labels, _POPCOUNT, order, half, period)
        bit_errors, symbol_errors = int(be), int(se)
        symbols = frame_len - 2 * half   # truncated edge windows excluded
    return bit_errors, symbols * bps, symbol_errors, symbols


# ---------------------------------------------------------------------------
# generic per-frame pipeline: noise -> modem -> channel -> cpr -> counting
# ---------------------------------------------------------------------------

def _counts_generic(rng, scenario: Scenario, frame_len: int, prefix: int):
    const = Constellation(scenario.order)
    bps = const.bits_per_symbol
    sigma2 = scenario.sigma2
    differential = scenario.decoding_mode == "differential"

    if scenario.eepn == "physical":
        link = scenario.link
        g_tx = rng.standard_normal(frame_len) * np.sqrt(
            2.0 * np.pi * link.delta_f_tx * link.symbol_period)
        g_lo = rng.standard_normal(frame_len) * np.sqrt(
            2.0 * np.pi * link.delta_f_lo * link.symbol_period)
        g_tx[0] = g_lo[0] = 0.0
        tx_track = PhaseTrack(np.cumsum(g_tx), 0.0, 0)
        lo_track = PhaseTrack(np.cumsum(g_lo), 0.0, 0)
        track = PhaseTrack(tx_track.phases + lo_track.phases, sigma2, 0)
    else:
        g = rng.standard_normal(frame_len) * np.sqrt(sigma2)
        g[0] = 0.0
        track = PhaseTrack(np.cumsum(g), sigma2, 0)

    n_data = frame_len - 1 if differential else frame_len
    data = rng.integers(0, scenario.order, n_data)
    bits = indices_to_bits(data, const)
    frame = modulate(bits, const, differential=differential, true_phase=track)

    if scenario.eepn == "physical":
        awgn_seed = int(rng.integers(1 << 62))
        frame = eepn_path(frame, scenario.link, tx_track, lo_track,
                          scenario.snr_db, awgn_seed)
        rx = frame.rx_symbols
        guard = guard_symbols(scenario.link)
    else:
        rx = frame.tx_symbols * np.exp(1j * track.phases)
        if scenario.snr_db is not None:
            noise_var = 1.0 / 10.0 ** (scenario.snr_db / 10.0)
            scale = np.sqrt(noise_var / 2.0)
            rx = rx + scale * (rng.standard_normal(frame_len)
                               + 1j * rng.standard_normal(frame_len))
        guard = 0

    unwrap = "genie" if scenario.decoding_mode == "genie-referenced" else "previous-estimate"
    cfg = CprConfig(algorithm=scenario.algorithm, mu=scenario.mu,
                    block_length_bwa=scenario.block_length,
                    block_length_vv=scenario.block_length,
                    unwrap=unwrap, averaging=scenario.averaging_mode,
                    training_prefix=prefix)
    out = run_cpr(rx, const, cfg, genie=track,
                  training_indices=frame.tx_indices if scenario.algorithm == "nlms" else None)

    if scenario.algorithm == "nlms":
        didx = out.aux["decisions"]
    else:
        didx = decide_indices(out.corrected_symbols, const)

    lo_cut = guard
    hi_cut = frame_len - guard
    if scenario.algorithm == "vv":
        half = (scenario.block_length - 1) // 2
        lo_cut = max(lo_cut, half)
        hi_cut = min(hi_cut, frame_len - half)
    if scenario.algorithm == "nlms":
        lo_cut = max(lo_cut, out.aux["training_prefix"])

    labels = const.gray_labels
    if differential:
        tx_d = (frame.tx_indices[1:] - frame.tx_indices[:-1]) % scenario.order
        rx_d = (didx[1:] - didx[:-1]) % scenario.order
        sl = slice(lo_cut, hi_cut - 1)
        tx_d, rx_d = tx_d[sl], rx_d[sl]
    else:
        sl = slice(lo_cut, hi_cut)
        tx_d, rx_d = frame.tx_indices[sl], didx[sl]
    bit_errors = int(_POPCOUNT[labels[tx_d] ^ labels[rx_d]].sum())
    symbol_errors = int(np.count_nonzero(tx_d != rx_d))
    symbols = len(tx_d)
    return bit_errors, symbols * bps, symbol_errors, symbols


def _fast_path(scenario: Scenario) -> Optional[str]:
    if scenario.snr_db is not None or scenario.eepn != "variance-equivalent":
        return None
    if scenario.algorithm == "nlms":
        if scenario.decoding_mode == "differential" and scenario.mu == 1.0:
            return "nlms"
        return None
    if scenario.decoding_mode == "genie-referenced" and scenario.averaging_mode == "phase":
        return "block"
    return None


def measure_floor(scenario: Scenario, mc: McSettings,
                  training_prefix: int = 500) -> FloorResult:
    """Measure the BER floor of one scenario by Monte Carlo.

    Deterministic for a given base seed.  A result with zero observed errors
    is flagged below-resolution (the floor is below 1/bits) instead of being
    reported as zero.
    """
    query = scenario.floor_query()
    analytic = analytics.analytic_floor(query)
    const_bps = int(np.log2(scenario.order))
    symbols = mc.symbols_per_point
    if symbols is None:
        symbols = default_symbol_budget(analytic, const_bps)
    if symbols < MIN_MC_SYMBOLS:
        raise ValueError(f"montecarlo mode needs >= {MIN_MC_SYMBOLS} symbols per point")
    n_frames = int(np.ceil(symbols / mc.frame_length))
    path = _fast_path(scenario)

    t0 = time.perf_counter()
    be = bits = se = sy = 0
    for fi in range(n_frames):
        rng = _frame_rng(mc.base_seed, mc.point_index, fi)
        if path == "nlms":
            r = _counts_nlms_fast(rng, scenario.order, scenario.sigma2,
                                  mc.frame_length, training_prefix)
        elif path == "block":
            r = _counts_block_fast(rng, scenario.algorithm, scenario.order,
                                   scenario.sigma2, mc.frame_length,
                                   scenario.block_length)
        else:
            r = _counts_generic(rng, scenario, mc.frame_length, training_prefix)
        be += r[0]; bits += r[1]; se += r[2]; sy += r[3]
    runtime = time.perf_counter() - t0

    below = be == 0
    measured = None if below else be / bits
    ci_low, ci_high = binomial_ci(be, bits)
    link = scenario.link
    return FloorResult(
        algorithm=scenario.algorithm, order=scenario.order,
        block_length=scenario.block_length, sigma2_total=scenario.sigma2,
        mu=scenario.mu, decoding=scenario.decoding_mode, eepn=scenario.eepn,
        mode="montecarlo", analytic_floor=analytic, measured_floor=measured,
        below_resolution=below, bit_errors=be, bits=bits, symbol_errors=se,
        symbols=sy, ci_low=ci_low, ci_high=ci_high, seed=mc.base_seed,
        runtime_s=runtime,
        linewidth_hz=link.delta_f_lo if link is not None else None,
        distance_km=link.fiber_length_km if link is not None else None)


def analytic_point(scenario: Scenario) -> FloorResult:
    link = scenario.link
    return FloorResult(
        algorithm=scenario.algorithm, order=scenario.order,
        block_length=scenario.block_length, sigma2_total=scenario.sigma2,
        mu=scenario.mu, decoding=scenario.decoding_mode, eepn=scenario.eepn,
        mode="analytic", analytic_floor=analytics.analytic_floor(scenario.floor_query()),
        linewidth_hz=link.delta_f_lo if link is not None else None,
        distance_km=link.fiber_length_km if link is not None else None)


# ---------------------------------------------------------------------------
# physical EEPN validation
# ---------------------------------------------------------------------------

def eepn_phase_error_variance(link: LinkParams, n_symbols: int, seed: int,
                              order: int = 4, frame_length: int = 1 << 16):
    """Measured phase-error variance of the physical EEPN path.

    Runs tx -> CD -> LO phase -> EDC frames (noiseless, zero tx track),
    removes the modulation and the raw LO rotation, discards the guard
    symbols, and returns the mean per-frame variance of the residual phase.
    """
    const = Constellation(order)
    guard = guard_symbols(link)
    if frame_length <= 2 * guard + 1:
        raise ValueError("frame too short for the CD guard interval")
    sig_lo = np.sqrt(2.0 * np.pi * link.delta_f_lo * link.symbol_period)
    n_frames = int(np.ceil(n_symbols / frame_length))
    variances = []
    for fi in range(n_frames):
        rng = _frame_rng(seed, 0, fi)
        g = rng.standard_normal(frame_length) * sig_lo
        g[0] = 0.0
        lo = PhaseTrack(np.cumsum(g), sig_lo ** 2, seed)
        zero = PhaseTrack(np.zeros(frame_length), 0.0, seed)
        data = rng.integers(0, order, frame_length)
        frame = modulate(indices_to_bits(data, const), const, true_phase=zero)
        out = eepn_path(frame, link, zero, lo, None, 0)
        resid = out.rx_symbols * np.conj(frame.tx_symbols) * np.exp(-1j * lo.phases)
        theta = np.angle(resid)[guard:frame_length - guard]
        variances.append(float(np.var(theta)))
    return float(np.mean(variances)), guard


# ---------------------------------------------------------------------------
# sweeps and figure presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """A Cartesian sweep over scenario axes.

    axes keys: algorithm, order, block_length, sigma2, linewidth, distance_km.
    base holds the fixed scenario fields; linewidth/distance axes derive the
    total variance through the link formulas.
    """

    axes: dict
    base: dict
    mode: str = "analytic"
    mc: Optional[McSettings] = None
    preset: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("analytic", "montecarlo", "both"):
            raise ValueError("mode must be analytic, montecarlo or both")
        if not self.axes or any(len(v) == 0 for v in self.axes.values()):
            raise ValueError("sweep axes must be nonempty")


_VAR_GRID = tuple(np.logspace(-3, -1, 25))
_VAR_GRID_WIDE = tuple(np.logspace(-3, np.log10(0.3), 25))
_LW_GRID = tuple(np.logspace(5, 8, 25))
_DIST_GRID_KM = tuple(np.linspace(0.0, 5000.0, 21))
_ORDERS = (4, 8, 16, 32)
_BLOCK_GRID = (5, 11, 17, 25)

_BASE_LINK = dict(symbol_rate=32e9, wavelength=1550e-9, dispersion_ps_nm_km=17.0)


def _preset(axes, base, description):
    return {"axes": axes, "base": base, "description": description}


PRESETS = {
    "fig5": _preset({"order": _ORDERS, "sigma2": _VAR_GRID},
                    {"algorithm": "nlms"},
                    "NLMS floor vs phase-noise variance, four orders"),
    "fig6": _preset({"order": _ORDERS, "linewidth": _LW_GRID},
                    {"algorithm": "nlms"},
                    "NLMS floor vs laser linewidth, back-to-back"),
    "fig7": _preset({"order": _ORDERS, "distance_km": _DIST_GRID_KM},
                    {"algorithm": "nlms"},
                    "NLMS floor vs distance, 1 MHz lasers"),
    "fig8a": _preset({"block_length": _BLOCK_GRID, "sigma2": _VAR_GRID},
                     {"algorithm": "bwa", "order": 8},
                     "BWA floor vs variance for several block lengths, 8-PSK"),
    "fig8b": _preset({"order": _ORDERS, "sigma2": _VAR_GRID},
                     {"algorithm": "bwa"},
                     "BWA floor vs phase-noise variance, four orders, N=11"),
    "fig9": _preset({"order": _ORDERS, "linewidth": _LW_GRID},
                    {"algorithm": "bwa"},
                    "BWA floor vs laser linewidth, back-to-back, N=11"),
    "fig10": _preset({"order": _ORDERS, "distance_km": _DIST_GRID_KM},
                     {"algorithm": "bwa"},
                     "BWA floor vs distance, 1 MHz lasers, N=11"),
    "fig11a": _preset({"block_length": _BLOCK_GRID, "sigma2": _VAR_GRID},
                      {"algorithm": "vv", "order": 8},
                      "VV floor vs variance for several block lengths, 8-PSK"),
    "fig11b": _preset({"order": _ORDERS, "sigma2": _VAR_GRID},
                      {"algorithm": "vv"},
                      "VV floor vs phase-noise variance, four orders, N=11"),
    "fig12": _preset({"order": _ORDERS, "linewidth": _LW_GRID},
                     {"algorithm": "vv"},
                     "VV floor vs laser linewidth, back-to-back, N=11"),
    "fig13": _preset({"order": _ORDERS, "distance_km": _DIST_GRID_KM},
                     {"algorithm": "vv"},
                     "VV floor vs distance, 1 MHz lasers, N=11"),
    "fig14a": _preset({"algorithm": ("nlms", "bwa", "vv"), "sigma2": _VAR_GRID_WIDE},
                      {"order": 8, "block_length": 5},
                      "Three algorithms vs variance, 8-PSK, N=5"),
    "fig14b": _preset({"algorithm": ("nlms", "bwa", "vv"), "sigma2": _VAR_GRID_WIDE},
                      {"order": 8, "block_length": 11},
                      "Three algorithms vs variance, 8-PSK, N=11"),
    "fig14c": _preset({"algorithm": ("nlms", "bwa", "vv"), "sigma2": _VAR_GRID_WIDE},
                      {"order": 8, "block_length": 17},
                      "Three algorithms vs variance, 8-PSK, N=17"),
    "fig15": _preset({"algorithm": ("nlms", "bwa", "vv"), "order": _ORDERS,
                      "sigma2": _VAR_GRID},
                     {},
                     "Three algorithms x four orders vs variance, N=11"),
    "fig16": _preset({"algorithm": ("nlms", "bwa", "vv"), "order": _ORDERS,
                      "distance_km": _DIST_GRID_KM},
                     {},
                     "Three algorithms x four orders vs distance, N=11"),
}


def preset_spec(name: str, mode: str = "analytic",
                mc: Optional[McSettings] = None) -> SweepSpec:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; known presets: {known}")
    p = PRESETS[name]
    return SweepSpec(axes=dict(p["axes"]), base=dict(p["base"]), mode=mode,
                     mc=mc, preset=name)


def _axis_link(base: dict, linewidth: Optional[float],
               distance_km: Optional[float]) -> LinkParams:
    if linewidth is not None:
        return LinkParams.from_practical(delta_f_tx=linewidth, delta_f_lo=linewidth,
                                         fiber_length_km=0.0, **_BASE_LINK)
    return LinkParams.from_practical(delta_f_tx=1e6, delta_f_lo=1e6,
                                     fiber_length_km=distance_km, **_BASE_LINK)


def _point_scenario(base: dict, point: dict) -> tuple[Scenario, dict]:
    merged = {**base, **point}
    linewidth = merged.pop("linewidth", None)
    distance_km = merged.pop("distance_km", None)
    if ("sigma2" in merged) + (linewidth is not None) + (distance_km is not None) != 1:
        raise ValueError("exactly one variance specification is required "
                         "(sigma2 | linewidth | distance)")
    if "sigma2" in merged:
        sigma2, link = merged.pop("sigma2"), None
    else:
        link = _axis_link(merged, linewidth, distance_km)
        sigma2 = None
    sc = Scenario(algorithm=merged.pop("algorithm"),
                  order=int(merged.pop("order", 8)),
                  sigma2_total=sigma2, link=link,
                  block_length=int(merged.pop("block_length", 11)),
                  mu=float(merged.pop("mu", 1.0)),
                  decoding=merged.pop("decoding", None),
                  eepn=merged.pop("eepn", "variance-equivalent"),
                  snr_db=merged.pop("snr_db", None),
                  averaging=merged.pop("averaging", None))
    if merged:
        raise ValueError(f"unknown sweep parameters: {sorted(merged)}")
    extra = {"linewidth_hz": linewidth, "distance_km": distance_km}
    return sc, extra


def run_sweep(spec: SweepSpec) -> list[FloorResult]:
    """Cartesian-product evaluation of a sweep; deterministic point order."""
    keys = list(spec.axes)
    grids = [list(spec.axes[k]) for k in keys]
    shape = [len(g) for g in grids]
    results = []
    mc = spec.mc or McSettings()
    for flat in range(int(np.prod(shape))):
        idx = np.unravel_index(flat, shape)
        point = {k: grids[i][idx[i]] for i, k in enumerate(keys)}
        scenario, extra = _point_scenario(spec.base, point)
        if spec.mode in ("analytic", "both"):
            res = analytic_point(scenario)
        if spec.mode in ("montecarlo", "both"):
            mres = measure_floor(scenario, replace(mc, point_index=flat))
            if spec.mode == "both":
                res = replace(mres, mode="both")
            else:
                res = mres
        if extra["linewidth_hz"] is not None:
            res = replace(res, linewidth_hz=extra["linewidth_hz"])
        if extra["distance_km"] is not None:
            res = replace(res, distance_km=extra["distance_km"])
        results.append(res)
    return results
