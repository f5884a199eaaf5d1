"""The three carrier-phase-recovery algorithms.

``bwa`` and ``vv`` support two averaging conventions.  The default,
``averaging="phasor"``, is the usual n-th-power form: the estimate is
arg() of the summed n-th-power phasors, divided by n.  ``averaging="phase"``
sums the (ambiguity-resolved) n-th-power phase angles linearly before dividing
by n; this is the linearized form the closed-form floor expressions model, and
it is what the Monte-Carlo floor harness uses for its cross-validation runs.

The n-th-power operation leaves a 2*pi/n ambiguity which is resolved per the
configured unwrap policy: "previous-estimate" keeps the estimate sequence
continuous, "genie" snaps each estimate to the branch nearest its own
estimation target (the mean of the true phase over the block/window).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .noise import PhaseTrack, generate_wiener_phase
from .modem import Constellation, modulate, count_errors
from .channel import add_awgn, apply_phase

UNWRAP_POLICIES = ("previous-estimate", "genie")
AVERAGING_MODES = ("phasor", "phase")


@dataclass(frozen=True)
class CprConfig:
    algorithm: str
    mu: float = 0.5
    block_length_bwa: int = 11
    block_length_vv: int = 11
    unwrap: str = "previous-estimate"
    averaging: str = "phasor"
    training_prefix: int = 500

    def __post_init__(self):
        if self.algorithm not in ("nlms", "bwa", "vv"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0.0 < self.mu <= 1.0:
            raise ValueError("step size mu must satisfy 0 < mu <= 1")
        if self.block_length_bwa < 1:
            raise ValueError("N_BWA must be >= 1")
        if self.block_length_vv < 1 or self.block_length_vv % 2 == 0:
            raise ValueError("N_VV must be odd")
        if self.unwrap not in UNWRAP_POLICIES:
            raise ValueError(f"unwrap must be one of {UNWRAP_POLICIES}")
        if self.averaging not in AVERAGING_MODES:
            raise ValueError(f"averaging must be one of {AVERAGING_MODES}")


@dataclass
class CprOutput:
    estimated_phase: np.ndarray
    corrected_symbols: np.ndarray
    aux: dict = field(default_factory=dict)


def _reference_phases(genie) -> np.ndarray:
    return genie.phases if isinstance(genie, PhaseTrack) else np.asarray(genie, dtype=float)


def unwrap_ambiguity(raw_phases: np.ndarray, order: int,
                     policy: str = "previous-estimate",
                     genie=None) -> np.ndarray:
    """Resolve the 2*pi/order ambiguity of a phase-estimate sequence.

    previous-estimate: add to each value the multiple of 2*pi/order that
    minimizes the distance to the previous resolved value (the first value is
    anchored to the genie when one is supplied, else kept as-is).
    genie: snap every value to the branch nearest the reference track.
    """
    raw = np.asarray(raw_phases, dtype=float)
    period = 2.0 * np.pi / order
    if policy == "genie":
        if genie is None:
            raise ValueError("genie unwrap policy requires a genie track")
        ref = _reference_phases(genie)
        return raw + period * np.rint((ref - raw) / period)
    if policy != "previous-estimate":
        raise ValueError(f"unknown unwrap policy {policy!r}")
    out = np.unwrap(raw, period=period)
    if genie is not None:
        ref = _reference_phases(genie)
        out = out + period * np.rint((ref[0] - out[0]) / period)
    return out


@numba.njit(cache=True)
def _nlms_loop(rx, train_idx, n_train, order, mu):  # pragma: no cover - jitted
    period = 2.0 * np.pi / order
    f = rx.shape[0]
    w_traj = np.empty(f, np.complex128)
    decisions = np.empty(f, np.int64)
    w = 1.0 + 0.0j
    for k in range(f):
        x = rx[k]
        w_traj[k] = w
        y = w * x
        if k < n_train:
            di = train_idx[k]
        else:
            ang = np.arctan2(y.imag, y.real)
            di = int(np.rint(ang / period)) % order
        decisions[k] = di
        d = np.cos(period * di) + 1j * np.sin(period * di)
        e = d - y
        w = w + mu * e * np.conj(x) / (x.real * x.real + x.imag * x.imag)
    return w_traj, decisions


def nlms(rx: np.ndarray, constellation: Constellation, config: CprConfig,
         training_indices: Optional[np.ndarray] = None) -> CprOutput:
    """Decision-directed one-tap normalized LMS:
    y(k) = w(k) x(k);  e(k) = d(k) - y(k);
    w(k+1) = w(k) + mu e(k) x*(k) / |x(k)|^2;  w(0) = 1.

    ``training_indices`` (true symbol indices) drive d(k) for the first
    ``config.training_prefix`` symbols; afterwards d(k) is the hard decision.
    """
    rx = np.asarray(rx, dtype=np.complex128)
    if len(rx) == 0:
        raise ValueError("rx must be nonempty")
    if np.any(rx == 0):
        raise ValueError("zero-magnitude sample: NLMS normalization undefined")
    if training_indices is None:
        train = np.empty(0, dtype=np.int64)
        n_train = 0
    else:
        train = np.asarray(training_indices, dtype=np.int64)
        n_train = min(config.training_prefix, len(train), len(rx))
    w_traj, decisions = _nlms_loop(rx, train, n_train, constellation.order, config.mu)
    est = -np.angle(w_traj)
    corrected = rx * np.exp(-1j * est)
    return CprOutput(estimated_phase=est, corrected_symbols=corrected,
                     aux={"weights": w_traj, "decisions": decisions,
                          "training_prefix": n_train})


def _unit(rx: np.ndarray) -> np.ndarray:
    mag = np.abs(rx)
    safe = np.where(mag == 0, 1.0, mag)
    return rx / safe


def _nth_power(z: np.ndarray, order: int) -> np.ndarray:
    # repeated squaring of unit-normalized samples; order is a power of two
    out = z
    m = order
    while m > 1:
        out = out * out
        m //= 2
    return out


def _resolved_power_phase(rx: np.ndarray, order: int, unwrap: str,
                          genie) -> np.ndarray:
    """Per-symbol n-th-power phase with its 2*pi ambiguity resolved."""
    pn = np.angle(_nth_power(_unit(rx), order))
    if unwrap == "genie":
        if genie is None:
            raise ValueError("genie unwrap policy requires a genie track")
        ref = order * _reference_phases(genie)
        return pn + 2.0 * np.pi * np.rint((ref - pn) / (2.0 * np.pi))
    out = np.unwrap(pn)
    if genie is not None:
        ref = order * _reference_phases(genie)
        out = out + 2.0 * np.pi * np.rint((ref[0] - out[0]) / (2.0 * np.pi))
    return out


def bwa(rx: np.ndarray, constellation: Constellation, config: CprConfig,
        genie: Optional[PhaseTrack] = None) -> CprOutput:
    """Block-wise average: one estimate per consecutive block of N_BWA symbols,
    phi = (1/n) arg(sum x^n) over the block, applied to every symbol of the
    block.  The final short block is processed at its actual length."""
    rx = np.asarray(rx, dtype=np.complex128)
    n = constellation.order
    nb = config.block_length_bwa
    f = len(rx)
    starts = np.arange(0, f, nb)
    counts = np.minimum(starts + nb, f) - starts
    if config.averaging == "phasor":
        z = _nth_power(_unit(rx), n)
        sums = np.add.reduceat(z, starts)
        raw_b = np.angle(sums) / n
    else:
        u = _resolved_power_phase(rx, n, config.unwrap, genie)
        raw_b = np.add.reduceat(u, starts) / counts / n
    targets = None
    if genie is not None:
        targets = np.add.reduceat(_reference_phases(genie), starts) / counts
    est_b = unwrap_ambiguity(raw_b, n, config.unwrap, genie=targets)
    est = np.repeat(est_b, counts)
    return CprOutput(estimated_phase=est,
                     corrected_symbols=rx * np.exp(-1j * est),
                     aux={"block_starts": starts, "block_phases": est_b})


def _sliding_sum(values: np.ndarray, half: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated centered window sums and the per-position window sizes."""
    f = len(values)
    c = np.concatenate(([0], np.cumsum(values)))
    k = np.arange(f)
    hi = np.minimum(k + half + 1, f)
    lo = np.maximum(k - half, 0)
    return c[hi] - c[lo], (hi - lo).astype(float)


def vv(rx: np.ndarray, constellation: Constellation, config: CprConfig,
       genie: Optional[PhaseTrack] = None) -> CprOutput:
    """Viterbi-Viterbi: sliding window of N_VV symbols centered on each symbol,
    phi(k) = (1/n) arg(sum x^n) over the window; windows are truncated at the
    sequence edges."""
    rx = np.asarray(rx, dtype=np.complex128)
    n = constellation.order
    half = (config.block_length_vv - 1) // 2
    if config.averaging == "phasor":
        z = _nth_power(_unit(rx), n)
        sums, _ = _sliding_sum(z, half)
        raw = np.angle(sums) / n
    else:
        u = _resolved_power_phase(rx, n, config.unwrap, genie)
        sums, cnt = _sliding_sum(u, half)
        raw = sums / cnt / n
    targets = None
    if genie is not None:
        gsum, gcnt = _sliding_sum(_reference_phases(genie), half)
        targets = gsum / gcnt
    est = unwrap_ambiguity(raw, n, config.unwrap, genie=targets)
    return CprOutput(estimated_phase=est,
                     corrected_symbols=rx * np.exp(-1j * est),
                     aux={"window": config.block_length_vv, "edge": half})


def run_cpr(rx: np.ndarray, constellation: Constellation, config: CprConfig,
            genie: Optional[PhaseTrack] = None,
            training_indices: Optional[np.ndarray] = None) -> CprOutput:
    if config.algorithm == "nlms":
        return nlms(rx, constellation, config, training_indices)
    if config.algorithm == "bwa":
        return bwa(rx, constellation, config, genie)
    return vv(rx, constellation, config, genie)


def optimize_mu(constellation: Constellation, sigma2_total: float,
                grid, probe_symbols: int = 200_000, seed: int = 0,
                snr_db: Optional[float] = None) -> float:
    """Grid search for the NLMS step size minimizing the measured BER floor.

    Probe runs use differential decoding on shared frames (identical seeds for
    every candidate), so the result is deterministic and the comparison across
    step sizes is paired.  Ties, including the all-zero-error case, go to the
    smallest step size.
    """
    grid = [float(m) for m in grid]
    if not grid:
        raise ValueError("step-size grid is empty")
    if any(not 0.0 < m <= 1.0 for m in grid):
        raise ValueError("grid values must lie in (0, 1]")
    bps = constellation.bits_per_symbol
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, probe_symbols * bps)
    track = generate_wiener_phase(probe_symbols + 1, sigma2_total, seed + 1)
    frame = modulate(bits, constellation, differential=True, true_phase=track)
    rx = apply_phase(frame.tx_symbols, track)
    rx = add_awgn(rx, snr_db, seed + 2)
    best_mu = None
    best_errors = None
    prefix = None
    for m in sorted(grid):
        cfg = CprConfig(algorithm="nlms", mu=m)
        out = nlms(rx, constellation, cfg, training_indices=frame.tx_indices)
        prefix = out.aux["training_prefix"]
        decisions = out.aux["decisions"][prefix:]
        sub = count_errors(_subframe(frame, prefix), decisions)
        if best_errors is None or sub.bit_errors < best_errors:
            best_errors = sub.bit_errors
            best_mu = m
    return best_mu


def _subframe(frame, start):
    """Tail of a frame from symbol ``start`` on; for differential frames the
    first retained symbol becomes the new phase reference."""
    from .modem import SymbolFrame
    tp = PhaseTrack(frame.true_phase.phases[start:],
                    frame.true_phase.increment_variance, frame.true_phase.seed)
    bits = frame.bits[start * frame.constellation.bits_per_symbol:]
    return SymbolFrame(frame.constellation, frame.tx_indices[start:],
                       frame.tx_symbols[start:], frame.rx_symbols[start:],
                       tp, bits, frame.differential)
