"""n-PSK constellations, Gray mapping, optional differential coding, error counting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .noise import PhaseTrack

SUPPORTED_ORDERS = (4, 8, 16, 32)

_POPCOUNT = np.array([bin(i).count("1") for i in range(64)], dtype=np.int64)


def gray_code(m: int) -> int:
    return m ^ (m >> 1)


def _inverse_gray_table(n: int) -> np.ndarray:
    inv = np.zeros(n, dtype=np.int64)
    for m in range(n):
        inv[gray_code(m)] = m
    return inv


@dataclass(frozen=True)
class Constellation:
    """Unit-magnitude n-PSK alphabet, point m at angle 2*pi*m/n, Gray-labeled."""

    order: int
    points: np.ndarray = field(init=False, repr=False)
    gray_labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order not in SUPPORTED_ORDERS:
            raise ValueError(f"order must be one of {SUPPORTED_ORDERS}, got {self.order}")
        angles = 2.0 * np.pi * np.arange(self.order) / self.order
        object.__setattr__(self, "points", np.exp(1j * angles))
        object.__setattr__(self, "gray_labels",
                           np.array([gray_code(m) for m in range(self.order)], dtype=np.int64))

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @property
    def angular_spacing(self) -> float:
        return 2.0 * np.pi / self.order


@dataclass(frozen=True)
class SymbolFrame:
    """Complex baseband symbol sequence plus the genie channel state.

    For differential frames the first symbol is a phase reference that carries
    no data, so len(tx_symbols) == n_data_symbols + 1.
    """

    constellation: Constellation
    tx_indices: np.ndarray
    tx_symbols: np.ndarray
    rx_symbols: np.ndarray
    true_phase: PhaseTrack
    bits: np.ndarray
    differential: bool = False

    def __post_init__(self):
        n = len(self.tx_symbols)
        if not (len(self.rx_symbols) == n == len(self.true_phase) == len(self.tx_indices)):
            raise ValueError("tx, rx, indices and true_phase must share one length")

    def with_rx(self, rx_symbols: np.ndarray) -> "SymbolFrame":
        return SymbolFrame(self.constellation, self.tx_indices, self.tx_symbols,
                           rx_symbols, self.true_phase, self.bits, self.differential)


@dataclass(frozen=True)
class ErrorCounts:
    ser: float
    ber: float
    symbol_errors: int
    symbols: int
    bit_errors: int
    bits: int


def bits_to_indices(bits: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Pack groups of log2(n) bits (MSB first) and Gray-decode to point indices."""
    bps = constellation.bits_per_symbol
    if len(bits) % bps != 0:
        raise ValueError(f"bit length {len(bits)} is not divisible by {bps}")
    weights = 1 << np.arange(bps - 1, -1, -1)
    labels = bits.reshape(-1, bps) @ weights
    return _inverse_gray_table(constellation.order)[labels]


def indices_to_bits(indices: np.ndarray, constellation: Constellation) -> np.ndarray:
    labels = constellation.gray_labels[indices]
    bps = constellation.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).reshape(-1).astype(np.int64)


def modulate(bits: np.ndarray, constellation: Constellation,
             differential: bool = False,
             true_phase: Optional[PhaseTrack] = None) -> SymbolFrame:
    """Map a bit stream onto constellation points.

    Absolute mode: each Gray label selects a point.  Differential mode: each
    Gray label selects a phase-increment step; a data-free reference symbol at
    index 0 is prepended so decoding survives any constellation-symmetry
    rotation of the whole frame.
    """
    bits = np.asarray(bits, dtype=np.int64)
    data = bits_to_indices(bits, constellation)
    if differential:
        idx = np.empty(len(data) + 1, dtype=np.int64)
        idx[0] = 0
        np.cumsum(data, out=idx[1:])
        idx %= constellation.order
    else:
        idx = data
    tx = constellation.points[idx]
    if true_phase is None:
        true_phase = PhaseTrack(np.zeros(len(idx)), 0.0, 0)
    elif len(true_phase) != len(idx):
        raise ValueError("true_phase length must match the symbol count")
    return SymbolFrame(constellation, idx, tx, tx.copy(), true_phase, bits, differential)


def decide_indices(samples: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Vectorized nearest-angle decision; exact angular ties go to the lower index."""
    samples = np.asarray(samples)
    if np.any(samples == 0):
        raise ValueError("cannot decide a zero sample")
    n = constellation.order
    ang = np.angle(samples)
    ang = np.where(ang < 0, ang + 2.0 * np.pi, ang)
    t = ang / constellation.angular_spacing
    idx = np.floor(t + 0.5).astype(np.int64)
    # exact half-way samples belong to the lower of the two neighbouring
    # indices; the boundary between point n-1 and point 0 already resolves
    # to the lower index 0 through the modulo
    tie = (t % 1.0) == 0.5
    idx[tie & (idx % n != 0)] -= 1
    return idx % n


def hard_decide(sample: complex, constellation: Constellation) -> complex:
    """Constellation point with minimum angular distance to ``sample``."""
    idx = decide_indices(np.array([sample]), constellation)[0]
    return constellation.points[idx]


def _differential_data(indices: np.ndarray, n: int) -> np.ndarray:
    return (indices[1:] - indices[:-1]) % n


def count_errors(frame: SymbolFrame, decisions: np.ndarray) -> ErrorCounts:
    """Symbol and bit error ratios of a decision sequence against the frame.

    ``decisions`` may be constellation points or integer indices.  Differential
    frames are scored on the decoded increments, so a constant rotation of all
    decisions by a constellation symmetry costs nothing.
    """
    decisions = np.asarray(decisions)
    if len(decisions) != len(frame.tx_symbols):
        raise ValueError("decision length must match the frame length")
    n = frame.constellation.order
    if np.issubdtype(decisions.dtype, np.integer):
        didx = decisions
    else:
        didx = decide_indices(decisions, frame.constellation)
    if frame.differential:
        tx_data = _differential_data(frame.tx_indices, n)
        rx_data = _differential_data(didx, n)
    else:
        tx_data = frame.tx_indices
        rx_data = didx
    labels = frame.constellation.gray_labels
    symbol_errors = int(np.count_nonzero(tx_data != rx_data))
    bit_errors = int(_POPCOUNT[labels[tx_data] ^ labels[rx_data]].sum())
    symbols = len(tx_data)
    bits = symbols * frame.constellation.bits_per_symbol
    return ErrorCounts(ser=symbol_errors / symbols, ber=bit_errors / bits,
                       symbol_errors=symbol_errors, symbols=symbols,
                       bit_errors=bit_errors, bits=bits)


def demodulate(decisions: np.ndarray, frame: SymbolFrame) -> np.ndarray:
    """Recover the bit stream from decided symbols (or indices)."""
    decisions = np.asarray(decisions)
    if np.issubdtype(decisions.dtype, np.integer):
        didx = decisions
    else:
        didx = decide_indices(decisions, frame.constellation)
    if frame.differential:
        data = _differential_data(didx, frame.constellation.order)
    else:
        data = didx
    return indices_to_bits(data, frame.constellation)
