"""Closed-form BER floors, per-symbol variance, coding rate, spectral efficiency
and complexity counts for the three carrier-phase-recovery algorithms.

Floors are evaluated in the log domain once the erfc argument exceeds 10 so
that values as deep as the formulas can represent in double precision never
degrade to nonsense; ``log_floor_*`` companions never underflow at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.special as _sp

_LOG_DOMAIN_ARG = 10.0

ALGORITHMS = ("nlms", "bwa", "vv")


@dataclass(frozen=True)
class FloorQuery:
    """One analytic BER-floor evaluation point."""

    order: int
    sigma2_total: float
    algorithm: Optional[str] = None
    block_length: Optional[int] = None

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("order must be >= 2")
        if self.sigma2_total < 0:
            raise ValueError("sigma2_total must be >= 0")


def erfc(x):
    """Complementary error function (relative error below 1e-12 on [0, 30])."""
    return _sp.erfc(x)


def log_erfc(x):
    """Natural log of erfc(x), stable for arbitrarily large positive x."""
    x = np.asarray(x, dtype=float)
    small = x <= _LOG_DOMAIN_ARG
    out = np.empty_like(x)
    out[small] = np.log(_sp.erfc(x[small]))
    xb = x[~small]
    out[~small] = np.log(_sp.erfcx(xb)) - xb * xb
    return out if out.ndim else float(out)


def _tail(arg: float) -> float:
    """erfc(arg), falling back to the log domain once the direct evaluation
    underflows (arg ~ 26.6), so deep floors degrade to subnormals and then to
    0.0 instead of to nonsense."""
    v = float(_sp.erfc(arg))
    if v == 0.0:
        return math.exp(log_erfc(arg))
    return v


def floor_nlms(q: FloorQuery) -> float:
    """One-tap normalized LMS BER floor: erfc(pi/(n*sqrt(2)*sigma)) / log2(n)."""
    if q.sigma2_total == 0:
        return 0.0
    arg = np.pi / (q.order * np.sqrt(2.0) * np.sqrt(q.sigma2_total))
    return _tail(arg) / math.log2(q.order)


def log_floor_nlms(q: FloorQuery) -> float:
    if q.sigma2_total == 0:
        return -math.inf
    arg = np.pi / (q.order * np.sqrt(2.0) * np.sqrt(q.sigma2_total))
    return float(log_erfc(arg)) - math.log(math.log2(q.order))


def bwa_symbol_variance(p: int, block_length: int, sigma2_total: float) -> float:
    """Phase-error variance at position p (1-based) of a block-wise average block.

    sigma_T^2 * [2(p-1)^3 + 3(p-1)^2 + 2(N-p)^3 + 3(N-p)^2 + N - 1] / (6 N^2)
    """
    n = int(block_length)
    p = int(p)
    if not 1 <= p <= n:
        raise ValueError(f"position p={p} outside block 1..{n}")
    a = p - 1
    b = n - p
    bracket = 2 * a**3 + 3 * a**2 + 2 * b**3 + 3 * b**2 + n - 1
    return sigma2_total * bracket / (6 * n * n)


def _bwa_args(q: FloorQuery):
    n_blk = q.block_length if q.block_length is not None else 11
    if n_blk < 1:
        raise ValueError("block length must be >= 1")
    args = []
    for p in range(1, n_blk + 1):
        v = bwa_symbol_variance(p, n_blk, q.sigma2_total)
        if v > 0:
            args.append(np.pi / (q.order * np.sqrt(2.0) * np.sqrt(v)))
    return n_blk, args


def floor_bwa(q: FloorQuery) -> float:
    """Block-wise average BER floor: mean over block positions of the
    per-position erfc terms, divided by log2(n).  Zero-variance positions
    contribute nothing; N=1 gives exactly 0."""
    n_blk, args = _bwa_args(q)
    if not args:
        return 0.0
    total = sum(_tail(a) for a in args)
    return total / (n_blk * math.log2(q.order))


def log_floor_bwa(q: FloorQuery) -> float:
    n_blk, args = _bwa_args(q)
    if not args:
        return -math.inf
    logs = np.array([log_erfc(a) for a in args])
    return float(_sp.logsumexp(logs)) - math.log(n_blk * math.log2(q.order))


def _vv_arg(q: FloorQuery):
    n_vv = q.block_length if q.block_length is not None else 11
    if n_vv < 1 or n_vv % 2 == 0:
        raise ValueError("N_VV must be odd")
    if n_vv == 1 or q.sigma2_total == 0:
        return None
    factor = (n_vv * n_vv - 1) / (6.0 * n_vv)
    return np.pi / (q.order * np.sqrt(factor) * np.sqrt(q.sigma2_total))


def floor_vv(q: FloorQuery) -> float:
    """Viterbi-Viterbi BER floor:
    erfc(pi/(n*sqrt((N^2-1)/(6N))*sigma)) / log2(n); N=1 gives exactly 0."""
    arg = _vv_arg(q)
    if arg is None:
        return 0.0
    return _tail(arg) / math.log2(q.order)


def log_floor_vv(q: FloorQuery) -> float:
    arg = _vv_arg(q)
    if arg is None:
        return -math.inf
    return float(log_erfc(arg)) - math.log(math.log2(q.order))


def analytic_floor(q: FloorQuery) -> float:
    """Dispatch on q.algorithm."""
    if q.algorithm == "nlms":
        return floor_nlms(q)
    if q.algorithm == "bwa":
        return floor_bwa(q)
    if q.algorithm == "vv":
        return floor_vv(q)
    raise ValueError(f"unknown algorithm {q.algorithm!r}; expected one of {ALGORITHMS}")


def coding_rate(ber: float) -> float:
    """Ideal hard-decision coding rate of a binary symmetric channel:
    1 + p*log2(p) + (1-p)*log2(1-p), with 0*log2(0) == 0."""
    if not 0.0 <= ber <= 1.0:
        raise ValueError("BER must lie in [0, 1]")
    ln2 = math.log(2.0)
    return 1.0 + float(_sp.xlogy(ber, ber) + _sp.xlogy(1.0 - ber, 1.0 - ber)) / ln2


def spectral_efficiency(ber: float, order: int, n_pol: int) -> float:
    """Ideal spectral efficiency [bit/symbol]: R_c * N_pol * log2(n)."""
    if order < 2:
        raise ValueError("order must be >= 2")
    if n_pol not in (1, 2):
        raise ValueError("n_pol must be 1 or 2")
    return coding_rate(ber) * n_pol * math.log2(order)


def complexity(algorithm: str, order: int) -> int:
    """Complex multiplications per recovered symbol: NLMS 5, BWA n, VV n."""
    if algorithm == "nlms":
        return 5
    if algorithm in ("bwa", "vv"):
        return int(order)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
