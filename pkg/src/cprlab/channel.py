"""Fiber CD transfer function, phase application, AWGN and the EEPN signal path.

One sample per symbol throughout: the EEPN mechanism is reproduced through the
symbol-rate EDC filter.  Frames are transformed whole (cyclic convolution);
:func:`guard_symbols` tells callers how many edge symbols to exclude from
error statistics.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .noise import C_LIGHT, LinkParams, PhaseTrack
from .modem import SymbolFrame


def _cd_phase_factor(link: LinkParams) -> float:
    """K in H(w) = exp(+j*K*w^2), with K = lambda^2 * D * L / (4*pi*c)."""
    lam = link.wavelength
    return lam * lam * link.dispersion * link.fiber_length / (4.0 * np.pi * C_LIGHT)


def group_delay_spread(link: LinkParams) -> float:
    """Group-delay span of the CD filter across the symbol-rate band, in symbols."""
    lam = link.wavelength
    tau = lam * lam * link.dispersion * link.fiber_length * link.symbol_rate / C_LIGHT
    return tau * link.symbol_rate


def guard_symbols(link: LinkParams) -> int:
    """Edge symbols to discard from error counting after a cyclic CD transform."""
    return int(np.ceil(2.0 * group_delay_spread(link)))


def apply_cd(samples: np.ndarray, link: LinkParams, inverse: bool = False) -> np.ndarray:
    """All-pass frequency-domain chromatic dispersion filter.

    ``inverse=True`` applies the conjugate transfer function (EDC).  Energy is
    preserved up to FFT round-off; length is preserved exactly.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if len(samples) < 1:
        raise ValueError("need at least one sample")
    k = _cd_phase_factor(link)
    if k == 0.0:
        return samples.copy()
    w = 2.0 * np.pi * np.fft.fftfreq(len(samples), d=link.symbol_period)
    h = np.exp(1j * k * w * w)
    if inverse:
        h = np.conj(h)
    return np.fft.ifft(np.fft.fft(samples) * h)


def apply_phase(samples: np.ndarray, track: PhaseTrack) -> np.ndarray:
    """Sample-wise rotation by exp(j*phi(k))."""
    samples = np.asarray(samples)
    if len(samples) != len(track):
        raise ValueError("samples and phase track must share one length")
    return samples * np.exp(1j * track.phases)


def add_awgn(samples: np.ndarray, snr_per_symbol_db: Optional[float],
             seed: int) -> np.ndarray:
    """Complex AWGN at the given per-symbol SNR (Es/N0) against the measured
    signal power; ``None`` means noiseless.  Eb/N0 = Es/N0 - 10*log10(log2 n).
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if snr_per_symbol_db is None:
        return samples.copy()
    power = float(np.mean(np.abs(samples) ** 2))
    noise_var = power / 10.0 ** (snr_per_symbol_db / 10.0)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(noise_var / 2.0)
    noise = scale * (rng.standard_normal(len(samples))
                     + 1j * rng.standard_normal(len(samples)))
    return samples + noise


def eepn_path(frame: SymbolFrame, link: LinkParams, tx_track: PhaseTrack,
              lo_track: PhaseTrack, snr_db: Optional[float],
              seed: int) -> SymbolFrame:
    """Physical EEPN pathway: tx phase -> fiber CD -> AWGN -> LO phase -> EDC.

    The Tx phase noise passes through both the fiber and the EDC (net-zero
    dispersion); the LO phase noise passes through the EDC only, which is what
    creates EEPN.  The returned frame carries the receiver-side samples and a
    genie track equal to tx+lo rotation (the EEPN distortion remains on top).
    """
    if len(tx_track) != len(frame.tx_symbols) or len(lo_track) != len(frame.tx_symbols):
        raise ValueError("phase tracks must match the frame length")
    s = apply_phase(frame.tx_symbols, tx_track)
    s = apply_cd(s, link, inverse=False)
    s = add_awgn(s, snr_db, seed)
    s = apply_phase(s, lo_track)
    rx = apply_cd(s, link, inverse=True)
    combined = PhaseTrack(tx_track.phases + lo_track.phases,
                          tx_track.increment_variance + lo_track.increment_variance,
                          tx_track.seed)
    return SymbolFrame(frame.constellation, frame.tx_indices, frame.tx_symbols,
                       rx, combined, frame.bits, frame.differential)
