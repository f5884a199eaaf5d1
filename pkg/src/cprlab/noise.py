"""Closed-form phase-noise variance models and the discrete Wiener phase generator.

All internal computation is in SI units (Hz, s, m, s/m^2).  Practical units
(ps/nm/km, km) are converted exactly once at the input boundary, see
:meth:`LinkParams.from_practical`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 2.99792458e8  # m/s, fixed

# SI value of one practical unit
S_M2_PER_PS_NM_KM = 1e-12 / (1e-9 * 1e3)  # ps/nm/km -> s/m^2
M_PER_KM = 1e3


@dataclass(frozen=True)
class LinkParams:
    """Physical description of one coherent link.

    Parameters
    ----------
    delta_f_tx : float
        Transmitter-laser 3-dB linewidth [Hz].
    delta_f_lo : float
        Local-oscillator 3-dB linewidth [Hz].
    symbol_rate : float
        Symbol rate R_S [baud]; the symbol period is 1/R_S.
    wavelength : float
        Carrier wavelength [m].  Tx and LO share the carrier frequency.
    dispersion : float
        Fiber CD coefficient D [s/m^2].
    fiber_length : float
        Transmission distance L [m].
    """

    delta_f_tx: float
    delta_f_lo: float
    symbol_rate: float
    wavelength: float = 1550e-9
    dispersion: float = 17.0 * S_M2_PER_PS_NM_KM
    fiber_length: float = 0.0

    c: float = C_LIGHT  # not a free parameter; kept for unit-audit readability

    def __post_init__(self):
        if self.delta_f_tx < 0 or self.delta_f_lo < 0:
            raise ValueError("laser linewidths must be >= 0")
        if self.symbol_rate <= 0:
            raise ValueError("symbol_rate must be > 0")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be > 0")
        if self.dispersion < 0:
            raise ValueError("dispersion must be >= 0")
        if self.fiber_length < 0:
            raise ValueError("fiber_length must be >= 0")
        if self.c != C_LIGHT:
            raise ValueError("c is a fixed physical constant")

    @classmethod
    def from_practical(cls, *, delta_f_tx, delta_f_lo, symbol_rate,
                       wavelength=1550e-9, dispersion_ps_nm_km=17.0,
                       fiber_length_km=0.0) -> "LinkParams":
        """Build from the units used in datasheets (ps/nm/km, km)."""
        return cls(
            delta_f_tx=delta_f_tx,
            delta_f_lo=delta_f_lo,
            symbol_rate=symbol_rate,
            wavelength=wavelength,
            dispersion=dispersion_ps_nm_km * S_M2_PER_PS_NM_KM,
            fiber_length=fiber_length_km * M_PER_KM,
        )

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.symbol_rate

    @property
    def dispersion_ps_nm_km(self) -> float:
        return self.dispersion / S_M2_PER_PS_NM_KM

    @property
    def fiber_length_km(self) -> float:
        return self.fiber_length / M_PER_KM


@dataclass(frozen=True)
class PhaseTrack:
    """One realization of a cumulative Wiener carrier phase, one value per symbol."""

    phases: np.ndarray
    increment_variance: float
    seed: int

    def __post_init__(self):
        if len(self.phases) < 1:
            raise ValueError("a phase track holds at least one symbol")

    def __len__(self) -> int:
        return len(self.phases)


def laser_pn_variance(link: LinkParams) -> float:
    """Combined Tx+LO laser phase-noise variance per symbol [rad^2]:
    2*pi*(df_tx + df_lo)*T_S."""
    return 2.0 * np.pi * (link.delta_f_tx + link.delta_f_lo) * link.symbol_period


def eepn_variance(link: LinkParams) -> float:
    """Equalization-enhanced phase-noise variance [rad^2]:
    pi*lambda^2*D*L*df_lo / (2*c*T_S).

    Only the LO linewidth enters; the Tx phase noise sees net-zero dispersion.
    """
    lam = link.wavelength
    return (np.pi * lam * lam * link.dispersion * link.fiber_length
            * link.delta_f_lo) / (2.0 * C_LIGHT * link.symbol_period)


def total_variance(link: LinkParams) -> float:
    """Total (effective) phase-noise variance [rad^2]: laser + EEPN."""
    return laser_pn_variance(link) + eepn_variance(link)


def effective_linewidth(link: LinkParams) -> float:
    """Fictitious linewidth [Hz] whose pure laser phase noise would produce
    the total variance: sigma_T^2 / (2*pi*T_S)."""
    return total_variance(link) / (2.0 * np.pi * link.symbol_period)


def crossover_distance(link: LinkParams) -> float:
    """Distance L0 [m] at which EEPN variance equals the laser phase-noise
    variance for equal Tx/LO linewidths: 8*c*T_S^2 / (lambda^2 * D)."""
    if link.dispersion == 0:
        raise ValueError("no crossover (EEPN never accrues): dispersion is zero")
    ts = link.symbol_period
    return 8.0 * C_LIGHT * ts * ts / (link.wavelength ** 2 * link.dispersion)


def generate_wiener_phase(n_symbols: int, increment_variance: float,
                          seed: int, initial_phase: float = 0.0) -> PhaseTrack:
    """Discrete Wiener phase walk: phases[k] = phases[k-1] + g_k with
    g_k ~ N(0, increment_variance) i.i.d.; phases[0] = initial_phase.

    Deterministic for a given seed.  Draws n_symbols normals and discards the
    first so that downstream per-frame kernels consume the identical stream.
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    if increment_variance < 0:
        raise ValueError("increment_variance must be >= 0")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(n_symbols) * np.sqrt(increment_variance)
    g[0] = 0.0
    phases = np.cumsum(g) + initial_phase
    return PhaseTrack(phases=phases, increment_variance=increment_variance, seed=seed)
