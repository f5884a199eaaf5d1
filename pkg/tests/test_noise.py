import numpy as np
import pytest

from cprlab.noise import (LinkParams, PhaseTrack, crossover_distance,
                          effective_linewidth, eepn_variance,
                          generate_wiener_phase, laser_pn_variance,
                          total_variance)

MHZ_LINK = LinkParams.from_practical(delta_f_tx=1e6, delta_f_lo=1e6,
                                     symbol_rate=32e9, fiber_length_km=1000.0)


def si_link(**kw):
    base = dict(delta_f_tx=1e6, delta_f_lo=1e6, symbol_rate=32e9)
    base.update(kw)
    return LinkParams(**base)


class TestLaserVariance:
    def test_zero_linewidths(self):
        assert laser_pn_variance(si_link(delta_f_tx=0.0, delta_f_lo=0.0)) == 0.0

    def test_one_mhz_32gbaud(self):
        # 2*pi*(1e6 + 1e6)/32e9, evaluated independently from the op
        expected = 2.0 * np.pi * 2e6 / 32e9
        assert laser_pn_variance(MHZ_LINK) == pytest.approx(expected, rel=1e-15)
        assert laser_pn_variance(MHZ_LINK) == pytest.approx(3.9269908169872415e-4, rel=1e-12)

    def test_doubling_rate_halves(self):
        assert laser_pn_variance(si_link(symbol_rate=64e9)) == pytest.approx(
            laser_pn_variance(si_link()) / 2.0, rel=1e-15)


class TestEepnVariance:
    def test_zero_length(self):
        assert eepn_variance(si_link(fiber_length=0.0)) == 0.0

    def test_dimensional_oracle(self):
        # independent step-by-step unit conversion of pi*lam^2*D*L*df_lo/(2 c Ts):
        # 17 ps/nm/km -> SI, 1000 km -> m, evaluated with raw tracked factors
        d_si = 17.0 * (1e-12 / (1e-9 * 1e3))
        length_m = 1000.0 * 1e3
        ts = 1.0 / 32e9
        expected = np.pi * (1550e-9) ** 2 * d_si * length_m * 1e6 / (2.0 * 2.99792458e8 * ts)
        assert eepn_variance(MHZ_LINK) == pytest.approx(expected, rel=1e-15)
        assert eepn_variance(MHZ_LINK) == pytest.approx(6.847964024724925e-3, rel=1e-12)

    def test_invariant_to_tx_linewidth(self):
        a = eepn_variance(MHZ_LINK)
        b = eepn_variance(LinkParams.from_practical(
            delta_f_tx=7e6, delta_f_lo=1e6, symbol_rate=32e9, fiber_length_km=1000.0))
        assert a == b


class TestTotalVariance:
    def test_zero_length_equals_laser(self):
        link = si_link(fiber_length=0.0)
        assert total_variance(link) == laser_pn_variance(link)

    def test_additivity_bit_exact(self):
        for km in (0.0, 57.3, 250.0, 1000.0, 5000.0):
            link = LinkParams.from_practical(delta_f_tx=1e6, delta_f_lo=1e6,
                                             symbol_rate=32e9, fiber_length_km=km)
            assert total_variance(link) == laser_pn_variance(link) + eepn_variance(link)

    def test_equal_components_double(self):
        link = MHZ_LINK
        at = crossover_distance(link)
        bal = LinkParams(delta_f_tx=link.delta_f_tx, delta_f_lo=link.delta_f_lo,
                         symbol_rate=link.symbol_rate, wavelength=link.wavelength,
                         dispersion=link.dispersion, fiber_length=at)
        assert total_variance(bal) == pytest.approx(2.0 * laser_pn_variance(bal), rel=1e-12)


class TestEffectiveLinewidth:
    def test_back_to_back_sum(self):
        link = si_link(fiber_length=0.0)
        assert effective_linewidth(link) == pytest.approx(2e6, rel=1e-15)

    def test_round_trip(self):
        for km in (0.0, 500.0, 1000.0):
            link = LinkParams.from_practical(delta_f_tx=1e6, delta_f_lo=1e6,
                                             symbol_rate=32e9, fiber_length_km=km)
            assert 2.0 * np.pi * effective_linewidth(link) * link.symbol_period == \
                pytest.approx(total_variance(link), rel=1e-15)

    def test_value_at_1000km(self):
        assert effective_linewidth(MHZ_LINK) == pytest.approx(36876394.388814144, rel=1e-12)


class TestCrossoverDistance:
    def test_formula_value(self):
        # 8*c*Ts^2/(lam^2 D) with independently converted units
        ts = 1.0 / 32e9
        d_si = 17.0 * 1e-12 / (1e-9 * 1e3)
        expected = 8.0 * 2.99792458e8 * ts * ts / ((1550e-9) ** 2 * d_si)
        got = crossover_distance(MHZ_LINK)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(57345.3774407786, rel=1e-10)

    def test_no_dispersion_raises(self):
        with pytest.raises(ValueError, match="no crossover"):
            crossover_distance(si_link(dispersion=0.0))

    def test_quadratic_in_symbol_period(self):
        slow = crossover_distance(si_link(symbol_rate=16e9))
        assert slow == pytest.approx(4.0 * crossover_distance(si_link()), rel=1e-12)

    def test_balance_at_crossover(self):
        at = crossover_distance(MHZ_LINK)
        link = LinkParams(delta_f_tx=1e6, delta_f_lo=1e6, symbol_rate=32e9,
                          wavelength=MHZ_LINK.wavelength,
                          dispersion=MHZ_LINK.dispersion, fiber_length=at)
        imbalance = abs(laser_pn_variance(link) - eepn_variance(link))
        assert imbalance / total_variance(link) < 1e-12


class TestMonotonicity:
    def test_laser_decreasing_in_rate(self):
        rates = np.linspace(10e9, 100e9, 12)
        vals = [laser_pn_variance(si_link(symbol_rate=r)) for r in rates]
        assert all(np.diff(vals) < 0)

    def test_eepn_increasing(self):
        base = dict(delta_f_tx=1e6, delta_f_lo=1e6, symbol_rate=32e9,
                    fiber_length=1e6)
        for field, grid in [("symbol_rate", np.linspace(10e9, 100e9, 8)),
                            ("fiber_length", np.linspace(1e5, 5e6, 8)),
                            ("dispersion", np.linspace(1e-6, 30e-6, 8)),
                            ("delta_f_lo", np.linspace(1e5, 1e7, 8))]:
            vals = [eepn_variance(LinkParams(**{**base, field: v})) for v in grid]
            assert all(np.diff(vals) > 0), field


class TestUnitConversions:
    def test_round_trip_practical(self):
        for d in (1.0, 16.5, 17.0, 20.75, 100.0):
            for km in (0.0, 0.5, 57.345, 1000.0, 5000.0):
                link = LinkParams.from_practical(delta_f_tx=1e6, delta_f_lo=1e6,
                                                 symbol_rate=32e9,
                                                 dispersion_ps_nm_km=d,
                                                 fiber_length_km=km)
                assert link.dispersion_ps_nm_km == d
                assert link.fiber_length_km == km

    def test_validation(self):
        with pytest.raises(ValueError):
            si_link(delta_f_tx=-1.0)
        with pytest.raises(ValueError):
            si_link(symbol_rate=0.0)
        with pytest.raises(ValueError):
            si_link(wavelength=-1550e-9)


class TestWienerGenerator:
    def test_zero_variance_constant(self):
        track = generate_wiener_phase(1000, 0.0, 3)
        assert np.all(track.phases == track.phases[0])
        assert track.phases[0] == 0.0

    def test_initial_phase(self):
        track = generate_wiener_phase(10, 1e-4, 3, initial_phase=0.7)
        assert track.phases[0] == 0.7

    def test_seed_determinism(self):
        a = generate_wiener_phase(5000, 1e-4, 1234)
        b = generate_wiener_phase(5000, 1e-4, 1234)
        assert np.array_equal(a.phases, b.phases)

    def test_increment_statistics(self):
        # sample variance of one-step increments vs its chi-square sampling
        # distribution: SE(var) = var * sqrt(2/(m-1))
        var = 1e-4
        track = generate_wiener_phase(1_000_000, var, 99)
        inc = np.diff(track.phases)
        m = len(inc)
        se = var * np.sqrt(2.0 / (m - 1))
        assert abs(inc.var(ddof=1) - var) < 3.0 * se

    def test_m_step_variance(self):
        # Var[phi(k+m) - phi(k)] ~ m * increment_variance over 1e4 realizations
        var, m, reals = 1e-3, 7, 10_000
        rng_tracks = [generate_wiener_phase(m + 1, var, 10_000 + i) for i in range(reals)]
        deltas = np.array([t.phases[m] - t.phases[0] for t in rng_tracks])
        se = m * var * np.sqrt(2.0 / (reals - 1))
        assert abs(deltas.var(ddof=1) - m * var) < 5.0 * se

    def test_validation(self):
        with pytest.raises(ValueError):
            generate_wiener_phase(0, 1e-4, 1)
        with pytest.raises(ValueError):
            generate_wiener_phase(10, -1e-4, 1)
        with pytest.raises(ValueError):
            PhaseTrack(np.array([]), 0.0, 0)
