import cmath
import math

import numpy as np
import pytest

from twpakit.dispersion import (
    AbcdMatrix,
    DispersionCurve,
    LineSpec,
    LoadingSlot,
    Stopband,
    bloch_wavenumber,
    cascade,
    cell_abcd,
    find_stopbands,
    idler_frequency,
    image_impedance,
    phase_mismatch,
    scan_dispersion,
    series_impedance_abcd,
    shunt_admittance_abcd,
)
from twpakit.errors import InconsistentMatrixError, OutOfRangeError


class TestCellAbcd:
    def test_pure_series_inductor(self):
        omega = 2.0 * math.pi * 5e9
        m = series_impedance_abcd(1j * omega * 1e-9)
        assert m.a == 1.0 and m.d == 1.0 and m.c == 0.0
        assert m.b == pytest.approx(1j * omega * 1e-9)

    def test_pure_shunt_capacitor(self):
        omega = 2.0 * math.pi * 5e9
        m = shunt_admittance_abcd(1j * omega * 1e-12)
        assert m.a == 1.0 and m.d == 1.0 and m.b == 0.0
        assert m.c == pytest.approx(1j * omega * 1e-12)

    def test_prototype_cell_unit_determinant(self, prototype_cell):
        m = cell_abcd(prototype_cell, 6.75e9, bias=0.0)
        assert abs(m.determinant - 1.0) < 1e-9

    @pytest.mark.parametrize("frequency", [0.5e9, 3.3e9, 6.75e9, 20e9, 60e9])
    def test_unit_determinant_across_band(self, prototype_cell, kinetic_cell,
                                          frequency):
        for cell in (prototype_cell, kinetic_cell):
            for slot in (None, LoadingSlot(impedance_scale=1.3)):
                m = cell_abcd(cell, frequency, bias=0.0, slot=slot)
                assert abs(m.determinant - 1.0) < 1e-9

    def test_reciprocity_cell_with_mirror_is_symmetric(self, prototype_cell):
        m = cell_abcd(prototype_cell, 6.75e9)
        combo = m @ m.mirrored()
        assert abs(combo.a - combo.d) < 1e-9 * abs(combo.a)

    def test_invalid_frequency(self, prototype_cell):
        with pytest.raises(ValueError):
            cell_abcd(prototype_cell, 0.0)

    def test_image_impedance_near_lumped_value(self, prototype_cell):
        # far below every resonance the cell is a plain LC section
        z = image_impedance(prototype_cell, 1e9)
        assert z == pytest.approx(53.59482267035829, rel=1e-3)


class TestCascade:
    def test_single_matrix_identity_of_cascade(self):
        m = AbcdMatrix(1.0, 2.0j, 0.5j, 3.0)
        out = cascade([m])
        assert out == m

    def test_two_series_inductors_add(self):
        omega = 2.0 * math.pi * 1e9
        z = 1j * omega * 2e-9
        out = cascade([series_impedance_abcd(z), series_impedance_abcd(z)])
        assert out.b == pytest.approx(2.0 * z)
        assert out.a == 1.0 and out.d == 1.0

    def test_three_cell_cascade_matches_brute_force(self, prototype_cell,
                                                    kinetic_cell):
        ms = [
            cell_abcd(prototype_cell, 4e9),
            cell_abcd(kinetic_cell, 4e9),
            cell_abcd(prototype_cell, 4e9, slot=LoadingSlot(impedance_scale=1.2)),
        ]
        got = cascade(ms).as_array()
        want = ms[0].as_array() @ ms[1].as_array() @ ms[2].as_array()
        assert np.allclose(got, want, rtol=1e-12, atol=0.0)

    def test_empty_cascade_rejected(self):
        with pytest.raises(ValueError):
            cascade([])


class TestBlochWavenumber:
    def test_identity_matrix(self):
        assert bloch_wavenumber(AbcdMatrix(1.0, 0.0, 0.0, 1.0)) == 0.0

    def test_band_edge(self):
        m = AbcdMatrix(-1.0, 0.0, 0.0, -1.0)
        assert bloch_wavenumber(m).real == pytest.approx(math.pi)

    def test_branch_convention(self):
        # inside a stopband the wave must decay, not grow
        m = AbcdMatrix(2.5, 0.0, 0.0, 0.4)  # det = 1, (A+D)/2 > 1
        k = bloch_wavenumber(m)
        assert k.imag > 0.0
        assert 0.0 <= k.real <= math.pi

    def test_continuum_limit_lc_ladder(self):
        l_cell, c_cell = 50e-12, 20e-15
        for frequency in (1e9, 3e9, 8e9):
            omega = 2.0 * math.pi * frequency
            m = cascade([
                series_impedance_abcd(1j * omega * l_cell),
                shunt_admittance_abcd(1j * omega * c_cell),
            ])
            ka = bloch_wavenumber(m)
            expected = omega * math.sqrt(l_cell * c_cell)
            if expected < 0.1:
                assert ka.real == pytest.approx(expected, rel=0.01)
                assert ka.imag < 1e-9

    def test_inconsistent_matrix_rejected(self):
        with pytest.raises(InconsistentMatrixError):
            bloch_wavenumber(AbcdMatrix(1.0, 0.0, 0.0, 1.1))


class TestScanDispersion:
    def test_unloaded_line_smooth_no_stopbands(self, prototype_line):
        grid = np.linspace(0.5e9, 100e9, 3000)
        curve = scan_dispersion(prototype_line, grid)
        assert find_stopbands(curve) == []
        assert np.all(np.diff(curve.ka.real) > 0.0)

    def test_phase_velocity_continuum_limit(self, prototype_line):
        grid = np.linspace(0.2e9, 2e9, 200)
        curve = scan_dispersion(prototype_line, grid)
        l_eff = 3.734126522187296e-11
        c = prototype_line.base_cell.ground_capacitance
        for f in (0.5e9, 1e9):
            ka = curve.real_ka_at(f)
            assert ka < 0.1
            expected = 2.0 * math.pi * f * math.sqrt(l_eff * c)
            assert ka == pytest.approx(expected, rel=0.01)

    def test_supercell_phase_consistency(self, prototype_line):
        # one cell treated as a 5-cell super-cell must give the same per-cell
        # phase once unfolded
        line5 = LineSpec(base_cell=prototype_line.base_cell, n_cells=990,
                         loadings=((0, LoadingSlot()),), period=5)
        grid = np.linspace(0.5e9, 40e9, 2000)
        plain = scan_dispersion(prototype_line, grid)
        five = scan_dispersion(line5, grid)
        assert np.allclose(plain.ka.real, five.ka.real, rtol=1e-9, atol=1e-12)

    def test_grid_validation(self, prototype_line):
        with pytest.raises(ValueError):
            scan_dispersion(prototype_line, np.array([2e9, 1e9]))
        with pytest.raises(ValueError):
            scan_dispersion(prototype_line, np.array([-1e9, 1e9]))

    def test_passband_stopband_trace_classification(self, prototype_line):
        # resonator-loaded line: inside a reported band |(A+D)/2| > 1,
        # in the passband it is <= 1 and the attenuation is numerically zero
        # series-LC shunt resonating at 8 GHz with ~12x the line impedance
        slot = LoadingSlot(shunt_resonator_l=1.28e-8, shunt_resonator_c=3.09e-14)
        line = LineSpec(base_cell=prototype_line.base_cell, n_cells=990,
                        loadings=((0, slot),), period=10)
        grid = np.linspace(6e9, 10e9, 1200)
        curve = scan_dispersion(line, grid)
        bands = find_stopbands(curve)
        assert bands

        def supercell_half_trace(f):
            omega_cells = [cell_abcd(line.base_cell, f, slot=slot)] + [
                cell_abcd(line.base_cell, f) for _ in range(9)
            ]
            m = cascade(omega_cells)
            return abs((m.a + m.d).real / 2.0)

        band = bands[0]
        inside = 0.5 * (band.lower_hz + band.upper_hz)
        assert supercell_half_trace(inside) > 1.0
        outside = band.upper_hz * 1.2
        assert supercell_half_trace(outside) <= 1.0
        passband = np.abs(grid - outside).argmin()
        assert curve.ka.imag[passband] < 1e-9


class TestFindStopbands:
    def test_passband_only_curve(self):
        f = np.linspace(1e9, 2e9, 100)
        curve = DispersionCurve(f, 1e-3 * f / f[0] + 0.0j)
        assert find_stopbands(curve) == []

    def test_synthetic_single_interval(self):
        f = np.linspace(1e9, 2e9, 101)
        im = np.zeros_like(f)
        im[40:61] = 0.5
        curve = DispersionCurve(f, 0.01 + 1j * im)
        bands = find_stopbands(curve, min_attenuation=1e-6)
        assert len(bands) == 1
        assert bands[0].lower_hz == pytest.approx(f[40])
        assert bands[0].upper_hz == pytest.approx(f[60])
        assert bands[0].max_attenuation_nepers == pytest.approx(0.5)

    def test_single_point_spike_unresolvable(self):
        f = np.linspace(1e9, 2e9, 101)
        im = np.zeros_like(f)
        im[50] = 0.5
        curve = DispersionCurve(f, 0.01 + 1j * im)
        assert find_stopbands(curve) == []

    def test_disjoint_sorted(self):
        f = np.linspace(1e9, 2e9, 101)
        im = np.zeros_like(f)
        im[10:20] = 0.1
        im[70:90] = 0.2
        bands = find_stopbands(DispersionCurve(f, 0.01 + 1j * im))
        assert len(bands) == 2
        assert bands[0].upper_hz < bands[1].lower_hz

    def test_stopband_invariants(self):
        with pytest.raises(ValueError):
            Stopband(2e9, 1e9, 0.1)
        with pytest.raises(ValueError):
            Stopband(1e9, 2e9, 0.0)


class TestPhaseMismatch:
    def test_linear_curve_3wm_zero(self):
        f = np.linspace(1e9, 10e9, 901)
        s = 1e-11  # rad per cell per Hz
        curve = DispersionCurve(f, s * f + 0.0j)
        assert phase_mismatch(curve, 6.75e9, 3.3e9, "3WM") == pytest.approx(
            0.0, abs=1e-15
        )

    def test_three_wave_idler_frequency_exact(self):
        assert idler_frequency(6.75e9, 3.3e9, "3WM") == 3.45e9

    def test_quadratic_curve_4wm_closed_form(self):
        f = np.linspace(1e9, 20e9, 1901)  # 10 MHz spacing, tones on nodes
        alpha, beta = 2e-12, 3e-23
        curve = DispersionCurve(f, alpha * f + beta * f**2 + 0.0j)
        f_p, f_s = 8e9, 5e9
        got = phase_mismatch(curve, f_p, f_s, "4WM")
        assert got == pytest.approx(-2.0 * beta * (f_p - f_s) ** 2, rel=1e-9)

    def test_quadratic_degenerate_4wm_zero(self):
        f = np.linspace(1e9, 20e9, 1901)
        curve = DispersionCurve(f, 2e-12 * f + 3e-23 * f**2 + 0.0j)
        assert phase_mismatch(curve, 8e9, 8e9, "4WM") == pytest.approx(0.0, abs=1e-18)

    def test_idler_outside_grid(self):
        f = np.linspace(3e9, 7e9, 100)
        curve = DispersionCurve(f, 1e-11 * f + 0.0j)
        with pytest.raises(OutOfRangeError):
            phase_mismatch(curve, 6.9e9, 6.8e9, "3WM")  # idler at 0.1 GHz

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            idler_frequency(6e9, 3e9, "5WM")


class TestDispersionCurveSerialization:
    def test_csv_round_trip(self, prototype_line, tmp_path):
        grid = np.linspace(1e9, 10e9, 50)
        curve = scan_dispersion(prototype_line, grid)
        path = tmp_path / "curve.csv"
        curve.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "frequency_hz,re_ka,im_ka"
        back = DispersionCurve.from_csv(path)
        assert np.array_equal(back.frequency_hz, curve.frequency_hz)
        assert np.array_equal(back.ka, curve.ka)

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            DispersionCurve(np.array([1e9, 1e9, 2e9]), np.zeros(3, dtype=complex))

    def test_negative_attenuation_rejected(self):
        with pytest.raises(ValueError):
            DispersionCurve(np.array([1e9, 2e9]), np.array([0.1 - 1e-3j, 0.2 + 0j]))
