import numpy as np
import pytest

from twpakit.noise import (
    NoiseStage,
    budget_report,
    friis_cascade,
    quantum_limit_temperature,
    snr_improvement,
)

TQ_9_GHZ = 0.4319318766029599  # h * 9 GHz / kB
TQ_5_GHZ = 0.23996215366831103
TQ_10_GHZ = 0.47992430733662206


class TestQuantumLimit:
    def test_frozen_values(self):
        assert quantum_limit_temperature(9e9) == pytest.approx(TQ_9_GHZ, rel=1e-12)
        assert quantum_limit_temperature(5e9) == pytest.approx(TQ_5_GHZ, rel=1e-12)
        assert quantum_limit_temperature(10e9) == pytest.approx(TQ_10_GHZ, rel=1e-12)

    def test_below_600_mk_target_band(self):
        for f in np.linspace(5e9, 10e9, 11):
            assert quantum_limit_temperature(f) <= 0.6

    def test_linearity(self):
        assert quantum_limit_temperature(18e9) == pytest.approx(
            2.0 * quantum_limit_temperature(9e9), rel=1e-12
        )

    def test_strictly_increasing(self):
        f = np.linspace(1e9, 20e9, 50)
        t = [quantum_limit_temperature(x) for x in f]
        assert np.all(np.diff(t) > 0.0)

    def test_half_photon_convention(self):
        assert quantum_limit_temperature(10e9, half_photon=True) == pytest.approx(
            TQ_10_GHZ / 2.0, rel=1e-12
        )

    def test_invalid_frequency(self):
        with pytest.raises(ValueError):
            quantum_limit_temperature(0.0)


class TestFriisCascade:
    def test_single_stage(self):
        assert friis_cascade([NoiseStage("x", 20.0, 1.7)]) == 1.7

    def test_twpa_plus_hemt(self):
        chain = [NoiseStage("TWPA", 20.0, 0.6), NoiseStage("HEMT", 30.0, 4.0)]
        assert friis_cascade(chain) == pytest.approx(0.64, rel=1e-12)

    def test_hemt_plus_fet(self):
        chain = [NoiseStage("HEMT", 30.0, 4.0), NoiseStage("FET", 30.0, 100.0)]
        assert friis_cascade(chain) == pytest.approx(4.1, rel=1e-12)

    def test_unit_gain_zero_noise_stage_is_neutral(self):
        chain = [NoiseStage("TWPA", 20.0, 0.6), NoiseStage("HEMT", 30.0, 4.0)]
        extended = chain + [NoiseStage("ideal", 0.0, 0.0)]
        assert friis_cascade(extended) == friis_cascade(chain)

    def test_first_stage_gain_dominates(self):
        second = NoiseStage("HEMT", 30.0, 4.0)
        temps = [
            friis_cascade([NoiseStage("front", g, 0.6), second])
            for g in (10.0, 20.0, 30.0, 40.0)
        ]
        assert np.all(np.diff(temps) < 0.0)
        assert temps[-1] == pytest.approx(0.6, abs=1e-3)

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            friis_cascade([])

    def test_stage_validation(self):
        with pytest.raises(ValueError):
            NoiseStage("bad", 20.0, -1.0)
        with pytest.raises(ValueError):
            NoiseStage("bad", float("inf"), 1.0)


class TestSnrImprovement:
    def test_equal_temperatures(self):
        assert snr_improvement(4.0, 4.0) == 0.0

    def test_hemt_to_twpa_front_end(self):
        assert snr_improvement(4.0, 0.64) == pytest.approx(
            7.958800173440752, rel=1e-12
        )

    def test_to_quantum_limit_at_9ghz(self):
        assert snr_improvement(4.0, quantum_limit_temperature(9e9)) == pytest.approx(
            9.666447351343264, rel=1e-12
        )

    def test_invalid(self):
        with pytest.raises(ValueError):
            snr_improvement(0.0, 1.0)


class TestBudgetReport:
    def test_contributions_sum_to_system(self):
        chain = [
            NoiseStage("TWPA", 20.0, 0.6),
            NoiseStage("HEMT", 30.0, 4.0),
            NoiseStage("FET", 30.0, 100.0),
        ]
        report = budget_report(chain)
        assert report.system_temperature_k == pytest.approx(friis_cascade(chain),
                                                            rel=1e-12)
        assert report.contributions_k[0] == 0.6
        assert report.contributions_k[1] == pytest.approx(0.04, rel=1e-12)

    def test_text_alignment(self):
        report = budget_report([NoiseStage("TWPA", 20.0, 0.6)])
        lines = report.text().splitlines()
        assert lines[0].startswith("stage")
        assert lines[-1].startswith("system")

    def test_csv(self, tmp_path):
        report = budget_report([
            NoiseStage("TWPA", 20.0, 0.6),
            NoiseStage("HEMT", 30.0, 4.0),
        ])
        path = tmp_path / "budget.csv"
        report.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "stage,gain_db,noise_k,contribution_k"
        assert len(lines) == 4
        assert lines[-1].startswith("system")
