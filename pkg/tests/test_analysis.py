import numpy as np
import pytest

from twpakit.analysis import (
    IdlerScan,
    ResistanceRecord,
    SpectrumTrace,
    ambegaokar_baratoff_rn,
    compare_processes,
    idler_scan_features,
    jj_statistics,
    pump_on_off_gain,
    read_resistance_csv,
    write_resistance_csv,
)
from twpakit.errors import (
    AlignmentError,
    ComparisonUnavailableError,
    NoModulationError,
)

from _synth import idler_parabola, resistance_dataset, spectrum_pair


class TestPumpOnOffGain:
    def test_identical_traces_zero_gain(self):
        on, off = spectrum_pair(gain_db=0.0)
        curve = pump_on_off_gain(on, off)
        assert np.allclose(curve.gain_db, 0.0)

    def test_single_bin_bump(self):
        f = np.linspace(1e9, 2e9, 11)
        off = SpectrumTrace(f, np.full(11, -90.0), 1e5, "pump-off")
        power_on = np.full(11, -90.0)
        power_on[5] += 27.0
        on = SpectrumTrace(f, power_on, 1e5, "pump-on")
        curve = pump_on_off_gain(on, off)
        assert curve.gain_db[5] == pytest.approx(27.0)
        assert np.allclose(np.delete(curve.gain_db, 5), 0.0)

    def test_grid_mismatch_rejected(self):
        f1 = np.linspace(1e9, 2e9, 11)
        f2 = np.linspace(1e9, 2e9, 12)
        on = SpectrumTrace(f1, np.zeros(11), 1e5, "pump-on")
        off = SpectrumTrace(f2, np.zeros(12), 1e5, "pump-off")
        with pytest.raises(AlignmentError):
            pump_on_off_gain(on, off)

    def test_self_difference_identically_zero(self):
        on, _ = spectrum_pair(gain_db=27.0)
        assert np.all(pump_on_off_gain(on, on).gain_db == 0.0)

    def test_csv_round_trip(self, tmp_path):
        on, _ = spectrum_pair()
        path = tmp_path / "trace.csv"
        on.to_csv(path)
        assert path.read_text().splitlines()[0] == "frequency_hz,power_dbm"
        back = SpectrumTrace.from_csv(path)
        assert np.array_equal(back.frequency_hz, on.frequency_hz)
        assert np.array_equal(back.power_dbm, on.power_dbm)
        assert back.rbw_hz == on.rbw_hz and back.label == on.label


class TestIdlerScanFeatures:
    def test_symmetric_parabola_zero_offset(self):
        scan = idler_parabola(offset_a=0.0)
        features = idler_scan_features(scan)
        assert features["minimum_bias_offset_a"] == pytest.approx(0.0, abs=1e-9)

    def test_shifted_parabola_recovers_offset(self):
        scan = idler_parabola(offset_a=50e-6)
        features = idler_scan_features(scan)
        assert features["minimum_bias_offset_a"] == pytest.approx(50e-6, rel=1e-6)

    def test_depth_and_floor(self):
        scan = idler_parabola(depth_db=10.0, floor_gap_db=5.0)
        features = idler_scan_features(scan)
        assert features["modulation_depth_db"] == pytest.approx(10.0, abs=0.1)
        assert features["floor_reached"] is False

    def test_floor_reached_when_close(self):
        scan = idler_parabola(depth_db=10.0, floor_gap_db=0.5)
        assert idler_scan_features(scan)["floor_reached"] is True

    def test_offset_equivariance(self):
        base = idler_parabola(offset_a=20e-6)
        f0 = idler_scan_features(base)["minimum_bias_offset_a"]
        delta = 35e-6
        shifted = IdlerScan(base.bias_a + delta, base.idler_dbm,
                            base.pump_dbm, base.floor_dbm)
        f1 = idler_scan_features(shifted)["minimum_bias_offset_a"]
        assert f1 - f0 == pytest.approx(delta, rel=1e-9)

    def test_flat_scan_no_modulation(self):
        bias = np.linspace(-1e-4, 1e-4, 21)
        scan = IdlerScan(bias, np.full(21, -80.0), -85.0, -100.0)
        with pytest.raises(NoModulationError):
            idler_scan_features(scan)

    def test_minimum_point_count(self):
        bias = np.linspace(-1e-4, 1e-4, 4)
        scan = IdlerScan(bias, np.array([-70.0, -80.0, -75.0, -70.0]), -85.0, -100.0)
        with pytest.raises(ValueError):
            idler_scan_features(scan)

    def test_csv_round_trip(self, tmp_path):
        scan = idler_parabola(offset_a=10e-6)
        path = tmp_path / "idler.csv"
        scan.to_csv(path)
        assert path.read_text().splitlines()[0] == "bias_a,idler_dbm"
        back = IdlerScan.from_csv(path)
        assert np.array_equal(back.bias_a, scan.bias_a)
        assert back.pump_dbm == scan.pump_dbm
        assert back.floor_dbm == scan.floor_dbm


class TestJjStatistics:
    def test_constant_array(self):
        records = [
            ResistanceRecord(0, 0, "A", j, 12.0, "static") for j in range(10)
        ]
        stats = jj_statistics(records)
        arr = stats["arrays"]["A"]
        assert arr["cv"] == 0.0
        assert arr["slope_ohm_per_index"] == pytest.approx(0.0, abs=1e-15)
        assert arr["mean_ohm"] == 12.0

    def test_synthetic_recovery(self):
        records, true_slopes = resistance_dataset(seed=8)
        stats = jj_statistics(records)
        assert stats["global"]["n"] == 960
        assert stats["global"]["mean_ohm"] == pytest.approx(12.0, abs=0.2)
        assert stats["global"]["mean_array_cv"] == pytest.approx(0.07, abs=0.005)
        for array_id, info in stats["arrays"].items():
            assert np.sign(info["slope_ohm_per_index"]) == np.sign(
                true_slopes[array_id]
            )

    def test_reorder_invariance(self, rng):
        records, _ = resistance_dataset(seed=3, n_arrays=4, per_array=30)
        stats_a = jj_statistics(records)
        shuffled = list(records)
        rng.shuffle(shuffled)
        stats_b = jj_statistics(shuffled)
        for key in stats_a["arrays"]:
            for field in ("mean_ohm", "cv", "slope_ohm_per_index"):
                assert stats_a["arrays"][key][field] == pytest.approx(
                    stats_b["arrays"][key][field], rel=1e-12
                )

    def test_rescaling_behavior(self):
        records, _ = resistance_dataset(seed=5, n_arrays=4, per_array=30)
        scaled = [
            ResistanceRecord(r.wafer_x, r.wafer_y, r.array_id, r.junction_index,
                             3.0 * r.resistance_ohm, r.process)
            for r in records
        ]
        base = jj_statistics(records)
        big = jj_statistics(scaled)
        for key in base["arrays"]:
            assert big["arrays"][key]["cv"] == pytest.approx(
                base["arrays"][key]["cv"], rel=1e-12
            )
            assert big["arrays"][key]["slope_ohm_per_index"] == pytest.approx(
                3.0 * base["arrays"][key]["slope_ohm_per_index"], rel=1e-12
            )

    def test_short_array_skipped_with_warning(self):
        records = [
            ResistanceRecord(0, 0, "A", j, 12.0 + 0.01 * j, "static")
            for j in range(10)
        ] + [ResistanceRecord(1, 0, "B", 0, 11.0, "dynamic")]
        with pytest.warns(UserWarning, match="fewer than 2"):
            stats = jj_statistics(records)
        assert "B" not in stats["arrays"]
        assert "A" in stats["arrays"]

    def test_csv_round_trip(self, tmp_path):
        records, _ = resistance_dataset(seed=1, n_arrays=2, per_array=5)
        path = tmp_path / "jj.csv"
        write_resistance_csv(records, path)
        header = path.read_text().splitlines()[0]
        assert header == "wafer_x,wafer_y,array_id,junction_index,resistance_ohm,process"
        back = read_resistance_csv(path)
        assert back == records


class TestCompareProcesses:
    def test_identical_distributions_not_significant(self, rng):
        records = []
        values = rng.normal(12.0, 0.8, 200)
        for j, v in enumerate(values):
            records.append(ResistanceRecord(0, 0, "A", j, float(v), "static"))
            records.append(ResistanceRecord(0, 1, "B", j, float(v), "dynamic"))
        result = compare_processes(records)
        assert result["mean_difference_ohm"] == pytest.approx(0.0, abs=1e-12)
        assert not result["significant"]

    def test_shifted_static_detected(self, rng):
        records = []
        for j in range(480):
            records.append(ResistanceRecord(
                0, 0, "A", j, float(rng.normal(13.0, 0.8)), "static"))
            records.append(ResistanceRecord(
                0, 1, "B", j, float(rng.normal(12.0, 0.8)), "dynamic"))
        result = compare_processes(records)
        assert result["significant"]
        assert result["static_higher"]
        assert result["mean_difference_ohm"] == pytest.approx(1.0, abs=0.2)

    def test_single_process_unavailable(self):
        records = [
            ResistanceRecord(0, 0, "A", j, 12.0, "static") for j in range(10)
        ]
        with pytest.raises(ComparisonUnavailableError):
            compare_processes(records)

    def test_label_swap_antisymmetry(self, rng):
        records = []
        for j in range(100):
            records.append(ResistanceRecord(
                0, 0, "A", j, float(rng.normal(12.6, 0.7)), "static"))
            records.append(ResistanceRecord(
                0, 1, "B", j, float(rng.normal(12.0, 0.7)), "dynamic"))
        swapped = [
            ResistanceRecord(r.wafer_x, r.wafer_y, r.array_id, r.junction_index,
                             r.resistance_ohm,
                             "dynamic" if r.process == "static" else "static")
            for r in records
        ]
        a = compare_processes(records)
        b = compare_processes(swapped)
        assert a["mean_difference_ohm"] == pytest.approx(
            -b["mean_difference_ohm"], rel=1e-12
        )
        assert a["t_statistic"] == pytest.approx(-b["t_statistic"], rel=1e-12)


class TestAmbegaokarBaratoff:
    def test_homogeneity_sample_value(self):
        # pi * Delta / (2 e Ic) with the aluminum gap assumption
        assert ambegaokar_baratoff_rn(4e-6, 180e-6) == pytest.approx(
            70.68583470577036, rel=1e-12
        )

    def test_prototype_junction_value(self):
        assert ambegaokar_baratoff_rn(1.5e-6, 180e-6) == pytest.approx(
            188.4955592153876, rel=1e-12
        )

    def test_inverse_scaling_in_ic(self):
        assert ambegaokar_baratoff_rn(8e-6) == pytest.approx(
            ambegaokar_baratoff_rn(4e-6) / 2.0, rel=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            ambegaokar_baratoff_rn(0.0)


class TestRecordValidation:
    def test_bad_process_label(self):
        with pytest.raises(ValueError):
            ResistanceRecord(0, 0, "A", 0, 12.0, "thermal")

    def test_bad_resistance(self):
        with pytest.raises(ValueError):
            ResistanceRecord(0, 0, "A", 0, -1.0, "static")
