"""Batch command-line front end.

One verb per procedure: dispersion, gain, qpm, kitwpa-plan, rpm-plan, noise,
analyze-gain, analyze-idler, analyze-jj.  Runs are configured by an INI file
whose keys carry explicit unit suffixes (ic_ua, cg_ff, f_pump_ghz, ...);
every key can be overridden on the command line with --set section.key=value.
Without a config file the built-in defaults describe the 990-cell rf-SQUID
prototype.  Exit codes: 0 success, 2 config error, 3 numeric failure,
4 partial sweep.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name
from .analysis import (
    IdlerScan,
    SpectrumTrace,
    compare_processes,
    idler_scan_features,
    jj_statistics,
    pump_on_off_gain,
    read_resistance_csv,
)
from .circuit import JosephsonJunction, KineticCell, RfSquidCell
from .coupled_mode import sweep_gain
from .dispersion import LineSpec, find_stopbands, scan_dispersion
from .errors import ComparisonUnavailableError, ConfigError, TwpakitError
from .matching import LoadingPlan, apply_plan, kitwpa_plan, qpm_sign_profile, rpm_plan
from .noise import NoiseStage, budget_report

SIMULATE_VERBS = {"dispersion", "gain", "qpm", "kitwpa-plan", "rpm-plan", "noise"}
ANALYZE_VERBS = {"analyze-gain", "analyze-idler", "analyze-jj"}

DEFAULTS = {
    "line": {
        "type": "rf_squid",
        "n_cells": "990",
        "lg_ph": "45.0",
        "ic_ua": "1.5",
        "cj_ff": "25.8",
        "cg_ff": "13.0",
        "bias_phase_rad": "0.0",
        "ld_ph": "44.5",
        "lf_ph": "10.0",
        "c_ff": "17.8",
        "i_star_ua": "1000.0",
        "bias_current_ua": "0.0",
    },
    "dispersion": {
        "f_min_ghz": "0.5",
        "f_max_ghz": "20.0",
        "points_per_decade": "2001",
        "spacing": "log",
    },
    "pump": {
        "f_ghz": "6.75",
        "power_dbm_min": "-90.0",
        "power_dbm_max": "-50.0",
        "power_points": "9",
    },
    "signal": {"f_ghz_min": "3.3", "f_ghz_max": "3.3", "points": "1"},
    "mixing": {"mode": "3wm", "tolerance": "1e-9", "signal_dbm": "-130.0"},
    "qpm": {"delta_k_rad_per_cell": "0.0628318530717958", "n_cells": ""},
    "kitwpa": {
        "f_pump_ghz": "9.0",
        "detuning_fraction": "0.02",
        "impedance_scale": "1.2",
        "third_length_scale": "auto",
    },
    "rpm": {"f_gap_ghz": "8.0", "spacing_cells": "10", "impedance_ratio": "12.0"},
    "noise": {"stages": "TWPA 20.0 0.6\nHEMT 30.0 4.0\nFET 30.0 100.0"},
    "analysis": {
        "jj_csv": "",
        "spectrum_on_csv": "",
        "spectrum_off_csv": "",
        "idler_csv": "",
    },
    "run": {"allow_both": "false"},
    "output": {"dir": "twpakit-out"},
}


@dataclass
class RunConfig:
    """Validated key/value configuration plus the actions to execute."""

    parser: configparser.ConfigParser
    actions: tuple
    output_dir: Path
    failures: list = field(default_factory=list)

    def get(self, section: str, key: str) -> str:
        try:
            return self.parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError) as exc:
            raise ConfigError("missing key", key=f"{section}.{key}") from exc

    def get_float(self, section: str, key: str) -> float:
        raw = self.get(section, key)
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"not a number: {raw!r}", key=f"{section}.{key}") from exc

    def get_int(self, section: str, key: str) -> int:
        raw = self.get(section, key)
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"not an integer: {raw!r}", key=f"{section}.{key}") from exc

    def get_bool(self, section: str, key: str) -> bool:
        raw = self.get(section, key).strip().lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {raw!r}", key=f"{section}.{key}")

    def get_path(self, section: str, key: str) -> Path:
        raw = self.get(section, key)
        if not raw:
            raise ConfigError("path is empty", key=f"{section}.{key}")
        path = Path(raw)
        if not path.exists():
            raise ConfigError(f"file not found: {path}", key=f"{section}.{key}")
        return path


def load_config(path: str | None, overrides: list[str], actions: tuple,
                output_dir: str | None) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULTS)
    if path is not None:
        found = parser.read(path)
        if not found:
            raise ConfigError(f"config file not found: {path}", key="config")
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(
                f"override must look like section.key=value, got {item!r}",
                key="--set",
            )
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section.strip(), key.strip(), value.strip())
    config = RunConfig(
        parser=parser,
        actions=actions,
        output_dir=Path(output_dir or parser.get("output", "dir")),
    )
    _validate_actions(config)
    return config


def _validate_actions(config: RunConfig) -> None:
    sim = [a for a in config.actions if a in SIMULATE_VERBS]
    ana = [a for a in config.actions if a in ANALYZE_VERBS]
    if sim and ana and not config.get_bool("run", "allow_both"):
        raise ConfigError(
            "simulate and analyze pipelines both requested; set run.allow_both=true",
            key="run.allow_both",
        )


def build_line(config: RunConfig) -> LineSpec:
    kind = config.get("line", "type").strip().lower()
    n_cells = config.get_int("line", "n_cells")
    if kind == "rf_squid":
        cell = RfSquidCell(
            geometric_inductance=config.get_float("line", "lg_ph") * 1e-12,
            junction=JosephsonJunction(
                critical_current=config.get_float("line", "ic_ua") * 1e-6,
                self_capacitance=config.get_float("line", "cj_ff") * 1e-15,
            ),
            ground_capacitance=config.get_float("line", "cg_ff") * 1e-15,
        )
        bias = config.get_float("line", "bias_phase_rad")
    elif kind == "kinetic":
        cell = KineticCell(
            series_inductance=config.get_float("line", "ld_ph") * 1e-12,
            finger_inductance=config.get_float("line", "lf_ph") * 1e-12,
            ground_capacitance=config.get_float("line", "c_ff") * 1e-15,
            scale_current=config.get_float("line", "i_star_ua") * 1e-6,
        )
        bias = config.get_float("line", "bias_current_ua") * 1e-6
    else:
        raise ConfigError(f"unknown line type {kind!r}", key="line.type")
    line = LineSpec(base_cell=cell, n_cells=n_cells, bias=bias)
    if config.parser.has_option("line", "plan_json"):
        plan_path = config.get_path("line", "plan_json")
        line = apply_plan(line, LoadingPlan.load(plan_path))
    return line


def _dispersion_grid(config: RunConfig) -> np.ndarray:
    f_min = config.get_float("dispersion", "f_min_ghz") * 1e9
    f_max = config.get_float("dispersion", "f_max_ghz") * 1e9
    if not 0.0 < f_min < f_max:
        raise ConfigError("need 0 < f_min_ghz < f_max_ghz", key="dispersion.f_min_ghz")
    spacing = config.get("dispersion", "spacing").strip().lower()
    if spacing == "log":
        per_decade = config.get_float("dispersion", "points_per_decade")
        decades = np.log10(f_max / f_min)
        points = max(2, int(np.ceil(per_decade * decades)) + 1)
        return np.logspace(np.log10(f_min), np.log10(f_max), points)
    if spacing == "linear":
        points = config.get_int("dispersion", "points_per_decade")
        return np.linspace(f_min, f_max, max(2, points))
    raise ConfigError(f"spacing must be log or linear, got {spacing!r}",
                      key="dispersion.spacing")


def _pump_power_grid(config: RunConfig) -> np.ndarray:
    if config.parser.has_option("pump", "power_dbm"):
        return np.array([config.get_float("pump", "power_dbm")])
    lo = config.get_float("pump", "power_dbm_min")
    hi = config.get_float("pump", "power_dbm_max")
    n = config.get_int("pump", "power_points")
    if n < 1 or hi < lo:
        raise ConfigError("bad pump power grid", key="pump.power_points")
    return np.linspace(lo, hi, n)


def _signal_grid(config: RunConfig) -> np.ndarray:
    lo = config.get_float("signal", "f_ghz_min") * 1e9
    hi = config.get_float("signal", "f_ghz_max") * 1e9
    n = config.get_int("signal", "points")
    if n < 1 or hi < lo:
        raise ConfigError("bad signal grid", key="signal.points")
    return np.linspace(lo, hi, n)


def _mode(config: RunConfig) -> str:
    raw = config.get("mixing", "mode").strip().lower()
    if raw in ("3wm", "3"):
        return "3WM"
    if raw in ("4wm", "4"):
        return "4WM"
    raise ConfigError(f"mode must be 3wm or 4wm, got {raw!r}", key="mixing.mode")


class _Writer:
    """Collects written files and their checksums for the manifest."""

    def __init__(self, outdir: Path):
        self.outdir = outdir
        self.entries: list[dict] = []
        outdir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.outdir / name

    def record(self, path: Path) -> None:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.entries.append({
            "path": path.name,
            "sha256": digest,
            "bytes": path.stat().st_size,
        })


def _run_dispersion(config: RunConfig, writer: _Writer) -> None:
    line = build_line(config)
    curve = scan_dispersion(line, _dispersion_grid(config))
    out = writer.path("dispersion.csv")
    curve.to_csv(out)
    writer.record(out)
    bands = find_stopbands(curve)
    bands_path = writer.path("stopbands.json")
    with open(bands_path, "w") as fh:
        json.dump(
            [{"lower_hz": b.lower_hz, "upper_hz": b.upper_hz,
              "max_attenuation_nepers": b.max_attenuation_nepers} for b in bands],
            fh, indent=2, sort_keys=True)
    writer.record(bands_path)


def _run_gain(config: RunConfig, writer: _Writer) -> None:
    line = build_line(config)
    profile = sweep_gain(
        line,
        bias=line.bias,
        f_pump=config.get_float("pump", "f_ghz") * 1e9,
        pump_dbm=_pump_power_grid(config),
        signal_hz=_signal_grid(config),
        mode=_mode(config),
        tolerance=config.get_float("mixing", "tolerance"),
        signal_dbm=config.get_float("mixing", "signal_dbm"),
    )
    csv_path = writer.path("gain.csv")
    profile.to_csv(csv_path)
    writer.record(csv_path)
    summary_path = writer.path("gain_summary.json")
    profile.to_summary_json(summary_path)
    writer.record(summary_path)
    for i, j, reason in profile.missing:
        config.failures.append({
            "point": {"pump_dbm": float(profile.pump_dbm[i]),
                      "signal_hz": float(profile.signal_hz[j])},
            "reason": reason,
        })
    if profile.missing and not np.isfinite(profile.gain_db).any():
        raise TwpakitError("every sweep point failed")


def _run_qpm(config: RunConfig, writer: _Writer) -> None:
    delta_k = config.get_float("qpm", "delta_k_rad_per_cell")
    raw_n = config.get("qpm", "n_cells").strip()
    n_cells = int(raw_n) if raw_n else config.get_int("line", "n_cells")
    profile = qpm_sign_profile(delta_k, n_cells)
    path = writer.path("qpm_profile.json")
    with open(path, "w") as fh:
        json.dump(profile.to_json_dict(), fh, indent=2, sort_keys=True)
    writer.record(path)


def _run_kitwpa_plan(config: RunConfig, writer: _Writer) -> None:
    line = build_line(config)
    raw_scale = config.get("kitwpa", "third_length_scale").strip().lower()
    scale = None if raw_scale in ("", "auto") else float(raw_scale)
    plan = kitwpa_plan(
        f_pump=config.get_float("kitwpa", "f_pump_ghz") * 1e9,
        detuning_fraction=config.get_float("kitwpa", "detuning_fraction"),
        line=line,
        impedance_scale=config.get_float("kitwpa", "impedance_scale"),
        third_length_scale=scale,
    )
    path = writer.path("kitwpa_plan.json")
    plan.save(path)
    writer.record(path)


def _run_rpm_plan(config: RunConfig, writer: _Writer) -> None:
    line = build_line(config)
    plan = rpm_plan(
        f_gap=config.get_float("rpm", "f_gap_ghz") * 1e9,
        line=line,
        spacing_cells=config.get_int("rpm", "spacing_cells"),
        impedance_ratio=config.get_float("rpm", "impedance_ratio"),
    )
    path = writer.path("rpm_plan.json")
    plan.save(path)
    writer.record(path)


def _noise_stages(config: RunConfig) -> list[NoiseStage]:
    stages = []
    for line_no, raw in enumerate(config.get("noise", "stages").splitlines()):
        raw = raw.strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 3:
            raise ConfigError(
                f"stage line {line_no + 1} must be 'label gain_db temp_k'",
                key="noise.stages",
            )
        try:
            stages.append(NoiseStage(parts[0], float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ConfigError(str(exc), key="noise.stages") from exc
    if not stages:
        raise ConfigError("no stages given", key="noise.stages")
    return stages


def _run_noise(config: RunConfig, writer: _Writer) -> None:
    report = budget_report(_noise_stages(config))
    txt_path = writer.path("noise_budget.txt")
    txt_path.write_text(report.text() + "\n")
    writer.record(txt_path)
    csv_path = writer.path("noise_budget.csv")
    report.to_csv(csv_path)
    writer.record(csv_path)


def _run_analyze_gain(config: RunConfig, writer: _Writer) -> None:
    on = SpectrumTrace.from_csv(config.get_path("analysis", "spectrum_on_csv"))
    off = SpectrumTrace.from_csv(config.get_path("analysis", "spectrum_off_csv"))
    curve = pump_on_off_gain(on, off)
    path = writer.path("measured_gain.csv")
    with open(path, "w", newline="") as fh:
        fh.write("frequency_hz,gain_db\r\n")
        for f, g in zip(curve.frequency_hz, curve.gain_db):
            fh.write(f"{float(f)!r},{float(g)!r}\r\n")
    writer.record(path)


def _run_analyze_idler(config: RunConfig, writer: _Writer) -> None:
    scan = IdlerScan.from_csv(config.get_path("analysis", "idler_csv"))
    features = idler_scan_features(scan)
    path = writer.path("idler_features.json")
    with open(path, "w") as fh:
        json.dump(features, fh, indent=2, sort_keys=True)
    writer.record(path)


def _run_analyze_jj(config: RunConfig, writer: _Writer) -> None:
    records = read_resistance_csv(config.get_path("analysis", "jj_csv"))
    stats = jj_statistics(records)
    try:
        stats["process_comparison"] = compare_processes(records)
    except ComparisonUnavailableError as exc:
        stats["process_comparison"] = {"unavailable": str(exc)}
    path = writer.path("jj_stats.json")
    with open(path, "w") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
    writer.record(path)


_RUNNERS = {
    "dispersion": _run_dispersion,
    "gain": _run_gain,
    "qpm": _run_qpm,
    "kitwpa-plan": _run_kitwpa_plan,
    "rpm-plan": _run_rpm_plan,
    "noise": _run_noise,
    "analyze-gain": _run_analyze_gain,
    "analyze-idler": _run_analyze_idler,
    "analyze-jj": _run_analyze_jj,
}


def run_pipeline(config: RunConfig) -> dict:
    """Execute the configured actions and write the artifact manifest.

    Returns the manifest dict; CSV payloads are deterministic for a fixed
    config, timestamps appear only in the manifest itself.
    """
    writer = _Writer(config.output_dir)
    for action in config.actions:
        _RUNNERS[action](config, writer)
    manifest = {
        "tool": f"twpakit {__version__} ({backend_name()} kernels)",
        "actions": list(config.actions),
        "started_utc": datetime.now(timezone.utc).isoformat(),
        "files": writer.entries,
        "failures": config.failures,
    }
    manifest_path = writer.path("manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twpakit",
        description="Design, simulate and analyze travelling-wave parametric amplifiers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in sorted(SIMULATE_VERBS | ANALYZE_VERBS):
        p = sub.add_parser(verb)
        p.add_argument("-c", "--config", default=None,
                       help="INI config file (defaults describe the prototype line)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")
        p.add_argument("-o", "--output-dir", default=None,
                       help="output directory (config equivalent: output.dir)")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.overrides, (args.verb,),
                             args.output_dir)
        run_pipeline(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TwpakitError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    if config.failures:
        print(f"partial sweep: {len(config.failures)} grid point(s) failed",
              file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
