"""Command-line front end.

Subcommands
-----------
region-scan   entanglement criteria over a gain grid (CSV/JSON)
spectrum      coherence spectra over the deviation axis (CSV/JSON)
channels      closed-form + numeric coherent channels (JSON/CSV)
profile       criteria along the deviation axis with dressed gain (CSV/JSON)
validate      run the built-in validation checks

Configuration is a single JSON document. Precedence, lowest to highest:
built-in defaults, ``--preset`` document, ``--config`` file, command-line
flags (``--out``, ``--format``, ``--jobs``). Exit codes: 0 success,
1 runtime or numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .coherence import (
    AtomicParams,
    DressingCase,
    ResonanceError,
    analytic_resonances,
    channel_capacity,
    criteria_profile,
    find_peaks,
    rho3_dressed,
)
from .criteria import CriterionError, GridAxis, sweep_criteria
from .presets import load_preset
from .validation import run_checks

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    """Invalid configuration (bad preset, schema, labels, paths, grids)."""


REGION_DEFAULTS = {
    "system": "tri",
    "gains": {
        "G1": {"start": 1.0, "stop": 3.0, "step": 0.02},
        "G2": {"start": 1.0, "stop": 3.0, "step": 0.02},
    },
    "criteria": ["D12", "D13", "D23"],
}
SPECTRUM_DEFAULTS = {
    "cases": ["fwm1_s2"],
    "params": {},
    "grid": {"start": -50.0, "stop": 40.0, "step": 0.1},
}
CHANNELS_DEFAULTS = {
    "case": "rho2_e1",
    "params": {},
    "grid": {"start": -50.0, "stop": 40.0, "step": 0.1},
}
PROFILE_DEFAULTS = {
    "system": "tri",
    "case": "rho2_e1",
    "params": {},
    "grid": {"start": -50.0, "stop": 40.0, "step": 0.2},
    "amplitude": 1.0,
    "gains": {"G2": 1.2},
    "criteria": ["D12", "D23"],
}


def _merge(base, overlay):
    """Recursive dict merge; non-dict overlay values replace base values."""
    if not isinstance(base, dict) or not isinstance(overlay, dict):
        return overlay
    merged = dict(base)
    for key, value in overlay.items():
        merged[key] = _merge(merged.get(key), value) if key in merged else value
    return merged


def _resolve_config(args, command: str, defaults: dict) -> dict:
    cfg = dict(defaults)
    if getattr(args, "preset", None):
        try:
            preset = load_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        declared = preset.pop("command", None)
        if declared is not None and declared != command:
            raise ConfigError(
                f"preset {args.preset!r} is for the {declared!r} command, not {command!r}"
            )
        cfg = _merge(cfg, preset)
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
            overlay = json.loads(text)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(overlay, dict):
            raise ConfigError("config file must contain a JSON object")
        overlay.pop("command", None)
        cfg = _merge(cfg, overlay)
    cfg["out"] = getattr(args, "out", None)
    cfg["format"] = getattr(args, "format", "csv")
    cfg["jobs"] = getattr(args, "jobs", 1)
    if cfg["jobs"] < 1:
        raise ConfigError("--jobs must be >= 1")
    return cfg


def _atomic_params(cfg) -> AtomicParams:
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object of atomic parameters")
    try:
        return AtomicParams(**params)
    except TypeError as exc:
        raise ConfigError(f"bad atomic parameter: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad atomic parameter value: {exc}") from exc


def _dressing_case(name) -> DressingCase:
    try:
        return DressingCase(name)
    except ValueError as exc:
        valid = ", ".join(c.value for c in DressingCase)
        raise ConfigError(f"unknown dressing case {name!r}; valid: {valid}") from exc


def _grid_array(spec) -> np.ndarray:
    if not isinstance(spec, dict) or not {"start", "stop", "step"} <= set(spec):
        raise ConfigError("'grid' must be an object with start, stop and step")
    start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
    if step <= 0 or stop <= start:
        raise ConfigError(f"invalid grid [{start}, {stop}] step {step}")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _gain_axes(spec) -> dict:
    if not isinstance(spec, dict):
        raise ConfigError("'gains' must be an object mapping G1/G2/G3 to values or ranges")
    axes = {}
    for name, value in spec.items():
        if isinstance(value, dict):
            if not {"start", "stop", "step"} <= set(value):
                raise ConfigError(f"gain range {name} needs start, stop and step")
            axes[name] = GridAxis(float(value["start"]), float(value["stop"]), float(value["step"]))
        else:
            axes[name] = float(value)
    return axes


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip form, locale independent
    return str(value)


def _emit_rows(cfg, header: list, rows: list) -> None:
    """Write rows as CSV or JSON to cfg['out'] (stdout when unset)."""
    fmt = cfg["format"]
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown output format {fmt!r}; expected csv or json")
    _write_text(cfg["out"], text)


def _write_text(out, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write output file {out!r}: {exc}") from exc


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_region_scan(cfg) -> int:
    system = cfg.get("system")
    axes = _gain_axes(cfg.get("gains", {}))
    try:
        rows = sweep_criteria(system, axes, cfg.get("criteria", []), jobs=cfg["jobs"])
    except CriterionError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    gain_names = ["G1", "G2"] if system == "tri" else ["G1", "G2", "G3"]
    header = gain_names + ["criterion", "value", "entangled", "region"]
    out_rows = [
        list(r.gains) + [r.criterion, r.value, r.entangled, r.region] for r in rows
    ]
    _emit_rows(cfg, header, out_rows)
    return EXIT_OK


def _spectrum_cases(cfg) -> list:
    if "case" in cfg:
        return [_dressing_case(cfg["case"])]
    cases = cfg.get("cases", [])
    if not cases:
        raise ConfigError("spectrum needs a 'case' or a nonempty 'cases' list")
    return [_dressing_case(c) for c in cases]


def _cmd_spectrum(cfg) -> int:
    params = _atomic_params(cfg)
    grid = _grid_array(cfg.get("grid"))
    step = float(grid[1] - grid[0])
    if step > params.min_gamma:
        raise ConfigError(
            f"grid step {step:g} MHz too coarse: must be <= min gamma {params.min_gamma:g} MHz"
        )
    cases = _spectrum_cases(cfg)
    if len(cases) > 1 and cfg["out"] is None:
        raise ConfigError("multiple spectrum cases need --out (one file per case)")
    header = ["delta1", "abs_rho_normalized", "abs_rho_raw", "real", "imag"]
    for case in cases:
        rho = rho3_dressed(case, params, grid)
        raw = np.abs(rho)
        top = float(raw.max())
        normalized = raw / top if top > 0 else np.zeros_like(raw)
        rows = [
            [float(grid[k]), float(normalized[k]), float(raw[k]), float(rho[k].real), float(rho[k].imag)]
            for k in range(grid.size)
        ]
        case_cfg = dict(cfg)
        if len(cases) > 1:
            path = Path(cfg["out"])
            case_cfg["out"] = str(path.with_name(f"{path.stem}_{case.value}{path.suffix}"))
        _emit_rows(case_cfg, header, rows)
    return EXIT_OK


def _cmd_channels(cfg) -> int:
    params = _atomic_params(cfg)
    case = _dressing_case(cfg.get("case"))
    grid = _grid_array(cfg.get("grid"))
    warnings = []
    try:
        channels = analytic_resonances(case, params)
    except ResonanceError as exc:
        doc = {
            "case": case.value,
            "n_channels": 0,
            "capacity": None,
            "channels": [],
            "warnings": [str(exc)],
        }
        _write_channels(cfg, doc)
        return EXIT_OK
    try:
        peaks = find_peaks(case, params, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if len(peaks) != len(channels):
        warnings.append(
            f"numeric peak count {len(peaks)} differs from analytic channel count {len(channels)}"
        )
    entries = []
    for ch in channels:
        entry = {
            "label": ch.label,
            "delta1_analytic": ch.delta1,
            "delta2": ch.delta2,
            "delta2p": ch.delta2p,
            "delta3": ch.delta3,
            "delta1_numeric": None,
            "height": None,
            "position_diff": None,
        }
        if peaks:
            nearest = min(peaks, key=lambda pk: abs(pk.delta1 - ch.delta1))
            entry["delta1_numeric"] = nearest.delta1
            entry["height"] = nearest.height
            entry["position_diff"] = abs(nearest.delta1 - ch.delta1)
        entries.append(entry)
    doc = {
        "case": case.value,
        "n_channels": len(channels),
        "capacity": channel_capacity(len(channels)),
        "channels": entries,
        "warnings": warnings,
    }
    _write_channels(cfg, doc)
    return EXIT_OK


def _write_channels(cfg, doc) -> None:
    if cfg["format"] == "csv":
        header = [
            "label", "delta1_analytic", "delta1_numeric", "position_diff",
            "delta2", "delta2p", "delta3", "capacity",
        ]
        rows = [
            [
                ch["label"], ch["delta1_analytic"], ch["delta1_numeric"],
                ch["position_diff"], ch["delta2"], ch["delta2p"], ch["delta3"],
                doc["capacity"],
            ]
            for ch in doc["channels"]
        ]
        _emit_rows(cfg, header, rows)
    else:
        _write_text(cfg["out"], json.dumps(doc, indent=2) + "\n")


def _cmd_profile(cfg) -> int:
    params = _atomic_params(cfg)
    case = _dressing_case(cfg.get("case"))
    grid = _grid_array(cfg.get("grid"))
    system = cfg.get("system")
    gains = cfg.get("gains", {})
    if not isinstance(gains, dict) or "G2" not in gains:
        raise ConfigError("profile needs 'gains' with at least G2")
    try:
        amplitude = float(cfg.get("amplitude", 1.0))
        g2 = float(gains["G2"])
        g3 = float(gains["G3"]) if gains.get("G3") is not None else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile gains/amplitude: {exc}") from exc
    try:
        rows = criteria_profile(
            system, case, params, grid, amplitude, g2, g3, cfg.get("criteria", [])
        )
    except CriterionError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    header = ["delta1", "G1", "criterion", "value", "entangled"]
    out_rows = [[r.delta1, r.g1_amp, r.criterion, r.value, r.entangled] for r in rows]
    # channel markers: position, modulated gain there, label; appended after the data
    top = float(np.abs(rho3_dressed(case, params, grid)).max())
    for ch in analytic_resonances(case, params):
        g_at = float(np.cosh(amplitude * abs(rho3_dressed(case, params, ch.delta1)) / top))
        out_rows.append([ch.delta1, g_at, f"channel:{ch.label}", ch.delta1, None])
    _emit_rows(cfg, header, out_rows)
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        results = run_checks(args.filter)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  [{r.seconds:6.2f}s]  {r.detail}")
    all_ok = all(r.passed for r in results)
    lines.append(f"{'-' * width}")
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        payload = [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "seconds": r.seconds}
            for r in results
        ]
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if all_ok else EXIT_RUNTIME


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _add_common(sub, default_format: str = "csv") -> None:
    sub.add_argument("--config", help="JSON config file overlaying the preset/defaults")
    sub.add_argument("--preset", help="name of a bundled preset")
    sub.add_argument("--out", help="output path (stdout when omitted)")
    sub.add_argument(
        "--format", choices=("csv", "json"), default=default_format, help="output format"
    )
    sub.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delcfwm",
        description="Cascaded-FWM multipartite entanglement and atomic-coherence toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, help_text, fmt in (
        ("region-scan", "entanglement criteria over a gain grid", "csv"),
        ("spectrum", "coherence spectra over the deviation axis", "csv"),
        ("channels", "coherent channels: closed-form and numeric positions", "json"),
        ("profile", "criteria along the deviation axis with dressed gain", "csv"),
    ):
        _add_common(subs.add_parser(name, help=help_text), default_format=fmt)

    val = subs.add_parser("validate", help="run the built-in validation checks")
    val.add_argument("--filter", help="run only checks whose name contains this substring")
    val.add_argument("--out", help="also write a JSON report to this path")
    return parser


_HANDLERS = {
    "region-scan": (_cmd_region_scan, REGION_DEFAULTS),
    "spectrum": (_cmd_spectrum, SPECTRUM_DEFAULTS),
    "channels": (_cmd_channels, CHANNELS_DEFAULTS),
    "profile": (_cmd_profile, PROFILE_DEFAULTS),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        handler, defaults = _HANDLERS[args.command]
        cfg = _resolve_config(args, args.command, defaults)
        return handler(cfg)
    except (ConfigError, CriterionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
