"""Command-line surface for the toolkit.

Subcommands:
  dispersion  refractive/group index queries against the material catalog
  cavity      Fabry-Perot figures: round-trip factor, finesse, p_out
  spectrum    sampled joint spectral intensity + mode/cluster report
  design      full single-mode device solve from a goal description
  sweep       parameter sweeps (single-mode finesse curve, cavity figures)

Each subcommand takes either inline flags or ``--config file.json`` (never
both).  A config document is a single JSON object::

    {
      "command": "spectrum",
      "parameters": { ... same names as the long flags ... },
      "output": {"csv": "spec.csv", "clusters_json": "clusters.json"},
      "catalog_path": "optional/materials.json"
    }

Unknown fields anywhere in the document are rejected.  Units follow the
device conventions: wavelengths in nm, lengths in cm, poling periods in um,
temperatures in deg C, loss in dB/cm.

Exit codes: 0 success, 1 domain error (physics precondition violated,
unwritable output), 2 usage/config error.  Declared outputs are written
atomically (temp file + rename) after all computation succeeds, so a failed
run never leaves partial artifacts behind.

The material catalog can also be overridden with the CAVITYSPDC_CATALOG
environment variable (lowest precedence after --catalog and the config's
catalog_path).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import cavity as _cavity
from . import designer as _designer
from . import dispersion as _dispersion
from . import plots as _plots
from . import spectrum as _spectrum
from .errors import DomainError, ParameterError, ValidityRangeError

CATALOG_ENV_VAR = "CAVITYSPDC_CATALOG"

# ----------------------------------------------------------------- output --


def _atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cavityspdc-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ----------------------------------------------------------------- config --

_TOP_FIELDS = {"command", "parameters", "output", "catalog_path"}


def _load_config(path: str, command: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParameterError(f"config {path}: top level must be an object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise ParameterError(f"config {path}: unknown field(s) {sorted(unknown)}")
    if doc.get("command") != command:
        raise ParameterError(
            f"config {path}: command {doc.get('command')!r} does not match "
            f"subcommand {command!r}"
        )
    params = doc.get("parameters", {})
    output = doc.get("output", {})
    if not isinstance(params, dict):
        raise ParameterError(f"config {path}: 'parameters' must be an object")
    if not isinstance(output, dict):
        raise ParameterError(f"config {path}: 'output' must be an object")
    catalog_path = doc.get("catalog_path")
    if catalog_path is not None and not isinstance(catalog_path, str):
        raise ParameterError(f"config {path}: 'catalog_path' must be a string")
    return params, output, catalog_path


def _window_pair(value):
    lo, hi = value
    return (float(lo), float(hi))


def _strict_bool(value):
    if isinstance(value, bool):
        return value
    raise ValueError(f"expected true/false, got {value!r}")


def _validated(params: dict, spec: dict, command: str) -> dict:
    """Apply a {name: (converter, required, default)} schema to a dict."""
    unknown = set(params) - set(spec)
    if unknown:
        raise ParameterError(f"{command}: unknown parameter(s) {sorted(unknown)}")
    out = {}
    for name, (conv, required, default) in spec.items():
        value = params.get(name)
        if value is not None:
            try:
                out[name] = conv(value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"{command}: parameter {name!r}: {exc}") from exc
        elif required:
            raise ParameterError(f"{command}: missing required parameter {name!r}")
        else:
            out[name] = default
    return out


def _gather(args, spec: dict, output_keys: tuple, command: str):
    """Merge config-file or inline flags into (params, output, catalog_path).

    ``--config`` excludes every inline parameter/output flag; --catalog and
    --threads stay usable as runtime overrides either way.
    """
    # --threads is a runtime override, usable alongside --config
    inline_params = {
        k: getattr(args, k)
        for k in spec
        if k != "threads" and getattr(args, k, None) is not None
    }
    inline_output = {k: getattr(args, f"out_{k}") for k in output_keys if getattr(args, f"out_{k}", None) is not None}
    if args.config is not None:
        if inline_params or inline_output:
            offending = sorted(inline_params) + sorted(inline_output)
            raise ParameterError(
                f"{command}: --config excludes inline flags (got {offending}); "
                "use one or the other"
            )
        raw_params, raw_output, catalog_path = _load_config(args.config, command)
    else:
        raw_params, raw_output, catalog_path = inline_params, inline_output, None
    unknown_out = set(raw_output) - set(output_keys)
    if unknown_out:
        raise ParameterError(f"{command}: unknown output key(s) {sorted(unknown_out)}")
    params = _validated(raw_params, spec, command)
    output = {k: str(v) for k, v in raw_output.items()}
    return params, output, catalog_path


def _resolve_catalog(args, config_catalog_path):
    path = getattr(args, "catalog", None) or config_catalog_path or os.environ.get(CATALOG_ENV_VAR)
    return _dispersion.load_material_catalog(path if path else None)


# ------------------------------------------------------------- dispersion --

_DISPERSION_SPEC = {
    "material": (str, True, None),
    "axis": (str, True, None),
    "wavelength_nm": (float, True, None),
    "temperature_c": (float, True, None),
}


def _run_dispersion(args):
    params, output, cat_path = _gather(args, _DISPERSION_SPEC, ("json",), "dispersion")
    catalog = _resolve_catalog(args, cat_path)
    model = catalog.get(params["material"], params["axis"])
    lam_um = params["wavelength_nm"] * 1.0e-3
    n = _dispersion.refractive_index(model, lam_um, params["temperature_c"])
    try:
        n_group = _dispersion.group_index(model, lam_um, params["temperature_c"])
    except ValidityRangeError:
        n_group = None  # too close to the validity edge for the stencil
    lines = [
        f"material = {model.material}/{model.axis}",
        f"n = {n:.9f}",
    ]
    if n_group is not None:
        lines.append(f"group_index = {n_group:.9f}")
    artifacts = []
    if "json" in output:
        doc = {
            "material": model.material,
            "axis": model.axis,
            "wavelength_nm": params["wavelength_nm"],
            "temperature_c": params["temperature_c"],
            "n": n,
            "group_index": n_group,
            "citation": model.citation,
        }
        artifacts.append((output["json"], _json_text(doc).encode()))
    return lines, artifacts


# ----------------------------------------------------------------- cavity --

_CAVITY_SPEC = {
    "length_cm": (float, True, None),
    "r1": (float, True, None),
    "r2": (float, True, None),
    "alpha_db_cm": (float, False, 0.0),
    "group_index_signal": (float, False, None),
    "group_index_idler": (float, False, None),
}


def _run_cavity(args):
    params, output, cat_path = _gather(args, _CAVITY_SPEC, ("json",), "cavity")
    spec = _cavity.CavitySpec(
        params["length_cm"], params["r1"], params["r2"], params["alpha_db_cm"]
    )
    rho = _cavity.round_trip_factor(spec)
    finesse = _cavity.finesse(spec)
    p_out = _cavity.pair_emission_probability(spec)
    doc = {
        "length_cm": spec.length_cm,
        "r1": spec.r1,
        "r2": spec.r2,
        "alpha_db_cm": spec.alpha_db_cm,
        "rho": rho,
        "finesse": finesse,
        "p_out": p_out,
    }
    lines = [f"rho = {rho:.9f}", f"finesse = {finesse:.4f}", f"p_out = {p_out:.6f}"]
    if params["group_index_signal"] is not None and params["group_index_idler"] is not None:
        figures = _cavity.mode_figures(
            spec, params["group_index_signal"], params["group_index_idler"]
        )
        doc.update(
            fsr_signal_ghz=figures.fsr_signal_hz / 1.0e9,
            fsr_idler_ghz=figures.fsr_idler_hz / 1.0e9,
            mode_bandwidth_mhz=figures.mode_bandwidth_hz / 1.0e6,
            coherence_time_ns=figures.coherence_time_s * 1.0e9,
        )
        lines += [
            f"fsr_signal_ghz = {doc['fsr_signal_ghz']:.6f}",
            f"fsr_idler_ghz = {doc['fsr_idler_ghz']:.6f}",
            f"mode_bandwidth_mhz = {doc['mode_bandwidth_mhz']:.6f}",
            f"coherence_time_ns = {doc['coherence_time_ns']:.6f}",
        ]
    artifacts = []
    if "json" in output:
        artifacts.append((output["json"], _json_text(doc).encode()))
    return lines, artifacts


# --------------------------------------------------------------- spectrum --

_SPECTRUM_SPEC = {
    "material": (str, True, None),
    "interaction": (str, True, None),
    "pump_nm": (float, True, None),
    "poling_period_um": (float, True, None),
    "temperature_c": (float, True, None),
    "length_cm": (float, True, None),
    "r1": (float, True, None),
    "r2": (float, True, None),
    "alpha_db_cm": (float, False, 0.0),
    "window_nm": (_window_pair, True, None),
    "points_per_fwhm": (float, False, 8.0),
    "max_points": (int, False, 2_000_000),
    "envelope": (_strict_bool, False, True),
    "detect_threshold": (float, False, 0.02),
    "convolve_fwhm_nm": (float, False, None),
    "threads": (int, False, None),
}


def _build_source(params) -> _spectrum.SourceSpec:
    cav = _cavity.CavitySpec(
        params["length_cm"], params["r1"], params["r2"], params["alpha_db_cm"]
    )
    return _spectrum.SourceSpec(
        material=params["material"],
        interaction=params["interaction"],
        pump_wavelength_nm=params["pump_nm"],
        poling_period_um=params["poling_period_um"],
        temperature_c=params["temperature_c"],
        cavity=cav,
    )


def _run_spectrum(args):
    params, output, cat_path = _gather(
        args, _SPECTRUM_SPEC, ("csv", "clusters_json", "svg", "convolved_csv"), "spectrum"
    )
    catalog = _resolve_catalog(args, cat_path)
    source = _build_source(params)
    policy = _spectrum.SamplingPolicy(params["points_per_fwhm"], params["max_points"])
    n_threads = args.threads or params["threads"] or 1
    spec = _spectrum.compute_spectrum(
        source,
        params["window_nm"],
        policy,
        catalog,
        include_envelope=params["envelope"],
        n_threads=n_threads,
    )
    modes = _spectrum.detect_modes(spec, params["detect_threshold"])
    clusters = _spectrum.group_clusters(modes, source, catalog)
    convolved = None
    if params["convolve_fwhm_nm"] is not None:
        convolved = _spectrum.convolve_resolution(spec, params["convolve_fwhm_nm"])
    lines = [
        f"grid_points = {len(spec)}",
        f"modes = {len(modes)}",
        f"clusters = {len(clusters)}",
    ]
    for i, cluster in enumerate(clusters):
        lines.append(
            f"cluster {i}: center {cluster.center_nm:.4f} nm, "
            f"modes {len(cluster.modes)}, span {cluster.span_nm:.4f} nm"
        )
    artifacts = []
    if "csv" in output:
        artifacts.append((output["csv"], _spectrum.spectrum_csv_text(spec).encode()))
    if "convolved_csv" in output:
        if convolved is None:
            raise ParameterError("spectrum: convolved_csv output needs convolve_fwhm_nm")
        artifacts.append(
            (output["convolved_csv"], _spectrum.spectrum_csv_text(convolved).encode())
        )
    if "clusters_json" in output:
        artifacts.append(
            (output["clusters_json"], _json_text(_spectrum.cluster_report(clusters)).encode())
        )
    if "svg" in output:
        artifacts.append(
            (
                output["svg"],
                _plots.spectrum_svg_bytes(spec, log_scale=args.log_scale, overlay=convolved),
            )
        )
    return lines, artifacts


# ----------------------------------------------------------------- design --

_DESIGN_SPEC = {
    "material": (str, True, None),
    "interaction": (str, True, None),
    "pump_nm": (float, True, None),
    "target_nm": (float, True, None),
    "max_length_cm": (float, True, None),
    "alpha_db_cm": (float, True, None),
    "r1": (float, False, 1.0),
    "detector_jitter_ps": (float, False, 0.0),
    "safety_factor": (float, False, 1.2),
    "operating_temperature_c": (float, False, 80.0),
    "tune_halfwidth_c": (float, False, 5.0),
    "pinned_length_cm": (float, False, None),
    "pinned_r2": (float, False, None),
    "max_bandwidth_mhz": (float, False, None),
    "min_cluster_spacing_nm": (float, False, 5.0),
    "detect_threshold": (float, False, 0.05),
}


def _run_design(args):
    params, output, cat_path = _gather(args, _DESIGN_SPEC, ("json", "svg"), "design")
    catalog = _resolve_catalog(args, cat_path)
    goal = _designer.DesignGoal(
        material=params["material"],
        interaction=params["interaction"],
        pump_wavelength_nm=params["pump_nm"],
        target_signal_wavelength_nm=params["target_nm"],
        max_length_cm=params["max_length_cm"],
        loss_alpha_db_cm=params["alpha_db_cm"],
        r1=params["r1"],
        detector_jitter_s=params["detector_jitter_ps"] * 1.0e-12,
        finesse_safety_factor=params["safety_factor"],
        operating_temperature_c=params["operating_temperature_c"],
        tune_halfwidth_c=params["tune_halfwidth_c"],
        pinned_length_cm=params["pinned_length_cm"],
        pinned_r2=params["pinned_r2"],
        max_mode_bandwidth_hz=(
            params["max_bandwidth_mhz"] * 1.0e6 if params["max_bandwidth_mhz"] else None
        ),
        min_cluster_spacing_nm=params["min_cluster_spacing_nm"],
        detect_threshold=params["detect_threshold"],
    )
    result = _designer.design_cavity(goal, catalog)
    doc = _designer.design_result_json(result)
    lines = [
        f"length_cm = {doc['length_cm']:.6g}",
        f"r2 = {doc['r2']:.9f}",
        f"poling_period_um = {doc['poling_period_um']:.6f}",
        f"temperature_c = {doc['temperature_c']:.4f}",
        f"finesse = {doc['finesse']:.4f}",
        f"m_min_finesse = {doc['m_min_finesse']:.4f}",
        f"mode_count = {doc['mode_count']:.4f}",
        f"mode_bandwidth_mhz = {doc['mode_bandwidth_mhz']:.4f}",
        f"mode_bandwidth_pm = {doc['mode_bandwidth_pm']:.4f}",
        f"cluster_spacing_nm = {doc['cluster_spacing_nm']:.4f}",
        f"p_out = {doc['p_out']:.6f}",
        f"resolvable = {doc['resolvable']}",
        f"clusters = {len(doc['clusters'])}",
    ]
    artifacts = []
    if "json" in output:
        artifacts.append((output["json"], _json_text(doc).encode()))
    if "svg" in output:
        spec = _spectrum.compute_spectrum(
            result.source,
            result.verification_window_nm,
            catalog=catalog,
            n_threads=args.threads or 1,
        )
        artifacts.append((output["svg"], _plots.spectrum_svg_bytes(spec, log_scale=args.log_scale)))
    return lines, artifacts


# ------------------------------------------------------------------ sweep --

_SWEEP_FINESSE_SPEC = {
    "kind": (str, True, None),
    "pump_nm": (float, True, None),
    "material": (str, True, None),
    "interaction": (str, True, None),
    "from_nm": (float, True, None),
    "to_nm": (float, True, None),
    "n_points": (int, False, 200),
    "temperature_c": (float, False, 25.0),
}

_SWEEP_CAVITY_SPEC = {
    "kind": (str, True, None),
    "param": (str, True, None),
    "start": (float, True, None),
    "stop": (float, True, None),
    "n_points": (int, False, 100),
    "length_cm": (float, False, None),
    "r1": (float, False, 1.0),
    "r2": (float, False, None),
    "alpha_db_cm": (float, False, 0.0),
}

_SWEEPABLE = ("length_cm", "r2", "alpha_db_cm")


def _run_sweep(args):
    # peek at the kind first; it selects the parameter schema
    if args.config is not None:
        raw_params, _, _ = _load_config(args.config, "sweep")
        kind = raw_params.get("kind")
    else:
        kind = args.kind
    if kind not in ("finesse_curve", "cavity"):
        raise ParameterError(
            f"sweep: kind must be 'finesse_curve' or 'cavity', got {kind!r}"
        )
    spec = _SWEEP_FINESSE_SPEC if kind == "finesse_curve" else _SWEEP_CAVITY_SPEC
    params, output, cat_path = _gather(args, spec, ("csv", "svg"), "sweep")

    if kind == "finesse_curve":
        catalog = _resolve_catalog(args, cat_path)
        lams, values = _designer.finesse_curve(
            params["pump_nm"],
            params["material"],
            params["interaction"],
            (params["from_nm"], params["to_nm"]),
            params["temperature_c"],
            params["n_points"],
            catalog,
        )
        finite = values[np.isfinite(values)]
        lines = [
            f"points = {len(lams)}",
            f"finite = {len(finite)}",
        ]
        if len(finite):
            lines.append(f"min_f_m1 = {finite.min():.4f}")
        rows = [f"{x:.17g},{y:.17g}" for x, y in zip(lams, values)]
        csv_text = "lambda_s_nm,f_m1\n" + "\n".join(rows) + "\n"
        svg = lambda: _plots.series_svg_bytes(
            [(lams, values, f"{params['material']} {params['interaction']}")],
            xlabel="signal wavelength (nm)",
            ylabel="single-mode finesse bound",
            log_scale=args.log_scale,
        )
    else:
        if params["param"] not in _SWEEPABLE:
            raise ParameterError(f"sweep: param must be one of {_SWEEPABLE}")
        base = {
            "length_cm": params["length_cm"],
            "r1": params["r1"],
            "r2": params["r2"],
            "alpha_db_cm": params["alpha_db_cm"],
        }
        needed = {"length_cm", "r2"} - {params["param"]}
        missing = [k for k in needed if base[k] is None]
        if missing:
            raise ParameterError(f"sweep: missing base value(s) {sorted(missing)}")
        grid = np.linspace(params["start"], params["stop"], params["n_points"])
        finesses = np.full(len(grid), np.nan)
        pouts = np.full(len(grid), np.nan)
        for i, value in enumerate(grid):
            fields = dict(base)
            fields[params["param"]] = float(value)
            try:
                cav = _cavity.CavitySpec(
                    fields["length_cm"], fields["r1"], fields["r2"], fields["alpha_db_cm"]
                )
                finesses[i] = _cavity.finesse(cav)
                pouts[i] = _cavity.pair_emission_probability(cav)
            except (DomainError, ParameterError):
                continue  # emitted as a gap
        finite = finesses[np.isfinite(finesses)]
        lines = [f"points = {len(grid)}", f"finite = {len(finite)}"]
        rows = [f"{x:.17g},{f:.17g},{p:.17g}" for x, f, p in zip(grid, finesses, pouts)]
        csv_text = f"{params['param']},finesse,p_out\n" + "\n".join(rows) + "\n"
        svg = lambda: _plots.series_svg_bytes(
            [(grid, finesses, "finesse")],
            xlabel=params["param"],
            ylabel="finesse",
            log_scale=args.log_scale,
        )

    artifacts = []
    if "csv" in output:
        artifacts.append((output["csv"], csv_text.encode()))
    if "svg" in output:
        artifacts.append((output["svg"], svg()))
    return lines, artifacts


# ----------------------------------------------------------------- parser --


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE", help="JSON config (excludes inline flags)")
    parser.add_argument("--catalog", metavar="FILE", help="material catalog override")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for grids")
    parser.add_argument("--log-scale", action="store_true", help="log intensity axis in plots")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityspdc",
        description="Design and simulation toolkit for doubly resonant "
        "cavity-waveguide SPDC photon-pair sources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="refractive/group index query")
    _add_common(p)
    p.add_argument("--material")
    p.add_argument("--axis", help="e/o (or the material's native axis names)")
    p.add_argument("--wavelength-nm", type=float, dest="wavelength_nm")
    p.add_argument("--temperature-c", type=float, dest="temperature_c")
    p.add_argument("--json-out", dest="out_json", metavar="FILE")
    p.set_defaults(func=_run_dispersion)

    p = sub.add_parser("cavity", help="Fabry-Perot figures for one device")
    _add_common(p)
    p.add_argument("--l-cm", "--length-cm", type=float, dest="length_cm")
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--alpha-db-cm", type=float, dest="alpha_db_cm")
    p.add_argument("--group-index-signal", type=float, dest="group_index_signal")
    p.add_argument("--group-index-idler", type=float, dest="group_index_idler")
    p.add_argument("--json-out", dest="out_json", metavar="FILE")
    p.set_defaults(func=_run_cavity)

    p = sub.add_parser("spectrum", help="sampled joint spectral intensity")
    _add_common(p)
    p.add_argument("--material")
    p.add_argument("--interaction", help="eee (type 0) or eoe (type II)")
    p.add_argument("--pump-nm", type=float, dest="pump_nm")
    p.add_argument("--poling-period-um", type=float, dest="poling_period_um")
    p.add_argument("--temperature-c", type=float, dest="temperature_c")
    p.add_argument("--l-cm", "--length-cm", type=float, dest="length_cm")
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--alpha-db-cm", type=float, dest="alpha_db_cm")
    p.add_argument("--window-nm", type=float, nargs=2, dest="window_nm", metavar=("LO", "HI"))
    p.add_argument("--points-per-fwhm", type=float, dest="points_per_fwhm")
    p.add_argument("--max-points", type=int, dest="max_points")
    p.add_argument(
        "--no-envelope", action="store_const", const=False, dest="envelope",
        help="drop the phase-matching factor (comb structure only)",
    )
    p.add_argument("--detect-threshold", type=float, dest="detect_threshold")
    p.add_argument("--convolve-fwhm-nm", type=float, dest="convolve_fwhm_nm")
    p.add_argument("--csv-out", dest="out_csv", metavar="FILE")
    p.add_argument("--convolved-csv-out", dest="out_convolved_csv", metavar="FILE")
    p.add_argument("--clusters-out", dest="out_clusters_json", metavar="FILE")
    p.add_argument("--svg-out", dest="out_svg", metavar="FILE")
    p.set_defaults(func=_run_spectrum)

    p = sub.add_parser("design", help="solve a single-mode device")
    _add_common(p)
    p.add_argument("--material")
    p.add_argument("--interaction")
    p.add_argument("--pump-nm", type=float, dest="pump_nm")
    p.add_argument("--target-nm", type=float, dest="target_nm")
    p.add_argument("--max-length-cm", type=float, dest="max_length_cm")
    p.add_argument("--alpha-db-cm", type=float, dest="alpha_db_cm")
    p.add_argument("--r1", type=float)
    p.add_argument("--detector-jitter-ps", type=float, dest="detector_jitter_ps")
    p.add_argument("--safety-factor", type=float, dest="safety_factor")
    p.add_argument("--operating-temperature-c", type=float, dest="operating_temperature_c")
    p.add_argument("--tune-halfwidth-c", type=float, dest="tune_halfwidth_c")
    p.add_argument("--pinned-length-cm", type=float, dest="pinned_length_cm")
    p.add_argument("--pinned-r2", type=float, dest="pinned_r2")
    p.add_argument("--max-bandwidth-mhz", type=float, dest="max_bandwidth_mhz")
    p.add_argument("--min-cluster-spacing-nm", type=float, dest="min_cluster_spacing_nm")
    p.add_argument("--detect-threshold", type=float, dest="detect_threshold")
    p.add_argument("--json-out", dest="out_json", metavar="FILE")
    p.add_argument("--svg-out", dest="out_svg", metavar="FILE")
    p.set_defaults(func=_run_design)

    p = sub.add_parser("sweep", help="parameter sweeps with CSV/SVG export")
    _add_common(p)
    p.add_argument("--kind", choices=["finesse_curve", "cavity"])
    # finesse_curve
    p.add_argument("--pump-nm", type=float, dest="pump_nm")
    p.add_argument("--material")
    p.add_argument("--interaction")
    p.add_argument("--from-nm", type=float, dest="from_nm")
    p.add_argument("--to-nm", type=float, dest="to_nm")
    p.add_argument("--temperature-c", type=float, dest="temperature_c")
    # cavity
    p.add_argument("--param", choices=list(_SWEEPABLE))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--l-cm", "--length-cm", type=float, dest="length_cm")
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--alpha-db-cm", type=float, dest="alpha_db_cm")
    # shared
    p.add_argument("--n-points", type=int, dest="n_points")
    p.add_argument("--csv-out", dest="out_csv", metavar="FILE")
    p.add_argument("--svg-out", dest="out_svg", metavar="FILE")
    p.set_defaults(func=_run_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lines, artifacts = args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    try:
        for path, data in artifacts:
            _atomic_write_bytes(path, data)
            print(f"wrote {path}")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
