"""Batch front-end: validated JSON run configs in, CSV artifacts out.

Every run writes its CSV outputs plus a manifest.json recording the config,
tool version, timestamps, and a sha256 checksum per output file. Identical
config and seed reproduce byte-identical CSV payloads; timestamps live only
in the manifest. Floats are written with 17 significant digits so the CSVs
round-trip exactly.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import datetime
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

import ringbdg
from ringbdg.double_well import DWellParams, solve_stationary, sweep_g
from ringbdg.ring_dynamics import RingGrid, evolve, prepare_uniform, seed_noise
from ringbdg.ring_model import Parity, RingParams
from ringbdg.spectra import stability_report

COMMANDS = ("spectrum", "stability-map", "evolve", "dwell-solve", "dwell-sweep")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# config schema

def _number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)

def _integer(key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value

def _parity(key, value):
    try:
        return Parity(value)
    except ValueError:
        raise ConfigError(
            f"{key}: expected 'symmetric' or 'antisymmetric', got {value!r}"
        ) from None

def _sign(key, value):
    v = _integer(key, value)
    if v not in (-1, 1):
        raise ConfigError(f"{key}: must be -1 or +1")
    return v

def _positive(key, value):
    v = _number(key, value)
    if not v > 0:
        raise ConfigError(f"{key}: must be positive")
    return v

def _non_negative(key, value):
    v = _number(key, value)
    if v < 0:
        raise ConfigError(f"{key}: must be non-negative")
    return v

def _positive_int(key, value):
    v = _integer(key, value)
    if v < 1:
        raise ConfigError(f"{key}: must be at least 1")
    return v

def _number_list(key, value):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of numbers")
    return [_number(key, item) for item in value]

def _ascending_list(key, value):
    items = _number_list(key, value)
    if any(b < a for a, b in zip(items, items[1:])):
        raise ConfigError(f"{key}: values must be sorted ascending")
    return items

def _int_list(key, value):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of integers")
    return [_integer(key, item) for item in value]

def _scalar_or_list(convert):
    def inner(key, value):
        if isinstance(value, list):
            if not value:
                raise ConfigError(f"{key}: list must not be empty")
            return [convert(key, item) for item in value]
        return [convert(key, value)]
    return inner


@dataclass(frozen=True)
class _Field:
    convert: object
    required: bool = False
    default: object = None


_GRID_DEFAULTS = {
    "eps_min": _Field(_number, default=0.0),
    "eps_max": _Field(_number, default=10.0),
    "eps_points": _Field(_positive_int, default=100),
    "kappa_min": _Field(_non_negative, default=0.0),
    "kappa_max": _Field(_non_negative, default=10.0),
    "kappa_points": _Field(_positive_int, default=100),
}

_SCHEMAS: dict[str, dict[str, _Field]] = {
    "spectrum": {
        "eps": _Field(_number, required=True),
        "kappa_mag": _Field(_non_negative, required=True),
        "kappa_sign": _Field(_sign, default=-1),
        "parity": _Field(_parity, required=True),
        "m_max": _Field(_positive_int, default=6),
    },
    "stability-map": {
        **_GRID_DEFAULTS,
        "kappa_sign": _Field(_sign, default=-1),
        "parity": _Field(_parity, required=True),
        "m_max": _Field(_positive_int, default=6),
    },
    "evolve": {
        "eps": _Field(_number, required=True),
        "kappa_mag": _Field(_non_negative, required=True),
        "kappa_sign": _Field(_sign, default=-1),
        "parity": _Field(_parity, required=True),
        "n_points": _Field(_positive_int, default=128),
        "dt": _Field(_positive, default=1e-4),
        "n_steps": _Field(_positive_int, required=True),
        "record_every": _Field(_positive_int, default=100),
        "noise_amplitude": _Field(_non_negative, default=1e-4),
        "modes_to_track": _Field(_int_list, default=[1, 2, 3]),
        "seed": _Field(_integer, default=0),
    },
    "dwell-solve": {
        "xi0": _Field(_positive, required=True),
        "h": _Field(_positive, required=True),
        "g_tilde": _Field(_scalar_or_list(_number), default=[0.0]),
        "parity": _Field(_scalar_or_list(_parity), default=[Parity.SYMMETRIC]),
        "half_length": _Field(_positive),
        "n_grid": _Field(_positive_int, default=1201),
        "max_iterations": _Field(_positive_int, default=500_000),
    },
    "dwell-sweep": {
        "xi0": _Field(_positive, required=True),
        "h": _Field(_scalar_or_list(_positive), required=True),
        "g_values": _Field(_ascending_list, required=True),
        "half_length": _Field(_positive),
        "n_grid": _Field(_positive_int, default=1201),
        "max_iterations": _Field(_positive_int, default=500_000),
    },
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict
    out_dir: str = "ringbdg_out"
    seed: int | None = None
    raw: dict = field(default_factory=dict)


def parse_config(text: str) -> RunConfig:
    """Validate a JSON run configuration, filling documented defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "command" not in raw:
        raise ConfigError("command: missing required key")
    command = raw["command"]
    if command not in COMMANDS:
        raise ConfigError(
            f"command: unknown command {command!r}; expected one of {', '.join(COMMANDS)}"
        )
    schema = _SCHEMAS[command]
    options = {}
    for key, value in raw.items():
        if key in ("command", "out_dir", "seed"):
            continue
        if key not in schema:
            raise ConfigError(f"{key}: unknown key for command {command!r}")
        options[key] = schema[key].convert(key, value)
    for key, spec in schema.items():
        if key in options:
            continue
        if spec.required:
            raise ConfigError(f"{key}: missing required key for command {command!r}")
        if spec.default is not None:
            options[key] = list(spec.default) if isinstance(spec.default, list) else spec.default
    out_dir = raw.get("out_dir", "ringbdg_out")
    if not isinstance(out_dir, str):
        raise ConfigError("out_dir: expected a string path")
    seed = raw.get("seed")
    if seed is not None:
        seed = _integer("seed", seed)
    if command == "evolve":
        seed = options["seed"] if seed is None else seed
        options["seed"] = seed
    return RunConfig(command=command, options=options, out_dir=out_dir, seed=seed, raw=raw)


# ---------------------------------------------------------------------------
# embedded presets

PRESETS: dict[str, dict] = {
    "fig1": {
        "command": "dwell-sweep",
        "xi0": 5.0,
        "h": [0.002, 0.02, 0.05],
        "g_values": [0, 30, 60, 90, 120, 150, 180, 210, 240, 270, 300],
        "half_length": 20.0,
        "n_grid": 2001,
    },
    "fig2": {
        "command": "dwell-solve",
        "xi0": 5.0,
        "h": 0.05,
        "g_tilde": [30, 300],
        "parity": ["symmetric", "antisymmetric"],
        "half_length": 12.0,
        "n_grid": 1201,
    },
    "paper-instability": {
        "command": "evolve",
        "eps": 2.0,
        "kappa_mag": 1.5,
        "kappa_sign": -1,
        "parity": "antisymmetric",
        "n_points": 128,
        "dt": 1e-4,
        "n_steps": 80_000,
        "record_every": 100,
        "noise_amplitude": 1e-4,
        "modes_to_track": [1, 2, 3],
        "seed": 1,
    },
}


# ---------------------------------------------------------------------------
# manifest and writers

@dataclass
class RunManifest:
    command: str
    config: dict
    tool_version: str
    started_at: str
    finished_at: str = ""
    outputs: dict[str, str] = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)
    status: str = "ok"

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _checksum(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _max_workers() -> int:
    value = os.environ.get("RINGBDG_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError("RINGBDG_THREADS: expected a positive integer") from None
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# command implementations; each returns a list of written file names

def _run_spectrum(config: RunConfig, out_dir: str) -> list[str]:
    opts = config.options
    params = RingParams.from_epsilon(opts["eps"], opts["kappa_mag"], opts["kappa_sign"])
    report = stability_report(params, opts["parity"], opts["m_max"])
    unstable = dict(report.unstable_modes)
    rows = [
        [
            mode.m,
            _fmt(mode.omega1.real), _fmt(mode.omega1.imag),
            _fmt(mode.omega2.real), _fmt(mode.omega2.imag),
            "true" if mode.m in unstable else "false",
        ]
        for mode in report.modes
    ]
    path = os.path.join(out_dir, "spectrum.csv")
    _write_csv(path, ["m", "re_omega1", "im_omega1", "re_omega2", "im_omega2", "unstable"], rows)
    return ["spectrum.csv"]


def _run_stability_map(config: RunConfig, out_dir: str) -> list[str]:
    opts = config.options
    eps_values = np.linspace(opts["eps_min"], opts["eps_max"], opts["eps_points"])
    kappa_values = np.linspace(opts["kappa_min"], opts["kappa_max"], opts["kappa_points"])
    parity, sign, m_max = opts["parity"], opts["kappa_sign"], opts["m_max"]

    def one_row(eps: float):
        cells = []
        for kap in kappa_values:
            report = stability_report(RingParams.from_epsilon(eps, kap, sign), parity, m_max)
            m_star, rate = report.max_growth
            cells.append([_fmt(eps), _fmt(kap), _fmt(rate), m_star])
        return cells

    with concurrent.futures.ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        blocks = list(pool.map(one_row, eps_values))
    rows = [cell for block in blocks for cell in block]
    path = os.path.join(out_dir, "stability_map.csv")
    _write_csv(path, ["eps", "kappa_mag", "max_growth", "m_star"], rows)
    return ["stability_map.csv"]


def _run_evolve(config: RunConfig, out_dir: str) -> list[str]:
    opts = config.options
    params = RingParams.from_epsilon(opts["eps"], opts["kappa_mag"], opts["kappa_sign"])
    fields = prepare_uniform(params, opts["parity"], RingGrid(opts["n_points"]))
    if opts["noise_amplitude"] > 0:
        fields = seed_noise(fields, opts["noise_amplitude"], opts["seed"])
    record = evolve(
        fields,
        opts["dt"],
        opts["n_steps"],
        params,
        record_every=opts["record_every"],
        modes_to_track=tuple(opts["modes_to_track"]),
    )
    header = ["tau", "norm_u", "norm_d", "energy", "L_u", "L_d"]
    for m in record.tracked_modes:
        header += [f"abs_alpha_{m}_u", f"abs_alpha_{m}_d"]
    rows = []
    for i in range(len(record.times)):
        row = [
            _fmt(record.times[i]), _fmt(record.norm_u[i]), _fmt(record.norm_d[i]),
            _fmt(record.energy[i]), _fmt(record.l_u[i]), _fmt(record.l_d[i]),
        ]
        for m in record.tracked_modes:
            row += [_fmt(record.mode_abs_u[m][i]), _fmt(record.mode_abs_d[m][i])]
        rows.append(row)
    path = os.path.join(out_dir, "evolve.csv")
    _write_csv(path, header, rows)
    return ["evolve.csv"]


def _run_dwell_solve(config: RunConfig, out_dir: str) -> list[str]:
    opts = config.options
    combos = [(g, p) for g in opts["g_tilde"] for p in opts["parity"]]
    written = []
    for g, parity in combos:
        params = DWellParams(
            xi0=opts["xi0"], h=opts["h"], g_tilde=g,
            half_length=opts.get("half_length"), n_grid=opts["n_grid"],
        )
        solution = solve_stationary(params, parity, max_iterations=opts["max_iterations"])
        tag = f"g{g:g}_{parity.value}" if len(combos) > 1 else ""
        base = f"dwell_solve_{tag}" if tag else "dwell_solve"
        csv_name, json_name = f"{base}.csv", f"{base}.json"
        _write_csv(
            os.path.join(out_dir, csv_name),
            ["xi", "phi"],
            ([_fmt(x), _fmt(p)] for x, p in zip(solution.xi, solution.phi)),
        )
        scalars = {
            "parity": parity.value,
            "g_tilde": g,
            "mu": solution.mu,
            "energy": solution.energy,
            "residual": solution.residual,
            "iterations": solution.iterations,
            "converged": solution.converged,
            "half_length": solution.params.half_length,
            "n_grid": solution.params.n_grid,
        }
        with open(os.path.join(out_dir, json_name), "w") as handle:
            json.dump(scalars, handle, indent=2, sort_keys=True)
        written += [csv_name, json_name]
    return written


def _run_dwell_sweep(config: RunConfig, out_dir: str) -> list[str]:
    opts = config.options
    h_values = opts["h"]

    def one_curve(h: float):
        params = DWellParams(
            xi0=opts["xi0"], h=h, g_tilde=0.0,
            half_length=opts.get("half_length"), n_grid=opts["n_grid"],
        )
        return sweep_g(params, opts["g_values"], max_iterations=opts["max_iterations"])

    with concurrent.futures.ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        curves = list(pool.map(one_curve, h_values))

    written = []
    failures = []
    for h, curve in zip(h_values, curves):
        name = f"dwell_sweep_h{h:g}.csv" if len(h_values) > 1 else "dwell_sweep.csv"
        rows = [
            [
                _fmt(row.g_tilde), _fmt(row.e_sym), _fmt(row.e_anti), _fmt(row.delta_e),
                _fmt(row.mu_sym), _fmt(row.mu_anti), _fmt(row.delta_mu),
            ]
            for row in curve.rows
        ]
        _write_csv(
            os.path.join(out_dir, name),
            ["g_tilde", "E_S", "E_A", "delta_E", "mu_S", "mu_A", "delta_mu"],
            rows,
        )
        written.append(name)
        for row in curve.rows:
            if not row.converged:
                failures.append(f"h={h:g}, g_tilde={row.g_tilde:g}: {row.error}")
    if failures:
        raise RuntimeError("; ".join(failures))
    return written


_RUNNERS = {
    "spectrum": _run_spectrum,
    "stability-map": _run_stability_map,
    "evolve": _run_evolve,
    "dwell-solve": _run_dwell_solve,
    "dwell-sweep": _run_dwell_sweep,
}


def run(config: RunConfig) -> RunManifest:
    """Execute a validated config, write its outputs, then the manifest."""
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    manifest = RunManifest(
        command=config.command,
        config={**config.raw, "command": config.command},
        tool_version=ringbdg.__version__,
        started_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    try:
        written = _RUNNERS[config.command](config, out_dir)
        for name in written:
            manifest.outputs[name] = _checksum(os.path.join(out_dir, name))
    except Exception as exc:  # recorded for the manifest, reflected in exit status
        manifest.status = "error"
        manifest.errors.append({"type": type(exc).__name__, "message": str(exc)})
    manifest.finished_at = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(os.path.join(out_dir, "manifest.json"), "w") as handle:
        handle.write(manifest.to_json())
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ringbdg",
        description="Coupled-ring condensate spectra, dynamics, and double-well splitting runs.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to a JSON run configuration")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="embedded configuration")
    parser.add_argument("--out", help="output directory (default: ringbdg_out)")
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    args = parser.parse_args(argv)

    if bool(args.config) == bool(args.preset):
        parser.error("provide exactly one of --config or --preset")
    try:
        if args.preset:
            raw = dict(PRESETS[args.preset])
            if raw["command"] != args.command:
                parser.error(
                    f"preset {args.preset!r} belongs to command {raw['command']!r}"
                )
            text = json.dumps(raw)
        else:
            with open(args.config) as handle:
                text = handle.read()
        config = parse_config(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if config.command != args.command:
        print(
            f"config error: command: config says {config.command!r}, "
            f"command line says {args.command!r}",
            file=sys.stderr,
        )
        return 1
    updates = {}
    if args.out:
        updates["out_dir"] = args.out
    if args.seed is not None:
        updates["seed"] = args.seed
        if config.command == "evolve":
            updates["options"] = {**config.options, "seed": args.seed}
    if updates:
        config = dataclasses.replace(config, **updates)

    manifest = run(config)
    for name, digest in sorted(manifest.outputs.items()):
        print(f"wrote {os.path.join(config.out_dir, name)}  sha256={digest[:12]}...")
    if manifest.status != "ok":
        for error in manifest.errors:
            print(f"error [{error['type']}]: {error['message']}", file=sys.stderr)
        return 1
    print(f"manifest: {os.path.join(config.out_dir, 'manifest.json')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
