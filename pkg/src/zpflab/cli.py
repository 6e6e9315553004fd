"""Command-line entry point: subcommands, unit selection, run manifests.

Results go to standard output; a JSON run manifest (full post-default
parameter set, seed, unit system, constants snapshot, wall-clock
duration) goes to standard error or to ``--manifest PATH``.  Reissuing
the argv reconstructed from a manifest reproduces the stdout bytes
exactly, for any value of ZPFLAB_THREADS.

Exit codes: 0 success, 1 domain/validation error, 2 internal invariant
or convergence failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    InvariantError,
)
from .units import (
    ERG_PER_EV,
    LENGTH,
    Quantity,
    SNAPSHOT,
    compton_time,
    constants_for,
    particle_mass,
)
from . import casimir as casimir_mod
from . import coil as coil_mod
from . import field as field_mod
from . import lamb as lamb_mod
from . import oscillator as osc_mod

_VALIDATION_ERRORS = (DomainError, ConfigurationError)
_INTERNAL_ERRORS = (InvariantError, ConvergenceError)


def _fmt(value) -> str:
    """Full round-trip rendering: 17 significant digits for floats."""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _threads() -> int:
    raw = os.environ.get("ZPFLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"ZPFLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigurationError(f"ZPFLAB_THREADS must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    parameters: dict
    units: str
    seed: int | None
    version: str
    constants_snapshot: str
    duration_seconds: float


def argv_from_manifest(manifest: dict | RunManifest) -> list[str]:
    """Reconstruct the command line that reproduces a manifest's run."""
    if isinstance(manifest, RunManifest):
        manifest = asdict(manifest)
    argv = manifest["subcommand"].split()
    params = manifest["parameters"]
    for key, value in params.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, (list, tuple)):
            argv.extend([flag, ",".join(_fmt(v) for v in value)])
        else:
            argv.extend([flag, _fmt(value)])
    return argv


def _csv_lines(rows) -> list[str]:
    return [",".join(_fmt(cell) for cell in row) for row in rows]


def _emit(text: str, stream) -> None:
    stream.write(text)
    if not text.endswith("\n"):
        stream.write("\n")


def _parse_scales(raw: str) -> list[float]:
    try:
        scales = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"could not parse scales list {raw!r}") from exc
    if not scales:
        raise DomainError("scales list is empty")
    return scales


def _parse_epsilons(raw: str) -> tuple[float, ...]:
    try:
        eps = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise DomainError(f"could not parse epsilon list {raw!r}") from exc
    return eps


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors raise instead of exiting(2)."""

    def error(self, message):
        raise _UsageError(message, self)


class _UsageError(Exception):
    def __init__(self, message, parser):
        super().__init__(message)
        self.parser = parser


def build_parser() -> _Parser:
    parser = _Parser(prog="zpflab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="Print the pinned constants table.")
    p.add_argument("--system", choices=["gaussian", "si", "natural"], default="gaussian")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--manifest", metavar="PATH", default=None)

    p = sub.add_parser("oscillator", help="Ground-state width, variance and sample moments.")
    p.add_argument("--m", type=float, required=True, help="Oscillator mass.")
    p.add_argument("--omega", type=float, required=True, help="Angular frequency.")
    p.add_argument("--samples", type=int, default=None, help="Optional Monte Carlo draw count.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--units", choices=["gaussian", "si", "natural"], default="gaussian")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--manifest", metavar="PATH", default=None)

    p = sub.add_parser("field", help="Spectral field simulation.")
    fs = p.add_subparsers(dest="field_command", required=True, parser_class=_Parser)
    p = fs.add_parser("scaling-run", help="Measure the coarse-grained RMS scaling exponent.")
    p.add_argument("--grid", type=int, default=64, help="Lattice points per axis (even, >= 8).")
    p.add_argument("--box", type=float, default=1.0, help="Periodic box size.")
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scales", default=None, help="Comma list; default box/16,box/8,box/4,box/2.")
    p.add_argument("--kappa", type=float, default=1.0, help="Spectrum normalization.")
    p.add_argument("--k-max", type=float, default=None, help="Wavenumber cutoff; default Nyquist.")
    p.add_argument("--window", choices=list(field_mod.WINDOWS), default="hann")
    p.add_argument("--format", choices=["csv", "json"], default=None,
                   help="csv: table only; json: summary only; default: both.")
    p.add_argument("--manifest", metavar="PATH", default=None)

    p = sub.add_parser("casimir", help="Closed-form Casimir force, optionally the mode sum.")
    p.add_argument("--area", type=float, required=True)
    p.add_argument("--sep", type=float, required=True)
    p.add_argument("--units", choices=["gaussian", "si", "natural"], default="gaussian")
    p.add_argument("--modesum", action="store_true")
    p.add_argument("--epsilons", default="0.4,0.2,0.1,0.05")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--manifest", metavar="PATH", default=None)

    p = sub.add_parser("lamb", help="Hydrogen level shift from positional jitter.")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--jitter", type=float, default=None, help="Jitter variance in cm^2.")
    p.add_argument("--omega-min", type=float, default=None)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--manifest", metavar="PATH", default=None)

    p = sub.add_parser("coil", help="Tap-current estimates for a coil in the field.")
    p.add_argument("--turns", type=int, required=True)
    p.add_argument("--area", type=float, required=True)
    p.add_argument("--resistance", type=float, required=True)
    p.add_argument("--scale", type=float, required=True, help="Fluctuation extent l.")
    p.add_argument("--particle", choices=["electron", "proton"], default="electron")
    p.add_argument("--units", choices=["gaussian", "natural"], default="gaussian")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--manifest", metavar="PATH", default=None)

    return parser


def _json_dump(payload) -> str:
    return json.dumps(payload, sort_keys=True)


def _render_keyed(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        _emit(_json_dump(payload), out)
    else:
        rows = [("name", "value")] + [(k, v) for k, v in payload.items()]
        _emit("\n".join(_csv_lines(rows)), out)


def _cmd_constants(args, out) -> dict:
    table = constants_for(args.system)
    rows = list(table.rows())
    if args.format == "json":
        _emit(_json_dump([{"name": n, "value": v, "unit": u} for n, v, u in rows]), out)
    else:
        lines = [("name", "value", "unit")] + rows
        _emit("\n".join(_csv_lines(lines)), out)
    return {"system": args.system, "format": args.format}


def _cmd_oscillator(args, out) -> dict:
    table = constants_for(args.units)
    params = osc_mod.OscillatorParams(m=args.m, omega=args.omega, hbar=table.hbar.value)
    payload = {
        "width": osc_mod.fluctuation_width(params),
        "variance": osc_mod.position_variance(params),
    }
    if args.samples is not None:
        draws = osc_mod.sample_positions(params, seed=args.seed, n=args.samples)
        payload["sample_count"] = int(args.samples)
        payload["sample_mean"] = float(draws.mean())
        payload["sample_variance"] = float(draws.var(ddof=1))
    _render_keyed(payload, args.format, out)
    return {
        "m": args.m,
        "omega": args.omega,
        "samples": args.samples,
        "seed": args.seed,
        "units": args.units,
        "format": args.format,
    }


def _cmd_field_scaling(args, out) -> dict:
    if args.scales is None:
        scales = [args.box / 16, args.box / 8, args.box / 4, args.box / 2]
    else:
        scales = _parse_scales(args.scales)
    spec = field_mod.LatticeSpec(
        box_size=args.box,
        points_per_axis=args.grid,
        k_max=args.k_max if args.k_max is not None else math.pi * args.grid / args.box,
        spectrum_normalization=args.kappa,
    )
    report, fit = field_mod.scaling_run(
        spec, scales, draws=args.draws, seed=args.seed, window=args.window,
        threads=_threads(),
    )
    csv_rows = [("scale", "rms", "stderr")] + [
        (report.scales[i], report.rms[i], report.stderr(i)) for i in range(len(report.scales))
    ]
    summary = {
        "exponent": fit.exponent if fit else None,
        "stderr_exponent": fit.stderr_exponent if fit else None,
        "r_squared": fit.r_squared if fit else None,
        "amplitude": fit.amplitude if fit else None,
        "kappa": args.kappa,
        "seed": args.seed,
        "draws": args.draws,
        "grid": args.grid,
        "box": args.box,
        "window": args.window,
        "fit_skipped_reason": None if fit else "fewer than 3 scales",
    }
    if args.format != "json":
        _emit("\n".join(_csv_lines(csv_rows)), out)
    if args.format != "csv":
        _emit(_json_dump(summary), out)
    return {
        "grid": args.grid,
        "box": args.box,
        "draws": args.draws,
        "seed": args.seed,
        "scales": list(report.scales),
        "kappa": args.kappa,
        "k_max": spec.k_max,
        "window": args.window,
        "format": args.format,
    }


def _cmd_casimir(args, out) -> dict:
    table = constants_for(args.units)
    payload = {
        "force_closed": casimir_mod.casimir_force_closed(args.area, args.sep, table).value,
        "area": args.area,
        "separation": args.sep,
        "units": args.units,
    }
    if args.modesum:
        config = casimir_mod.CasimirConfig(
            plate_area=args.area,
            separation=args.sep,
            regulator_epsilons=_parse_epsilons(args.epsilons),
            extrapolation_order=args.order,
        )
        result = casimir_mod.casimir_energy_modesum(config, table)
        payload.update(
            {
                "energy_coefficient": result.energy_coefficient,
                "energy_coefficient_expected": casimir_mod.ENERGY_COEFFICIENT_EXACT,
                "zeta_check": result.zeta_check,
                "diagnostics": {
                    "epsilons": list(result.diagnostics.epsilons),
                    "regulated_values": list(result.diagnostics.regulated_values),
                    "extrapolants": list(result.diagnostics.extrapolants),
                    "residuals": list(result.diagnostics.residuals),
                },
            }
        )
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, dict)}
        _render_keyed(flat, "csv", out)
    else:
        _emit(_json_dump(payload), out)
    return {
        "area": args.area,
        "sep": args.sep,
        "units": args.units,
        "modesum": args.modesum,
        "epsilons": list(_parse_epsilons(args.epsilons)),
        "order": args.order,
        "format": args.format,
    }


def _cmd_lamb(args, out) -> dict:
    table = constants_for("gaussian")
    if args.jitter is not None:
        if args.omega_min is not None or args.omega_max is not None:
            raise DomainError("give either --jitter or the cutoff pair, not both")
        jitter = lamb_mod.JitterVariance(value=args.jitter)
    else:
        omega_min, omega_max = lamb_mod.default_cutoffs(table)
        if args.omega_min is not None:
            omega_min = args.omega_min
        if args.omega_max is not None:
            omega_max = args.omega_max
        jitter = lamb_mod.welton_jitter(omega_min, omega_max, table)
    state = lamb_mod.HydrogenState(n=args.n, ell=args.ell)
    shift = lamb_mod.hydrogen_s_shift(state, jitter, table)
    freq = lamb_mod.shift_to_frequency(shift, table)
    rows = [
        ("quantity", "value", "unit"),
        ("delta_e", shift.value, "erg"),
        ("delta_e", shift.value / ERG_PER_EV, "eV"),
        ("shift_frequency", freq.value / 1e6, "MHz"),
        ("jitter", jitter.value, "cm^2"),
        ("jitter_provenance", jitter.provenance(), ""),
    ]
    if args.format == "json":
        _emit(
            _json_dump(
                {
                    "delta_e_erg": shift.value,
                    "delta_e_ev": shift.value / ERG_PER_EV,
                    "shift_frequency_mhz": freq.value / 1e6,
                    "jitter_cm2": jitter.value,
                    "jitter_provenance": jitter.provenance(),
                }
            ),
            out,
        )
    else:
        _emit("\n".join(_csv_lines(rows)), out)
    return {
        "n": args.n,
        "ell": args.ell,
        "jitter": args.jitter,
        "omega_min": jitter.omega_min,
        "omega_max": jitter.omega_max,
        "format": args.format,
    }


def _cmd_coil(args, out) -> dict:
    table = constants_for(args.units)
    spec = coil_mod.CoilSpec(turns=args.turns, area=args.area, resistance=args.resistance)
    scale = Quantity(args.scale, LENGTH, args.units)
    tau = compton_time(particle_mass(args.particle, args.units))
    estimate = coil_mod.zpf_tap_estimate(spec, scale, tau, table)
    payload = {
        "current_via_charge": estimate.current_via_charge.value,
        "current_exact": estimate.current_exact.value,
        "ratio_exact_over_charge": estimate.ratio,
        "inputs": {
            "turns": args.turns,
            "area": args.area,
            "resistance": args.resistance,
            "scale": args.scale,
            "tau": tau.value,
            "particle": args.particle,
            "units": args.units,
        },
    }
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, dict)}
        flat.update({f"input_{k}": v for k, v in payload["inputs"].items()})
        _render_keyed(flat, "csv", out)
    else:
        _emit(_json_dump(payload), out)
    return {
        "turns": args.turns,
        "area": args.area,
        "resistance": args.resistance,
        "scale": args.scale,
        "particle": args.particle,
        "units": args.units,
        "format": args.format,
    }


def dispatch(argv, stdout=None, stderr=None) -> int:
    """Parse argv, run the subcommand, emit results and the run manifest."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(err)
        _emit(f"error: {exc}", err)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (0, None) else 1

    handlers = {
        "constants": (_cmd_constants, "constants", lambda a: a.system),
        "oscillator": (_cmd_oscillator, "oscillator", lambda a: a.units),
        "field": (_cmd_field_scaling, "field scaling-run", lambda a: "natural"),
        "casimir": (_cmd_casimir, "casimir", lambda a: a.units),
        "lamb": (_cmd_lamb, "lamb", lambda a: "gaussian"),
        "coil": (_cmd_coil, "coil", lambda a: a.units),
    }
    handler, name, units_of = handlers[args.subcommand]
    start = time.perf_counter()
    try:
        parameters = handler(args, out)
    except _VALIDATION_ERRORS as exc:
        _emit(f"error: {exc}", err)
        return 1
    except _INTERNAL_ERRORS as exc:
        _emit(f"internal error: {exc}", err)
        return 2
    duration = time.perf_counter() - start

    manifest = RunManifest(
        subcommand=name,
        parameters=parameters,
        units=units_of(args),
        seed=parameters.get("seed"),
        version=__version__,
        constants_snapshot=SNAPSHOT,
        duration_seconds=duration,
    )
    manifest_json = json.dumps(asdict(manifest), sort_keys=True)
    if getattr(args, "manifest", None):
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(manifest_json + "\n")
    else:
        _emit(manifest_json, err)
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
