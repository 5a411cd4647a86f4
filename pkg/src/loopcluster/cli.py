"""Command-line front end: one subcommand per analysis, CSV/JSON table output.

Output tables are plot-ready; nothing here depends on a plotting package. A
table can be rendered with e.g.
``python3 -c "import pandas, sys; pandas.read_csv(sys.argv[1]).plot(x=0)"``.

Exit codes: 0 success, 1 runtime failure, 2 usage error. The default output
directory is taken from LOOPCLUSTER_OUTDIR (falling back to the working
directory); pass ``--output -`` to write the table to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, entlen, montecarlo, scaling
from .protocol import NoiseModel
from .qcore import CapacityError, PauliString


def _fmt(value):
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".12g")
    return str(value)


def emit_table(records, fmt, path, meta=None):
    """Write records as CSV (fixed column order) or a JSON envelope.

    Floats are serialized with 12 significant digits; an empty record list is
    refused so silent empty artifacts cannot pass for results.
    """
    if not records:
        raise ValueError("refusing to emit an empty table")
    columns = list(records[0].keys())
    for row in records:
        if list(row.keys()) != columns:
            raise ValueError("all records must share one column order")
    if fmt == "csv":
        lines = []
        if meta:
            for key in meta:
                lines.append(f"# {key}={_fmt(meta[key])}")
        lines.append(",".join(columns))
        for row in records:
            lines.append(",".join(_fmt(row[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        def clean(v):
            if isinstance(v, float):
                return float(_fmt(v)) if not math.isnan(v) else None
            return v

        doc = {
            "schema": 1,
            "meta": {k: clean(v) for k, v in (meta or {}).items()},
            "rows": [{k: clean(v) for k, v in row.items()} for row in records],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc}") from exc


def _resolve_output(args):
    if args.output == "-":
        return "-"
    path = args.output or f"{args.subcommand.replace('-', '_')}.{args.format}"
    if os.path.isabs(path):
        return path
    return os.path.join(os.environ.get("LOOPCLUSTER_OUTDIR", "."), path)


def _noise_from_args(args) -> NoiseModel:
    delta = getattr(args, "delta", 0.0)
    m = getattr(args, "M", 1.0)
    g2 = getattr(args, "g2", 0.0)
    if delta > 0.0 and m < 1.0:
        raise ValueError("choose either M < 1 (distinguishing) or delta > 0 (depolarizing)")
    if delta > 0.0:
        return NoiseModel.depolarizing(delta)
    if m < 1.0 or g2 > 0.0:
        return NoiseModel.distinguishing(m, g2=g2)
    return NoiseModel.ideal()


def _budget_from_args(args) -> scaling.EfficiencyBudget:
    budget = scaling.PRESETS[args.preset]
    overrides = {
        name: getattr(args, name)
        for name in ("R", "eta_d", "eta_s", "eta_l", "eta_b", "eta_g")
        if getattr(args, name, None) is not None
    }
    if overrides:
        from dataclasses import replace

        budget = replace(budget, **overrides)
    return budget


def _cmd_phase_scan(args):
    phis = np.linspace(args.phi_min, args.phi_max, args.points)
    cfg = analysis.PhaseScan(tuple(phis), args.photons, _noise_from_args(args), args.observable)
    rows = analysis.phase_scan(cfg)
    meta = {"photons": args.photons, "observable": args.observable, "M": args.M, "delta": args.delta}
    emit_table(rows, args.format, _resolve_output(args), meta)
    return 0


def _cmd_entlen(args):
    sweep = entlen.ChainSweep(args.v2, args.noise, n_max=args.n_max)
    result = entlen.entanglement_length(sweep)
    rows = [{"n": n, "concurrence": c} for n, c in result.concurrence_by_n]
    meta = {"v2": args.v2, "noise": args.noise, "length": result.length, "cap_limited": result.cap_limited}
    emit_table(rows, args.format, _resolve_output(args), meta)
    print(f"L={result.length}")
    return 0


def _cmd_scaling(args):
    budget = _budget_from_args(args)
    if args.compare_sources:
        grid = np.linspace(args.v2_min, args.v2_max, args.v2_points)
        out = scaling.source_comparison_curves(grid, budgets={args.preset: budget})
        rows = [
            {"v2": v2, "r_pdc_with_gate": r, "gate_floor": floor}
            for v2, r, floor in out["curve"]
        ]
        point = out["points"][0]
        meta = {
            "preset": args.preset,
            "r": point["r"],
            "r_eta_d_09": point["r_eta_d_09"],
        }
    else:
        rows = [
            {"n": n, "rate_hz": scaling.detection_rate(budget, n)}
            for n in range(1, args.max_photons + 1)
        ]
        meta = {"preset": args.preset, "r": scaling.scaling_ratio(budget)}
    emit_table(rows, args.format, _resolve_output(args), meta)
    return 0


def _cmd_montecarlo(args):
    noise = _noise_from_args(args)
    budget = _budget_from_args(args)
    seq = montecarlo.PulseSequence.for_photons(args.photons)
    bg = (
        montecarlo.BackgroundModel(cw_fraction=args.cw_fraction)
        if args.cw_fraction > 0
        else montecarlo.BackgroundModel.none()
    )
    tally = montecarlo.run_sequence(
        seq, noise, budget, args.shots, args.seed, phi=args.phi, background=bg, threads=args.threads
    )
    counts = tally.counts
    corrected = None
    if args.subtract:
        runs = montecarlo.background_runs(
            seq, noise, budget, args.shots, args.seed, phi=args.phi, background=bg, threads=args.threads
        )
        corrected = montecarlo.subtract_background(tally, runs)
        counts = corrected.counts
    obs = PauliString("X" * args.photons)
    v, sigma = montecarlo.visibility_with_errors(counts, obs)
    n = args.photons
    rows = []
    for idx in range(len(tally.counts)):
        row = {"outcome": format(idx, f"0{n}b"), "count": int(tally.counts[idx])}
        if corrected is not None:
            row["corrected"] = int(corrected.counts[idx])
        rows.append(row)
    meta = {
        "photons": n,
        "shots": args.shots,
        "seed": args.seed,
        "phi": args.phi,
        "visibility": v,
        "sigma": sigma,
    }
    if corrected is not None:
        meta["background_total"] = corrected.background_total
        meta["has_negative"] = corrected.has_negative
    emit_table(rows, args.format, _resolve_output(args), meta)
    return 0


def _cmd_stabilizer_check(args):
    from .protocol import build_chain

    state = build_chain(args.photons, 0.0, NoiseModel.ideal()).state
    rows = []
    worst = 0.0
    for gen in analysis.stabilizer_generators(args.photons):
        val = analysis.visibility(state, gen)
        worst = max(worst, abs(val - 1.0))
        rows.append({"generator": str(gen), "expectation": val})
    meta = {"photons": args.photons, "max_deviation": worst}
    emit_table(rows, args.format, _resolve_output(args), meta)
    return 0 if worst < 1e-9 else 1


def _add_common(p):
    p.add_argument("--output", default=None, help="output path, or - for stdout (default: <subcommand>.<format> in $LOOPCLUSTER_OUTDIR or .)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output table format (default: csv)")
    p.add_argument("--config", default=None, help="flat key=value file mirroring the flags; explicit flags win")


def _add_noise(p):
    p.add_argument("--M", type=float, default=1.0, help="photon wave-packet overlap in [0, 1] (default: 1)")
    p.add_argument("--g2", type=float, default=0.0, help="source two-photon emission probability (default: 0)")
    p.add_argument("--delta", type=float, default=0.0, help="per-fusion depolarizing strength (default: 0)")


def _add_budget(p):
    p.add_argument("--preset", choices=sorted(scaling.PRESETS), default="paper", help="efficiency budget preset (default: paper)")
    for name, text in (
        ("R", "repetition rate in Hz"),
        ("eta_d", "detector efficiency"),
        ("eta_s", "system transmission"),
        ("eta_l", "loop transmission"),
        ("eta_b", "source brightness"),
        ("eta_g", "gate success probability"),
    ):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None, help=f"override the preset {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopcluster",
        description="Simulation and analysis toolkit for loop-based linear photonic cluster states.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("phase-scan", help="visibility of one observable over a phase grid")
    p.add_argument("--photons", type=int, default=None, help="chain length n >= 2 (required)")
    p.add_argument("--observable", choices=("xn", "svnp"), default="xn", help="X^n correlation or the closed-form even-n stabilizer (default: xn)")
    p.add_argument("--points", type=int, default=41, help="number of phase grid points (default: 41)")
    p.add_argument("--phi-min", type=float, default=0.0, help="grid start in radians (default: 0)")
    p.add_argument("--phi-max", type=float, default=float(np.pi), help="grid end in radians (default: pi)")
    _add_noise(p)
    _add_common(p)
    p.set_defaults(func=_cmd_phase_scan)

    p = sub.add_parser("entlen", help="entanglement length of a noisy chain")
    p.add_argument("--v2", type=float, default=None, help="two-photon visibility in (0, 1] (required)")
    p.add_argument("--noise", choices=("distinguishing", "depolarizing"), default="distinguishing", help="noise kind (default: distinguishing)")
    p.add_argument("--n-max", type=int, default=64, help="chain-length search cap (default: 64)")
    _add_common(p)
    p.set_defaults(func=_cmd_entlen)

    p = sub.add_parser("scaling", help="detection-rate scaling and source-comparison curves")
    p.add_argument("--compare-sources", action="store_true", help="emit the PDC-versus-gate-floor comparison curve instead of rates")
    p.add_argument("--max-photons", type=int, default=6, help="largest n in the rate table (default: 6)")
    p.add_argument("--v2-min", type=float, default=0.05, help="comparison-curve grid start (default: 0.05)")
    p.add_argument("--v2-max", type=float, default=0.99, help="comparison-curve grid end (default: 0.99)")
    p.add_argument("--v2-points", type=int, default=48, help="comparison-curve grid size (default: 48)")
    _add_budget(p)
    _add_common(p)
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("montecarlo", help="seeded coincidence Monte Carlo of a pulse train")
    p.add_argument("--photons", type=int, default=None, help="chain length n >= 2 (required)")
    p.add_argument("--shots", type=int, default=None, help="number of pulse-train repetitions (required)")
    p.add_argument("--seed", type=int, default=0, help="tally is a pure function of this seed (default: 0)")
    p.add_argument("--phi", type=float, default=0.0, help="scan phase in radians (default: 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; does not affect the tally (default: 1)")
    p.add_argument("--cw-fraction", type=float, default=0.0, help="background fraction of detected events (default: 0)")
    p.add_argument("--subtract", action="store_true", help="also run blanked-slot background runs and subtract them")
    _add_noise(p)
    _add_budget(p)
    _add_common(p)
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("stabilizer-check", help="verify the generators stabilize the simulated chain")
    p.add_argument("--photons", type=int, default=None, help="chain length n >= 2 (required)")
    _add_common(p)
    p.set_defaults(func=_cmd_stabilizer_check)

    return parser


def _apply_config(parser, argv, args):
    """Fold a flat key=value config file in under the explicit flags."""
    if not args.config:
        return args
    defaults = {}
    with open(args.config) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{args.config}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            defaults[key.replace("-", "_")] = value
    known = set(vars(args)) - {"func", "subcommand", "config"}
    unknown = set(defaults) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    # reparse with the config values as defaults so explicit flags still win
    sub = [a for a in parser._subparsers._group_actions[0].choices.items() if a[0] == args.subcommand]
    subparser = sub[0][1]
    typed = {}
    for key, value in defaults.items():
        action = next(a for a in subparser._actions if a.dest == key)
        if action.const is True:  # store_true flag
            typed[key] = value.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            typed[key] = action.type(value)
        else:
            typed[key] = value
    subparser.set_defaults(**typed)
    return parser.parse_args(argv)


# flags that must arrive from the command line or the config file
_REQUIRED = {
    "phase-scan": ("photons",),
    "entlen": ("v2",),
    "montecarlo": ("photons", "shots"),
    "stabilizer-check": ("photons",),
}


def parse_and_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(parser, argv, args)
        missing = [f"--{name}" for name in _REQUIRED.get(args.subcommand, ()) if getattr(args, name) is None]
        if missing:
            print(f"error: {args.subcommand} requires {', '.join(missing)}", file=sys.stderr)
            return 2
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, CapacityError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
