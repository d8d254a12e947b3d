"""Command-line interface.

Subcommands: moments, poisson-sim, lattice-sim, zeta-eval, bounds, verify,
curves.  Every run writes its outputs plus a reproducibility manifest
(<output>.manifest.json) carrying the config snapshot, package version, root
seed, seed policy, and output digests.

Options can come from a plain-text config file (--config, ``key = value``
lines); explicit flags win over the file.  The default output directory is
$LATTICEZETA_OUTDIR or the working directory.

Exit codes: 0 success, 1 test failure, 2 config error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

from . import __version__, acceptance, bounds, moments, poisson
from .errors import NodeBudgetExceeded
from .runner import RunManifest, read_config_file, spectra_ensemble
from .stats import convexity_audit, finite_dim_compare
from .zeta import normalized_zeta_truncated

EXIT_OK = 0
EXIT_TEST_FAILURE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _out_dir(ns) -> Path:
    out = ns.out or os.environ.get("LATTICEZETA_OUTDIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_config_file(ns, parser_types: dict[str, type]) -> None:
    """Fill options not given on the command line from the config file."""
    if not ns.config:
        return
    values = read_config_file(ns.config)
    for key, raw in values.items():
        if key not in parser_types:
            raise ValueError(f"unknown config key: {key}")
        if getattr(ns, key, None) is None:
            caster = parser_types[key]
            if caster is bool:
                setattr(ns, key, raw.lower() in ("1", "true", "yes"))
            elif caster is list:
                setattr(ns, key, [float(tok) for tok in raw.split(",")])
            else:
                setattr(ns, key, caster(raw))


def _default(ns, key, value) -> None:
    if getattr(ns, key, None) is None:
        setattr(ns, key, value)


def _seed(ns) -> int:
    if ns.seed is None:
        ns.seed = int.from_bytes(os.urandom(4), "big")
        print(f"# generated root seed: {ns.seed}", file=sys.stderr)
    return ns.seed


def _finish(manifest: RunManifest, out_dir: Path, *outputs: Path) -> None:
    for path in outputs:
        manifest.record_output(path)
    manifest_path = outputs[0].with_suffix(outputs[0].suffix + ".manifest.json")
    manifest.write(manifest_path)
    print(f"wrote {', '.join(str(p) for p in outputs)} and {manifest_path}")


def _manifest(name: str, ns, skip=("config", "out", "func")) -> RunManifest:
    config = {
        k: v for k, v in vars(ns).items() if k not in skip and not k.startswith("_")
    }
    return RunManifest(subcommand=name, config=config, root_seed=ns.seed or 0)


# ---------------------------------------------------------------------------
# Subcommand implementations.
# ---------------------------------------------------------------------------


def cmd_moments(ns) -> int:
    _default(ns, "k", 4)
    _default(ns, "c", [1.0])
    _default(ns, "delta", [1.0])
    ns.seed = 0
    for c in ns.c:
        for d in ns.delta:
            moments.MomentParams(c=c, delta=d, k=ns.k)  # domain validation
    out_dir = _out_dir(ns)
    path = out_dir / "moments.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "c", "delta", "poisson_moment", "limit_moment", "abs_diff"])
        for k in range(1, ns.k + 1):
            for c in ns.c:
                for d in ns.delta:
                    a = moments.poisson_moment(k, c, d)
                    b = moments.limit_moment(k, c, d)
                    writer.writerow([k, c, d, repr(a), repr(b), repr(abs(a - b))])
    _finish(_manifest("moments", ns), out_dir, path)
    return EXIT_OK


def cmd_poisson_sim(ns) -> int:
    _default(ns, "trials", 10_000)
    _default(ns, "c", [1.0])
    _default(ns, "delta", 1.0)
    _seed(ns)
    if ns.horizon is None:
        ns.horizon = poisson.horizon_for_tail(min(ns.c), delta=ns.delta)
        if ns.horizon > 1e7:
            raise ValueError(
                f"tail policy wants horizon {ns.horizon:.3g}; pass --horizon "
                "explicitly (windowed comparisons are the intended tool here)"
            )
    out_dir = _out_dir(ns)
    path = out_dir / "poisson_sim.jsonl"
    grid = sorted(ns.c)
    values = poisson.sample_power_sum_curves(
        ns.trials, grid, ns.delta, ns.horizon, ns.seed
    )
    with open(path, "w") as fh:
        for i in range(ns.trials):
            for j, c in enumerate(grid):
                fh.write(
                    json.dumps(
                        {
                            "seed": [ns.seed, i],
                            "c": c,
                            "delta": ns.delta,
                            "value": values[i, j],
                            "tail_estimate": moments.tail_mean(c, ns.horizon),
                        }
                    )
                    + "\n"
                )
    _finish(_manifest("poisson-sim", ns), out_dir, path)
    return EXIT_OK


def cmd_lattice_sim(ns) -> int:
    _default(ns, "n", 12)
    _default(ns, "trials", 1000)
    _default(ns, "cutoff_volume", 200.0)
    _default(ns, "prime_bits", 40)
    _default(ns, "workers", 1)
    _seed(ns)
    out_dir = _out_dir(ns)
    path = out_dir / "lattice_sim.jsonl"
    with open(path, "w") as fh:
        for i, p, spec in spectra_ensemble(
            ns.n, ns.trials, ns.cutoff_volume, ns.prime_bits, ns.seed, ns.workers
        ):
            fh.write(
                json.dumps(
                    {
                        "seed": [ns.seed, i],
                        "p": p,
                        "n": ns.n,
                        "volumes": list(spec.volumes),
                        "cutoff": ns.cutoff_volume,
                    }
                )
                + "\n"
            )
    _finish(_manifest("lattice-sim", ns), out_dir, path)
    return EXIT_OK


def cmd_zeta_eval(ns) -> int:
    if not ns.input:
        raise ValueError("zeta-eval needs --input (a lattice-sim JSONL file)")
    _default(ns, "c", [1.0])
    _default(ns, "delta", 1.0)
    ns.seed = 0
    out_dir = _out_dir(ns)
    path = out_dir / "zeta_eval.jsonl"
    from .lattice import VolumeSpectrum

    with open(ns.input) as src, open(path, "w") as fh:
        for line in src:
            rec = json.loads(line)
            spec = VolumeSpectrum(tuple(rec["volumes"]), rec["cutoff"], rec["n"])
            for c in ns.c:
                zv = normalized_zeta_truncated(spec, c, ns.delta)
                fh.write(
                    json.dumps(
                        {
                            "seed": rec["seed"],
                            "c": c,
                            "delta": ns.delta,
                            "epsilon": zv.value,
                            "tail_estimate": zv.tail_estimate,
                        }
                    )
                    + "\n"
                )
    _finish(_manifest("zeta-eval", ns), out_dir, path)
    return EXIT_OK


def cmd_bounds(ns) -> int:
    _default(ns, "factors", 4)
    _default(ns, "c", [1.0])
    _default(ns, "delta", 1.0)
    _default(ns, "n_min", 6)
    _default(ns, "n_max", 38)
    _default(ns, "n_step", 4)
    ns.seed = 0
    out_dir = _out_dir(ns)
    path = out_dir / "bounds.csv"
    exponents = (1, 1, 1, 1) if ns.factors == 4 else (1, 1, 1)
    integral = bounds.sym_integral_four if ns.factors == 4 else bounds.sym_integral_three
    quad = bounds.QuadConfig(rtol=1e-5)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "value", "envelope"])
        for n in range(ns.n_min, ns.n_max + 1, ns.n_step):
            spec = bounds.KernelIntegralSpec(n, ns.c[0], ns.delta, exponents)
            writer.writerow([n, repr(integral(spec, quad)), repr(bounds.decay_envelope(n))])
    _finish(_manifest("bounds", ns), out_dir, path)
    return EXIT_OK


def cmd_verify(ns) -> int:
    _default(ns, "profile", "desk")
    _default(ns, "workers", 1)
    profile = acceptance.Profile() if ns.profile == "desk" else acceptance.QUICK
    overrides = {"workers": ns.workers}
    if ns.seed is not None:
        overrides["seed"] = ns.seed
    profile = dataclasses.replace(profile, **overrides)
    ns.seed = profile.seed
    out_dir = _out_dir(ns)
    t0 = time.time()
    results = acceptance.run_acceptance(profile)
    passed = all(r.passed for r in results)
    path = out_dir / "verify_report.json"
    payload = {
        "profile": dataclasses.asdict(profile),
        "version": __version__,
        "passed": passed,
        "seconds": time.time() - t0,
        "criteria": [
            {
                "id": r.cid,
                "title": r.title,
                "passed": r.passed,
                "seconds": r.seconds,
                "notes": r.notes,
                "reports": [
                    {
                        "name": t.name,
                        "observed": t.observed,
                        "reference": t.reference,
                        "tolerance": t.tolerance,
                        "stderr": t.stderr,
                        "passed": t.passed,
                        "note": t.note,
                    }
                    for t in r.reports
                ],
            }
            for r in results
        ],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    _finish(_manifest("verify", ns), out_dir, path)
    print(f"\noverall: {'PASS' if passed else 'FAIL'} ({time.time() - t0:.0f}s)")
    return EXIT_OK if passed else EXIT_TEST_FAILURE


def cmd_curves(ns) -> int:
    _default(ns, "n", 14)
    _default(ns, "trials", 1000)
    _default(ns, "poisson_trials", 10_000)
    _default(ns, "cutoff_volume", 200.0)
    _default(ns, "delta", 1.0)
    _default(ns, "prime_bits", 40)
    _default(ns, "workers", 1)
    _default(ns, "grid", list(acceptance.Profile().curve_grid))
    _default(ns, "ks_budget", 0.05)
    _seed(ns)
    out_dir = _out_dir(ns)
    grid = sorted(ns.grid)
    from .runner import truncated_value_matrix

    spectra = spectra_ensemble(
        ns.n, ns.trials, ns.cutoff_volume, ns.prime_bits, ns.seed, ns.workers
    )
    lattice_curves = truncated_value_matrix(spectra, grid, ns.delta)
    poisson_curves = poisson.sample_power_sum_curves(
        ns.poisson_trials, grid, ns.delta, ns.cutoff_volume, ns.seed + 1
    )
    violations = 0
    for curve_set in (lattice_curves, poisson_curves):
        for row in curve_set:
            ok, _ = convexity_audit(grid, row)
            violations += 0 if ok else 1
    # Marginal panels at the grid points nearest 0.75 and 1.0.
    mid = sorted(
        {
            min(range(len(grid)), key=lambda i: abs(grid[i] - 0.75)),
            min(range(len(grid)), key=lambda i: abs(grid[i] - 1.0)),
        }
    )
    reports = finite_dim_compare(
        lattice_curves[:, mid],
        poisson_curves[:, mid],
        [grid[i] for i in mid],
        ns.delta,
        upper=ns.cutoff_volume,
        ks_budget=ns.ks_budget,
        seed=ns.seed,
    )
    path = out_dir / "curves.jsonl"
    with open(path, "w") as fh:
        for i, row in enumerate(lattice_curves):
            fh.write(
                json.dumps(
                    {"seed": [ns.seed, i], "kind": "lattice", "grid": grid,
                     "values": list(row)}
                )
                + "\n"
            )
        for i, row in enumerate(poisson_curves):
            fh.write(
                json.dumps(
                    {"seed": [ns.seed + 1, i], "kind": "poisson", "grid": grid,
                     "values": list(row)}
                )
                + "\n"
            )
    report_path = out_dir / "curves_report.json"
    payload = {
        "convexity_violations": violations,
        "marginal_reports": [
            {"name": r.name, "observed": r.observed, "reference": r.reference,
             "tolerance": r.tolerance, "passed": r.passed}
            for r in reports
        ],
    }
    report_path.write_text(json.dumps(payload, indent=2) + "\n")
    for r in reports:
        print(r.summary())
    passed = violations == 0 and all(r.passed for r in reports)
    print(f"convexity violations: {violations}")
    _finish(_manifest("curves", ns), out_dir, path, report_path)
    return EXIT_OK if passed else EXIT_TEST_FAILURE


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, dict[str, type]]]:
    parser = argparse.ArgumentParser(
        prog="latticezeta",
        description="Zeta sums over random lattices vs their point-process limit.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    type_registry: dict[str, dict[str, type]] = {}

    def add(name, fn, options):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file; flags win")
        p.add_argument("--out", help="output directory (or $LATTICEZETA_OUTDIR)")
        types: dict[str, type] = {}
        for flag, caster, help_text in options:
            dest = flag.lstrip("-").replace("-", "_")
            kwargs = {"help": help_text, "default": None, "dest": dest}
            if caster is list:
                kwargs["type"] = float
                kwargs["action"] = "append"
            elif caster is bool:
                kwargs["action"] = "store_true"
                kwargs["default"] = None
            else:
                kwargs["type"] = caster
            p.add_argument(flag, **kwargs)
            types[dest] = caster
        p.set_defaults(func=fn)
        type_registry[name] = types

    add("moments", cmd_moments, [
        ("--k", int, "largest moment order (rows for k=1..K)"),
        ("--c", list, "exponent parameter, repeatable"),
        ("--delta", list, "truncation level, repeatable"),
    ])
    add("poisson-sim", cmd_poisson_sim, [
        ("--trials", int, "number of sampled configurations"),
        ("--c", list, "exponent parameter, repeatable"),
        ("--delta", float, "truncation level"),
        ("--horizon", float, "sampling horizon (default: tail policy)"),
        ("--seed", int, "root seed (generated and recorded if omitted)"),
    ])
    add("lattice-sim", cmd_lattice_sim, [
        ("--n", int, "lattice dimension"),
        ("--trials", int, "number of sampled lattices"),
        ("--cutoff-volume", float, "certified spectrum cutoff"),
        ("--prime-bits", int, "prime size (sampler fidelity knob)"),
        ("--seed", int, "root seed"),
        ("--workers", int, "worker processes (deterministic partitioning)"),
    ])
    add("zeta-eval", cmd_zeta_eval, [
        ("--input", str, "lattice-sim JSONL file"),
        ("--c", list, "exponent parameter, repeatable"),
        ("--delta", float, "truncation level"),
    ])
    add("bounds", cmd_bounds, [
        ("--factors", int, "4 or 3 kernel factors"),
        ("--c", list, "exponent parameter"),
        ("--delta", float, "truncation level"),
        ("--n-min", int, "first dimension"),
        ("--n-max", int, "last dimension"),
        ("--n-step", int, "dimension step"),
    ])
    add("verify", cmd_verify, [
        ("--profile", str, "desk (acceptance scale) or quick (smoke)"),
        ("--seed", int, "root seed override"),
        ("--workers", int, "worker processes"),
    ])
    add("curves", cmd_curves, [
        ("--n", int, "lattice dimension"),
        ("--trials", int, "lattice curves"),
        ("--poisson-trials", int, "point-process curves"),
        ("--cutoff-volume", float, "spectrum cutoff / sampling horizon"),
        ("--delta", float, "truncation level"),
        ("--prime-bits", int, "prime size"),
        ("--grid", list, "c grid point, repeatable (comma list in config files)"),
        ("--ks-budget", float, "empirical KS budget for marginal panels"),
        ("--seed", int, "root seed"),
        ("--workers", int, "worker processes"),
    ])
    return parser, type_registry


def main(argv=None) -> int:
    parser, registry = build_parser()
    try:
        ns = parser.parse_args(argv)
        _apply_config_file(ns, registry[ns.subcommand])
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return ns.func(ns)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NodeBudgetExceeded, bounds.QuadratureError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
