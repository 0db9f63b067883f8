"""Batch front door: experiments, sweeps, verification suites, report emission.

Exit codes: 0 success, 1 invariant/suite failure, 2 configuration error,
3 capacity error. All randomness flows from --seed; per-trial streams are
derived by counter, so identical commands produce byte-identical payload
files. Timestamps live only in the run manifest, never in payloads.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import jsonschema
import numpy as np

from . import __version__, analytic, lemma_lab, prime_surveys, statevec
from .errors import CapacityError, ConfigurationError, FactorFound
from .kernels import get_backend
from .noise import Distribution, Mode, NoiseConfig
from .periodic import PeriodicFamily, default_radius, make_instance

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def load_report_schema() -> dict:
    path = resources.files("noisyshor").joinpath("schemas/probability_report.schema.json")
    return json.loads(path.read_text())


class RunWriter:
    """Collects payload files for one run and writes the manifest last."""

    def __init__(self, out_dir: Path, subcommand: str, args: argparse.Namespace):
        self.out_dir = out_dir
        self.manifest_name = "manifest.json"
        self.started = _utcnow()
        self.subcommand = subcommand
        self.config_echo = {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")
        }
        self.outputs: list[str] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8", newline="")
        self.outputs.append(name)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        return self.write_text(name, json.dumps(payload, sort_keys=True, indent=2) + "\n")

    def write_report(self, name: str, report: analytic.ProbabilityReport) -> Path:
        report.manifest = self.manifest_name
        payload = report.to_json_dict()
        jsonschema.validate(payload, load_report_schema())
        return self.write_json(name, payload)

    def finish(self) -> Path:
        manifest = {
            "subcommand": self.subcommand,
            "config": self.config_echo,
            "master_seed": self.config_echo.get("seed"),
            "artifact_version": __version__,
            "backend": get_backend(),
            "started_utc": self.started,
            "finished_utc": _utcnow(),
            "outputs": self.outputs,
        }
        path = self.out_dir / self.manifest_name
        path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8", newline="")
        return path


def _config_from_args(args: argparse.Namespace) -> NoiseConfig:
    return NoiseConfig(
        epsilon=args.epsilon,
        band=args.band,
        mode=Mode(args.mode),
        distribution=Distribution(args.distribution),
        seed=args.seed,
    )


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    writer = RunWriter(Path(args.out), "simulate", args)
    if args.N is not None:
        if args.x is None:
            raise ConfigurationError("--N requires --x")
        try:
            inst = make_instance(args.N, args.x)
        except FactorFound as found:
            writer.write_json("report.json", {
                "gcd_factor": found.factor, "N": args.N, "x": args.x,
                "manifest": writer.manifest_name,
            })
            writer.finish()
            print(f"gcd({args.x}, {args.N}) = {found.factor}; no quantum run needed")
            return EXIT_OK
        rng = np.random.default_rng(args.seed)
        u_star = int(rng.integers(0, 1 << inst.n)) % inst.omega
        family = inst.family(u_star)
        from .noise import draw_tape

        tape = draw_tape(inst.n, config) if config.mode.is_noisy else None
        report = statevec.distribution_report(family, config, tape)
        report.family.update({"N": inst.N, "x": inst.x})
        if args.trials > 1:
            stats = statevec.full_pipeline(args.N, args.x, config,
                                           np.random.default_rng(args.seed), args.trials)
            report.pipeline = {
                "trials": stats.trials,
                "successes": stats.successes,
                "success_rate": stats.success_rate,
                "gcd_shortcut": stats.gcd_shortcut,
                "v_counts": {str(v): c for v, c in sorted(stats.v_counts().items())},
            }
        writer.write_report("report.json", report)
        writer.write_text("report.csv", report.to_csv())
    else:
        if args.n is None or args.omega is None:
            raise ConfigurationError("synthetic runs need --n and --omega (or use --N/--x)")
        family = PeriodicFamily(args.n, args.omega, args.ustar)
        radius = args.radius if args.radius is not None else default_radius(args.n)
        if args.trials > 1 or config.mode.is_noisy or args.n > analytic.FULL_TABLE_MAX_QUBITS:
            estimates = analytic.useful_mass_sweep(
                family, config, [config.epsilon], radius, args.trials, args.threads
            )
            report = analytic.mc_report(family, config, estimates, radius)
        else:
            report = analytic.table_report(family, config)
        writer.write_report("report.json", report)
        writer.write_text("report.csv", report.to_csv())
    writer.finish()
    print(f"simulate: wrote {', '.join(writer.outputs)} to {writer.out_dir}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    writer = RunWriter(Path(args.out), "sweep", args)
    radius = args.radius if args.radius is not None else default_radius(args.n)
    family = PeriodicFamily(args.n, args.omega, args.ustar)
    epsilons = args.epsilons
    rows = ["mode,band,epsilon,mean,stderr,trials"]
    diagnostics = []
    for mode in args.modes:
        for band in args.bands:
            config = NoiseConfig(0.0, band, Mode(mode), Distribution(args.distribution),
                                 args.seed)
            estimates = analytic.useful_mass_sweep(
                family, config, epsilons, radius, args.trials, args.threads
            )
            for est in estimates:
                rows.append(
                    f"{mode},{band},{est.epsilon!r},{est.mean!r},{est.stderr!r},{est.trials}"
                )
            drops = [
                estimates[i].mean - estimates[i + 1].mean
                + 3 * (estimates[i].stderr + estimates[i + 1].stderr)
                for i in range(len(estimates) - 1)
            ]
            diagnostics.append({
                "mode": mode,
                "band": band,
                "non_increasing_within_3se": bool(all(d >= 0 for d in drops)),
                "means": [est.mean for est in estimates],
            })
    writer.write_text("sweep.csv", "\n".join(rows) + "\n")
    writer.write_json("diagnostics.json", {
        "manifest": writer.manifest_name, "grid": diagnostics,
    })
    writer.finish()
    print(f"sweep: wrote {', '.join(writer.outputs)} to {writer.out_dir}")
    return EXIT_OK


def _suite_bit_segment(args) -> dict:
    mismatches = 0
    checked = 0
    n = 16
    for omega in range(1, args.omega_max + 1):
        i0 = lemma_lab.i0_cutoff(omega)
        j = np.arange(omega, dtype=np.int64)
        v = (j << n) // omega
        for i in range(1, i0 + 1):
            seg = ((j << i) // omega) & 1
            bit = (v >> (n - i)) & 1
            checked += int(len(j))
            mismatches += int((seg != bit).sum())
    return {"name": "bit-segment", "passed": mismatches == 0,
            "checked": checked, "mismatches": mismatches}


def _suite_lemma22(args) -> dict:
    rng = np.random.default_rng(args.seed)
    failures = []
    cases = 0
    for K in (2, 8, 32):
        for t in (0.5, 1.0, 2.0):
            for m, sigma in ((4, 1.0), (8, 2.0), (16, 8.0)):
                size = int(np.ceil((m / sigma) ** 2 * t / 2)) + 1
                sets = tuple(
                    frozenset(range(k * size, (k + 1) * size)) for k in range(K)
                )
                phis = tuple(rng.uniform(0, 2 * np.pi, size=K))
                spec = lemma_lab.SumSpec(m, sigma, sets, phis, t)
                mc = lemma_lab.expected_sq_norm_mc(spec, 2000, rng)
                cases += 1
                if mc.mean > spec.bound() + 3 * mc.stderr:
                    failures.append({"K": K, "t": t, "m": m, "mean": mc.mean,
                                     "bound": spec.bound(), "stderr": mc.stderr})
                if mc.max_value > K * K * (1 + 1e-12):
                    failures.append({"K": K, "t": t, "m": m, "max": mc.max_value})
    return {"name": "lemma22", "passed": not failures, "cases": cases,
            "failures": failures}


def _suite_cos_moment(args) -> dict:
    rng = np.random.default_rng(args.seed)
    failures = []
    for sigma in (0.1, 0.5, 1.0, 2.0, 3.0):
        res = lemma_lab.cos_moment_check(sigma, 200_000, rng)
        if abs(res.mc_mean - res.analytic) > 3 * res.mc_stderr:
            failures.append({"sigma": sigma, "mc": res.mc_mean, "analytic": res.analytic})
    return {"name": "cos-moment", "passed": not failures, "failures": failures}


def _suite_closeness(args) -> dict:
    from fractions import Fraction

    rng = np.random.default_rng(args.seed)
    failures = []
    cases = 0
    for _ in range(50):
        i0 = int(rng.integers(1, 11))
        omega = int(rng.integers(1 << i0, 1 << 14))
        dev = lemma_lab.distribution_closeness(omega, i0)
        cases += 1
        if omega > (1 << i0):
            bound = Fraction(1 << i0, omega - (1 << i0))
            if dev > bound:
                failures.append({"omega": omega, "i0": i0, "dev": str(dev)})
        elif dev != 0:
            failures.append({"omega": omega, "i0": i0, "dev": str(dev)})
    return {"name": "closeness", "passed": not failures, "cases": cases,
            "failures": failures}


def _suite_ones_count(args) -> dict:
    rng = np.random.default_rng(args.seed)
    stat = lemma_lab.ones_count_stat(1023, 24, range(1, 8), 4000, rng)
    # window of 7 near-uniform bits: mean ~ 3.5, binomial 3 sigma ~ 0.09
    ok = abs(stat.mean - 3.5) < 0.1 and stat.frac_below_quarter < 0.30
    return {"name": "ones-count", "passed": bool(ok), "mean": stat.mean,
            "frac_below_quarter": stat.frac_below_quarter}


def _suite_pair_bits(args) -> dict:
    rng = np.random.default_rng(args.seed)
    family = PeriodicFamily(24, 1023, 7)
    window = range(3, lemma_lab.i0_cutoff(1023) + 1)
    stat = lemma_lab.pair_bit_diff_stat(family, 3, window, 4000, rng)
    ok = abs(stat.mean - len(list(window)) / 2) < 0.2 and stat.frac_below_quarter < 0.35
    return {"name": "pair-bits", "passed": bool(ok), "mean": stat.mean,
            "frac_below_quarter": stat.frac_below_quarter}


_SUITES = {
    "bit-segment": _suite_bit_segment,
    "lemma22": _suite_lemma22,
    "cos-moment": _suite_cos_moment,
    "closeness": _suite_closeness,
    "ones-count": _suite_ones_count,
    "pair-bits": _suite_pair_bits,
}


def cmd_verify(args: argparse.Namespace) -> int:
    writer = RunWriter(Path(args.out), "verify", args)
    names = args.suite or list(_SUITES)
    results = []
    for name in names:
        if name not in _SUITES:
            raise ConfigurationError(
                f"unknown suite {name!r}; choose from {', '.join(_SUITES)}"
            )
        results.append(_SUITES[name](args))
    all_passed = all(r["passed"] for r in results)
    writer.write_json("verify.json", {
        "manifest": writer.manifest_name,
        "passed": all_passed,
        "suites": results,
    })
    writer.finish()
    for r in results:
        print(f"[{'PASS' if r['passed'] else 'FAIL'}] {r['name']}")
    return EXIT_OK if all_passed else EXIT_FAILURE


def cmd_survey(args: argparse.Namespace) -> int:
    writer = RunWriter(Path(args.out), "survey", args)
    rng = np.random.default_rng(args.seed)
    what = args.what
    if what == "fouvry":
        from .numtheory import fouvry_count

        hits, total = fouvry_count(args.xmax)
        writer.write_text(
            "survey_fouvry.csv",
            "x_max,qualifying,primes,density\n"
            f"{args.xmax},{hits},{total},{hits / total!r}\n",
        )
    elif what == "brun-titchmarsh":
        rows = prime_surveys.brun_titchmarsh_check(args.x, range(3, args.dmax + 1))
        lines = ["d,count,bound,holds"]
        lines += [f"{r['d']},{r['count']},{r['bound']!r},{r['holds']}" for r in rows]
        all_hold = all(r["holds"] for r in rows)
        lines.append(f"all,,,{all_hold}")
        writer.write_text("survey_brun_titchmarsh.csv", "\n".join(lines) + "\n")
    elif what == "rosser-schoenfeld":
        res = prime_surveys.rosser_schoenfeld_check(args.dmax)
        exc = prime_surveys.rosser_schoenfeld_exceptional_ratio()
        writer.write_text(
            "survey_rosser_schoenfeld.csv",
            "d_max,max_ratio,argmax_d,all_hold,exceptional_d,exceptional_ratio\n"
            f"{res.d_max},{res.max_ratio!r},{res.argmax_d},{res.all_hold},"
            f"{prime_surveys.RS_EXCEPTIONAL_D},{exc!r}\n",
        )
    elif what in ("hss", "order-ratio"):
        table = prime_surveys.order_ratio_survey(
            args.mbits, args.samples, _float_list(args.thresholds or "2,4,16,64"), rng
        )
        writer.write_text("survey_order_ratio.csv", table.to_csv())
    elif what == "gcd":
        table = prime_surveys.gcd_survey(
            args.mbits, args.samples, _float_list(args.thresholds or "1,2,4,8,16"), rng
        )
        writer.write_text("survey_gcd.csv", table.to_csv())
    elif what == "per-prime":
        table = prime_surveys.per_prime_order_survey(
            args.mbits, args.samples, _float_list(args.thresholds or "2,4,16,64"), rng
        )
        writer.write_text("survey_per_prime.csv", table.to_csv())
    elif what == "ord2":
        table = prime_surveys.ord2_tail_survey(
            args.mbits, _int_list(args.thresholds or "1,2,3,4,5,6")
        )
        writer.write_text("survey_ord2.csv", table.to_csv())
    else:
        raise ConfigurationError(f"unknown survey {what!r}")
    writer.finish()
    print(f"survey: wrote {', '.join(writer.outputs)} to {writer.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyshor",
        description="Simulate period finding under noisy controlled rotations "
        "and verify the supporting estimates.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", type=str, default="runs/latest",
                       help="output directory for reports and manifest")

    sim = sub.add_parser("simulate", help="one experiment: instance or synthetic family")
    sim.add_argument("--N", type=int, help="modulus to factor (with --x)")
    sim.add_argument("--x", type=int, help="base element")
    sim.add_argument("--n", type=int, help="qubit count for a synthetic family")
    sim.add_argument("--omega", type=int, help="period of the synthetic family")
    sim.add_argument("--ustar", type=int, default=0, help="offset u* (default 0)")
    sim.add_argument("--mode", default="exact", choices=[m.value for m in Mode])
    sim.add_argument("--epsilon", type=float, default=0.0)
    sim.add_argument("--band", type=int, default=2)
    sim.add_argument("--distribution", default="gaussian_unit",
                     choices=[d.value for d in Distribution])
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument("--radius", type=int, default=None,
                     help="useful-set radius (default n^2)")
    sim.add_argument("--threads", type=int, default=1)
    add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="grid of (mode, band, epsilon) useful masses")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--omega", type=int, required=True)
    sw.add_argument("--ustar", type=int, default=0)
    sw.add_argument("--modes", type=lambda s: s.split(","),
                    default=["full_noise", "single_level", "banded_noisy"])
    sw.add_argument("--epsilons", type=_float_list, default=[0.0, 0.125, 0.25, 0.5, 1.0])
    sw.add_argument("--bands", type=_int_list, default=[2])
    sw.add_argument("--distribution", default="gaussian_unit",
                    choices=[d.value for d in Distribution])
    sw.add_argument("--trials", type=int, default=50)
    sw.add_argument("--radius", type=int, default=None)
    sw.add_argument("--threads", type=int, default=1)
    add_common(sw)
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="run the lemma verification suites")
    ver.add_argument("--suite", action="append",
                     help=f"suite name ({', '.join(_SUITES)}); repeatable; "
                          "default all")
    ver.add_argument("--omega-max", type=int, default=1000,
                     help="bit-segment suite: exhaustive omega range")
    add_common(ver)
    ver.set_defaults(func=cmd_verify)

    sv = sub.add_parser("survey", help="empirical number-theory surveys")
    sv.add_argument("--what", required=True,
                    choices=["fouvry", "brun-titchmarsh", "rosser-schoenfeld",
                             "hss", "order-ratio", "gcd", "per-prime", "ord2"])
    sv.add_argument("--xmax", type=int, default=100_000, help="fouvry: prime bound")
    sv.add_argument("--x", type=int, default=1_000_000, help="brun-titchmarsh: sieve bound")
    sv.add_argument("--dmax", type=int, default=1000, help="modulus bound")
    sv.add_argument("--mbits", type=int, default=16, help="prime bit length")
    sv.add_argument("--samples", type=int, default=500)
    sv.add_argument("--thresholds", type=str, default=None,
                    help="comma-separated threshold list")
    add_common(sv)
    sv.set_defaults(func=cmd_survey)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as err:
        print(f"capacity error: {err}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
