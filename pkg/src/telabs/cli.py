"""Command-line front end: simulate, rate, tables, verify.

Every randomized command requires an explicit --seed; outputs are CSV files
with key=value metadata sidecars that round-trip the resolved configuration.
Exit codes: 0 success, 1 I/O failure, 2 usage/parameter error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from telabs import analytics, estimation, verification
from telabs.params import RateParams, ScalingParams
from telabs.simulation import CHUNK_SIZE, simulate_batch, write_batch
from telabs.visits import Geometric, ShiftedPig, ShiftedPoisson, VisitCountLaw

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

_M_KINDS = {
    "geometric": (Geometric, ("alpha",)),
    "shifted_poisson": (ShiftedPoisson, ("theta",)),
    "shifted_pig": (ShiftedPig, ("theta", "xi")),
}


def parse_m_spec(spec: str) -> VisitCountLaw:
    """Parse 'kind:key=value[,key=value]' into a visit-count law."""
    kind, _, rest = spec.partition(":")
    if kind not in _M_KINDS:
        raise ValueError(f"unknown M kind {kind!r}; expected one of {sorted(_M_KINDS)}")
    cls, names = _M_KINDS[kind]
    kwargs: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad M parameter {item!r}; expected key=value")
            key = key.strip()
            if key not in names:
                raise ValueError(f"unknown parameter {key!r} for {kind}")
            kwargs[key] = float(value)
    missing = [nm for nm in names if nm not in kwargs]
    if missing:
        raise ValueError(f"{kind} needs parameters {missing}")
    return cls(**kwargs)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telabs",
        description="Telegraph-process absorption times: simulation, rate functions, "
        "estimation tables, and numerical verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="draw C0/Cx/Ax samples to CSV")
    sim.add_argument("--lambda", dest="lam", type=float, required=True)
    sim.add_argument("--mu", type=float, required=True)
    sim.add_argument("--x", type=float, default=1.0)
    sim.add_argument("--m", help="visit-count law, e.g. shifted_poisson:theta=3")
    sim.add_argument("--target", choices=("c0", "cx", "ax"), default="ax")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--workers", type=int, default=1)

    rate = sub.add_parser("rate", help="evaluate rate functions on a z grid")
    rate.add_argument("--mode", choices=("i1", "i2", "md1", "md2"), required=True)
    rate.add_argument("--lambda", dest="lam", type=float)
    rate.add_argument("--mu", type=float)
    rate.add_argument("--beta", type=float)
    rate.add_argument("--x", type=float, default=1.0)
    rate.add_argument("--m", required=True)
    rate.add_argument("--z-from", dest="z_from", type=float, required=True)
    rate.add_argument("--z-to", dest="z_to", type=float, required=True)
    rate.add_argument("--z-steps", dest="z_steps", type=int, required=True)
    rate.add_argument("--out", required=True)

    tables = sub.add_parser("tables", help="reproduce an estimation table")
    tables.add_argument("--which", type=int, required=True)
    tables.add_argument("--seed", type=int, required=True)
    tables.add_argument("--out", required=True)

    verify = sub.add_parser("verify", help="run numerical verification suites")
    verify.add_argument(
        "--suite",
        choices=("legendre", "cgf-limit", "equal-dist", "normality", "md-decay", "all"),
        required=True,
    )
    verify.add_argument("--seed", type=int, required=True)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        p = RateParams(args.lam, args.mu, args.x)
        m = parse_m_spec(args.m) if args.m else None
        if args.target == "ax" and m is None:
            raise ValueError("--target ax requires --m")
        if args.n < 1:
            raise ValueError("--n must be >= 1")
        batch = simulate_batch(
            args.n, args.seed, p, m, target=args.target, workers=max(1, args.workers)
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        write_batch(batch, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _rate_rows(args: argparse.Namespace, m: VisitCountLaw):
    zs = np.linspace(args.z_from, args.z_to, args.z_steps)
    if args.mode in ("i1", "md1"):
        if args.lam is None or args.mu is None:
            raise ValueError(f"mode {args.mode} requires --lambda and --mu")
        p = RateParams(args.lam, args.mu, args.x)
        label = analytics.classify_domain(p, m)
        for z in zs:
            if args.mode == "i1":
                res = analytics.ld_rate1(z, p, m)
                value, exposed = res.value, z > res.exposed_from
            else:
                value, exposed = analytics.rate_md1(z, p), True
            yield z, value, label.case, exposed
    else:
        if args.beta is None:
            raise ValueError(f"mode {args.mode} requires --beta")
        sp = ScalingParams(args.beta, 1.0, args.x)
        label = analytics.classify_domain(sp.unit_rates(), m)
        for z in zs:
            if args.mode == "i2":
                res = analytics.ld_rate2(z, sp, m)
                value, exposed = res.value, z > res.exposed_from
            else:
                value, exposed = analytics.rate_md2(z, sp), True
            yield z, value, label.case, exposed


def _cmd_rate(args: argparse.Namespace) -> int:
    try:
        if args.z_steps < 1 or not args.z_to >= args.z_from:
            raise ValueError("bad z grid")
        m = parse_m_spec(args.m)
        rows = list(_rate_rows(args, m))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = Path(args.out)
        with open(out, "w") as fh:
            fh.write("z,rate,case,exposed\n")
            for z, value, case, exposed in rows:
                fh.write(f"{z:.17g},{value:.17g},{case},{str(bool(exposed)).lower()}\n")
        meta = {
            "command": "rate",
            "mode": args.mode,
            "lambda": repr(args.lam) if args.lam is not None else "none",
            "mu": repr(args.mu) if args.mu is not None else "none",
            "beta": repr(args.beta) if args.beta is not None else "none",
            "x": repr(args.x),
            "m": args.m,
            "z_from": repr(args.z_from),
            "z_to": repr(args.z_to),
            "z_steps": str(args.z_steps),
        }
        with open(out.with_suffix(out.suffix + ".meta"), "w") as fh:
            for key, value in meta.items():
                fh.write(f"{key}={value}\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_tables(args: argparse.Namespace) -> int:
    try:
        reports = estimation.reproduce_table(args.which, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    meta = {
        "command": "tables",
        "which": str(args.which),
        "seed": str(args.seed),
        "x": "1.0",
        "beta0": "1.5",
        "level": "0.95",
        "n": "1000",
    }
    try:
        estimation.write_table(reports, args.out, meta)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _verify_legendre(seed: int) -> bool:
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(50):
        lam, mu = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 2))
        if lam < mu:
            lam, mu = mu, lam
        if lam == mu:
            continue
        p = RateParams(lam, mu)
        z = rng.uniform(1.0, 3.0 * (lam + mu) / (lam - mu))
        got = verification.numeric_legendre(
            lambda s: analytics.lambda_fn(s, p), analytics.s_boundary(p), z
        )
        err = abs(got - analytics.h_a(z, p))
        worst = max(worst, err)
        ok = ok and err <= 1e-6
    print(f"{'PASS' if ok else 'FAIL'} legendre/h_a: max |closed - numeric| = {worst:.3e}")
    # Case-B geometric instances: sup capped at s_hat
    worst_b = 0.0
    ok_b = True
    for _ in range(50):
        lam = float(np.exp(rng.uniform(np.log(1.0), np.log(10.0))))
        mu = lam / float(rng.uniform(2.0, 8.0))
        p = RateParams(lam, mu)
        alpha = rng.uniform(0.05, 1.0) * (1.0 - math.sqrt(mu / lam)) * 0.95
        s_m = Geometric(alpha).domain().s_sup
        sh = analytics.s_hat(p, s_m)
        z = rng.uniform(1.0, 3.0 * analytics.z_tilde(p, s_m))
        got = verification.numeric_legendre(lambda s: analytics.lambda_fn(s, p), sh, z)
        err = abs(got - analytics.h_b(z, p, s_m))
        worst_b = max(worst_b, err)
        ok_b = ok_b and err <= 1e-6
    print(f"{'PASS' if ok_b else 'FAIL'} legendre/h_b: max |closed - numeric| = {worst_b:.3e}")
    return ok and ok_b


def _verify_cgf_limit(seed: int) -> bool:
    del seed  # analytic check
    m = ShiftedPoisson(3.0)
    rep1 = verification.scaled_cgf_limit_check(0.02, m, RateParams(2.0, 1.0), "scaling1")
    rep2 = verification.scaled_cgf_limit_check(
        0.02, m, ScalingParams(2.0, 1.0, 1.0), "scaling2"
    )
    ok = True
    for rep in (rep1, rep2):
        gaps = rep.gaps()
        mono = all(a > b for a, b in zip(gaps, gaps[1:]))
        good = mono and gaps[-1] <= 1e-3 and -1.2 <= rep.slope <= -0.8
        ok = ok and good
        print(
            f"{'PASS' if good else 'FAIL'} cgf-limit {rep.mode}: "
            f"gap@max={gaps[-1]:.3e}, slope={rep.slope:.3f}"
        )
    return ok


def _verify_equal_dist(seed: int) -> bool:
    rep = verification.equal_distribution_check(
        2.0, 1.0, 1.0, 100.0, 10_000, seed, ShiftedPoisson(3.0)
    )
    ok = rep.p_value > 0.01
    print(f"{'PASS' if ok else 'FAIL'} equal-dist: KS={rep.statistic:.4f}, p={rep.p_value:.4f}")
    return ok


def _verify_normality(seed: int) -> bool:
    rep = verification.normality_check(
        ScalingParams(2.0, 5000.0, 1.0), ShiftedPoisson(3.0), 10_000, seed
    )
    ok = rep.p_value > 0.01
    print(f"{'PASS' if ok else 'FAIL'} normality: KS={rep.statistic:.4f}, p={rep.p_value:.4f}")
    return ok


def _verify_md_decay(seed: int) -> bool:
    rep = verification.md_decay_experiment(
        "scaling2",
        0.5,
        (0.5, 1.0, 1.5),
        (10.0, 100.0, 1000.0, 10000.0),
        20_000,
        seed,
        ScalingParams(2.0, 1.0, 1.0),
        ShiftedPoisson(3.0),
    )
    for cell in rep.cells:
        shown = "censored" if cell.censored else f"{cell.scaled_log_prob:.4f}"
        print(
            f"INFO md-decay scale={cell.scale:g} z={cell.threshold:g} "
            f"count={cell.count} eps*logP={shown} predicted={cell.predicted:.4f}"
        )
    print(f"INFO md-decay fitted slope at top scale: {rep.fitted_slope:.3f} (advisory)")
    return True


def _cmd_verify(args: argparse.Namespace) -> int:
    suites = {
        "legendre": (_verify_legendre, True),
        "cgf-limit": (_verify_cgf_limit, True),
        "equal-dist": (_verify_equal_dist, True),
        "normality": (_verify_normality, True),
        "md-decay": (_verify_md_decay, False),
    }
    names = list(suites) if args.suite == "all" else [args.suite]
    hard_fail = False
    for name in names:
        fn, hard = suites[name]
        passed = fn(args.seed)
        if hard and not passed:
            hard_fail = True
    return EXIT_VERIFY if hard_fail else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "simulate": _cmd_simulate,
        "rate": _cmd_rate,
        "tables": _cmd_tables,
        "verify": _cmd_verify,
    }
    return handlers[args.command](args)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
