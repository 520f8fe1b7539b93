"""Command-line front end.  Every command prints a RunReport (JSON or CSV).

Exit status: 0 success, 1 a check failed, 2 usage error, 3 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import asympt, checks, enumeration, partition, sampler, zetalib
from .report import Check, RunReport, check_in, check_le, check_lt

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _n_pair(args) -> tuple[int, int]:
    n1 = args.n1 if args.n1 is not None else args.n
    n2 = args.n2 if args.n2 is not None else args.n
    if n1 is None or n2 is None:
        raise ValueError("give --n or both --n1 and --n2")
    return n1, n2


def _need(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"{args.command} requires {', '.join(missing)}")


# -- commands -------------------------------------------------------------

def cmd_count(args) -> RunReport:
    n1, n2 = _n_pair(args)
    rep = RunReport("count", {"n1": n1, "n2": n2})
    cache = enumeration.CountCache(args.cache) if args.cache else None
    if cache and args.verify_cache:
        bad = cache.verify()
        rep.checks.append(check_le("cache records disagreeing with recomputation", len(bad), 0))
        rep.results["cache_mismatches"] = [{"key": list(k), "cached": c, "fresh": f} for k, c, f in bad]
    value = cache.get("p", n1, n2) if cache else None
    rep.results["from_cache"] = value is not None
    if value is None:
        value = enumeration.chain_count(n1, n2)
        if cache:
            cache.append("p", n1, n2, value)
    rep.results["p"] = value
    return rep


def cmd_polyomino_count(args) -> RunReport:
    _need(args, "n")
    rep = RunReport("polyomino-count", {"n": args.n})
    cache = enumeration.CountCache(args.cache) if args.cache else None
    if cache and args.verify_cache:
        bad = cache.verify()
        rep.checks.append(check_le("cache records disagreeing with recomputation", len(bad), 0))
    value = cache.get("ptilde", args.n, 0) if cache else None
    rep.results["from_cache"] = value is not None
    if value is None:
        value = enumeration.polyomino_counts(max(args.n, 1))[args.n]
        if cache:
            cache.append("ptilde", args.n, 0, value)
    rep.results["ptilde"] = value
    return rep


def cmd_calibrate(args) -> RunReport:
    _need(args, "n")
    c = partition.calibrate(args.n)
    kappa = zetalib.constants().kappa
    rep = RunReport("calibrate", {"n": args.n})
    rep.results = {
        "beta": c.beta,
        "mean_total": c.mean_total,
        "residual": c.residual,
        "variance_total": c.variance_total,
        "beta3_n_over_kappa": c.beta**3 * args.n / kappa,
    }
    rep.checks.append(check_le("|mean_total - 2n|", abs(c.residual), 1e-9 * 2 * args.n))
    return rep


def cmd_logz(args) -> RunReport:
    _need(args, "beta")
    tol = args.tol if args.tol is not None else partition.DEFAULT_TOL
    rep = RunReport("logz", {"beta": args.beta, "tol": tol, "zeros": args.zeros})
    rep.results["log_Z"] = partition.log_Z(args.beta, tol)
    rep.results["mean_total"] = partition.mean_total(args.beta, tol)
    rep.results["variance_total"] = partition.variance_total(args.beta, tol)
    if 1e-3 < args.beta <= 1.0:
        parts = checks.identity_residual(args.beta, args.zeros)
        rep.results["decomposition"] = parts
        rep.checks.append(check_le("log Z expansion residual", abs(parts["residual"]), 1e-5))
    return rep


def cmd_cumulant(args) -> RunReport:
    _need(args, "beta")
    tol = args.tol if args.tol is not None else partition.DEFAULT_TOL
    rep = RunReport("cumulant", {"k1": args.k1, "k2": args.k2, "beta": args.beta, "tol": tol})
    rep.results["value"] = partition.cumulant(args.k1, args.k2, args.beta, tol)
    return rep


def cmd_dirichlet(args) -> RunReport:
    s, M = args.s, args.M
    d1 = partition.dirichlet_check(s, M)
    d2 = partition.dirichlet_check(s, 2 * M)
    rep = RunReport("dirichlet", {"s": s, "M": M})
    rep.results = {
        "partial": d1.partial,
        "target": d1.target,
        "gap": d1.gap,
        "gap_bound": d1.gap_bound,
        "gap_2M": d2.gap,
        "gap_ratio": d2.gap / d1.gap if d1.gap else 0.0,
    }
    rep.checks = checks.dirichlet_checks(s, M)
    return rep


def cmd_ierr(args) -> RunReport:
    _need(args, "beta")
    r = partition.I_err(args.beta, with_imag=True)
    rep = RunReport("ierr", {"beta": args.beta})
    rep.results = {"value": r.value, "quad_error": r.quad_error, "tail_estimate": r.tail_bound, "imag_part": r.imag_residue}
    rep.checks.append(check_le("imaginary part of the symmetric integral", abs(r.imag_residue), 1e-10))
    return rep


def cmd_zeros(args) -> RunReport:
    rep = RunReport("zeros", {"height": args.height})
    if args.cache and Path(args.cache).exists():
        if args.verify_cache:
            try:
                zetalib.check_zero_cache(args.cache)
                mismatch = ""
            except ValueError as e:
                mismatch = str(e)
            rep.checks.append(Check("zero cache agrees with recomputation", not mismatch, mismatch or "ok", "no mismatch"))
        zs = [z for z in zetalib.read_zero_cache(args.cache) if z.gamma <= args.height]
        rep.results["from_cache"] = True
    else:
        zs = zetalib.find_zeta_zeros(args.height)
        if args.cache:
            zetalib.write_zero_cache(args.cache, zs)
        rep.results["from_cache"] = False
    rep.results["rows"] = [
        {"gamma": z.gamma, "zeta_prime_re": z.zeta_prime.real, "zeta_prime_im": z.zeta_prime.imag, "abs_zeta": abs(zetalib.zeta_complex(z.rho))}
        for z in zs
    ]
    if len(zs) >= 2:
        rep.checks.append(check_le("|gamma_1 - 14.1347|", abs(zs[0].gamma - checks.GAMMA1), 5e-4))
        rep.checks.append(check_le("|gamma_2 - 21.0220|", abs(zs[1].gamma - checks.GAMMA2), 5e-4))
    return rep


def cmd_icrit(args) -> RunReport:
    _need(args, "beta")
    zs = asympt.i_crit_zero_sum(args.beta, args.zeros)
    one = asympt.i_crit_zero_sum(args.beta, 1).value
    two = asympt.i_crit_two_term(args.beta)
    rel = abs(two - one) / abs(one)
    rep = RunReport("icrit", {"beta": args.beta, "zeros": args.zeros})
    rep.results = {"zero_sum": zs.value, "last_term": zs.last_term, "terms": list(zs.terms), "first_pair": one, "two_term": two, "relative_difference": rel}
    rep.checks.append(check_le("two-term vs first zero pair (relative)", rel, 5e-3))
    return rep


def _estimate_results(est: asympt.AsymptoticEstimate) -> dict:
    mant, exp10 = est.value
    return {
        "log_value": est.log_value,
        "log10_value": est.log10_value,
        "mantissa": mant,
        "exponent10": exp10,
        "main_exponent": est.main_exponent,
        "icrit_term": est.icrit_term,
        "log_prefactor": est.log_prefactor,
    }


def cmd_estimate(args) -> RunReport:
    _need(args, "n")
    K = args.zeros or None
    est = asympt.estimate_p(args.n, K)
    rep = RunReport("estimate", {"n": args.n, "zeros": args.zeros})
    rep.results = _estimate_results(est)
    if args.exact:
        exact = enumeration.chain_count(args.n)
        rep.results["exact"] = exact
        rep.results["ratio"] = est.ratio(exact)
        if args.n == 100:
            rep.checks.append(check_in("estimate_p(100)", math.exp(est.log_value), 2.2e22, 2.6e22))
            rep.checks.append(check_in("p(100) / estimate_p(100)", rep.results["ratio"], 1.05, 1.20))
    return rep


def cmd_estimate_polyomino(args) -> RunReport:
    _need(args, "n")
    K = args.zeros or None
    est = asympt.estimate_polyomino(args.n, K)
    exact = enumeration.polyomino_counts(args.n)[args.n]
    rep = RunReport("estimate-polyomino", {"n": args.n, "zeros": args.zeros, "compare_n": args.compare_n})
    rep.results = _estimate_results(est)
    rep.results["exact"] = exact
    rep.results["ratio"] = ratio = est.ratio(exact)
    rep.checks.append(check_in(f"exact / estimate at n={args.n}", ratio, 0.8, 1.25))
    if args.compare_n:
        ref = asympt.estimate_polyomino(args.compare_n, K).ratio(enumeration.polyomino_counts(args.compare_n)[args.compare_n])
        rep.results["compare_ratio"] = ref
        rep.checks.append(check_lt(f"|ratio - 1| at n={args.n} vs n={args.compare_n}", abs(ratio - 1), abs(ref - 1)))
    return rep


def cmd_rh_gap(args) -> RunReport:
    _need(args, "n")
    rows = asympt.rh_gap(args.n, args.zeros)
    rep = RunReport("rh-gap", {"n": args.n, "zeros": args.zeros})
    rep.results["rows"] = [{"n": r.n, "gap": r.gap, "residual": r.residual} for r in rows]
    return rep


def cmd_sample(args) -> RunReport:
    if args.beta is None and args.n is None:
        raise ValueError("sample requires --beta or --n")
    beta = args.beta if args.beta is not None else partition.calibrate(args.n).beta
    target = (args.n, args.n) if args.n is not None else None
    st = sampler.endpoint_stats(beta, args.samples, args.seed, target=target, cutoff=args.cutoff, threads=args.threads)
    rep = RunReport("sample", {"n": args.n, "beta": beta, "samples": args.samples, "seed": args.seed, "cutoff": args.cutoff})
    rep.results = {
        "mean": st.mean,
        "cov": st.cov,
        "model_cov": partition.hessian(beta),
        "truncation_tv_bound": st.tv_bound,
    }
    if target is not None:
        n = args.n
        sd_mean = math.sqrt(partition.cumulant(2, 0, beta) / args.samples)
        p = checks.exact_hit_probability(n, beta)
        sd_hits = math.sqrt(args.samples * p * (1 - p))
        rep.results.update(hit_count=st.hit_count, hit_expected=args.samples * p, hit_probability=p)
        rep.checks.append(check_le(f"|mean X1 - {n}| in sigma units", abs(st.mean[0] - n) / sd_mean, 3.0))
        rep.checks.append(check_le(f"|hits - expected| at ({n},{n}) in binomial sigma units", abs(st.hit_count - args.samples * p) / sd_hits, 3.0))
    return rep


def _write_chain(chain, path: str) -> None:
    if path.lower().endswith(".svg"):
        sampler.write_chain_svg(chain, path)
    else:
        sampler.write_chain_csv(chain, path)


def cmd_sample_conditioned(args) -> RunReport:
    _need(args, "n")
    rep = RunReport("sample-conditioned", {"n": args.n, "seed": args.seed, "max_draws": args.max_draws})
    try:
        run = sampler.sample_conditioned_many(args.n, 1, args.max_draws, args.seed, cutoff=args.cutoff)
    except sampler.SamplerExhausted as e:
        rep.results = {"draws": e.draws, "expected_acceptance_rate": e.expected_rate}
        rep.checks.append(check_le("conditioned samples missing", 1, 0))
        return rep
    chain = run.chains[0]
    rep.results = {
        "beta": run.beta,
        "draws": run.draws,
        "vertices": [list(v) for v in chain.vertices],
        "deviation": sampler.limit_shape_deviation(chain),
    }
    if args.out:
        _write_chain(chain, args.out)
        rep.results["written"] = args.out
    return rep


def cmd_limit_shape(args) -> RunReport:
    _need(args, "n")
    rep = RunReport("limit-shape", {"n": args.n, "samples": args.samples, "seed": args.seed, "compare_n": args.compare_n})
    run = sampler.sample_conditioned_many(args.n, args.samples, args.max_draws, args.seed, cutoff=args.cutoff)
    devs = [sampler.limit_shape_deviation(c) for c in run.chains]
    rep.results = {"median_deviation": _median(devs), "draws": run.draws}
    if args.compare_n:
        ref = sampler.sample_conditioned_many(args.compare_n, args.samples, args.max_draws, args.seed + 1, cutoff=args.cutoff)
        ref_med = _median([sampler.limit_shape_deviation(c) for c in ref.chains])
        rep.results["compare_median_deviation"] = ref_med
        rep.checks.append(check_lt(f"median deviation n={args.n} < n={args.compare_n}", rep.results["median_deviation"], ref_med))
    if args.out:
        _write_chain(run.chains[0], args.out)
        rep.results["written"] = args.out
    return rep


def _median(xs: list[float]) -> float:
    s = sorted(xs)
    k = len(s) // 2
    return s[k] if len(s) % 2 else 0.5 * (s[k - 1] + s[k])


def cmd_verify(args) -> RunReport:
    names = list(checks.SUITES) if args.suite == "all" else [args.suite]
    rep = RunReport("verify", {"suite": args.suite, "seed": args.seed, "samples": args.samples})
    for name in names:
        kw = {}
        if name == "montecarlo":
            kw = {"samples": args.samples, "seed": args.seed, "threads": args.threads}
        rep.checks.extend(checks.SUITES[name](**kw))
    rep.results["checks_run"] = len(rep.checks)
    rep.results["failures"] = sum(not c.passed for c in rep.checks)
    return rep


COMMANDS = {
    "count": (cmd_count, "exact number of convex chains from (0,0) to (n1,n2)"),
    "polyomino-count": (cmd_polyomino_count, "exact number of polyomino paths of total length n"),
    "calibrate": (cmd_calibrate, "solve E[X1+X2] = 2n for beta"),
    "logz": (cmd_logz, "log Z(beta) with its zeta-zero decomposition"),
    "cumulant": (cmd_cumulant, "mixed partial derivative of log Z at (beta, beta)"),
    "dirichlet": (cmd_dirichlet, "line-weight Dirichlet series against its zeta closed form"),
    "ierr": (cmd_ierr, "remainder integral along Re s = -1/2"),
    "zeros": (cmd_zeros, "nontrivial zeta zeros up to a height"),
    "icrit": (cmd_icrit, "oscillatory zero-sum term at beta"),
    "estimate": (cmd_estimate, "asymptotic estimate of p(n)"),
    "estimate-polyomino": (cmd_estimate_polyomino, "asymptotic estimate of the polyomino count"),
    "rh-gap": (cmd_rh_gap, "log p(n) minus the main term, with model residual"),
    "sample": (cmd_sample, "Boltzmann endpoint statistics"),
    "sample-conditioned": (cmd_sample_conditioned, "one uniform chain ending at (n, n)"),
    "limit-shape": (cmd_limit_shape, "median distance of conditioned samples to the limit curve"),
    "verify": (cmd_verify, "run a bundled verification suite"),
}

EPILOG = """acceptance checks:
  count --n 100                                   exact p(100)
  verify --suite oracle                           brute-force equivalences
  estimate --n 100 --zeros 2 --exact              estimate and exact/estimate ratio
  verify --suite identities                       log Z decomposition at four betas
  zeros --height 30                               first two zero ordinates
  icrit --beta 0.05                               two-term vs zero-sum (repeat per beta)
  dirichlet --s 3 --M 100000                      Dirichlet gap and its halving
  calibrate --n 10000                             calibration residual, beta^3 n / kappa
  verify --suite paper                            reference anchors and local limit ratios (slow)
  sample --n 30 --samples 200000 --seed 2024      sampler mean and hit frequency
  estimate-polyomino --n 2000 --compare-n 200     polyomino ratio trend
  limit-shape --n 60 --compare-n 15 --samples 100 --seed 11
"""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="size (endpoint (n, n) or total length n)")
    common.add_argument("--n1", type=int, help="endpoint x coordinate")
    common.add_argument("--n2", type=int, help="endpoint y coordinate")
    common.add_argument("--beta", type=float, help="Boltzmann parameter")
    common.add_argument("--zeros", type=int, default=asympt.DEFAULT_ZEROS, metavar="K", help="number of zero pairs (0 drops the term where allowed)")
    common.add_argument("--samples", type=int, default=200_000, help="number of draws or samples")
    common.add_argument("--seed", type=int, default=2024, help="RNG seed")
    common.add_argument("--tol", type=float, help="truncation tolerance")
    common.add_argument("--cutoff", type=float, default=sampler.DEFAULT_CUTOFF, help="sampler keeps vectors with beta*(v1+v2) <= cutoff")
    common.add_argument("--out", metavar="PATH", help="side file (.svg or .csv chain export)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache", metavar="PATH", help="count or zero cache file")
    common.add_argument("--verify-cache", action="store_true", help="recompute cached entries before use")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp field")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")

    parser = argparse.ArgumentParser(
        prog="convexchains",
        description="Exact counts, Boltzmann model and zeta-zero asymptotics for lattice convex chains.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parsers = {name: sub.add_parser(name, parents=[common], help=text, description=text) for name, (_, text) in COMMANDS.items()}
    parsers["cumulant"].add_argument("--k1", type=int, default=2)
    parsers["cumulant"].add_argument("--k2", type=int, default=0)
    parsers["dirichlet"].add_argument("--s", type=_complex, default=3 + 0j, help="complex point, e.g. 3 or 2.5+4j")
    parsers["dirichlet"].add_argument("--M", type=int, default=100_000, help="truncation level")
    parsers["zeros"].add_argument("--height", type=float, default=30.0, help="largest ordinate (<= 60)")
    parsers["estimate"].add_argument("--exact", action="store_true", help="also compute p(n) and the ratio")
    for name in ("estimate-polyomino", "limit-shape"):
        parsers[name].add_argument("--compare-n", type=int, help="reference size for the trend check")
    for name in ("sample-conditioned", "limit-shape"):
        parsers[name].add_argument("--max-draws", type=int, default=10**8)
    parsers["verify"].add_argument("--suite", choices=(*checks.SUITES, "all"), default="all")
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        rep = COMMANDS[args.command][0](args)
    except enumeration.ResourceBudgetError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = rep.to_csv() if args.format == "csv" else rep.to_json(args.deterministic) + "\n"
    stdout.write(text)
    return EXIT_OK if rep.ok else EXIT_CHECK


def main() -> None:
    sys.exit(run())
