"""Command-line front end.  Exit status: 0 success, 1 domain error, 2 numerical-integrity error."""

from __future__ import annotations

import argparse
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .cache import TableStore
from .errors import DomainError, NumericalIntegrityError
from .experiments import (
    MOMENT_COLUMNS,
    SignPattern,
    block_bound_shape,
    block_moment,
    equidist_matrix,
    max_moments,
    maxima_for,
    sign_pattern_search,
    tail_distribution,
)
from .families import FamilySpec, complete_sum
from .fejer import estimator_lower_bound
from .incomplete import max_scan, prefix_profile, pv_ratio, short_sum_extremum
from .modular import MoebiusMap, check_prime
from .report import RunManifest, write_csv, write_json
from .selberg import check_pair, choose_L, delta_constant, gamma_intervals, selberg_pair

FAMILIES = ("kloosterman", "kloosterman-dilate", "kloosterman-curve", "birch", "birch-dilate",
            "birch-curve", "laurent")

TOLERANCES = {
    "weil_slack": 1e-9,
    "real_tol": 1e-9,
    "table_accuracy": 1e-5,
    "sato_tate_quadrature": 1e-9,
    "selberg_grid": 1e-12,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _laurent_terms(text: str):
    """'3:1,-1:2' -> ((3, 1), (-1, 2)) meaning x^3 + 2 x^{-1}."""
    out = []
    for item in text.split(","):
        e, c = item.split(":")
        out.append((int(e), int(c)))
    return tuple(out)


def family_from_args(args) -> FamilySpec:
    sign = args.sign
    name = args.family
    if name == "kloosterman":
        return FamilySpec.kloosterman_shift(args.b, sign)
    if name == "kloosterman-dilate":
        return FamilySpec.kloosterman_dilate(sign)
    if name == "kloosterman-curve":
        return FamilySpec.kloosterman_curve(args.m, sign)
    if name == "birch":
        return FamilySpec.birch_shift(sign)
    if name == "birch-dilate":
        return FamilySpec.birch_dilate(sign)
    if name == "birch-curve":
        return FamilySpec.birch_curve(args.m, sign)
    if not args.terms:
        raise DomainError("laurent family needs --terms, e.g. 3:1,-1:2")
    return FamilySpec.laurent(_laurent_terms(args.terms), sign)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kloostermax", description="Maxima of incomplete Kloosterman and Birch sums.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, family=True, default_family="kloosterman-dilate"):
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--out", type=Path, default=Path("kloostermax_out"))
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--cache-dir", type=Path, default=None)
        if family:
            sp.add_argument("--family", choices=FAMILIES, default=default_family)
            sp.add_argument("--sign", choices=("minus", "plus"), default="minus")
            sp.add_argument("--b", type=int, default=1)
            sp.add_argument("--m", type=int, default=1)
            sp.add_argument("--terms", default=None)

    sp = sub.add_parser("sum", help="one complete sum")
    common(sp, default_family="kloosterman")
    sp.add_argument("--a", type=int, required=True)

    sp = sub.add_parser("table", help="Fourier table of one member")
    common(sp)
    sp.add_argument("--a", type=int, default=None)

    sp = sub.add_parser("maxscan", help="M(t_a) and argmax H")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--a", type=_int_list)

    sp = sub.add_parser("shortscan", help="extremal short sums of length H")
    common(sp)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--H", type=_int_list, required=True)

    sp = sub.add_parser("estimator", help="Fejer lower bound against M")
    common(sp)
    sp.add_argument("--a", type=_int_list, required=True)

    sp = sub.add_parser("selberg", help="minorant audit and the constant term")
    sp.add_argument("--z", type=int, required=True)
    sp.add_argument("--gamma", type=int, default=4)
    sp.add_argument("--L", type=int, default=None)
    sp.add_argument("--no-strict", action="store_true", help="report a bound violation instead of failing")
    sp.add_argument("--out", type=Path, default=Path("kloostermax_out"))

    sp = sub.add_parser("signsearch", help="detector-set search over a")
    common(sp, family=False)
    sp.add_argument("--n", type=_int_list, default=None, help="dilation harmonics, e.g. 1,-1")
    sp.add_argument("--z", type=int, default=None, help="use n = +-1, +-3, ..., +-z")
    sp.add_argument("--threshold", type=float, default=math.sqrt(2))

    sp = sub.add_parser("moments", help="moments of M(t_a)")
    common(sp)
    sp.add_argument("--k", type=_int_list, default=[1, 2, 3])
    sp.add_argument("--sample", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("tails", help="fractions of a with M(t_a) > A")
    common(sp)
    sp.add_argument("--A", type=_float_list, default=[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    sp.add_argument("--sample", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("equidist", help="Chebyshev sums of transformed tables")
    common(sp)
    sp.add_argument("--dilations", type=_int_list, default=[1, 2])
    sp.add_argument("--dmax", type=int, default=8)

    sp = sub.add_parser("blockmoment", help="moments of sums over alpha p < x <= beta p")
    common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--k", type=int, default=1)

    sub.add_parser("selftest", help="run the acceptance checks")
    return parser


# ---------------------------------------------------------------- commands


def cmd_sum(args, ctx):
    fam = family_from_args(args)
    v = complete_sum(fam, args.a, args.p)
    if isinstance(v, complex):
        print(f"{v.real:.6f} {v.imag:+.6f}i")
        ctx.artifacts.append(write_json(args.out / "sum.json", {"a": args.a, "re": v.real, "im": v.imag}))
    else:
        print(f"{v:.6f}")
        ctx.artifacts.append(write_json(args.out / "sum.json", {"a": args.a, "value": v}))


def cmd_table(args, ctx):
    fam = family_from_args(args)
    t = ctx.store.get(fam, args.p, args.a)
    rows = ((y, complex(v).real, complex(v).imag) for y, v in enumerate(t.values))
    ctx.artifacts.append(write_csv(args.out / "table.csv", ("y", "re", "im"), rows))
    print(f"table of {fam.descriptor()} member {t.member}: sup norm {t.sup_norm():.6f}")


def cmd_maxscan(args, ctx):
    fam = family_from_args(args)
    a_values, M, H = max_scan(fam, args.p, None if args.all else args.a, workers=args.workers)
    ctx.artifacts.append(write_csv(args.out / "maxscan.csv", ("a", "M", "argmax_H"), zip(a_values, M, H)))
    print(f"{len(a_values)} rows, max M = {float(M.max()):.6f}")


def cmd_shortscan(args, ctx):
    fam = family_from_args(args)
    rows = []
    for H in args.H:
        r = short_sum_extremum(fam, args.a, args.p, H)
        rows.append((r.H, r.value, r.argmax_N, r.reference[0.05], r.reference[0.1], r.envelope))
    header = ("H", "max_abs_sum", "argmax_N", "H_pow_0.95", "H_pow_0.9", "envelope")
    ctx.artifacts.append(write_csv(args.out / "shortscan.csv", header, rows))


def cmd_estimator(args, ctx):
    fam = family_from_args(args)
    rows = []
    for a in args.a:
        t = ctx.store.get(fam, args.p, a)
        prof = prefix_profile(fam, a, args.p)
        est = estimator_lower_bound(t)
        rows.append((t.member, prof.M, est.value, est.best_alpha, est.best_N, pv_ratio(prof, t)))
    header = ("a", "M", "estimator", "best_alpha", "best_N", "pv_ratio")
    ctx.artifacts.append(write_csv(args.out / "estimator.csv", header, rows))


def cmd_selberg(args, ctx):
    L = args.L if args.L is not None else choose_L(args.z, args.gamma)
    pairs = {}
    for name, (u, v) in zip(("plus", "minus"), gamma_intervals(args.gamma)):
        pairs[name] = {"u": u, "v": v, **check_pair(selberg_pair(u, v, L))}
    res = delta_constant(args.z, args.gamma, L, strict=False)
    out = {
        "z": args.z, "gamma": args.gamma, "L": L, "pairs": pairs,
        "delta": res.value, "bound": res.bound, "holds": res.holds,
        "I_plus": res.I_plus, "I_minus": res.I_minus,
        "beta_plus": res.beta_plus, "beta_minus": res.beta_minus, "beta_flag": res.beta_flag,
        "indicator_measure": res.indicator_measure, "corrected_bound": res.corrected_bound,
    }
    ctx.artifacts.append(write_json(args.out / "selberg.json", out))
    print(f"L={L} Delta={res.value:.6g} bound={res.bound:.6g} holds={res.holds}")
    if not args.no_strict:
        delta_constant(args.z, args.gamma, L, strict=True)


def cmd_signsearch(args, ctx):
    p = check_prime(args.p)
    if args.z is not None:
        pattern = SignPattern.odd_harmonics(args.z, p)
    else:
        pattern = SignPattern.dilations(args.n or [1], p, args.threshold)
    if args.threshold != math.sqrt(2):
        pattern = SignPattern(pattern.conditions, args.threshold, pattern.harmonics)
    fam = FamilySpec.kloosterman_dilate()
    ctx.family = fam.descriptor()
    table = ctx.store.get(fam, p)
    rep = sign_pattern_search(table, pattern, workers=args.workers)
    ctx.artifacts.append(write_json(args.out / "signsearch.json", rep.to_dict()))
    rows = ((a, rep.maxima.get(a), rep.harmonic_bounds.get(a)) for a in rep.members)
    ctx.artifacts.append(write_csv(args.out / "signsearch.csv", ("a", "M", "odd_harmonic_bound"), rows))
    print(f"{rep.count} members, density {rep.density:.6f} (predicted {rep.predicted_density:.6f})")


def cmd_moments(args, ctx):
    fam = family_from_args(args)
    rep = max_moments(fam, args.p, args.k, args.sample, args.seed, args.workers)
    ctx.seed = rep.seed
    ctx.artifacts.append(write_csv(args.out / "moments.csv", MOMENT_COLUMNS, rep.rows()))


def cmd_tails(args, ctx):
    fam = family_from_args(args)
    _, M, sampled = maxima_for(fam, args.p, args.sample, args.seed, args.workers)
    ctx.seed = args.seed if sampled else None
    rows = tail_distribution(fam, args.p, args.A, maxima=M)
    ctx.artifacts.append(write_csv(args.out / "tails.csv", ("A", "fraction"), rows))


def cmd_equidist(args, ctx):
    fam = family_from_args(args)
    table = ctx.store.get(fam, args.p)
    maps = [MoebiusMap.dilation(n, args.p) for n in args.dilations]
    rep = equidist_matrix(table, maps, args.dmax)
    out = rep.to_dict()
    out["dilations"] = args.dilations
    ctx.artifacts.append(write_json(args.out / "equidist.json", out))


def cmd_blockmoment(args, ctx):
    fam = family_from_args(args)
    v = block_moment(fam, args.p, args.alpha, args.beta, args.k, args.workers)
    shape = block_bound_shape(args.p, args.alpha, args.beta, args.k)
    header = ("p", "alpha", "beta", "k", "moment", "bound_shape")
    ctx.artifacts.append(write_csv(args.out / "blockmoment.csv", header,
                                   [(args.p, args.alpha, args.beta, args.k, v, shape)]))
    print(f"{v:.10g}")


def cmd_selftest(args, ctx):
    from .acceptance import run_all

    results = run_all()
    for r in results:
        print(r.line())
    if not all(r.passed for r in results):
        raise NumericalIntegrityError(f"{sum(not r.passed for r in results)} acceptance criteria failed")


COMMANDS = {
    "sum": cmd_sum,
    "table": cmd_table,
    "maxscan": cmd_maxscan,
    "shortscan": cmd_shortscan,
    "estimator": cmd_estimator,
    "selberg": cmd_selberg,
    "signsearch": cmd_signsearch,
    "moments": cmd_moments,
    "tails": cmd_tails,
    "equidist": cmd_equidist,
    "blockmoment": cmd_blockmoment,
    "selftest": cmd_selftest,
}


class _Context:
    def __init__(self, args):
        self.store = TableStore(getattr(args, "cache_dir", None), not getattr(args, "no_cache", True))
        self.artifacts = []
        self.seed = None
        self.family = None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "p", None) is not None:
            check_prime(args.p)
        ctx = _Context(args)
        if hasattr(args, "family"):
            ctx.family = family_from_args(args).descriptor()
        COMMANDS[args.command](args, ctx)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalIntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if hasattr(args, "out") and args.command != "selftest":
        manifest = RunManifest(
            version=__version__,
            command=["kloostermax", *argv],
            p=getattr(args, "p", None),
            family=ctx.family,
            seed=ctx.seed,
            timestamp=datetime.now(timezone.utc).isoformat(),
            wall_time=time.perf_counter() - start,
            tolerances=dict(TOLERANCES),
            cache_hits=ctx.store.hits,
            artifacts=[p.name for p in ctx.artifacts],
        )
        manifest.write(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
