"""Acceptance checks 1-13, shared by ``kloostermax selftest`` and the test suite.

Each check runs at its stated tolerance and returns a CriterionResult; a
failing check is reported, never relaxed.
"""

from __future__ import annotations

import contextlib
import io
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chirp import direct_dft
from .experiments import (
    SignPattern,
    detector_chain,
    equidist_matrix,
    max_moments,
    sign_pattern_search,
)
from .families import FamilySpec, batch_complete_sums, complete_sums, kloosterman, member_values
from .fejer import fejer_kernel, fourier_partial, snapped_prefix
from .incomplete import max_scan, prefix_profile
from .modular import MoebiusMap
from .selberg import check_pair, choose_L, delta_constant, selberg_pair

DETECTOR_PRIME = 100_003  # smallest prime above 10^5


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, title, fn) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)


# ---------------------------------------------------------------- 1-5


def _weil():
    t0 = time.perf_counter()
    ok, parts = True, []
    for p in (101, 1009, 10007):
        a = np.arange(1, p)
        for name, fam in (("Kl", FamilySpec.kloosterman_shift(1)), ("Bi", FamilySpec.birch_shift())):
            v = complete_sums(fam, a, p)
            worst = float(np.max(np.abs(v.real)))
            imag = float(np.max(np.abs(v.imag)))
            good = worst <= 2 + 1e-9 and imag <= 1e-9
            ok &= good
            parts.append(f"{name}@{p} max={worst:.6f}" + ("" if good else " VIOLATION"))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 30, "; ".join(parts)


def criterion_1():
    return _timed(1, "Weil bound", _weil)


def criterion_2():
    def run():
        p = 10007
        fam = FamilySpec.kloosterman_dilate()
        table = batch_complete_sums(fam, p)
        ys = np.random.default_rng(2).choice(p, size=100, replace=False)
        ref = direct_dft(member_values(fam, 1, p), ys) * fam.sign / math.sqrt(p)
        err = float(np.max(np.abs(ref - table.values[ys])))
        return err <= 1e-6, f"max deviation {err:.2e}"
    return _timed(2, "chirp DFT vs direct sums", run)


def criterion_3():
    def run():
        p = 10007
        rng = np.random.default_rng(3)
        worst = 0.0
        for a, b in rng.integers(1, p, size=(100, 2)):
            worst = max(worst, abs(kloosterman(int(a), int(b), p) - kloosterman(int(a) * int(b) % p, 1, p)))
        return worst <= 1e-9, f"max |Kl(a,b) - Kl(ab,1)| = {worst:.2e}"
    return _timed(3, "multiplicative collapse", run)


def criterion_4():
    def run():
        ok, parts = True, []
        for p in (101, 1009):
            for fam in (FamilySpec.kloosterman_dilate(), FamilySpec.birch_dilate()):
                a_values, M, _ = max_scan(fam, p)
                worst = 0.0
                for a, m in zip(a_values, M):
                    k = batch_complete_sums(fam, p, int(a)).sup_norm()
                    worst = max(worst, m / (k * math.log(3 * p)))
                ok &= worst <= 1
                parts.append(f"{fam.kind}@{p} max ratio {worst:.4f}")
        return ok, "; ".join(parts)
    return _timed(4, "Polya-Vinogradov", run)


def fourier_errors(p=1009, n_members=50, alphas=None, N_values=(16, 504), seed=5):
    """max over the alpha grid of |fourier_partial - prefix| for sampled members, per N."""
    fam = FamilySpec.kloosterman_dilate()
    alphas = [j / 21 for j in range(1, 21)] if alphas is None else alphas
    members = np.random.default_rng(seed).choice(np.arange(1, p), size=n_members, replace=False)
    out = {N: [] for N in N_values}
    for a in members:
        table = batch_complete_sums(fam, p, int(a))
        prefix = prefix_profile(fam, int(a), p, keep_prefix=True).full_prefix
        for N in N_values:
            out[N].append(max(abs(fourier_partial(table, al, N) - snapped_prefix(prefix, al)) for al in alphas))
    return {N: np.array(v) for N, v in out.items()}


def criterion_5():
    def run():
        p = 1009
        errs = fourier_errors(p)
        frac = float(np.mean(errs[16] > errs[504]))
        C = float(np.max(errs[504]) * 504 / (math.sqrt(p) * math.log(p)))
        return frac >= 0.95 and C <= 10, f"error(16) > error(504) for {frac:.0%}; fitted C = {C:.4f}"
    return _timed(5, "Fourier expansion", run)


# ---------------------------------------------------------------- 6-9


def criterion_6():
    def run():
        ok, parts = True, []
        grid = np.linspace(0.0, 1.0, 10_000)
        for N in (4, 64, 1024):
            at0 = fejer_kernel(N, 0.0) == N
            # the periodic trapezoid rule is exact for trigonometric polynomials of degree < nodes
            nodes = 4 * N
            integral = float(np.mean(fejer_kernel(N, np.arange(nodes) / nodes)))
            nonneg = bool(np.all(fejer_kernel(N, grid) >= 0))
            good = at0 and abs(integral - 1) <= 1e-9 and nonneg
            ok &= good
            parts.append(f"N={N}: |int-1|={abs(integral - 1):.1e}")
        return ok, "; ".join(parts)
    return _timed(6, "Fejer kernel", run)


def criterion_7():
    def run():
        ok, parts = True, []
        for L in (47, 151):
            for u, v in ((0.0, 0.25), (0.75, 1.0)):
                try:
                    a = check_pair(selberg_pair(u, v, L))
                except Exception as exc:  # construction aborts on a violated invariant
                    ok = False
                    parts.append(f"L={L} [{u},{v}] {exc}")
                    continue
                good = (a["alpha_min"] >= 0 - 1e-12 and a["alpha_max"] <= 1 + 1e-12
                        and a["sandwich_excess"] <= 1e-12 and a["cheb_max"] <= 1 + 1e-6
                        and a["cheb_tail"] <= 1e-9 and a["beta_l2_squared"] <= a["beta_l2_bound"])
                ok &= good
                parts.append(f"L={L} [{u},{v}] ok" if good else f"L={L} [{u},{v}] {a}")
        return ok, "; ".join(parts)
    return _timed(7, "Selberg minorants", run)


def criterion_8():
    def run():
        t0 = time.perf_counter()
        ok, parts = True, []
        for z in (1, 3, 5):
            r = delta_constant(z, 4, choose_L(z, 4), strict=False)
            ok &= r.holds
            parts.append(f"z={z} L={r.L} Delta={r.value:.4g} vs {r.bound:.4g}")
        return ok and time.perf_counter() - t0 < 60, "; ".join(parts)
    return _timed(8, "Delta lower bound", run)


def criterion_9():
    def run():
        p = 10007
        table = batch_complete_sums(FamilySpec.kloosterman_dilate(), p)
        rep = equidist_matrix(table, [MoebiusMap.identity(p)], 8, pairs=False)
        ratios = [abs(rep.single[0, n]) / (4 * (n + 1) ** 2) for n in range(1, 9)]
        return max(ratios) <= 1, f"max |sum U_n| / (4 (n+1)^2 sqrt p) = {max(ratios):.2e}"
    return _timed(9, "equidistribution", run)


# ---------------------------------------------------------------- 10-13


def criterion_10():
    def run():
        p = 10007
        table = batch_complete_sums(FamilySpec.kloosterman_dilate(), p)
        one = sign_pattern_search(table, SignPattern.dilations([1], p), with_maxima=False)
        two = sign_pattern_search(table, SignPattern.dilations([1, -1], p), with_maxima=False)
        ok = 0.045 <= one.density <= 0.182 and two.count > 0 and 0.00275 <= two.density <= 0.0248
        return ok, f"single {one.density:.5f}, pair {two.density:.5f} ({two.count} members)"
    return _timed(10, "sign search densities", run)


def criterion_11():
    def run():
        t0 = time.perf_counter()
        rep = detector_chain(DETECTOR_PRIME, 3)
        ok = bool(rep.rows) and rep.all_ok and time.perf_counter() - t0 < 300
        low = min((r[2] for r in rep.rows), default=float("nan"))
        return ok, f"p={rep.p}: {len(rep.rows)} members, min odd-harmonic bound {low:.4f} (target {rep.target:.4f})"
    return _timed(11, "detector chain", run)


def brute_force_maxima(p: int) -> np.ndarray:
    """M(t_a) for t_a(x) = e(a x^{-1}/p) from plain complex exponentials and cumulative sums."""
    x = np.arange(1, p)
    inv = np.array([pow(int(v), p - 2, p) for v in x])
    out = np.empty(p - 1)
    for i, a in enumerate(range(1, p)):
        t = np.zeros(p, dtype=np.complex128)
        t[1:] = np.exp(2j * np.pi * ((a * inv) % p) / p)
        S = np.concatenate([[0], np.cumsum(t)[:-1]]) / math.sqrt(p)
        out[i] = np.max(np.abs(S))
    return out


def criterion_12():
    def run():
        from .cli import main

        p, ks = 1009, [1, 2, 3]
        rep = max_moments(FamilySpec.kloosterman_dilate(), p, ks)
        M = brute_force_maxima(p)
        ref = [float(np.mean(M ** (2 * k))) for k in ks]
        rel = max(abs(m - r) / r for m, r in zip(rep.moments, ref))
        roots = rep.roots()
        mono = all(roots[i] <= roots[i + 1] for i in range(len(roots) - 1))
        with tempfile.TemporaryDirectory() as d:
            rc = main(["moments", "--p", str(p), "--k", "1,2,3", "--out", d, "--no-cache"])
            header = (Path(d) / "moments.csv").read_text().splitlines()[0] if rc == 0 else ""
        cols = all(c in header.split(",") for c in ("logk_curve", "loglogp_curve", "Pk_curve"))
        return rel <= 1e-6 and mono and cols, f"max rel. deviation {rel:.1e}; roots {[round(r, 4) for r in roots]}"
    return _timed(12, "moments", run)


def criterion_13():
    def run():
        from .cli import main

        runs = {
            "moments": (["moments", "--p", "1009", "--k", "1,2,3"], ["moments.csv"]),
            "signsearch": (["signsearch", "--p", "10007", "--n", "1,-1"], ["signsearch.csv", "signsearch.json"]),
        }
        ok, parts = True, []
        with tempfile.TemporaryDirectory() as d:
            for name, (argv, files) in runs.items():
                blobs = []
                for i, w in enumerate((1, 4, 1)):
                    out = Path(d) / f"{name}{i}"
                    with contextlib.redirect_stdout(io.StringIO()):
                        rc = main([*argv, "--workers", str(w), "--out", str(out), "--no-cache"])
                    if rc != 0:
                        return False, f"{name} run failed"
                    blobs.append(tuple((out / f).read_bytes() for f in files))
                same = all(b == blobs[0] for b in blobs)
                ok &= same
                parts.append(f"{name} {'identical' if same else 'DIFFERENT'}")
        return ok, "; ".join(parts)
    return _timed(13, "determinism", run)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13)


def run_all():
    return [c() for c in CRITERIA]
