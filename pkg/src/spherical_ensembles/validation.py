"""Acceptance checks: every closed form cross-validated against an independent route.

Each check returns a :class:`CheckResult`. ``run_all`` runs them in order;
``quick=True`` shrinks the Monte Carlo sizes and loosens the Monte Carlo
thresholds accordingly (see ``QUICK_SIZES``). Deterministic checks are the
same in both modes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import analytic, exactseries, stats
from .eigen import eigenvalues, eigenvalues_many
from .ensembles import RngState, sample_batch
from .matrix import Beta, EnsembleSpec, frobenius_norm, frobenius_norm_sq
from .oracles import eigenvalues_bruteforce

BASE_SEED = 20240917

FULL_SIZES = {
    "variance_mc": 5000,
    "arcsine_matrices": 50_000,
    "arcsine_ks": 0.01,
    "identity_mc": 10**6,
    "gue_mc": 10_000,
    "normalizer_mc": 10**7,
    "spacing_matrices": 500,
    "spacing_ks": 0.05,
    "eigen_random": 1000,
    "eigen_brute": 5,
}

# reduced sizes; KS thresholds scale roughly like 1/sqrt(sample size)
QUICK_SIZES = {
    "variance_mc": 1000,
    "arcsine_matrices": 10_000,
    "arcsine_ks": 0.025,
    "identity_mc": 10**5,
    "gue_mc": 2000,
    "normalizer_mc": 10**6,
    "spacing_matrices": 150,
    "spacing_ks": 0.08,
    "eigen_random": 100,
    "eigen_brute": 2,
}


@dataclass(frozen=True)
class CheckResult:
    number: str
    name: str
    passed: bool
    detail: str
    seconds: float
    limit_seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  [{self.number}] {self.name}: {self.detail} ({self.seconds:.2f}s / limit {self.limit_seconds:g}s)"


def _rng(check: int, stream: int = 0) -> RngState:
    return RngState(BASE_SEED + check, stream)


def _spectra(spec: EnsembleSpec, count: int, rng: RngState, chunk: int = 2048):
    return eigenvalues_many(sample_batch(spec, count, rng), chunk=chunk)


# --------------------------------------------------------------------------
# individual checks; each returns (passed, detail)


def check_variance_identity(sizes: dict) -> tuple[bool, str]:
    bad = [n for n in range(2, 17) if exactseries.moment_sue(2, n, n) != 1]
    bad += [f"beta={b},N={n}" for b in (1, 2, 4) for n in range(2, 17)
            if exactseries.spherical_factor(2, b, n, n, n) * exactseries.moment_gaussian_second(b, n, n) != 1]
    parts = [f"exact m2=1 for N=2..16 ({'ok' if not bad else bad})"]
    ok = not bad
    for beta, stream in ((1, 0), (4, 1)):
        spec = EnsembleSpec.spherical(beta, 8, r_squared=8)
        mom = stats.empirical_moments(_spectra(spec, sizes["variance_mc"], _rng(1, stream)), 2)
        # (1/N) sum lambda^2 = r^2/N on every draw, so se is at rounding level
        tol = max(3 * mom.se[2], 1e-12)
        err = abs(mom.m[2] - 1.0)
        ok &= err <= tol
        parts.append(f"beta={beta} MC |m2-1|={err:.1e} (tol {tol:.1e})")
    return ok, "; ".join(parts)


def check_arcsine(sizes: dict) -> tuple[bool, str]:
    model = analytic.build_density_model(2, math.sqrt(2.0))
    exact_ok = (model.p == analytic.RationalPolynomial([1]) and model.pi_factor == -1
                and model.exponent == Fraction(-1, 2))
    spec = EnsembleSpec.spherical(2, 2, r_squared=2)
    spectra = _spectra(spec, sizes["arcsine_matrices"], _rng(2), chunk=4096)
    lam = np.concatenate([s.values for s in spectra])
    ks = stats.ks_distance(lam, lambda x: analytic.arcsine_cdf(x, math.sqrt(2.0)))
    ok = exact_ok and ks < sizes["arcsine_ks"]
    return ok, f"p_2 = 1/pi, exponent -1/2: {exact_ok}; KS({lam.size} eigenvalues, arcsine) = {ks:.4f} < {sizes['arcsine_ks']}"


def check_density_moments(sizes: dict) -> tuple[bool, str]:
    worst_norm = 0.0
    worst_mom = 0.0
    for n in range(2, 9):
        model = analytic.build_density_model(n, math.sqrt(n))
        worst_norm = max(worst_norm, abs(analytic.integrate_density(model) - 1.0))
        for k in (2, 4, 6, 8):
            exact = float(exactseries.moment_sue(k, n, n))
            worst_mom = max(worst_mom, abs(analytic.density_moment(model, k) - exact))
    ok = worst_norm <= 1e-10 and worst_mom <= 1e-9
    return ok, f"max |int f - 1| = {worst_norm:.1e} (tol 1e-10); max moment error k=2..8 = {worst_mom:.1e} (tol 1e-9)"


def check_char_fn_duality(sizes: dict) -> tuple[bool, str]:
    worst_inv = 0.0
    worst_forms = 0.0
    ts = np.linspace(0.1, 20.0, 200)
    for n in (2, 3, 4):
        r = math.sqrt(n)
        cf = analytic.build_char_fn_model(n, r)
        dm = analytic.build_density_model(n, r)
        for u in (0.0, 0.5, -0.5, 0.9, -0.9):
            x = u * r
            worst_inv = max(worst_inv, abs(analytic.density_from_char_fn(cf, x) - analytic.eval_density(dm, x)))
        for t in ts:
            worst_forms = max(worst_forms, abs(analytic.char_fn_hyp(cf, t) - analytic.char_fn_bessel(cf, t)))
    ok = worst_inv <= 1e-6 and worst_forms <= 1e-9
    return ok, f"max inversion error = {worst_inv:.1e} (tol 1e-6); max |Bessel - 0F1| on [0.1, 20] = {worst_forms:.1e} (tol 1e-9)"


def check_n1_char_fn(sizes: dict) -> tuple[bool, str]:
    r = 3.0
    cf = analytic.build_char_fn_model(1, r)
    ts = np.linspace(-7.0, 11.0, 10)
    err = max(abs(analytic.char_fn(cf, t) - math.cos(r * t)) for t in ts)
    return err <= 1e-10, f"max |phi - cos(rt)| at 10 points = {err:.1e} (tol 1e-10)"


def check_fourier_pair(sizes: dict) -> tuple[bool, str]:
    worst = 0.0
    for alpha in (1.5, 2.5, 4.0):
        for x in (0.0, 0.3, 0.9):
            lhs, rhs = analytic.fourier_pair_check(alpha, x)
            worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-6, f"max |lhs - rhs| over 9 pairs = {worst:.1e} (tol 1e-6)"


LEMMA_B = np.diag([1.0, 2.0, 3.0])


def _lemma_g(x: np.ndarray) -> np.ndarray:
    return x[:, 0] ** 2 * x[:, 1] ** 2


def check_gaussian_identity(sizes: dict) -> tuple[bool, str]:
    k, alpha = 4, 2.0
    grid = stats.homogeneous_identity_grid(_lemma_g, k, LEMMA_B, alpha)
    gen = _rng(7).generator()
    mc = stats.homogeneous_identity_mc(_lemma_g, k, LEMMA_B, alpha, sizes["identity_mc"], gen)
    # independent closed form of the right side: E[x1^2 x2^2] = s1^2 s2^2 with s_i^2 = 2/(alpha b_i)
    var = 2.0 / (alpha * np.diag(LEMMA_B))
    z = (2 * math.pi) ** 1.5 * math.sqrt(float(np.prod(var)))
    rhs_exact = z * grid.factor * var[0] * var[1]
    grid_ok = abs(grid.diff) <= 1e-4 and abs(grid.rhs - rhs_exact) <= 1e-4
    mc_ok = abs(mc.diff) <= 3 * mc.diff_se and abs(mc.lhs - rhs_exact) <= 3 * mc.lhs_se
    return grid_ok and mc_ok, (
        f"grid lhs-rhs = {grid.diff:.1e}, grid rhs - closed form = {grid.rhs - rhs_exact:.1e} (tol 1e-4); "
        f"MC lhs-rhs = {mc.diff:.2e} ({abs(mc.diff) / mc.diff_se:.2f} SE), MC lhs vs closed form {abs(mc.lhs - rhs_exact) / mc.lhs_se:.2f} SE"
    )


def check_harer_zagier(sizes: dict) -> tuple[bool, str]:
    seeds_ok = all(exactseries.harer_zagier_c(ell, 1) == 1 for ell in range(21)) and all(
        exactseries.harer_zagier_c(0, n) == n for n in range(1, 21))
    spec = EnsembleSpec.gaussian(2, 8, q=8)
    mom = stats.empirical_moments(_spectra(spec, sizes["gue_mc"], _rng(8)), 6)
    parts = [f"c(l,1)=1, c(0,N)=N for l,N<=20: {seeds_ok}"]
    ok = seeds_ok
    for k in (2, 4, 6):
        exact = float(exactseries.moment_gue(k, 8, 8))
        z = abs(mom.m[k] - exact) / mom.se[k]
        ok &= z <= 3
        parts.append(f"k={k}: {z:.2f} SE")
    return ok, "; ".join(parts)


def check_semicircle(sizes: dict) -> tuple[bool, str]:
    dims = (4, 6, 8, 12, 16)
    l1 = [analytic.l1_to_semicircle(analytic.build_density_model(n, math.sqrt(n))) for n in dims]
    decreasing = all(b < a for a, b in zip(l1, l1[1:]))
    # fit c_k on N = 4, 8, 16, then require the bound to hold at N = 32, 64, 128
    fit_dims, test_dims = (4, 8, 16), (32, 64, 128)
    bound_ok = True
    cks = []
    for k in (2, 4, 6, 8):
        limit = exactseries.moment_semicircle(k)
        err = lambda n: abs(float(exactseries.moment_sue(k, n, n) - limit))
        ck = max(n * err(n) for n in fit_dims)
        cks.append(ck)
        bound_ok &= all(err(n) <= ck / n for n in test_dims)
    ok = decreasing and bound_ok
    l1s = ", ".join(f"{v:.4f}" for v in l1)
    return ok, f"L1 for N={dims}: {l1s} (strictly decreasing: {decreasing}); c_k (k=2..8) = {[round(c, 3) for c in cks]}, bound holds at N={test_dims}: {bound_ok}"


def check_joint_density(sizes: dict) -> tuple[bool, str]:
    r = 1.5
    parts = []
    ok = True
    for beta, exact, stream in ((2, 2 * math.pi * r**3, 0), (1, 4 * math.sqrt(2) * r**2, 1)):
        z, se = analytic.joint_density_normalizer(beta, 2, r, samples=sizes["normalizer_mc"], rng=_rng(10, stream))
        dev = abs(z - exact) / se
        ok &= dev <= 3
        parts.append(f"beta={beta}: Z={z:.5f} vs {exact:.5f} ({dev:.2f} SE)")
    dm = analytic.build_density_model(2, r)
    worst = 0.0
    for u in (-0.95, -0.6, -0.2, 0.0, 0.3, 0.7, 0.99):
        x = u * r
        worst = max(worst, abs(analytic.marginal_cdf_n2(2, r, x) - float(analytic.arcsine_cdf(x, r))))
        worst = max(worst, abs(analytic.marginal_density_n2(2, r, x) - analytic.eval_density(dm, x)))
    ok &= worst <= 1e-8
    parts.append(f"pushforward vs arcsine max error {worst:.1e} (tol 1e-8)")
    return ok, "; ".join(parts)


def check_spacings(sizes: dict) -> tuple[bool, str]:
    count = sizes["spacing_matrices"]
    sue = _spectra(EnsembleSpec.spherical(2, 100, r_squared=100), count, _rng(11, 0), chunk=64)
    gue = _spectra(EnsembleSpec.gaussian(2, 100, q=100), count, _rng(11, 10**6), chunk=64)
    per_matrix = {stats.extract_middle_spacings(s, 21).size for s in sue + gue}
    window = stats.middle_window(100, 21)
    a = stats.pooled_spacings(sue, 21)
    b = stats.pooled_spacings(gue, 21)
    ks = stats.ks_distance(a.spacings, b.spacings)
    ok = per_matrix == {20} and a.spacings.size == 20 * count and ks < sizes["spacing_ks"]
    return ok, (f"window {window[0]}..{window[1] - 1}, spacings per matrix {sorted(per_matrix)}, "
                f"{a.spacings.size} pooled; KS(SUE, GUE) = {ks:.4f} < {sizes['spacing_ks']}")


def check_eigensolver(sizes: dict) -> tuple[bool, str]:
    worst_tr = 0.0
    worst_norm = 0.0
    for beta in (1, 2, 4):
        mats = sample_batch(EnsembleSpec.gaussian(beta, 8, 1), sizes["eigen_random"], _rng(12, beta))
        for m, s in zip(mats, eigenvalues_many(mats)):
            nrm = frobenius_norm(m)
            worst_tr = max(worst_tr, abs(float(s.values.sum()) - m.trace()) / (1.0 + nrm))
            worst_norm = max(worst_norm, abs(float((s.values**2).sum()) - frobenius_norm_sq(m)) / (1.0 + nrm * nrm))
    worst_brute = 0.0
    for beta in (1, 2, 4):
        for n in (1, 2, 3, 4):
            mats = sample_batch(EnsembleSpec.gaussian(beta, n, 1), sizes["eigen_brute"], _rng(12, 100 + 10 * beta + n))
            for m in mats:
                diff = np.abs(eigenvalues(m).values - eigenvalues_bruteforce(m)).max()
                worst_brute = max(worst_brute, float(diff) / max(1.0, frobenius_norm(m)))
    ok = worst_tr <= 1e-10 and worst_norm <= 1e-10 and worst_brute <= 1e-8
    return ok, (f"trace error {worst_tr:.1e}, norm error {worst_norm:.1e} (relative, tol 1e-10); "
                f"brute-force roots at N<=4 max error {worst_brute:.1e} (tol 1e-8)")


def golden_directory() -> Path:
    return Path(str(resources.files("spherical_ensembles") / "data" / "golden"))


def check_golden(sizes: dict, golden_dir: Path | None = None) -> tuple[bool, str]:
    directory = Path(golden_dir) if golden_dir is not None else golden_directory()
    bad = []
    for n in range(2, 9):
        path = directory / f"density_N{n}.txt"
        try:
            stored = analytic.DensityModel.from_record(path.read_text())
        except (OSError, ValueError) as exc:
            bad.append(f"p_{n} unreadable ({exc.__class__.__name__})")
            continue
        fresh = analytic.build_density_model(n, stored.r)
        if (stored.dim, stored.p, stored.pi_factor, stored.exponent) != (fresh.dim, fresh.p, fresh.pi_factor, fresh.exponent):
            bad.append(f"p_{n} mismatch")
    return not bad, "golden p_N records for N=2..8 match rebuilt models" if not bad else "; ".join(bad)


CHECKS: list[tuple[str, str, Callable, float]] = [
    ("1", "variance identity", check_variance_identity, 60),
    ("2", "arcsine oracle", check_arcsine, 60),
    ("3", "density normalization and moments", check_density_moments, 60),
    ("4", "characteristic-function duality", check_char_fn_duality, 120),
    ("5", "N=1 characteristic function", check_n1_char_fn, 1),
    ("6", "Fourier pair", check_fourier_pair, 60),
    ("7", "homogeneous Gaussian identity", check_gaussian_identity, 60),
    ("8", "Harer-Zagier pipeline", check_harer_zagier, 60),
    ("9", "semicircle convergence", check_semicircle, 60),
    ("10", "joint-density consistency", check_joint_density, 120),
    ("11", "spacing robustness", check_spacings, 600),
    ("12", "eigensolver correctness", check_eigensolver, 60),
    ("G", "golden density records", check_golden, 10),
]


def run_check(number: str, quick: bool = False, golden_dir: Path | None = None) -> CheckResult:
    for num, name, fn, limit in CHECKS:
        if num == number:
            break
    else:
        raise KeyError(f"no acceptance check {number!r}")
    sizes = QUICK_SIZES if quick else FULL_SIZES
    start = time.perf_counter()
    try:
        if fn is check_golden:
            passed, detail = fn(sizes, golden_dir)
        else:
            passed, detail = fn(sizes)
    except ArithmeticError as exc:
        passed, detail = False, f"{exc.__class__.__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if elapsed > limit:
        passed = False
        detail += f"; runtime {elapsed:.1f}s exceeds {limit:g}s"
    return CheckResult(num, name, bool(passed), detail, elapsed, limit)


def run_all(quick: bool = False, golden_dir: Path | None = None, report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for num, *_ in CHECKS:
        res = run_check(num, quick, golden_dir)
        if report is not None:
            report(res)
        results.append(res)
    return results
