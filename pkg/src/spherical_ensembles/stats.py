"""Monte Carlo statistics and the shared quadrature engine.

Histograms, matrix-level empirical moments, middle-bulk spacings, KS
distances, the GUE Wigner surmise, and adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])

NODE_CAP = 10**6


class BudgetExceeded(ArithmeticError):
    pass


def _panel(f, a: float, b: float, vectorized: bool) -> tuple[float, float]:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * NODES
    if vectorized:
        fx = np.asarray(f(x), dtype=np.float64)
    else:
        fx = np.array([f(float(t)) for t in x], dtype=np.float64)
    k = half * float(KRONROD_WEIGHTS @ fx)
    g = half * float(GAUSS_WEIGHTS @ fx)
    return k, abs(k - g)


def quad_gk(
    f: Callable,
    lo: float,
    hi: float,
    tol: float = 1e-10,
    singular_ends: bool = False,
    vectorized: bool = False,
    initial_panels: int = 1,
    node_cap: int = NODE_CAP,
) -> tuple[float, float, int]:
    """Adaptive G7/K15 quadrature; returns (value, error estimate, nodes used).

    The panel with the largest |K15 - G7| is bisected until the summed
    estimate drops below ``tol``. With ``singular_ends`` the integral is first
    mapped by x = m + h (3s - s^3)/2, which clusters nodes quadratically at
    both ends and turns (1 - x^2)^e with half-integer e > -1 into a smooth
    integrand.
    """
    if hi == lo:
        return 0.0, 0.0, 0
    if hi < lo:
        v, e, n = quad_gk(f, hi, lo, tol, singular_ends, vectorized, initial_panels, node_cap)
        return -v, e, n
    if singular_ends:
        mid, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        g0 = f

        if vectorized:
            def g(s):
                s = np.asarray(s)
                return g0(mid + h * (1.5 * s - 0.5 * s**3)) * (1.5 * h * (1.0 - s * s))
        else:
            def g(s):
                return g0(mid + h * (1.5 * s - 0.5 * s**3)) * (1.5 * h * (1.0 - s * s))

        return quad_gk(g, -1.0, 1.0, tol, False, vectorized, initial_panels, node_cap)

    edges = np.linspace(lo, hi, initial_panels + 1)
    heap = []
    total = 0.0
    err = 0.0
    nodes = 0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _panel(f, a, b, vectorized)
        nodes += 15
        heapq.heappush(heap, (-e, a, b, v))
        total += v
        err += e
    eps = np.finfo(float).eps
    while err > tol:
        neg_e, a, b, v = heapq.heappop(heap)
        if -neg_e <= 50 * eps * max(abs(v), abs(total) * (b - a) / (hi - lo)) or b - a <= 4 * eps * max(abs(a), abs(b), 1.0):
            # the worst panel is at rounding level; nothing left to gain
            heapq.heappush(heap, (neg_e, a, b, v))
            break
        if nodes + 30 > node_cap:
            raise BudgetExceeded(f"quadrature needed more than {node_cap} nodes (error estimate {err:.3e}, tol {tol:.3e})")
        m = 0.5 * (a + b)
        v1, e1 = _panel(f, a, m, vectorized)
        v2, e2 = _panel(f, m, b, vectorized)
        nodes += 30
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        # re-sum to keep rounding drift out of the running totals
        total = math.fsum(item[3] for item in heap)
        err = math.fsum(-item[0] for item in heap)
    return total, err, nodes


def integrate(f: Callable, lo: float, hi: float, tol: float = 1e-10, **kwargs) -> float:
    return quad_gk(f, lo, hi, tol, **kwargs)[0]


# --------------------------------------------------------------------------
# histograms and moments


@dataclass
class Histogram:
    lo: float
    hi: float
    bin_count: int
    counts: np.ndarray
    total: int
    underflow: int = 0
    overflow: int = 0

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.bin_count

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bin_count + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    def density(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(self.bin_count)
        return self.counts / (self.total * self.width)


def histogram(values, lo: float, hi: float, bins: int) -> Histogram:
    """Left-closed bins [lo + k w, lo + (k+1) w); values >= hi count as overflow."""
    if bins < 1 or not lo < hi:
        raise ValueError("need bins >= 1 and lo < hi")
    v = np.asarray(values, dtype=np.float64).ravel()
    under = int(np.count_nonzero(v < lo))
    over = int(np.count_nonzero(v >= hi))
    inside = v[(v >= lo) & (v < hi)]
    idx = np.floor((inside - lo) / ((hi - lo) / bins)).astype(np.int64)
    # guard against x just below hi rounding up to bin index ``bins``
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins)
    return Histogram(lo, hi, bins, counts, int(v.size), under, over)


@dataclass
class EmpiricalMoments:
    max_k: int
    m: np.ndarray
    se: np.ndarray
    count: int


def empirical_moments(batch: Sequence, max_k: int) -> EmpiricalMoments:
    """Matrix-level averages of (1/N) sum_i lambda_i^k with their standard errors.

    ``batch`` holds spectra (anything with ``.values``) or plain arrays.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    lam = np.stack([np.asarray(getattr(s, "values", s), dtype=np.float64) for s in batch])
    powers = lam[:, :, None] ** np.arange(max_k + 1)
    per_matrix = powers.mean(axis=1)
    m = per_matrix.mean(axis=0)
    m[0] = 1.0
    count = lam.shape[0]
    if count > 1:
        se = per_matrix.std(axis=0, ddof=1) / math.sqrt(count)
    else:
        se = np.zeros(max_k + 1)
    se[0] = 0.0
    return EmpiricalMoments(max_k, m, se, count)


# --------------------------------------------------------------------------
# spacings


@dataclass
class SpacingSample:
    spacings: np.ndarray
    raw_mean: float
    degenerate: int = 0
    convention: str = field(default="mean-normalized pooled middle-bulk spacings")


def middle_window(dim: int, take: int) -> tuple[int, int]:
    """0-based [start, stop) of the middle ``take`` of ``dim`` sorted eigenvalues.

    Centered on index ceil(N/2) - 1 rounded so that any uneven overhang goes
    to the lower side: N=100, take=21 gives indices 40..60.
    """
    if take < 1 or take % 2 == 0:
        raise ValueError("take must be a positive odd integer")
    if dim < take:
        raise ValueError(f"need at least {take} eigenvalues, got {dim}")
    start = (dim - take + 1) // 2
    return start, start + take


def extract_middle_spacings(spectrum, take: int = 21) -> np.ndarray:
    values = np.asarray(getattr(spectrum, "values", spectrum), dtype=np.float64)
    start, stop = middle_window(values.size, take)
    return np.diff(values[start:stop])


def normalize_spacings(pooled) -> SpacingSample:
    s = np.asarray(pooled, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("no spacings")
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    mean = float(s.mean())
    if mean == 0.0:
        raise ValueError("all spacings are zero")
    return SpacingSample(s / mean, mean, int(np.count_nonzero(s == 0)))


def pooled_spacings(spectra: Sequence, take: int = 21) -> SpacingSample:
    return normalize_spacings(np.concatenate([extract_middle_spacings(s, take) for s in spectra]))


def ks_distance(a, b) -> float:
    """Kolmogorov-Smirnov sup distance.

    ``b`` is either a second sample (two-sample statistic) or a CDF callable
    accepting arrays (one-sample statistic).
    """
    x = np.sort(np.asarray(a, dtype=np.float64).ravel())
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    if callable(b):
        cdf = np.asarray(b(x), dtype=np.float64)
        # evaluate both one-sided gaps at each jump
        upper = np.arange(1, n + 1) / n - cdf
        lower = cdf - np.arange(0, n) / n
        return float(max(upper.max(), lower.max(), 0.0))
    y = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if y.size == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / n
    fy = np.searchsorted(y, grid, side="right") / y.size
    return float(np.abs(fx - fy).max())


def wigner_surmise_gue_pdf(s):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s >= 0, (32.0 / math.pi**2) * s * s * np.exp(-4.0 * s * s / math.pi), 0.0)


def wigner_surmise_gue_cdf(s):
    """CDF of (32/pi^2) s^2 exp(-4 s^2/pi): erf(2s/sqrt(pi)) - (4s/pi) exp(-4s^2/pi)."""
    s = np.asarray(s, dtype=np.float64)
    out = erf(2.0 * s / math.sqrt(math.pi)) - (4.0 * s / math.pi) * np.exp(-4.0 * s * s / math.pi)
    out = np.where(s > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# homogeneous-polynomial Gaussian identity


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of int G/(x'Bx)^(k/2) e^(-a x'Bx/4) dx = c int G e^(-a x'Bx/4) dx.

    ``lhs_se``, ``rhs_se`` and ``diff_se`` are zero for deterministic rules.
    """

    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float
    diff: float
    diff_se: float
    factor: float


def homogeneous_factor(n: int, k: int, alpha: float) -> float:
    """(alpha/4)^(k/2) Gamma(n/2) / Gamma((k + n)/2)."""
    return (alpha / 4.0) ** (k / 2.0) * math.exp(math.lgamma(n / 2.0) - math.lgamma((k + n) / 2.0))


def homogeneous_identity_mc(G: Callable, k: int, B, alpha: float, samples: int, gen: np.random.Generator) -> IdentityCheck:
    """Monte Carlo under the Gaussian weight itself: x ~ N(0, (2/alpha) B^-1).

    Both integrals become Z E[...] with Z the Gaussian normalizer. The
    pointwise difference gives a paired standard error for lhs - rhs.
    """
    B = np.asarray(B, dtype=np.float64)
    n = B.shape[0]
    cov = (2.0 / alpha) * np.linalg.inv(B)
    z = (2 * math.pi) ** (n / 2) * math.sqrt(np.linalg.det(cov))
    x = gen.standard_normal((samples, n)) @ np.linalg.cholesky(cov).T
    quad = np.einsum("si,ij,sj->s", x, B, x)
    g = G(x)
    c = homogeneous_factor(n, k, alpha)
    left = z * g / quad ** (k / 2.0)
    right = z * c * g
    se = lambda v: float(v.std(ddof=1) / math.sqrt(samples))
    d = left - right
    return IdentityCheck(float(left.mean()), float(right.mean()), se(left), se(right), float(d.mean()), se(d), c)


def homogeneous_identity_grid(G: Callable, k: int, B, alpha: float, radial: int = 96, polar: int = 64, azimuth: int = 128) -> IdentityCheck:
    """Tensor-product rule in spherical coordinates for n = 3.

    Gauss-Legendre in radius and cos(theta), trapezoid in the periodic
    azimuth. Both integrands are smooth in these coordinates, so the rule is
    spectrally accurate. The radial range is cut where the weight is below
    e^-80 along the least-decaying direction.
    """
    B = np.asarray(B, dtype=np.float64)
    if B.shape != (3, 3):
        raise ValueError("tensor-grid rule is written for n = 3")
    lam_min = float(np.linalg.eigvalsh(B)[0])
    rho_max = math.sqrt(320.0 / (alpha * lam_min))
    xr, wr = np.polynomial.legendre.leggauss(radial)
    rho = 0.5 * rho_max * (xr + 1.0)
    wr = 0.5 * rho_max * wr
    ct, wt = np.polynomial.legendre.leggauss(polar)
    phi = 2 * math.pi * np.arange(azimuth) / azimuth
    wp = np.full(azimuth, 2 * math.pi / azimuth)
    st = np.sqrt(1.0 - ct**2)
    theta = np.stack([
        np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.outer(ct, np.ones(azimuth)),
    ], axis=-1).reshape(-1, 3)
    w_ang = np.outer(wt, wp).ravel()
    s = np.einsum("ai,ij,aj->a", theta, B, theta)
    # G is evaluated on the full grid; homogeneity is not assumed
    pts = rho[:, None, None] * theta[None, :, :]
    g_full = G(pts.reshape(-1, 3)).reshape(radial, -1)
    weight = np.exp(-alpha * (rho[:, None] ** 2) * s[None, :] / 4.0)
    jac = (rho**2 * wr)[:, None] * w_ang[None, :]
    quad = (rho[:, None] ** 2) * s[None, :]
    lhs = float(np.sum(jac * weight * g_full / quad ** (k / 2.0)))
    c = homogeneous_factor(3, k, alpha)
    rhs = c * float(np.sum(jac * weight * g_full))
    return IdentityCheck(lhs, rhs, 0.0, 0.0, lhs - rhs, 0.0, c)
