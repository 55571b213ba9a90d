"""Exact rational moments: Harer-Zagier coefficients, GUE moments and the
Gaussian-to-spherical moment transfer.

Rationals are ``fractions.Fraction``; they print as "p/q" (or "p").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .matrix import Beta, EnsembleSpec, real_dimension


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, or decimal/"p/q" string.

    Floats are rejected: their binary expansion is rarely the rational meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"need an exact rational, got {type(x).__name__} {x!r}")


def rational_str(x: Fraction) -> str:
    return str(Fraction(x))


def catalan(ell: int) -> int:
    if ell < 0:
        raise ValueError("Catalan index must be nonnegative")
    return math.comb(2 * ell, ell) // (ell + 1)


def double_factorial_odd(ell: int) -> int:
    """(2l - 1)!! = (2l-1)(2l-3)...3.1, with (-1)!! = 1."""
    out = 1
    for k in range(1, 2 * ell, 2):
        out *= k
    return out


@lru_cache(maxsize=None)
def _hz_series(dim: int, order: int) -> tuple[int, ...]:
    # coefficients of ((1+z)/(1-z))^N up to z^order
    num = [math.comb(dim, k) if k <= dim else 0 for k in range(order + 1)]
    # (1 - z)^(-N) = sum C(N+k-1, k) z^k
    den = [math.comb(dim + k - 1, k) for k in range(order + 1)]
    return tuple(sum(num[i] * den[k - i] for i in range(k + 1)) for k in range(order + 1))


def harer_zagier_c(ell: int, dim: int) -> int:
    """c(l, N): the z^l coefficient of ( ((1+z)/(1-z))^N - 1 ) / (2z)."""
    if ell < 0 or dim < 1:
        raise ValueError("need l >= 0 and N >= 1")
    coeffs = _hz_series(dim, ell + 1)
    c2 = coeffs[ell + 1]
    if c2 % 2:
        raise ArithmeticError("odd series coefficient; generating function is broken")
    return c2 // 2


def moment_gue(k: int, dim: int, q=1) -> Fraction:
    """m_k(G_2(N, q)) = (1/N) q^(-l) (2l-1)!! c(l, N) for k = 2l, else 0."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k % 2:
        return Fraction(0)
    q = as_fraction(q)
    ell = k // 2
    return Fraction(double_factorial_odd(ell) * harer_zagier_c(ell, dim), dim) / q**ell


def moment_gaussian_second(beta, dim: int, q=1) -> Fraction:
    """m_2(G_beta(N, q)) = 2n / (beta q N); at q = N this is 1 + (2/beta - 1)/N."""
    q = as_fraction(q)
    n = real_dimension(beta, dim)
    return Fraction(2 * n, int(beta) * dim) / q


@dataclass(frozen=True)
class HalfIntegerGammaRatio:
    """Gamma(a)/Gamma(b) = value * pi^(sqrt_pi_power / 2)."""

    value: Fraction
    sqrt_pi_power: int

    def __float__(self) -> float:
        return float(self.value) * math.pi ** (self.sqrt_pi_power / 2)


def _half_gamma(x: Fraction) -> tuple[Fraction, int]:
    # Gamma(x) = value * sqrt(pi)^p for x a positive (half-)integer
    value = Fraction(1)
    base = Fraction(1) if x.denominator == 1 else Fraction(1, 2)
    y = x
    while y > base:
        y -= 1
        value *= y
    return value, 0 if base == 1 else 1


def gamma_ratio(a, b) -> HalfIntegerGammaRatio:
    """Exact Gamma(a)/Gamma(b) for positive integer or half-integer a, b."""
    a = Fraction(a)
    b = Fraction(b)
    for x in (a, b):
        if x <= 0 or (2 * x).denominator != 1:
            raise ValueError(f"gamma_ratio needs positive half-integers, got {x}")
    va, pa = _half_gamma(a)
    vb, pb = _half_gamma(b)
    return HalfIntegerGammaRatio(va / vb, pa - pb)


def spherical_factor(k: int, beta, dim: int, r_squared, q) -> Fraction:
    """((beta/4) q r^2)^(k/2) Gamma(n/2) / Gamma((k+n)/2) for even k."""
    if k % 2:
        raise ValueError("transfer factor is rational only for even k")
    n = real_dimension(beta, dim)
    g = gamma_ratio(Fraction(n, 2), Fraction(k + n, 2))
    assert g.sqrt_pi_power == 0
    return (Fraction(int(beta), 4) * as_fraction(q) * as_fraction(r_squared)) ** (k // 2) * g.value


def moment_spherical(k: int, spec: EnsembleSpec, gaussian_m_k, q) -> Fraction:
    """m_k(S_beta(N, r)) from m_k(G_beta(N, q)); the result does not depend on q."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if spec.kind != "spherical":
        raise ValueError("moment_spherical needs a spherical ensemble spec")
    if k % 2:
        return Fraction(0)
    return spherical_factor(k, spec.beta, spec.dim, spec.r_squared, q) * as_fraction(gaussian_m_k)


def moment_sue(k: int, dim: int, r_squared) -> Fraction:
    """m_k(S_2(N, r)) through the GUE moments at q = 1."""
    spec = EnsembleSpec.spherical(Beta.UNITARY, dim, r_squared=as_fraction(r_squared))
    return moment_spherical(k, spec, moment_gue(k, dim, 1), 1)


def moment_spherical_estimate(k: int, spec: EnsembleSpec, gaussian_mean: float, gaussian_se: float, q) -> tuple[float, float]:
    """Spherical moment from a Monte Carlo Gaussian moment with its standard error.

    Used for beta = 1, 4, where no closed-form Gaussian moments are built in.
    """
    if k % 2:
        return 0.0, 0.0
    factor = float(spherical_factor(k, spec.beta, spec.dim, spec.r_squared, as_fraction(q)))
    return factor * gaussian_mean, factor * gaussian_se


def moment_semicircle(k: int) -> int:
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    return 0 if k % 2 else catalan(k // 2)


@dataclass(frozen=True)
class MomentTable:
    spec: EnsembleSpec
    max_k: int
    moments: tuple[Fraction, ...]


def moment_table(spec: EnsembleSpec, max_k: int) -> MomentTable:
    """Exact moments m_0..m_max_k for a beta = 2 ensemble with rational q or r^2."""
    if spec.beta != Beta.UNITARY:
        raise ValueError("closed-form moments are available for beta = 2 only")
    if spec.kind == "gaussian":
        ms = tuple(moment_gue(k, spec.dim, as_fraction(spec.q)) for k in range(max_k + 1))
    else:
        ms = tuple(moment_sue(k, spec.dim, as_fraction(spec.r_squared)) for k in range(max_k + 1))
    return MomentTable(spec, max_k, ms)
