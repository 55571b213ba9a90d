"""Closed forms for the spherical unitary ensemble S_2(N, r).

The characteristic function is a finite sum of 0F1 (equivalently Bessel J)
terms; the spectral density is (1/r) p_N(x/r) (1 - (x/r)^2)^((N^2-2N-1)/2)
with an exact rational polynomial p_N, built here by symbolic
differentiation in u = x/r. Also: the semicircle law, the 0F1 Fourier pair,
and the Vandermonde joint eigenvalue density on the sphere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import hankel1e

from .ensembles import RngState
from .exactseries import gamma_ratio, moment_sue
from .stats import BudgetExceeded, quad_gk


class NonConvergence(ArithmeticError):
    pass


class BoundaryDivergence(ArithmeticError):
    """The density is infinite at the requested point (|x| = r, negative exponent)."""


class QuadratureBudgetExceeded(BudgetExceeded):
    pass


# --------------------------------------------------------------------------
# exact polynomials


class RationalPolynomial:
    """Polynomial with Fraction coefficients, ascending powers, trailing zeros trimmed."""

    __slots__ = ("coeffs", "_float")

    def __init__(self, coeffs: Sequence = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._float = None

    @classmethod
    def one_minus_u2(cls, power: int = 1) -> RationalPolynomial:
        out = cls([1])
        base = cls([1, 0, -1])
        for _ in range(power):
            out = out * base
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"RationalPolynomial({[str(c) for c in self.coeffs]})"

    def __add__(self, other) -> RationalPolynomial:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> RationalPolynomial:
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> RationalPolynomial:
        return self + (-_as_poly(other))

    def __mul__(self, other) -> RationalPolynomial:
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> RationalPolynomial:
        return RationalPolynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def exact(self, u) -> Fraction:
        u = Fraction(u)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def __call__(self, u):
        if self._float is None:
            self._float = np.array([float(c) for c in self.coeffs] or [0.0])
        return np.polynomial.polynomial.polyval(u, self._float)


def _as_poly(x) -> RationalPolynomial:
    return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])


def differentiate_power_form(p: RationalPolynomial, a: Fraction) -> tuple[RationalPolynomial, Fraction]:
    """d/du [p(u) (1-u^2)^a] = [p'(u)(1-u^2) - 2 a u p(u)] (1-u^2)^(a-1)."""
    q = p.derivative() * RationalPolynomial([1, 0, -1]) - p * RationalPolynomial([0, 2 * a])
    return q, a - 1


# --------------------------------------------------------------------------
# special functions

_F01_TERM_CAP = 10**6
# below this many bits of cancellation the double-precision series is enough
_F01_FLOAT_BITS = 10


def hyp0f1(alpha, z: float) -> float:
    """0F1(alpha; z) = sum_l Gamma(alpha)/Gamma(alpha+l) z^l / l!.

    For large negative z the alternating series cancels badly (terms reach
    about exp(2 sqrt|z|)), so it is summed in extended precision with enough
    guard bits to cover the cancellation.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"0F1 needs alpha > 0, got {alpha}")
    z = float(z)
    if z == 0.0:
        return 1.0
    lost_bits = 2.0 * math.sqrt(abs(z)) / math.log(2.0) if z < 0 else 0.0
    if lost_bits <= _F01_FLOAT_BITS:
        term = 1.0
        total = 1.0
        ell = 0
        while True:
            term *= z / ((alpha + ell) * (ell + 1))
            total += term
            ell += 1
            if abs(term) < 1e-17 * abs(total) and ell > abs(z) / alpha:
                return total
            if ell > _F01_TERM_CAP:
                raise NonConvergence(f"0F1({alpha}, {z}) exceeded {_F01_TERM_CAP} terms")
    with mpmath.workprec(53 + int(lost_bits) + 64):
        zm = mpmath.mpf(z)
        am = mpmath.mpf(alpha)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        peak = mpmath.mpf(1)
        ell = 0
        cut = mpmath.mpf(2) ** (-120)
        while True:
            term *= zm / ((am + ell) * (ell + 1))
            total += term
            ell += 1
            peak = max(peak, abs(term))
            if ell > abs(z) and abs(term) < cut * peak:
                return float(total)
            if ell > _F01_TERM_CAP:
                raise NonConvergence(f"0F1({alpha}, {z}) exceeded {_F01_TERM_CAP} terms")


def bessel_j(alpha, t: float) -> float:
    """J_alpha(t) = (t/2)^alpha / Gamma(alpha+1) * 0F1(alpha+1; -t^2/4), t >= 0."""
    alpha = float(alpha)
    t = float(t)
    if t < 0:
        raise ValueError("bessel_j is defined here for t >= 0")
    if alpha < -0.5:
        raise ValueError("bessel_j needs alpha >= -1/2")
    if t == 0.0:
        if alpha == 0.0:
            return 1.0
        if alpha > 0:
            return 0.0
        raise ValueError("J_alpha(0) is infinite for alpha < 0")
    pre = math.exp(alpha * math.log(t / 2.0) - math.lgamma(alpha + 1.0))
    return pre * hyp0f1(alpha + 1.0, -t * t / 4.0)


# --------------------------------------------------------------------------
# characteristic function


@dataclass(frozen=True)
class CharFnModel:
    """phi(t) = sum_j weights[j] * 0F1(n/2 + j; -(rt)^2/4) * (-(rt)^2/2)^j with n = N^2.

    weights[j] = C(N, j+1) Gamma(n/2) / (N Gamma(n/2 + j) j!), exactly rational.
    """

    dim: int
    r: float
    weights: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.dim * self.dim

    def bessel_terms(self) -> list[tuple[float, float, float]]:
        """(coef, power, order) with phi(t) = sum coef * s^power * J_order(s), s = r|t|."""
        n, dim = self.n, self.dim
        out = []
        base = math.lgamma(n / 2) - math.log(dim) + (n / 2 - 1) * math.log(2.0)
        for j in range(dim):
            c = math.exp(base + math.log(math.comb(dim, j + 1)) - math.lgamma(j + 1)) * (-1) ** j
            out.append((c, j - (n / 2 - 1), n / 2 + j - 1))
        return out


def build_char_fn_model(dim: int, r: float) -> CharFnModel:
    if dim < 1:
        raise ValueError("N must be at least 1")
    if not r > 0:
        raise ValueError("r must be positive")
    n = dim * dim
    weights = []
    for j in range(dim):
        g = gamma_ratio(Fraction(n, 2), Fraction(n, 2) + j)
        weights.append(Fraction(math.comb(dim, j + 1), dim * math.factorial(j)) * g.value)
    return CharFnModel(dim, float(r), tuple(weights))


HYP_FORM_CROSSOVER = 1e-3


def char_fn_hyp(model: CharFnModel, t: float) -> float:
    s = model.r * abs(float(t))
    u = -s * s / 4.0
    total = 0.0
    for j, w in enumerate(model.weights):
        total += float(w) * hyp0f1(model.n / 2 + j, u) * (2.0 * u) ** j
    return total


def char_fn_bessel(model: CharFnModel, t: float) -> float:
    """The Bessel-J form; undefined at t = 0 (removable singularity)."""
    s = model.r * abs(float(t))
    if s == 0.0:
        raise ValueError("Bessel form has a removable singularity at t = 0")
    return sum(c * s**p * bessel_j(nu, s) for c, p, nu in model.bessel_terms())


def char_fn(model: CharFnModel, t: float, form: str = "auto") -> float:
    """phi(t, S_2(N, r)); ``form`` is "auto", "hyp" or "bessel"."""
    if form == "hyp":
        return char_fn_hyp(model, t)
    if form == "bessel":
        return char_fn_bessel(model, t)
    if form != "auto":
        raise ValueError(f"unknown form {form!r}")
    s = model.r * abs(float(t))
    if s < HYP_FORM_CROSSOVER:
        return char_fn_hyp(model, t)
    # (2/s)^(n/2-1) overflows for large N at small s; the 0F1 form is equivalent there
    if (model.n / 2 - 1) * math.log(2.0 / s) > 600:
        return char_fn_hyp(model, t)
    return char_fn_bessel(model, t)


def char_fn_from_moments(dim: int, r_squared, t: float, tol_bits: int = 80) -> float:
    """phi(t) = sum_l (-1)^l m_2l t^(2l) / (2l)! from the exact moments."""
    r_squared = Fraction(r_squared)
    s2 = float(r_squared) * float(t) ** 2
    lost = 2.0 * math.sqrt(s2) / math.log(2.0)
    with mpmath.workprec(53 + int(lost) + tol_bits):
        tt = mpmath.mpf(float(t)) ** 2
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        ell = 0
        while True:
            m = moment_sue(2 * ell, dim, r_squared)
            term = (-1) ** ell * mpmath.mpf(m.numerator) / m.denominator * power / mpmath.factorial(2 * ell)
            total += term
            if ell > s2 and abs(term) < mpmath.mpf(2) ** (-tol_bits - 53):
                return float(total)
            power *= tt
            ell += 1
            if ell > 100000:
                raise NonConvergence("moment series did not converge")


# --------------------------------------------------------------------------
# Fourier cosine transforms of Bessel sums


def bessel_cosine_transform(
    head: Callable[[float], float],
    terms: Sequence[tuple[float, float, float]],
    r: float,
    x: float,
    split: float,
    tol: float = 1e-12,
) -> float:
    """(1/pi) int_0^inf cos(x t) F(t) dt for F(t) = sum c s^p J_nu(s), s = r t.

    ``head`` evaluates F directly and is integrated adaptively on [0, split].
    Past ``split`` write J_nu(s) = Re[H1e_nu(s) e^{is}], whose scaled Hankel
    factor is smooth and non-oscillatory, so the tail becomes Fourier
    integrals with slowly varying amplitudes at frequencies r +- x; those are
    integrated to infinity with QUADPACK's QAWF, with no truncation.
    """
    x = float(x)
    try:
        h, err, _ = quad_gk(lambda t: math.cos(x * t) * head(t), 0.0, split, tol, initial_panels=max(1, int(split * (r + abs(x)))))
    except BudgetExceeded as exc:
        raise QuadratureBudgetExceeded(str(exc)) from exc

    def amplitude(t):
        s = r * t
        return sum(c * s**p * hankel1e(nu, s) for c, p, nu in terms)

    tail = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        for omega in (r + x, r - x):
            if abs(omega) < 1e-12:
                raise ValueError("transform at |x| = r needs a non-oscillatory tail")
            sign = 1.0 if omega > 0 else -1.0
            w = abs(omega)
            try:
                c_part = quad(lambda t: amplitude(t).real, split, np.inf, weight="cos", wvar=w, epsabs=tol, limlst=200)[0]
                s_part = quad(lambda t: amplitude(t).imag, split, np.inf, weight="sin", wvar=w, epsabs=tol, limlst=200)[0]
            except IntegrationWarning:
                # retry at a looser target before giving up
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", IntegrationWarning)
                    c_part, ce = quad(lambda t: amplitude(t).real, split, np.inf, weight="cos", wvar=w, epsabs=1e3 * tol, limlst=200)[:2]
                    s_part, se = quad(lambda t: amplitude(t).imag, split, np.inf, weight="sin", wvar=w, epsabs=1e3 * tol, limlst=200)[:2]
                if ce + se > 1e-8:
                    raise QuadratureBudgetExceeded(f"oscillatory tail error {ce + se:.2e}")
            tail += 0.5 * (c_part - sign * s_part)
    return (h + tail) / math.pi


def density_from_char_fn(model: CharFnModel, x: float, split_s: float = 12.0) -> float:
    """f(x) = (1/2 pi) int e^{-itx} phi(t) dt by quadrature."""
    return bessel_cosine_transform(
        lambda t: char_fn_hyp(model, t), model.bessel_terms(), model.r, x, split_s / model.r
    )


def generalized_binomial(w: float, z: float) -> float:
    return math.exp(math.lgamma(w + 1) - math.lgamma(z + 1) - math.lgamma(w - z + 1))


def fourier_pair_check(alpha, x: float) -> tuple[float, float]:
    """Both sides of (1/2pi) int e^{-itx} 0F1(alpha; -t^2/4) dt = (1/2) C(alpha-1, 1/2) (1-x^2)^(alpha-3/2).

    lhs by quadrature, rhs by the closed form; |x| < 1, alpha > 1/2.
    """
    alpha = float(alpha)
    x = float(x)
    if not alpha > 0.5:
        raise ValueError("need alpha > 1/2 for a convergent transform")
    if not abs(x) < 1:
        raise ValueError("need |x| < 1")
    # 0F1(alpha; -t^2/4) = Gamma(alpha) 2^(alpha-1) t^(1-alpha) J_(alpha-1)(t)
    coef = math.exp(math.lgamma(alpha) + (alpha - 1) * math.log(2.0))
    lhs = bessel_cosine_transform(
        lambda t: hyp0f1(alpha, -t * t / 4.0), [(coef, 1.0 - alpha, alpha - 1.0)], 1.0, x, 12.0
    )
    rhs = 0.5 * generalized_binomial(alpha - 1.0, 0.5) * (1.0 - x * x) ** (alpha - 1.5)
    return lhs, rhs


# --------------------------------------------------------------------------
# spectral density


@dataclass(frozen=True)
class DensityModel:
    """f(x) = pi^pi_factor * p(u) * (1 - u^2)^exponent / r with u = x / r."""

    dim: int
    r: float
    pi_factor: int
    p: RationalPolynomial
    exponent: Fraction

    def evaluate(self, x):
        """Vectorized density; +inf where the boundary diverges."""
        x = np.asarray(x, dtype=np.float64)
        u = x / self.r
        w = 1.0 - u * u
        e = float(self.exponent)
        inside = w > 0
        ws = np.where(inside, w, 1.0)
        val = (math.pi**self.pi_factor / self.r) * self.p(u) * ws**e
        out = np.where(inside, val, 0.0)
        if e < 0:
            out = np.where(w == 0, np.inf, out)
        return out

    def with_radius(self, r: float) -> DensityModel:
        return DensityModel(self.dim, float(r), self.pi_factor, self.p, self.exponent)

    def to_record(self) -> str:
        lines = [
            "# spherical unitary ensemble density: pi^piFactor * p(u) * (1-u^2)^exponent / r, u = x/r",
            f"N={self.dim}",
            f"r={self.r!r}",
            f"exponent={self.exponent.numerator}/{self.exponent.denominator}",
            f"piFactor={self.pi_factor}",
            "p=" + ",".join(str(c) for c in self.p.coeffs),
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> DensityModel:
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        try:
            return cls(
                int(fields["N"]),
                float(fields["r"]),
                int(fields["piFactor"]),
                RationalPolynomial([Fraction(c) for c in fields["p"].split(",") if c]),
                Fraction(fields["exponent"]),
            )
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed density record: {exc}") from exc


def density_exponent(dim: int) -> Fraction:
    return Fraction(dim * dim - 2 * dim - 1, 2)


def build_density_model(dim: int, r: float = 1.0) -> DensityModel:
    """Exact p_N for f(x, S_2(N, r)), N >= 2.

    Term j of the density is
    C(N,j+1)/N * Gamma(N^2/2) / (2^j sqrt(pi) Gamma((N^2-1)/2 + j) j!) * D^{2j} (1-u^2)^((N^2-3)/2 + j) / r,
    with D = d/du; after 2j derivatives each term is a polynomial times
    (1-u^2)^(e + N-1-j), which is brought over the common power e.
    """
    if dim < 2:
        raise ValueError("S_2(1, r) is two point masses; no density for N < 2")
    if not r > 0:
        raise ValueError("r must be positive")
    n = dim * dim
    e = density_exponent(dim)
    p = RationalPolynomial()
    pi_power = None
    for j in range(dim):
        g = gamma_ratio(Fraction(n, 2), Fraction(n - 1, 2) + j)
        # one more 1/sqrt(pi) from the prefactor
        sqrt_pi = g.sqrt_pi_power - 1
        if sqrt_pi % 2:
            raise ArithmeticError("odd net power of sqrt(pi)")
        if pi_power is None:
            pi_power = sqrt_pi // 2
        elif pi_power != sqrt_pi // 2:
            raise ArithmeticError("terms carry different powers of pi")
        coef = Fraction(math.comb(dim, j + 1), dim * 2**j * math.factorial(j)) * g.value
        poly = RationalPolynomial([1])
        a = Fraction(n - 3, 2) + j
        for _ in range(2 * j):
            poly, a = differentiate_power_form(poly, a)
        extra = a - e
        assert extra.denominator == 1 and extra == dim - 1 - j
        p = p + coef * poly * RationalPolynomial.one_minus_u2(int(extra))
    return DensityModel(dim, float(r), pi_power, p, e)


def eval_density(model: DensityModel, x: float) -> float:
    u = float(x) / model.r
    w = 1.0 - u * u
    if w < 0:
        return 0.0
    if w == 0:
        if model.exponent < 0:
            raise BoundaryDivergence(f"density diverges at x = {x} (|x| = r)")
        return 0.0
    return float((math.pi**model.pi_factor / model.r) * model.p(u) * w ** float(model.exponent))


def integrate_density(model: DensityModel, g: Callable | None = None, a: float = -1.0, b: float = 1.0, tol: float = 1e-13) -> float:
    """int g(x) f(x) dx over x / r in [a, b] within [-1, 1], by quadrature in u = x / r.

    The map u = lo + h (1 + (3s - s^3)/2) clusters nodes at both ends, and
    1 + u, 1 - u are formed from the factored (1 +- s)^2 (2 -+ s)/2 so the
    endpoint weight (1 - u^2)^e never suffers cancellation.
    """
    if not -1.0 <= a <= b <= 1.0:
        raise ValueError("need -1 <= a <= b <= 1")
    if a == b:
        return 0.0
    h = 0.5 * (b - a)
    e = float(model.exponent)
    r = model.r

    def integrand(s):
        one_p = 0.5 * (1.0 + s) ** 2 * (2.0 - s)
        one_m = 0.5 * (1.0 - s) ** 2 * (2.0 + s)
        u = a + h * one_p
        w = (1.0 + a + h * one_p) * (1.0 - b + h * one_m)
        val = model.p(u) * w**e * (1.5 * h * (1.0 - s * s))
        if g is not None:
            val = val * g(r * u)
        return val

    v = quad_gk(integrand, -1.0, 1.0, tol, vectorized=True)[0]
    return math.pi**model.pi_factor * v


def density_moment(model: DensityModel, k: int, tol: float = 1e-13) -> float:
    """int x^k f(x) dx by quadrature."""
    return integrate_density(model, lambda x: x**k, tol=tol)


def density_cdf(model: DensityModel, x: float, tol: float = 1e-13) -> float:
    r = model.r
    if x <= -r:
        return 0.0
    if x >= r:
        return 1.0
    return integrate_density(model, None, -1.0, float(x) / r, tol)


def tabulated_cdf(model: DensityModel, points: int = 2001) -> Callable:
    """Piecewise-linear CDF from panel-wise quadrature on a grid."""
    r = model.r
    grid = np.linspace(-r, r, points)
    pieces = [0.0]
    for a, b in zip(grid[:-1], grid[1:]):
        pieces.append(integrate_density(model, None, a / r, b / r, 1e-13))
    cdf = np.cumsum(pieces)
    cdf /= cdf[-1]
    return lambda x: np.interp(x, grid, cdf)


def arcsine_cdf(x, r: float):
    """CDF of 1/(pi sqrt(r^2 - x^2)) on (-r, r)."""
    x = np.clip(np.asarray(x, dtype=np.float64) / r, -1.0, 1.0)
    return 0.5 + np.arcsin(x) / math.pi


def semicircle_density(x):
    """(1/2pi) sqrt(4 - x^2) on |x| <= 2, zero outside."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def l1_to_semicircle(model: DensityModel, tol: float = 1e-10) -> float:
    """int |g(y) - f_Wig(y)| dy with g the density rescaled to unit variance."""
    sigma = model.r / math.sqrt(model.dim)
    lo = min(-2.0, -model.r / sigma)
    hi = -lo
    g = lambda y: np.abs(sigma * model.evaluate(sigma * y) - semicircle_density(y))
    # breakpoints at the two supports' edges keep every panel smooth up to sign changes
    pts = sorted({lo, -2.0, 0.0, 2.0, hi, -model.r / sigma, model.r / sigma})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            total += quad_gk(g, a, b, tol, singular_ends=True, vectorized=True, initial_panels=8)[0]
    return float(total)


# --------------------------------------------------------------------------
# joint eigenvalue density


def vandermonde(lam) -> float:
    lam = np.asarray(lam, dtype=np.float64)
    i, j = np.triu_indices(lam.size, 1)
    return float(np.prod(lam[j] - lam[i]))


def joint_density_unnormalized(lam, beta) -> float:
    """|prod_{i<j} (lambda_j - lambda_i)|^beta, w.r.t. surface measure on the sphere |lambda| = r."""
    return abs(vandermonde(lam)) ** int(beta)


def sphere_area(dim: int, r: float) -> float:
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2) * r ** (dim - 1)


def joint_density_normalizer(beta, dim: int, r: float, samples: int = 10**7, rng: RngState | None = None, chunk: int = 10**6) -> tuple[float, float]:
    """Monte Carlo Z = int_{r S^{N-1}} |Delta|^beta dtheta; returns (Z, standard error)."""
    if dim > 4:
        raise ValueError("sphere Monte Carlo normalizer is limited to N <= 4")
    gen = (rng or RngState(0)).generator()
    i, j = np.triu_indices(dim, 1)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        g = gen.standard_normal((m, dim))
        pts = r * g / np.linalg.norm(g, axis=1, keepdims=True)
        vals = np.abs(np.prod(pts[:, j] - pts[:, i], axis=1)) ** int(beta)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    area = sphere_area(dim, r)
    return area * mean, area * math.sqrt(var / samples)


def _circle_density(beta, r: float) -> Callable[[float], float]:
    return lambda th: abs(r * math.sin(th) - r * math.cos(th)) ** int(beta) * r


# kinks of |sin - cos| on [0, 2 pi)
_CIRCLE_KINKS = (math.pi / 4, 5 * math.pi / 4)


def _circle_integral(f, a: float, b: float, tol: float) -> float:
    pts = [a] + [k for k in _CIRCLE_KINKS if a < k < b] + [b]
    return sum(quad_gk(f, lo, hi, tol)[0] for lo, hi in zip(pts[:-1], pts[1:]))


def circle_normalizer(beta, r: float, tol: float = 1e-13) -> float:
    """N = 2 normalizer by quadrature over the circle."""
    return _circle_integral(_circle_density(beta, r), 0.0, 2 * math.pi, tol)


def marginal_cdf_n2(beta, r: float, x: float, tol: float = 1e-13) -> float:
    """P(lambda_1 <= x) under the normalized N = 2 joint density on the circle of radius r."""
    if x <= -r:
        return 0.0
    if x >= r:
        return 1.0
    theta0 = math.acos(x / r)
    f = _circle_density(beta, r)
    return _circle_integral(f, theta0, 2 * math.pi - theta0, tol) / circle_normalizer(beta, r, tol)


def marginal_density_n2(beta, r: float, x: float) -> float:
    """Push the normalized N = 2 joint density forward along lambda_1 = r cos(theta)."""
    if abs(x) >= r:
        return 0.0
    theta0 = math.acos(x / r)
    z = circle_normalizer(beta, r)
    f = _circle_density(beta, r)
    jac = r * abs(math.sin(theta0))
    return (f(theta0) + f(2 * math.pi - theta0)) / (z * jac)
