"""Self-adjoint matrices over R, C and H.

Matrices are stored as a real diagonal plus the strict upper triangle, one
row of scalar components per off-diagonal entry (1 for real, 2 for complex,
4 for quaternion). Self-adjointness is therefore structural.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class Beta(enum.IntEnum):
    """Dyson index."""

    ORTHOGONAL = 1
    UNITARY = 2
    SYMPLECTIC = 4


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __add__(self, other: Quaternion) -> Quaternion:
        other = _as_quaternion(other)
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return self + (-_as_quaternion(other))

    def __rsub__(self, other) -> Quaternion:
        return _as_quaternion(other) - self

    def __mul__(self, other) -> Quaternion:
        o = _as_quaternion(other)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other) -> Quaternion:
        return _as_quaternion(other) * self

    def conjugate(self) -> Quaternion:
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm_sq(self) -> float:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def components(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def _as_quaternion(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, complex):
        return Quaternion(x.real, x.imag)
    return Quaternion(float(x))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class SelfAdjointMatrix:
    """Immutable N x N self-adjoint matrix with entries in R (beta=1), C (2) or H (4).

    ``diag`` has shape (N,); ``off`` has shape (N*(N-1)/2, beta) and holds the
    components of entry (i, j), i < j, in ``numpy.triu_indices(N, 1)`` order.
    The entry (j, i) is the conjugate of (i, j) by construction.
    """

    __slots__ = ("_beta", "_diag", "_off")

    def __init__(self, beta, diag, off=None):
        beta = Beta(beta)
        diag = _readonly(np.atleast_1d(diag))
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diag must be a non-empty vector")
        n = diag.size
        m = n * (n - 1) // 2
        if off is None:
            off = np.zeros((m, int(beta)))
        off = _readonly(off).reshape(m, int(beta))
        self._beta = beta
        self._diag = diag
        self._off = off

    @property
    def beta(self) -> Beta:
        return self._beta

    @property
    def dim(self) -> int:
        return self._diag.size

    @property
    def diag(self) -> np.ndarray:
        return self._diag

    @property
    def off(self) -> np.ndarray:
        return self._off

    def __repr__(self) -> str:
        return f"SelfAdjointMatrix(beta={int(self.beta)}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SelfAdjointMatrix):
            return NotImplemented
        return (
            self.beta == other.beta
            and np.array_equal(self.diag, other.diag)
            and np.array_equal(self.off, other.off)
        )

    __hash__ = None

    @classmethod
    def zeros(cls, beta, dim: int) -> SelfAdjointMatrix:
        return cls(beta, np.zeros(dim))

    @classmethod
    def identity(cls, beta, dim: int) -> SelfAdjointMatrix:
        return cls(beta, np.ones(dim))

    @classmethod
    def from_dense(cls, a, beta=None, atol: float | None = None) -> SelfAdjointMatrix:
        """Pack a dense real symmetric or complex Hermitian array.

        Only the upper triangle is read. With ``atol`` set, the lower triangle
        and the imaginary part of the diagonal are checked against it.
        """
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if beta is None:
            beta = Beta.UNITARY if np.iscomplexobj(a) else Beta.ORTHOGONAL
        beta = Beta(beta)
        if beta == Beta.SYMPLECTIC:
            raise ValueError("use from_quaternion_components for beta=4")
        if atol is not None:
            scale = max(1.0, float(np.abs(a).max(initial=0.0)))
            if np.abs(a - a.conj().T).max(initial=0.0) > atol * scale:
                raise ValueError("matrix is not self-adjoint")
        n = a.shape[0]
        iu = np.triu_indices(n, 1)
        upper = a[iu]
        if beta == Beta.ORTHOGONAL:
            if np.iscomplexobj(upper):
                upper = upper.real
            off = upper.reshape(-1, 1)
        else:
            upper = upper.astype(complex)
            off = np.stack([upper.real, upper.imag], axis=-1)
        return cls(beta, np.real(np.diagonal(a)), off)

    @classmethod
    def from_quaternion_components(cls, comps) -> SelfAdjointMatrix:
        """Pack an (N, N, 4) array of quaternion components (upper triangle read)."""
        comps = np.asarray(comps, dtype=np.float64)
        n = comps.shape[0]
        iu = np.triu_indices(n, 1)
        return cls(Beta.SYMPLECTIC, comps[np.arange(n), np.arange(n), 0], comps[iu])

    def entry(self, i: int, j: int):
        """Scalar entry (i, j) as float, complex or Quaternion."""
        n = self.dim
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError((i, j))
        if i == j:
            x = float(self._diag[i])
            if self.beta == Beta.UNITARY:
                return complex(x)
            if self.beta == Beta.SYMPLECTIC:
                return Quaternion(x)
            return x
        lo, hi = (i, j) if i < j else (j, i)
        k = lo * n - lo * (lo + 1) // 2 + (hi - lo - 1)
        comps = self._off[k]
        if self.beta == Beta.ORTHOGONAL:
            return float(comps[0])
        if self.beta == Beta.UNITARY:
            z = complex(comps[0], comps[1])
            return z if i < j else z.conjugate()
        q = Quaternion(*map(float, comps))
        return q if i < j else q.conjugate()

    def to_dense(self) -> np.ndarray:
        """Dense real (beta=1) or complex (beta=2) array; beta=4 goes through embed_complex."""
        n = self.dim
        if self.beta == Beta.SYMPLECTIC:
            raise ValueError("no dense scalar form for quaternion matrices; use embed_complex")
        iu = np.triu_indices(n, 1)
        if self.beta == Beta.ORTHOGONAL:
            a = np.zeros((n, n))
            a[iu] = self._off[:, 0]
            a = a + a.T
        else:
            a = np.zeros((n, n), dtype=complex)
            a[iu] = self._off[:, 0] + 1j * self._off[:, 1]
            a = a + a.conj().T
        a[np.arange(n), np.arange(n)] = self._diag
        return a

    def trace(self) -> float:
        return float(self._diag.sum())


def frobenius_norm_sq(a: SelfAdjointMatrix) -> float:
    return float(np.dot(a.diag, a.diag) + 2.0 * np.sum(a.off * a.off))


def frobenius_norm(a: SelfAdjointMatrix) -> float:
    """sqrt(Tr(A A*)), computed from the scalar components of the stored entries."""
    return math.sqrt(frobenius_norm_sq(a))


def scale(a: SelfAdjointMatrix, c: float) -> SelfAdjointMatrix:
    c = float(c)
    return SelfAdjointMatrix(a.beta, a.diag * c, a.off * c)


def embed_complex_dense(a: SelfAdjointMatrix) -> np.ndarray:
    """2N x 2N complex Hermitian array representing a quaternion matrix.

    a + bi + cj + dk maps to the block [[a+bi, c+di], [-c+di, a-bi]].
    """
    if a.beta != Beta.SYMPLECTIC:
        raise ValueError("embed_complex needs beta=4")
    n = a.dim
    q = np.zeros((n, n, 4))
    iu = np.triu_indices(n, 1)
    q[iu] = a.off
    # lower triangle holds the quaternion conjugate
    q[iu[1], iu[0]] = a.off * np.array([1.0, -1.0, -1.0, -1.0])
    q[np.arange(n), np.arange(n), 0] = a.diag
    z1 = q[..., 0] + 1j * q[..., 1]
    z2 = q[..., 2] + 1j * q[..., 3]
    out = np.empty((2 * n, 2 * n), dtype=complex)
    out[0::2, 0::2] = z1
    out[0::2, 1::2] = z2
    out[1::2, 0::2] = -z2.conj()
    out[1::2, 1::2] = z1.conj()
    return out


def embed_real_dense(a) -> np.ndarray:
    """2N x 2N real symmetric array; x + iy maps to the block [[x, -y], [y, x]]."""
    if isinstance(a, SelfAdjointMatrix):
        if a.beta != Beta.UNITARY:
            raise ValueError("embed_real needs beta=2")
        a = a.to_dense()
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    out = np.empty(a.shape[:-2] + (2 * n, 2 * n))
    out[..., 0::2, 0::2] = a.real
    out[..., 0::2, 1::2] = -a.imag
    out[..., 1::2, 0::2] = a.imag
    out[..., 1::2, 1::2] = a.real
    return out


def embed_complex(a: SelfAdjointMatrix) -> SelfAdjointMatrix:
    return SelfAdjointMatrix.from_dense(embed_complex_dense(a), beta=Beta.UNITARY)


def embed_real(a: SelfAdjointMatrix) -> SelfAdjointMatrix:
    return SelfAdjointMatrix.from_dense(embed_real_dense(a), beta=Beta.ORTHOGONAL)


def real_form(a: SelfAdjointMatrix) -> tuple[np.ndarray, int]:
    """Real symmetric dense realification of ``a`` and its eigenvalue multiplicity."""
    if a.beta == Beta.ORTHOGONAL:
        return a.to_dense(), 1
    if a.beta == Beta.UNITARY:
        return embed_real_dense(a.to_dense()), 2
    return embed_real_dense(embed_complex_dense(a)), 4


def real_dimension(beta, dim: int) -> int:
    """beta * C(N, 2) + N, the real dimension of the space of self-adjoint matrices."""
    return int(beta) * dim * (dim - 1) // 2 + dim


@dataclass(frozen=True)
class EnsembleSpec:
    """An ensemble G_beta(N, q) or S_beta(N, r).

    The spherical radius is carried as ``r_squared`` so that rational values
    (r = sqrt(8) as r_squared = 8) stay exact for the moment formulas.
    """

    beta: Beta
    dim: int
    kind: str
    q: Fraction | float | None = None
    r_squared: Fraction | float | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta", Beta(self.beta))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        if self.kind == "gaussian":
            if self.q is None or not self.q > 0:
                raise ValueError(f"q must be positive, got {self.q!r}")
            if self.r_squared is not None:
                raise ValueError("a Gaussian ensemble takes q, not a radius")
        elif self.kind == "spherical":
            if self.r_squared is None or not self.r_squared > 0:
                raise ValueError(f"radius must be positive, got r^2={self.r_squared!r}")
            if self.q is not None:
                raise ValueError("a spherical ensemble takes a radius, not q")
        else:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")

    @classmethod
    def gaussian(cls, beta, dim: int, q=1) -> EnsembleSpec:
        return cls(Beta(beta), dim, "gaussian", q=q)

    @classmethod
    def spherical(cls, beta, dim: int, r=None, r_squared=None) -> EnsembleSpec:
        if (r is None) == (r_squared is None):
            raise ValueError("give exactly one of r and r_squared")
        if r is not None:
            if not r > 0:
                raise ValueError(f"radius must be positive, got {r!r}")
            r_squared = float(r) ** 2
        return cls(Beta(beta), dim, "spherical", r_squared=r_squared)

    @property
    def n(self) -> int:
        return real_dimension(self.beta, self.dim)

    @property
    def r(self) -> float:
        if self.r_squared is None:
            raise AttributeError("Gaussian ensembles have no radius")
        return math.sqrt(self.r_squared)

    @property
    def name(self) -> str:
        tag = {1: "O", 2: "U", 4: "S"}[int(self.beta)]
        if self.kind == "gaussian":
            return f"G{tag}E(N={self.dim}, q={self.q})"
        return f"S{tag}E(N={self.dim}, r^2={self.r_squared})"
