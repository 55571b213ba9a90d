"""Eigenvalues of self-adjoint matrices for beta = 1, 2, 4.

All three cases go through one real symmetric solve: complex matrices are
realified (every eigenvalue doubled) and quaternion matrices are embedded in
C and then realified (every eigenvalue quadrupled). The degenerate groups
are collapsed after checking that they really are degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix import SelfAdjointMatrix, frobenius_norm, real_form

PAIR_RTOL = 1e-8
PAIR_ATOL = 1e-12
SWEEPS_PER_DIM = 30


class EigenError(ArithmeticError):
    pass


class PairingFailure(EigenError):
    """Eigenvalues that must coincide after realification came out apart."""


class ConvergenceFailure(EigenError):
    pass


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    residual: float

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def householder_tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce a real symmetric matrix to tridiagonal form, Q^T A Q = T.

    Returns the diagonal, the sub-diagonal and the accumulated orthogonal Q.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1 :, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        alpha = -math.copysign(xnorm, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        a[k + 1 :, :] -= 2.0 * np.outer(v, v @ a[k + 1 :, :])
        a[:, k + 1 :] -= 2.0 * np.outer(a[:, k + 1 :] @ v, v)
        q[:, k + 1 :] -= 2.0 * np.outer(q[:, k + 1 :] @ v, v)
    return np.diagonal(a).copy(), np.diagonal(a, -1).copy(), q


def tridiagonal_ql(d, e, z: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``d`` is the diagonal, ``e`` the sub-diagonal (length n-1). If ``z`` is
    given its columns are rotated along, so passing the Householder Q yields
    eigenvectors of the original matrix. Eigenvalues come back unsorted.
    """
    d = [float(x) for x in d]
    n = len(d)
    e = [float(x) for x in e] + [0.0]
    if z is not None:
        z = np.array(z, dtype=np.float64)
    eps = np.finfo(float).eps
    budget = SWEEPS_PER_DIM * max(n, 1)
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            budget -= 1
            if budget < 0:
                raise ConvergenceFailure(f"QL iteration did not converge within {SWEEPS_PER_DIM * n} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    f_col = z[:, i + 1].copy()
                    z[:, i + 1] = s * z[:, i] + c * f_col
                    z[:, i] = c * z[:, i] - s * f_col
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d), z


def symmetric_eigh_native(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder tridiagonalization followed by implicit QL; sorted output."""
    d, e, q = householder_tridiagonalize(a)
    w, v = tridiagonal_ql(d, e, q)
    order = np.argsort(w)
    return w[order], v[:, order]


def _real_eigh(a: np.ndarray, method: str) -> tuple[np.ndarray, np.ndarray]:
    if method == "native":
        return symmetric_eigh_native(a)
    if method == "lapack":
        try:
            return np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
    raise ValueError(f"unknown eigensolver method {method!r}")


def _collapse(values: np.ndarray, mult: int, norm: float) -> np.ndarray:
    if mult == 1:
        return values
    groups = values.reshape(-1, mult)
    gaps = groups[:, -1] - groups[:, 0]
    tol = max(PAIR_RTOL * norm, PAIR_ATOL)
    worst = float(gaps.max())
    if worst > tol:
        raise PairingFailure(f"degenerate group split by {worst:.3e} > tolerance {tol:.3e}")
    return groups.mean(axis=1)


def _residual(a: np.ndarray, w: np.ndarray, v: np.ndarray) -> float:
    return float(np.linalg.norm(a @ v - v * w, axis=-2).max())


def eigenvalues(a: SelfAdjointMatrix, method: str = "lapack") -> Spectrum:
    """Sorted eigenvalues of ``a``.

    ``method`` selects the real symmetric kernel: "lapack" (numpy.linalg.eigh)
    or "native" (Householder + implicit QL in this module).
    """
    dense, mult = real_form(a)
    w, v = _real_eigh(dense, method)
    vals = _collapse(np.sort(w), mult, frobenius_norm(a))
    return Spectrum(vals, _residual(dense, w, v))


def eigenvalues_many(mats: Sequence[SelfAdjointMatrix], chunk: int = 256) -> list[Spectrum]:
    """LAPACK eigenvalues for many matrices of one shape, solved in stacked chunks."""
    if not mats:
        return []
    out: list[Spectrum] = []
    for start in range(0, len(mats), chunk):
        block = mats[start : start + chunk]
        forms = [real_form(m) for m in block]
        mult = forms[0][1]
        stack = np.stack([f[0] for f in forms])
        try:
            w, v = np.linalg.eigh(stack)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
        res = np.linalg.norm(stack @ v - v * w[:, None, :], axis=-2).max(axis=-1)
        for m, wi, ri in zip(block, w, res):
            out.append(Spectrum(_collapse(wi, mult, frobenius_norm(m)), float(ri)))
    return out
