"""Brute-force eigenvalue oracle for small self-adjoint matrices.

Roots of the characteristic polynomial det(lambda I - A), where the
determinant is expanded by permutations. For quaternion matrices the Moore
determinant is used: it is real on self-adjoint matrices and its roots are
the N quaternionic eigenvalues, so no complex embedding is involved.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import brentq

from .matrix import Quaternion, SelfAdjointMatrix, frobenius_norm


def _cycles_moore_order(perm: tuple[int, ...]) -> list[list[int]]:
    # each cycle starts at its smallest element; cycles by decreasing start
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append(cyc)
    cycles.sort(key=lambda c: c[0], reverse=True)
    return cycles


def _sign(perm: tuple[int, ...]) -> int:
    s = 1
    for cyc in _cycles_moore_order(perm):
        if len(cyc) % 2 == 0:
            s = -s
    return s


def moore_determinant(entries: list[list[Quaternion]]) -> float:
    n = len(entries)
    total = 0.0
    for perm in itertools.permutations(range(n)):
        prod = Quaternion(1.0)
        for cyc in _cycles_moore_order(perm):
            for idx, i in enumerate(cyc):
                j = cyc[(idx + 1) % len(cyc)]
                prod = prod * entries[i][j]
        total += _sign(perm) * prod.a
    return total


def characteristic_value(a: SelfAdjointMatrix, lam: float) -> float:
    """det(lambda I - A), via the Moore determinant for every beta."""
    n = a.dim
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            e = a.entry(i, j)
            q = e if isinstance(e, Quaternion) else Quaternion(float(np.real(e)), float(np.imag(e)))
            q = -q
            if i == j:
                q = q + lam
            row.append(q)
        rows.append(row)
    return moore_determinant(rows)


def charpoly_roots(a: SelfAdjointMatrix, grid: int = 20001, xtol: float = 1e-15) -> np.ndarray:
    """All N real roots of det(lambda I - A), bracketed on a grid and refined by Brent's method.

    The polynomial is interpolated from N+1 determinant values to locate sign
    changes cheaply; each bracket is then refined on the determinant itself.
    Raises ArithmeticError if fewer than N simple roots are found.
    """
    n = a.dim
    bound = frobenius_norm(a) * (1 + 1e-9) + 1e-12
    nodes = bound * np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    vals = [characteristic_value(a, float(x)) for x in nodes]
    coeffs = np.polynomial.polynomial.polyfit(nodes, vals, n)
    f = lambda x: characteristic_value(a, float(x))
    for size in (grid, 10 * grid, 100 * grid):
        xs = np.linspace(-bound, bound, size)
        ps = np.polynomial.polynomial.polyval(xs, coeffs)
        roots = []
        for k in np.nonzero(ps == 0)[0]:
            roots.append(float(xs[k]))
        idx = np.nonzero(ps[:-1] * ps[1:] < 0)[0]
        for k in idx:
            lo, hi = float(xs[k]), float(xs[k + 1])
            flo, fhi = f(lo), f(hi)
            if flo == 0.0:
                roots.append(lo)
            elif fhi == 0.0:
                roots.append(hi)
            elif flo * fhi < 0:
                roots.append(brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200))
        if len(roots) == n:
            return np.sort(np.array(roots))
    raise ArithmeticError(f"found {len(roots)} of {n} characteristic roots (clustered spectrum?)")


def eigenvalues_bruteforce(a: SelfAdjointMatrix) -> np.ndarray:
    if a.dim == 1:
        return np.array([float(a.diag[0])])
    return charpoly_roots(a)


__all__ = ["moore_determinant", "characteristic_value", "charpoly_roots", "eigenvalues_bruteforce"]
