"""Dense real-symmetric eigendecomposition of the reduced Hamiltonian.

Two back ends are available:

``"lapack"``
    :func:`numpy.linalg.eigh`. Default; fastest.
``"householder_ql"``
    Householder reduction to tridiagonal form followed by the implicit-shift
    QL iteration, written here in NumPy. Exposes the deflation tolerance and
    the iteration cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, EigenConvergenceError
from .model import ReducedHamiltonian

__all__ = ["EigenDecomposition", "diagonalize", "tridiagonalize", "tridiagonal_ql"]

METHODS = ("lapack", "householder_ql")


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenfrequencies (ascending) and the orthogonal transform.

    ``transform[a, alpha]`` is the amplitude of basis state ``a`` (system
    levels first, then bath modes) in normal mode ``alpha``.
    """

    frequencies: np.ndarray
    transform: np.ndarray

    @property
    def dim(self) -> int:
        return self.frequencies.shape[0]

    def reconstruct(self) -> np.ndarray:
        u = self.transform
        return (u * self.frequencies) @ u.T

    def orthogonality_error(self) -> float:
        u = self.transform
        return float(np.max(np.abs(u.T @ u - np.eye(self.dim))))

    def reconstruction_error(self, h: ReducedHamiltonian) -> float:
        """Max-abs residual relative to ``max|H_R|``."""
        scale = max(float(np.max(np.abs(h.matrix))), np.finfo(float).tiny)
        return float(np.max(np.abs(self.reconstruct() - h.matrix))) / scale


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Householder reduction ``a = q @ T @ q.T``.

    Returns the diagonal ``d``, the super-diagonal ``e`` (length n-1) and the
    accumulated orthogonal ``q``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = np.linalg.norm(x[1:])
        if alpha == 0.0:
            continue
        norm = math.hypot(x[0], alpha)
        v = x.copy()
        v[0] += math.copysign(norm, x[0])
        beta = 2.0 / np.dot(v, v)
        sub = a[k + 1:, k + 1:]
        p = beta * (sub @ v)
        w = p - (0.5 * beta * np.dot(v, p)) * v
        sub -= np.outer(v, w) + np.outer(w, v)
        a[k + 1, k] = a[k, k + 1] = -math.copysign(norm, x[0])
        a[k + 2:, k] = 0.0
        a[k, k + 2:] = 0.0
        qs = q[:, k + 1:]
        qs -= np.outer(qs @ v, beta * v)
    d = np.diag(a).copy()
    e = np.diag(a, 1).copy()
    return d, e, q


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, z: np.ndarray | None = None,
                   tol: float | None = None, max_iter: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    Rotations are accumulated into ``z`` (identity if omitted), whose columns
    become the eigenvectors of the original matrix. An off-diagonal element is
    treated as zero once ``|e_m| <= tol * (|d_m| + |d_m+1|)``.
    """
    n = d.shape[0]
    d = np.array(d, dtype=float)
    e = np.append(np.array(e, dtype=float), 0.0)
    zt = np.eye(n) if z is None else np.array(z, dtype=float).T.copy()
    if tol is None:
        tol = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise EigenConvergenceError(f"QL iteration did not converge for eigenvalue {l} after {max_iter} sweeps")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i].copy()
                zt[i] = c * zi - s * zt[i + 1]
                zt[i + 1] = s * zi + c * zt[i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, zt.T


def diagonalize(h: ReducedHamiltonian, method: str = "lapack", tol: float | None = None,
                max_iter: int = 30) -> EigenDecomposition:
    """Eigendecomposition of ``h`` with eigenfrequencies in ascending order.

    Equal eigenvalues keep the order produced by the solver; no canonical
    basis is chosen inside degenerate subspaces.
    """
    m = h.matrix
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-14 * max(1.0, float(np.max(np.abs(m))))):
        raise DomainError("reduced Hamiltonian is not symmetric")
    if method == "lapack":
        try:
            w, u = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise EigenConvergenceError(str(exc)) from exc
    elif method == "householder_ql":
        d, e, q = tridiagonalize(m)
        w, u = tridiagonal_ql(d, e, q, tol=tol, max_iter=max_iter)
    else:
        raise ValueError(f"unknown eigen method {method!r}; expected one of {METHODS}")
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(np.ascontiguousarray(w[order]), np.ascontiguousarray(u[:, order]))
