"""Dense complex linear algebra: Hermitian eigendecompositions, unitary
exponentials of Hermitian generators, Kronecker products and partial traces.

Everything is a pure function of immutable inputs; results are fresh arrays.
Backed by numpy's LAPACK bindings.
"""

from __future__ import annotations

import string
from typing import NamedTuple, Sequence

import numpy as np

from .config import LINALG_TOL
from .errors import DimensionMismatch, NoConvergence, NotHermitian


class HermEig(NamedTuple):
    values: np.ndarray   # real eigenvalues, ascending
    vectors: np.ndarray  # unitary matrix whose columns are eigenvectors


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entry of |A - A^dagger|."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def herm_eig(a: np.ndarray, tol: float = LINALG_TOL) -> HermEig:
    """Eigendecomposition A = V diag(w) V^dagger of a Hermitian matrix.

    Raises NotHermitian if max |A - A^dagger| exceeds `tol`, NoConvergence if
    the LAPACK iteration fails.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermEig(values, vectors)


def unitary_exp(h: np.ndarray, t: float = 1.0, tol: float = LINALG_TOL) -> np.ndarray:
    """exp(-i t H) for Hermitian H, via eigendecomposition.

    Exact up to rounding at these matrix sizes; no scaling-and-squaring.
    """
    values, vectors = herm_eig(h, tol=tol)
    phases = np.exp(-1j * t * values)
    return (vectors * phases) @ vectors.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product A (x) B."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all subsystems not listed in `keep`.

    `dims` lists the subsystem dimensions of rho (a prod(dims)-square matrix);
    `keep` is a set of subsystem indices. The kept subsystems stay in their
    original relative order. Trace-preserving: tr(result) = tr(rho).
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(
            f"rho has shape {rho.shape}, dims {dims} require {(total, total)}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {n} subsystems")

    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise DimensionMismatch("too many subsystems for einsum-based partial trace")
    row, col, out_row, out_col = [], [], [], []
    pool = iter(letters)
    for i in range(n):
        if i in keep:
            r, c = next(pool), next(pool)
            row.append(r)
            col.append(c)
            out_row.append(r)
            out_col.append(c)
        else:
            t = next(pool)
            row.append(t)
            col.append(t)
    subscripts = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    reduced = np.einsum(subscripts, rho.reshape(dims + dims))
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)
