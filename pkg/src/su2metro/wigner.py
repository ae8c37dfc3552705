"""Spherical quasiprobability grids for spin states.

Spherical-tensor decomposition of a spin-J density operator with the overlap
normalization ((2J+1)/(4pi)) * Int W_rho W_sigma dOmega = tr(rho sigma),
evaluated on uniform angle grids. Clebsch-Gordan coefficients come from the
Racah closed form in exact integer arithmetic; spherical harmonics from the
standard fully-normalized associated-Legendre recursion (stable upward in
degree). Quadrature over the default grid is exact for band-limited
functions: Clenshaw-Curtis in cos(theta) (uniform theta nodes are
Chebyshev-Lobatto points) times the periodic trapezoid rule in phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch
from .spinrep import ProbeState, SpinRep


# --- Clebsch-Gordan ----------------------------------------------------------

def _as_doubled(value) -> int:
    doubled = round(2 * float(value))
    if abs(2 * float(value) - doubled) > 1e-9:
        raise ValueError(f"{value} is not integer or half-integer")
    return doubled


@lru_cache(maxsize=200_000)
def _cg_doubled(tj1: int, tm1: int, tj2: int, tm2: int, tj: int, tm: int) -> float:
    if tm1 + tm2 != tm:
        return 0.0
    if not (abs(tj1 - tj2) <= tj <= tj1 + tj2) or (tj1 + tj2 + tj) % 2 != 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm) > tj:
        return 0.0
    if (tj1 + tm1) % 2 != 0 or (tj2 + tm2) % 2 != 0 or (tj + tm) % 2 != 0:
        return 0.0

    f = math.factorial

    def half(x: int) -> int:
        assert x % 2 == 0
        return x // 2

    prefactor = Fraction(
        (tj + 1)
        * f(half(tj1 + tj2 - tj)) * f(half(tj1 - tj2 + tj)) * f(half(-tj1 + tj2 + tj)),
        f(half(tj1 + tj2 + tj) + 1))
    prefactor *= Fraction(
        f(half(tj + tm)) * f(half(tj - tm)) * f(half(tj1 - tm1)) * f(half(tj1 + tm1))
        * f(half(tj2 - tm2)) * f(half(tj2 + tm2)))

    total = Fraction(0)
    k_min = max(0, half(tj2 - tm1 - tj), half(tj1 + tm2 - tj))
    k_max = min(half(tj1 + tj2 - tj), half(tj1 - tm1), half(tj2 + tm2))
    for k in range(k_min, k_max + 1):
        denom = (f(k) * f(half(tj1 + tj2 - tj) - k) * f(half(tj1 - tm1) - k)
                 * f(half(tj2 + tm2) - k) * f(half(tj - tj2 + tm1) + k)
                 * f(half(tj - tj1 - tm2) + k))
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    square = prefactor * total * total
    value = math.sqrt(float(square))
    return value if total > 0 else -value


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """<j1 m1; j2 m2 | j m> in the Condon-Shortley convention.

    Selection-rule violations (triangle, magnetic numbers, parity) return 0.
    """
    return _cg_doubled(_as_doubled(j1), _as_doubled(m1), _as_doubled(j2),
                       _as_doubled(m2), _as_doubled(j), _as_doubled(m))


# --- spherical tensor operators ----------------------------------------------

def spherical_tensor(rep: SpinRep, k: int, q: int) -> np.ndarray:
    """T_kq with <J m'|T_kq|J m> = sqrt((2k+1)/(2J+1)) <J m; k q|J m'>.

    Orthonormal under the Hilbert-Schmidt inner product.
    """
    dim = rep.dim
    tj = rep.two_j
    out = np.zeros((dim, dim), dtype=complex)
    scale = math.sqrt((2 * k + 1) / dim)
    for col in range(dim):
        tm = tj - 2 * col
        tmp = tm + 2 * q
        if abs(tmp) > tj:
            continue
        row = (tj - tmp) // 2
        out[row, col] = scale * _cg_doubled(tj, tm, 2 * k, 2 * q, tj, tmp)
    return out


def tensor_coefficients(state: ProbeState) -> np.ndarray:
    """rho_kq = <psi|T_kq^dagger|psi>, indexed [k, k+q] with q = -k..k."""
    if state.tensor:
        raise DimensionMismatch("grids are defined for single-copy states")
    rep = state.rep
    kmax = rep.two_j
    coeffs = np.zeros((kmax + 1, 2 * kmax + 1), dtype=complex)
    psi = state.amps
    for k in range(kmax + 1):
        for q in range(-k, k + 1):
            t = spherical_tensor(rep, k, q)
            coeffs[k, k + q] = np.vdot(psi, t.conj().T @ psi)
    return coeffs


# --- spherical harmonics -----------------------------------------------------

def _normalized_legendre(kmax: int, q: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre P-bar_k^q(x) for k = q..kmax.

    Includes the Condon-Shortley phase; rows indexed k - q. Upward recursion
    in degree is stable for these desk-scale orders.
    """
    x = np.asarray(x, dtype=float)
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    rows = np.zeros((kmax - q + 1, x.shape[0]))
    start = math.sqrt(1 / (4 * math.pi))
    for m in range(1, q + 1):
        start *= -math.sqrt((2 * m + 1) / (2 * m))
    rows[0] = start * sin_theta ** q
    if kmax == q:
        return rows
    rows[1] = math.sqrt(2 * q + 3) * x * rows[0]
    for k in range(q + 2, kmax + 1):
        a = math.sqrt((4 * k * k - 1) / (k * k - q * q))
        b = math.sqrt((2 * k + 1) * ((k - 1) ** 2 - q * q)
                      / ((2 * k - 3) * (k * k - q * q)))
        rows[k - q] = a * x * rows[k - q - 1] - b * rows[k - q - 2]
    return rows


def spherical_harmonic(k: int, q: int, thetas, phis) -> np.ndarray:
    """Y_kq at paired angles (used as the test surface for the recursion)."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    shape = thetas.shape
    aq = abs(q)
    rows = _normalized_legendre(k, aq, np.cos(thetas).ravel())
    base = (rows[k - aq] * np.exp(1j * aq * phis.ravel())).reshape(shape)
    if q >= 0:
        return base
    return (-1) ** aq * base.conj()


# --- grids and quadrature ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerGrid:
    two_j: int
    thetas: np.ndarray   # polar angles, uniform on [0, pi] inclusive
    phis: np.ndarray     # azimuths, uniform on [0, 2 pi) exclusive
    values: np.ndarray   # (n_theta, n_phi) real


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Weights for Int_{-1}^{1} f(x) dx at nodes x_j = cos(j pi / (n-1)).

    Interpolatory (Clenshaw-Curtis): exact for polynomials of degree n-1
    when n is odd. Uniform theta nodes on [0, pi] map to exactly these
    Chebyshev-Lobatto points.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    big_n = n - 1
    js = np.arange(n)
    ks = np.arange(0, big_n // 2 + 1)
    # moments of cos(2k theta): Int_0^pi cos(2k theta) sin(theta) dtheta
    moments = 2.0 / (1.0 - 4.0 * ks ** 2)
    d = np.ones_like(moments)
    d[0] = 0.5
    if big_n % 2 == 0 and big_n > 0:
        d[-1] = 0.5
    angles = np.outer(2 * ks, js) * math.pi / big_n
    weights = (2.0 / big_n) * (d * moments) @ np.cos(angles)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


def _evaluate(coeffs: np.ndarray, two_j: int, x: np.ndarray,
              phis: np.ndarray, outer: bool) -> np.ndarray:
    """Assemble sqrt(4 pi / (2J+1)) sum_kq rho_kq Y_kq, paired or outer."""
    kmax = two_j
    shape = (x.shape[0], phis.shape[0]) if outer else x.shape
    total = np.zeros(shape)
    for q in range(0, kmax + 1):
        rows = _normalized_legendre(kmax, q, x)
        if outer:
            phase = np.exp(1j * q * phis)[None, :]
        else:
            phase = np.exp(1j * q * phis)
        radial = np.zeros(x.shape[0], dtype=complex)
        for k in range(q, kmax + 1):
            radial = radial + coeffs[k, k + q] * rows[k - q]
        if outer:
            term = radial[:, None] * phase
        else:
            term = radial * phase
        total += term.real if q == 0 else 2.0 * term.real
    return total * math.sqrt(4 * math.pi / (two_j + 1))


def spin_wigner(state: ProbeState, n_theta: int = 181, n_phi: int = 360) -> WignerGrid:
    """Quasiprobability grid of a pure spin state on the full sphere."""
    coeffs = tensor_coefficients(state)
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    values = _evaluate(coeffs, state.rep.two_j, np.cos(thetas), phis, outer=True)
    return WignerGrid(two_j=state.rep.two_j, thetas=thetas, phis=phis, values=values)


def wigner_pointwise(state: ProbeState, thetas, phis) -> np.ndarray:
    """The same function evaluated at paired (theta, phi) points."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if thetas.shape != phis.shape:
        raise DimensionMismatch("paired evaluation needs equal-length angle arrays")
    coeffs = tensor_coefficients(state)
    return _evaluate(coeffs, state.rep.two_j, np.cos(thetas), phis, outer=False)


def _quad_weights(grid: WignerGrid) -> tuple[np.ndarray, float]:
    return clenshaw_curtis_weights(grid.thetas.shape[0]), 2 * math.pi / grid.phis.shape[0]


def sphere_integral(grid: WignerGrid) -> float:
    """((2J+1)/(4 pi)) Int W dOmega; equals 1 for a unit-trace state."""
    w_theta, w_phi = _quad_weights(grid)
    raw = float(w_theta @ grid.values.sum(axis=1)) * w_phi
    return (grid.two_j + 1) / (4 * math.pi) * raw


def sphere_overlap(a: WignerGrid, b: WignerGrid) -> float:
    """((2J+1)/(4 pi)) Int W_a W_b dOmega; equals tr(rho sigma)."""
    if a.values.shape != b.values.shape or a.two_j != b.two_j:
        raise DimensionMismatch("grids must share their representation and mesh")
    w_theta, w_phi = _quad_weights(a)
    raw = float(w_theta @ (a.values * b.values).sum(axis=1)) * w_phi
    return (a.two_j + 1) / (4 * math.pi) * raw


def imaginary_defect(state: ProbeState, n_theta: int = 61, n_phi: int = 72) -> float:
    """Max |imaginary part| when the grid is assembled without pairing tricks."""
    coeffs = tensor_coefficients(state)
    rep = state.rep
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    total = np.zeros((n_theta, n_phi), dtype=complex)
    for k in range(rep.two_j + 1):
        for q in range(-k, k + 1):
            ylm = spherical_harmonic(k, q, *np.meshgrid(thetas, phis, indexing="ij"))
            total += coeffs[k, k + q] * ylm
    return float(np.max(np.abs(total.imag))) * math.sqrt(4 * math.pi / rep.dim)
