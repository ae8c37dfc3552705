"""Quantum Fisher information for the three-parameter rotation shift model.

Covers the moment conditions an optimal probe must satisfy, the generator
rotation vectors A(theta) that factorize the QFIM away from the origin, the
QFIM itself (exact, via the symmetrized generator covariance), scalar
Cramer-Rao curves, the shifted-field QFIM computed independently through
state-vector finite differences, and the frame-invariance check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import physics_tol
from .errors import SingularQfim
from .spinrep import (CollectiveMoments, ProbeState, apply_unitary,
                      collective_moments, evolve, rotation)


def sinc(x: float) -> float:
    """sin(x)/x with a series branch near zero (sinc(0) = 1)."""
    x = float(x)
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _one_minus_sinc_over_x2(x: float) -> float:
    """(1 - sinc(x)) / x^2, finite at x = 0."""
    x = float(x)
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0
    return (1.0 - math.sin(x) / x) / (x * x)


def _two_sin2_half_over_x2(x: float) -> float:
    """2 sin^2(x/2) / x^2 = (1 - cos x) / x^2, finite at x = 0."""
    x = float(x)
    if abs(x) < 1e-4:
        x2 = x * x
        return 0.5 - x2 / 24.0 + x2 * x2 / 720.0
    return (1.0 - math.cos(x)) / (x * x)


@dataclass(frozen=True)
class AMatrixSet:
    """Vectors a_j with A^(j)(theta) = a_j . J, rows indexed by j."""

    theta: np.ndarray
    a_vectors: np.ndarray  # (3, 3), row j is a_j

    def operator(self, rep, j: int) -> np.ndarray:
        ax, ay, az = self.a_vectors[j]
        return ax * rep.jx + ay * rep.jy + az * rep.jz


def a_matrices(theta) -> AMatrixSet:
    """Closed form of the rotated-generator average entering the SLDs.

    a_j = sinc|t| e_j + (1 - sinc|t|) (t_j / |t|^2) t
          + (2 sin^2(|t|/2) / |t|^2) (e_j x t),  t = theta.
    At theta = 0 each a_j is exactly e_j.
    """
    theta = np.asarray(theta, dtype=float)
    norm = float(np.linalg.norm(theta))
    rows = np.zeros((3, 3))
    s = sinc(norm)
    c1 = _one_minus_sinc_over_x2(norm)
    c2 = _two_sin2_half_over_x2(norm)
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        rows[j] = s * e + c1 * theta[j] * theta + c2 * np.cross(e, theta)
    return AMatrixSet(theta=theta, a_vectors=rows)


@dataclass(frozen=True)
class ConditionReport:
    """Moment audit of a probe state against the optimality conditions."""

    first_moments: np.ndarray        # (3,) <J_i>
    cross_moments: np.ndarray        # (3,3) symmetrized <J_i J_l>
    variances: np.ndarray            # (3,) <J_i^2>
    target_variance: float           # J(J+1)/3
    max_residual: float
    weak_commutativity: float        # max |Im <J_i J_l>|

    def to_dict(self) -> dict:
        return {
            "first_moments": self.first_moments.tolist(),
            "cross_moments": self.cross_moments.tolist(),
            "variances": self.variances.tolist(),
            "target_variance": self.target_variance,
            "max_residual": self.max_residual,
            "weak_commutativity": self.weak_commutativity,
        }


def check_conditions(state: ProbeState,
                     moments: CollectiveMoments | None = None) -> ConditionReport:
    """Evaluate first moments, symmetrized cross moments and variances.

    max_residual is zero exactly when the probe satisfies
    <J_i> = 0, <J_i J_l>_sym = 0 (i != l), <J_i^2> = J(J+1)/3.
    """
    if moments is None:
        moments = collective_moments(state)
    j = state.rep.j
    target = j * (j + 1) / 3
    sym = moments.symmetrized
    variances = np.diag(sym).copy()
    off = sym - np.diag(variances)
    residual = max(float(np.max(np.abs(moments.first))),
                   float(np.max(np.abs(off))),
                   float(np.max(np.abs(variances - target))))
    weak = float(np.max(np.abs(moments.antisymmetric_imag)))
    return ConditionReport(first_moments=moments.first, cross_moments=sym,
                           variances=variances, target_variance=target,
                           max_residual=residual, weak_commutativity=weak)


@dataclass(frozen=True)
class Qfim:
    """Fisher information matrix with its evaluation point."""

    theta: np.ndarray
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def generator_covariance(state: ProbeState) -> np.ndarray:
    """Symmetrized covariance Re<J_i J_l> - <J_i><J_l> of the initial state."""
    mom = collective_moments(state)
    cov = mom.symmetrized - np.outer(mom.first, mom.first)
    return (cov + cov.T) / 2


def qfim(state: ProbeState, theta=(0.0, 0.0, 0.0)) -> Qfim:
    """Pure-state QFIM of exp(-i theta . J)|psi> in factorized form.

    F(theta)_jk = 4 a_j . Cov(J) . a_k with Cov evaluated in the initial
    state, which reduces at the origin to 4 Re[<J_j J_k> - <J_j><J_k>].
    """
    theta = np.asarray(theta, dtype=float)
    a = a_matrices(theta).a_vectors
    cov = generator_covariance(state)
    matrix = 4.0 * a @ cov @ a.T
    return Qfim(theta=theta, matrix=(matrix + matrix.T) / 2)


def qfim_fd_fidelity(state: ProbeState, theta=(0.0, 0.0, 0.0),
                     step: float = 1e-4) -> np.ndarray:
    """Independent QFIM oracle: central-difference Hessian of 1 - fidelity.

    F_ij = 2 d^2/(d delta_i d delta_j) [1 - |<psi(theta)|psi(theta+delta)>|^2].
    """
    theta = np.asarray(theta, dtype=float)
    base = evolve(state, theta).amps

    def infidelity(delta):
        other = evolve(state, theta + delta).amps
        return 1.0 - abs(np.vdot(base, other)) ** 2

    h = step
    out = np.zeros((3, 3))
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        out[i, i] = 2.0 * (infidelity(ei) + infidelity(-ei)) / h ** 2
        for j in range(i + 1, 3):
            ej = np.zeros(3)
            ej[j] = h
            mixed = (infidelity(ei + ej) - infidelity(ei - ej)
                     - infidelity(-ei + ej) + infidelity(-ei - ej)) / (4 * h ** 2)
            out[i, j] = out[j, i] = 2.0 * mixed
    return out


def shifted_qfim(state: ProbeState, xi, theta, step: float = 1e-3) -> Qfim:
    """QFIM of the shifted-probe family exp(-i (theta - xi) . J)|psi>.

    Computed independently of the factorized form, from fourth-order central
    differences of the state vectors:
    F_ij = 4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>].
    Agrees with qfim(state, theta - xi) to ~1e-9.
    """
    xi = np.asarray(xi, dtype=float)
    theta = np.asarray(theta, dtype=float)

    def family(delta):
        return evolve(state, theta + delta - xi).amps

    center = family(np.zeros(3))
    derivs = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        d = (-family(2 * step * e) + 8 * family(step * e)
             - 8 * family(-step * e) + family(-2 * step * e)) / (12 * step)
        derivs.append(d)
    matrix = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            val = 4.0 * (np.vdot(derivs[i], derivs[j])
                         - np.vdot(derivs[i], center) * np.vdot(center, derivs[j])).real
            matrix[i, j] = matrix[j, i] = val
    return Qfim(theta=theta, matrix=matrix)


def _cofactor_inverse(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Adjugate-based inverse of a small symmetric matrix, with determinant."""
    n = m.shape[0]
    cof = np.zeros_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    det = float(np.sum(m[0, :] * cof[0, :]))
    return cof.T / det, det


def trace_inverse(f: Qfim, singular_tol: float | None = None) -> tuple[float, float]:
    """tr F^-1 via the explicit adjugate, plus the 2-norm condition number.

    Raises SingularQfim when the smallest eigenvalue is below singular_tol
    (default: the physics tolerance, overridable through SU2M_TOL).
    """
    if singular_tol is None:
        singular_tol = physics_tol()
    eig = np.linalg.eigvalsh(f.matrix)
    if eig[0] < singular_tol:
        raise SingularQfim(f"min eigenvalue {eig[0]:.3e} below {singular_tol:.1e}")
    inv, _ = _cofactor_inverse(f.matrix)
    cond = float(abs(eig[-1]) / abs(eig[0]))
    return float(np.trace(inv)), cond


def optimal_scalar_bound(n_qubits: int, t: float) -> float:
    """(3 + 6 / sinc^2(t/2)) / (N (N + 2)), the curve optimal probes attain."""
    n = int(n_qubits)
    return (3.0 + 6.0 / sinc(t / 2) ** 2) / (n * (n + 2))


@dataclass(frozen=True)
class CurvePoint:
    t: float
    trace_inv: float          # nan when singular
    min_eigenvalue: float
    singular: bool


def scalar_crb_curve(state: ProbeState, direction, t_grid,
                     singular_tol: float | None = None) -> list[CurvePoint]:
    """tr F(t * direction)^-1 over a grid; singular points flagged, not fatal."""
    if singular_tol is None:
        singular_tol = physics_tol()
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    points = []
    for t in t_grid:
        f = qfim(state, float(t) * direction)
        min_eig = f.min_eigenvalue()
        if min_eig < singular_tol:
            points.append(CurvePoint(float(t), float("nan"), min_eig, True))
            continue
        value, _ = trace_inverse(f, singular_tol=singular_tol)
        points.append(CurvePoint(float(t), value, min_eig, False))
    return points


def su2_invariance_check(state: ProbeState, trials: int = 20,
                         n_thetas: int = 5, rng=None) -> float:
    """Max QFIM deviation under random SU(2) frame changes of the probe.

    Vanishes (< 1e-9) for probes whose generator covariance is proportional
    to the identity; generic probes deviate at order one.
    """
    rng = np.random.default_rng(rng)
    thetas = rng.normal(size=(n_thetas, 3))
    reference = [qfim(state, th).matrix for th in thetas]
    worst = 0.0
    for _ in range(trials):
        v = rotation(state.rep, rng.normal(size=3))
        rotated = apply_unitary(state, v)
        for th, ref in zip(thetas, reference):
            dev = float(np.max(np.abs(qfim(rotated, th).matrix - ref)))
            worst = max(worst, dev)
    return worst
