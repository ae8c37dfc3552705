"""Four-parameter estimation on d = 4 qudits.

The four coupled generators are the real off-diagonal basis elements
X12, X24, X34, X13 (relabeled X0..X3), cyclically permuted by the
permutation unitary W and sign-flipped in pairs by the diagonal unitary Z.
The module builds these, closes the matrix group <W, Z> in the defining
and two-copy representations, searches the desk-scale representation list
for invariant states, and evaluates the circulant information matrix and
its moment conditions at the origin.

The realized matrices satisfy W^4 = Z^4 = 1 and (ZW)^4 = -1: the
presentation <W, Z | W^4 = Z^4 = (ZW)^4 = 1> holds for the central
quotient, and the closure orders below are regression anchors, not
externally given values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, ZeroProjection
from .groups import FiniteGroupRep, build_custom_group
from .metrology import Qfim

DIM = 4
GENERATOR_LABELS = ("X12", "X24", "X34", "X13")


def matrix_unit(i: int, j: int) -> np.ndarray:
    e = np.zeros((DIM, DIM), dtype=complex)
    e[i, j] = 1.0
    return e


def x_op(i: int, j: int) -> np.ndarray:
    return matrix_unit(i, j) + matrix_unit(j, i)


def y_op(i: int, j: int) -> np.ndarray:
    return 1j * matrix_unit(i, j) - 1j * matrix_unit(j, i)


@dataclass(frozen=True, eq=False)
class Su4Problem:
    generators: list          # [X12, X24, X34, X13] in cyclic order
    w: np.ndarray             # permutation unitary cycling the generators
    z: np.ndarray             # diagonal unitary flipping X0 and X3
    group: FiniteGroupRep     # closure of <W, Z> in the defining rep

    @property
    def casimir(self) -> np.ndarray:
        """Sum of squares of the full Hermitian basis (E_kk, X_ij, Y_ij)."""
        total = sum(matrix_unit(k, k) @ matrix_unit(k, k) for k in range(DIM))
        for i in range(DIM):
            for j in range(i + 1, DIM):
                total = total + x_op(i, j) @ x_op(i, j) + y_op(i, j) @ y_op(i, j)
        return total


def build_su4_problem() -> Su4Problem:
    """Generators, symmetries and the defining-rep group closure."""
    xs = [x_op(0, 1), x_op(1, 3), x_op(2, 3), x_op(0, 2)]
    w = np.zeros((DIM, DIM), dtype=complex)
    # basis map e1 -> e3, e2 -> e1, e3 -> e4, e4 -> e2
    w[2, 0] = w[0, 1] = w[3, 2] = w[1, 3] = 1.0
    z = np.diag(np.exp(-0.5j * math.pi * np.array([1.0, -1.0, -1.0, -1.0])))
    group = build_custom_group([w, z], name="wz_defining")
    return Su4Problem(generators=xs, w=w, z=z, group=group)


def two_copy_group(problem: Su4Problem) -> FiniteGroupRep:
    """Closure of g (x) conj(g) over the generators; fixes vec(M) iff [M, G] = 0."""
    gens = [linalg.kron(problem.w, problem.w.conj()),
            linalg.kron(problem.z, problem.z.conj())]
    return build_custom_group(gens, name="wz_two_copy")


def symmetric_square_group(problem: Su4Problem) -> FiniteGroupRep:
    """Closure of Sym^2(g) on the 10-dimensional symmetric square."""
    pairs = [(i, i) for i in range(DIM)] + [(i, j) for i in range(DIM)
                                            for j in range(i + 1, DIM)]
    isometry = np.zeros((DIM * DIM, len(pairs)))
    for col, (i, j) in enumerate(pairs):
        if i == j:
            isometry[DIM * i + i, col] = 1.0
        else:
            isometry[DIM * i + j, col] = isometry[DIM * j + i, col] = 1 / math.sqrt(2)
    gens = [isometry.T @ linalg.kron(g, g) @ isometry for g in (problem.w, problem.z)]
    return build_custom_group(gens, name="wz_sym_square")


def trivial_multiplicities(problem: Su4Problem) -> dict:
    """Trivial-irrep multiplicity of <W, Z> in each searched space."""
    out = {}
    for label, group in (("defining", problem.group),
                         ("two_copy", two_copy_group(problem)),
                         ("symmetric_square", symmetric_square_group(problem))):
        pi = sum(group.elements) / group.order
        out[label] = round(np.trace(pi).real)
    return out


def entangled_probe() -> np.ndarray:
    """(1/2) sum_i |i>|i>, the maximally entangled two-copy state."""
    return np.eye(DIM, dtype=complex).ravel() / 2.0


def twirled_probe(problem: Su4Problem, seed=0, space: str = "two_copy") -> np.ndarray:
    """Project a seeded random state into the invariant subspace of a space.

    Raises ZeroProjection where the trivial irrep is absent (the defining
    representation has none).
    """
    rng = np.random.default_rng(seed)
    if space == "two_copy":
        group = two_copy_group(problem)
        size = DIM * DIM
    elif space == "defining":
        group = problem.group
        size = DIM
    else:
        raise DimensionMismatch(f"unknown space {space!r}")
    pi = sum(group.elements) / group.order
    vec = rng.normal(size=size) + 1j * rng.normal(size=size)
    projected = pi @ vec
    norm = np.linalg.norm(projected)
    if norm < 1e-10:
        raise ZeroProjection(f"no invariant component in the {space} space")
    return projected / norm


def z4_twirled_probe(problem: Su4Problem, seed=0) -> np.ndarray:
    """Project onto the W-only (cyclic) invariant subspace of the two-copy rep.

    Larger than the full <W, Z> subspace, so it exercises the circulant
    structure with generically nonzero off-diagonal entries.
    """
    rng = np.random.default_rng(seed)
    wc = linalg.kron(problem.w, problem.w.conj())
    group = build_custom_group([wc], name="w_two_copy")
    pi = sum(group.elements) / group.order
    vec = rng.normal(size=DIM * DIM) + 1j * rng.normal(size=DIM * DIM)
    projected = pi @ vec
    norm = np.linalg.norm(projected)
    if norm < 1e-10:
        raise ZeroProjection("no cyclic-invariant component")
    return projected / norm


def _lift(problem: Su4Problem, vec: np.ndarray):
    """Return the generator application function for the state's space."""
    vec = np.asarray(vec, dtype=complex)
    if vec.shape == (DIM,):
        return lambda op, v: op @ v
    if vec.shape == (DIM * DIM,):
        return lambda op, v: (op @ v.reshape(DIM, DIM)).ravel()
    raise DimensionMismatch(
        f"state must live in C^4 or C^16, got shape {vec.shape}")


def su4_moments(problem: Su4Problem, vec: np.ndarray):
    """<X_i> and <X_i X_j> for the four cyclic generators (X (x) 1 lifted)."""
    act = _lift(problem, vec)
    vec = np.asarray(vec, dtype=complex)
    images = [act(x, vec) for x in problem.generators]
    first = np.array([np.vdot(vec, img).real for img in images])
    second = np.array([[np.vdot(images[i], images[j]) for j in range(4)]
                       for i in range(4)])
    return first, second


def su4_qfim(problem: Su4Problem, vec: np.ndarray) -> Qfim:
    """F(0)_ij = 2 <[X_i - <X_i>, X_j - <X_j>]_+> for the four parameters."""
    first, second = su4_moments(problem, vec)
    sym = (second + second.conj().T).real / 2
    matrix = 4.0 * (sym - np.outer(first, first))
    return Qfim(theta=np.zeros(4), matrix=(matrix + matrix.T) / 2)


def circulant_pattern_defect(matrix: np.ndarray) -> float:
    """Max spread within the diagonal, near-neighbor and opposite classes."""
    classes = {0: [], 1: [], 2: []}
    for i in range(4):
        for j in range(4):
            gap = min((j - i) % 4, (i - j) % 4)
            classes[gap].append(matrix[i, j])
    return max(float(np.ptp(vals)) for vals in classes.values())


@dataclass(frozen=True)
class Su4ConditionReport:
    first_moments: np.ndarray     # (4,) <X_i>
    second_moments: np.ndarray    # (4,) <X_i^2>
    a_value: float                # mean of <X_i^2>
    a_upper_bound: float          # <Casimir>/4 in the state's space
    cross_near: np.ndarray        # (4,) symmetrized <X_i X_{i+1}>
    cross_opposite: np.ndarray    # (2,) symmetrized <X_i X_{i+2}>
    max_residual: float

    def to_dict(self) -> dict:
        return {
            "first_moments": self.first_moments.tolist(),
            "second_moments": self.second_moments.tolist(),
            "a_value": self.a_value,
            "a_upper_bound": self.a_upper_bound,
            "cross_near": self.cross_near.tolist(),
            "cross_opposite": self.cross_opposite.tolist(),
            "max_residual": self.max_residual,
        }


def su4_conditions(problem: Su4Problem, vec: np.ndarray) -> Su4ConditionReport:
    """Moment audit against <X_i> = 0, <X_i^2> = a, <X_i X_{i+j}>_sym = 0."""
    first, second = su4_moments(problem, vec)
    sym = (second + second.conj().T).real / 2
    diag = np.diag(sym).copy()
    a_value = float(diag.mean())
    near = np.array([sym[i, (i + 1) % 4] for i in range(4)])
    opposite = np.array([sym[0, 2], sym[1, 3]])
    act = _lift(problem, vec)
    casimir_mean = np.vdot(vec, act(problem.casimir, np.asarray(vec, complex))).real
    residual = max(float(np.max(np.abs(first))),
                   float(np.max(np.abs(diag - a_value))),
                   float(np.max(np.abs(near))),
                   float(np.max(np.abs(opposite))))
    return Su4ConditionReport(first_moments=first, second_moments=diag,
                              a_value=a_value, a_upper_bound=casimir_mean / 4,
                              cross_near=near, cross_opposite=opposite,
                              max_residual=residual)


def f_trace_inverse(a: float, b: float, c: float) -> float:
    """tr F^-1 for the circulant matrix with entries (a, b, c)."""
    return 2.0 / (a - c) + 1.0 / (a + 2 * b + c) + 1.0 / (a - 2 * b + c)


def f_gradient_numeric(a: float, b: float = 0.0, c: float = 0.0,
                       step: float = 1e-6) -> tuple[float, float]:
    """Central-difference gradient of f in (b, c) at the given point."""
    db = (f_trace_inverse(a, b + step, c) - f_trace_inverse(a, b - step, c)) / (2 * step)
    dc = (f_trace_inverse(a, b, c + step) - f_trace_inverse(a, b, c - step)) / (2 * step)
    return db, dc


def symmetry_defects(problem: Su4Problem) -> dict:
    """Max-entry residuals of the W/Z conjugation and power relations."""
    w, z = problem.w, problem.z
    xs = problem.generators
    eye = np.eye(DIM)
    out = {}
    for i in range(4):
        out[f"W_cycles_{GENERATOR_LABELS[i]}"] = float(np.max(np.abs(
            w.conj().T @ xs[i] @ w - xs[(i + 1) % 4])))
    signs = (-1.0, 1.0, 1.0, -1.0)
    for i in range(4):
        out[f"Z_signs_{GENERATOR_LABELS[i]}"] = float(np.max(np.abs(
            z.conj().T @ xs[i] @ z - signs[i] * xs[i])))
    out["W^4"] = float(np.max(np.abs(np.linalg.matrix_power(w, 4) - eye)))
    out["Z^4"] = float(np.max(np.abs(np.linalg.matrix_power(z, 4) - eye)))
    zw = z @ w
    out["(ZW)^4_plus_identity"] = float(np.max(np.abs(
        np.linalg.matrix_power(zw, 4) + eye)))
    out["(ZW)^8"] = float(np.max(np.abs(np.linalg.matrix_power(zw, 8) - eye)))
    return out
