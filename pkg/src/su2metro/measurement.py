"""Measurement schemes that locally saturate the rotation QFIM.

The projective scheme built from an optimal probe (the state, the three
states reached by the generators, and one completing projector), the
three-axis parity observables, outcome probabilities with analytic
parameter gradients, the classical Fisher information of either outcome
model, and the generalized signal-to-noise (method-of-moments) matrix for
commuting or non-commuting observable lists, including the symmetrized
joint outcome density over the multi-index spectrum grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from . import linalg
from .config import physics_tol
from .errors import (NotOptimalProbe, SingularCovariance, SingularOutcome)
from .metrology import a_matrices, check_conditions
from .spinrep import ProbeState, SpinRep, generator_action, operator_action, rotation

PARAM_DIM = 3


@dataclass(frozen=True, eq=False)
class MeasurementScheme:
    """Ordered projectors summing to the identity."""

    projectors: list
    labels: list

    @property
    def size(self) -> int:
        return len(self.projectors)


def validate_scheme(scheme: MeasurementScheme) -> dict:
    """Max defects of Hermiticity, idempotency, orthogonality, completeness."""
    projs = scheme.projectors
    dim = projs[0].shape[0]
    herm = max(linalg.hermiticity_defect(p) for p in projs)
    idem = max(float(np.max(np.abs(p @ p - p))) for p in projs)
    ortho = 0.0
    for i, p in enumerate(projs):
        for q in projs[i + 1:]:
            ortho = max(ortho, float(np.max(np.abs(p @ q))))
    total = sum(projs)
    complete = float(np.max(np.abs(total - np.eye(dim))))
    return {"hermiticity": herm, "idempotency": idem,
            "orthogonality": ortho, "completeness": complete}


def kl_scheme(state: ProbeState, residual_tol: float = 1e-8) -> MeasurementScheme:
    """{|psi><psi|, P_x, P_y, P_z, Q} with P_i = J_i|psi><psi|J_i / ||J_i psi||^2.

    Well-defined only when the probe meets the moment conditions (then |psi>
    and the three J_i|psi> are mutually orthogonal); rejected otherwise.
    """
    report = check_conditions(state)
    if report.max_residual > residual_tol:
        raise NotOptimalProbe(
            f"condition residual {report.max_residual:.3e} exceeds {residual_tol:.1e}; "
            "generator images are not orthogonal")
    psi = state.amps
    projs = [np.outer(psi, psi.conj())]
    labels = ["psi"]
    for axis in range(3):
        image = generator_action(state, axis)
        image = image / np.linalg.norm(image)
        projs.append(np.outer(image, image.conj()))
        labels.append("J" + "xyz"[axis])
    q = np.eye(psi.shape[0], dtype=complex) - sum(projs)
    projs.append((q + q.conj().T) / 2)
    labels.append("Q")
    return MeasurementScheme(projectors=projs, labels=labels)


def _act(op: np.ndarray, vec: np.ndarray, state: ProbeState) -> np.ndarray:
    """Apply a rep-level operator to a raw vector (op (x) 1 on tensor states)."""
    if state.tensor and op.shape[0] == state.rep.dim:
        d = state.rep.dim
        return (op @ vec.reshape(d, d)).ravel()
    return op @ vec


def _evolved_vectors(state: ProbeState, theta):
    """U(theta)|psi> and the three U(theta) A^(j)(theta)|psi> tangents."""
    theta = np.asarray(theta, dtype=float)
    u = rotation(state.rep, theta)
    rows = a_matrices(theta).a_vectors
    v = operator_action(state, u)
    tangents = []
    for j in range(PARAM_DIM):
        combo = sum(rows[j, m] * generator_action(state, m) for m in range(3))
        tangents.append(_act(u, combo, state))
    return v, tangents


def outcome_probabilities(scheme: MeasurementScheme, state: ProbeState,
                          theta=(0.0, 0.0, 0.0)) -> np.ndarray:
    """p_k = <psi(theta)| Pi_k |psi(theta)>."""
    theta = np.asarray(theta, dtype=float)
    v = operator_action(state, rotation(state.rep, theta))
    return np.array([np.vdot(v, p @ v).real for p in scheme.projectors])


def probability_gradients(scheme: MeasurementScheme, state: ProbeState,
                          theta=(0.0, 0.0, 0.0)):
    """(p_k, dp_k/dtheta_j) with analytic gradients via the A vectors."""
    v, tangents = _evolved_vectors(state, theta)
    probs = np.array([np.vdot(v, p @ v).real for p in scheme.projectors])
    grads = np.zeros((scheme.size, PARAM_DIM))
    for k, p in enumerate(scheme.projectors):
        pv = p @ v
        for j, w in enumerate(tangents):
            grads[k, j] = 2.0 * np.vdot(pv, w).imag
    return probs, grads


@dataclass(frozen=True, eq=False)
class ObservableList:
    """Hermitian observables with merged spectral decompositions."""

    matrices: list
    eigenvalues: list   # per observable: 1-D array of distinct eigenvalues
    projectors: list    # per observable: list of spectral projectors
    labels: list

    @property
    def size(self) -> int:
        return len(self.matrices)

    def spectrum_sizes(self) -> tuple:
        return tuple(len(e) for e in self.eigenvalues)

    def is_commuting(self, tol: float = 1e-10) -> bool:
        for i, a in enumerate(self.matrices):
            for b in self.matrices[i + 1:]:
                if np.max(np.abs(a @ b - b @ a)) > tol:
                    return False
        return True


def observable_list(matrices, labels=None, merge_tol: float = 1e-8) -> ObservableList:
    """Spectrally decompose observables, merging degenerate eigenvalues."""
    mats, eigs, projs = [], [], []
    for m in matrices:
        m = np.asarray(m, dtype=complex)
        m = (m + m.conj().T) / 2
        values, vectors = linalg.herm_eig(m, tol=1e-9)
        distinct, groups = [], []
        for k, val in enumerate(values):
            if distinct and abs(val - distinct[-1]) < merge_tol:
                groups[-1].append(k)
            else:
                distinct.append(val)
                groups.append([k])
        eigs.append(np.array(distinct))
        projs.append([vectors[:, g] @ vectors[:, g].conj().T for g in groups])
        mats.append(m)
    if labels is None:
        labels = [f"O{k}" for k in range(len(mats))]
    return ObservableList(matrices=mats, eigenvalues=eigs, projectors=projs,
                          labels=list(labels))


def parity_observables(rep: SpinRep) -> ObservableList:
    """exp(i pi ((N/2) 1 - J_i)) for i = x, y, z; Hermitian with +-1 spectrum."""
    n_half = rep.two_j / 2
    mats = []
    for axis in range(3):
        h = n_half * np.eye(rep.dim) - rep.operator(axis)
        o = linalg.unitary_exp(h, -math.pi)
        mats.append((o + o.conj().T) / 2)
    return observable_list(mats, labels=["parity_x", "parity_y", "parity_z"])


def scheme_as_observables(scheme: MeasurementScheme) -> ObservableList:
    """Reuse the scheme's projectors as a commuting observable list."""
    return observable_list(scheme.projectors, labels=list(scheme.labels))


def kl_moment_observables(scheme: MeasurementScheme) -> ObservableList:
    """The three generator-image projectors, for method-of-moments use.

    A complete projector list has exactly singular covariance (the
    fluctuations sum to zero), and the state/completing projectors
    degenerate as theta -> 0; the informative sub-list keeps the covariance
    invertible while tr M still approaches tr F.
    """
    return observable_list(scheme.projectors[1:4], labels=list(scheme.labels[1:4]))


def _expand_for_state(op: np.ndarray, state: ProbeState) -> np.ndarray:
    """Lift a rep-level operator to op (x) 1 when the state is a tensor probe."""
    if state.tensor and op.shape[0] == state.rep.dim:
        return linalg.kron(op, np.eye(state.rep.dim))
    return op


def symmetrized_joint_density(obs: ObservableList, state: ProbeState,
                              theta=(0.0, 0.0, 0.0), with_gradients: bool = False):
    """Joint outcome density on the multi-index grid, symmetrized over orderings.

    p(l) = (1/K!) sum_sigma <v| E^(sigma(1))_(l_sigma(1)) ... E^(sigma(K))_(l_sigma(K)) |v>.
    Real by construction (orderings pair with their reverses); can be negative
    for non-commuting lists. Gradients reuse the analytic tangent vectors.
    """
    k_obs = obs.size
    sizes = obs.spectrum_sizes()
    projs = [[_expand_for_state(e, state) for e in plist] for plist in obs.projectors]
    v, tangents = _evolved_vectors(state, theta)
    rights = [v] + (tangents if with_gradients else [])

    totals = [np.zeros(sizes, dtype=complex) for _ in rights]
    for sigma in permutations(range(k_obs)):
        for ell in product(*[range(s) for s in sizes]):
            chains = [r for r in rights]
            for pos in reversed(range(k_obs)):
                s = sigma[pos]
                e = projs[s][ell[s]]
                chains = [e @ c for c in chains]
            for t, c in enumerate(chains):
                totals[t][ell] += np.vdot(v, c)
    factorial = math.factorial(k_obs)
    density = totals[0] / factorial
    imag_defect = float(np.max(np.abs(density.imag)))
    density = density.real
    if not with_gradients:
        return density, imag_defect
    grads = np.stack([2.0 * (totals[1 + j] / factorial).imag for j in range(PARAM_DIM)],
                     axis=-1)
    return density, imag_defect, grads


def joint_density_marginal_defect(obs: ObservableList, state: ProbeState,
                                  density: np.ndarray, theta=(0.0, 0.0, 0.0)) -> float:
    """Max deviation of single-observable marginals from tr[E rho]."""
    v, _ = _evolved_vectors(state, theta)
    worst = 0.0
    for s in range(obs.size):
        axes = tuple(a for a in range(obs.size) if a != s)
        marginal = density.sum(axis=axes)
        for idx, e in enumerate(obs.projectors[s]):
            direct = np.vdot(v, _expand_for_state(e, state) @ v).real
            worst = max(worst, abs(marginal[idx] - direct))
    return worst


def classical_fim(measurement, state: ProbeState, theta=(0.0, 0.0, 0.0),
                  prune_prob: float = 1e-14, prune_grad: float = 1e-10) -> np.ndarray:
    """CFI_ij = sum_k dp_k/dtheta_i dp_k/dtheta_j / p_k.

    For a MeasurementScheme the outcomes are the projectors; for an
    ObservableList they are the multi-indices of the symmetrized joint
    density. Outcomes with p < prune_prob contribute nothing provided their
    gradient also vanishes; otherwise the CFI diverges and SingularOutcome
    is raised.
    """
    if isinstance(measurement, MeasurementScheme):
        probs, grads = probability_gradients(measurement, state, theta)
        probs, grads = probs.ravel(), grads.reshape(-1, PARAM_DIM)
    else:
        density, _, grads = symmetrized_joint_density(measurement, state, theta,
                                                      with_gradients=True)
        probs, grads = density.ravel(), grads.reshape(-1, PARAM_DIM)
    out = np.zeros((PARAM_DIM, PARAM_DIM))
    for p, g in zip(probs, grads):
        if p < prune_prob:
            if np.linalg.norm(g) > prune_grad:
                raise SingularOutcome(
                    f"outcome probability {p:.3e} with gradient norm "
                    f"{np.linalg.norm(g):.3e}: CFI divergent")
            continue
        out += np.outer(g, g) / p
    return (out + out.T) / 2


@dataclass(frozen=True, eq=False)
class MomentsMatrix:
    """Generalized signal-to-noise matrix M = G^T Cov^-1 G and its parts."""

    matrix: np.ndarray            # (3, 3)
    covariance: np.ndarray        # (K, K) Jordan-product covariance
    mean_gradients: np.ndarray    # (K, 3)
    joint_density: np.ndarray | None
    joint_imag_defect: float
    joint_min: float
    marginal_defect: float
    nonnormalizable: bool         # some density value < -1e-9


def moments_matrix(obs: ObservableList, state: ProbeState,
                   theta=(0.0, 0.0, 0.0), cov_tol: float | None = None,
                   with_joint: bool | None = None) -> MomentsMatrix:
    """First/second-moment sensitivity matrix of an observable list.

    Covariance uses the Jordan product, Cov_st = Re<O_s O_t> - <O_s><O_t>.
    For non-commuting lists (or with_joint=True) the symmetrized joint
    density is materialized and audited: marginals against tr[E rho],
    negativity flagged but not fatal since M needs only moments.
    """
    if cov_tol is None:
        cov_tol = physics_tol()
    ops = [_expand_for_state(m, state) for m in obs.matrices]
    v, tangents = _evolved_vectors(state, theta)
    k_obs = len(ops)
    means = np.array([np.vdot(v, o @ v).real for o in ops])
    images = [o @ v for o in ops]
    cov = np.zeros((k_obs, k_obs))
    for s in range(k_obs):
        for t in range(s, k_obs):
            cov[s, t] = cov[t, s] = np.vdot(images[s], images[t]).real \
                - means[s] * means[t]
    grads = np.zeros((k_obs, PARAM_DIM))
    for s in range(k_obs):
        for j in range(PARAM_DIM):
            grads[s, j] = 2.0 * np.vdot(images[s], tangents[j]).imag
    eig = np.linalg.eigvalsh(cov)
    if eig[0] < cov_tol:
        raise SingularCovariance(
            f"covariance min eigenvalue {eig[0]:.3e} below {cov_tol:.1e}")
    m = grads.T @ np.linalg.solve(cov, grads)
    m = (m + m.T) / 2

    if with_joint is None:
        with_joint = not obs.is_commuting()
    if with_joint:
        density, imag_defect = symmetrized_joint_density(obs, state, theta)
        marginal = joint_density_marginal_defect(obs, state, density, theta)
        joint_min = float(density.min())
        return MomentsMatrix(matrix=m, covariance=cov, mean_gradients=grads,
                             joint_density=density, joint_imag_defect=imag_defect,
                             joint_min=joint_min, marginal_defect=marginal,
                             nonnormalizable=joint_min < -1e-9)
    return MomentsMatrix(matrix=m, covariance=cov, mean_gradients=grads,
                         joint_density=None, joint_imag_defect=0.0,
                         joint_min=0.0, marginal_defect=0.0, nonnormalizable=False)
