import math

import numpy as np
import pytest

from su2metro.errors import (NotOptimalProbe, SingularCovariance)
from su2metro.measurement import (classical_fim, kl_moment_observables,
                                  kl_scheme, moments_matrix, observable_list,
                                  outcome_probabilities, parity_observables,
                                  probability_gradients, scheme_as_observables,
                                  symmetrized_joint_density, validate_scheme,
                                  joint_density_marginal_defect)
from su2metro.metrology import qfim
from su2metro.probes import ghz_state, maximally_entangled_probe, tetrahedral_state
from su2metro.spinrep import PAULI, build_spin_rep

DIRECTION = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)


@pytest.fixture(scope="module")
def tetra3():
    return tetrahedral_state(build_spin_rep(6))


@pytest.fixture(scope="module")
def scheme3(tetra3):
    return kl_scheme(tetra3)


# --- scheme construction -----------------------------------------------------

def test_scheme_invariants(scheme3):
    defects = validate_scheme(scheme3)
    assert max(defects.values()) < 1e-10
    assert scheme3.size == 5


def test_generator_image_norms(tetra3):
    # ||J_i psi||^2 equals the common variance J(J+1)/3 under the conditions
    from su2metro.spinrep import generator_action
    for axis in range(3):
        image = generator_action(tetra3, axis)
        assert abs(np.linalg.norm(image) ** 2 - 4.0) < 1e-12


def test_ghz_rejected():
    state = ghz_state(build_spin_rep(6), "z")
    with pytest.raises(NotOptimalProbe):
        kl_scheme(state)


def test_scheme_works_for_entangled_probe():
    state = maximally_entangled_probe(build_spin_rep(5))
    scheme = kl_scheme(state)
    assert max(validate_scheme(scheme).values()) < 1e-10


# --- outcome probabilities ---------------------------------------------------

def test_probabilities_at_origin(scheme3, tetra3):
    probs = outcome_probabilities(scheme3, tetra3, (0.0, 0.0, 0.0))
    assert np.allclose(probs, [1, 0, 0, 0, 0], atol=1e-12)


def test_probabilities_sum_to_one(scheme3, tetra3):
    rng = np.random.default_rng(0)
    for _ in range(5):
        probs = outcome_probabilities(scheme3, tetra3, rng.normal(size=3))
        assert abs(probs.sum() - 1.0) < 1e-12
        assert probs.min() > -1e-14


def test_small_angle_expansion_j4():
    state = tetrahedral_state(build_spin_rep(8))
    scheme = kl_scheme(state)
    probs = outcome_probabilities(scheme, state, (0.01, 0.0, 0.0))
    expected = 1e-4 * 20 / 3
    assert abs(probs[1] - expected) < 2e-6
    assert probs[2] < 1e-8 and probs[3] < 1e-8
    assert abs(probs[0] - (1 - expected)) < 1e-5
    # the completing outcome is quartic: doubling theta scales it by ~16
    probs2 = outcome_probabilities(scheme, state, (0.02, 0.0, 0.0))
    assert probs[4] < 1e-6
    assert probs2[4] / probs[4] == pytest.approx(16.0, rel=0.05)


def test_gradients_match_finite_differences(scheme3, tetra3):
    rng = np.random.default_rng(1)
    for _ in range(3):
        theta = 0.3 * rng.normal(size=3)
        _, grads = probability_gradients(scheme3, tetra3, theta)
        h = 1e-5
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd = (outcome_probabilities(scheme3, tetra3, theta + e)
                  - outcome_probabilities(scheme3, tetra3, theta - e)) / (2 * h)
            assert np.max(np.abs(fd - grads[:, j])) < 1e-6 * max(1.0, np.max(np.abs(grads)))


# --- classical Fisher information --------------------------------------------

def test_cfi_saturates_at_small_angle(scheme3, tetra3):
    theta = 1e-3 * DIRECTION
    cfi = classical_fim(scheme3, tetra3, theta)
    target = 16.0
    assert np.max(np.abs(np.diag(cfi) - target)) < 1e-3 * target
    off = cfi - np.diag(np.diag(cfi))
    assert np.max(np.abs(off)) < 1e-4


def test_cfi_bounded_by_qfim(scheme3, tetra3):
    rng = np.random.default_rng(2)
    for _ in range(5):
        theta = 0.5 * rng.normal(size=3)
        cfi = classical_fim(scheme3, tetra3, theta)
        f = qfim(tetra3, theta).matrix
        assert np.linalg.eigvalsh(f - cfi)[0] > -1e-9


def test_cfi_bounded_by_qfim_j4():
    state = tetrahedral_state(build_spin_rep(8))
    scheme = kl_scheme(state)
    rng = np.random.default_rng(3)
    for _ in range(3):
        theta = 0.4 * rng.normal(size=3)
        cfi = classical_fim(scheme, state, theta)
        f = qfim(state, theta).matrix
        assert np.linalg.eigvalsh(f - cfi)[0] > -1e-9


# --- parity observables ------------------------------------------------------

def test_parity_is_pauli_at_spin_half():
    obs = parity_observables(build_spin_rep(1))
    for mat, pauli in zip(obs.matrices, PAULI):
        assert np.max(np.abs(mat - pauli)) < 1e-12
    assert not obs.is_commuting()


def test_parity_squares_to_identity():
    for two_j in (1, 3, 6, 8):
        obs = parity_observables(build_spin_rep(two_j))
        eye = np.eye(two_j + 1)
        for mat in obs.matrices:
            assert np.max(np.abs(mat @ mat - eye)) < 1e-11
        for eigs in obs.eigenvalues:
            assert np.max(np.abs(np.abs(eigs) - 1.0)) < 1e-11


def test_parity_commutes_only_for_integer_spin():
    # pi rotations about orthogonal axes form a Klein group for integer J;
    # the half-integer lift is projective and anticommutes
    assert parity_observables(build_spin_rep(6)).is_commuting()
    assert parity_observables(build_spin_rep(8)).is_commuting()
    assert not parity_observables(build_spin_rep(3)).is_commuting()
    assert not parity_observables(build_spin_rep(7)).is_commuting()


def test_parity_commutator_norm_spin_half():
    obs = parity_observables(build_spin_rep(1))
    ox, oz = obs.matrices[0], obs.matrices[2]
    assert np.max(np.abs(ox @ oz - oz @ ox)) > 0.1


# --- joint symmetrized density -----------------------------------------------

def test_joint_density_symmetric_under_index_permutation():
    from itertools import permutations
    from su2metro.measurement import ObservableList
    rep = build_spin_rep(7)
    state = maximally_entangled_probe(rep)
    obs = parity_observables(rep)
    theta = np.array([0.2, 0.1, 0.15])
    density, imag_defect = symmetrized_joint_density(obs, state, theta)
    assert imag_defect < 1e-12
    assert abs(density.sum() - 1.0) < 1e-10
    # reordering the observable list permutes the grid axes and nothing else
    for perm in permutations(range(3)):
        reordered = ObservableList(
            matrices=[obs.matrices[p] for p in perm],
            eigenvalues=[obs.eigenvalues[p] for p in perm],
            projectors=[obs.projectors[p] for p in perm],
            labels=[obs.labels[p] for p in perm])
        permuted, _ = symmetrized_joint_density(reordered, state, theta)
        assert np.max(np.abs(permuted - np.transpose(density, perm))) < 1e-12


def test_joint_density_marginals():
    rep = build_spin_rep(7)
    state = maximally_entangled_probe(rep)
    obs = parity_observables(rep)
    theta = np.array([0.2, 0.1, 0.15])
    density, _ = symmetrized_joint_density(obs, state, theta)
    assert joint_density_marginal_defect(obs, state, density, theta) < 1e-10


def test_joint_density_can_go_negative():
    # the spin generators as a non-commuting list produce negative quasi-weights
    rep = build_spin_rep(6)
    state = tetrahedral_state(rep)
    obs = observable_list([rep.jx, rep.jy, rep.jz])
    mm = moments_matrix(obs, state, (0.15, 0.1, 0.2))
    assert mm.joint_density is not None
    assert mm.nonnormalizable
    assert mm.marginal_defect < 1e-10


# --- moments matrix ----------------------------------------------------------

def test_moments_singular_covariance_for_complete_list(scheme3, tetra3):
    # a complete projector list has fluctuations that sum to zero exactly
    with pytest.raises(SingularCovariance):
        moments_matrix(scheme_as_observables(scheme3), tetra3, 0.1 * DIRECTION)


def test_parity_covariance_singular_at_origin(tetra3):
    # the optimal probe is a parity eigenstate, so Cov degenerates at theta = 0
    obs = parity_observables(build_spin_rep(6))
    with pytest.raises(SingularCovariance):
        moments_matrix(obs, tetra3, (0.0, 0.0, 0.0))


def test_kl_moment_list_saturates(scheme3, tetra3):
    theta = 1e-3 * DIRECTION
    mm = moments_matrix(kl_moment_observables(scheme3), tetra3, theta)
    f = qfim(tetra3, theta).matrix
    assert abs(np.trace(mm.matrix) - np.trace(f)) < 1e-3 * np.trace(f)
    assert np.linalg.eigvalsh(f - mm.matrix)[0] > -1e-9


def test_moments_bounded_by_qfim_parity(tetra3):
    obs = parity_observables(build_spin_rep(6))
    rng = np.random.default_rng(4)
    for _ in range(5):
        theta = 0.1 + 0.3 * np.abs(rng.normal(size=3))
        f = qfim(tetra3, theta).matrix
        mm = moments_matrix(obs, tetra3, theta)
        assert np.linalg.eigvalsh(f - mm.matrix)[0] > -1e-9


def test_moments_bounded_by_qfim_noncommuting_parity():
    rep = build_spin_rep(7)
    state = maximally_entangled_probe(rep)
    obs = parity_observables(rep)
    assert not obs.is_commuting()
    theta = np.array([0.15, 0.1, 0.2])
    f = qfim(state, theta).matrix
    mm = moments_matrix(obs, state, theta)
    assert np.linalg.eigvalsh(f - mm.matrix)[0] > -1e-9
    cfi = classical_fim(obs, state, theta)
    assert np.linalg.eigvalsh(f - cfi)[0] > -1e-9
    # the moments matrix never beats the joint-density CFI
    assert np.linalg.eigvalsh(cfi - mm.matrix)[0] > -1e-9


def test_cfi_matches_finite_difference_probabilities():
    # analytic-gradient CFI against central differences of the outcome
    # probabilities, across 20 (probe, theta) combinations
    rng = np.random.default_rng(20)
    probes = [tetrahedral_state(build_spin_rep(6)),
              tetrahedral_state(build_spin_rep(8)),
              maximally_entangled_probe(build_spin_rep(5)),
              maximally_entangled_probe(build_spin_rep(4))]
    count = 0
    for state in probes:
        scheme = kl_scheme(state)
        for _ in range(5):
            theta = 0.05 + 0.4 * np.abs(rng.normal(size=3))
            cfi = classical_fim(scheme, state, theta)
            h = 1e-5
            grads = np.zeros((scheme.size, 3))
            for j in range(3):
                e = np.zeros(3)
                e[j] = h
                grads[:, j] = (outcome_probabilities(scheme, state, theta + e)
                               - outcome_probabilities(scheme, state, theta - e)) / (2 * h)
            probs = outcome_probabilities(scheme, state, theta)
            fd = np.zeros((3, 3))
            for p, g in zip(probs, grads):
                if p > 1e-14:
                    fd += np.outer(g, g) / p
            assert np.max(np.abs(cfi - fd)) < 1e-6 * max(1.0, np.max(np.abs(cfi)))
            count += 1
    assert count == 20


def test_mean_gradients_match_finite_differences(tetra3):
    obs = parity_observables(build_spin_rep(6))
    theta = np.array([0.3, -0.1, 0.2])
    mm = moments_matrix(obs, tetra3, theta)
    from su2metro.spinrep import rotation, operator_action
    h = 1e-5
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        for s, op in enumerate(obs.matrices):
            vp = operator_action(tetra3, rotation(tetra3.rep, theta + e))
            vm = operator_action(tetra3, rotation(tetra3.rep, theta - e))
            fd = (np.vdot(vp, op @ vp).real - np.vdot(vm, op @ vm).real) / (2 * h)
            assert abs(fd - mm.mean_gradients[s, j]) < 1e-6
