import math

import numpy as np
import pytest

from su2metro.errors import NoTrivialIrrep
from su2metro.groups import build_group, trivial_irrep
from su2metro.linalg import hermiticity_defect
from su2metro.metrology import check_conditions
from su2metro.probes import (compass_state, compass_trivial_overlap_scan,
                             fine_tune_invariant, ghz_state,
                             maximally_entangled_probe, prism_superposition,
                             s3_prism_state, tetrahedral_state)
from su2metro.spinrep import (build_spin_rep, coherent_state,
                              collective_moments, probe_state)


def test_ghz_z_amplitudes():
    rep = build_spin_rep(6)
    state = ghz_state(rep, "z")
    assert abs(state.amps[0] - 1 / math.sqrt(2)) < 1e-14
    assert abs(state.amps[-1] - 1 / math.sqrt(2)) < 1e-14
    assert np.max(np.abs(state.amps[1:-1])) < 1e-14


def test_ghz_jz_second_moment():
    rep = build_spin_rep(6)
    sym = collective_moments(ghz_state(rep, "z")).symmetrized
    assert abs(sym[2, 2] - 9) < 1e-12


def test_ghz_x_spin_half():
    rep = build_spin_rep(1)
    state = ghz_state(rep, "x")
    sym = collective_moments(state).symmetrized
    assert abs(sym[0, 0] - 0.25) < 1e-12
    # the rotated combination is an eigenvector mixture of Jx = +-1/2
    jx_amp = collective_moments(state).first[0]
    assert abs(jx_amp) < 0.51


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_ghz_axis_variance(axis):
    rep = build_spin_rep(8)
    state = ghz_state(rep, axis)
    sym = collective_moments(state).symmetrized
    assert abs(sym["xyz".index(axis), "xyz".index(axis)] - 16) < 1e-12


def test_compass_normalized_random_phases():
    rng = np.random.default_rng(0)
    rep = build_spin_rep(10)
    for _ in range(5):
        state = compass_state(rep, rng.uniform(0, 2 * np.pi, size=3))
        assert abs(np.linalg.norm(state.amps) - 1) < 1e-12


def test_compass_j4_is_the_invariant_state():
    rep = build_spin_rep(8)
    state = compass_state(rep)
    expected = np.zeros(9)
    expected[0] = expected[8] = math.sqrt(5 / 24)
    expected[4] = math.sqrt(7 / 12)
    phase = np.vdot(expected, state.amps)
    assert abs(abs(phase) - 1) < 1e-10
    assert np.max(np.abs(state.amps - phase * expected)) < 1e-10


def test_compass_j3_residual_large():
    rep = build_spin_rep(6)
    report = check_conditions(compass_state(rep))
    assert report.max_residual > 0.1


def test_overlap_scan_mod8():
    rows = compass_trivial_overlap_scan(range(4, 34, 2))
    for n, overlap in rows:
        if n % 8 == 0:
            assert abs(overlap - 1.0) < 1e-10
        else:
            assert overlap < 0.999


def test_overlap_scan_n4_vanishes():
    (_, overlap), = compass_trivial_overlap_scan([4])
    assert overlap < 1e-12


def test_optimized_deltas_upper_bounds_default():
    rows0 = dict(compass_trivial_overlap_scan([6, 12]))
    rows1 = dict(compass_trivial_overlap_scan([6, 12], optimize_deltas=True, grid=8))
    for n in (6, 12):
        assert rows1[n] >= rows0[n] - 1e-9


def test_tetrahedral_j3():
    rep = build_spin_rep(6)
    state = tetrahedral_state(rep)
    expected = np.zeros(7, dtype=complex)
    expected[1], expected[5] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    phase = np.vdot(expected, state.amps)
    assert abs(abs(phase) - 1) < 1e-10
    assert np.max(np.abs(state.amps - phase * expected)) < 1e-10


def test_tetrahedral_j4_compass_form():
    rep = build_spin_rep(8)
    state = tetrahedral_state(rep)
    compass = compass_state(rep)
    assert abs(abs(np.vdot(state.amps, compass.amps)) - 1) < 1e-10


def test_tetrahedral_j2_raises():
    with pytest.raises(NoTrivialIrrep):
        tetrahedral_state(build_spin_rep(4))


def test_tetrahedral_conditions_all_j():
    rng = np.random.default_rng(1)
    for j in range(1, 21):
        if j in (1, 2, 5):
            continue
        rep = build_spin_rep(2 * j)
        group = build_group("a4", rep)
        data = trivial_irrep(group)
        for vec in data.basis:
            state = probe_state(rep, vec)
            assert check_conditions(state).max_residual < 1e-10
        if data.multiplicity >= 2:
            z = rng.normal(size=data.multiplicity) + 1j * rng.normal(size=data.multiplicity)
            state = tetrahedral_state(rep, z / np.linalg.norm(z))
            assert check_conditions(state).max_residual < 1e-10


def test_prism_state_invariance():
    rep = build_spin_rep(8)
    group = build_group("s3", rep)
    state = s3_prism_state(rep, 0.9)
    for g in group.elements:
        assert np.max(np.abs(g @ state.amps - state.amps)) < 1e-10


def test_prism_pole_input():
    # at J = 3 the invariant subspace overlaps |J, J>, so the pole twirl works
    rep = build_spin_rep(6)
    group = build_group("s3", rep)
    pole = s3_prism_state(rep, 0.0)
    north = coherent_state(rep, 0.0)
    pi = sum(group.elements) / group.order
    expected = pi @ north.amps
    expected /= np.linalg.norm(expected)
    assert abs(abs(np.vdot(pole.amps, expected)) - 1) < 1e-12
    # at J = 4 the invariant subspace is spanned by m in {3, 0, -3} states
    # and the pole projects to zero
    from su2metro.errors import ZeroProjection
    with pytest.raises(ZeroProjection):
        s3_prism_state(build_spin_rep(8), 0.0)


def test_prism_twirl_matches_term_by_term_sum():
    xi = math.acos(1 / math.sqrt(3))
    for two_j in (8, 14, 20):
        rep = build_spin_rep(two_j)
        a = s3_prism_state(rep, xi)
        b = prism_superposition(rep, xi)
        assert abs(abs(np.vdot(a.amps, b.amps)) - 1) < 1e-10


def test_prism_variances_near_large_n_limit():
    rep = build_spin_rep(20)
    state = s3_prism_state(rep, math.acos(1 / math.sqrt(3)))
    sym = collective_moments(state).symmetrized
    target = 10 * 11 / 3
    assert np.max(np.abs(np.diag(sym) - target)) < 0.02 * target


def test_fine_tune_s3_j4():
    group = build_group("s3", build_spin_rep(8))
    result = fine_tune_invariant(group, rng=0)
    assert not result.flagged
    assert result.residual < 1e-10
    amps = result.state.amps
    assert abs(abs(amps[1]) ** 2 - 10 / 27) < 1e-8
    assert abs(abs(amps[7]) ** 2 - 10 / 27) < 1e-8
    assert abs(abs(amps[4]) ** 2 - 7 / 27) < 1e-8


def test_fine_tune_restart_stability():
    group = build_group("s3", build_spin_rep(8))
    r1 = fine_tune_invariant(group, rng=1)
    r2 = fine_tune_invariant(group, rng=2)
    assert abs(r1.residual - r2.residual) < 1e-9


def test_fine_tune_s3_j3_flagged():
    group = build_group("s3", build_spin_rep(6))
    result = fine_tune_invariant(group, rng=0)
    assert result.flagged
    assert result.residual > 1e-3


def test_fine_tune_a4_immediate():
    group = build_group("a4", build_spin_rep(6))
    result = fine_tune_invariant(group, rng=0)
    assert result.residual < 1e-10


def test_entangled_probe_bell():
    rep = build_spin_rep(1)
    state = maximally_entangled_probe(rep)
    assert np.allclose(state.amps, np.array([1, 0, 0, 1]) / math.sqrt(2))
    sym = collective_moments(state).symmetrized
    assert np.max(np.abs(np.diag(sym) - 0.25)) < 1e-14


def test_entangled_probe_moment_identities():
    rep = build_spin_rep(9)
    state = maximally_entangled_probe(rep)
    mom = collective_moments(state)
    j = 4.5
    assert np.max(np.abs(mom.first)) < 1e-12
    off = mom.symmetrized - np.diag(np.diag(mom.symmetrized))
    assert np.max(np.abs(off)) < 1e-12
    assert np.max(np.abs(np.diag(mom.symmetrized) - j * (j + 1) / 3)) < 1e-12


def test_entangled_probe_trace_identity():
    rng = np.random.default_rng(5)
    rep = build_spin_rep(6)
    state = maximally_entangled_probe(rep)
    mat = state.amps.reshape(7, 7)
    for _ in range(20):
        a = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        a = (a + a.conj().T) / 2
        assert hermiticity_defect(a) < 1e-12
        value = np.trace(mat.conj().T @ a @ mat).real
        assert abs(value - np.trace(a).real / 7) < 1e-12


def test_constructors_unit_norm():
    rep = build_spin_rep(12)
    states = [ghz_state(rep, "y"), compass_state(rep, (0.1, 0.2, 0.3)),
              tetrahedral_state(rep), s3_prism_state(rep, 0.7),
              maximally_entangled_probe(rep)]
    for state in states:
        assert abs(np.linalg.norm(state.amps) - 1) < 1e-12
