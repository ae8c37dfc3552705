"""The acceptance suite: one callable per verification criterion.

Each criterion returns a CriterionResult with a pass flag and a detail
string; run_criteria executes a selection in order and reports one line
per criterion. The CLI's verify-all subcommand and the pytest acceptance
module both run these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import su4 as su4mod
from .groups import build_group, s3_multiplicity_formula, trivial_irrep
from .linalg import kron, partial_trace
from .measurement import (classical_fim, kl_moment_observables, kl_scheme,
                          moments_matrix, observable_list, parity_observables)
from .metrology import (check_conditions, optimal_scalar_bound, qfim,
                        scalar_crb_curve, shifted_qfim, su2_invariance_check,
                        trace_inverse)
from .probes import (compass_state, compass_trivial_overlap_scan,
                     fine_tune_invariant, ghz_state, maximally_entangled_probe,
                     s3_prism_state, tetrahedral_state)
from .spinrep import (PAULI, build_spin_rep, probe_state, qubit_embedding,
                      reduced_qubit_states, rotation, so3_of_unitary,
                      so3_rotation)
from .wigner import (imaginary_defect, sphere_overlap, spin_wigner,
                     wigner_pointwise)

DIRECTION = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str


def _result(number: int, name: str, failures: list, note: str = "") -> CriterionResult:
    if failures:
        details = "; ".join(failures[:6])
        if len(failures) > 6:
            details += f"; and {len(failures) - 6} more"
        return CriterionResult(number, name, False, details)
    return CriterionResult(number, name, True, note or "ok")


def _states_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float) -> float:
    phase = np.vdot(b, a)
    if abs(phase) < 1e-12:
        return 2.0
    phase = phase / abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def criterion_01_compass_periodicity() -> CriterionResult:
    failures = []
    rows = compass_trivial_overlap_scan(range(4, 34, 2))
    for n, overlap in rows:
        if n % 8 == 0:
            if abs(overlap - 1.0) > 1e-10:
                failures.append(f"N={n}: overlap {overlap!r} not 1")
        elif overlap >= 0.999:
            failures.append(f"N={n}: overlap {overlap!r} not < 0.999")
    return _result(1, "compass overlap is 1 exactly at N mod 8 = 0", failures,
                   f"scanned even N in [4, 32]")


def criterion_02_exact_states() -> CriterionResult:
    failures = []
    state3 = tetrahedral_state(build_spin_rep(6))
    expected3 = np.zeros(7, dtype=complex)
    expected3[1], expected3[5] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    dev3 = _states_up_to_phase(state3.amps, expected3, 1e-10)
    if dev3 > 1e-10:
        failures.append(f"J=3 invariant state deviates by {dev3:.2e}")
    state4 = tetrahedral_state(build_spin_rep(8))
    expected4 = np.zeros(9, dtype=complex)
    expected4[0] = expected4[8] = math.sqrt(5 / 24)
    expected4[4] = math.sqrt(7 / 12)
    dev4 = _states_up_to_phase(state4.amps, expected4, 1e-10)
    if dev4 > 1e-10:
        failures.append(f"J=4 invariant state deviates by {dev4:.2e}")
    return _result(2, "invariant states match their closed forms", failures,
                   "J=3: (|3,2>-|3,-2>)/sqrt2 (relative sign from the group "
                   "construction); J=4: sqrt(5/24)(|4,4>+|4,-4>)+sqrt(7/12)|4,0>")


def criterion_03_multiplicities() -> CriterionResult:
    failures = []
    for j in range(0, 21):
        mult = trivial_irrep(build_group("a4", build_spin_rep(2 * j))).multiplicity
        if j in (1, 2, 5):
            if mult != 0:
                failures.append(f"a4 J={j}: expected multiplicity 0, got {mult}")
        elif mult < 1:
            failures.append(f"a4 J={j}: expected multiplicity >= 1, got {mult}")
    for j in range(0, 31):
        group = build_group("s3", build_spin_rep(2 * j))
        pi = trivial_irrep(group)
        formula = s3_multiplicity_formula(j)
        if pi.multiplicity != formula:
            failures.append(f"s3 J={j}: trace {pi.multiplicity} vs formula {formula}")
    return _result(3, "trivial-irrep multiplicities", failures,
                   "a4 gaps exactly at J in {1,2,5}; s3 trace matches the closed form")


def _optimal_probe_set():
    """Named optimal probes reused by several criteria."""
    rng = np.random.default_rng(4)
    probes = []
    for j in range(1, 21):
        if j in (1, 2, 5):
            continue
        rep = build_spin_rep(2 * j)
        data = trivial_irrep(build_group("a4", rep))
        for idx, vec in enumerate(data.basis):
            probes.append((f"a4 J={j} basis {idx}", probe_state(rep, vec)))
        if data.multiplicity >= 2:
            coeff = rng.normal(size=data.multiplicity) \
                + 1j * rng.normal(size=data.multiplicity)
            combo = sum(c * b for c, b in zip(coeff, data.basis))
            probes.append((f"a4 J={j} random combination",
                           probe_state(rep, combo, normalize=True)))
    ft = fine_tune_invariant(build_group("s3", build_spin_rep(8)), rng=0)
    probes.append(("s3 fine-tuned J=4", ft.state))
    for two_j in range(1, 41):
        probes.append((f"entangled 2J={two_j}",
                       maximally_entangled_probe(build_spin_rep(two_j))))
    return probes


def criterion_04_conditions() -> CriterionResult:
    failures = []
    for name, state in _optimal_probe_set():
        residual = check_conditions(state).max_residual
        if residual > 1e-10:
            failures.append(f"{name}: residual {residual:.2e}")
    ft = fine_tune_invariant(build_group("s3", build_spin_rep(8)), rng=0)
    for idx in (1, 7):
        dev = abs(abs(ft.state.amps[idx]) ** 2 - 10 / 27)
        if dev > 1e-8:
            failures.append(f"fine-tuned |amp|^2 at index {idx} off by {dev:.2e}")
    return _result(4, "moment conditions on the optimal probe family", failures,
                   "a4-invariant J<=20, entangled 2J<=40, fine-tuned s3 J=4")


def criterion_05_floor() -> CriterionResult:
    failures = []
    for name, state in _optimal_probe_set():
        n = state.rep.two_j
        floor = 9 / (n * (n + 2))
        value, _ = trace_inverse(qfim(state))
        if abs(value - floor) > 1e-10:
            failures.append(f"{name}: tr F^-1 {value!r} vs floor {floor!r}")
    floor3 = 9 / 48
    for name, state in (("compass J=3", compass_state(build_spin_rep(6))),
                        ("s3 prism J=3",
                         s3_prism_state(build_spin_rep(6), math.acos(1 / math.sqrt(3))))):
        value, _ = trace_inverse(qfim(state))
        if value - floor3 < 1e-3:
            failures.append(f"{name}: tr F^-1 {value!r} not above floor by 1e-3")
    return _result(5, "scalar bound floor 9/(N(N+2))", failures,
                   "equality on optimal probes; strict excess for J=3 compass/prism")


def criterion_06_scalar_curve() -> CriterionResult:
    failures = []
    ts = np.linspace(0.0, 3.0, 61)
    probes = [("a4 J=3", tetrahedral_state(build_spin_rep(6))),
              ("a4 J=4", tetrahedral_state(build_spin_rep(8))),
              ("s3 fine-tuned J=4",
               fine_tune_invariant(build_group("s3", build_spin_rep(8)), rng=0).state)]
    for name, state in probes:
        n = state.rep.two_j
        for point in scalar_crb_curve(state, DIRECTION, ts):
            expected = optimal_scalar_bound(n, point.t)
            if point.singular or abs(point.trace_inv - expected) > 1e-8:
                failures.append(f"{name} t={point.t:.3f}: {point.trace_inv!r} "
                                f"vs {expected!r}")
    return _result(6, "scalar curve (3 + 6/sinc^2(t/2))/(N(N+2))", failures,
                   "61 grid points over t in [0, 3], J = 3 and 4 probes")


def criterion_07_shift_identity() -> CriterionResult:
    failures = []
    state = tetrahedral_state(build_spin_rep(8))
    rng = np.random.default_rng(7)
    for trial in range(20):
        xi, theta = rng.normal(size=3), rng.normal(size=3)
        lhs = shifted_qfim(state, xi, theta).matrix
        rhs = qfim(state, theta - xi).matrix
        dev = float(np.max(np.abs(lhs - rhs)))
        if dev > 1e-8:
            failures.append(f"pair {trial}: deviation {dev:.2e}")
    return _result(7, "shifted-field identity F^(xi)(theta) = F(theta - xi)",
                   failures, "20 random pairs, independent finite-difference side")


def criterion_08_frame_invariance() -> CriterionResult:
    failures = []
    for name, state in (("a4 J=3", tetrahedral_state(build_spin_rep(6))),
                        ("a4 J=4", tetrahedral_state(build_spin_rep(8))),
                        ("entangled J=7/2", maximally_entangled_probe(build_spin_rep(7)))):
        dev = su2_invariance_check(state, trials=20, rng=8)
        if dev > 1e-9:
            failures.append(f"{name}: deviation {dev:.2e}")
    ghz_dev = su2_invariance_check(ghz_state(build_spin_rep(6), "z"), trials=20, rng=8)
    if ghz_dev < 1e-3:
        failures.append(f"negative control GHZ deviated only {ghz_dev:.2e}")
    return _result(8, "frame invariance of the information matrix", failures,
                   "20 random frames per probe; GHZ negative control")


def criterion_09_measurement_saturation() -> CriterionResult:
    failures = []
    ts = np.linspace(1e-3, 0.8, 20)
    for two_j in (6, 8):
        state = tetrahedral_state(build_spin_rep(two_j))
        scheme = kl_scheme(state)
        obs_kl = kl_moment_observables(scheme)
        obs_par = parity_observables(state.rep)
        j = two_j / 2
        target = 4 * j * (j + 1) / 3
        cfi0 = classical_fim(scheme, state, 1e-3 * DIRECTION)
        if np.max(np.abs(np.diag(cfi0) - target)) > 1e-3 * target:
            failures.append(f"2J={two_j}: CFI diagonal off at t=1e-3")
        if np.max(np.abs(cfi0 - np.diag(np.diag(cfi0)))) > 1e-4:
            failures.append(f"2J={two_j}: CFI off-diagonals above 1e-4")
        gaps = {"cfi": [], "m_kl": [], "m_parity": []}
        for t in ts:
            theta = t * DIRECTION
            trf = np.trace(qfim(state, theta).matrix)
            gaps["cfi"].append(trf - np.trace(classical_fim(scheme, state, theta)))
            gaps["m_kl"].append(trf - np.trace(moments_matrix(obs_kl, state, theta).matrix))
            gaps["m_parity"].append(
                trf - np.trace(moments_matrix(obs_par, state, theta).matrix))
        for label, gap in gaps.items():
            gap = np.array(gap)
            if gap.min() < -1e-9:
                failures.append(f"2J={two_j} {label}: negative gap {gap.min():.2e}")
            if np.argmin(gap) != 0:
                failures.append(f"2J={two_j} {label}: smallest gap not at smallest t")
            inside = ts <= 0.5
            if np.any(np.diff(gap[inside]) < -1e-12):
                failures.append(f"2J={two_j} {label}: non-monotone approach below t=0.5")
    return _result(9, "measurement saturation toward tr F as t -> 0", failures,
                   "kl scheme CFI, kl moment list, parity moment list; J = 3, 4")


def criterion_10_ordering_bounds() -> CriterionResult:
    failures = []
    rng = np.random.default_rng(10)

    def check(tag, f, other):
        low = float(np.linalg.eigvalsh(f - other)[0])
        if low < -1e-9:
            failures.append(f"{tag}: min eigenvalue {low:.2e}")

    for two_j in (6, 8):
        state = tetrahedral_state(build_spin_rep(two_j))
        scheme = kl_scheme(state)
        obs_kl = kl_moment_observables(scheme)
        obs_par = parity_observables(state.rep)
        gen_list = observable_list(list(state.rep.operators), labels=["Jx", "Jy", "Jz"])
        for trial in range(5):
            theta = 0.05 + 0.4 * np.abs(rng.normal(size=3))
            f = qfim(state, theta).matrix
            check(f"2J={two_j} CFI(kl) {trial}", f,
                  classical_fim(scheme, state, theta))
            check(f"2J={two_j} M(kl) {trial}", f,
                  moments_matrix(obs_kl, state, theta).matrix)
            check(f"2J={two_j} M(parity) {trial}", f,
                  moments_matrix(obs_par, state, theta).matrix)
            check(f"2J={two_j} M(generators) {trial}", f,
                  moments_matrix(gen_list, state, theta).matrix)
    ent = maximally_entangled_probe(build_spin_rep(7))
    obs = parity_observables(ent.rep)
    if obs.is_commuting():
        failures.append("half-integer parity list unexpectedly commutes")
    for trial in range(5):
        theta = 0.05 + 0.3 * np.abs(rng.normal(size=3))
        f = qfim(ent, theta).matrix
        mm = moments_matrix(obs, ent, theta)
        check(f"entangled M(parity) {trial}", f, mm.matrix)
        if mm.marginal_defect > 1e-10:
            failures.append(f"entangled joint marginals defect {mm.marginal_defect:.2e}")
        check(f"entangled CFI(parity joint) {trial}", f,
              classical_fim(obs, ent, theta))
    return _result(10, "information-ordering bounds F >= CFI, F >= M", failures,
                   "projective, commuting and non-commuting observable lists")


def criterion_11_reduced_state_lemma() -> CriterionResult:
    failures = []
    n = 6
    rep = build_spin_rep(n)
    embed = qubit_embedding(n)
    dims = [2] * n
    floor = 9 / (n * (n + 2))
    target1 = np.eye(2) / 2
    target2 = np.eye(4) / 4 + sum(kron(p, p) for p in PAULI) / 12

    def reduced_via_embedding(state):
        big = embed @ state.amps
        rho = np.outer(big, big.conj())
        return partial_trace(rho, dims, [0]), partial_trace(rho, dims, [0, 1])

    rng = np.random.default_rng(11)
    states = [("optimal", tetrahedral_state(rep))]
    for k in range(50):
        v = rng.normal(size=7) + 1j * rng.normal(size=7)
        states.append((f"random {k}", probe_state(rep, v, normalize=True)))
    base = tetrahedral_state(rep)
    for k in range(5):
        bump = rng.normal(size=7) + 1j * rng.normal(size=7)
        v = base.amps + 0.05 * bump / np.linalg.norm(bump)
        states.append((f"perturbed {k}", probe_state(rep, v, normalize=True)))
    for name, state in states:
        rho1, rho2 = reduced_via_embedding(state)
        reduced_match = (np.max(np.abs(rho1 - target1)) < 1e-8
                         and np.max(np.abs(rho2 - target2)) < 1e-8)
        f = qfim(state)
        if f.min_eigenvalue() < 1e-10:
            floor_match = False
        else:
            value, _ = trace_inverse(f)
            floor_match = abs(value - floor) < 1e-10
        if reduced_match != floor_match:
            failures.append(f"{name}: reduced-state match {reduced_match} but "
                            f"floor match {floor_match}")
        own1, own2 = reduced_qubit_states(state)
        if np.max(np.abs(own1 - rho1)) > 1e-10 or np.max(np.abs(own2 - rho2)) > 1e-10:
            failures.append(f"{name}: moment inversion disagrees with embedding")
    return _result(11, "floor equality iff maximally mixed pair correlations",
                   failures, "56 states at N = 6, qubit-embedding oracle")


def criterion_12_su4() -> CriterionResult:
    failures = []
    problem = su4mod.build_su4_problem()
    defects = su4mod.symmetry_defects(problem)
    for name, value in defects.items():
        if value > 1e-11:
            failures.append(f"relation {name}: defect {value:.2e}")
    for seed in range(3):
        f = su4mod.su4_qfim(problem, su4mod.twirled_probe(problem, seed=seed))
        dev = su4mod.circulant_pattern_defect(f.matrix)
        if dev > 1e-10:
            failures.append(f"twirled seed {seed}: circulant defect {dev:.2e}")
        f = su4mod.su4_qfim(problem, su4mod.z4_twirled_probe(problem, seed=seed))
        dev = su4mod.circulant_pattern_defect(f.matrix)
        if dev > 1e-10:
            failures.append(f"cyclic twirl seed {seed}: circulant defect {dev:.2e}")
    db, dc = su4mod.f_gradient_numeric(a=0.5)
    if abs(db) > 1e-10 or abs(dc) > 1e-10:
        failures.append(f"gradient at (b,c)=(0,0) is ({db:.2e}, {dc:.2e})")
    report = su4mod.su4_conditions(problem, su4mod.entangled_probe())
    if report.max_residual > 1e-12:
        failures.append(f"entangled probe residual {report.max_residual:.2e}")
    return _result(12, "four-parameter problem: relations, circulant form, probe",
                   failures, "includes the realized (ZW)^4 = -1 central sign")


def criterion_13_wigner() -> CriterionResult:
    failures = []
    rng = np.random.default_rng(13)
    for two_j in (1, 3, 4, 6, 8, 10):
        rep = build_spin_rep(two_j)
        v = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
        state = probe_state(rep, v, normalize=True)
        imag = imaginary_defect(state)
        if imag > 1e-10:
            failures.append(f"2J={two_j}: imaginary defect {imag:.2e}")
        grid = spin_wigner(state, 181, 360)
        purity = sphere_overlap(grid, grid)
        if abs(purity - 1.0) > 1e-6:
            failures.append(f"2J={two_j}: purity {purity!r}")
        angles = 0.6 * rng.normal(size=3)
        rotated = probe_state(rep, rotation(rep, angles) @ state.amps, normalize=True)
        thetas = rng.uniform(0.1, math.pi - 0.1, size=25)
        phis = rng.uniform(0, 2 * math.pi, size=25)
        points = np.stack([np.sin(thetas) * np.cos(phis),
                           np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=1)
        back = points @ so3_rotation(angles)
        tb = np.arccos(np.clip(back[:, 2], -1, 1))
        pb = np.arctan2(back[:, 1], back[:, 0])
        dev = float(np.max(np.abs(wigner_pointwise(rotated, thetas, phis)
                                  - wigner_pointwise(state, tb, pb))))
        if dev > 1e-4:
            failures.append(f"2J={two_j}: covariance deviation {dev:.2e}")
    rep = build_spin_rep(6)
    state = tetrahedral_state(rep)
    group = build_group("a4", rep)
    thetas = rng.uniform(0.1, math.pi - 0.1, size=25)
    phis = rng.uniform(0, 2 * math.pi, size=25)
    base = wigner_pointwise(state, thetas, phis)
    points = np.stack([np.sin(thetas) * np.cos(phis),
                       np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=1)
    for g in group.elements:
        mapped = points @ so3_of_unitary(rep, g).T
        tm = np.arccos(np.clip(mapped[:, 2], -1, 1))
        pm = np.arctan2(mapped[:, 1], mapped[:, 0])
        dev = float(np.max(np.abs(wigner_pointwise(state, tm, pm) - base)))
        if dev > 1e-8:
            failures.append(f"orbit symmetry broken by {dev:.2e}")
    return _result(13, "sphere grids: reality, purity, covariance, orbit symmetry",
                   failures, "2J up to 10 suite on 181x360 grids")


ALL_CRITERIA: list[Callable[[], CriterionResult]] = [
    criterion_01_compass_periodicity,
    criterion_02_exact_states,
    criterion_03_multiplicities,
    criterion_04_conditions,
    criterion_05_floor,
    criterion_06_scalar_curve,
    criterion_07_shift_identity,
    criterion_08_frame_invariance,
    criterion_09_measurement_saturation,
    criterion_10_ordering_bounds,
    criterion_11_reduced_state_lemma,
    criterion_12_su4,
    criterion_13_wigner,
]


def run_criteria(numbers: Iterable[int] | None = None,
                 stream=None) -> list[CriterionResult]:
    selected = set(numbers) if numbers is not None else None
    results = []
    for index, func in enumerate(ALL_CRITERIA, start=1):
        if selected is not None and index not in selected:
            continue
        outcome = func()
        results.append(outcome)
        if stream is not None:
            status = "PASS" if outcome.passed else "FAIL"
            stream(f"[{status}] criterion {outcome.number:2d}: {outcome.name} "
                   f"({outcome.details})")
    return results
