"""Constructors for the named probe states.

GHZ states along a coordinate axis, their phase-weighted compass
superpositions, group-invariant states from the tetrahedral (a4) and
triangular-prism (s3) subgroups, the coefficient fine-tuner for invariant
subspaces of multiplicity >= 2, and the maximally entangled two-copy probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import NoTrivialIrrep, ZeroNorm
from .groups import FiniteGroupRep, build_group, trivial_irrep, twirl
from .metrology import check_conditions
from .spinrep import (ProbeState, SpinRep, coherent_state, probe_state,
                      rotation)

# Rotations taking the z axis onto the requested axis; the ghz components
# |J, m_axis = +/-J> are these rotations applied to |J, m_z = +/-J>.
_AXIS_ROTATION = {
    "x": (0.0, math.pi / 2, 0.0),      # exp(-i pi/2 Jy)
    "y": (-math.pi / 2, 0.0, 0.0),     # exp(+i pi/2 Jx)
    "z": None,
}


def ghz_state(rep: SpinRep, axis: str = "z") -> ProbeState:
    """(|J, m_axis = J> + |J, m_axis = -J>) / sqrt(2) in the m_z basis."""
    amps = np.zeros(rep.dim, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    if rep.two_j == 0:
        amps[0] = 1.0
    state = ProbeState(rep=rep, amps=amps)
    angles = _AXIS_ROTATION[axis]
    if angles is None:
        return state
    u = rotation(rep, angles)
    return probe_state(rep, u @ state.amps, normalize=True)


def compass_state(rep: SpinRep, deltas=(0.0, 0.0, 0.0)) -> ProbeState:
    """Normalized sum of the three GHZ states with adjustable phases."""
    total = np.zeros(rep.dim, dtype=complex)
    for delta, axis in zip(deltas, "xyz"):
        total += np.exp(1j * float(delta)) * ghz_state(rep, axis).amps
    norm = np.linalg.norm(total)
    if norm < 1e-10:
        raise ZeroNorm(f"compass superposition cancelled (norm {norm:.2e})")
    return probe_state(rep, total / norm)


def compass_trivial_overlap_scan(n_values, optimize_deltas: bool = False,
                                 grid: int = 16) -> list[tuple[int, float]]:
    """Weight of the compass state inside the a4-invariant subspace per N.

    With optimize_deltas the three phases are tuned (coarse grid^3 scan plus
    local refinement) to maximize the overlap; otherwise deltas = 0.
    """
    from .spinrep import build_spin_rep
    rows = []
    for n in n_values:
        n = int(n)
        if n % 2 != 0:
            raise ValueError(f"N must be even, got {n}")
        rep = build_spin_rep(n)
        group = build_group("a4", rep)
        pi = sum(group.elements) / group.order

        def overlap(deltas):
            try:
                state = compass_state(rep, deltas)
            except ZeroNorm:
                return 0.0
            return float(np.linalg.norm(pi @ state.amps) ** 2)

        if not optimize_deltas:
            rows.append((n, overlap((0.0, 0.0, 0.0))))
            continue
        ticks = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        best, best_val = (0.0, 0.0, 0.0), -1.0
        for da in ticks:
            for db in ticks:
                for dc in ticks:
                    val = overlap((da, db, dc))
                    if val > best_val:
                        best, best_val = (da, db, dc), val
        res = minimize(lambda d: -overlap(d), np.array(best), method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-12})
        rows.append((n, float(-res.fun)))
    return rows


def tetrahedral_state(rep: SpinRep, coefficients=None) -> ProbeState:
    """A state in the a4-invariant subspace (the unique one when mult = 1).

    For multiplicity > 1 the optional coefficient vector selects the
    combination over the invariant basis; default is the first basis vector.
    """
    group = build_group("a4", rep)
    data = trivial_irrep(group)
    if data.multiplicity == 0:
        raise NoTrivialIrrep(f"a4 has no invariant states at J = {rep.j:g}")
    if coefficients is None:
        return probe_state(rep, data.basis[0])
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape != (data.multiplicity,):
        raise ValueError(f"need {data.multiplicity} coefficients")
    vec = sum(c * b for c, b in zip(coefficients, data.basis))
    return probe_state(rep, vec, normalize=True)


def s3_prism_state(rep: SpinRep, xi: float) -> ProbeState:
    """s3 twirl of the coherent state at polar angle xi (zeta = tan(xi/2))."""
    group = build_group("s3", rep)
    return twirl(group, coherent_state(rep, math.tan(float(xi) / 2)))


def prism_superposition(rep: SpinRep, xi: float) -> ProbeState:
    """The same state assembled term by term from six coherent states.

    Independent of the matrix twirl: uses the analytic action of the s3
    generators on coherent-state parameters,
      G1 |z> = e^{i pi N / 3} |e^{-2 pi i/3} z>,
      G2 |z> = i^N (z/|z|)^N |1/z>,
    over the element words {e, G1, G1^2, G2, G1 G2, G1^2 G2}.
    """
    n = rep.two_j
    t = math.tan(float(xi) / 2)
    if t <= 0:
        raise ZeroNorm("xi must lie in (0, pi) for a six-vertex superposition")
    w = np.exp(-2j * math.pi / 3)
    rot = np.exp(1j * math.pi * n / 3)
    flip = 1j ** n
    terms = [
        (1.0, t),
        (rot, w * t),
        (rot ** 2, w ** 2 * t),
        (flip, 1 / t),
        (rot * flip, w / t),
        (rot ** 2 * flip, w ** 2 / t),
    ]
    total = sum(phase * coherent_state(rep, z).amps for phase, z in terms)
    norm = np.linalg.norm(total)
    if norm < 1e-10:
        raise ZeroNorm("prism superposition cancelled")
    return probe_state(rep, total / norm)


@dataclass(frozen=True)
class FineTuneResult:
    """Best invariant-subspace combination found by the residual minimizer."""

    state: ProbeState
    coefficients: np.ndarray
    residual: float          # max condition violation, recomputed from the state
    flagged: bool            # residual above the acceptance threshold
    objective: float         # final sum-of-squares value of the search


def _condition_objective(state: ProbeState) -> float:
    report = check_conditions(state)
    off = report.cross_moments - np.diag(np.diag(report.cross_moments))
    return (float(np.sum(report.first_moments ** 2))
            + float(np.sum(off ** 2))
            + float(np.sum((report.variances - report.target_variance) ** 2)))


def fine_tune_invariant(group: FiniteGroupRep, rep: SpinRep | None = None,
                        threshold: float = 1e-8, restarts: int = 10,
                        rng=None) -> FineTuneResult:
    """Search the invariant subspace for a combination meeting the conditions.

    Minimizes the summed squared violations over unit-norm complex
    coefficient vectors (restarted local descent); the reported residual is
    the max violation recomputed from the final state. A residual above
    `threshold` is returned flagged, not raised.
    """
    rep = rep if rep is not None else group.rep
    if rep is None:
        raise ValueError("group carries no spin rep; pass one explicitly")
    data = trivial_irrep(group)
    if data.multiplicity == 0:
        raise NoTrivialIrrep(f"{group.name} has no invariant states at J = {rep.j:g}")
    basis = np.column_stack(data.basis)

    def assemble(z: np.ndarray) -> ProbeState:
        c = z[: data.multiplicity] + 1j * z[data.multiplicity:]
        c = c / np.linalg.norm(c)
        return probe_state(rep, basis @ c, normalize=True)

    if data.multiplicity == 1:
        state = probe_state(rep, data.basis[0])
        residual = check_conditions(state).max_residual
        return FineTuneResult(state=state, coefficients=np.array([1.0 + 0j]),
                              residual=residual, flagged=residual > threshold,
                              objective=_condition_objective(state))

    rng = np.random.default_rng(rng)
    objective = lambda z: _condition_objective(assemble(z))
    best = None
    for _ in range(restarts):
        z0 = rng.normal(size=2 * data.multiplicity)
        res = minimize(objective, z0, method="BFGS",
                       options={"gtol": 1e-14, "maxiter": 500})
        if best is None or res.fun < best.fun:
            best = res
    # derivative-free polish: BFGS stalls at finite-difference noise ~1e-18
    polish = minimize(objective, best.x, method="Nelder-Mead",
                      options={"xatol": 1e-14, "fatol": 1e-30, "maxiter": 4000})
    if polish.fun < best.fun:
        best = polish
    c = best.x[: data.multiplicity] + 1j * best.x[data.multiplicity:]
    c = c / np.linalg.norm(c)
    k = int(np.argmax(np.abs(c)))
    c = c * (abs(c[k]) / c[k])
    state = probe_state(rep, basis @ c, normalize=True)
    residual = check_conditions(state).max_residual
    return FineTuneResult(state=state, coefficients=c, residual=residual,
                          flagged=residual > threshold, objective=float(best.fun))


def maximally_entangled_probe(rep: SpinRep) -> ProbeState:
    """(2J+1)^(-1/2) sum_m |J,m>|J,m> as a two-copy probe."""
    amps = np.eye(rep.dim, dtype=complex).ravel() / math.sqrt(rep.dim)
    return ProbeState(rep=rep, amps=amps, tensor=True)
