"""Finite subgroups of unitary groups realized as explicit matrix lists.

Provides breadth-first closure over generator words, the averaging projector
onto the trivial irrep, its multiplicity, an orthonormal invariant basis, and
the twirl of a state into the invariant subspace.

The two named SU(2) subgroups (integer J only):

  a4  tetrahedral rotations, generators
        G1 = exp(+i (2 pi / 3) (Jx + Jy + Jz) / sqrt(3)),  G2 = exp(-i pi Jz),
      order 12;
  s3  generators G1 = exp(+i (2 pi / 3) Jz), G2 = exp(+i pi Jx), order 6.

Both contain the cyclic Z3 that permutes the generators (a4) or rotates about
z by 2 pi / 3 (s3). At two_j = 0 every element collapses to (1), so the
realized order is 1; order checks apply from two_j >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .config import physics_tol
from .errors import (ClosureOverflow, NonIntegerTrace, NotIntegerSpin,
                     ZeroProjection)
from .spinrep import ProbeState, SpinRep, probe_state

DEDUP_TOL = 1e-9  # global-phase-sensitive max-entry distance

A4_TETRAHEDRAL = "a4"
S3_PRISM = "s3"
EXPECTED_ORDER = {A4_TETRAHEDRAL: 12, S3_PRISM: 6}


@dataclass(frozen=True, eq=False)
class FiniteGroupRep:
    """A finite group as an explicit list of unitaries closed under product."""

    name: str
    elements: list
    generators: list
    rep: SpinRep | None = None

    @property
    def order(self) -> int:
        return len(self.elements)


def close_group(generators, dedup_tol: float = DEDUP_TOL,
                max_order: int | None = None) -> list:
    """Breadth-first closure of the generated matrix group.

    Deduplication is phase-sensitive (max-entry distance < dedup_tol), so a
    projective sign produces distinct elements. Raises ClosureOverflow once
    the element count exceeds max_order.
    """
    if not generators:
        raise ValueError("need at least one generator")
    gens = [np.asarray(g, dtype=complex) for g in generators]
    dim = gens[0].shape[0]
    if max_order is None:
        max_order = 8192
    elements = [np.eye(dim, dtype=complex)]

    def find(m) -> bool:
        return any(np.max(np.abs(m - e)) < dedup_tol for e in elements)

    frontier = []
    for g in gens:
        if not find(g):
            elements.append(g)
            frontier.append(g)
    while frontier:
        fresh = []
        for f in frontier:
            for g in gens:
                for m in (f @ g, g @ f):
                    if not find(m):
                        elements.append(m)
                        fresh.append(m)
                        if len(elements) > max_order:
                            raise ClosureOverflow(
                                f"closure exceeded {max_order} elements")
        frontier = fresh
    return elements


def build_group(name: str, rep: SpinRep) -> FiniteGroupRep:
    """Realize one of the named SU(2) subgroups in the given spin rep."""
    key = name.lower().replace("_tetrahedral", "").replace("_prism", "")
    if key not in EXPECTED_ORDER:
        raise ValueError(f"unknown group {name!r}; use 'a4' or 's3'")
    if rep.two_j % 2 != 0:
        raise NotIntegerSpin(f"{name} needs integer J, got two_j = {rep.two_j}")
    if key == A4_TETRAHEDRAL:
        g1 = linalg.unitary_exp((rep.jx + rep.jy + rep.jz) / math.sqrt(3),
                                -2 * math.pi / 3)
        g2 = linalg.unitary_exp(rep.jz, math.pi)
    else:
        g1 = linalg.unitary_exp(rep.jz, -2 * math.pi / 3)
        g2 = linalg.unitary_exp(rep.jx, -math.pi)
    expected = EXPECTED_ORDER[key]
    elements = close_group([g1, g2], max_order=4 * expected)
    if rep.two_j >= 2 and len(elements) != expected:
        raise ClosureOverflow(
            f"{name} closed with {len(elements)} elements, expected {expected}")
    return FiniteGroupRep(name=key, elements=elements, generators=[g1, g2], rep=rep)


def build_custom_group(generators, expected_order: int | None = None,
                       name: str = "custom", rep: SpinRep | None = None,
                       max_order: int = 8192) -> FiniteGroupRep:
    """Close a user-supplied generator list (used by the d = 4 problem)."""
    cap = 4 * expected_order if expected_order is not None else max_order
    elements = close_group(generators, max_order=cap)
    if expected_order is not None and len(elements) != expected_order:
        raise ClosureOverflow(
            f"{name} closed with {len(elements)} elements, expected {expected_order}")
    return FiniteGroupRep(name=name, elements=list(elements),
                          generators=[np.asarray(g, complex) for g in generators],
                          rep=rep)


@dataclass(frozen=True, eq=False)
class TrivialIrrepData:
    """Averaging projector onto the invariant subspace and its basis."""

    projector: np.ndarray
    multiplicity: int
    basis: list  # orthonormal invariant vectors, largest component made real positive


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase


def trivial_irrep(group: FiniteGroupRep, trace_tol: float = 1e-6) -> TrivialIrrepData:
    """Pi = (1/|G|) sum_g g, multiplicity = tr Pi, eigenvalue-1 basis."""
    pi = sum(group.elements) / group.order
    trace = np.trace(pi).real
    mult = round(trace)
    if abs(trace - mult) > trace_tol:
        raise NonIntegerTrace(f"projector trace {trace!r} is not near an integer")
    values, vectors = linalg.herm_eig(pi, tol=1e-8)
    basis = [_fix_phase(vectors[:, k]) for k in range(len(values))
             if values[k] > 0.5]
    # eigenvalues cluster at 0 and 1; 0.5 splits them robustly
    if len(basis) != mult:
        raise NonIntegerTrace(
            f"eigenvalue count {len(basis)} disagrees with trace {trace!r}")
    return TrivialIrrepData(projector=pi, multiplicity=mult, basis=basis)


def invariant_overlap(group: FiniteGroupRep, state: ProbeState) -> float:
    """||Pi |psi>||^2, the weight of the state inside the invariant subspace."""
    pi = sum(group.elements) / group.order
    return float(np.linalg.norm(pi @ state.amps) ** 2)


def twirl(group: FiniteGroupRep, state: ProbeState,
          zero_tol: float | None = None) -> ProbeState:
    """Pi |psi>, renormalized. Raises ZeroProjection below the norm threshold."""
    if zero_tol is None:
        zero_tol = physics_tol()
    pi = sum(group.elements) / group.order
    projected = pi @ state.amps
    norm = np.linalg.norm(projected)
    if norm < zero_tol:
        raise ZeroProjection(f"projected norm {norm:.3e} below {zero_tol:.1e}")
    return probe_state(state.rep, projected / norm, tensor=state.tensor)


def s3_multiplicity_formula(j: int) -> int:
    """Closed-form multiplicity of the s3 trivial irrep in the spin-J rep."""
    j = int(j)
    if j < 0:
        raise ValueError("J must be a non-negative integer")
    raw = (2 * j + 1 + 3 * (-1) ** j
           + 2 * math.sin(math.pi * (2 * j + 1) / 3) / math.sin(math.pi / 3)) / 6
    return round(raw)
