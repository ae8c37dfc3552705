"""Spin-J irreducible representations of SU(2).

Generator matrices in the |J, m_z> basis ordered m = J, J-1, ..., -J
(Condon-Shortley phases, real non-negative ladder elements), rotations,
spin coherent states, collective first/second moments, and the inversion
of one-/two-qubit reduced states from those moments.

Probe states are either a vector in a single spin-J representation or, with
``tensor=True``, a vector in the tensor product of two copies of the same
representation on which all operators act as A (x) 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import comb
from typing import Iterable

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NotSymmetricContext, ZeroNorm

AXES = ("x", "y", "z")

# Pauli matrices, used by the qubit reduced-state inversion.
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class SpinRep:
    """A spin-J irrep: 2J, its dimension and the three generator matrices."""

    two_j: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def operators(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.jx, self.jy, self.jz)

    def operator(self, axis) -> np.ndarray:
        if axis in (0, 1, 2):
            return self.operators[axis]
        return self.operators[AXES.index(axis)]


def m_values(two_j: int) -> np.ndarray:
    """Eigenvalues of Jz in basis order: J, J-1, ..., -J."""
    return (two_j - 2 * np.arange(two_j + 1)) / 2


def build_spin_rep(two_j: int) -> SpinRep:
    """Construct the spin-J irrep via the ladder operators.

    <J, m+1| J_+ |J, m> = sqrt(J(J+1) - m(m+1)), real and non-negative.
    """
    two_j = int(two_j)
    if two_j < 0:
        raise DimensionMismatch("two_j must be non-negative")
    dim = two_j + 1
    j = two_j / 2
    ms = m_values(two_j)
    jplus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        m = ms[k]
        jplus[k - 1, k] = math.sqrt(j * (j + 1) - m * (m + 1))
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    jz = np.diag(ms).astype(complex)
    return SpinRep(two_j=two_j, jx=jx, jy=jy, jz=jz)


@dataclass(frozen=True, eq=False)
class ProbeState:
    """Unit vector in a spin-J irrep, or in two copies of it (tensor=True)."""

    rep: SpinRep
    amps: np.ndarray
    tensor: bool = False

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        expected = self.rep.dim ** 2 if self.tensor else self.rep.dim
        if amps.shape != (expected,):
            raise DimensionMismatch(
                f"expected {expected} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ZeroNorm(f"amplitudes have norm {norm!r}, expected 1")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]


def probe_state(rep: SpinRep, amps: Iterable[complex], tensor: bool = False,
                normalize: bool = False) -> ProbeState:
    """Wrap raw amplitudes into a ProbeState, optionally normalizing first."""
    amps = np.asarray(list(amps) if not isinstance(amps, np.ndarray) else amps,
                      dtype=complex)
    if normalize:
        norm = np.linalg.norm(amps)
        if norm < 1e-10:
            raise ZeroNorm("cannot normalize a (near-)zero vector")
        amps = amps / norm
    return ProbeState(rep=rep, amps=amps, tensor=tensor)


def operator_action(state: ProbeState, op: np.ndarray) -> np.ndarray:
    """(A|psi>) for single-rep states, (A (x) 1)|psi> for tensor states."""
    if state.tensor:
        d = state.rep.dim
        return (op @ state.amps.reshape(d, d)).ravel()
    return op @ state.amps


def generator_action(state: ProbeState, axis) -> np.ndarray:
    """J_axis applied to the state (J_axis (x) 1 on tensor states)."""
    return operator_action(state, state.rep.operator(axis))


def apply_unitary(state: ProbeState, u: np.ndarray) -> ProbeState:
    """U|psi> (or (U (x) 1)|psi>), renormalized against rounding drift."""
    amps = operator_action(state, u)
    return probe_state(state.rep, amps, tensor=state.tensor, normalize=True)


def rotation(rep: SpinRep, theta) -> np.ndarray:
    """U(theta) = exp(-i theta . J) in the given representation."""
    theta = np.asarray(theta, dtype=float)
    h = theta[0] * rep.jx + theta[1] * rep.jy + theta[2] * rep.jz
    return linalg.unitary_exp(h)


def evolve(state: ProbeState, theta) -> ProbeState:
    """exp(-i theta . J)|psi>, acting on the first factor of tensor states."""
    return apply_unitary(state, rotation(state.rep, theta))


def so3_rotation(theta) -> np.ndarray:
    """The SO(3) matrix R with U(theta) (m.J) U(theta)^dagger = (R m).J."""
    theta = np.asarray(theta, dtype=float)
    angle = float(np.linalg.norm(theta))
    if angle < 1e-300:
        return np.eye(3)
    n = theta / angle
    cross = np.array([[0.0, -n[2], n[1]],
                      [n[2], 0.0, -n[0]],
                      [-n[1], n[0], 0.0]])
    return math.cos(angle) * np.eye(3) + math.sin(angle) * cross \
        + (1 - math.cos(angle)) * np.outer(n, n)


def so3_of_unitary(rep: SpinRep, u: np.ndarray) -> np.ndarray:
    """The rotation R with U (m.J) U^dagger = (R m).J, from trace overlaps."""
    norm = np.trace(rep.jz @ rep.jz).real
    r = np.zeros((3, 3))
    for i in range(3):
        conj = u @ rep.operator(i) @ u.conj().T
        for k in range(3):
            r[k, i] = np.trace(conj @ rep.operator(k)).real / norm
    return r


def coherent_state(rep: SpinRep, zeta) -> ProbeState:
    """Spin coherent state |zeta>, stereographic parameter from the south pole.

    zeta = 0 gives |J, J>, zeta = inf (math.inf or any infinite complex) gives
    |J, -J>. Amplitude on |J, m> is proportional to
    zeta^(J-m) sqrt(C(2J, J-m)).
    """
    dim = rep.dim
    amps = np.zeros(dim, dtype=complex)
    if zeta is None or (isinstance(zeta, (int, float, complex)) and not np.isfinite(complex(zeta))):
        amps[-1] = 1.0
        return ProbeState(rep=rep, amps=amps)
    zeta = complex(zeta)
    n = rep.two_j
    for k in range(dim):
        amps[k] = (zeta ** k) * math.sqrt(comb(n, k))
    return probe_state(rep, amps, normalize=True)


@dataclass(frozen=True)
class CollectiveMoments:
    """First and second collective-spin moments of a probe state."""

    first: np.ndarray    # (3,) real <J_i>
    second: np.ndarray   # (3,3) complex <J_i J_l>

    @property
    def symmetrized(self) -> np.ndarray:
        """Real Jordan part <J_i J_l + J_l J_i>/2."""
        return ((self.second + self.second.conj().T) / 2).real

    @property
    def antisymmetric_imag(self) -> np.ndarray:
        """Im <J_i J_l>, the weak-commutativity witness."""
        return self.second.imag


def collective_moments(state: ProbeState) -> CollectiveMoments:
    """<J_i> and <J_i J_l> (J_i (x) 1 on tensor states) for i, l in x, y, z."""
    jvecs = [generator_action(state, axis) for axis in range(3)]
    psi = state.amps
    first = np.array([np.vdot(psi, v).real for v in jvecs])
    second = np.array([[np.vdot(jvecs[i], jvecs[l]) for l in range(3)]
                       for i in range(3)])
    # <J_i J_l> = <J_i psi | J_l psi> because the generators are Hermitian.
    return CollectiveMoments(first=first, second=second)


def reduced_qubit_states(state: ProbeState) -> tuple[np.ndarray, np.ndarray]:
    """One- and two-qubit reduced states of a symmetric N-qubit state, N = 2J.

    Inverted from the collective moments:
      tr[rho1 sigma_i]          = 2 <J_i> / N
      tr[rho2 sigma_i x sigma_j] = (4 Re<J_i J_j> - N delta_ij) / (N (N - 1))
    """
    if state.tensor:
        raise NotSymmetricContext("tensor-product probes have no single-copy qubit picture")
    n = state.rep.two_j
    if n < 2:
        raise NotSymmetricContext(f"need N = 2J >= 2 qubits, got N = {n}")
    mom = collective_moments(state)
    a = 2 * mom.first / n
    c = (4 * mom.second.real - n * np.eye(3)) / (n * (n - 1))
    c = (c + c.T) / 2
    rho1 = np.eye(2, dtype=complex) / 2
    for i in range(3):
        rho1 += a[i] * PAULI[i] / 2
    rho2 = np.eye(4, dtype=complex) / 4
    for i in range(3):
        rho2 += a[i] * (linalg.kron(PAULI[i], np.eye(2)) + linalg.kron(np.eye(2), PAULI[i])) / 4
        for l in range(3):
            rho2 += c[i, l] * linalg.kron(PAULI[i], PAULI[l]) / 4
    return rho1, rho2


def qubit_embedding(two_j: int) -> np.ndarray:
    """Isometry from the spin-J basis into (C^2)^(x N), N = 2J.

    Column k is the normalized sum of all computational basis states with
    k lowered qubits (|J, m = J - k> as a symmetric Dicke state; qubit |0>
    is spin up). Brute-force oracle for the moment-based inversion above.
    """
    n = int(two_j)
    dim = 2 ** n
    cols = np.zeros((dim, n + 1))
    from itertools import combinations
    for k in range(n + 1):
        for positions in combinations(range(n), k):
            idx = sum(1 << (n - 1 - p) for p in positions)
            cols[idx, k] = 1.0
        cols[:, k] /= np.linalg.norm(cols[:, k])
    return cols


# --- JSON interchange -------------------------------------------------------

STATE_SCHEMA = {
    "type": "object",
    "properties": {
        "two_j": {"type": "integer", "minimum": 0},
        "tensor": {"type": "boolean"},
        "amps": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
            "minItems": 1,
        },
    },
    "required": ["two_j", "tensor", "amps"],
    "additionalProperties": False,
}


def state_to_dict(state: ProbeState) -> dict:
    return {
        "two_j": state.rep.two_j,
        "tensor": state.tensor,
        "amps": [[float(a.real), float(a.imag)] for a in state.amps],
    }


def state_from_dict(data: dict) -> ProbeState:
    rep = build_spin_rep(int(data["two_j"]))
    amps = np.array([complex(re, im) for re, im in data["amps"]])
    return probe_state(rep, amps, tensor=bool(data["tensor"]), normalize=True)


def state_to_json(state: ProbeState) -> str:
    return json.dumps(state_to_dict(state), indent=2)


def state_from_json(text: str) -> ProbeState:
    return state_from_dict(json.loads(text))
