"""The doubled 2n-qubit space in Bell coordinates.

A doubled state ``s`` is held by its coordinates ``<sigma_P|s>`` over all n-qubit
Paulis, with ``|sigma_P> = (I (x) P)|sigma_I>`` and no further rephasing.
Every vector is ``(I (x) M)|sigma_I>`` for exactly one operator ``M``, and its
Bell coordinates are then the Pauli coefficients of ``M``; applying
``I (x) U`` is therefore ``M -> U M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import expm_hermitian
from .pauli import (
    PauliString,
    PauliSum,
    operator_from_coefficients,
    pauli_coefficients,
    weight_table,
)

NORM_TOL = 1e-9
SAMPLE_NORM_TOL = 1e-6
IDENTITY_INDEX = 0


@dataclass(frozen=True, eq=False)
class DoubledState:
    """Bell coordinates of a (possibly unnormalized) 2n-qubit vector.

    Left register (reference) is qubits 1..n, right register (evolved) is
    qubits n+1..2n.
    """

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (4**self.n,):
            raise ValueError(f"expected {4**self.n} coordinates, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_operator(cls, M: np.ndarray) -> "DoubledState":
        n = M.shape[0].bit_length() - 1
        return cls(n, pauli_coefficients(M))

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray, n: int) -> "DoubledState":
        d = 1 << n
        S = np.asarray(amps, dtype=complex).reshape(d, d)
        return cls.from_operator(np.sqrt(d) * S.T)

    def operator(self) -> np.ndarray:
        return operator_from_coefficients(self.coeffs, self.n)

    def amplitudes(self) -> np.ndarray:
        """Computational-basis amplitudes, index = (left << n) | right."""
        d = 1 << self.n
        return (self.operator().T / np.sqrt(d)).reshape(-1)

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1.0) <= NORM_TOL

    def normalized(self) -> "DoubledState":
        return DoubledState(self.n, self.coeffs / self.norm)

    def apply_right(self, U: np.ndarray) -> "DoubledState":
        """(I (x) U) applied to this state."""
        return DoubledState.from_operator(U @ self.operator())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def overlap(self, other: "DoubledState") -> complex:
        return complex(np.vdot(self.coeffs, other.coeffs))

    def __add__(self, other: "DoubledState") -> "DoubledState":
        return DoubledState(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other: "DoubledState") -> "DoubledState":
        return DoubledState(self.n, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "DoubledState":
        return DoubledState(self.n, self.coeffs * scalar)

    __rmul__ = __mul__


def sigma_identity(n: int) -> DoubledState:
    c = np.zeros(4**n, dtype=complex)
    c[IDENTITY_INDEX] = 1.0
    return DoubledState(n, c)


def sigma(p: PauliString) -> DoubledState:
    c = np.zeros(4**p.n, dtype=complex)
    c[p.index] = 1.0
    return DoubledState(p.n, c)


def bell_coefficients(s: DoubledState) -> np.ndarray:
    return s.coeffs


def bell_transform(s: DoubledState) -> dict[PauliString, complex]:
    return {PauliString.from_index(s.n, i): complex(c) for i, c in enumerate(s.coeffs)}


def sample_index(s: DoubledState, u: float | np.ndarray):
    """Inverse-CDF Bell measurement driven by uniform(s) ``u`` in [0, 1)."""
    if abs(s.norm - 1.0) > SAMPLE_NORM_TOL:
        raise ValueError(f"state norm {s.norm:.9g} is not 1")
    cdf = np.cumsum(s.probabilities())
    cdf /= cdf[-1]
    out = np.searchsorted(cdf, u, side="right")
    return np.minimum(out, cdf.size - 1)


def sample_bell(s: DoubledState, rng: np.random.Generator) -> PauliString:
    return PauliString.from_index(s.n, int(sample_index(s, rng.random())))


def locality_mask(n: int, k: int, *, include_identity: bool) -> np.ndarray:
    """Bell indices with weight > k, plus the identity when requested."""
    w = weight_table(n)
    mask = w > k
    if include_identity:
        mask = mask | (w == 0)
    return mask


@dataclass(frozen=True, eq=False)
class ProjectorD:
    """Projector onto span{sigma_P : P = I or |P| > k}.

    ``include_identity=False`` gives the strict projector onto |P| > k only.
    """

    n: int
    k: int
    include_identity: bool = True

    @cached_property
    def mask(self) -> np.ndarray:
        m = locality_mask(self.n, self.k, include_identity=self.include_identity)
        m.setflags(write=False)
        return m

    def apply(self, s: DoubledState) -> DoubledState:
        return DoubledState(s.n, np.where(self.mask, s.coeffs, 0.0))

    def dense(self) -> np.ndarray:
        return np.diag(self.mask.astype(complex))


def strict_projector(n: int, k: int) -> ProjectorD:
    return ProjectorD(n, k, include_identity=False)


def project_D(s: DoubledState, proj: ProjectorD) -> tuple[DoubledState, float]:
    s_in = proj.apply(s)
    return s_in, float(np.sum(np.abs(s_in.coeffs) ** 2))


def apply_A(h: PauliSum, proj: ProjectorD, s: DoubledState) -> DoubledState:
    """A s with A = Pi_D (I (x) H) Pi_D, never forming A."""
    return proj.apply(proj.apply(s).apply_right(h.matrix()))


def sigma_overlap(P: PauliString, M: np.ndarray, Q: PauliString) -> complex:
    """<sigma_P|(I (x) M)|sigma_Q>."""
    return sigma(P).overlap(sigma(Q).apply_right(M))


# Dense reference builders.  These form 4**n x 4**n matrices and are used by
# the verification suites only, never inside the testers.


def bell_matrix(M: np.ndarray) -> np.ndarray:
    """Matrix of I (x) M in Bell coordinates: entry [P, Q] = tr(P M Q) / 2**n."""
    n = M.shape[0].bit_length() - 1
    cols = [
        pauli_coefficients(M @ PauliString.from_index(n, q).matrix()) for q in range(4**n)
    ]
    return np.stack(cols, axis=1)


def dense_A(h: PauliSum, proj: ProjectorD) -> np.ndarray:
    P = proj.dense()
    return P @ bell_matrix(h.matrix()) @ P


def evolve_dense(A: np.ndarray, t: float) -> np.ndarray:
    return expm_hermitian(A, t)
