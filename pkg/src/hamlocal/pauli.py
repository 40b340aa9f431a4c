"""Pauli strings, Pauli-sum Hamiltonians and distances to k-locality.

Pauli strings are stored as an (x, z) pair of n-bit masks.  Qubit 1 is the
leftmost letter of the text label and the most significant bit of each mask,
which matches the ``np.kron`` ordering used for dense matrices.

The coefficient index of a string is ``(x << n) | z``; the same index is used
for Bell-basis coordinates in :mod:`hamlocal.bell`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np
from scipy.linalg import hadamard

N_MAX = 6
NORM_SLACK = 1e-9

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class HamiltonianError(ValueError):
    """Raised when a term list cannot be turned into a valid Hamiltonian."""


def memory_estimate(n: int) -> int:
    """Bytes for one dense complex matrix on the doubled 2n-qubit space."""
    return 16 * 4 ** (2 * n)


@dataclass(frozen=True, order=True)
class PauliString:
    n: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative qubit count")
        top = 1 << self.n
        if not (0 <= self.x < top and 0 <= self.z < top):
            raise ValueError(f"masks do not fit in {self.n} qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        label = label.strip().upper()
        if not label or any(ch not in _LETTER_BITS for ch in label):
            raise ValueError(f"not a Pauli word: {label!r}")
        x = z = 0
        for ch in label:
            bx, bz = _LETTER_BITS[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def from_index(cls, n: int, index: int) -> "PauliString":
        return cls(n, index >> n, index & ((1 << n) - 1))

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @property
    def label(self) -> str:
        out = []
        for i in range(self.n - 1, -1, -1):
            out.append(_BITS_LETTER[((self.x >> i) & 1, (self.z >> i) & 1)])
        return "".join(out)

    @property
    def index(self) -> int:
        return (self.x << self.n) | self.z

    @property
    def weight(self) -> int:
        return bin(self.x | self.z).count("1")

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for ch in self.label:
            out = np.kron(out, _SINGLE[ch])
        return out

    def __str__(self) -> str:
        return self.label


def weight(p: PauliString) -> int:
    return p.weight


def z_chain(n: int, length: int) -> PauliString:
    """Z on qubits 1..length, identity elsewhere."""
    if not 0 <= length <= n:
        raise ValueError("chain length must lie in [0, n]")
    mask = ((1 << length) - 1) << (n - length)
    return PauliString(n, 0, mask)


@lru_cache(maxsize=None)
def weight_table(n: int) -> np.ndarray:
    """Pauli weight of every coefficient index, shape (4**n,)."""
    d = 1 << n
    idx = np.arange(d)
    x = idx[:, None]
    z = idx[None, :]
    return np.vectorize(lambda v: bin(v).count("1"))(x | z).reshape(-1)


@lru_cache(maxsize=None)
def _transform_tables(n: int):
    d = 1 << n
    idx = np.arange(d)
    xor = idx[:, None] ^ idx[None, :]  # [a, y] -> y ^ a
    overlap = np.vectorize(lambda v: bin(v).count("1"))(idx[:, None] & idx[None, :])
    phase = (1j) ** overlap  # i^{|a & b|}
    wht = hadamard(d).astype(float)
    return idx, xor, phase, wht


def pauli_coefficients(M: np.ndarray) -> np.ndarray:
    """All Pauli coefficients tr(P M) / 2**n, flattened by coefficient index.

    Uses one gather along each "xor diagonal" followed by a Walsh-Hadamard
    transform, O(4**n * 2**n) instead of 4**n dense traces.
    """
    M = np.asarray(M)
    d = M.shape[0]
    n = d.bit_length() - 1
    if M.shape != (d, d) or (1 << n) != d:
        raise ValueError("matrix dimension must be a power of two")
    idx, xor, phase, wht = _transform_tables(n)
    diag = M[idx[None, :], xor]  # [a, y] -> M[y, y ^ a]
    return (phase * (diag @ wht) / d).reshape(-1)


def operator_from_coefficients(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pauli_coefficients`: sum_P c_P P as a dense matrix."""
    d = 1 << n
    idx, xor, phase, wht = _transform_tables(n)
    c = np.asarray(coeffs).reshape(d, d)
    diag = (c * phase.conj()) @ wht  # [a, y] -> M[y, y ^ a]
    M = np.empty((d, d), dtype=complex)
    M[idx[None, :], xor] = diag
    return M


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings on ``n`` qubits (no validation)."""

    n: int
    terms: Mapping[PauliString, float] = field(default_factory=dict)

    def __post_init__(self):
        ordered = dict(sorted(self.terms.items(), key=lambda kv: kv[0].index))
        for p in ordered:
            if p.n != self.n:
                raise ValueError(f"term {p} does not act on {self.n} qubits")
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    def __len__(self) -> int:
        return len(self.terms)

    # mapping proxies do not pickle; worker pools need to ship these
    def __getstate__(self):
        state = dict(self.__dict__)
        state["terms"] = dict(self.terms)
        return state

    def __setstate__(self, state):
        state = dict(state, terms=MappingProxyType(state["terms"]))
        self.__dict__.update(state)

    def coefficient_vector(self) -> np.ndarray:
        vec = np.zeros(4**self.n)
        for p, a in self.terms.items():
            vec[p.index] = a
        return vec

    def matrix(self) -> np.ndarray:
        return operator_from_coefficients(self.coefficient_vector().astype(complex), self.n)

    def frobenius(self) -> float:
        """Normalized Frobenius norm, i.e. the l2 norm of the coefficients."""
        return math.sqrt(sum(a * a for a in self.terms.values()))

    def scaled(self, factor: float) -> "PauliSum":
        return PauliSum(self.n, {p: factor * a for p, a in self.terms.items()})

    def as_text(self) -> str:
        return "".join(f"{p.label} {a!r}\n" for p, a in self.terms.items())


@dataclass(frozen=True)
class HamiltonianSpec(PauliSum):
    """A validated Hamiltonian: traceless, real, spectral norm at most 1."""

    identity_stripped: bool = False
    spectral_norm: float = 0.0


def locality_split(h: PauliSum, k: int) -> tuple[PauliSum, PauliSum]:
    low = {p: a for p, a in h.terms.items() if p.weight <= k}
    high = {p: a for p, a in h.terms.items() if p.weight > k}
    return PauliSum(h.n, low), PauliSum(h.n, high)


@dataclass(frozen=True)
class NormKind:
    """Distance measure: ``frobenius`` (normalized), ``operator``,
    ``schatten`` (normalized, order p) or ``pauli`` (l_p of coefficients)."""

    kind: str = "frobenius"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("frobenius", "operator", "schatten", "pauli"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in ("schatten", "pauli"):
            if self.p is None or not self.p >= 1:
                raise ValueError(f"unsupported p={self.p}; need p >= 1")

    def __str__(self) -> str:
        return self.kind if self.p is None else f"{self.kind}({self.p:g})"


def norm_of(op: PauliSum, norm: NormKind) -> float:
    if norm.kind == "frobenius":
        return op.frobenius()
    if norm.kind == "pauli":
        vals = np.abs(np.fromiter(op.terms.values(), float, len(op.terms)))
        if math.isinf(norm.p):
            return float(vals.max(initial=0.0))
        return float(np.sum(vals**norm.p) ** (1.0 / norm.p))
    sv = np.linalg.svd(op.matrix(), compute_uv=False)
    if norm.kind == "operator" or math.isinf(norm.p):
        return float(sv.max())
    d = 1 << op.n
    return float((np.sum(sv**norm.p) / d) ** (1.0 / norm.p))


def distance_to_klocal(h: PauliSum, k: int, norm: NormKind | None = None) -> float:
    """Selected norm of the weight > k part of ``h``."""
    _, high = locality_split(h, k)
    return norm_of(high, norm or NormKind())


def validate_hamiltonian(
    raw_terms: Iterable[tuple[str | PauliString, complex]],
    *,
    n_max: int = N_MAX,
    warn: bool = True,
) -> HamiltonianSpec:
    """Build a HamiltonianSpec from ``(word, coefficient)`` pairs.

    Identity terms are dropped (``identity_stripped`` records it), repeated
    words are summed, and the exact spectral norm must not exceed 1.
    """
    merged: dict[PauliString, float] = {}
    n = None
    stripped = False
    for word, coeff in raw_terms:
        p = word if isinstance(word, PauliString) else PauliString.from_label(word)
        if n is None:
            n = p.n
        elif p.n != n:
            raise HamiltonianError(f"term {p} has {p.n} qubits, expected {n}")
        c = complex(coeff)
        if abs(c.imag) > 0:
            raise HamiltonianError(f"coefficient of {p} is not real: {coeff!r}")
        if p.is_identity():
            stripped = True
            continue
        merged[p] = merged.get(p, 0.0) + c.real
    if n is None:
        raise HamiltonianError("empty term list; give at least one term to fix n")
    if n > n_max:
        raise HamiltonianError(f"n={n} exceeds n_max={n_max}")
    if stripped and warn:
        warnings.warn("identity term removed from Hamiltonian", stacklevel=2)
    merged = {p: a for p, a in merged.items() if a != 0.0}
    body = PauliSum(n, merged)
    norm = float(np.max(np.abs(np.linalg.eigvalsh(body.matrix())))) if merged else 0.0
    if norm > 1.0 + NORM_SLACK:
        raise HamiltonianError(f"spectral norm {norm:.12g} exceeds 1")
    return HamiltonianSpec(n, merged, identity_stripped=stripped, spectral_norm=norm)


def zero_hamiltonian(n: int) -> HamiltonianSpec:
    return HamiltonianSpec(n, {})


def decompose_hermitian(M: np.ndarray, atol: float = 1e-14) -> dict[PauliString, float]:
    M = np.asarray(M, dtype=complex)
    if not np.allclose(M, M.conj().T, atol=1e-12, rtol=0):
        raise ValueError("matrix is not Hermitian")
    n = M.shape[0].bit_length() - 1
    coeffs = pauli_coefficients(M)
    return {
        PauliString.from_index(n, i): float(c.real)
        for i, c in enumerate(coeffs)
        if abs(c) > atol
    }


def random_pauli_hamiltonian(
    n: int,
    n_terms: int,
    rng: np.random.Generator,
    *,
    target_norm: float = 1.0,
) -> HamiltonianSpec:
    """Distinct non-identity strings, uniform coefficients on [-1, 1],
    rescaled so the spectral norm equals ``target_norm``."""
    n_terms = min(n_terms, 4**n - 1)
    picks = rng.choice(np.arange(1, 4**n), size=n_terms, replace=False)
    coeffs = rng.uniform(-1.0, 1.0, size=n_terms)
    body = PauliSum(n, {PauliString.from_index(n, int(i)): float(c) for i, c in zip(picks, coeffs)})
    norm = float(np.max(np.abs(np.linalg.eigvalsh(body.matrix()))))
    scale = target_norm / norm
    # shave the last ulp so validation never trips on rounding
    return validate_hamiltonian(
        [(p, a * scale * (1 - 1e-13)) for p, a in body.terms.items()], n_max=max(n, N_MAX)
    )


def parse_hamiltonian(text: str, *, source: str = "<string>") -> HamiltonianSpec:
    """Parse ``<pauli-word> <coefficient>`` lines; ``#`` starts a comment."""
    terms = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise HamiltonianError(f"{source}:{lineno}: expected '<word> <coefficient>'")
        word, value = parts
        try:
            p = PauliString.from_label(word)
        except ValueError as exc:
            raise HamiltonianError(f"{source}:{lineno}: {exc}") from None
        if width is None:
            width = p.n
        elif p.n != width:
            raise HamiltonianError(
                f"{source}:{lineno}: word length {p.n} differs from {width}"
            )
        try:
            coeff = float(value)
        except ValueError:
            raise HamiltonianError(f"{source}:{lineno}: bad coefficient {value!r}") from None
        terms.append((p, coeff))
    return validate_hamiltonian(terms)


def load_hamiltonian(path) -> HamiltonianSpec:
    with open(path) as fh:
        return parse_hamiltonian(fh.read(), source=str(path))
