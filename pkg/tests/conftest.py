"""Shared reference builders.  These go through Kronecker products in the
computational basis so they stay independent of the fast Pauli transform."""

from __future__ import annotations

import functools
import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_pauli(label: str) -> np.ndarray:
    return functools.reduce(np.kron, (SINGLE[c] for c in label))


def all_labels(n: int) -> list[str]:
    return ["".join(w) for w in itertools.product("IXYZ", repeat=n)]


def label_weight(label: str) -> int:
    return sum(c != "I" for c in label)


def ref_matrix(terms: dict[str, float]) -> np.ndarray:
    return sum(a * kron_pauli(p) for p, a in terms.items())


def ref_sigma(label: str) -> np.ndarray:
    """(I (x) P)|Phi+> with |Phi+> = sum_z |z>|z> / sqrt(d)."""
    d = 2 ** len(label)
    phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.kron(np.eye(d), kron_pauli(label)) @ phi


def ref_coefficients(M: np.ndarray) -> dict[str, complex]:
    n = M.shape[0].bit_length() - 1
    return {p: np.trace(kron_pauli(p) @ M) / 2**n for p in all_labels(n)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
