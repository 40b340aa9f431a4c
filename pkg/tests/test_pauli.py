import math
import pickle
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hamlocal.pauli import (
    HamiltonianError,
    NormKind,
    PauliString,
    PauliSum,
    decompose_hermitian,
    distance_to_klocal,
    locality_split,
    operator_from_coefficients,
    parse_hamiltonian,
    pauli_coefficients,
    random_pauli_hamiltonian,
    validate_hamiltonian,
    weight,
    z_chain,
)

from conftest import all_labels, kron_pauli, label_weight, ref_coefficients, ref_matrix

words = st.integers(1, 4).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n))


@pytest.mark.parametrize("label,w", [("IXYZ", 3), ("IIII", 0), ("ZZ", 2)])
def test_weight_examples(label, w):
    assert weight(PauliString.from_label(label)) == w


@given(words)
def test_label_roundtrip_and_matrix(label):
    p = PauliString.from_label(label)
    assert p.label == label
    assert PauliString.from_index(p.n, p.index) == p
    assert p.weight == label_weight(label)
    np.testing.assert_array_equal(p.matrix(), kron_pauli(label))


def test_identity_has_index_zero():
    assert PauliString.from_label("III").index == 0
    assert PauliString.identity(3).is_identity()


def test_bad_label():
    with pytest.raises(ValueError):
        PauliString.from_label("XQ")


def test_z_chain():
    assert z_chain(4, 2).label == "ZZII"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_coefficients_match_trace_formula(n, rng):
    d = 2**n
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    c = pauli_coefficients(M)
    ref = ref_coefficients(M)
    for label, val in ref.items():
        assert abs(c[PauliString.from_label(label).index] - val) < 1e-12
    np.testing.assert_allclose(operator_from_coefficients(c, n), M, atol=1e-12)


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_frobenius_equals_coefficient_l2(n, seed):
    r = np.random.default_rng(seed)
    terms = {lab: float(r.uniform(-1, 1)) for lab in all_labels(n)[1:]}
    h = PauliSum(n, {PauliString.from_label(p): a for p, a in terms.items()})
    M = ref_matrix(terms)
    assert math.isclose(h.frobenius(), math.sqrt(np.trace(M.conj().T @ M).real / 2**n), rel_tol=1e-12)


def test_locality_split_example():
    # norm 1.4, so an unvalidated sum
    h = PauliSum(2, {PauliString.from_label("ZZ"): 0.6, PauliString.from_label("IZ"): 0.8})
    low, high = locality_split(h, 1)
    assert {p.label: a for p, a in low.terms.items()} == {"IZ": 0.8}
    assert {p.label: a for p, a in high.terms.items()} == {"ZZ": 0.6}
    low, high = locality_split(h, 2)
    assert dict(low.terms) == dict(h.terms) and len(high) == 0


def test_locality_split_random(rng):
    h = random_pauli_hamiltonian(4, 12, rng)
    low, high = locality_split(h, 2)
    for p, a in h.terms.items():
        side = low if label_weight(p.label) <= 2 else high
        assert side.terms[p] == a
    assert len(low) + len(high) == len(h)


def test_distance_examples(rng):
    h = validate_hamiltonian([("ZZ", 0.5)])
    assert distance_to_klocal(h, 1) == 0.5
    chain = validate_hamiltonian([(z_chain(3, 2), 0.37)])
    for norm in [NormKind(), NormKind("operator"), NormKind("schatten", 1), NormKind("schatten", 3),
                 NormKind("pauli", 1), NormKind("pauli", math.inf)]:
        assert math.isclose(distance_to_klocal(chain, 1, norm), 0.37, rel_tol=1e-12)
    h = random_pauli_hamiltonian(3, 10, rng)
    high = {p.label: a for p, a in h.terms.items() if p.weight > 1}
    ref = np.max(np.abs(np.linalg.eigvalsh(ref_matrix(high))))
    assert math.isclose(distance_to_klocal(h, 1, NormKind("operator")), ref, rel_tol=1e-10)


def test_normkind_rejects_small_p():
    with pytest.raises(ValueError, match="p"):
        NormKind("schatten", 0.5)


def test_validate_strips_identity():
    with pytest.warns(UserWarning):
        h = validate_hamiltonian([("II", 0.3), ("ZZ", 0.6)])
    assert {p.label: a for p, a in h.terms.items()} == {"ZZ": 0.6}
    assert h.identity_stripped


def test_validate_merges_duplicates():
    h = validate_hamiltonian([("ZZ", 0.7), ("ZZ", 0.2)])
    assert math.isclose(h.terms[PauliString.from_label("ZZ")], 0.9)


def test_validate_rejects_norm_above_one():
    with pytest.raises(HamiltonianError, match="spectral norm"):
        validate_hamiltonian([("XX", 0.8), ("ZZ", 0.8)])


def test_validate_rejects_complex_and_mixed_width():
    with pytest.raises(HamiltonianError):
        validate_hamiltonian([("XX", 0.1j)])
    with pytest.raises(HamiltonianError):
        validate_hamiltonian([("XX", 0.1), ("X", 0.1)])


def test_decompose_examples(rng):
    assert {p.label: a for p, a in decompose_hermitian(kron_pauli("ZZ")).items()} == {"ZZ": 1.0}
    assert {p.label: a for p, a in decompose_hermitian(np.eye(4)).items()} == {"II": 1.0}
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    M = A + A.conj().T
    terms = decompose_hermitian(M)
    back = ref_matrix({p.label: a for p, a in terms.items()})
    assert np.max(np.abs(back - M)) < 1e-10


@given(st.integers(1, 4), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_random_generator_norm(n, terms, seed):
    h = random_pauli_hamiltonian(n, terms, np.random.default_rng(seed))
    assert len(h) == min(terms, 4**n - 1)
    assert abs(h.spectral_norm - 1.0) < 1e-9
    assert all(not p.is_identity() for p in h.terms)


def test_parse_reports_line_numbers():
    h = parse_hamiltonian("# comment\nZZI 0.5\n\nIXX -0.25  # trailing\n")
    assert {p.label: a for p, a in h.terms.items()} == {"ZZI": 0.5, "IXX": -0.25}
    with pytest.raises(HamiltonianError, match=":3:"):
        parse_hamiltonian("ZZ 0.1\nXX 0.1\nXX abc\n", source="f")
    with pytest.raises(HamiltonianError, match=":2:"):
        parse_hamiltonian("ZZ 0.1\nXXX 0.1\n", source="f")


def test_pickle_roundtrip():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h = validate_hamiltonian([("ZZ", 0.4), ("XI", 0.2)])
    back = pickle.loads(pickle.dumps(h))
    assert dict(back.terms) == dict(h.terms) and back.spectral_norm == h.spectral_norm
