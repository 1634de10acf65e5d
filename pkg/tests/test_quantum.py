import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlediag.presets import CLUSTER_WORDS
from bundlediag.quantum import (
    GHZ_WORDS,
    MeasurementAssignment,
    OtherProduct,
    PauliWord,
    QuantumError,
    RankOneProduct,
    StateVector,
    ZeroProduct,
    basis_state,
    bell_state,
    cluster_ring_state,
    eigprojector,
    ghz_ab_state,
    joint_distribution,
    projector_product_check,
    ring_stabilizer_generators,
    same_up_to_phase,
    stabilizer_sign,
)

TOL = 1e-9
I2 = np.eye(2)
MATS = {"I": I2, "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}


def dense_distribution(psi: StateVector, ctx: MeasurementAssignment) -> np.ndarray:
    """Oracle: full 2^n projectors built with kron, one per outcome tuple."""
    n = psi.n
    placed = dict(ctx.context)
    out = []
    for outcome in itertools.product((0, 1), repeat=len(ctx.context)):
        bits = dict(zip((q for q, _ in ctx.context), outcome))
        factors = [(I2 + (-1) ** bits[q] * MATS[placed[q]]) / 2 if q in placed else I2 for q in range(n)]
        proj = reduce(np.kron, factors)
        out.append(np.linalg.norm(proj @ psi.amplitudes) ** 2)
    return np.array(out)


def test_eigprojectors():
    plus = np.array([1, 1]) / np.sqrt(2)
    assert np.allclose(eigprojector("X", 0), np.outer(plus, plus))
    assert np.allclose(eigprojector("Z", 0), np.diag([1, 0]))
    p = eigprojector("Y", 1)
    v = np.array([1, -1j]) / np.sqrt(2)
    assert np.allclose(p, np.outer(v, v.conj()))
    assert abs(np.vdot(v, MATS["Y"] @ v) + 1) < TOL
    for letter, bit in itertools.product("XYZ", (0, 1)):
        q = eigprojector(letter, bit)
        assert np.allclose(q @ q, q, atol=1e-12) and np.allclose(q, q.conj().T)
        assert np.allclose(MATS[letter] @ q, (-1) ** bit * q)


def test_pauli_word_parsing_and_printing():
    w = PauliWord.parse("+XZ11Z")
    assert (w.sign, w.letters, w.n) == (1, "XZIIZ", 5)
    assert str(w) == "+XZ11Z"
    assert str(PauliWord.parse("-XYY")) == "-XYY"
    with pytest.raises(QuantumError):
        PauliWord.parse("XQ")


def test_pauli_word_matrix_matches_kron():
    for text in ("XYZ", "-YY1", "1XZ"):
        w = PauliWord.parse(text)
        dense = w.sign * reduce(np.kron, [MATS[l] for l in w.letters])
        assert np.allclose(w.matrix(), dense)
        v = np.arange(2**w.n) + 1j
        assert np.allclose(w.apply(v), dense @ v)


def test_symplectic_commutation_matches_matrices():
    for a, b in itertools.product(["XXX", "XYY", "YXY", "ZZ1", "X1Z", "1YX"], repeat=2):
        pa, pb = PauliWord.parse(a), PauliWord.parse(b)
        if pa.n != pb.n:
            continue
        ma, mb = pa.matrix(), pb.matrix()
        assert pa.commutes(pb) == np.allclose(ma @ mb, mb @ ma)


def test_products_with_imaginary_phase_rejected():
    assert PauliWord.parse("XX") * PauliWord.parse("ZZ") == PauliWord.parse("-YY")
    with pytest.raises(QuantumError):
        PauliWord.parse("X") * PauliWord.parse("Z")


def test_state_vector_validation():
    with pytest.raises(QuantumError):
        StateVector(np.array([1, 1], dtype=complex))
    with pytest.raises(QuantumError):
        StateVector(np.ones(3) / np.sqrt(3))
    with pytest.raises(QuantumError):
        StateVector(np.array([1.0]))
    assert StateVector.from_pairs([[1, 0], [0, 1]]).n == 1


def test_joint_distribution_examples():
    bell = bell_state()
    xx = joint_distribution(bell, MeasurementAssignment.from_word("XX"))
    assert np.allclose(xx, [0.5, 0, 0, 0.5], atol=TOL)
    assert np.allclose(joint_distribution(basis_state("00"), MeasurementAssignment.from_word("ZZ")), [1, 0, 0, 0])
    ghz = joint_distribution(ghz_ab_state(), MeasurementAssignment.from_word("XXX"))
    support = {format(i, "03b") for i, p in enumerate(ghz) if p > TOL}
    assert support == {"001", "010", "100", "111"}
    assert np.allclose(ghz[ghz > TOL], 0.25)


def test_joint_distribution_errors():
    psi = bell_state()
    with pytest.raises(QuantumError):
        joint_distribution(psi, MeasurementAssignment(((0, "X"), (0, "Z"))))
    with pytest.raises(QuantumError):
        joint_distribution(psi, MeasurementAssignment(((0, "X"), (0, "X"))))
    with pytest.raises(QuantumError):
        joint_distribution(psi, MeasurementAssignment(((2, "X"),)))


def test_joint_distribution_matches_dense_projectors():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        psi = StateVector.normalized(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
        k = int(rng.integers(1, n + 1))
        qubits = rng.permutation(n)[:k]
        ctx = MeasurementAssignment(tuple((int(q), str(rng.choice(list("XYZ")))) for q in qubits))
        got = joint_distribution(psi, ctx)
        assert np.allclose(got, dense_distribution(psi, ctx), atol=TOL)
        assert abs(got.sum() - 1) < TOL


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.permutations(range(3)))
def test_order_invariance(seed, perm):
    rng = np.random.default_rng(seed)
    psi = StateVector.normalized(rng.normal(size=8) + 1j * rng.normal(size=8))
    ctx = [(0, "X"), (1, "Y"), (2, "Z")]
    base = joint_distribution(psi, MeasurementAssignment(tuple(ctx))).reshape(2, 2, 2)
    permuted = joint_distribution(psi, MeasurementAssignment(tuple(ctx[i] for i in perm))).reshape(2, 2, 2)
    assert np.allclose(permuted, np.transpose(base, perm), atol=TOL)


def test_stabilizer_signs():
    ghz = ghz_ab_state()
    assert stabilizer_sign(ghz, PauliWord.parse("XXX")) == -1
    assert stabilizer_sign(ghz, PauliWord.parse("YYX")) == 1
    assert stabilizer_sign(ghz, PauliWord.parse("XYY")) == -1
    assert stabilizer_sign(basis_state("0"), PauliWord.parse("X")) is None


def test_cluster_state_stabilized_by_every_context_word():
    psi = cluster_ring_state(5)
    for _, word in CLUSTER_WORDS:
        assert stabilizer_sign(psi, PauliWord.parse(word)) == 1
    for g in ring_stabilizer_generators(5):
        assert stabilizer_sign(psi, g) == 1
    assert str(ring_stabilizer_generators(5)[0]) == "+XZ11Z"


def test_projector_product_examples():
    words = [PauliWord.parse(w) for w in GHZ_WORDS]

    def signed(signs):
        return [PauliWord(s, w.letters) for s, w in zip(signs, words)]

    assert isinstance(projector_product_check(signed((-1, 1, -1, 1))), ZeroProduct)
    r = projector_product_check(signed((-1, -1, -1, 1)))
    assert isinstance(r, RankOneProduct)
    assert same_up_to_phase(r.state, ghz_ab_state().amplitudes)
    assert isinstance(projector_product_check([PauliWord.parse("Z")]), RankOneProduct)
    ident = projector_product_check([PauliWord.parse("1")])
    assert isinstance(ident, OtherProduct) and ident.rank == 2 and abs(ident.trace - 2) < TOL
    with pytest.raises(QuantumError):
        projector_product_check([])


def test_same_up_to_phase():
    v = np.array([1, 1j]) / np.sqrt(2)
    assert same_up_to_phase(v, 1j * v)
    assert not same_up_to_phase(v, np.array([1, 0]))
