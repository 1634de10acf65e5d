"""Dense state-vector simulation of commuting single-qubit Pauli measurements.

Qubit 0 is the leftmost tensor factor (most significant bit of a basis index),
so ``|001>`` has qubit 2 in state ``|1>``. Pauli words are written as strings
such as ``"-XYY"`` or ``"+XZ11Z"``; ``1`` and ``I`` both denote the identity.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

MAX_QUBITS = 12
CONSTRUCTION_TOL = 1e-12
PHYSICS_TOL = 1e-9

_S = 1 / np.sqrt(2)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Eigenvector for outcome bit j (eigenvalue (-1)**j).
EIGENVECTORS = {
    "X": (np.array([_S, _S], dtype=complex), np.array([_S, -_S], dtype=complex)),
    "Y": (np.array([_S, 1j * _S], dtype=complex), np.array([_S, -1j * _S], dtype=complex)),
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}

# Single-letter products: (a, b) -> (phase, letter) with a @ b = phase * letter.
_PRODUCT = {}
for _a, _b in itertools.product("IXYZ", repeat=2):
    _m = PAULI[_a] @ PAULI[_b]
    for _c in "IXYZ":
        _ph = np.trace(PAULI[_c].conj().T @ _m) / 2
        if abs(abs(_ph) - 1) < 1e-12:
            _PRODUCT[_a, _b] = (complex(np.round(_ph)), _c)


class QuantumError(ValueError):
    pass


@dataclass(frozen=True)
class PauliWord:
    sign: int
    letters: str

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise QuantumError(f"sign must be +1 or -1, got {self.sign!r}")
        letters = self.letters.upper().replace("1", "I")
        if not letters or set(letters) - set("IXYZ"):
            raise QuantumError(f"bad Pauli letters {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliWord":
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(sign, text)

    @property
    def n(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters.replace("I", "1")

    def commutes(self, other: "PauliWord") -> bool:
        """Symplectic rule: commute iff an even number of positions anticommute."""
        if self.n != other.n:
            raise QuantumError("Pauli words act on different qubit counts")
        clashes = sum(1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b)
        return clashes % 2 == 0

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        if self.n != other.n:
            raise QuantumError("Pauli words act on different qubit counts")
        phase = complex(self.sign * other.sign)
        letters = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _PRODUCT[a, b]
            phase *= ph
            letters.append(c)
        if abs(phase.imag) > 0.5:
            raise QuantumError(f"product {self} * {other} carries an imaginary phase")
        return PauliWord(1 if phase.real > 0 else -1, "".join(letters))

    def sparse(self) -> sp.csr_matrix:
        """Signed monomial matrix of the word (one nonzero per column)."""
        n = self.n
        cols = np.arange(1 << n)
        rows = cols.copy()
        vals = np.full(1 << n, complex(self.sign))
        for q, letter in enumerate(self.letters):
            bit = (cols >> (n - 1 - q)) & 1
            if letter in "XY":
                rows ^= 1 << (n - 1 - q)
            if letter == "Z":
                vals *= np.where(bit, -1, 1)
            elif letter == "Y":
                vals *= np.where(bit, -1j, 1j)
        return sp.csr_matrix((vals, (rows, cols)), shape=(1 << n, 1 << n))

    def matrix(self) -> np.ndarray:
        return self.sparse().toarray()

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        t = np.asarray(amplitudes, dtype=complex).reshape((2,) * self.n)
        for q, letter in enumerate(self.letters):
            if letter != "I":
                t = _apply_1q(t, PAULI[letter], q)
        return self.sign * t.reshape(-1)


def _apply_1q(t: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(mat, t, axes=([1], [q])), 0, q)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size != 1 << n or not 1 <= n <= MAX_QUBITS:
            raise QuantumError(f"need 2**n amplitudes with 1 <= n <= {MAX_QUBITS}, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > CONSTRUCTION_TOL:
            raise QuantumError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise QuantumError("zero vector cannot be normalized")
        return cls(amps / norm)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "StateVector":
        """Amplitudes given as ``[[re, im], ...]`` (the file format); renormalized."""
        try:
            amps = [complex(float(re), float(im)) for re, im in pairs]
        except (TypeError, ValueError):
            raise QuantumError("amplitudes must be a list of [re, im] pairs") from None
        return cls.normalized(amps)

    @property
    def n(self) -> int:
        return int(round(np.log2(self.amplitudes.size)))


def basis_state(bits: str) -> StateVector:
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[int(bits, 2)] = 1
    return StateVector(amps)


def eigprojector(letter: str, outcome_bit: int) -> np.ndarray:
    """Projector onto the ``(-1)**outcome_bit`` eigenspace of X, Y or Z."""
    v = EIGENVECTORS[letter.upper()][outcome_bit]
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class MeasurementAssignment:
    """Single-qubit observables ``(qubit, letter)`` measured jointly."""

    context: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        ctx = tuple((int(q), str(l).upper()) for q, l in self.context)
        for q, l in ctx:
            if l not in "XYZ" or len(l) != 1:
                raise QuantumError(f"bad letter {l!r} in measurement context")
            if q < 0:
                raise QuantumError("qubit index must be nonnegative")
        object.__setattr__(self, "context", ctx)

    @classmethod
    def from_word(cls, word: Union[str, PauliWord]) -> "MeasurementAssignment":
        if isinstance(word, str):
            word = PauliWord.parse(word)
        return cls(tuple((q, l) for q, l in enumerate(word.letters) if l != "I"))

    def embedded(self, n: int) -> list[PauliWord]:
        words = []
        for q, l in self.context:
            if q >= n:
                raise QuantumError(f"qubit {q} out of range for {n} qubits")
            letters = ["I"] * n
            letters[q] = l
            words.append(PauliWord(1, "".join(letters)))
        return words

    def is_commuting(self, n: int) -> bool:
        words = self.embedded(n)
        return all(a.commutes(b) for a, b in itertools.combinations(words, 2))


def joint_distribution(psi: StateVector, ctx: MeasurementAssignment) -> np.ndarray:
    """Outcome probabilities, lexicographic over tuples in context order."""
    n = psi.n
    if not ctx.is_commuting(n):
        raise QuantumError(f"context {ctx.context} does not commute")
    qubits = [q for q, _ in ctx.context]
    if len(set(qubits)) != len(qubits):
        # Commuting but repeated qubit means the same letter twice on one qubit.
        raise QuantumError("context measures a qubit twice")
    t = psi.amplitudes.reshape((2,) * n)
    for q, letter in ctx.context:
        e0, e1 = EIGENVECTORS[letter]
        # Rows are <e_0| and <e_1|: rotates the measured basis onto |0>, |1>.
        t = _apply_1q(t, np.vstack([e0.conj(), e1.conj()]), q)
    probs = np.abs(t) ** 2
    others = tuple(q for q in range(n) if q not in qubits)
    probs = probs.sum(axis=others) if others else probs
    # Remaining axes are in ascending qubit order; reorder to context order.
    order = sorted(qubits)
    probs = np.transpose(probs, [order.index(q) for q in qubits])
    return probs.reshape(-1)


def stabilizer_sign(psi: StateVector, w: PauliWord, tol: float = PHYSICS_TOL) -> Optional[int]:
    """+1 or -1 if ``w|psi> = ±|psi>``, else None."""
    if w.n != psi.n:
        raise QuantumError("word and state have different qubit counts")
    image = w.apply(psi.amplitudes)
    if np.linalg.norm(image - psi.amplitudes) < tol:
        return 1
    if np.linalg.norm(image + psi.amplitudes) < tol:
        return -1
    return None


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = PHYSICS_TOL) -> bool:
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        return False
    overlap = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return overlap > 1 - tol


@dataclass(frozen=True)
class ZeroProduct:
    max_entry: float


@dataclass(frozen=True, eq=False)
class RankOneProduct:
    state: np.ndarray
    trace: complex


@dataclass(frozen=True)
class OtherProduct:
    rank: int
    trace: complex


ProductResult = Union[ZeroProduct, RankOneProduct, OtherProduct]


def projector_product(words: Sequence[PauliWord]) -> sp.csr_matrix:
    """``prod_i (I + sign_i W_i) / 2`` in the given order, as a sparse matrix."""
    if not 1 <= len(words) <= 8:
        raise QuantumError("between 1 and 8 words are supported")
    n = words[0].n
    if any(w.n != n for w in words) or n > MAX_QUBITS:
        raise QuantumError(f"all words must act on the same n <= {MAX_QUBITS} qubits")
    eye = sp.identity(1 << n, dtype=complex, format="csr")
    out = eye
    for w in words:
        out = out @ ((eye + w.sparse()) * 0.5)
    out.eliminate_zeros()
    return out


def _max_abs(m: sp.spmatrix) -> float:
    m = sp.csr_matrix(m)
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def projector_product_check(words: Sequence[PauliWord], tol: float = PHYSICS_TOL) -> ProductResult:
    m = projector_product(words)
    biggest = _max_abs(m)
    if biggest < tol:
        return ZeroProduct(biggest)
    trace = complex(m.diagonal().sum())
    projector = _max_abs(m - m.conj().T) < tol and _max_abs(m @ m - m) < tol
    if projector and abs(trace - 1) < tol:
        norms = np.sqrt(np.asarray(abs(m).power(2).sum(axis=0)).reshape(-1))
        j = int(np.argmax(norms))
        dense_col = m[:, j].toarray().reshape(-1)
        state = dense_col / np.linalg.norm(dense_col)
        k = int(np.argmax(np.abs(state)))
        state = state * (abs(state[k]) / state[k])
        return RankOneProduct(state, trace)
    if projector:
        rank = int(round(trace.real))
    else:
        rank = int(np.linalg.matrix_rank(m.toarray(), tol=tol))
    return OtherProduct(rank, trace)


GHZ_WORDS = ("XXX", "XYY", "YXY", "YYX")


def lemma_table(words: Sequence[str] = GHZ_WORDS) -> list[tuple[tuple[int, ...], ProductResult]]:
    """Projector products for all ``2**len(words)`` sign patterns."""
    rows = []
    for signs in itertools.product((1, -1), repeat=len(words)):
        signed = [PauliWord(s, w) for s, w in zip(signs, words)]
        rows.append((signs, projector_product_check(signed)))
    return rows


# -- states -----------------------------------------------------------------


def bell_state() -> StateVector:
    return StateVector(np.array([_S, 0, 0, _S], dtype=complex))


def ghz_ab_state() -> StateVector:
    """(|001> - |110>)/sqrt(2)."""
    amps = np.zeros(8, dtype=complex)
    amps[0b001] = _S
    amps[0b110] = -_S
    return StateVector(amps)


def cluster_ring_state(n: int = 5) -> StateVector:
    """|+>^n followed by controlled-Z on every ring edge (i, i+1 mod n)."""
    if not 3 <= n <= MAX_QUBITS:
        raise QuantumError("ring cluster needs 3 <= n <= MAX_QUBITS")
    idx = np.arange(1 << n)
    bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
    parity = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        parity ^= bits[q] & bits[(q + 1) % n]
    amps = np.where(parity, -1.0, 1.0).astype(complex) / np.sqrt(1 << n)
    return StateVector(amps)


def ring_stabilizer_generators(n: int = 5) -> list[PauliWord]:
    """``Z_{i-1} X_i Z_{i+1}`` for every qubit of the ring."""
    out = []
    for i in range(n):
        letters = ["I"] * n
        letters[i] = "X"
        letters[(i - 1) % n] = "Z"
        letters[(i + 1) % n] = "Z"
        out.append(PauliWord(1, "".join(letters)))
    return out
