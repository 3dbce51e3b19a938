"""Dense linear algebra for three-qubit pure states and single-party operators.

Basis ordering is |q_A q_B q_C> lexicographic with A the most significant
bit, so amplitude index ``4*a + 2*b + c``. State vectors are plain complex
numpy arrays of length 8; global phase is never canonicalized, comparisons go
through :func:`fidelity_up_to_phase`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config import ALGEBRA_TOL, COMPLETE_TOL
from .exceptions import InvalidDensityMatrixError, InvalidInputError

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class Party(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"

    @property
    def index(self) -> int:
        return "ABC".index(self.value)

    @classmethod
    def coerce(cls, p: "Party | str | int") -> "Party":
        if isinstance(p, Party):
            return p
        if isinstance(p, (int, np.integer)):
            return cls("ABC"[int(p)])
        return cls(str(p).upper())


PARTIES = (Party.A, Party.B, Party.C)


def basis_label(index: int) -> str:
    return format(index, "03b")


def as_state(amplitudes: Iterable[complex] | np.ndarray) -> np.ndarray:
    """Validate and copy 8 amplitudes into a complex128 vector."""
    s = np.array(amplitudes, dtype=np.complex128).reshape(-1)
    if s.shape != (8,):
        raise InvalidInputError(f"a three-qubit state needs 8 amplitudes, got {s.size}")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("state amplitudes must be finite")
    if np.vdot(s, s).real <= 0.0:
        raise InvalidInputError("state has zero norm")
    return s


def ket(**amps: complex) -> np.ndarray:
    """Build a state from basis labels, e.g. ``ket(b000=1, b111=1)``.

    The result is not normalized.
    """
    s = np.zeros(8, dtype=np.complex128)
    for label, a in amps.items():
        s[int(label.lstrip("b"), 2)] = a
    return s


def normalize(s: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(s)
    if n == 0.0:
        raise InvalidInputError("cannot normalize the zero vector")
    return s / n


def is_normalized(s: np.ndarray, atol: float = ALGEBRA_TOL) -> bool:
    return abs(np.linalg.norm(s) - 1.0) <= atol


def ghz_state() -> np.ndarray:
    """(|000> + |111>)/sqrt(2)."""
    return ket(b000=1, b111=1) / math.sqrt(2)


def w_state() -> np.ndarray:
    """(|001> + |010> + |100>)/sqrt(3)."""
    return ket(b001=1, b010=1, b100=1) / math.sqrt(3)


def product_state(bits: str = "000") -> np.ndarray:
    s = np.zeros(8, dtype=np.complex128)
    s[int(bits, 2)] = 1.0
    return s


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A 2x2 operator acting on one party's qubit."""

    matrix: np.ndarray
    party: Party

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise InvalidInputError(f"local operator must be 2x2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("local operator entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "party", Party.coerce(self.party))

    def full(self) -> np.ndarray:
        """The 8x8 embedding with identities on the other two parties."""
        mats = [I2, I2, I2]
        mats[self.party.index] = self.matrix
        return np.kron(np.kron(mats[0], mats[1]), mats[2])

    def dagger(self) -> "LocalOperator":
        return LocalOperator(self.matrix.conj().T, self.party)

    def is_unitary(self, atol: float = ALGEBRA_TOL) -> bool:
        return is_unitary(self.matrix, atol)


def is_unitary(m: np.ndarray, atol: float = ALGEBRA_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


def apply_matrix(matrix: np.ndarray, party: Party | str | int, s: np.ndarray) -> np.ndarray:
    axis = Party.coerce(party).index
    t = np.tensordot(np.asarray(matrix, dtype=np.complex128), s.reshape(2, 2, 2), axes=([1], [axis]))
    # tensordot puts the contracted output axis first
    return np.moveaxis(t, 0, axis).reshape(8)


def apply_local(op: LocalOperator, s: np.ndarray) -> np.ndarray:
    """Apply ``op`` to its party's tensor factor. Output is not renormalized."""
    return apply_matrix(op.matrix, op.party, np.asarray(s, dtype=np.complex128))


def apply_product(u_a: np.ndarray, u_b: np.ndarray, u_c: np.ndarray, s: np.ndarray) -> np.ndarray:
    t = np.asarray(s, dtype=np.complex128).reshape(2, 2, 2)
    t = np.einsum("ia,jb,kc,abc->ijk", u_a, u_b, u_c, t)
    return t.reshape(8)


def branch_probability(op: LocalOperator, s: np.ndarray) -> float:
    out = apply_local(op, s)
    return float(np.vdot(out, out).real)


@dataclass(frozen=True, eq=False)
class MeasurementPair:
    """Two-outcome generalized measurement {M1, M2} on a single party.

    ``thetas`` records the phases of the off-diagonal canonical entries; every
    protocol here uses 0 for the first outcome and pi for the second.
    """

    m1: LocalOperator
    m2: LocalOperator
    label: str = ""
    thetas: tuple[float, float] = field(default=(0.0, math.pi))

    def __post_init__(self):
        if self.m1.party != self.m2.party:
            raise InvalidInputError("both outcomes of a measurement pair must act on the same party")

    @property
    def party(self) -> Party:
        return self.m1.party

    @property
    def operators(self) -> tuple[LocalOperator, LocalOperator]:
        return (self.m1, self.m2)

    def completeness_defect(self) -> float:
        m1, m2 = self.m1.matrix, self.m2.matrix
        total = m1.conj().T @ m1 + m2.conj().T @ m2
        return float(np.max(np.abs(total - I2)))

    @classmethod
    def from_matrices(cls, m1, m2, party, label: str = "", thetas=(0.0, math.pi)) -> "MeasurementPair":
        return cls(LocalOperator(m1, party), LocalOperator(m2, party), label, tuple(thetas))


def povm_complete(pair: MeasurementPair, atol: float = COMPLETE_TOL) -> bool:
    return pair.completeness_defect() <= atol


def reduced_density(s: np.ndarray, keep: Iterable[Party | str | int]) -> np.ndarray:
    """Partial trace of |s><s| over the parties not in ``keep``.

    Kept parties appear in A, B, C order regardless of the order given.
    """
    idx = sorted({Party.coerce(p).index for p in keep})
    if len(idx) == 0 or len(idx) == 3:
        raise InvalidInputError("nothing traced: keep one or two parties")
    traced = [i for i in range(3) if i not in idx]
    t = np.transpose(np.asarray(s, dtype=np.complex128).reshape(2, 2, 2), idx + traced)
    v = t.reshape(2 ** len(idx), -1)
    rho = v @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def pair_ensemble(s: np.ndarray, pair: Iterable[Party | str | int]) -> np.ndarray:
    """Columns are the unnormalized two-qubit states <k|_traced |s>.

    Their outer products sum to the pair's reduced density matrix, so they
    serve as an exact decomposition for the concurrence formula.
    """
    idx = sorted({Party.coerce(p).index for p in pair})
    if len(idx) != 2:
        raise InvalidInputError("a pair ensemble needs exactly two parties")
    traced = [i for i in range(3) if i not in idx]
    t = np.transpose(np.asarray(s, dtype=np.complex128).reshape(2, 2, 2), idx + traced)
    return t.reshape(4, 2)


def check_density(rho: np.ndarray, atol: float = ALGEBRA_TOL, psd_tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise InvalidDensityMatrixError(f"density matrix must be 2x2 or 4x4, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidDensityMatrixError("density matrix entries must be finite")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise InvalidDensityMatrixError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise InvalidDensityMatrixError("density matrix trace deviates from 1")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise InvalidDensityMatrixError("density matrix has a negative eigenvalue")
    return rho


def fidelity_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|; equals 1 exactly when the normalized inputs differ by a global phase."""
    return float(abs(np.vdot(a, b)))


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_haar_local_unitary(seed: int, party: Party | str | int) -> LocalOperator:
    """Haar-distributed element of U(2), reproducible per seed."""
    return LocalOperator(haar_unitary(np.random.default_rng(seed)), party)


def random_local_unitaries(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return haar_unitary(rng), haar_unitary(rng), haar_unitary(rng)
