"""Canonical coefficients, LU invariants and density-matrix oracles.

Two independent routes to the same fingerprint live here:

* closed-form invariants of the five-coefficient canonical form
  (:func:`invariants_from_canonical`), and
* oracles that only look at reduced density matrices of an arbitrary
  8-amplitude state (:func:`oracle_invariants`): Wootters concurrence for each
  pair, the CKW residual for the three-tangle, and a Kempe-type trace
  invariant for the entanglement phase.

The tests hold the two against each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import EP_CLAMP_TOL, EP_PRODUCT_TOL, LUE_TOL, NORM_TOL, RANK_TOL, TANGLE_TOL
from .exceptions import (
    DegenerateFamilyError,
    InconsistentInvariantsError,
    InvalidInputError,
    UnsupportedClassError,
)
from .qcore import (
    SIGMA_Y,
    Party,
    check_density,
    pair_ensemble,
    reduced_density,
)

TWO_PI = 2.0 * math.pi
_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class CanonicalCoefficients:
    """lambda_0..lambda_4 >= 0 and a phase on the |100> amplitude.

    The state is l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>.
    """

    lambdas: tuple[float, float, float, float, float]
    phi: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        if len(lam) != 5:
            raise InvalidInputError("canonical form needs exactly five coefficients")
        if not all(math.isfinite(x) for x in lam) or not math.isfinite(self.phi):
            raise InvalidInputError("canonical coefficients must be finite")
        if min(lam) < 0.0:
            raise InvalidInputError("canonical coefficients must be nonnegative")
        norm2 = sum(x * x for x in lam)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidInputError(f"canonical coefficients are not normalized (sum of squares {norm2!r})")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @classmethod
    def of(cls, l0=0.0, l1=0.0, l2=0.0, l3=0.0, l4=0.0, phi=0.0) -> "CanonicalCoefficients":
        return cls((l0, l1, l2, l3, l4), phi)

    @classmethod
    def normalized(cls, lambdas: Sequence[float], phi: float = 0.0) -> "CanonicalCoefficients":
        lam = np.asarray(lambdas, dtype=float)
        return cls(tuple(lam / np.linalg.norm(lam)), phi)

    def __getitem__(self, i: int) -> float:
        return self.lambdas[i]

    def state(self) -> np.ndarray:
        return state_from_canonical(self)


def state_from_canonical(c: CanonicalCoefficients) -> np.ndarray:
    l0, l1, l2, l3, l4 = c.lambdas
    s = np.zeros(8, dtype=np.complex128)
    s[0b000] = l0
    s[0b100] = l1 * np.exp(1j * c.phi)
    s[0b101] = l2
    s[0b110] = l3
    s[0b111] = l4
    # absorbs the up-to-1e-9 input slack so the output meets the 1e-12 contract
    return s / np.linalg.norm(s)


def ghz_coefficients() -> CanonicalCoefficients:
    r = 1.0 / math.sqrt(2.0)
    return CanonicalCoefficients.of(l0=r, l4=r)


class ClassLabel(str, enum.Enum):
    GHZ_CLASS = "GHZ_CLASS"
    W_CLASS = "W_CLASS"
    BISEPARABLE_OR_PRODUCT = "BISEPARABLE_OR_PRODUCT"


@dataclass(frozen=True)
class InvariantSet:
    """(C_AB, C_AC, C_BC, tau, phi5); ``ep_phase`` is None when indefinite."""

    c_ab: float
    c_ac: float
    c_bc: float
    tau: float
    ep_phase: float | None

    def __post_init__(self):
        for name in ("c_ab", "c_ac", "c_bc", "tau"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.ep_phase is not None:
            object.__setattr__(self, "ep_phase", float(self.ep_phase))

    @property
    def concurrence_product(self) -> float:
        return self.c_ab * self.c_ac * self.c_bc

    @property
    def ep_definite(self) -> bool:
        return self.ep_phase is not None

    @property
    def ep_cos(self) -> float | None:
        return None if self.ep_phase is None else math.cos(self.ep_phase)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c_ab, self.c_ac, self.c_bc, self.tau)

    def max_difference(self, other: "InvariantSet") -> float:
        """Largest componentwise gap; inf when only one side is EP-definite.

        The phase enters through cos(phi5): arccos is ill-conditioned near 0
        and pi, which is exactly where W-type states sit.
        """
        gap = max(abs(a - b) for a, b in zip(self.as_tuple(), other.as_tuple()))
        if self.ep_definite != other.ep_definite:
            return math.inf
        if self.ep_definite:
            gap = max(gap, abs(self.ep_cos - other.ep_cos))
        return gap

    def as_dict(self) -> dict:
        return {
            "c_ab": self.c_ab,
            "c_ac": self.c_ac,
            "c_bc": self.c_bc,
            "tau": self.tau,
            "ep_phase": "indefinite" if self.ep_phase is None else self.ep_phase,
        }


def _phase_from_ratio(ratio: float, clamp_tol: float) -> float:
    if abs(ratio) > 1.0 + clamp_tol:
        raise InconsistentInvariantsError(f"cos(phi5) = {ratio!r} lies outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, ratio)))


def _canonical_concurrences(c: CanonicalCoefficients) -> tuple[float, float, float, float]:
    l0, l1, l2, l3, l4 = c.lambdas
    c_ac = 2.0 * l0 * l2
    c_ab = 2.0 * l0 * l3
    c_bc = 2.0 * abs(l2 * l3 - np.exp(1j * c.phi) * l1 * l4)
    tau = 4.0 * l0 * l0 * l4 * l4
    return c_ab, c_ac, c_bc, tau


def ep_phase(
    c: CanonicalCoefficients,
    product_tol: float = EP_PRODUCT_TOL,
    clamp_tol: float = EP_CLAMP_TOL,
) -> float | None:
    """Entanglement phase in [0, pi], or None when C_AB*C_AC*C_BC vanishes.

    cos(phi5) = (l0^2 C_BC^2 + l2^2 C_AB^2 - l1^2 tau) / (C_AB C_AC C_BC).
    Substituting the concurrences, the common factor 8 l0^2 l2 l3 cancels and
    the ratio reduces to (l2 l3 - l1 l4 cos phi) / |l2 l3 - e^{i phi} l1 l4|,
    which is what gets evaluated: the unreduced numerator loses digits to
    cancellation when the concurrence product is small.
    """
    _, l1, l2, l3, l4 = c.lambdas
    c_ab, c_ac, c_bc, _ = _canonical_concurrences(c)
    if c_ab * c_ac * c_bc <= product_tol:
        return None
    ratio = (l2 * l3 - l1 * l4 * math.cos(c.phi)) / abs(l2 * l3 - np.exp(1j * c.phi) * l1 * l4)
    return _phase_from_ratio(ratio, clamp_tol)


def ep_phase_ratio_unreduced(c: CanonicalCoefficients) -> float:
    """The cos(phi5) ratio exactly as written in terms of concurrences and tau."""
    l0, l1, l2, _, _ = c.lambdas
    c_ab, c_ac, c_bc, tau = _canonical_concurrences(c)
    return (l0 * l0 * c_bc * c_bc + l2 * l2 * c_ab * c_ab - l1 * l1 * tau) / (c_ab * c_ac * c_bc)


def invariants_from_canonical(c: CanonicalCoefficients, product_tol: float = EP_PRODUCT_TOL) -> InvariantSet:
    c_ab, c_ac, c_bc, tau = _canonical_concurrences(c)
    return InvariantSet(c_ab, c_ac, c_bc, tau, ep_phase(c, product_tol))


def lue_partner(c: CanonicalCoefficients, atol: float = 1e-14) -> tuple[CanonicalCoefficients, float]:
    """Map canonical coefficients to their LU-equivalent partner.

    Returns the primed coefficients and the scale factor kappa. The |100>
    amplitude is computed as a complex number and split into modulus and
    phase; a vanishing modulus gets phase 0.
    """
    l0, l1, l2, l3, l4 = c.lambdas
    _, _, c_bc, tau = _canonical_concurrences(c)
    d2 = l2 * l2 + l4 * l4
    d3 = l3 * l3 + l4 * l4
    if d2 <= atol or d3 <= atol or tau + c_bc * c_bc <= atol:
        raise DegenerateFamilyError("LUE partner undefined for this degenerate family")
    den = d2 * d3
    kappa = math.sqrt((tau + c_bc * c_bc) / (4.0 * den))
    mix = (l4 * l4 * (l2 * l2 + l3 * l3 + l4 * l4) - l2 * l2 * l3 * l3) / den
    # the l1 prefactor is distributed so no division by l1 is needed
    z = (
        l1 * (mix * math.cos(c.phi) - 1j * math.sin(c.phi))
        + l2 * l3 * l4 * (l0 * l0 + l1 * l1 - l2 * l2 - l3 * l3 - l4 * l4) / den
    ) / kappa
    l1p = abs(z)
    phip = 0.0 if l1p <= 1e-12 else math.atan2(z.imag, z.real) % TWO_PI
    partner = CanonicalCoefficients((l0 / kappa, l1p, l2 * kappa, l3 * kappa, l4 * kappa), phip)
    return partner, kappa


# -- density-matrix oracles -------------------------------------------------


def _wootters_from_ensemble(v: np.ndarray) -> float:
    # singular values of V^T (Y x Y) V are the square roots of the
    # eigenvalues of rho * rho_tilde when rho = V V^dagger
    sv = np.linalg.svd(v.T @ _YY @ v, compute_uv=False)
    sv = np.sort(sv)[::-1]
    return float(max(0.0, sv[0] - np.sum(sv[1:])))


def mixed_concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise InvalidInputError("concurrence needs a two-qubit (4x4) density matrix")
    w, u = np.linalg.eigh(rho)
    v = u * np.sqrt(np.clip(w, 0.0, None))
    return _wootters_from_ensemble(v)


def pair_concurrence(s: np.ndarray, pair: Sequence[Party | str]) -> float:
    """Concurrence of the two-party reduction of a pure state.

    Same formula as :func:`mixed_concurrence`, fed with the exact ensemble
    read off the amplitudes instead of an eigendecomposition, which keeps
    vanishing concurrences at round-off level rather than sqrt(round-off).
    """
    return _wootters_from_ensemble(pair_ensemble(s, pair))


def _pair_concurrences(s: np.ndarray) -> tuple[float, float, float]:
    return (
        pair_concurrence(s, "AB"),
        pair_concurrence(s, "AC"),
        pair_concurrence(s, "BC"),
    )


def ckw_tangle(s: np.ndarray, clamp: float = 1e-9) -> float:
    """Three-tangle as the residual 4 det(rho_A) - C_AB^2 - C_AC^2."""
    s = np.asarray(s, dtype=np.complex128)
    rho_a = reduced_density(s, "A")
    c_ab, c_ac, _ = _pair_concurrences(s)
    t = 4.0 * float(np.linalg.det(rho_a).real) - c_ab * c_ab - c_ac * c_ac
    if -clamp <= t < 0.0:
        return 0.0
    return t


_YY_ROWS = ((0, 3, -1), (1, 2, 1), (2, 1, 1), (3, 0, -1))


def _gaussian_integers(s: np.ndarray) -> tuple[list[tuple[int, int]], int]:
    """Amplitudes as exact Gaussian integers g with s = g * 2**shift."""
    mants = []
    lowest = None
    for z in np.asarray(s, dtype=np.complex128):
        for v in (float(z.real), float(z.imag)):
            m, e = math.frexp(v)
            mi, ex = int(m * 2**53), e - 53
            mants.append((mi, ex))
            if mi:
                lowest = ex if lowest is None else min(lowest, ex)
    if lowest is None:
        raise InvalidInputError("state has zero norm")
    # 64 spare bits keep integer square roots far below round-off
    ints = [(mi << (ex - lowest + 64)) if mi else 0 for mi, ex in mants]
    return [(ints[2 * k], ints[2 * k + 1]) for k in range(8)], lowest - 64


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gconj(a):
    return (a[0], -a[1])


def _gadd(*xs):
    return (sum(x[0] for x in xs), sum(x[1] for x in xs))


def _gabs2(a) -> int:
    return a[0] * a[0] + a[1] * a[1]


def _exact_pair(g, keep: tuple[int, int]):
    """Exact ||T||^2 and |det T|^2 of T = V^T (Y x Y) V for one pair."""
    traced = 3 - keep[0] - keep[1]
    v = [[None, None] for _ in range(4)]
    for idx in range(8):
        bits = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
        v[2 * bits[keep[0]] + bits[keep[1]]][bits[traced]] = g[idx]
    t = [[None, None], [None, None]]
    for k in range(2):
        for l in range(2):
            acc = (0, 0)
            for r, rp, sgn in _YY_ROWS:
                p = _gmul(v[r][k], v[rp][l])
                acc = (acc[0] + sgn * p[0], acc[1] + sgn * p[1])
            t[k][l] = acc
    norm2 = sum(_gabs2(t[k][l]) for k in range(2) for l in range(2))
    det = _gadd(_gmul(t[0][0], t[1][1]), _gmul((-t[0][1][0], -t[0][1][1]), t[1][0]))
    return norm2, _gabs2(det)


def _root_difference(p: int, r: int) -> Fraction:
    """p - sqrt(r) for integers, without cancellation when they nearly agree."""
    if p <= 0:
        return Fraction(p) - Fraction(math.isqrt(r))
    return Fraction(p * p - r, p + math.isqrt(r)) if p * p != r else Fraction(0)


def _exact_j5_parts(s: np.ndarray):
    """(4 J5, (C_AB^2, C_AC^2, C_BC^2), shift) in the integer scale of the state.

    Squared concurrences are ||T||^2 - 2|det T|; with the pure-state identity
    |det T| = tau/4 for every pair, the invariant reduces to
    4 J5 = 4K - 4n^3 + 12 n det(rho_A) - n ||T_AC||^2 + 2 n ||T_BC||^2 - 2 n |det T|.
    Only the square roots are inexact, and each enters through
    p - sqrt(r) = (p^2 - r) / (p + sqrt(r)).
    """
    g, shift = _gaussian_integers(s)
    rho_ab = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            rho_ab[i][j] = _gadd(*(_gmul(g[2 * i + c], _gconj(g[2 * j + c])) for c in range(2)))
    rho_a = [[_gadd(rho_ab[2 * a][2 * c], rho_ab[2 * a + 1][2 * c + 1]) for c in range(2)] for a in range(2)]
    rho_b = [[_gadd(rho_ab[b][d], rho_ab[2 + b][2 + d]) for d in range(2)] for b in range(2)]
    k = (0, 0)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    k = _gadd(k, _gmul(_gmul(rho_a[a][c], rho_b[b][d]), rho_ab[2 * c + d][2 * a + b]))
    n = sum(_gabs2(z) for z in g)
    det_a = rho_a[0][0][0] * rho_a[1][1][0] - _gabs2(rho_a[0][1])
    pairs = {name: _exact_pair(g, keep) for name, keep in (("AB", (0, 1)), ("AC", (0, 2)), ("BC", (1, 2)))}
    c2 = tuple(_root_difference(t2, 4 * d2) for t2, d2 in pairs.values())
    p = 4 * k[0] - 4 * n**3 + 12 * n * det_a - n * pairs["AC"][0] + 2 * n * pairs["BC"][0]
    four_j5 = _root_difference(p, 4 * n * n * pairs["AB"][1])
    return four_j5, c2, shift


def kempe_j5(s: np.ndarray) -> float:
    """Fifth polynomial LU invariant, from reduced density matrices.

    With K = Tr[(rho_A x rho_B) rho_AB] and n = <s|s>,
    J5 = K - n^3 + n (3/4 C_AB^2 + 1/2 C_AC^2 + 1/2 C_BC^2 + 3/4 tau);
    in canonical coefficients J5 = l0^2 (|l1 l4 e^{i phi} - l2 l3|^2 + l2^2 l3^2 - l1^2 l4^2).
    J5 is a small difference of O(1) terms, so it is evaluated exactly on the
    binary expansion of the amplitudes.
    """
    four_j5, _, shift = _exact_j5_parts(s)
    return float(four_j5 * Fraction(2) ** (6 * shift) / 4)


def ep_cos_oracle(s: np.ndarray) -> float | None:
    """4 J5 / (C_AB C_AC C_BC) from exact arithmetic; None if a concurrence vanishes."""
    four_j5, c2, _ = _exact_j5_parts(s)
    prod = c2[0] * c2[1] * c2[2]
    if prod <= 0:
        return None
    # the power-of-two scale cancels between numerator and denominator
    mag = math.sqrt(float(four_j5 * four_j5 / prod))
    return mag if four_j5 >= 0 else -mag


def oracle_invariants(
    s: np.ndarray,
    product_tol: float = EP_PRODUCT_TOL,
    clamp_tol: float = EP_CLAMP_TOL,
) -> InvariantSet:
    """Invariant fingerprint of a normalized state, from density matrices only."""
    s = np.asarray(s, dtype=np.complex128)
    c_ab, c_ac, c_bc = _pair_concurrences(s)
    tau = ckw_tangle(s)
    product = c_ab * c_ac * c_bc
    phase = None
    if product > product_tol:
        # the canonical-form numerator of cos(phi5) equals 4 * J5
        ratio = ep_cos_oracle(s)
        if ratio is not None:
            phase = _phase_from_ratio(ratio, clamp_tol)
    return InvariantSet(c_ab, c_ac, c_bc, tau, phase)


def classify(s: np.ndarray, tangle_tol: float = TANGLE_TOL, rank_tol: float = RANK_TOL) -> ClassLabel:
    s = np.asarray(s, dtype=np.complex128)
    if ckw_tangle(s) > tangle_tol:
        return ClassLabel.GHZ_CLASS
    for p in "ABC":
        if np.linalg.eigvalsh(reduced_density(s, p))[0] <= rank_tol:
            return ClassLabel.BISEPARABLE_OR_PRODUCT
    return ClassLabel.W_CLASS


def lue_equivalent(a: np.ndarray, b: np.ndarray, atol: float = LUE_TOL) -> bool:
    """True when the oracle fingerprints of two tripartite states agree.

    Raises :class:`UnsupportedClassError` for biseparable or product input,
    where the five invariants are not a complete set.
    """
    for s in (a, b):
        if classify(s) is ClassLabel.BISEPARABLE_OR_PRODUCT:
            raise UnsupportedClassError("LU equivalence is only decided for genuinely tripartite states")
    return oracle_invariants(a).max_difference(oracle_invariants(b)) <= atol
