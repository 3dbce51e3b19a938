"""Seeded random targets for each protocol family.

Coefficients are drawn from [lo, 1] before normalization so samples stay
away from the degenerate boundaries of each family.
"""

from __future__ import annotations

import math

import numpy as np

from .entangle import CanonicalCoefficients
from .qcore import Party
from .wtype import WCoefficients

LO = 0.05

# canonical slots that are free in each GHZ family
SINGLE_PARTY_SLOTS = {Party.A: (0, 1, 4), Party.B: (0, 2, 4), Party.C: (0, 3, 4)}
TWO_PARTY_SLOTS = {"AB": (0, 1, 2, 4), "AC": (0, 1, 3, 4)}


def _draw(rng: np.random.Generator, slots, lo: float = LO) -> np.ndarray:
    v = np.zeros(5)
    v[list(slots)] = rng.uniform(lo, 1.0, len(slots))
    return v / np.linalg.norm(v)


def random_canonical(rng: np.random.Generator, lo: float = 0.0) -> CanonicalCoefficients:
    """Generic canonical coefficients; all five slots and the phase are free."""
    return CanonicalCoefficients(tuple(_draw(rng, range(5), lo)), rng.uniform(0, 2 * math.pi))


def random_single_party_target(rng: np.random.Generator, party) -> CanonicalCoefficients:
    party = Party.coerce(party)
    return CanonicalCoefficients(tuple(_draw(rng, SINGLE_PARTY_SLOTS[party])), rng.uniform(0, 2 * math.pi))


def random_two_party_target(rng: np.random.Generator, order: str) -> CanonicalCoefficients:
    """Target for the two-step chain; BC targets satisfy mu1 mu4 = mu2 mu3 with phi = 0."""
    order = order.upper()
    if order in TWO_PARTY_SLOTS:
        return CanonicalCoefficients(tuple(_draw(rng, TWO_PARTY_SLOTS[order])), rng.uniform(0, 2 * math.pi))
    if order != "BC":
        raise ValueError(f"unknown order {order!r}")
    mu0, mu2, mu3, mu4 = rng.uniform(LO, 1.0, 4)
    v = np.array([mu0, mu2 * mu3 / mu4, mu2, mu3, mu4])
    return CanonicalCoefficients(tuple(v / np.linalg.norm(v)), 0.0)


def random_ep_definite_target(rng: np.random.Generator) -> CanonicalCoefficients:
    """GHZ-class target with all three concurrences nonzero."""
    while True:
        c = random_canonical(rng, LO)
        l0, l1, l2, l3, l4 = c.lambdas
        if abs(l2 * l3 - complex(math.cos(c.phi), math.sin(c.phi)) * l1 * l4) > 1e-3:
            return c


def random_one_vanishing_target(rng: np.random.Generator) -> tuple[str, CanonicalCoefficients]:
    """A target with exactly one vanishing concurrence and the order that reaches it."""
    order = ("AB", "AC", "BC")[int(rng.integers(3))]
    return order, random_two_party_target(rng, order)


def random_w_target(rng: np.random.Generator, initial: WCoefficients, lo: float = 0.02) -> WCoefficients:
    """x_i' drawn in [lo x_i, x_i] for i = 1, 2, 3; x0' takes up the slack."""
    while True:
        xs = [rng.uniform(lo, 1.0) * x for x in initial.x[1:]]
        rest = 1.0 - sum(x * x for x in xs)
        if rest >= 0.0:
            return WCoefficients(math.sqrt(rest), *xs)


def random_nonmonotone_w_target(
    rng: np.random.Generator, initial: WCoefficients
) -> tuple[WCoefficients, tuple[int, ...]]:
    """A target raising at least one of x1, x2, x3; returns it with the raised indices."""
    while True:
        raised = tuple(i for i in (1, 2, 3) if rng.random() < 0.5)
        if not raised:
            continue
        xs = []
        for i in (1, 2, 3):
            x = initial.x[i]
            if i in raised:
                xs.append(x + rng.uniform(0.01, 1.0) * (1.0 - x))
            else:
                xs.append(rng.uniform(0.02, 1.0) * x)
        rest = 1.0 - sum(x * x for x in xs)
        if rest >= 0.0:
            return WCoefficients(math.sqrt(rest), *xs), raised
