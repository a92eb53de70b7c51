"""Brute-force reference implementations.

Deliberately simple and slow: every result is obtained by enumerating all
2^n subsets or by a one-line per-atom formula, so these functions serve as
independent oracles for the constructive routines and the CLI's --verify
mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .density import FiniteAlgebra, SimpleDensity
from .measure import (
    Measure,
    MeasurableSet,
    SignedMeasure,
    SpaceMismatchError,
    is_absolutely_continuous,
)

ATOM_LIMIT = 20


class SpaceTooLargeError(ValueError):
    """The space exceeds the exhaustive-enumeration guard."""


def _guard(n: int) -> None:
    if n > ATOM_LIMIT:
        raise SpaceTooLargeError(
            f"{n} atoms exceed the oracle limit of {ATOM_LIMIT}"
        )


def _subset_sums(weights: tuple[Fraction, ...]) -> list[Fraction]:
    """sums[mask] = sum of weights over the atoms in mask.

    Built by adding the lowest set bit's weight to the sum of the remaining
    bits, so correctness is immediate by induction on the popcount.
    """
    sums = [Fraction(0)] * (1 << len(weights))
    for mask in range(1, 1 << len(weights)):
        low = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask & (mask - 1)] + weights[low]
    return sums


def max_measure_subset(
    mu: SignedMeasure, nu: Optional[Measure] = None
) -> tuple[MeasurableSet, Fraction]:
    """Enumerate all subsets; return a mu-maximizer and the maximum.

    With a nu supplied, ties are broken by nu value and then by the subset's
    bitmask, making the returned maximizer canonical.
    """
    n = len(mu.space)
    _guard(n)
    if nu is not None and nu.space != mu.space:
        raise SpaceMismatchError("mu and nu live on different spaces")
    mu_sums = _subset_sums(mu.weights)
    nu_sums = _subset_sums(nu.weights) if nu is not None else None
    best_mask = 0
    best_mu = Fraction(0)
    best_nu = Fraction(0)
    for mask in range(1, 1 << n):
        value = mu_sums[mask]
        tie = nu_sums[mask] if nu_sums is not None else Fraction(0)
        if (value, tie, mask) > (best_mu, best_nu, best_mask):
            best_mu, best_nu, best_mask = value, tie, mask
    return mu.space.from_mask(best_mask), best_mu


def all_max_measure_subsets(mu: SignedMeasure) -> list[MeasurableSet]:
    """Every subset attaining max_S mu(S)."""
    n = len(mu.space)
    _guard(n)
    sums = _subset_sums(mu.weights)
    best = max(sums)
    return [
        mu.space.from_mask(mask) for mask in range(1 << n) if sums[mask] == best
    ]


def direct_density(lam: Measure, nu: Measure) -> SimpleDensity:
    """Per-atom ratio lam(atom)/nu(atom), with nu-null atoms mapped to 0."""
    ok, witness = is_absolutely_continuous(lam, nu)
    if not ok:
        raise ValueError(
            f"lam is not absolutely continuous w.r.t. nu "
            f"(witness {witness.labels()})"
        )
    values = tuple(
        lw / nw if nw > 0 else Fraction(0)
        for lw, nw in zip(lam.weights, nu.weights)
    )
    return SimpleDensity(FiniteAlgebra.atomic(lam.space), values)


def exhaustive_identity_check(
    lam: Measure, nu: Measure, f: SimpleDensity
) -> bool:
    """True iff lam(S) equals integral_S f d(nu) exactly for every subset."""
    n = len(lam.space)
    _guard(n)
    if not f.algebra.is_atomic:
        raise ValueError("the density must live on the atomic algebra")
    av = f.atom_values()
    lam_sums = _subset_sums(lam.weights)
    integral_sums = _subset_sums(
        tuple(av[i] * nu.weights[i] for i in range(n))
    )
    return all(
        lam_sums[mask] == integral_sums[mask] for mask in range(1 << n)
    )


def exhaustive_positive_subset_check(
    mu: SignedMeasure, p: MeasurableSet
) -> bool:
    """True iff every subset of p has nonnegative mu-measure."""
    members = sorted(p.members)
    _guard(len(members))
    sums = _subset_sums(tuple(mu.weights[i] for i in members))
    return all(s >= 0 for s in sums)


def exhaustive_absolute_continuity(lam: Measure, nu: Measure) -> bool:
    """Definition-level check of lam << nu over all subsets."""
    n = len(lam.space)
    _guard(n)
    lam_sums = _subset_sums(lam.weights)
    nu_sums = _subset_sums(nu.weights)
    return all(
        not (nu_sums[mask] == 0 and lam_sums[mask] != 0)
        for mask in range(1 << n)
    )
