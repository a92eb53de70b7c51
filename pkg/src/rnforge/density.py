"""Atom-ratio densities on finite algebras and their dyadic approximants.

The pipeline: build the block-ratio density on each level of a refinement
chain, track L1 distances down to the atomic level, and certify the exact
identity lam(S) = integral_S f d(nu) on every subset.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .measure import (
    AtomSpace,
    Measure,
    MeasurableSet,
    PreconditionError,
    RationalLike,
    SignedMeasure,
    SpaceMismatchError,
    _as_fraction,
    affine_combine,
    hahn_decomposition,
    is_absolutely_continuous,
)

EXHAUSTIVE_ATOM_LIMIT = 20
SAMPLED_SUBSET_COUNT = 10_000


class AbsoluteContinuityError(ValueError):
    """lam is not absolutely continuous w.r.t. nu; carries a witness set."""

    def __init__(self, witness: MeasurableSet):
        self.witness = witness
        super().__init__(
            f"absolute continuity fails on atoms {witness.labels()}"
        )


class AlgebraMeasurabilityError(ValueError):
    """A set is not a union of blocks of the relevant algebra."""


class SpaceTooLargeError(ValueError):
    """Exhaustive subset sweep refused; use the sampled mode instead."""


@dataclass(frozen=True)
class FiniteAlgebra:
    """Partition of an atom space; the blocks are the algebra's atoms."""

    space: AtomSpace
    blocks: tuple[MeasurableSet, ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if b.space != self.space:
                raise SpaceMismatchError("block on a different space")
            if not b:
                raise ValueError("blocks must be nonempty")
            if seen & b.members:
                raise ValueError("blocks must be pairwise disjoint")
            seen |= b.members
        if seen != set(range(len(self.space))):
            raise ValueError("blocks must cover the whole space")

    @staticmethod
    def atomic(space: AtomSpace) -> "FiniteAlgebra":
        return FiniteAlgebra(
            space,
            tuple(
                MeasurableSet(space, frozenset({i})) for i in range(len(space))
            ),
        )

    @property
    def is_atomic(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def block_index_of_atom(self, atom: int) -> int:
        for k, b in enumerate(self.blocks):
            if atom in b:
                return k
        raise KeyError(f"atom index {atom} not covered")  # unreachable

    def contains(self, s: MeasurableSet) -> bool:
        """True iff s belongs to the algebra, i.e. is a union of blocks."""
        if s.space != self.space:
            raise SpaceMismatchError("set on a different space")
        return all(b.issubset(s) or b.isdisjoint(s) for b in self.blocks)

    def refines(self, coarser: "FiniteAlgebra") -> bool:
        """True iff every block of `coarser` is a union of this algebra's blocks."""
        return all(self.contains(b) for b in coarser.blocks)


@dataclass(frozen=True)
class SimpleDensity:
    """Block-constant nonnegative rational function on an algebra."""

    algebra: FiniteAlgebra
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.algebra.blocks):
            raise ValueError("need one value per block")
        object.__setattr__(
            self, "values", tuple(_as_fraction(v) for v in self.values)
        )
        if any(v < 0 for v in self.values):
            raise ValueError("density values must be nonnegative")

    @property
    def space(self) -> AtomSpace:
        return self.algebra.space

    def value_at_atom(self, atom: int) -> Fraction:
        return self.values[self.algebra.block_index_of_atom(atom)]

    def atom_values(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * len(self.space)
        for value, block in zip(self.values, self.algebra.blocks):
            for i in block.members:
                out[i] = value
        return tuple(out)


@dataclass(frozen=True)
class RefinementChain:
    """Finite algebras over one space, each refining the previous.

    The finest level must be atomic so that it contains every set of
    interest.
    """

    levels: tuple[FiniteAlgebra, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("a chain needs at least one level")
        spaces = {alg.space for alg in self.levels}
        if len(spaces) > 1:
            raise SpaceMismatchError("chain levels on different spaces")
        for coarse, fine in zip(self.levels, self.levels[1:]):
            if not fine.refines(coarse):
                raise ValueError("each level must refine the previous one")
        if not self.levels[-1].is_atomic:
            raise ValueError("the finest level must be the atomic partition")

    @property
    def space(self) -> AtomSpace:
        return self.levels[0].space


@dataclass(frozen=True)
class ApproximationReport:
    """Exact error accounting for one dyadic approximation level."""

    level: int
    l1_error: Fraction
    tail_mass: Fraction
    bound: Fraction
    converged: bool


@dataclass(frozen=True)
class LevelReport:
    """L1 distance from one chain level's density to the final density."""

    level: int
    l1_to_final: Fraction
    converged: bool


@dataclass(frozen=True)
class DerivationResult:
    density: SimpleDensity
    level_reports: tuple[LevelReport, ...]
    degenerate: bool  # nu identically zero, so the density is forced to 0


def atom_density(
    lam: Measure, nu: Measure, algebra: FiniteAlgebra
) -> SimpleDensity:
    """Block-ratio density: lam(B)/nu(B) per block, 0 on nu-null blocks."""
    if lam.space != nu.space or lam.space != algebra.space:
        raise SpaceMismatchError("lam, nu, algebra must share a space")
    ok, witness = is_absolutely_continuous(lam, nu)
    if not ok:
        assert witness is not None
        raise AbsoluteContinuityError(witness)
    values = []
    for b in algebra.blocks:
        nb = nu(b)
        values.append(lam(b) / nb if nb > 0 else Fraction(0))
    return SimpleDensity(algebra, tuple(values))


def integrate(f: SimpleDensity, nu: Measure, s: MeasurableSet) -> Fraction:
    """Exact integral of f over s against nu; s must be algebra-measurable."""
    if nu.space != f.space or s.space != f.space:
        raise SpaceMismatchError("f, nu, s must share a space")
    if not f.algebra.contains(s):
        raise AlgebraMeasurabilityError(
            "set is not a union of blocks of the density's algebra"
        )
    total = Fraction(0)
    for value, block in zip(f.values, f.algebra.blocks):
        if block.issubset(s):
            total += value * nu(block)
    return total


def integrate_pointwise(f: SimpleDensity, nu: Measure, s: MeasurableSet) -> Fraction:
    """Atomwise integral of f over an arbitrary subset (not block-restricted)."""
    if nu.space != f.space or s.space != f.space:
        raise SpaceMismatchError("f, nu, s must share a space")
    av = f.atom_values()
    return sum((av[i] * nu.weights[i] for i in s.members), Fraction(0))


def level_set(f: SimpleDensity, a: RationalLike) -> MeasurableSet:
    """Union of blocks with value >= a."""
    a = _as_fraction(a)
    result = f.space.empty_set()
    for value, block in zip(f.values, f.algebra.blocks):
        if value >= a:
            result = result | block
    return result


def level_band(
    f: SimpleDensity, a: RationalLike, b: RationalLike
) -> MeasurableSet:
    """Blocks with a <= value < b."""
    a, b = _as_fraction(a), _as_fraction(b)
    if a >= b:
        raise PreconditionError("level_band needs a < b")
    return level_set(f, a) - level_set(f, b)


def hahn_level_correspondence(
    lam: Measure, nu: Measure, f: SimpleDensity, a: RationalLike
) -> tuple[Fraction, Fraction]:
    """Measures of the gap between {f >= a} and the Hahn set of lam - a*nu.

    Returns (nu(D), (lam - a*nu)(D)) for D the symmetric difference; both
    are exactly 0 when f was built on the atomic algebra.
    """
    a = _as_fraction(a)
    mu = affine_combine(lam, a, nu)
    m_plus, _ = hahn_decomposition(mu, nu)
    d = level_set(f, a) ^ m_plus
    return nu(d), mu(d)


def dyadic_approximation(f: SimpleDensity, n: int) -> SimpleDensity:
    """Round block values down to the grid k/2^n; values >= n map to 0.

    The cutoff-to-zero matches the finite summation range k <= n*2^n - 1 of
    the defining step sum.
    """
    if n < 1:
        raise PreconditionError("dyadic_approximation needs n >= 1")
    scale = Fraction(2) ** n
    values = tuple(
        Fraction(0) if v >= n else Fraction(int(v * scale)) / scale
        for v in f.values
    )
    return SimpleDensity(f.algebra, values)


def approximation_report(
    f: SimpleDensity, nu: Measure, n: int
) -> ApproximationReport:
    """Exact L1 error of the n-th dyadic approximant and its certified bound."""
    if n < 1:
        raise PreconditionError("approximation_report needs n >= 1")
    fn = dyadic_approximation(f, n)
    l1 = Fraction(0)
    tail = Fraction(0)
    for v, vn, block in zip(f.values, fn.values, f.algebra.blocks):
        mass = nu(block)
        l1 += abs(v - vn) * mass
        if v >= n:
            tail += v * mass
    bound = tail + nu.total() / Fraction(2) ** n
    if l1 > bound:
        raise AssertionError("dyadic L1 bound violated; internal error")
    return ApproximationReport(n, l1, tail, bound, converged=(l1 == 0))


def rn_derive(
    lam: Measure, nu: Measure, chain: RefinementChain
) -> DerivationResult:
    """Run the full density construction along a refinement chain.

    Returns the density at the finest (atomic) level together with the L1
    distance of every level's density to the final one.  A nu that is
    identically zero forces lam = 0 and the zero density; this degenerate
    case is flagged rather than rejected.
    """
    if lam.space != nu.space or lam.space != chain.space:
        raise SpaceMismatchError("lam, nu, chain must share a space")
    ok, witness = is_absolutely_continuous(lam, nu)
    if not ok:
        assert witness is not None
        raise AbsoluteContinuityError(witness)
    degenerate = nu.total() == 0
    densities = [atom_density(lam, nu, alg) for alg in chain.levels]
    final = densities[-1]
    final_atoms = final.atom_values()
    reports = []
    for k, fk in enumerate(densities):
        av = fk.atom_values()
        dist = sum(
            (abs(x - y) * w for x, y, w in zip(av, final_atoms, nu.weights)),
            Fraction(0),
        )
        reports.append(LevelReport(k, dist, converged=(dist == 0)))
    return DerivationResult(final, tuple(reports), degenerate)


def _max_subset_discrepancy(per_atom: Sequence[Fraction]) -> Fraction:
    """Max |sum over S| over all subsets, via gray-code enumeration."""
    n = len(per_atom)
    best = Fraction(0)
    running = Fraction(0)
    for step in range(1, 1 << n):
        bit = (step & -step).bit_length() - 1
        gray = step ^ (step >> 1)
        if gray >> bit & 1:
            running += per_atom[bit]
        else:
            running -= per_atom[bit]
        if abs(running) > best:
            best = abs(running)
    return best


def verify_density(
    lam: Measure,
    nu: Measure,
    f: SimpleDensity,
    *,
    sampled: bool = False,
    sample_count: int = SAMPLED_SUBSET_COUNT,
    seed: Optional[int] = None,
) -> Fraction:
    """Max discrepancy |lam(S) - integral_S f d(nu)| over subsets S.

    Exhaustive over all 2^n subsets up to 20 atoms; beyond that an error
    instructs the caller to request the sampled mode (random subsets, seeded
    via the argument or the RNFORGE_SEED environment variable).
    """
    if lam.space != nu.space or lam.space != f.space:
        raise SpaceMismatchError("lam, nu, f must share a space")
    if not f.algebra.is_atomic:
        raise PreconditionError("verify_density needs an atomic density")
    av = f.atom_values()
    per_atom = [
        lam.weights[i] - av[i] * nu.weights[i] for i in range(len(lam.space))
    ]
    n = len(per_atom)
    if not sampled:
        if n > EXHAUSTIVE_ATOM_LIMIT:
            raise SpaceTooLargeError(
                f"{n} atoms exceed the exhaustive limit of "
                f"{EXHAUSTIVE_ATOM_LIMIT}; rerun with sampled=True "
                f"({SAMPLED_SUBSET_COUNT} random subsets)"
            )
        return _max_subset_discrepancy(per_atom)
    if seed is None:
        seed = int(os.environ.get("RNFORGE_SEED", "0"))
    rng = random.Random(seed)
    best = Fraction(0)
    for _ in range(sample_count):
        mask = rng.getrandbits(n)
        total = sum(
            (per_atom[i] for i in range(n) if mask >> i & 1), Fraction(0)
        )
        if abs(total) > best:
            best = abs(total)
    return best
