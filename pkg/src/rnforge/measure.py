"""Finite measurable spaces with exact signed measures.

Everything here is a pure function over immutable values.  Weights are
`fractions.Fraction`, so additivity and the decomposition identities hold
with literal equality rather than up to a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

RationalLike = Union[Fraction, int, str]


class SpaceMismatchError(ValueError):
    """Two values built over different atom spaces were combined."""


class PreconditionError(ValueError):
    """An operation's stated precondition was violated."""


def _as_fraction(value: RationalLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class AtomSpace:
    """Ordered carrier set of labeled atoms.

    The ordering is fixed at construction and doubles as the canonical bit
    position of each atom in subset enumerations.
    """

    atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("an atom space needs at least one atom")
        if any(not a for a in self.atoms):
            raise ValueError("atom labels must be nonempty")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom labels must be unique")

    @staticmethod
    def of(labels: Iterable[str]) -> "AtomSpace":
        return AtomSpace(tuple(labels))

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, label: str) -> int:
        try:
            return self.atoms.index(label)
        except ValueError:
            raise KeyError(f"unknown atom label {label!r}") from None

    def empty_set(self) -> "MeasurableSet":
        return MeasurableSet(self, frozenset())

    def full_set(self) -> "MeasurableSet":
        return MeasurableSet(self, frozenset(range(len(self.atoms))))

    def subset(self, labels: Iterable[str]) -> "MeasurableSet":
        return MeasurableSet(self, frozenset(self.index(l) for l in labels))

    def from_mask(self, mask: int) -> "MeasurableSet":
        members = frozenset(i for i in range(len(self.atoms)) if mask >> i & 1)
        return MeasurableSet(self, members)


@dataclass(frozen=True)
class MeasurableSet:
    """Subset of an atom space, stored as a frozenset of atom indices."""

    space: AtomSpace
    members: frozenset[int]

    def __post_init__(self) -> None:
        n = len(self.space)
        if any(not (0 <= i < n) for i in self.members):
            raise ValueError("member index out of range for the space")

    def _check(self, other: "MeasurableSet") -> None:
        if self.space != other.space:
            raise SpaceMismatchError("sets live on different atom spaces")

    def __or__(self, other: "MeasurableSet") -> "MeasurableSet":
        self._check(other)
        return MeasurableSet(self.space, self.members | other.members)

    def __and__(self, other: "MeasurableSet") -> "MeasurableSet":
        self._check(other)
        return MeasurableSet(self.space, self.members & other.members)

    def __sub__(self, other: "MeasurableSet") -> "MeasurableSet":
        self._check(other)
        return MeasurableSet(self.space, self.members - other.members)

    def __xor__(self, other: "MeasurableSet") -> "MeasurableSet":
        self._check(other)
        return MeasurableSet(self.space, self.members ^ other.members)

    def complement(self) -> "MeasurableSet":
        return MeasurableSet(
            self.space, frozenset(range(len(self.space))) - self.members
        )

    def issubset(self, other: "MeasurableSet") -> bool:
        self._check(other)
        return self.members <= other.members

    def isdisjoint(self, other: "MeasurableSet") -> bool:
        self._check(other)
        return self.members.isdisjoint(other.members)

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def __contains__(self, index: int) -> bool:
        return index in self.members

    def labels(self) -> list[str]:
        return [self.space.atoms[i] for i in sorted(self.members)]

    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m


def symmetric_difference(a: MeasurableSet, b: MeasurableSet) -> MeasurableSet:
    """(A - B) union (B - A)."""
    return a ^ b


@dataclass(frozen=True)
class SignedMeasure:
    """Finitely additive set function given by exact per-atom weights."""

    space: AtomSpace
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.space):
            raise ValueError("need exactly one weight per atom")
        object.__setattr__(
            self, "weights", tuple(_as_fraction(w) for w in self.weights)
        )

    @staticmethod
    def from_map(space: AtomSpace, values: dict[str, RationalLike]) -> "SignedMeasure":
        weights = [Fraction(0)] * len(space)
        for label, value in values.items():
            weights[space.index(label)] = _as_fraction(value)
        return SignedMeasure(space, tuple(weights))

    def __call__(self, s: MeasurableSet) -> Fraction:
        if s.space != self.space:
            raise SpaceMismatchError("set and measure live on different spaces")
        return sum((self.weights[i] for i in s.members), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def is_nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights)

    def __neg__(self) -> "SignedMeasure":
        return SignedMeasure(self.space, tuple(-w for w in self.weights))


class Measure(SignedMeasure):
    """Signed measure whose weights are all nonnegative."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_nonnegative():
            raise ValueError("a measure requires nonnegative weights")

    @staticmethod
    def from_map(space: AtomSpace, values: dict[str, RationalLike]) -> "Measure":
        signed = SignedMeasure.from_map(space, values)
        return Measure(space, signed.weights)

    @staticmethod
    def uniform(space: AtomSpace) -> "Measure":
        return Measure(space, tuple(Fraction(1) for _ in space.atoms))

    @staticmethod
    def zero(space: AtomSpace) -> "Measure":
        return Measure(space, tuple(Fraction(0) for _ in space.atoms))


def measure_of(mu: SignedMeasure, s: MeasurableSet) -> Fraction:
    """Exact value of mu on s."""
    return mu(s)


def _maximal_deficiency_subset(mu: SignedMeasure, s: MeasurableSet) -> MeasurableSet:
    # The subset of s with the most negative measure is exactly the set of
    # strictly negative atoms of s; any other choice could only gain mass.
    return MeasurableSet(
        mu.space, frozenset(i for i in s.members if mu.weights[i] < 0)
    )


def drop_negative_atoms(mu: SignedMeasure, s: MeasurableSet) -> MeasurableSet:
    """Fast path: remove every strictly negative atom of s in one step."""
    return MeasurableSet(
        mu.space, frozenset(i for i in s.members if mu.weights[i] >= 0)
    )


def construct_positive_subset(
    mu: SignedMeasure, p0: MeasurableSet
) -> MeasurableSet:
    """Extract P subseteq p0 with mu(P) > 0 and mu(Q) >= 0 for all Q subseteq P.

    Follows the greedy removal scheme: while the remaining set still contains
    a subset of strictly negative measure, remove the worst such subset.  On
    an atomic space one round suffices, but the loop is kept to mirror the
    construction; `drop_negative_atoms` provides the one-shot equivalent used
    for cross-checking.
    """
    if mu(p0) <= 0:
        raise PreconditionError("construct_positive_subset needs mu(p0) > 0")
    remaining = p0
    while True:
        worst = _maximal_deficiency_subset(mu, remaining)
        if not worst:
            return remaining
        remaining = remaining - worst


def hahn_decomposition(
    mu: SignedMeasure, nu: Measure
) -> tuple[MeasurableSet, MeasurableSet]:
    """Split the space into (M+, M-) with M+ a mu-maximizing set.

    M+ is the union of all atoms with weight >= 0.  This attains
    max_S mu(S), and because every mu-maximizer contains all strictly
    positive atoms and no strictly negative ones, including every
    zero-weight atom also maximizes nu among the maximizers.
    """
    if mu.space != nu.space:
        raise SpaceMismatchError("mu and nu live on different spaces")
    m_plus = MeasurableSet(
        mu.space, frozenset(i for i in range(len(mu.space)) if mu.weights[i] >= 0)
    )
    return m_plus, m_plus.complement()


def jordan_decomposition(
    mu: SignedMeasure, nu: Measure
) -> tuple[Measure, Measure]:
    """mu = mu_plus - mu_minus with the parts concentrated on the Hahn halves."""
    m_plus, _ = hahn_decomposition(mu, nu)
    plus = tuple(w if i in m_plus else Fraction(0) for i, w in enumerate(mu.weights))
    minus = tuple(
        -w if i not in m_plus else Fraction(0) for i, w in enumerate(mu.weights)
    )
    return Measure(mu.space, plus), Measure(mu.space, minus)


def affine_combine(
    lam: SignedMeasure, a: RationalLike, nu: Measure
) -> SignedMeasure:
    """The signed measure lam - a*nu, computed weightwise."""
    if lam.space != nu.space:
        raise SpaceMismatchError("lam and nu live on different spaces")
    a = _as_fraction(a)
    return SignedMeasure(
        lam.space,
        tuple(lw - a * nw for lw, nw in zip(lam.weights, nu.weights)),
    )


def is_absolutely_continuous(
    lam: Measure, nu: Measure
) -> tuple[bool, Optional[MeasurableSet]]:
    """Check lam << nu; on failure return a witness singleton.

    On an atomic space absolute continuity reduces to the per-atom check
    nu(atom) = 0 implies lam(atom) = 0.
    """
    if lam.space != nu.space:
        raise SpaceMismatchError("lam and nu live on different spaces")
    for i in range(len(lam.space)):
        if nu.weights[i] == 0 and lam.weights[i] != 0:
            return False, MeasurableSet(lam.space, frozenset({i}))
    return True, None


@dataclass(frozen=True)
class SetSequenceSpec:
    """Eventually periodic sequence of sets: a finite prefix, then a cycle."""

    prefix: tuple[MeasurableSet, ...]
    cycle: tuple[MeasurableSet, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ValueError("the cycle must be nonempty")
        spaces = {s.space for s in self.prefix} | {s.space for s in self.cycle}
        if len(spaces) > 1:
            raise SpaceMismatchError("all sets in a sequence must share a space")

    @property
    def space(self) -> AtomSpace:
        return self.cycle[0].space

    def term(self, k: int) -> MeasurableSet:
        if k < len(self.prefix):
            return self.prefix[k]
        return self.cycle[(k - len(self.prefix)) % len(self.cycle)]


def limsup_sets(spec: SetSequenceSpec) -> MeasurableSet:
    """Atoms belonging to infinitely many terms of the sequence.

    With an eventually periodic spec only the cycle recurs, so the limsup is
    exactly the union of the cycle's sets; the prefix is irrelevant.
    """
    result = spec.space.empty_set()
    for s in spec.cycle:
        result = result | s
    return result
