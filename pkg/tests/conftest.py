import random
from fractions import Fraction

from rnforge import (
    AtomSpace,
    FiniteAlgebra,
    Measure,
    RefinementChain,
    SignedMeasure,
)


def make_space(n):
    return AtomSpace.of([f"x{i}" for i in range(n)])


def random_signed_measure(rng, space):
    return SignedMeasure(
        space,
        tuple(
            Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            for _ in space.atoms
        ),
    )


def random_measure(rng, space, allow_zero=True):
    low = 0 if allow_zero else 1
    return Measure(
        space,
        tuple(
            Fraction(rng.randint(low, 9), rng.randint(1, 9))
            for _ in space.atoms
        ),
    )


def random_ac_pair(rng, space):
    """(lam, nu) with lam absolutely continuous w.r.t. nu by construction."""
    nu = random_measure(rng, space)
    lam = Measure(
        space,
        tuple(
            w * Fraction(rng.randint(0, 6), rng.randint(1, 6))
            for w in nu.weights
        ),
    )
    return lam, nu


def _algebra_from_keys(space, keys):
    groups = {}
    for atom, key in enumerate(keys):
        groups.setdefault(key, set()).add(atom)
    from rnforge import MeasurableSet

    return FiniteAlgebra(
        space,
        tuple(
            MeasurableSet(space, frozenset(members))
            for members in groups.values()
        ),
    )


def random_chain(rng, space, with_mid=True):
    """Coarse -> (mid) -> atomic refinement chain."""
    n = len(space)
    coarse = [rng.randrange(max(1, n // 3)) for _ in range(n)]
    levels = [_algebra_from_keys(space, coarse)]
    if with_mid:
        mid = [(c, rng.randrange(2)) for c in coarse]
        levels.append(_algebra_from_keys(space, mid))
    levels.append(FiniteAlgebra.atomic(space))
    return RefinementChain(tuple(levels))
