import random
from fractions import Fraction

import pytest

from rnforge import (
    AbsoluteContinuityError,
    AlgebraMeasurabilityError,
    AtomSpace,
    FiniteAlgebra,
    Measure,
    PreconditionError,
    RefinementChain,
    SimpleDensity,
    SpaceTooLargeError,
    approximation_report,
    atom_density,
    dyadic_approximation,
    hahn_level_correspondence,
    integrate,
    level_band,
    level_set,
    rn_derive,
    verify_density,
)
from rnforge import oracle

from conftest import make_space, random_ac_pair, random_chain

ABC = AtomSpace.of(["a", "b", "c"])
NU = Measure(ABC, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
LAM = Measure(ABC, (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)))
ATOMIC = FiniteAlgebra.atomic(ABC)


def ratio_density():
    return atom_density(LAM, NU, ATOMIC)


class TestFiniteAlgebra:
    def test_blocks_must_cover(self):
        with pytest.raises(ValueError):
            FiniteAlgebra(ABC, (ABC.subset(["a"]),))

    def test_blocks_must_be_disjoint(self):
        with pytest.raises(ValueError):
            FiniteAlgebra(
                ABC, (ABC.subset(["a", "b"]), ABC.subset(["b", "c"]))
            )

    def test_contains(self):
        alg = FiniteAlgebra(ABC, (ABC.subset(["a", "b"]), ABC.subset(["c"])))
        assert alg.contains(ABC.subset(["a", "b"]))
        assert alg.contains(ABC.full_set())
        assert not alg.contains(ABC.subset(["a"]))

    def test_chain_needs_atomic_finest(self):
        coarse = FiniteAlgebra(ABC, (ABC.full_set(),))
        with pytest.raises(ValueError):
            RefinementChain((coarse,))


class TestAtomDensity:
    def test_identity_ratio(self):
        f = atom_density(NU, NU, ATOMIC)
        assert f.values == (1, 1, 1)

    def test_known_ratios(self):
        f = ratio_density()
        assert f.values == (Fraction(1, 2), Fraction(2), Fraction(1))
        assert f.atom_values() == oracle.direct_density(LAM, NU).atom_values()

    def test_null_block_maps_to_zero(self):
        space = make_space(2)
        nu = Measure(space, (Fraction(1), Fraction(0)))
        lam = Measure(space, (Fraction(1, 3), Fraction(0)))
        f = atom_density(lam, nu, FiniteAlgebra.atomic(space))
        assert f.values[1] == 0

    def test_ac_failure_carries_witness(self):
        space = make_space(2)
        nu = Measure(space, (Fraction(1), Fraction(0)))
        lam = Measure(space, (Fraction(1, 3), Fraction(1, 3)))
        with pytest.raises(AbsoluteContinuityError) as err:
            atom_density(lam, nu, FiniteAlgebra.atomic(space))
        assert err.value.witness.labels() == ["x1"]


class TestIntegrate:
    def test_unit_density_gives_total_mass(self):
        f = SimpleDensity(ATOMIC, (Fraction(1), Fraction(1), Fraction(1)))
        assert integrate(f, NU, ABC.full_set()) == NU.total()

    def test_recovers_lambda(self):
        f = ratio_density()
        rng = random.Random(1)
        for _ in range(10):
            s = ABC.from_mask(rng.getrandbits(3))
            assert integrate(f, NU, s) == LAM(s)

    def test_empty_set(self):
        f = ratio_density()
        assert integrate(f, NU, ABC.empty_set()) == 0

    def test_non_measurable_set_rejected(self):
        alg = FiniteAlgebra(ABC, (ABC.subset(["a", "b"]), ABC.subset(["c"])))
        f = SimpleDensity(alg, (Fraction(1), Fraction(2)))
        with pytest.raises(AlgebraMeasurabilityError):
            integrate(f, NU, ABC.subset(["a"]))


class TestLevelSets:
    def test_threshold(self):
        f = ratio_density()
        assert level_set(f, 1).labels() == ["b", "c"]

    def test_zero_threshold_full(self):
        assert level_set(ratio_density(), 0) == ABC.full_set()

    def test_above_max_empty(self):
        assert level_set(ratio_density(), 3) == ABC.empty_set()

    def test_band(self):
        f = ratio_density()
        band = level_band(f, Fraction(1, 2), Fraction(3, 2))
        assert band.labels() == ["a", "c"]

    def test_band_needs_ordered_bounds(self):
        with pytest.raises(PreconditionError):
            level_band(ratio_density(), 1, 1)

    def test_band_covering_everything(self):
        assert level_band(ratio_density(), 0, 100) == ABC.full_set()


class TestHahnLevelCorrespondence:
    def test_identity_measures(self):
        f = atom_density(NU, NU, ATOMIC)
        assert hahn_level_correspondence(NU, NU, f, 1) == (0, 0)

    def test_negative_threshold(self):
        f = ratio_density()
        assert hahn_level_correspondence(LAM, NU, f, Fraction(-3)) == (0, 0)

    def test_random_triples_atomic(self):
        rng = random.Random(17)
        for _ in range(60):
            space = make_space(rng.randint(1, 10))
            lam, nu = random_ac_pair(rng, space)
            f = atom_density(lam, nu, FiniteAlgebra.atomic(space))
            a = Fraction(rng.randint(-6, 6), rng.randint(1, 6))
            assert hahn_level_correspondence(lam, nu, f, a) == (0, 0)


class TestDyadicApproximation:
    def test_cutoff_at_level_one(self):
        f = SimpleDensity(ATOMIC, (Fraction(1), Fraction(1), Fraction(1)))
        assert dyadic_approximation(f, 1).values == (0, 0, 0)

    def test_exact_at_level_two(self):
        f = SimpleDensity(ATOMIC, (Fraction(1), Fraction(1), Fraction(1)))
        assert dyadic_approximation(f, 2).values == (1, 1, 1)

    def test_floor_rounding(self):
        f = SimpleDensity(ATOMIC, (Fraction(3, 10),) * 3)
        assert dyadic_approximation(f, 2).values == (Fraction(1, 4),) * 3

    def test_monotone_in_level_and_below_f(self):
        rng = random.Random(23)
        for _ in range(40):
            space = make_space(rng.randint(1, 8))
            values = tuple(
                Fraction(rng.randint(0, 40), rng.randint(1, 10))
                for _ in space.atoms
            )
            f = SimpleDensity(FiniteAlgebra.atomic(space), values)
            approx = [dyadic_approximation(f, n) for n in range(1, 9)]
            for fn, fn1 in zip(approx, approx[1:]):
                assert all(a <= b for a, b in zip(fn.values, fn1.values))
            for fn in approx:
                assert all(a <= v for a, v in zip(fn.values, f.values))

    def test_pointwise_gap_below_cutoff(self):
        rng = random.Random(29)
        for _ in range(40):
            space = make_space(rng.randint(1, 8))
            values = tuple(
                Fraction(rng.randint(0, 40), rng.randint(1, 10))
                for _ in space.atoms
            )
            f = SimpleDensity(FiniteAlgebra.atomic(space), values)
            for n in range(1, 9):
                fn = dyadic_approximation(f, n)
                for v, vn in zip(f.values, fn.values):
                    if v < n:
                        assert 0 <= v - vn <= Fraction(1, 2**n)


class TestApproximationReport:
    def test_exact_level(self):
        f = SimpleDensity(ATOMIC, (Fraction(1),) * 3)
        nu = Measure(ABC, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
        r = approximation_report(f, nu, 2)
        assert r.l1_error == 0
        assert r.tail_mass == 0
        assert r.bound == Fraction(1, 4)
        assert r.converged

    def test_everything_truncated(self):
        f = SimpleDensity(ATOMIC, (Fraction(1),) * 3)
        nu = Measure(ABC, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
        r = approximation_report(f, nu, 1)
        assert r.l1_error == 1
        assert r.tail_mass == 1
        assert r.bound == Fraction(3, 2)

    def test_bound_holds_on_random_densities(self):
        rng = random.Random(31)
        for _ in range(40):
            space = make_space(rng.randint(1, 8))
            nu = Measure(
                space,
                tuple(
                    Fraction(rng.randint(0, 9), rng.randint(1, 9))
                    for _ in space.atoms
                ),
            )
            values = tuple(
                Fraction(rng.randint(0, 40), rng.randint(1, 10))
                for _ in space.atoms
            )
            f = SimpleDensity(FiniteAlgebra.atomic(space), values)
            for n in range(1, 9):
                r = approximation_report(f, nu, n)
                assert r.l1_error <= r.bound

    def test_markov_tail_inequality(self):
        rng = random.Random(37)
        for _ in range(40):
            space = make_space(rng.randint(1, 8))
            lam, nu = random_ac_pair(rng, space)
            f = atom_density(lam, nu, FiniteAlgebra.atomic(space))
            total = integrate(f, nu, space.full_set())
            for _ in range(5):
                k = Fraction(rng.randint(1, 20), rng.randint(1, 5))
                assert nu(level_set(f, k)) <= total / k


class TestRnDerive:
    def test_identity(self):
        chain = RefinementChain(
            (FiniteAlgebra(ABC, (ABC.subset(["a", "b"]), ABC.subset(["c"]))), ATOMIC)
        )
        out = rn_derive(NU, NU, chain)
        assert out.density.values == (1, 1, 1)
        assert all(r.l1_to_final == 0 for r in out.level_reports)

    def test_worked_two_level_chain(self):
        chain = RefinementChain(
            (FiniteAlgebra(ABC, (ABC.subset(["a", "b"]), ABC.subset(["c"]))), ATOMIC)
        )
        out = rn_derive(LAM, NU, chain)
        assert out.density.values == (Fraction(1, 2), Fraction(2), Fraction(1))
        assert out.level_reports[0].l1_to_final == Fraction(1, 2)
        assert out.level_reports[1].l1_to_final == 0

    def test_degenerate_zero_nu(self):
        nu = Measure.zero(ABC)
        lam = Measure.zero(ABC)
        chain = RefinementChain((ATOMIC,))
        out = rn_derive(lam, nu, chain)
        assert out.degenerate
        assert out.density.values == (0, 0, 0)

    def test_tower_property(self):
        rng = random.Random(41)
        for _ in range(30):
            space = make_space(rng.randint(2, 10))
            lam, nu = random_ac_pair(rng, space)
            chain = random_chain(rng, space)
            densities = [
                atom_density(lam, nu, alg) for alg in chain.levels
            ]
            for coarse_alg, coarse, fine in zip(
                chain.levels, densities, densities[1:]
            ):
                fine_atoms = fine.atom_values()
                for value, block in zip(coarse.values, coarse_alg.blocks):
                    mass = nu(block)
                    avg = sum(
                        (fine_atoms[i] * nu.weights[i] for i in block.members),
                        Fraction(0),
                    )
                    assert value * mass == avg

    def test_random_instances_verify_exactly(self):
        rng = random.Random(43)
        for _ in range(30):
            space = make_space(rng.randint(2, 12))
            lam, nu = random_ac_pair(rng, space)
            chain = random_chain(rng, space)
            out = rn_derive(lam, nu, chain)
            assert verify_density(lam, nu, out.density) == 0
            assert oracle.exhaustive_identity_check(lam, nu, out.density)


class TestVerifyDensity:
    def test_perturbed_density_detected(self):
        f = ratio_density()
        bad = SimpleDensity(
            ATOMIC, (f.values[0] + 1, f.values[1], f.values[2])
        )
        assert verify_density(LAM, NU, bad) > 0

    def test_large_space_instructs_sampled_mode(self):
        space = make_space(22)
        nu = Measure(space, (Fraction(1),) * 22)
        f = SimpleDensity(
            FiniteAlgebra.atomic(space), (Fraction(1),) * 22
        )
        with pytest.raises(SpaceTooLargeError):
            verify_density(nu, nu, f)
        assert verify_density(nu, nu, f, sampled=True, sample_count=100) == 0

    def test_sampled_mode_seed_is_reproducible(self):
        space = make_space(22)
        nu = Measure(space, (Fraction(1),) * 22)
        lam = Measure(
            space, tuple(Fraction(i % 3) for i in range(22))
        )
        f = SimpleDensity(
            FiniteAlgebra.atomic(space), (Fraction(0),) * 22
        )
        a = verify_density(lam, nu, f, sampled=True, sample_count=50, seed=9)
        b = verify_density(lam, nu, f, sampled=True, sample_count=50, seed=9)
        assert a == b > 0
