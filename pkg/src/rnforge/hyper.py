"""Computable sequence model of the extended reals.

A hyperreal here is a total rule from natural indices to exact rationals,
optionally carrying hints (monotonicity, a declared limit, declared
unboundedness).  Comparisons use eventual-truth semantics over the cofinite
filter, which is not decidable by sampling alone, so every checker returns a
three-valued Verdict: Holds and Fails require a certificate (a hint, an
exactly constant sampled tail, or a monotone witness); Unknown is the
honest fallback.  Horizons are always explicit parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .measure import PreconditionError, RationalLike, _as_fraction

Rule = Callable[[int], Fraction]
RealRule = Callable[[Fraction], Fraction]


class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: object = None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS


class Kind(enum.Enum):
    INFINITESIMAL = "infinitesimal"
    FINITE = "finite"
    INFINITE = "infinite"
    UNKNOWN = "unknown"


class DivisionCertificateError(ValueError):
    """Division requested by a generator with no nonzero-tail justification."""


class InfiniteValueError(ValueError):
    """standard_part applied to a value classified as infinite."""


@dataclass(frozen=True)
class HyperReal:
    """Lazily evaluated rational sequence with optional hints.

    Hints are promises about the whole tail, and are what turns sampled
    evidence into certified verdicts.  `monotone` is "inc" or "dec";
    `limit` declares convergence to a standard rational; `unbounded`
    declares |x_n| to exceed every standard bound eventually.
    """

    rule: Rule
    monotone: Optional[str] = None
    limit: Optional[Fraction] = None
    unbounded: bool = False
    constant: bool = False

    def __post_init__(self) -> None:
        if self.monotone not in (None, "inc", "dec"):
            raise ValueError("monotone hint must be 'inc' or 'dec'")
        if self.limit is not None:
            object.__setattr__(self, "limit", _as_fraction(self.limit))

    def __call__(self, n: int) -> Fraction:
        return _as_fraction(self.rule(n))

    @staticmethod
    def from_rule(
        rule: Rule,
        *,
        monotone: Optional[str] = None,
        limit: Optional[RationalLike] = None,
        unbounded: bool = False,
    ) -> "HyperReal":
        lim = None if limit is None else _as_fraction(limit)
        return HyperReal(rule, monotone, lim, unbounded)

    @staticmethod
    def of(value: RationalLike) -> "HyperReal":
        v = _as_fraction(value)
        return HyperReal(lambda n: v, None, v, False, constant=True)

    @staticmethod
    def omega() -> "HyperReal":
        """The canonical infinite element n |-> n."""
        return HyperReal(lambda n: Fraction(n), "inc", None, True)


def _sample_indices(horizon: int) -> list[int]:
    if horizon < 1:
        raise PreconditionError("horizon must be >= 1")
    idxs = set(range(min(horizon, 8) + 1))
    idxs |= {horizon // 8, horizon // 4, horizon // 2, 3 * horizon // 4, horizon}
    return sorted(i for i in idxs if i >= 0)


def _combine_monotone(x: HyperReal, y: HyperReal, flip_y: bool) -> Optional[str]:
    ym = y.monotone
    if flip_y and ym is not None:
        ym = "dec" if ym == "inc" else "inc"
    if x.constant:
        return ym
    if y.constant:
        return x.monotone
    if x.monotone is not None and x.monotone == ym:
        return x.monotone
    return None


def _nonzero_tail_certificate(y: HyperReal) -> bool:
    if y.unbounded or (y.limit is not None and y.limit != 0):
        return True
    if y.constant:
        return y(0) != 0
    if y.monotone is not None:
        # A monotone sequence crosses zero at most once; a nonzero sample at
        # a late index on the far side pins the tail away from zero.
        late = y(64)
        if late != 0:
            early = y(0)
            if y.monotone == "inc" and late > 0:
                return True
            if y.monotone == "dec" and late < 0:
                return True
            # Still approaching zero from one side: nonzero forever unless
            # the declared limit is crossed, which monotonicity forbids.
            if (early > 0 and late > 0 and y.monotone == "dec") or (
                early < 0 and late < 0 and y.monotone == "inc"
            ):
                return True
    return False


def arith(x: HyperReal, y: HyperReal, op: str) -> HyperReal:
    """Pointwise arithmetic on representatives, with hint propagation."""
    if op == "+":
        limit = (
            x.limit + y.limit
            if x.limit is not None and y.limit is not None
            else None
        )
        unbounded = (x.unbounded and y.limit is not None) or (
            y.unbounded and x.limit is not None
        )
        return HyperReal(
            lambda n: x(n) + y(n),
            _combine_monotone(x, y, flip_y=False),
            limit,
            unbounded,
            constant=x.constant and y.constant,
        )
    if op == "-":
        limit = (
            x.limit - y.limit
            if x.limit is not None and y.limit is not None
            else None
        )
        unbounded = (x.unbounded and y.limit is not None) or (
            y.unbounded and x.limit is not None
        )
        return HyperReal(
            lambda n: x(n) - y(n),
            _combine_monotone(x, y, flip_y=True),
            limit,
            unbounded,
            constant=x.constant and y.constant,
        )
    if op == "*":
        limit = (
            x.limit * y.limit
            if x.limit is not None and y.limit is not None
            else None
        )
        unbounded = (
            x.unbounded and y.limit is not None and y.limit != 0
        ) or (y.unbounded and x.limit is not None and x.limit != 0)
        return HyperReal(
            lambda n: x(n) * y(n),
            None,
            limit,
            unbounded,
            constant=x.constant and y.constant,
        )
    if op == "/":
        if not _nonzero_tail_certificate(y):
            raise DivisionCertificateError(
                "divisor has no nonzero-tail justification (hint required)"
            )

        def quotient(n: int) -> Fraction:
            yn = y(n)
            # Finitely many zeros are tolerated by eventual-truth semantics;
            # map them to 0 so the rule stays total.
            return x(n) / yn if yn != 0 else Fraction(0)

        if y.unbounded and (x.limit is not None or x.constant):
            limit = Fraction(0)
            monotone = None
            if x.constant and y.monotone is not None and x(0) != 0:
                up = (x(0) > 0) == (y.monotone == "dec")
                monotone = "inc" if up else "dec"
            return HyperReal(quotient, monotone, limit, False)
        limit = (
            x.limit / y.limit
            if x.limit is not None and y.limit not in (None, Fraction(0))
            else None
        )
        return HyperReal(
            quotient, None, limit, False, constant=x.constant and y.constant
        )
    raise ValueError(f"unknown operation {op!r}")


def classify(x: HyperReal, horizon: int) -> Kind:
    """Infinitesimal / Finite / Infinite / Unknown at the given horizon."""
    idxs = _sample_indices(horizon)
    vals = [x(i) for i in idxs]
    if x.limit is not None:
        return Kind.INFINITESIMAL if x.limit == 0 else Kind.FINITE
    if x.unbounded:
        return Kind.INFINITE
    if len(set(vals)) == 1:
        return Kind.INFINITESIMAL if vals[0] == 0 else Kind.FINITE
    if x.monotone is not None and horizon >= 8:
        a = abs(x(horizon // 4))
        b = abs(x(horizon))
        if b >= 2 * a and b >= 10:
            return Kind.INFINITE
        if 2 * b <= a:
            return Kind.INFINITESIMAL
        if b <= 2 * a:
            # Monotone and sandwiched: bounded, hence convergent.
            return Kind.FINITE
    return Kind.UNKNOWN


def _aitken(v0: Fraction, v1: Fraction, v2: Fraction) -> Fraction:
    denom = v2 - 2 * v1 + v0
    if denom == 0:
        return v2
    return v2 - (v2 - v1) ** 2 / denom


def _extrapolate(values: Sequence[Fraction]) -> Fraction:
    """Sequence-limit estimate via Wynn's epsilon algorithm.

    Exact rational arithmetic makes the even epsilon columns reproduce the
    Shanks transformations, which annihilate geometric transients exactly;
    a vanishing denominator is taken as convergence of that column.
    """
    older = [Fraction(0)] * (len(values) + 1)  # column k-1 (odd scale)
    current = list(values)  # column k (starts even)
    column = 0
    best = current[-1]
    while len(current) >= 2:
        nxt = []
        for n in range(len(current) - 1):
            delta = current[n + 1] - current[n]
            if delta == 0:
                # The column has converged exactly at this entry.
                return current[n + 1] if column % 2 == 0 else best
            nxt.append(older[n + 1] + 1 / delta)
        older, current = current, nxt
        column += 1
        if column % 2 == 0:
            best = current[-1]
    return best


def standard_part(
    x: HyperReal, tolerance: RationalLike, horizon: int
) -> Optional[Fraction]:
    """Standard rational within `tolerance` of the tail, or None (Unknown).

    A declared limit is returned directly after sample validation; otherwise
    a monotone hint plus geometric tail contraction certifies an Aitken
    extrapolation.  Raises on values classified as infinite.
    """
    tolerance = _as_fraction(tolerance)
    if tolerance <= 0:
        raise PreconditionError("tolerance must be positive")
    kind = classify(x, horizon)
    if kind is Kind.INFINITE:
        raise InfiniteValueError("an infinite value has no standard part")
    if x.limit is not None:
        return x.limit
    idxs = _sample_indices(horizon)
    vals = [x(i) for i in idxs]
    if len(set(vals)) == 1:
        return vals[0]
    if kind is Kind.INFINITESIMAL:
        return Fraction(0)
    if x.monotone is not None and horizon >= 8:
        v0, v1, v2 = x(horizon // 4), x(horizon // 2), x(horizon)
        d1, d2 = v1 - v0, v2 - v1
        if d1 != 0 and abs(d2) < abs(d1):
            r = abs(d2) / abs(d1)
            tail_bound = abs(d2) * r / (1 - r)
            if tail_bound < tolerance:
                return _aitken(v0, v1, v2)
    return None


def infinitely_close(x: HyperReal, y: HyperReal, horizon: int) -> Verdict:
    """Verdict on whether x - y is infinitesimal."""
    diff = arith(x, y, "-")
    if diff.limit is not None:
        if diff.limit == 0:
            return Verdict(Status.HOLDS, reason="declared limit 0")
        return Verdict(
            Status.FAILS, witness=diff.limit, reason="declared nonzero limit"
        )
    idxs = _sample_indices(horizon)
    vals = [diff(i) for i in idxs]
    if len(set(vals)) == 1:
        if vals[0] == 0:
            return Verdict(Status.HOLDS, reason="constant zero over samples")
        return Verdict(
            Status.FAILS,
            witness=(idxs[0], idxs[-1], vals[0]),
            reason="constant nonzero difference over samples",
        )
    kind = classify(diff, horizon)
    if kind is Kind.INFINITESIMAL:
        return Verdict(Status.HOLDS, reason="difference classified infinitesimal")
    if kind is Kind.INFINITE:
        return Verdict(
            Status.FAILS, witness=horizon, reason="difference classified infinite"
        )
    return Verdict(Status.UNKNOWN, reason="no certificate at this horizon")


def _is_monotone(vals: Sequence[Fraction]) -> Optional[str]:
    if all(b <= a for a, b in zip(vals, vals[1:])):
        return "dec"
    if all(b >= a for a, b in zip(vals, vals[1:])):
        return "inc"
    return None


def check_limit(
    seq: Rule, a: RationalLike, horizons: Sequence[int]
) -> Verdict:
    """Test convergence of seq to a by examining tails at each horizon.

    Holds needs every horizon to show a monotone, geometrically contracting
    approach to a; a monotone tail pinned at a standard gap from a yields
    Fails with the witness index.
    """
    if not horizons:
        raise PreconditionError("need at least one horizon")
    a = _as_fraction(a)
    per_horizon: list[Status] = []
    witness = None
    for h in horizons:
        idxs = _sample_indices(h)
        vals = [_as_fraction(seq(i)) for i in idxs]
        gaps = [v - a for v in vals]
        if all(g == 0 for g in gaps):
            per_horizon.append(Status.HOLDS)
            continue
        mono = _is_monotone(vals)
        if mono is None or h < 8:
            per_horizon.append(Status.UNKNOWN)
            continue
        g_mid = abs(_as_fraction(seq(h // 4)) - a)
        g_end = abs(_as_fraction(seq(h)) - a)
        if 2 * g_end <= g_mid:
            per_horizon.append(Status.HOLDS)
        elif g_end >= g_mid and g_end > 0:
            # Monotone yet not approaching: the gap persists forever.
            per_horizon.append(Status.FAILS)
            witness = witness if witness is not None else (h, g_end)
        else:
            per_horizon.append(Status.UNKNOWN)
    if Status.FAILS in per_horizon:
        return Verdict(Status.FAILS, witness=witness, reason="persistent gap")
    if all(s is Status.HOLDS for s in per_horizon):
        return Verdict(Status.HOLDS, reason="monotone contraction at all horizons")
    return Verdict(Status.UNKNOWN, reason="no certificate at some horizon")


def check_uniform_continuity(
    f: RealRule,
    grid: int,
    horizon: int,
    modulus: Optional[Callable[[Fraction], Fraction]] = None,
) -> Verdict:
    """Verdict on uniform continuity of f over [0, 1].

    With a declared modulus of continuity the modulus is validated on
    sampled pairs and Holds is returned.  Without one, sampling can only
    find a counterexample pair (a gap that persists as the pair distance
    shrinks) or report Unknown.
    """
    if grid < 2:
        raise PreconditionError("grid must be >= 2")
    if modulus is not None:
        for eps in (Fraction(1, 10), Fraction(1, 100)):
            delta = _as_fraction(modulus(eps))
            if delta <= 0:
                return Verdict(
                    Status.FAILS, witness=eps, reason="nonpositive modulus"
                )
            steps = min(grid, max(8, horizon // 8))
            for k in range(steps):
                xp = Fraction(k, steps)
                yp = min(Fraction(1), xp + delta)
                if abs(f(xp) - f(yp)) > eps:
                    return Verdict(
                        Status.FAILS,
                        witness=(xp, yp),
                        reason="declared modulus violated on a sample pair",
                    )
        return Verdict(Status.HOLDS, reason="declared modulus validated")
    gaps: list[tuple[Fraction, tuple[Fraction, Fraction]]] = []
    level = 0
    while grid * (1 << level) <= horizon:
        points = grid * (1 << level)
        worst = Fraction(0)
        worst_pair = (Fraction(0), Fraction(0))
        prev_x = Fraction(0)
        prev_v = f(prev_x)
        for k in range(1, points + 1):
            xk = Fraction(k, points)
            vk = f(xk)
            if abs(vk - prev_v) > worst:
                worst = abs(vk - prev_v)
                worst_pair = (prev_x, xk)
            prev_x, prev_v = xk, vk
        gaps.append((worst, worst_pair))
        level += 1
    if len(gaps) >= 2:
        first, last = gaps[0][0], gaps[-1][0]
        if last > 0 and 4 * last >= 3 * first:
            return Verdict(
                Status.FAILS,
                witness=gaps[-1][1],
                reason="image gap persists as the pair distance shrinks",
            )
    return Verdict(Status.UNKNOWN, reason="sampling cannot certify continuity")


@dataclass(frozen=True)
class PartitionSequence:
    """Rule from a level index to a partition of [0, 1] with mesh -> 0."""

    rule: Callable[[int], Sequence[Fraction]]
    mesh: Callable[[int], Fraction]

    def points(self, n: int) -> list[Fraction]:
        pts = [_as_fraction(p) for p in self.rule(n)]
        if pts[0] != 0 or pts[-1] != 1:
            raise ValueError("partitions must run from 0 to 1")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("partition points must be strictly increasing")
        return pts

    @staticmethod
    def dyadic() -> "PartitionSequence":
        return PartitionSequence(
            rule=lambda n: [Fraction(k, 1 << n) for k in range((1 << n) + 1)],
            mesh=lambda n: Fraction(1, 1 << n),
        )

    @staticmethod
    def powers_of_three() -> "PartitionSequence":
        return PartitionSequence(
            rule=lambda n: [Fraction(k, 3**n) for k in range(3**n + 1)],
            mesh=lambda n: Fraction(1, 3**n),
        )


def riemann_stieltjes_sum(
    f: RealRule, g: RealRule, points: Sequence[Fraction]
) -> Fraction:
    """Left-endpoint sum of f against increments of g along the partition."""
    total = Fraction(0)
    g_prev = _as_fraction(g(points[0]))
    for left, right in zip(points, points[1:]):
        g_right = _as_fraction(g(right))
        if g_right < g_prev:
            raise PreconditionError(
                f"g decreases across [{left}, {right}]"
            )
        total += _as_fraction(f(left)) * (g_right - g_prev)
        g_prev = g_right
    return total


def _ladder_levels(parts: PartitionSequence, horizon: int) -> list[int]:
    levels = []
    n = 0
    while True:
        pts = parts.rule(n)
        if len(pts) - 1 > horizon:
            break
        levels.append(n)
        n += 1
    return levels


def rs_integral(
    f: RealRule,
    g: RealRule,
    parts: PartitionSequence,
    tolerance: RationalLike,
    horizon: int,
) -> Optional[Fraction]:
    """Standard part of the partition-sum sequence, or None without a certificate.

    Sums are evaluated exactly at every level whose partition fits the
    horizon; the limit is certified when successive Aitken extrapolations of
    the sum sequence agree within the tolerance.
    """
    tolerance = _as_fraction(tolerance)
    if tolerance <= 0:
        raise PreconditionError("tolerance must be positive")
    levels = _ladder_levels(parts, horizon)
    sums = [riemann_stieltjes_sum(f, g, parts.points(n)) for n in levels]
    if len(sums) >= 2 and all(s == sums[-1] for s in sums[-2:]):
        tail_equal = all(s == sums[-1] for s in sums)
        if tail_equal:
            return sums[-1]
    if len(sums) < 5:
        return None
    est_prev = _extrapolate(sums[:-1])
    est_last = _extrapolate(sums)
    if abs(est_last - est_prev) < tolerance:
        return est_last
    return None


def partition_agreement(
    f: RealRule,
    g: RealRule,
    p1: PartitionSequence,
    p2: PartitionSequence,
    horizon: int,
    tolerance: RationalLike = Fraction(1, 10**6),
) -> Verdict:
    """Verdict on S(p1(n)) - S(p2(n)) -> 0, via the combined refinement.

    Each sum is compared against the merge of the two partitions; Holds
    requires the deviations to shrink and the extrapolated limit of the
    difference to land within the tolerance of zero.
    """
    tolerance = _as_fraction(tolerance)
    levels = [
        n
        for n in _ladder_levels(p1, horizon)
        if n in set(_ladder_levels(p2, horizon))
    ]
    if not levels:
        return Verdict(Status.UNKNOWN, reason="no common levels fit the horizon")
    diffs: list[Fraction] = []
    deviations: list[Fraction] = []
    for n in levels:
        pts1 = p1.points(n)
        pts2 = p2.points(n)
        merged = sorted(set(pts1) | set(pts2))
        s1 = riemann_stieltjes_sum(f, g, pts1)
        s2 = riemann_stieltjes_sum(f, g, pts2)
        sm = riemann_stieltjes_sum(f, g, merged)
        diffs.append(s1 - s2)
        deviations.append(max(abs(s1 - sm), abs(s2 - sm)))
    if all(d == 0 for d in diffs):
        return Verdict(Status.HOLDS, reason="sums agree exactly at every level")
    if len(diffs) >= 5:
        shrinking = all(
            b <= a for a, b in zip(deviations[-4:], deviations[-3:])
        )
        est = _extrapolate(diffs)
        if shrinking and abs(est) <= tolerance:
            return Verdict(
                Status.HOLDS,
                reason="deviations shrink and extrapolated difference is null",
            )
        stalled = all(
            4 * abs(b) >= 3 * abs(a) for a, b in zip(diffs[-3:], diffs[-2:])
        )
        if abs(diffs[-1]) > tolerance and stalled and abs(est) > tolerance:
            return Verdict(
                Status.FAILS,
                witness=(levels[-1], diffs[-1]),
                reason="difference persists across refinements",
            )
    return Verdict(Status.UNKNOWN, reason="no certificate at this horizon")
