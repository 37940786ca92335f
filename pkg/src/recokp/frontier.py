"""Exact per-scenario efficient sets and scalarized knapsack solves.

The bi-objective frontier is computed by dynamic programming over
(weight, first objective) states; scalarized subproblems are solved
in scaled integer arithmetic so that optimality decisions never touch
floating point.  Weight vectors are exact rationals; a grid weight
like 0.37 is carried as 37/100.

Tie-breaking is deterministic everywhere: among optima the
lexicographically largest objective vector (f1 first, then f2) wins;
among solutions with that vector, the one of minimum total weight,
and among those the lexicographically smallest bit string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Literal, Mapping, Sequence

import numpy as np

from .model import (
    KnapsackInstance,
    ObjectiveVector,
    ScenarioCosts,
    ScenarioSet,
    Solution,
    StructuralError,
)

Scalarization = Literal["weighted_sum", "chebyshev"]
SCALARIZATIONS = ("weighted_sum", "chebyshev")

# Bit widths of the packed (profit, f1, f2) comparison key.
_F_BITS = 18
_P_BITS = 27


class UnsupportedDimensionError(StructuralError):
    """The exact frontier is implemented for two objectives only."""


class PreconditionError(ValueError):
    """A documented precondition of an operation was violated."""


@dataclass(frozen=True)
class LambdaVector:
    """Non-negative rational weights summing to one."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise StructuralError("lambda weights must be non-negative")
        if sum(self.weights) != 1:
            raise StructuralError("lambda weights must sum to 1 exactly")

    @classmethod
    def from_hundredths(cls, parts: Sequence[int]) -> "LambdaVector":
        return cls(tuple(Fraction(p, 100) for p in parts))

    @cached_property
    def scaled(self) -> tuple[tuple[int, ...], int]:
        """Weights as integers over a common denominator."""
        scale = 1
        for w in self.weights:
            scale = scale // math.gcd(scale, w.denominator) * w.denominator
        return tuple(int(w * scale) for w in self.weights), scale


@dataclass(frozen=True)
class NondominatedFront:
    """All nondominated objective vectors with one representative each.

    Entries are sorted by the first objective ascending; along the list the
    first objective strictly increases and the second strictly decreases.
    """

    entries: tuple[tuple[ObjectiveVector, Solution], ...]

    def __post_init__(self):
        for (u, _), (v, _) in zip(self.entries, self.entries[1:]):
            if not (u.values[0] < v.values[0] and u.values[1] > v.values[1]):
                raise StructuralError("front entries must be strictly staircase-ordered")

    def vectors(self) -> tuple[ObjectiveVector, ...]:
        return tuple(v for v, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ReferencePoint:
    values: tuple[int, ...]


@dataclass(frozen=True)
class OptimalValueTable:
    """Optimal scalarized values keyed by (scenario, lambda index, method)."""

    lambdas: tuple[LambdaVector, ...]
    values: Mapping[tuple[int, int, str], Fraction]

    def index_of(self, lam: LambdaVector) -> int:
        try:
            return self._index[lam]
        except KeyError:
            raise KeyError(f"lambda {lam} not part of this table") from None

    @cached_property
    def _index(self) -> dict[LambdaVector, int]:
        return {lam: k for k, lam in enumerate(self.lambdas)}

    def value(self, scenario: int, lam: LambdaVector | int, method: str) -> Fraction:
        idx = lam if isinstance(lam, int) else self.index_of(lam)
        return self.values[(scenario, idx, method)]


def _check_pair(instance: KnapsackInstance, scenario: ScenarioCosts) -> None:
    if scenario.num_items != instance.num_items:
        raise StructuralError("scenario width does not match instance")


def _pack_limits_ok(p_total: int, f1_total: int, f2_total: int) -> None:
    if f1_total >= 1 << _F_BITS or f2_total >= 1 << _F_BITS:
        raise StructuralError("objective totals exceed the supported range")
    if p_total >= 1 << _P_BITS:
        raise StructuralError("scaled profit total exceeds the supported range")


# ---------------------------------------------------------------------------
# Bi-objective frontier
# ---------------------------------------------------------------------------


def pareto_front(instance: KnapsackInstance, scenario: ScenarioCosts) -> NondominatedFront:
    """Exact nondominated set of a two-objective knapsack scenario.

    Dynamic program over (weight, f1) states keeping the maximal f2; item
    decisions are bit-packed per item so each front point can be traced
    back to a canonical representative solution.
    """
    _check_pair(instance, scenario)
    if scenario.num_objectives != 2:
        raise UnsupportedDimensionError(
            f"exact frontier supports 2 objectives, got {scenario.num_objectives}"
        )
    ell = instance.num_items
    cap = instance.capacity
    c1, c2 = scenario.costs
    p_max = sum(c1)
    _pack_limits_ok(0, p_max, sum(c2))

    neg = np.int32(-1)
    dp = np.full((cap + 1, p_max + 1), neg, dtype=np.int32)
    dp[0, 0] = 0
    # Items are folded in reverse so that the backtrack below visits item 0
    # first and can prefer exclusion there, yielding the canonical solution.
    order = list(range(ell))[::-1]
    decisions = []
    for idx in order:
        wi, ai, bi = instance.weights[idx], c1[idx], c2[idx]
        shifted = np.full_like(dp, neg)
        if wi <= cap and ai <= p_max:
            src = dp[: cap + 1 - wi, : p_max + 1 - ai]
            shifted[wi:, ai:] = np.where(src >= 0, src + bi, neg)
        taken = shifted > dp
        decisions.append(np.packbits(taken, axis=1))
        dp = np.where(taken, shifted, dp)

    best_f2 = dp.max(axis=0)
    best_w = dp.argmax(axis=0)
    # Keep p where (p, best_f2[p]) is feasible and not dominated by a higher p.
    suffix = np.maximum.accumulate(best_f2[::-1])[::-1]
    keep = [
        p
        for p in range(p_max + 1)
        if best_f2[p] >= 0 and (p == p_max or best_f2[p] > suffix[p + 1])
    ]

    entries = []
    for p in keep:
        bits = [0] * ell
        w, pp, v = int(best_w[p]), p, int(best_f2[p])
        for k in range(ell - 1, -1, -1):
            idx = order[k]
            row = np.unpackbits(decisions[k][w], count=p_max + 1)
            if row[pp]:
                bits[idx] = 1
                w -= instance.weights[idx]
                pp -= c1[idx]
                v -= c2[idx]
        assert w == 0 and pp == 0 and v == 0
        entries.append(
            (ObjectiveVector((p, int(best_f2[p]))), Solution(tuple(bits)))
        )
    return NondominatedFront(tuple(entries))


# ---------------------------------------------------------------------------
# Scalarized solves
# ---------------------------------------------------------------------------


def _composite_suffix_tables(weights, comps, cap):
    """suf[k][w] = max total key over items k.. with weight budget w."""
    ell = len(weights)
    suf = [None] * (ell + 1)
    suf[ell] = np.zeros(cap + 1, dtype=np.int64)
    for k in range(ell - 1, -1, -1):
        prev = suf[k + 1]
        cur = prev.copy()
        wk = weights[k]
        if wk <= cap:
            np.maximum(cur[wk:], prev[: cap + 1 - wk] + comps[k], out=cur[wk:])
        suf[k] = cur
    return suf


def _reconstruct_smallest(weights, comps, suf, cap):
    """Walk forward preferring exclusion: lexicographically smallest bits."""
    ell = len(weights)
    bits = [0] * ell
    w, target = cap, int(suf[0][cap])
    for k in range(ell):
        if int(suf[k + 1][w]) == target:
            continue
        bits[k] = 1
        w -= weights[k]
        target -= int(comps[k])
    assert target == 0
    return bits


def solve_weighted_sum(
    instance: KnapsackInstance, scenario: ScenarioCosts, lam: LambdaVector
) -> tuple[Solution, Fraction]:
    """Maximize the lambda-weighted profit over the knapsack.

    Returns the optimal solution under the documented tie-break and the
    exact optimal value.
    """
    _check_pair(instance, scenario)
    if len(lam.weights) != scenario.num_objectives:
        raise StructuralError("lambda length does not match objective count")
    if scenario.num_objectives != 2:
        raise UnsupportedDimensionError("weighted-sum solve requires 2 objectives")
    (s1, s2), scale = lam.scaled
    c1, c2 = scenario.costs
    profits = [s1 * a + s2 * b for a, b in zip(c1, c2)]
    _pack_limits_ok(sum(profits), sum(c1), sum(c2))
    comps = np.array(
        [
            (p << (_F_BITS * 2)) | (a << _F_BITS) | b
            for p, a, b in zip(profits, c1, c2)
        ],
        dtype=np.int64,
    )
    suf = _composite_suffix_tables(instance.weights, comps, instance.capacity)
    bits = _reconstruct_smallest(instance.weights, comps, suf, instance.capacity)
    scaled_value = int(suf[0][instance.capacity]) >> (_F_BITS * 2)
    return Solution(tuple(bits)), Fraction(scaled_value, scale)


def reference_point(scenario_set: ScenarioSet) -> ReferencePoint:
    """Componentwise best single-objective optimum across all scenarios."""
    inst = scenario_set.instance
    cap = inst.capacity
    n = scenario_set.num_objectives
    best = [0] * n
    for sc in scenario_set.scenarios:
        for i in range(n):
            dp = np.zeros(cap + 1, dtype=np.int64)
            for wj, cj in zip(inst.weights, sc.costs[i]):
                if wj <= cap:
                    np.maximum(dp[wj:], dp[: cap + 1 - wj] + cj, out=dp[wj:])
            best[i] = max(best[i], int(dp[cap]))
    return ReferencePoint(tuple(best))


def chebyshev_value(
    lam: LambdaVector, h: ReferencePoint, vec: ObjectiveVector
) -> Fraction:
    """Worst weighted deviation of an objective vector from the reference."""
    (scaled, scale) = lam.scaled
    worst = max(s * (hv - fv) for s, hv, fv in zip(scaled, h.values, vec.values))
    return Fraction(worst, scale)


def _chebyshev_from_front(
    front: NondominatedFront, lam: LambdaVector, h: ReferencePoint
) -> tuple[int, Fraction]:
    (s1, s2), scale = lam.scaled
    h1, h2 = h.values
    best_k, best_val = 0, None
    for k, (vec, _) in enumerate(front.entries):
        val = max(s1 * (h1 - vec.values[0]), s2 * (h2 - vec.values[1]))
        if best_val is None or val <= best_val:
            best_k, best_val = k, val  # <= keeps the largest f1 among ties
    return best_k, Fraction(best_val, scale)


def solve_chebyshev(
    instance: KnapsackInstance,
    scenario: ScenarioCosts,
    lam: LambdaVector,
    h: ReferencePoint,
    front: NondominatedFront | None = None,
) -> tuple[Solution, Fraction]:
    """Minimize the worst weighted deviation from the reference point.

    Selected as the argmin over the exact frontier; valid because the
    deviation is weakly decreasing in each objective, with the documented
    tie-break restoring efficiency at zero-weight endpoints.
    """
    if front is None:
        front = pareto_front(instance, scenario)
    if len(lam.weights) != 2 or len(h.values) != 2:
        raise UnsupportedDimensionError("Chebyshev solve requires 2 objectives")
    if front.entries:
        max_f1 = front.entries[-1][0].values[0]
        max_f2 = front.entries[0][0].values[1]
        if h.values[0] < max_f1 or h.values[1] < max_f2:
            raise PreconditionError(
                "reference point must weakly dominate every achievable objective"
            )
    k, value = _chebyshev_from_front(front, lam, h)
    return front.entries[k][1], value


def efficient_sample(
    scenario_set: ScenarioSet,
    lambdas: Sequence[LambdaVector],
    method: Scalarization,
) -> tuple[dict[tuple[int, int], Solution], OptimalValueTable]:
    """Scalarized optimum for every (scenario, lambda) pair.

    Chebyshev reuses one exact frontier per scenario and the scenario-set
    reference point; results do not depend on evaluation order.
    """
    if method not in SCALARIZATIONS:
        raise StructuralError(f"unknown scalarization {method!r}")
    if not lambdas:
        raise StructuralError("lambda grid must be non-empty")
    inst = scenario_set.instance
    samples: dict[tuple[int, int], Solution] = {}
    values: dict[tuple[int, int, str], Fraction] = {}
    if method == "chebyshev":
        h = reference_point(scenario_set)
    for si, sc in enumerate(scenario_set.scenarios):
        front = pareto_front(inst, sc) if method == "chebyshev" else None
        for li, lam in enumerate(lambdas):
            if method == "weighted_sum":
                sol, val = solve_weighted_sum(inst, sc, lam)
            else:
                sol, val = solve_chebyshev(inst, sc, lam, h, front=front)
            samples[(si, li)] = sol
            values[(si, li, method)] = val
    return samples, OptimalValueTable(tuple(lambdas), values)


def front_csv_rows(fronts: Mapping[int, NondominatedFront]) -> list[str]:
    """Front dump rows: ``scenario,f1,f2,bits`` per nondominated point."""
    rows = ["scenario,f1,f2,bits"]
    for si in sorted(fronts):
        for vec, sol in fronts[si].entries:
            rows.append(f"{si},{vec.values[0]},{vec.values[1]},{sol.as_string()}")
    return rows


def write_fronts_csv(path, fronts: Mapping[int, NondominatedFront]) -> None:
    from pathlib import Path

    Path(path).write_text("\n".join(front_csv_rows(fronts)) + "\n", encoding="ascii")
