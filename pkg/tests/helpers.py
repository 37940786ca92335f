"""Shared enumeration oracles used across the test modules.

Everything here is deliberately independent of the production code paths:
solutions are enumerated as bitmask integers and compared with plain
Python arithmetic, so these functions stay valid oracles for the DP,
MILP, and search implementations they check.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from recokp.frontier import LambdaVector
from recokp.model import KnapsackInstance, ScenarioCosts, ScenarioSet, Solution


def mask_bits(mask: int, ell: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(ell))


def mask_solution(mask: int, ell: int) -> Solution:
    return Solution(mask_bits(mask, ell))


def enumerate_profile(instance: KnapsackInstance, scenario: ScenarioCosts):
    """(weight, f1, f2) arrays indexed by selection mask."""
    wt = np.zeros(1, dtype=np.int64)
    for w in instance.weights:
        wt = np.concatenate([wt, wt + w])
    f1 = np.zeros(1, dtype=np.int64)
    f2 = np.zeros(1, dtype=np.int64)
    for c in scenario.costs[0]:
        f1 = np.concatenate([f1, f1 + c])
    for c in scenario.costs[1]:
        f2 = np.concatenate([f2, f2 + c])
    return wt, f1, f2


def canonical_among(masks, instance: KnapsackInstance) -> int:
    """The documented representative: minimum weight, then smallest bits."""
    ell = instance.num_items

    def key(mask):
        weight = sum(instance.weights[i] for i in range(ell) if (mask >> i) & 1)
        return (weight, mask_bits(mask, ell))

    return min(masks, key=key)


def brute_front(instance: KnapsackInstance, scenario: ScenarioCosts):
    """Nondominated vectors (f1 ascending) with canonical representatives."""
    wt, f1, f2 = enumerate_profile(instance, scenario)
    feas = np.nonzero(wt <= instance.capacity)[0]
    pairs = {}
    for mask in feas:
        v = (int(f1[mask]), int(f2[mask]))
        pairs.setdefault(v, []).append(int(mask))
    vecs = sorted(pairs)
    nondom = [
        v
        for v in vecs
        if not any(u[0] >= v[0] and u[1] >= v[1] and u != v for u in vecs)
    ]
    return [(v, canonical_among(pairs[v], instance)) for v in sorted(nondom)]


def brute_weighted_sum(instance, scenario, lam: LambdaVector):
    """Optimal value and the documented-tie-break solution mask."""
    (s1, s2), scale = lam.scaled
    wt, f1, f2 = enumerate_profile(instance, scenario)
    feas = np.nonzero(wt <= instance.capacity)[0]
    profit = s1 * f1[feas] + s2 * f2[feas]
    best = int(profit.max())
    tied = feas[profit == best]
    vec_key = f1[tied] * (1 << 20) + f2[tied]
    tied = tied[vec_key == vec_key.max()]
    ell = instance.num_items
    mask = min((int(t) for t in tied), key=lambda m: mask_bits(m, ell))
    return Fraction(best, scale), mask


def brute_chebyshev(instance, scenario, lam: LambdaVector, h):
    """Optimal deviation and the documented-tie-break solution mask."""
    (s1, s2), scale = lam.scaled
    wt, f1, f2 = enumerate_profile(instance, scenario)
    feas = np.nonzero(wt <= instance.capacity)[0]
    dev = np.maximum(s1 * (h.values[0] - f1[feas]), s2 * (h.values[1] - f2[feas]))
    best = int(dev.min())
    tied = feas[dev == best]
    vec_key = f1[tied] * (1 << 20) + f2[tied]
    tied = tied[vec_key == vec_key.max()]
    return Fraction(best, scale), canonical_among([int(t) for t in tied], instance)


def opt_coupling_oracle(ss: ScenarioSet, target_masks, method: str) -> int:
    """Minimum aggregate distance over all feasible x and admissible targets."""
    inst = ss.instance
    wt = np.zeros(1, dtype=np.int64)
    for w in inst.weights:
        wt = np.concatenate([wt, wt + w])
    xs = np.nonzero(wt <= inst.capacity)[0]
    agg = np.zeros(len(xs), dtype=np.int64)
    for masks in target_masks:
        d = np.bitwise_count(xs[:, None] ^ np.asarray(masks)[None, :]).min(axis=1)
        agg = np.maximum(agg, d) if method == "center" else agg + d
    return int(agg.min())


def random_milp_model(rng, max_binaries=14):
    """Random small model; roughly a quarter carry a determined min-max var."""
    from recokp.milp import Constraint, MilpModel

    nb = int(rng.integers(1, max_binaries + 1))
    with_cont = rng.random() < 0.25
    sense = "min" if rng.random() < 0.5 else "max"
    nc = 1 if with_cont else 0
    rows = []
    for _ in range(int(rng.integers(1, 5))):
        coeffs = [int(v) for v in rng.integers(-6, 7, nb)] + [0] * nc
        rel = ("<=", ">=", "=")[int(rng.integers(0, 3))]
        rhs = int(rng.integers(-4, max(2, sum(abs(c) for c in coeffs))))
        if rel == "=":
            # keep equalities satisfiable reasonably often
            rhs = int(rng.integers(0, max(1, sum(max(c, 0) for c in coeffs)) + 1))
        rows.append(Constraint(tuple(coeffs), rel, rhs))
    objective = [int(v) for v in rng.integers(-9, 10, nb)] + [0] * nc
    if with_cont:
        # t bounded below by two expressions over the binaries; minimized
        for _ in range(2):
            coeffs = [int(v) for v in rng.integers(0, 4, nb)] + [-1]
            rows.append(Constraint(tuple(coeffs), "<=", int(rng.integers(0, 3))))
        objective[nb] = int(rng.integers(1, 4))
        sense = "min"
    return MilpModel(
        nb,
        nc,
        sense,
        tuple(objective),
        tuple(rows),
        continuous_bounds=((0, None),) if with_cont else (),
    )


def random_scenario_set(rng, ell, m, low=10, high=100) -> ScenarioSet:
    w = tuple(int(v) for v in rng.integers(low, high + 1, ell))
    inst = KnapsackInstance(ell, w, (sum(w) + 1) // 2)
    scens = tuple(
        ScenarioCosts(
            (
                tuple(int(v) for v in rng.integers(low, high + 1, ell)),
                tuple(int(v) for v in rng.integers(low, high + 1, ell)),
            )
        )
        for _ in range(m)
    )
    return ScenarioSet(inst, scens)
