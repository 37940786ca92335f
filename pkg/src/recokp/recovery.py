"""Robust-set generation: center/median recovery problems over a lambda grid.

Fixed coupling recovers to one precomputed scalarized optimum per scenario;
opt coupling simultaneously picks the robust solution and, per scenario, a
recovery target among all solutions whose scalarized value is within the
epsilon tolerance of the optimum.

Fixed-coupling center problems are solved through the MILP kernel; the
median reduces exactly to a single-objective knapsack.  Opt couplings are
solved by an exact combinatorial search: each scenario's admissible target
set is enumerated explicitly, and a depth-first search over the robust
vector prunes with per-scenario minimum-distance bounds.  The equivalent
coupled MILP is still constructed by :func:`coupled_model` for
cross-checking and LP export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Mapping, Optional, Sequence

import numpy as np

from .frontier import (
    SCALARIZATIONS,
    LambdaVector,
    OptimalValueTable,
    ReferencePoint,
    Scalarization,
    _composite_suffix_tables,
    _reconstruct_smallest,
    efficient_sample,
    reference_point,
    solve_chebyshev,
    solve_weighted_sum,
)
from .milp import Constraint, MilpModel, SolverConfig, solve_exact
from .model import (
    KnapsackInstance,
    ScenarioSet,
    Solution,
    StructuralError,
    hamming,
    is_feasible,
)

Method = Literal["center", "median"]
Coupling = Literal["fixed", "opt"]
METHODS = ("center", "median")
COUPLINGS = ("fixed", "opt")

# Full 2^l enumeration tables are cached up to this size; larger instances
# fall back to chunked scans per solve.
_FULL_BITS = 20
_CHUNK = 1 << 20
_MAX_OPT_BITS = 30


@dataclass(frozen=True)
class RecEffConfig:
    """Which recovery problem to solve and under which scalarization."""

    method: Method
    coupling: Coupling
    epsilon: Fraction = Fraction(0)
    scalarization: Scalarization = "weighted_sum"

    def __post_init__(self):
        if self.method not in METHODS:
            raise StructuralError(f"unknown method {self.method!r}")
        if self.coupling not in COUPLINGS:
            raise StructuralError(f"unknown coupling {self.coupling!r}")
        if self.scalarization not in SCALARIZATIONS:
            raise StructuralError(f"unknown scalarization {self.scalarization!r}")
        if not 0 <= self.epsilon <= 1:
            raise StructuralError("epsilon must lie in [0, 1]")


@dataclass(frozen=True)
class RobustPoint:
    lam: LambdaVector
    robust_solution: Solution
    cost: int
    recovered: Optional[tuple[Solution, ...]] = None


@dataclass(frozen=True)
class RobustSet:
    points: tuple[RobustPoint, ...]
    config: RecEffConfig

    def __post_init__(self):
        if not self.points:
            raise StructuralError("a robust set holds at least one point")


def total_recovery_cost(rs: RobustSet) -> int:
    """Sum of the per-lambda recovery costs; the tabulated comparison value."""
    return sum(p.cost for p in rs.points)


# ---------------------------------------------------------------------------
# MILP model builders (kernel route)
# ---------------------------------------------------------------------------


def center_fixed_model(
    instance: KnapsackInstance, points: Sequence[Solution]
) -> MilpModel:
    """min-max Hamming distance to fixed points, as a 0-1 model."""
    ell = instance.num_items
    nvar = ell + 1
    cons = [Constraint(tuple(instance.weights) + (0,), "<=", instance.capacity)]
    for p in points:
        coeffs = tuple(1 - 2 * b for b in p.bits) + (-1,)
        cons.append(Constraint(coeffs, "<=", -sum(p.bits)))
    objective = (0,) * ell + (1,)
    return MilpModel(
        num_binary=ell,
        num_continuous=1,
        sense="min",
        objective=objective,
        constraints=tuple(cons),
        continuous_bounds=((0, None),),
        objective_integral=True,
    )


def median_fixed_model(
    instance: KnapsackInstance, points: Sequence[Solution]
) -> MilpModel:
    """Sum of Hamming distances to fixed points; linear in the selection."""
    ell = instance.num_items
    m = len(points)
    b = [sum(p.bits[i] for p in points) for i in range(ell)]
    # d(x, points) = sum_i b_i + sum_i x_i (m - 2 b_i)
    objective = tuple(m - 2 * bi for bi in b)
    cons = (Constraint(tuple(instance.weights), "<=", instance.capacity),)
    return MilpModel(
        num_binary=ell,
        num_continuous=0,
        sense="min",
        objective=objective,
        constraints=cons,
        objective_integral=True,
    )


def median_fixed_offset(points: Sequence[Solution]) -> int:
    """Constant term dropped from :func:`median_fixed_model`'s objective."""
    return sum(sum(p.bits) for p in points)


def coupled_model(
    scenario_set: ScenarioSet,
    lam: LambdaVector,
    scalarization: Scalarization,
    value_table: OptimalValueTable,
    epsilon: Fraction = Fraction(0),
    method: Method = "center",
    h: ReferencePoint | None = None,
) -> MilpModel:
    """The simultaneous robust/recovery model over all scenarios.

    Variables: robust bits x, per-scenario recovery bits y^j, auxiliary
    binaries z^j linearizing |x - y^j| through four inequalities per item,
    plus (center only) the continuous worst-distance t.
    """
    inst = scenario_set.instance
    ell = inst.num_items
    m = scenario_set.num_scenarios
    (s1, s2), scale = lam.scaled
    if scalarization == "chebyshev" and h is None:
        h = reference_point(scenario_set)
    nb = ell * (1 + 2 * m)
    nc = 1 if method == "center" else 0
    nvar = nb + nc
    y0 = lambda j: ell + j * ell
    z0 = lambda j: ell + m * ell + j * ell

    def row(entries: dict[int, int]) -> tuple[int, ...]:
        coeffs = [0] * nvar
        for k, v in entries.items():
            coeffs[k] = v
        return tuple(coeffs)

    cons = [Constraint(row({i: inst.weights[i] for i in range(ell)}), "<=", inst.capacity)]
    for j in range(m):
        cons.append(
            Constraint(
                row({y0(j) + i: inst.weights[i] for i in range(ell)}),
                "<=",
                inst.capacity,
            )
        )
    for j in range(m):
        for i in range(ell):
            xi, yi, zi = i, y0(j) + i, z0(j) + i
            cons.append(Constraint(row({xi: 1, yi: -1, zi: -1}), "<=", 0))
            cons.append(Constraint(row({yi: 1, xi: -1, zi: -1}), "<=", 0))
            cons.append(Constraint(row({zi: 1, xi: -1, yi: -1}), "<=", 0))
            cons.append(Constraint(row({zi: 1, xi: 1, yi: 1}), "<=", 2))
    for j, sc in enumerate(scenario_set.scenarios):
        g_scaled = value_table.value(j, lam, scalarization) * scale
        if scalarization == "weighted_sum":
            profits = {
                y0(j) + i: s1 * sc.costs[0][i] + s2 * sc.costs[1][i]
                for i in range(ell)
            }
            cons.append(Constraint(row(profits), ">=", (1 - epsilon) * g_scaled))
        else:
            for obj_i, s_i in enumerate((s1, s2)):
                coeffs = {
                    y0(j) + i: -s_i * sc.costs[obj_i][i] for i in range(ell)
                }
                rhs = (1 + epsilon) * g_scaled - s_i * h.values[obj_i]
                cons.append(Constraint(row(coeffs), "<=", rhs))
    if method == "center":
        for j in range(m):
            entries = {z0(j) + i: 1 for i in range(ell)}
            entries[nb] = -1
            cons.append(Constraint(row(entries), "<=", 0))
        objective = (0,) * nb + (1,)
        cont_bounds = ((0, None),)
    else:
        objective = tuple(
            1 if ell + m * ell <= k < nb else 0 for k in range(nb)
        )
        cont_bounds = ()
    return MilpModel(
        num_binary=nb,
        num_continuous=nc,
        sense="min",
        objective=objective,
        constraints=tuple(cons),
        continuous_bounds=cont_bounds,
        objective_integral=True,
    )


def coupled_warm_assignment(
    instance: KnapsackInstance, x: Solution, targets: Sequence[Solution], method: Method
) -> tuple[int, ...]:
    """A feasible full assignment of :func:`coupled_model` from known parts."""
    warm = list(x.bits)
    for t in targets:
        warm.extend(t.bits)
    for t in targets:
        warm.extend(abs(a - b) for a, b in zip(x.bits, t.bits))
    return tuple(warm)


# ---------------------------------------------------------------------------
# Fixed couplings
# ---------------------------------------------------------------------------


def solve_median_fixed(
    instance: KnapsackInstance, points: Sequence[Solution]
) -> tuple[Solution, int]:
    """Feasible x minimizing the summed Hamming distance to the points.

    Exact reduction to a single-objective knapsack: item i carries reduced
    profit 2*b_i - m, where b_i counts points containing i; nonpositive
    profits are never selected.
    """
    _check_points(instance, points)
    ell = instance.num_items
    m = len(points)
    b = [sum(p.bits[i] for p in points) for i in range(ell)]
    profits = np.array([2 * bi - m for bi in b], dtype=np.int64)
    suf = _composite_suffix_tables(instance.weights, profits, instance.capacity)
    bits = _reconstruct_smallest(instance.weights, profits, suf, instance.capacity)
    best = int(suf[0][instance.capacity])
    return Solution(tuple(bits)), sum(b) - best


def solve_center_fixed(
    instance: KnapsackInstance,
    points: Sequence[Solution],
    solver: SolverConfig | None = None,
) -> tuple[Solution, int]:
    """Feasible x minimizing the maximum Hamming distance to the points."""
    _check_points(instance, points)
    model = center_fixed_model(instance, points)
    warm_x, _ = _best_candidate(
        instance, points, [[p] for p in points], "center"
    )
    res = solve_exact(model, replace(solver or SolverConfig(), warm_start=warm_x.bits))
    bits = tuple(int(v) for v in res.assignment[: instance.num_items])
    return Solution(bits), int(res.objective_value)


def _check_points(instance: KnapsackInstance, points: Sequence[Solution]) -> None:
    if not points:
        raise StructuralError("at least one recovery point required")
    for p in points:
        if len(p.bits) != instance.num_items:
            raise StructuralError("point length does not match instance")


def _best_candidate(instance, candidates, target_lists, method):
    """Cheapest feasible candidate x by aggregate distance to closest targets."""
    best_x, best_cost = None, None
    median_x, _ = solve_median_fixed(instance, candidates)
    pool = [x for x in candidates if is_feasible(instance, x)] + [median_x]
    for x in pool:
        dists = [min(hamming(x, t) for t in targets) for targets in target_lists]
        cost = max(dists) if method == "center" else sum(dists)
        if best_cost is None or cost < best_cost:
            best_x, best_cost = x, cost
    return best_x, best_cost


# ---------------------------------------------------------------------------
# Opt couplings: explicit target sets plus depth-first search
# ---------------------------------------------------------------------------


@lru_cache(maxsize=2)
def _mask_profile(instance: KnapsackInstance, scenarios: tuple):
    """Weight and objective value of every selection mask (small instances)."""
    ell = instance.num_items
    if ell > _FULL_BITS:
        return None
    wt = np.zeros(1, dtype=np.int32)
    for w in instance.weights:
        wt = np.concatenate([wt, wt + w])
    profile = []
    for sc in scenarios:
        fs = []
        for row in sc.costs:
            f = np.zeros(1, dtype=np.int32)
            for c in row:
                f = np.concatenate([f, f + c])
            fs.append(f)
        profile.append(tuple(fs))
    return wt, profile


def _chunked_masks(instance: KnapsackInstance, scenarios, lo: int, hi: int):
    ell = instance.num_items
    masks = np.arange(lo, hi, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(ell)) & 1).astype(np.int32)
    wt = bits @ np.asarray(instance.weights, dtype=np.int32)
    profile = []
    for sc in scenarios:
        profile.append(
            tuple(bits @ np.asarray(row, dtype=np.int32) for row in sc.costs)
        )
    return masks, wt, profile


def _target_condition(sc_index, f1, f2, lam, scalarization, g_scaled, epsilon, h):
    (s1, s2), _ = lam.scaled
    if scalarization == "weighted_sum":
        threshold = math.ceil((1 - epsilon) * g_scaled)
        return s1 * f1.astype(np.int64) + s2 * f2.astype(np.int64) >= threshold
    threshold = math.floor((1 + epsilon) * g_scaled)
    dev = np.maximum(
        s1 * (h.values[0] - f1.astype(np.int64)),
        s2 * (h.values[1] - f2.astype(np.int64)),
    )
    return dev <= threshold


def target_sets(
    scenario_set: ScenarioSet,
    lam: LambdaVector,
    scalarization: Scalarization,
    value_table: OptimalValueTable,
    epsilon: Fraction = Fraction(0),
    h: ReferencePoint | None = None,
) -> list[np.ndarray]:
    """Per scenario: every feasible selection within the value tolerance.

    Selections are returned as integer masks with item i at bit i; the
    enumeration is exact integer arithmetic throughout.
    """
    inst = scenario_set.instance
    ell = inst.num_items
    if ell > _MAX_OPT_BITS:
        raise StructuralError(
            f"opt couplings enumerate target sets; {ell} items exceeds the "
            f"supported {_MAX_OPT_BITS}"
        )
    if scalarization == "chebyshev" and h is None:
        h = reference_point(scenario_set)
    (_, scale) = lam.scaled
    g_scaled = []
    for j in range(scenario_set.num_scenarios):
        g = value_table.value(j, lam, scalarization) * scale
        if g.denominator != 1:
            raise StructuralError("scaled optimal value must be integral")
        g_scaled.append(int(g))

    cached = _mask_profile(inst, scenario_set.scenarios)
    out = []
    if cached is not None:
        wt, profile = cached
        feas = wt <= inst.capacity
        for j in range(scenario_set.num_scenarios):
            f1, f2 = profile[j]
            cond = feas & _target_condition(
                j, f1, f2, lam, scalarization, g_scaled[j], epsilon, h
            )
            out.append(np.nonzero(cond)[0].astype(np.int64))
        return out

    collected = [[] for _ in range(scenario_set.num_scenarios)]
    for lo in range(0, 1 << ell, _CHUNK):
        hi = min(lo + _CHUNK, 1 << ell)
        masks, wt, profile = _chunked_masks(inst, scenario_set.scenarios, lo, hi)
        feas = wt <= inst.capacity
        for j in range(scenario_set.num_scenarios):
            f1, f2 = profile[j]
            cond = feas & _target_condition(
                j, f1, f2, lam, scalarization, g_scaled[j], epsilon, h
            )
            collected[j].append(masks[cond])
    return [np.concatenate(parts) for parts in collected]


def _mask_to_solution(mask: int, ell: int) -> Solution:
    return Solution(tuple((int(mask) >> i) & 1 for i in range(ell)))


def _solution_to_mask(sol: Solution) -> int:
    return sum(b << i for i, b in enumerate(sol.bits))


def _evaluate_candidate(x_mask: int, masks_per_scenario, agg):
    dists, sel = [], []
    for masks in masks_per_scenario:
        d = np.bitwise_count(np.bitwise_xor(masks, x_mask))
        k = int(d.argmin())
        sel.append(k)
        dists.append(int(d[k]))
    cost = max(dists) if agg == "center" else sum(dists)
    return cost, sel


def _search_opt(
    instance: KnapsackInstance,
    masks_per_scenario: list[np.ndarray],
    agg: Method,
    warm: list[int],
) -> tuple[int, int, list[int]]:
    """Exact minimum of the aggregate closest-target distance over feasible x.

    Depth-first search over item positions ordered by cross-target
    disagreement; per-scenario running distances to every target give the
    pruning bound.  Returns (cost, x mask, per-scenario target indices).
    """
    ell = instance.num_items
    m = len(masks_per_scenario)
    for j, masks in enumerate(masks_per_scenario):
        if len(masks) == 0:
            raise StructuralError(f"scenario {j} admits no recovery target")

    best_cost, best_mask, best_sel = None, None, None
    for cand in dict.fromkeys(warm):
        cost, sel = _evaluate_candidate(cand, masks_per_scenario, agg)
        if best_cost is None or cost < best_cost:
            best_cost, best_mask, best_sel = cost, cand, sel

    ones = [
        [int(((masks >> i) & 1).sum()) for i in range(ell)]
        for masks in masks_per_scenario
    ]
    sizes = [len(masks) for masks in masks_per_scenario]
    active = [
        i for i in range(ell) if any(ones[j][i] > 0 for j in range(m))
    ]
    active.sort(
        key=lambda i: (-sum(min(ones[j][i], sizes[j] - ones[j][i]) for j in range(m)), i)
    )
    n_active = len(active)

    seg_starts = np.cumsum([0] + sizes[:-1])
    dist = np.zeros(sum(sizes), dtype=np.int16)
    col = np.empty((n_active, 2, sum(sizes)), dtype=np.int16)
    for d, i in enumerate(active):
        parts0, parts1 = [], []
        for masks in masks_per_scenario:
            bit = ((masks >> i) & 1).astype(np.int16)
            parts0.append(bit)  # cost of setting x_i = 0
            parts1.append(1 - bit)  # cost of setting x_i = 1
        col[d, 0] = np.concatenate(parts0)
        col[d, 1] = np.concatenate(parts1)

    weights = instance.weights
    cap = instance.capacity
    x_bits = [0] * n_active
    use_max = agg == "center"

    def bound() -> int:
        mins = np.minimum.reduceat(dist, seg_starts)
        return int(mins.max()) if use_max else int(mins.sum())

    def record_leaf():
        nonlocal best_cost, best_mask, best_sel
        mins = np.minimum.reduceat(dist, seg_starts)
        cost = int(mins.max()) if use_max else int(mins.sum())
        if best_cost is not None and cost >= best_cost:
            return
        mask = 0
        for d, i in enumerate(active):
            if x_bits[d]:
                mask |= 1 << i
        sel = []
        for j in range(m):
            lo = int(seg_starts[j])
            hi = lo + sizes[j]
            sel.append(int(dist[lo:hi].argmin()))
        best_cost, best_mask, best_sel = cost, mask, sel

    def rec(depth: int, weight: int) -> None:
        if best_cost is not None and bound() >= best_cost:
            return
        if depth == n_active:
            record_leaf()
            return
        i = active[depth]
        for bit in (0, 1):
            if bit and weight + weights[i] > cap:
                continue
            x_bits[depth] = bit
            dist_delta = col[depth, bit]
            np.add(dist, dist_delta, out=dist)
            rec(depth + 1, weight + (weights[i] if bit else 0))
            np.subtract(dist, dist_delta, out=dist)
        x_bits[depth] = 0

    rec(0, 0)
    return best_cost, best_mask, best_sel


def _opt_point(
    scenario_set: ScenarioSet,
    lam: LambdaVector,
    scalarization: Scalarization,
    value_table: OptimalValueTable,
    epsilon: Fraction,
    method: Method,
    sampled: Sequence[Solution] | None,
    h: ReferencePoint | None,
) -> RobustPoint:
    inst = scenario_set.instance
    if scalarization == "chebyshev" and h is None:
        h = reference_point(scenario_set)
    if sampled is None:
        sampled = _sample_for_lambda(scenario_set, lam, scalarization, h)
    masks = target_sets(scenario_set, lam, scalarization, value_table, epsilon, h)
    warm = [_solution_to_mask(p) for p in sampled]
    median_x, _ = solve_median_fixed(inst, sampled)
    warm.append(_solution_to_mask(median_x))
    cost, x_mask, sel = _search_opt(inst, masks, method, warm)
    ell = inst.num_items
    recovered = tuple(
        _mask_to_solution(int(masks[j][sel[j]]), ell) for j in range(len(masks))
    )
    return RobustPoint(lam, _mask_to_solution(x_mask, ell), cost, recovered)


def _sample_for_lambda(scenario_set, lam, scalarization, h):
    inst = scenario_set.instance
    out = []
    for sc in scenario_set.scenarios:
        if scalarization == "weighted_sum":
            sol, _ = solve_weighted_sum(inst, sc, lam)
        else:
            sol, _ = solve_chebyshev(inst, sc, lam, h)
        out.append(sol)
    return out


def solve_center_opt(
    scenario_set: ScenarioSet,
    lam: LambdaVector,
    scalarization: Scalarization,
    value_table: OptimalValueTable,
    epsilon: Fraction = Fraction(0),
    *,
    sampled: Sequence[Solution] | None = None,
    h: ReferencePoint | None = None,
) -> RobustPoint:
    """Simultaneously choose the robust x and per-scenario recovery targets
    minimizing the worst-case distance, under the epsilon-relaxed optimality
    constraint on every target."""
    return _opt_point(
        scenario_set, lam, scalarization, value_table, epsilon, "center", sampled, h
    )


def solve_median_opt(
    scenario_set: ScenarioSet,
    lam: LambdaVector,
    scalarization: Scalarization,
    value_table: OptimalValueTable,
    epsilon: Fraction = Fraction(0),
    *,
    sampled: Sequence[Solution] | None = None,
    h: ReferencePoint | None = None,
) -> RobustPoint:
    """As :func:`solve_center_opt` with the summed distance objective."""
    return _opt_point(
        scenario_set, lam, scalarization, value_table, epsilon, "median", sampled, h
    )


# ---------------------------------------------------------------------------
# Tolerance sweeps: one pass per lambda, thresholds re-cut per epsilon
# ---------------------------------------------------------------------------


def _lambda_target_values(scenario_set, lam, scalarization, h):
    """Feasibility mask and per-scenario scalarized values of every mask."""
    cached = _mask_profile(scenario_set.instance, scenario_set.scenarios)
    if cached is None:
        return None
    wt, profile = cached
    (s1, s2), _ = lam.scaled
    feas = wt <= scenario_set.instance.capacity
    vals = []
    for j in range(scenario_set.num_scenarios):
        f1, f2 = profile[j]
        if scalarization == "weighted_sum":
            vals.append(s1 * f1.astype(np.int64) + s2 * f2.astype(np.int64))
        else:
            vals.append(
                np.maximum(
                    s1 * (h.values[0] - f1.astype(np.int64)),
                    s2 * (h.values[1] - f2.astype(np.int64)),
                )
            )
    return feas, vals


def _sweep_lambda_costs(
    scenario_set, lambdas, method, scalarization, eps_grid, samples, table, h, li
) -> list[int]:
    """Opt-coupling cost at one lambda for every tolerance, warm-chained."""
    inst = scenario_set.instance
    lam = lambdas[li]
    m = scenario_set.num_scenarios
    sampled = [samples[(j, li)] for j in range(m)]
    state = _lambda_target_values(scenario_set, lam, scalarization, h)
    (_, scale) = lam.scaled
    g_scaled = [int(table.value(j, lam, scalarization) * scale) for j in range(m)]
    base_warm = [_solution_to_mask(p) for p in sampled]
    median_x, _ = solve_median_fixed(inst, sampled)
    base_warm.append(_solution_to_mask(median_x))

    costs = []
    prev_mask = None
    for eps in eps_grid:
        if state is None:
            masks = target_sets(scenario_set, lam, scalarization, table, eps, h)
        else:
            feas, vals = state
            masks = []
            for j in range(m):
                if scalarization == "weighted_sum":
                    cond = feas & (vals[j] >= math.ceil((1 - eps) * g_scaled[j]))
                else:
                    cond = feas & (vals[j] <= math.floor((1 + eps) * g_scaled[j]))
                masks.append(np.nonzero(cond)[0].astype(np.int64))
        warm = list(base_warm)
        if prev_mask is not None:
            warm.append(prev_mask)
        cost, x_mask, _ = _search_opt(inst, masks, method, warm)
        costs.append(cost)
        prev_mask = x_mask
    return costs


def _sweep_worker(li: int) -> list[int]:
    payload = _WORKER_STATE["payload"]
    return _sweep_lambda_costs(*payload, li)


def sweep_opt_totals(
    scenario_set: ScenarioSet,
    lambdas: Sequence[LambdaVector],
    method: Method,
    scalarization: Scalarization,
    eps_grid: Sequence[Fraction],
    *,
    jobs: int = 1,
) -> list[int]:
    """Total opt-coupling recovery cost over the grid, per tolerance.

    Equivalent to running :func:`generate_robust_set` once per tolerance,
    but scalarized values are computed once per lambda and each tolerance
    starts from the previous optimum (feasible, since the admissible
    region only grows with the tolerance).
    """
    if not lambdas:
        raise StructuralError("lambda grid must be non-empty")
    samples, table = efficient_sample(scenario_set, lambdas, scalarization)
    h = reference_point(scenario_set) if scalarization == "chebyshev" else None
    args = (scenario_set, lambdas, method, scalarization, tuple(eps_grid),
            samples, table, h)
    if jobs <= 1 or len(lambdas) == 1:
        per_lambda = [
            _sweep_lambda_costs(*args, li) for li in range(len(lambdas))
        ]
    else:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(jobs, initializer=_init_worker, initargs=(args,)) as pool:
            per_lambda = pool.map(_sweep_worker, range(len(lambdas)))
    return [sum(costs[k] for costs in per_lambda) for k in range(len(eps_grid))]


# ---------------------------------------------------------------------------
# Robust-set generation over a lambda grid
# ---------------------------------------------------------------------------


def _point_for_lambda(
    scenario_set: ScenarioSet,
    lambdas: Sequence[LambdaVector],
    config: RecEffConfig,
    samples: Mapping[tuple[int, int], Solution],
    table: OptimalValueTable,
    h: ReferencePoint | None,
    li: int,
    solver: SolverConfig | None,
) -> RobustPoint:
    lam = lambdas[li]
    inst = scenario_set.instance
    points = [samples[(j, li)] for j in range(scenario_set.num_scenarios)]
    if config.coupling == "fixed":
        if config.method == "center":
            sol, cost = solve_center_fixed(inst, points, solver)
        else:
            sol, cost = solve_median_fixed(inst, points)
        return RobustPoint(lam, sol, cost)
    if config.method == "center":
        return solve_center_opt(
            scenario_set, lam, config.scalarization, table, config.epsilon,
            sampled=points, h=h,
        )
    return solve_median_opt(
        scenario_set, lam, config.scalarization, table, config.epsilon,
        sampled=points, h=h,
    )


_WORKER_STATE: dict = {}


def _init_worker(payload):
    _WORKER_STATE["payload"] = payload


def _worker(li: int) -> RobustPoint:
    scenario_set, lambdas, config, samples, table, h, solver = _WORKER_STATE["payload"]
    return _point_for_lambda(
        scenario_set, lambdas, config, samples, table, h, li, solver
    )


def generate_robust_set(
    scenario_set: ScenarioSet,
    lambdas: Sequence[LambdaVector],
    config: RecEffConfig,
    *,
    jobs: int = 1,
    solver: SolverConfig | None = None,
) -> RobustSet:
    """One robust point per lambda, in grid order.

    Scalarized optima and their values are sampled once; per-lambda solves
    are independent, so ``jobs`` workers may split the grid without
    affecting the result.
    """
    if not lambdas:
        raise StructuralError("lambda grid must be non-empty")
    samples, table = efficient_sample(scenario_set, lambdas, config.scalarization)
    h = (
        reference_point(scenario_set)
        if config.scalarization == "chebyshev"
        else None
    )
    points: list[RobustPoint] = []
    if jobs <= 1 or len(lambdas) == 1:
        for li in range(len(lambdas)):
            points.append(
                _run_point(scenario_set, lambdas, config, samples, table, h, li, solver)
            )
    else:
        import multiprocessing as mp

        payload = (scenario_set, lambdas, config, samples, table, h, solver)
        ctx = mp.get_context("fork") if hasattr(mp, "get_context") else mp
        with ctx.Pool(jobs, initializer=_init_worker, initargs=(payload,)) as pool:
            points = pool.map(_worker, range(len(lambdas)))
    return RobustSet(tuple(points), config)


def _run_point(scenario_set, lambdas, config, samples, table, h, li, solver):
    try:
        return _point_for_lambda(
            scenario_set, lambdas, config, samples, table, h, li, solver
        )
    except Exception as exc:
        lam = lambdas[li]
        exc.args = (f"lambda index {li} ({_format_lambda(lam)}): {exc}",)
        raise


def _format_lambda(lam: LambdaVector) -> str:
    return "(" + ", ".join(_format_weight(w) for w in lam.weights) + ")"


def _format_weight(w: Fraction) -> str:
    if 100 % w.denominator == 0:
        hundredths = w.numerator * (100 // w.denominator)
        return f"{hundredths // 100}.{hundredths % 100:02d}"
    return str(w)


# ---------------------------------------------------------------------------
# CSV dump
# ---------------------------------------------------------------------------


def robust_csv_rows(rs: RobustSet) -> list[str]:
    """``lambda1,lambda2,cost,bits`` plus recovered columns for opt sets."""
    m = len(rs.points[0].recovered) if rs.points[0].recovered else 0
    header = "lambda1,lambda2,cost,bits"
    if m:
        header += "," + ",".join(f"recovered_{j}" for j in range(m))
    rows = [header]
    for p in rs.points:
        cells = [
            _format_weight(p.lam.weights[0]),
            _format_weight(p.lam.weights[1]),
            str(p.cost),
            p.robust_solution.as_string(),
        ]
        if p.recovered:
            cells.extend(sol.as_string() for sol in p.recovered)
        rows.append(",".join(cells))
    return rows


def write_robust_csv(path, rs: RobustSet) -> None:
    from pathlib import Path

    Path(path).write_text("\n".join(robust_csv_rows(rs)) + "\n", encoding="ascii")
