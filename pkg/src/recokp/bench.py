"""Seeded benchmark instances, the lambda grid, and experiment runners.

Instance generation is reproducible across machines: weights come from a
PCG64 stream keyed by (seed, 0) and scenario k's costs from a PCG64 stream
keyed by (seed, k+1), all values drawn uniformly from the inclusive cost
range.  The capacity is half the total weight, rounded up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .frontier import LambdaVector, Scalarization, pareto_front
from .model import (
    KnapsackInstance,
    ScenarioCosts,
    ScenarioSet,
    StructuralError,
    evaluate,
)
from .recovery import (
    Method,
    RecEffConfig,
    RobustSet,
    generate_robust_set,
    sweep_opt_totals,
    total_recovery_cost,
)

DEFAULT_EPS_GRID = tuple(Fraction(k, 1000) for k in range(11))

_SCAL_SHORT = {"weighted_sum": "ws", "chebyshev": "cheb"}


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one random benchmark instance."""

    num_items: int
    num_scenarios: int = 10
    num_objectives: int = 2
    cost_low: int = 10
    cost_high: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.num_items < 1 or self.num_scenarios < 1:
            raise StructuralError("num_items and num_scenarios must be positive")
        if not 1 <= self.cost_low <= self.cost_high:
            raise StructuralError("need 1 <= cost_low <= cost_high")
        if not 0 <= self.seed < 1 << 64:
            raise StructuralError("seed must fit in 64 bits")


def generate(spec: GenSpec) -> ScenarioSet:
    """Deterministic random instance; identical spec gives identical bytes."""
    weights_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, 0])))
    weights = tuple(
        int(v)
        for v in weights_rng.integers(
            spec.cost_low, spec.cost_high, size=spec.num_items, endpoint=True
        )
    )
    capacity = (sum(weights) + 1) // 2
    instance = KnapsackInstance(spec.num_items, weights, capacity)
    scenarios = []
    for k in range(spec.num_scenarios):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, k + 1])))
        rows = tuple(
            tuple(
                int(v)
                for v in rng.integers(
                    spec.cost_low, spec.cost_high, size=spec.num_items, endpoint=True
                )
            )
            for _ in range(spec.num_objectives)
        )
        scenarios.append(ScenarioCosts(rows))
    return ScenarioSet(instance, tuple(scenarios))


def lambda_grid() -> tuple[LambdaVector, ...]:
    """The 101-point grid (0.01*k, 1 - 0.01*k) for k = 0..100."""
    return tuple(LambdaVector.from_hundredths((k, 100 - k)) for k in range(101))


# ---------------------------------------------------------------------------
# Reported deviations
# ---------------------------------------------------------------------------


def percent_deviation(cost_a: int, cost_b: int) -> str:
    """(cost_a - cost_b) / cost_b * 100, half-up to two decimals.

    A zero denominator (both costs zero) reports 0.00.
    """
    if cost_a < cost_b:
        raise StructuralError("deviation expects cost_a >= cost_b")
    if cost_b == 0:
        return "0.00"
    hundredths = Fraction(100 * 100 * (cost_a - cost_b), cost_b)
    n = hundredths.numerator // hundredths.denominator
    if 2 * (hundredths - n) >= 1:
        n += 1
    return f"{n // 100}.{n % 100:02d}"


@dataclass(frozen=True)
class CompareRow:
    """One line of the fixed-vs-opt comparison tables."""

    num_items: int
    instance_label: str
    method: Method
    scalarization: Scalarization
    cost_fixed: int
    cost_opt: int
    pct_dev: str


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[CompareRow, ...]
    seed: Optional[int] = None


def compare_couplings(
    scenario_set: ScenarioSet,
    method: Method,
    scalarization: Scalarization,
    lambdas: Sequence[LambdaVector] | None = None,
    *,
    instance_label: str = "1",
    jobs: int = 1,
) -> CompareRow:
    """Total fixed vs opt recovery cost over the grid, with the deviation."""
    lams = tuple(lambdas) if lambdas is not None else lambda_grid()
    fixed = generate_robust_set(
        scenario_set, lams, RecEffConfig(method, "fixed", Fraction(0), scalarization),
        jobs=jobs,
    )
    opt = generate_robust_set(
        scenario_set, lams, RecEffConfig(method, "opt", Fraction(0), scalarization),
        jobs=jobs,
    )
    cost_fixed = total_recovery_cost(fixed)
    cost_opt = total_recovery_cost(opt)
    return CompareRow(
        scenario_set.instance.num_items,
        instance_label,
        method,
        scalarization,
        cost_fixed,
        cost_opt,
        percent_deviation(cost_fixed, cost_opt),
    )


def report_csv_rows(report: ExperimentReport) -> list[str]:
    rows = ["l,inst,method,scalarization,cost_fixed,cost_opt,pct_dev"]
    for r in report.rows:
        rows.append(
            f"{r.num_items},{r.instance_label},{r.method},"
            f"{_SCAL_SHORT[r.scalarization]},{r.cost_fixed},{r.cost_opt},{r.pct_dev}"
        )
    return rows


# ---------------------------------------------------------------------------
# Tolerance sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    epsilon: Fraction
    total_cost: int
    deviation: Fraction


def epsilon_sweep(
    scenario_set: ScenarioSet,
    method: Method,
    scalarization: Scalarization,
    eps_grid: Sequence[Fraction] = DEFAULT_EPS_GRID,
    lambdas: Sequence[LambdaVector] | None = None,
    *,
    jobs: int = 1,
) -> list[SweepRow]:
    """Opt-coupling totals v(eps) and deviations (v(0)-v(eps))/v(0)."""
    lams = tuple(lambdas) if lambdas is not None else lambda_grid()
    totals = sweep_opt_totals(
        scenario_set, lams, method, scalarization, eps_grid, jobs=jobs
    )
    v0 = totals[0]
    rows = []
    for eps, v in zip(eps_grid, totals):
        dev = Fraction(v0 - v, v0) if v0 > 0 else Fraction(0)
        rows.append(SweepRow(eps, v, dev))
    return rows


def _format_fraction_decimal(x: Fraction, places: int) -> str:
    scaled = x * 10**places
    n = scaled.numerator // scaled.denominator
    if 2 * (scaled - n) >= 1:
        n += 1
    whole, frac = divmod(n, 10**places)
    return f"{whole}.{frac:0{places}d}"


def sweep_csv_rows(rows: Sequence[SweepRow]) -> list[str]:
    out = ["epsilon,v,deviation"]
    for r in rows:
        out.append(
            f"{_format_fraction_decimal(r.epsilon, 3)},{r.total_cost},"
            f"{_format_fraction_decimal(r.deviation, 6)}"
        )
    return out


# ---------------------------------------------------------------------------
# Nominal projection (the data behind the robust-set scatter plots)
# ---------------------------------------------------------------------------


def set_label(rs: RobustSet) -> str:
    c = rs.config
    return f"{c.method}_{c.coupling}_{_SCAL_SHORT[c.scalarization]}"


def nominal_projection(
    scenario_set: ScenarioSet, robust_sets: Sequence[RobustSet]
) -> list[str]:
    """CSV rows projecting every set into the nominal objective space.

    Emits the nominal scenario's efficient set first, then each robust
    set's solutions evaluated under the nominal costs.  With no robust
    sets there is nothing to compare and only the header is emitted.
    """
    rows = ["series,f1_nominal,f2_nominal,bits"]
    if not robust_sets:
        return rows
    nominal = scenario_set.nominal
    front = pareto_front(scenario_set.instance, nominal)
    for vec, sol in front.entries:
        rows.append(f"nominal,{vec.values[0]},{vec.values[1]},{sol.as_string()}")
    for rs in robust_sets:
        label = set_label(rs)
        for p in rs.points:
            vec = evaluate(nominal, p.robust_solution)
            rows.append(
                f"{label},{vec.values[0]},{vec.values[1]},{p.robust_solution.as_string()}"
            )
    return rows


def scalarization_annotation(report: ExperimentReport) -> str | None:
    """Average reported deviation per scalarization, when both are present.

    Informational only: weighted sum typically shows the smaller gap, but
    no per-instance guarantee exists, so nothing is asserted.
    """
    sums: dict[str, list] = {}
    for r in report.rows:
        sums.setdefault(r.scalarization, []).append(Fraction(r.pct_dev))
    if len(sums) < 2:
        return None
    parts = []
    for scal in ("weighted_sum", "chebyshev"):
        devs = sums[scal]
        parts.append(
            f"{_SCAL_SHORT[scal]}={_format_fraction_decimal(sum(devs) / len(devs), 2)}"
        )
    return "average pct_dev by scalarization: " + ", ".join(parts)
