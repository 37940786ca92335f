"""Core domain types for uncertain bi-objective knapsack instances.

An instance fixes the deterministic structure (item weights, capacity);
each scenario supplies one realization of the objective coefficients.
All types are immutable after construction and safe to share across
workers; the operations below are pure functions on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class StructuralError(ValueError):
    """Raised when inputs have inconsistent dimensions or invalid entries."""


@dataclass(frozen=True)
class KnapsackInstance:
    """Item weights and a single capacity shared by every scenario."""

    num_items: int
    weights: tuple[int, ...]
    capacity: int

    def __post_init__(self):
        if self.num_items < 1:
            raise StructuralError("num_items must be positive")
        if len(self.weights) != self.num_items:
            raise StructuralError(
                f"expected {self.num_items} weights, got {len(self.weights)}"
            )
        if any(w < 1 for w in self.weights):
            raise StructuralError("weights must be >= 1")
        if self.capacity < 0:
            raise StructuralError("capacity must be non-negative")


@dataclass(frozen=True)
class ScenarioCosts:
    """One cost matrix: row i holds the coefficients of objective i."""

    costs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.costs) < 1:
            raise StructuralError("at least one objective row required")
        width = len(self.costs[0])
        for row in self.costs:
            if len(row) != width:
                raise StructuralError("cost rows must have equal length")
            if any(c < 1 for c in row):
                raise StructuralError("costs must be >= 1")

    @property
    def num_objectives(self) -> int:
        return len(self.costs)

    @property
    def num_items(self) -> int:
        return len(self.costs[0])


@dataclass(frozen=True)
class ScenarioSet:
    """A finite sample of cost scenarios over one knapsack instance."""

    instance: KnapsackInstance
    scenarios: tuple[ScenarioCosts, ...]
    nominal_index: int = 0

    def __post_init__(self):
        if len(self.scenarios) < 1:
            raise StructuralError("at least one scenario required")
        n = self.scenarios[0].num_objectives
        for sc in self.scenarios:
            if sc.num_objectives != n:
                raise StructuralError("scenarios disagree on objective count")
            if sc.num_items != self.instance.num_items:
                raise StructuralError("scenario width does not match instance")
        if not 0 <= self.nominal_index < len(self.scenarios):
            raise StructuralError("nominal_index out of range")

    @property
    def num_scenarios(self) -> int:
        return len(self.scenarios)

    @property
    def num_objectives(self) -> int:
        return self.scenarios[0].num_objectives

    @property
    def nominal(self) -> ScenarioCosts:
        return self.scenarios[self.nominal_index]


@dataclass(frozen=True)
class Solution:
    """An item-selection vector; bits[j] == 1 means item j is packed."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise StructuralError("solution bits must be 0 or 1")

    @classmethod
    def from_string(cls, s: str) -> "Solution":
        return cls(tuple(int(ch) for ch in s))

    def as_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class ObjectiveVector:
    """Objective values of one solution under one scenario."""

    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)


def is_feasible(instance: KnapsackInstance, x: Solution) -> bool:
    """True iff the selected items fit the capacity."""
    if len(x.bits) != instance.num_items:
        raise StructuralError("solution length does not match instance")
    total = sum(w for w, b in zip(instance.weights, x.bits) if b)
    return total <= instance.capacity


def solution_weight(instance: KnapsackInstance, x: Solution) -> int:
    if len(x.bits) != instance.num_items:
        raise StructuralError("solution length does not match instance")
    return sum(w for w, b in zip(instance.weights, x.bits) if b)


def evaluate(scenario: ScenarioCosts, x: Solution) -> ObjectiveVector:
    """Exact objective vector of x under the given cost realization."""
    if len(x.bits) != scenario.num_items:
        raise StructuralError("solution length does not match cost matrix")
    return ObjectiveVector(
        tuple(sum(c for c, b in zip(row, x.bits) if b) for row in scenario.costs)
    )


def hamming(x: Solution, y: Solution) -> int:
    """Number of positions where the two selections differ."""
    if len(x.bits) != len(y.bits):
        raise StructuralError("solutions have different lengths")
    return sum(a != b for a, b in zip(x.bits, y.bits))


def dominates(u: ObjectiveVector, v: ObjectiveVector) -> bool:
    """True iff u is componentwise >= v with at least one strict inequality.

    Maximization sense throughout: larger objective values are better.
    """
    if len(u.values) != len(v.values):
        raise StructuralError("objective vectors have different lengths")
    return all(a >= b for a, b in zip(u.values, v.values)) and any(
        a > b for a, b in zip(u.values, v.values)
    )


# ---------------------------------------------------------------------------
# Instance/scenario text format: line 1 `l n m W`; line 2 the l weights;
# then m blocks of n lines, each holding l cost integers.
# ---------------------------------------------------------------------------


def write_scenario_set(ss: ScenarioSet, path: str | Path) -> None:
    """Persist a scenario set in the line-oriented text format."""
    inst = ss.instance
    lines = [
        f"{inst.num_items} {ss.num_objectives} {ss.num_scenarios} {inst.capacity}",
        " ".join(str(w) for w in inst.weights),
    ]
    for sc in ss.scenarios:
        for row in sc.costs:
            lines.append(" ".join(str(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_scenario_set(path: str | Path) -> ScenarioSet:
    """Parse the text format written by :func:`write_scenario_set`."""
    tokens = Path(path).read_text(encoding="ascii").split()
    try:
        ints = [int(t) for t in tokens]
    except ValueError as exc:
        raise StructuralError(f"non-integer token in {path}: {exc}") from None
    if len(ints) < 4:
        raise StructuralError(f"truncated instance file {path}")
    ell, n, m, cap = ints[:4]
    expected = 4 + ell + m * n * ell
    if len(ints) != expected:
        raise StructuralError(
            f"instance file {path} has {len(ints)} tokens, expected {expected}"
        )
    pos = 4
    weights = tuple(ints[pos : pos + ell])
    pos += ell
    instance = KnapsackInstance(ell, weights, cap)
    scenarios = []
    for _ in range(m):
        rows = []
        for _ in range(n):
            rows.append(tuple(ints[pos : pos + ell]))
            pos += ell
        scenarios.append(ScenarioCosts(tuple(rows)))
    return ScenarioSet(instance, tuple(scenarios))
