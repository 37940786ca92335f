"""Exact 0-1 linear programming kernel.

Models hold binary decision variables plus continuous auxiliaries that are
*determined* by the binaries (each continuous variable is only ever bounded
from below by linear expressions in the binaries, as in min-max distance
models).  Solving is branch-and-bound over the binaries with LP relaxation
bounds; incumbents are re-verified in exact rational arithmetic, so an
``optimal`` status certifies global optimality.

Bound comparisons apply a relative safety margin on the admissible side;
when a model declares its optimal value integral, dual bounds are rounded
up to the next integer, which is usually what closes the gap.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .model import StructuralError

Number = int | Fraction

_INT_TOL = 1e-6  # relaxation solution considered integral
_REL_MARGIN = 1e-9  # admissible-side safety margin on LP bounds

RELATIONS = ("<=", "=", ">=")


class SolverLimitError(RuntimeError):
    """Node or time budget exhausted before optimality was certified."""


def _as_number(v) -> Number:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
        raise StructuralError(f"coefficients must be int or Fraction, got {v!r}")
    return v


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Number, ...]
    relation: str
    rhs: Number

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise StructuralError(f"unknown relation {self.relation!r}")
        for c in self.coeffs:
            _as_number(c)
        _as_number(self.rhs)


@dataclass(frozen=True)
class MilpModel:
    """A 0-1 program: binaries first, then determined continuous variables.

    ``objective_integral`` asserts that the optimal objective value is an
    integer (true e.g. when the objective counts Hamming distances); the
    solver then prunes with integer-rounded dual bounds.
    """

    num_binary: int
    num_continuous: int
    sense: str
    objective: tuple[Number, ...]
    constraints: tuple[Constraint, ...]
    continuous_bounds: tuple[tuple[Number, Optional[Number]], ...] = ()
    names: Optional[tuple[str, ...]] = None
    objective_integral: bool = False

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise StructuralError(f"sense must be min or max, got {self.sense!r}")
        n = self.num_binary + self.num_continuous
        if len(self.objective) != n:
            raise StructuralError("objective length does not match variable count")
        for c in self.objective:
            _as_number(c)
        for con in self.constraints:
            if len(con.coeffs) != n:
                raise StructuralError("constraint length does not match variable count")
        if len(self.continuous_bounds) != self.num_continuous:
            raise StructuralError("one bounds pair required per continuous variable")
        if self.names is not None and len(self.names) != n:
            raise StructuralError("one name required per variable")

    @property
    def num_variables(self) -> int:
        return self.num_binary + self.num_continuous

    def variable_names(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        return tuple(
            [f"x{i}" for i in range(self.num_binary)]
            + [f"t{j}" for j in range(self.num_continuous)]
        )


@dataclass(frozen=True)
class MilpSolution:
    assignment: tuple
    objective_value: Optional[Fraction]
    status: str
    nodes: int = 0


@dataclass(frozen=True)
class SolverConfig:
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    warm_start: Optional[tuple[int, ...]] = None


# ---------------------------------------------------------------------------
# Canonical form: every row scaled to integer coefficients.  Inequality rows
# over binaries only also get an integer right-hand side (floor/ceil), which
# is exact for 0-1 assignments and tightens the relaxation.
# ---------------------------------------------------------------------------


@dataclass
class _CanonicalRow:
    coeffs: np.ndarray  # int64, full variable length
    relation: str
    rhs: Number  # int when the row touches binaries only
    touches_continuous: bool


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _canonical_rows(model: MilpModel) -> tuple[list[_CanonicalRow], bool]:
    """Scale each row to integer coefficients; returns (rows, infeasible)."""
    nb = model.num_binary
    rows: list[_CanonicalRow] = []
    for con in model.constraints:
        scale = 1
        for c in (*con.coeffs, con.rhs):
            if isinstance(c, Fraction):
                scale = _lcm(scale, c.denominator)
        coeffs = np.array([int(c * scale) for c in con.coeffs], dtype=np.int64)
        rhs: Number = con.rhs * scale
        touches = bool(np.any(coeffs[nb:] != 0))
        if not touches:
            if con.relation == "<=":
                rhs = math.floor(rhs)
            elif con.relation == ">=":
                rhs = math.ceil(rhs)
            else:
                if isinstance(rhs, Fraction) and rhs.denominator != 1:
                    return [], True  # integer lhs can never equal it
                rhs = int(rhs)
        rows.append(_CanonicalRow(coeffs, con.relation, rhs, touches))
    return rows, False


# ---------------------------------------------------------------------------
# Determined continuous variables
# ---------------------------------------------------------------------------


@dataclass
class _ContinuousPlan:
    """Per continuous variable: rows that bound it below, as (expr, divisor).

    A row ``a.x + g*v <= r`` with g < 0 lower-bounds v by (a.x - r)/(-g);
    a row ``a.x + g*v >= r`` with g > 0 lower-bounds v by (r - a.x)/g.
    """

    lower_rows: list[tuple[np.ndarray, Number, int]]  # (bin coeffs, const, divisor)
    lo: Number
    hi: Optional[Number]
    obj_coeff: Number


def _plan_continuous(model: MilpModel, rows: list[_CanonicalRow]) -> list[_ContinuousPlan]:
    nb, nc = model.num_binary, model.num_continuous
    if nc == 0:
        return []
    min_sense = model.sense == "min"
    plans = []
    for j in range(nc):
        col = nb + j
        obj = model.objective[col] if min_sense else -model.objective[col]
        if obj < 0:
            raise StructuralError(
                "continuous variables must not improve the objective unboundedly; "
                f"variable {j} has a negative objective coefficient in min sense"
            )
        lo, hi = model.continuous_bounds[j]
        plans.append(_ContinuousPlan([], lo, hi, obj))
    for row in rows:
        if not row.touches_continuous:
            continue
        cols = np.nonzero(row.coeffs[nb:])[0]
        if len(cols) != 1:
            raise StructuralError("a constraint may involve at most one continuous variable")
        j = int(cols[0])
        g = int(row.coeffs[nb + j])
        bin_part = row.coeffs[:nb].copy()
        if row.relation == "<=" and g < 0:
            # v >= (bin.x - rhs) / (-g)
            plans[j].lower_rows.append((bin_part, -row.rhs, -g))
        elif row.relation == ">=" and g > 0:
            # v >= (rhs - bin.x) / g
            plans[j].lower_rows.append((-bin_part, row.rhs, g))
        else:
            raise StructuralError(
                "continuous variables may only be bounded below by the constraints"
            )
    return plans


def _resolve_continuous(plans: list[_ContinuousPlan], bits: Sequence[int]):
    """Exact minimal feasible values of the continuous variables, or None."""
    values = []
    barr = np.asarray(bits, dtype=np.int64)
    for plan in plans:
        v = Fraction(plan.lo)
        for coeffs, const, divisor in plan.lower_rows:
            cand = Fraction(int(coeffs @ barr) + Fraction(const), divisor)
            if cand > v:
                v = cand
        if plan.hi is not None and v > plan.hi:
            return None
        values.append(v)
    return values


def _check_and_value(model, rows, plans, bits):
    """Exact feasibility check of a binary assignment; returns (value, cont)."""
    cont = _resolve_continuous(plans, bits)
    if cont is None:
        return None
    barr = np.asarray(bits, dtype=np.int64)
    nb = model.num_binary
    for row in rows:
        lhs = Fraction(int(row.coeffs[:nb] @ barr))
        for j, v in enumerate(cont):
            g = int(row.coeffs[nb + j])
            if g:
                lhs += g * v
        if row.relation == "<=" and not lhs <= row.rhs:
            return None
        if row.relation == ">=" and not lhs >= row.rhs:
            return None
        if row.relation == "=" and lhs != row.rhs:
            return None
    value = Fraction(0)
    for i in range(nb):
        if bits[i]:
            value += model.objective[i]
    for j, v in enumerate(cont):
        value += model.objective[nb + j] * v
    return value, cont


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------


def _lp_arrays(model: MilpModel, rows: list[_CanonicalRow]):
    n = model.num_variables
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in rows:
        coeffs = row.coeffs.astype(np.float64)
        rhs = float(row.rhs)
        if row.relation == "<=":
            a_ub.append(coeffs)
            b_ub.append(rhs)
        elif row.relation == ">=":
            a_ub.append(-coeffs)
            b_ub.append(-rhs)
        else:
            a_eq.append(coeffs)
            b_eq.append(rhs)
    pack = lambda rows_, b_: (
        (np.array(rows_), np.array(b_)) if rows_ else (None, None)
    )
    return pack(a_ub, b_ub) + pack(a_eq, b_eq)


def solve_exact(model: MilpModel, config: SolverConfig | None = None) -> MilpSolution:
    """Globally optimal solution by LP-based branch-and-bound.

    Branching picks the most fractional binary (ties: lowest index); node
    selection is best-bound (ties: depth, then insertion order).  Raises
    :class:`SolverLimitError` when a node or time limit is hit, never
    returning a silently suboptimal answer.
    """
    config = config or SolverConfig()
    rows, infeasible = _canonical_rows(model)
    if infeasible:
        return MilpSolution((), None, "infeasible", 0)
    plans = _plan_continuous(model, rows)
    nb, nc = model.num_binary, model.num_continuous

    if nb == 0:
        checked = _check_and_value(model, rows, plans, ())
        if checked is None:
            return MilpSolution((), None, "infeasible", 0)
        value, cont = checked
        return MilpSolution(tuple(cont), value, "optimal", 0)

    min_sense = model.sense == "min"

    def exact_value(bits):
        checked = _check_and_value(model, rows, plans, bits)
        if checked is None:
            return None
        value, cont = checked
        return (value if min_sense else -value), cont  # min-space value

    incumbent_bits = None
    incumbent_cont = None
    incumbent_val = None  # Fraction in min space
    if config.warm_start is not None:
        if len(config.warm_start) != nb:
            raise StructuralError("warm start length does not match binary count")
        checked = exact_value(config.warm_start)
        if checked is not None:
            incumbent_val, incumbent_cont = checked
            incumbent_bits = tuple(config.warm_start)

    c = np.array([float(v) for v in model.objective], dtype=np.float64)
    if not min_sense:
        c = -c
    a_ub, b_ub, a_eq, b_eq = _lp_arrays(model, rows)
    base_bounds = np.empty((model.num_variables, 2))
    base_bounds[:nb] = (0.0, 1.0)
    for j in range(nc):
        lo, hi = model.continuous_bounds[j]
        base_bounds[nb + j] = (float(lo), np.inf if hi is None else float(hi))

    def node_bound(fun: float):
        lb = fun - _REL_MARGIN * (abs(fun) + 1.0)
        if model.objective_integral:
            return Fraction(math.ceil(lb))
        return Fraction(lb)

    start = time.monotonic()
    counter = 0
    nodes = 0
    heap = []
    root_fix = np.full(nb, -1, dtype=np.int8)  # -1 free, else fixed value
    heapq.heappush(heap, (-math.inf, 0, counter, root_fix))

    while heap:
        bound_est, depth, _, fixings = heapq.heappop(heap)
        if incumbent_val is not None and bound_est != -math.inf:
            if Fraction(bound_est) >= incumbent_val:
                continue
        if config.node_limit is not None and nodes >= config.node_limit:
            raise SolverLimitError(f"node limit {config.node_limit} exceeded")
        if config.time_limit is not None and time.monotonic() - start > config.time_limit:
            raise SolverLimitError(f"time limit {config.time_limit}s exceeded")
        nodes += 1

        bounds = base_bounds.copy()
        fixed = fixings >= 0
        bounds[:nb][fixed, 0] = fixings[fixed]
        bounds[:nb][fixed, 1] = fixings[fixed]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=bounds, method="highs")
        if res.status == 2:
            continue
        if res.status != 0:
            raise RuntimeError(f"LP relaxation failed with status {res.status}")
        lb = node_bound(res.fun)
        if incumbent_val is not None and lb >= incumbent_val:
            continue

        xb = res.x[:nb]
        frac = np.abs(xb - np.round(xb))
        if np.all(frac <= _INT_TOL):
            bits = tuple(int(round(v)) for v in xb)
            checked = exact_value(bits)
            if checked is not None:
                value, cont = checked
                if incumbent_val is None or value < incumbent_val:
                    incumbent_val, incumbent_bits, incumbent_cont = value, bits, cont
                continue
            # Exact check can only fail through the LP integrality tolerance;
            # fall through and branch on the first free binary.
            free = np.nonzero(~fixed)[0]
            if len(free) == 0:
                continue
            branch_var = int(free[0])
        else:
            candidates = np.nonzero(frac > _INT_TOL)[0]
            branch_var = int(candidates[np.argmin(np.abs(xb[candidates] - 0.5))])

        for value in (0, 1):
            child = fixings.copy()
            child[branch_var] = value
            counter += 1
            heapq.heappush(heap, (float(lb), depth + 1, counter, child))

    if incumbent_bits is None:
        return MilpSolution((), None, "infeasible", nodes)
    value = incumbent_val if min_sense else -incumbent_val
    return MilpSolution(
        incumbent_bits + tuple(incumbent_cont), value, "optimal", nodes
    )


def brute_force(model: MilpModel) -> MilpSolution:
    """Exhaustive enumeration oracle for models with at most 25 binaries.

    Continuous auxiliaries are resolved to their minimal feasible values.
    Ties are broken toward the lowest enumeration index (variable 0 is the
    least significant bit).
    """
    nb = model.num_binary
    if nb > 25:
        raise StructuralError(f"brute force limited to 25 binaries, got {nb}")
    rows, infeasible = _canonical_rows(model)
    if infeasible:
        return MilpSolution((), None, "infeasible", 0)
    plans = _plan_continuous(model, rows)
    min_sense = model.sense == "min"

    if nb == 0:
        checked = _check_and_value(model, rows, plans, ())
        if checked is None:
            return MilpSolution((), None, "infeasible", 0)
        value, cont = checked
        return MilpSolution(tuple(cont), value, "optimal", 0)

    bin_rows = [r for r in rows if not r.touches_continuous]
    a = (
        np.array([r.coeffs[:nb] for r in bin_rows], dtype=np.int64)
        if bin_rows
        else np.zeros((0, nb), dtype=np.int64)
    )
    relations = [r.relation for r in bin_rows]
    rhs = np.array([int(r.rhs) for r in bin_rows], dtype=np.int64)

    best_val = None
    best_bits = None
    best_cont = None
    chunk = 1 << 18
    shifts = np.arange(nb, dtype=np.uint32)
    for lo in range(0, 1 << nb, chunk):
        hi = min(lo + chunk, 1 << nb)
        ids = np.arange(lo, hi, dtype=np.uint32)
        bits = ((ids[:, None] >> shifts) & 1).astype(np.int64)
        ok = np.ones(len(ids), dtype=bool)
        if len(bin_rows):
            lhs = bits @ a.T
            for k, rel in enumerate(relations):
                if rel == "<=":
                    ok &= lhs[:, k] <= rhs[k]
                elif rel == ">=":
                    ok &= lhs[:, k] >= rhs[k]
                else:
                    ok &= lhs[:, k] == rhs[k]
        for idx in np.nonzero(ok)[0]:
            cand = tuple(int(b) for b in bits[idx])
            checked = _check_and_value(model, rows, plans, cand)
            if checked is None:
                continue
            value, cont = checked
            key = value if min_sense else -value
            if best_val is None or key < best_val:
                best_val, best_bits, best_cont = key, cand, cont
    if best_bits is None:
        return MilpSolution((), None, "infeasible", 0)
    value = best_val if min_sense else -best_val
    return MilpSolution(best_bits + tuple(best_cont), value, "optimal", 0)


# ---------------------------------------------------------------------------
# LP file export / parse
# ---------------------------------------------------------------------------


def _format_number(v: Number) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        den = v.denominator
        for p in (2, 5):
            while den % p == 0:
                den //= p
        if den != 1:
            raise ValueError(f"{v} has no finite decimal expansion for LP export")
        from decimal import Decimal

        return str(Decimal(v.numerator) / Decimal(v.denominator))
    return str(v)


def _format_terms(coeffs: Sequence[Number], names: Sequence[str]) -> str:
    terms = []
    for c, name in zip(coeffs, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        terms.append((sign, f"{_format_number(abs(c))} {name}"))
    if not terms:
        return "0 " + names[0]
    parts = [("" if terms[0][0] == "+" else "- ") + terms[0][1]]
    for sign, body in terms[1:]:
        parts.append(f"{sign} {body}")
    return " ".join(parts)


def export_lp(model: MilpModel) -> str:
    """Render the model in LP file format (Subject To / Bounds / Binary)."""
    names = model.variable_names()
    nb = model.num_binary
    out = ["Maximize" if model.sense == "max" else "Minimize"]
    out.append(f" obj: {_format_terms(model.objective, names)}")
    out.append("Subject To")
    for k, con in enumerate(model.constraints):
        rel = {"<=": "<=", ">=": ">=", "=": "="}[con.relation]
        out.append(
            f" c{k}: {_format_terms(con.coeffs, names)} {rel} {_format_number(con.rhs)}"
        )
    out.append("Bounds")
    for j in range(model.num_continuous):
        lo, hi = model.continuous_bounds[j]
        name = names[nb + j]
        if hi is None:
            out.append(f" {_format_number(lo)} <= {name}")
        else:
            out.append(f" {_format_number(lo)} <= {name} <= {_format_number(hi)}")
    out.append("Binary")
    for i in range(nb):
        out.append(f" {names[i]}")
    out.append("End")
    return "\n".join(out) + "\n"


def _parse_number(tok: str) -> Number:
    if "." in tok or "e" in tok or "E" in tok:
        return Fraction(tok)
    return int(tok)


def parse_lp(text: str) -> MilpModel:
    """Parse the LP subset produced by :func:`export_lp`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] not in ("Maximize", "Minimize"):
        raise StructuralError("LP file must start with Maximize or Minimize")
    sense = "max" if lines[0] == "Maximize" else "min"
    sections: dict[str, list[str]] = {"objective": [], "Subject To": [], "Bounds": [], "Binary": []}
    current = "objective"
    for ln in lines[1:]:
        if ln in ("Subject To", "Bounds", "Binary"):
            current = ln
            continue
        if ln == "End":
            break
        sections[current].append(ln)

    def parse_expr(expr: str) -> dict[str, Number]:
        toks = expr.replace("+", " + ").replace("-", " - ").split()
        coeffs: dict[str, Number] = {}
        sign = 1
        pending: Number | None = None
        for tok in toks:
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            elif tok[0].isdigit() or tok[0] == ".":
                pending = _parse_number(tok)
            else:
                c = pending if pending is not None else 1
                coeffs[tok] = coeffs.get(tok, 0) + sign * c
                sign, pending = 1, None
        return coeffs

    obj_line = " ".join(sections["objective"])
    obj_expr = parse_expr(obj_line.split(":", 1)[1])

    raw_cons = []
    var_order: list[str] = []
    seen = set()

    def note_vars(d):
        for v in d:
            if v not in seen:
                seen.add(v)
                var_order.append(v)

    note_vars(obj_expr)
    for ln in sections["Subject To"]:
        body = ln.split(":", 1)[1].strip()
        for rel in ("<=", ">=", "="):
            if f" {rel} " in body:
                lhs, rhs = body.split(f" {rel} ")
                expr = parse_expr(lhs)
                note_vars(expr)
                raw_cons.append((expr, rel, _parse_number(rhs.strip())))
                break
        else:
            raise StructuralError(f"constraint without relation: {ln}")

    binaries = [ln.strip() for ln in sections["Binary"]]
    bounds: dict[str, tuple[Number, Optional[Number]]] = {}
    bounds_order: list[str] = []
    for ln in sections["Bounds"]:
        toks = ln.split()
        if len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
            name = toks[2]
            bounds[name] = (_parse_number(toks[0]), _parse_number(toks[4]))
        elif len(toks) == 3 and toks[1] == "<=":
            name = toks[2]
            bounds[name] = (_parse_number(toks[0]), None)
        else:
            raise StructuralError(f"unsupported bounds line: {ln}")
        bounds_order.append(name)

    # The Binary and Bounds sections declare every variable in index order;
    # expression-only names (foreign files) are appended as continuous.
    bin_set = set(binaries)
    declared = set(binaries) | set(bounds_order)
    ordered = (
        list(binaries)
        + [v for v in bounds_order if v not in bin_set]
        + [v for v in var_order if v not in declared]
    )
    index = {v: k for k, v in enumerate(ordered)}
    n = len(ordered)
    objective = [0] * n
    for v, cv in obj_expr.items():
        objective[index[v]] = cv
    constraints = []
    for expr, rel, rhs in raw_cons:
        coeffs = [0] * n
        for v, cv in expr.items():
            coeffs[index[v]] = cv
        constraints.append(Constraint(tuple(coeffs), rel, rhs))
    cont = [v for v in ordered if v not in bin_set]
    cont_bounds = tuple(bounds.get(v, (0, None)) for v in cont)
    return MilpModel(
        num_binary=len(binaries),
        num_continuous=len(cont),
        sense=sense,
        objective=tuple(objective),
        constraints=tuple(constraints),
        continuous_bounds=cont_bounds,
        names=tuple(ordered),
    )
