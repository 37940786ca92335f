import pytest
from hypothesis import given, strategies as st

from recokp.model import (
    KnapsackInstance,
    ObjectiveVector,
    ScenarioCosts,
    ScenarioSet,
    Solution,
    StructuralError,
    dominates,
    evaluate,
    hamming,
    is_feasible,
    read_scenario_set,
    write_scenario_set,
)


def test_is_feasible_examples():
    assert is_feasible(KnapsackInstance(3, (1, 1, 1), 3), Solution((1, 1, 1)))
    assert not is_feasible(KnapsackInstance(2, (2, 2), 3), Solution((1, 1)))
    assert is_feasible(KnapsackInstance(2, (10, 90), 50), Solution((1, 0)))


def test_is_feasible_dimension_mismatch():
    with pytest.raises(StructuralError):
        is_feasible(KnapsackInstance(2, (1, 1), 1), Solution((1,)))


def test_evaluate_examples():
    sc = ScenarioCosts(((10, 20), (30, 10)))
    assert evaluate(sc, Solution((1, 0))).values == (10, 30)
    assert evaluate(sc, Solution((0, 0))).values == (0, 0)
    assert evaluate(sc, Solution((1, 1))).values == (30, 40)


def test_hamming_examples():
    assert hamming(Solution.from_string("10110"), Solution.from_string("10011")) == 2
    x = Solution.from_string("0110")
    assert hamming(x, x) == 0
    assert hamming(Solution.from_string("000"), Solution.from_string("111")) == 3
    with pytest.raises(StructuralError):
        hamming(Solution((1,)), Solution((1, 0)))


def test_dominates_examples():
    assert dominates(ObjectiveVector((6, 7)), ObjectiveVector((5, 7)))
    assert not dominates(ObjectiveVector((5, 7)), ObjectiveVector((5, 7)))
    assert not dominates(ObjectiveVector((6, 3)), ObjectiveVector((5, 7)))


bits = st.lists(st.integers(0, 1), min_size=1, max_size=12)


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
)))
def test_hamming_is_a_metric(triple):
    x, y, z = (Solution(tuple(b)) for b in triple)
    assert hamming(x, x) == 0
    assert hamming(x, y) == hamming(y, x)
    assert hamming(x, z) <= hamming(x, y) + hamming(y, z)


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-20, 20), min_size=n, max_size=n),
    st.lists(st.integers(-20, 20), min_size=n, max_size=n),
    st.lists(st.integers(-20, 20), min_size=n, max_size=n),
)))
def test_dominates_is_a_strict_partial_order(triple):
    u, v, w = (ObjectiveVector(tuple(t)) for t in triple)
    assert not dominates(u, u)
    if dominates(u, v):
        assert not dominates(v, u)
    if dominates(u, v) and dominates(v, w):
        assert dominates(u, w)


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(
    st.lists(st.integers(1, 50), min_size=n, max_size=n),
    st.lists(st.integers(1, 50), min_size=n, max_size=n),
    st.lists(st.integers(0, 2), min_size=n, max_size=n),
)))
def test_evaluate_additive_on_disjoint_supports(data):
    c1, c2, assignment = data
    sc = ScenarioCosts((tuple(c1), tuple(c2)))
    # split: assignment 0 -> neither, 1 -> x, 2 -> y; supports are disjoint
    x = Solution(tuple(1 if a == 1 else 0 for a in assignment))
    y = Solution(tuple(1 if a == 2 else 0 for a in assignment))
    both = Solution(tuple(max(a, b) for a, b in zip(x.bits, y.bits)))
    vx, vy, vb = evaluate(sc, x), evaluate(sc, y), evaluate(sc, both)
    assert tuple(a + b for a, b in zip(vx.values, vy.values)) == vb.values


def test_type_invariants_enforced():
    with pytest.raises(StructuralError):
        KnapsackInstance(2, (1, 0), 3)
    with pytest.raises(StructuralError):
        KnapsackInstance(2, (1,), 3)
    with pytest.raises(StructuralError):
        KnapsackInstance(2, (1, 1), -1)
    with pytest.raises(StructuralError):
        ScenarioCosts(((1, 2), (1,)))
    with pytest.raises(StructuralError):
        ScenarioCosts(((1, 0),))
    with pytest.raises(StructuralError):
        Solution((0, 2))
    inst = KnapsackInstance(2, (1, 1), 1)
    sc = ScenarioCosts(((1, 2), (2, 1)))
    with pytest.raises(StructuralError):
        ScenarioSet(inst, (sc,), nominal_index=1)
    with pytest.raises(StructuralError):
        ScenarioSet(inst, ())


def test_exact_arithmetic_at_spec_bounds():
    # l = 1000 items, costs 100, m irrelevant: objectives reach 1e5 exactly
    ell = 1000
    inst = KnapsackInstance(ell, (1,) * ell, ell)
    sc = ScenarioCosts(((100,) * ell, (100,) * ell))
    full = Solution((1,) * ell)
    assert evaluate(sc, full).values == (100000, 100000)


def test_file_roundtrip(tmp_path):
    inst = KnapsackInstance(3, (5, 7, 9), 11)
    ss = ScenarioSet(
        inst,
        (
            ScenarioCosts(((1, 2, 3), (4, 5, 6))),
            ScenarioCosts(((7, 8, 9), (10, 11, 12))),
        ),
    )
    path = tmp_path / "inst.kp"
    write_scenario_set(ss, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "3 2 2 11"
    assert lines[1] == "5 7 9"
    back = read_scenario_set(path)
    assert back == ss


def test_read_rejects_malformed(tmp_path):
    path = tmp_path / "bad.kp"
    path.write_text("3 2 2 11\n5 7 9\n1 2 3\n")
    with pytest.raises(StructuralError):
        read_scenario_set(path)
    path.write_text("3 2\n")
    with pytest.raises(StructuralError):
        read_scenario_set(path)
    path.write_text("a b c d\n")
    with pytest.raises(StructuralError):
        read_scenario_set(path)
