import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import closure_floyd_warshall
from tropkernel.instances import metric_lipschitz, random_semimetric
from tropkernel.semimetric import (
    Lip_membership,
    Semimetric,
    is_lipschitz,
    lip0_generators,
    lip_membership,
    lip_project,
    lipschitz_space,
    lower_ideal_check,
    read_edge_list,
    star_closure,
    validate_semimetric,
)
from tropkernel.semimodule import DomainError, GroundSet, Semimodule, membership
from tropkernel.semiring import NEG_INF, POS_INF

N = NEG_INF
entry = st.one_of(st.integers(-9, 9).map(float), st.just(NEG_INF))


@st.composite
def square(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return np.array(draw(st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n)))


@settings(max_examples=150, deadline=None)
@given(square())
def test_star_closure_matches_floyd_warshall(m):
    d = star_closure(m)
    np.testing.assert_array_equal(d.matrix, closure_floyd_warshall(m.tolist()))
    assert validate_semimetric(d.matrix).valid


def test_star_closure_positive_cycle_spreads_top():
    m = np.array([[N, 1, N], [1, N, N], [N, N, N]])
    d = star_closure(m).matrix
    assert np.all(d[:2, :2] == POS_INF)
    assert d[2, 2] == 0 and d[2, 0] == N


def test_star_closure_is_idempotent_and_least():
    d = random_semimetric(5, seed=3)
    assert np.array_equal(star_closure(d.matrix).matrix, d.matrix)
    assert d.reflexive


def test_validate_semimetric_witness_is_first_pair():
    m = np.array([[0, N], [0, N]])
    ok, w = validate_semimetric(m, GroundSet(("a", "b")))
    assert ok
    m = np.array([[0, -1, N], [N, 0, -1], [N, N, 0]])
    ok, w = validate_semimetric(m)
    assert not ok and w == ("0", "2")
    with pytest.raises(DomainError):
        validate_semimetric(np.zeros((2, 3)))


def test_semimetric_constructor_rejects_non_semimetric():
    with pytest.raises(DomainError):
        Semimetric(np.array([[0, -1, N], [N, 0, -1], [N, N, 0]]))


def test_metric_lipschitz_from_coordinates():
    d = metric_lipschitz(coords=[0, 1, 3])
    np.testing.assert_array_equal(d.matrix, [[0, -1, -3], [-1, 0, -2], [-3, -2, 0]])
    assert d.reflexive and d.symmetric
    with pytest.raises(DomainError):
        lipschitz_space(np.array([[0, 5, 1], [5, 0, 1], [1, 1, 0]]))
    with pytest.raises(DomainError):
        lipschitz_space(np.array([[0, 1], [2, 0]]))


def test_lip_predicates_and_projection():
    d = metric_lipschitz(coords=[0, 1, 3])
    r = -d.matrix
    f = np.array([0.0, 1.0, 2.0])
    assert lip_membership(f, d) and Lip_membership(f, d) and is_lipschitz(f, r)
    g = np.array([0.0, 5.0, 2.0])
    assert not lip_membership(g, d) and not is_lipschitz(g, r)
    p = lip_project(g, d)
    assert lip_membership(p, d) and np.all(p >= g)
    np.testing.assert_array_equal(p, [4, 5, 3])
    assert is_lipschitz(np.full(3, N), r)
    assert not is_lipschitz(np.array([0.0, N, 0.0]), r)


def test_lip_equals_span_of_rows():
    d = random_semimetric(4, seed=11)
    V = lip0_generators(d)
    rng = np.random.default_rng(0)
    for f in rng.integers(-6, 3, size=(40, 4)).astype(float):
        assert lip_membership(f, d) == membership(f, V).member
        p = lip_project(f, d)
        assert membership(p, V).member


def test_lower_ideal_check():
    d = random_semimetric(4, seed=2)
    rng = np.random.default_rng(1)
    assert lower_ideal_check(lip0_generators(d), d, 50, rng).ok
    # a module missing a row of d fails the precondition
    V = Semimodule(d.matrix[:2], d.ground)
    res = lower_ideal_check(V, d, 5, rng)
    assert not res.ok and res.witness["reason"] == "precondition"


def test_read_edge_list(tmp_path):
    p = tmp_path / "edges.txt"
    p.write_text("# graph\na b 1\nb c 2\n\na c 5\n")
    ground, m = read_edge_list(p)
    assert ground.labels == ("a", "b", "c")
    d = star_closure(m, ground)
    np.testing.assert_array_equal(d.matrix, [[0, -1, -3], [-1, 0, -2], [-3, -2, 0]])
    p.write_text("a b\n")
    with pytest.raises(ValueError):
        read_edge_list(p)
