import numpy as np
import pytest

from tropkernel.instances import example7_window, full_kx, metric_lipschitz, random_semimetric, random_span
from tropkernel.nuclearity import (
    DeltaFamily,
    NuclearDecomposition,
    OneDimOperator,
    compose_nuclear,
    decomposition_from_kernel,
    delta_functional_check,
    full_module,
    i_delta_embed,
    injective_on,
    nuclear_decompose_identity,
    one_dim_apply,
)
from tropkernel.operator import (
    IntegralOperator,
    TabulatedOperator,
    distributes_over_sups,
    identity_is_integral,
    is_integral,
)
from tropkernel.semimetric import lip0_generators
from tropkernel.semimodule import DomainError, GroundSet, Semimodule
from tropkernel.semiring import NEG_INF, identity

N = NEG_INF


def test_one_dim_apply():
    g = GroundSet.range(3)
    T = OneDimOperator(IntegralOperator.delta(1, g), [2.0, N, 5.0])
    np.testing.assert_array_equal(one_dim_apply(T, [7.0, 0.0, 1.0]), [2.0, N, 5.0])
    np.testing.assert_array_equal(one_dim_apply(T, [N, N, N]), [N, N, N])
    # direct formula φ(v) + w
    phi = IntegralOperator.functional([1.0, -2.0, N], g)
    T = OneDimOperator(phi, [0.0, 3.0])
    v = np.array([4.0, 9.0, 100.0])
    np.testing.assert_array_equal(T.apply(v), [7.0, 10.0])
    with pytest.raises(DomainError):
        OneDimOperator(IntegralOperator(identity(3)), [0.0, 0.0, 0.0])


def test_one_dim_operators_distribute_over_sups():
    rng = np.random.default_rng(0)
    V = random_span(4, 3, seed=1)
    for _ in range(20):
        phi = IntegralOperator.functional(rng.integers(-3, 4, 4).astype(float), V.ground)
        T = OneDimOperator(phi, rng.integers(-3, 4, 3).astype(float))
        assert distributes_over_sups(T, V.sample(rng, 3), rng.integers(-2, 3, 3).astype(float))


def test_identity_decomposition_on_lip_space():
    d = metric_lipschitz(coords=[0, 2, 3])
    V = lip0_generators(d)
    dec = nuclear_decompose_identity(V)
    assert dec.verified and len(dec.decomposition) == 3
    for x, t in enumerate(dec.decomposition.terms):
        np.testing.assert_array_equal(t.target, d.matrix[x])


def test_identity_decomposition_on_kx_is_coordinates():
    V = full_kx(3)
    dec = nuclear_decompose_identity(V)
    assert dec.verified
    np.testing.assert_array_equal([t.target for t in dec.decomposition.terms], identity(3))


def test_identity_decomposition_on_window():
    # the windowed span is finite-dimensional with generators x -> -x and 0:
    # its identity does decompose (the abstract functional is what fails)
    V, _ = example7_window(5)
    assert nuclear_decompose_identity(V).verified


def test_identity_decomposition_failure_reports_witness():
    V = Semimodule([[0, 0, N], [N, 0, 0]])
    dec = nuclear_decompose_identity(V)
    assert dec.verified == identity_is_integral(V).verified
    # the unit matrix represents id on any V, but its rows are not in this span
    V = Semimodule([[4, -3, -4], [-2, -1, 3], [-1, -4, -2]])
    assert is_integral(IntegralOperator.identity(V.ground), V)
    assert not identity_is_integral(V).verified
    dec = nuclear_decompose_identity(V)
    assert not dec.verified and dec.witness is not None


def test_compose_nuclear_left_and_right():
    d = random_semimetric(3, seed=4)
    V = lip0_generators(d)
    T = nuclear_decompose_identity(V).decomposition
    rng = np.random.default_rng(3)
    A = IntegralOperator(rng.integers(-3, 4, size=(3, 2)).astype(float), V.ground)
    assert compose_nuclear(T, A, side="left").verify(A)[0]
    B = IntegralOperator(V.sample(rng, 2), GroundSet(("p", "q")), V.ground)
    S = compose_nuclear(T, B, side="right")
    assert S.domain.n_points == 2 and S.verify(B)[0]
    I = IntegralOperator.identity(V.ground)
    np.testing.assert_array_equal(compose_nuclear(T, I, side="left").apply_many(V.generators),
                                  T.apply_many(V.generators))
    with pytest.raises(ValueError):
        compose_nuclear(T, A, side="middle")
    with pytest.raises(DomainError):
        compose_nuclear(T, IntegralOperator(np.zeros((2, 2))), side="right")


def test_empty_decomposition_is_zero_operator():
    V = full_kx(2)
    T = NuclearDecomposition([], V, V.ground)
    np.testing.assert_array_equal(T.apply([1.0, 2.0]), [N, N])
    assert len(compose_nuclear(T, IntegralOperator.identity(V.ground), side="left")) == 0
    with pytest.raises(DomainError):
        NuclearDecomposition([], V)


def test_decomposition_from_kernel_skips_zero_rows():
    V = full_kx(3)
    T = decomposition_from_kernel([[0, 1], [N, N], [2, N]], V)
    assert len(T) == 2


def test_delta_functional_on_lip_space_has_row_witness():
    d = random_semimetric(4, seed=8)
    V = lip0_generators(d)
    for x in range(4):
        w = delta_functional_check(IntegralOperator.delta(x, V.ground), V)
        np.testing.assert_array_equal(w, d.matrix[x])


def test_delta_functional_zero_and_sum_have_no_witness():
    V = full_kx(2)
    assert delta_functional_check(IntegralOperator.functional([N, N], V.ground), V) is None
    both = IntegralOperator.functional([0.0, 0.0], V.ground)
    assert delta_functional_check(both, V) is None


def test_delta_functional_tabulated():
    V = full_kx(2)
    phi = TabulatedOperator(V, [[0.0], [N]])
    np.testing.assert_array_equal(delta_functional_check(phi, V), [0.0, N])


def test_canonical_embedding_is_isomorphism_on_unit_points():
    d = random_semimetric(4, seed=6)
    V = lip0_generators(d)
    fam = DeltaFamily.canonical(V)
    assert fam.verify(V)
    image, embed = i_delta_embed(V, fam)
    np.testing.assert_array_equal(image.generators, V.generators)
    assert image.ground.labels == ("δ[0]", "δ[1]", "δ[2]", "δ[3]")
    assert injective_on(embed, V.sample(np.random.default_rng(0), 30))


def test_canonical_embedding_drops_degenerate_points():
    V = Semimodule([[0, N, N], [1, 2, N]])
    image, _ = i_delta_embed(V, DeltaFamily.canonical(V))
    assert image.n_points == 2
    np.testing.assert_array_equal(image.generators, V.generators[:, :2])
    with pytest.raises(DomainError):
        i_delta_embed(V, DeltaFamily([], [], []))


def test_embedding_into_kx_of_abstract_coordinates():
    # (a, b) -> b on the two-point ground {x, y} is integral with kernel e_y
    g = GroundSet(("x", "y"))
    V = full_module(g)
    phi = TabulatedOperator(V, [[N], [0.0]])
    assert is_integral(phi, V)


def test_injective_on_detects_collisions():
    assert injective_on(lambda v: v[:1], np.array([[0.0, 1.0], [1.0, 1.0]]))
    assert not injective_on(lambda v: v[:1], np.array([[0.0, 1.0], [0.0, 2.0]]))
