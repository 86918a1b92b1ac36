import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from transgress.cstar_action import (
    WeightedAction,
    action_ideal,
    check_symmetry,
    chordal,
    classify_limit,
    curve_from_exponents,
    default_annulus_grid,
    empirical_limit_set,
    exceptional_components,
    fundamental_equations,
    stable_act,
    symbolic_residuals,
    verify_graph_closure,
)
from transgress.exact_poly import Ideal, parse_polynomial


def action(weights, dims=None):
    return WeightedAction(dims or [1] * len(weights), weights)


# ---------------------------------------------------------------- validation


@pytest.mark.parametrize(
    "dims, weights",
    [([1, 1], [1, 2]), ([1, 1], [0, 0]), ([1, 1], [0, 2, 3]), ([0, 1], [0, 1]), ([], [])],
)
def test_invalid_actions(dims, weights):
    with pytest.raises(ValueError):
        WeightedAction(dims, weights)


def test_action_shape():
    a = WeightedAction([2, 1, 3], [0, 1, 4])
    assert a.k == 2 and a.dim == 6
    assert list(a.block_of()) == [0, 0, 1, 2, 2, 2]
    assert list(a.coordinate_weights()) == [0, 0, 1, 4, 4, 4]


# ---------------------------------------------------------------- action ideal


@pytest.mark.parametrize(
    "weights, gens",
    [
        ([0, 1], ["mu*v0_0", "lam*v1_0"]),
        ([0, 1, 2], ["mu^2*v0_0", "mu*lam*v1_0", "lam^2*v2_0"]),
        ([0, 3], ["mu^3*v0_0", "lam^3*v1_0"]),
    ],
)
def test_action_ideal_examples(weights, gens):
    a = action(weights)
    I = action_ideal(a)
    assert set(I.generators) == set(Ideal.parse(a.variables(), gens).generators)


def test_action_ideal_expands_blocks():
    a = WeightedAction([2, 1], [0, 1])
    I = action_ideal(a)
    assert I.same_as(Ideal.parse(a.variables(), ["mu*v0_0", "mu*v0_1", "lam*v1_0"]))


# ---------------------------------------------------------------- equations


@pytest.mark.parametrize("k", range(6))
def test_system_count(k):
    a = action(list(range(k + 1)))
    systems = fundamental_equations(a)
    assert len(systems) == math.comb(k + 2, 2)
    assert sorted(s.interval for s in systems) == [(m, M) for m in range(k + 1) for M in range(m, k + 1)]


def test_k1_systems_explicit():
    a = action([0, 1])
    ring = a.variables()
    by = {s.interval: s.equations for s in fundamental_equations(a)}
    # singleton blocks of dimension one: the wedge is empty
    assert by[(0, 0)] == [] and by[(1, 1)] == []
    (eq,) = by[(0, 1)]
    assert eq == parse_polynomial("mu*w0_0*v1_0 - lam*w1_0*v0_0", ring)


def test_singleton_wedge_in_higher_dim_block():
    a = WeightedAction([2], [0])
    (s,) = fundamental_equations(a)
    assert s.equations == [parse_polynomial("w0_0*v0_1 - w0_1*v0_0", a.variables())]


@pytest.mark.parametrize("weights, dims", [([0, 1], None), ([0, 1, 2], None), ([0, 2, 3], None), ([0, 1, 3], [1, 2, 1])])
def test_symmetry(weights, dims):
    assert check_symmetry(action(weights, dims))


@pytest.mark.parametrize("weights, dims", [([0], [2]), ([0, 1], None), ([0, 1, 2], None), ([0, 2, 5], [1, 2, 1])])
def test_symbolic_residuals_vanish(weights, dims):
    res = symbolic_residuals(action(weights, dims), [Fraction(3, 7), Fraction(-5, 2)])
    assert res and all(r.is_zero() for r in res)


def test_equations_bihomogeneous():
    a = WeightedAction([1, 2, 1], [0, 1, 3])
    for s in fundamental_equations(a):
        for e in s.equations:
            for mono, _ in e.items():
                ring = a.variables()
                w_deg = sum(d for n, d in zip(ring, mono) if n.startswith("w"))
                v_deg = sum(d for n, d in zip(ring, mono) if n.startswith("v"))
                assert (w_deg, v_deg) == (1, 1)


# ---------------------------------------------------------------- components


def _labels(comps, slice_only):
    return {(c.index, c.side) for c in comps if c.slice_only == slice_only}


def test_components_k1():
    comps = exceptional_components(action([0, 1]))
    assert _labels(comps, False) == {(0, "inf"), (1, "0")}
    assert _labels(comps, True) == {(1, "inf"), (0, "0")}


def test_components_k2():
    comps = exceptional_components(action([0, 1, 2]))
    assert _labels(comps, False) == {(0, "inf"), (1, "inf"), (1, "0"), (2, "0")}


def test_components_k0():
    assert exceptional_components(action([0])) == []


@pytest.mark.parametrize("weights, dims", [([0, 1], None), ([0, 1, 2], None), ([0, 1, 2], [2, 1, 2]), ([0, 2, 3, 7], None)])
def test_component_dimension(weights, dims):
    a = action(weights, dims)
    for c in exceptional_components(a, seed=3):
        if not c.slice_only:
            assert c.dimension == a.dim - 1
        assert c.equation == f"w_{c.index} ^ v_{c.index} = 0"


# ---------------------------------------------------------------- limits


def test_limit_examples():
    r = classify_limit(action([0, 1]), [1, 1], "inf")
    assert r.fixed_component_index == 1
    assert chordal(r.limit, np.array([0, 1])) < 1e-15
    # at lam = 1e3 the distance is still about 1e-3, so validation moves on to 1e6
    assert r.validation_distance < 1e-4 and r.validation_lambda == 1e6

    a = action([0, 1, 2, 3])
    r = classify_limit(a, [1, 0, 1, 0], "0")
    assert r.fixed_component_index == 0
    assert chordal(r.limit, np.array([1, 0, 0, 0])) < 1e-15

    for direction in ("inf", "0"):
        r = classify_limit(a, [0, 0, 0, 1], direction)
        assert r.fixed_component_index == 3
        assert r.validation_distance == 0.0


def test_limit_errors():
    a = action([0, 1])
    with pytest.raises(ValueError):
        classify_limit(a, [0, 0])
    with pytest.raises(ValueError):
        classify_limit(a, [1, 1], "sideways")


cvec = st.lists(
    st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False) | st.just(0j),
    min_size=4,
    max_size=4,
).filter(any)


@given(cvec, st.fractions(min_value=Fraction(1, 20), max_value=20), st.sampled_from(["inf", "0"]))
def test_limit_orbit_invariant(v, lam, direction):
    a = action([0, 1, 2, 3])
    r1 = classify_limit(a, v, direction)
    r2 = classify_limit(a, a.act(np.array(v), float(lam)), direction)
    assert r1.fixed_component_index == r2.fixed_component_index
    assert chordal(r1.limit, r2.limit) < 1e-9


@given(cvec)
def test_fixed_point_iff_single_block(v):
    a = action([0, 1, 2, 3])
    r = classify_limit(a, v, "inf")
    single = np.count_nonzero(np.array(v)) == 1
    assert (chordal(r.limit, np.array(v)) < 1e-12) == single


@given(cvec, st.floats(0, 40))
def test_stable_act_matches_direct(v, e):
    a = action([0, 1, 2, 3])
    u = stable_act(a, np.array(v), e / 10)
    direct = a.act(np.array(v), 10 ** (e / 10))
    assert abs(np.linalg.norm(u) - 1) < 1e-12
    assert chordal(u, direct) < 1e-7


def test_stable_act_huge_lambda():
    u = stable_act(action([0, 1, 2, 3]), np.array([1, 1, 1, 1]), 200.0)
    assert np.all(np.isfinite(u)) and abs(u[3]) == pytest.approx(1.0)


# ---------------------------------------------------------------- closure


@pytest.mark.parametrize("weights", [[0, 1], [0, 1, 2]])
def test_graph_closure(weights):
    rep = verify_graph_closure(action(weights), n_samples=100, seed=0)
    assert rep.symbolic_max_terms == 0
    assert rep.systems == rep.expected_systems
    assert rep.max_distance < 1e-3
    assert rep.passed


def test_graph_closure_trivial_action():
    rep = verify_graph_closure(action([0]), n_samples=10)
    assert rep.passed and rep.distances == {}


# ---------------------------------------------------------------- empirical limit sets


def test_empirical_three_lines():
    a = action([0, 1, 2, 3])
    s = curve_from_exponents([[(1.0, 0), (1.0, 1)], [(1.0, 2)], [(1.0, 5)], [(1.0, 9)]])
    grid = default_annulus_grid(35, 4)
    ls = empirical_limit_set(a, s, grid, [k / 2 for k in range(0, 33)])
    counts = ls.per_line(1e-3)
    assert set(counts) == {(0, 1), (1, 2), (2, 3)}
    assert min(counts.values()) >= 10
    assert set(ls.clusters.values()) <= {(0, 1), (1, 2), (2, 3)}


def test_empirical_homogeneous():
    a = action([0, 1])
    s = curve_from_exponents([[(1.0, 0)], [(1.0, 1)]])
    grid = [r * np.exp(1j * t) for r in (1e-3, 1e-4, 1e-5) for t in (0.0, 2.0)]
    ls = empirical_limit_set(a, s, grid, [0.0, 1.0])
    # lam * s(z) = [1 : lam z] stays on the single line; small lam z sits near [1:0]
    assert all(p.block_pair == (0, 1) for p in ls.points)
    near = [p for p in ls.points if abs(p.param) * p.lam < 1e-3]
    assert near and all(chordal(p.coords, np.array([1, 0])) < 1e-3 for p in near)


def test_empirical_fixed_section():
    a = action([0, 1])
    ls = empirical_limit_set(a, lambda z: [0, 1], [0.5, 0.25j], [0.0, 3.0, 6.0])
    assert all(chordal(p.coords, np.array([0, 1])) == 0 for p in ls.points)


def test_limit_csv_columns():
    a = action([0, 1])
    ls = empirical_limit_set(a, lambda z: [1, z], [0.5], [0.0])
    header, row = ls.to_csv().splitlines()
    assert header.split(",") == [
        "param_re", "param_im", "lambda", "block_pair",
        "limit_re_0", "limit_re_1", "limit_im_0", "limit_im_1", "cluster_id",
    ]
    assert row.split(",")[3] == "0-1"
