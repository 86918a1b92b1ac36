import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transgress.errors import DomainViolationError
from transgress.grassmann_corr import (
    HermSpace,
    Subspace,
    chain_member,
    diamond,
    diamond_domain,
    e_subspace,
    f_subspace,
    graph,
    graph_from_f,
    grassmann_strata,
    limit_probe,
    random_matrix,
    random_pd_metric,
    rescale,
    star,
    star_domain,
    subspace_distance,
)

dims = st.integers(1, 3)
seeds = st.integers(0, 2**32 - 1)
E12 = np.array([[0, 1], [0, 0]], complex)


def gram_deviation(L: Subspace) -> float:
    return float(np.max(np.abs(L.basis.conj().T @ L.basis - np.eye(L.dim))))


# ---------------------------------------------------------------- basics


def test_hermspace_validation():
    with pytest.raises(ValueError):
        HermSpace(0, 2)


def test_graph_examples():
    amb = HermSpace(2, 1)
    assert subspace_distance(graph(np.zeros((1, 2)), amb), e_subspace(amb)) < 1e-15
    L = graph([[1]])
    assert subspace_distance(L, Subspace(HermSpace(1, 1), np.array([1, 1]) / np.sqrt(2))) < 1e-15
    with pytest.raises(ValueError):
        graph(np.zeros((2, 2)), amb)


@given(seeds, dims, dims)
def test_frames_orthonormal(seed, p, q):
    L = graph(random_matrix(np.random.default_rng(seed), q, p))
    assert L.dim == p and gram_deviation(L) < 1e-12
    assert gram_deviation(L.perp()) < 1e-12 and L.perp().dim == q


def test_graph_continuity():
    rng = np.random.default_rng(1)
    A = random_matrix(rng, 2, 3)
    D = random_matrix(rng, 2, 3)
    dists = [subspace_distance(graph(A), graph(A + t * D)) for t in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(b < a for a, b in zip(dists, dists[1:]))
    assert dists[-1] < 1e-7


def test_distance_small_angle_accuracy():
    a = Subspace(HermSpace(1, 1), [1, 0])
    b = Subspace(HermSpace(1, 1), [1, 1e-12])
    assert subspace_distance(a, b) == pytest.approx(1e-12, rel=1e-6)
    assert subspace_distance(a, e_subspace(HermSpace(1, 1)).perp()) == pytest.approx(1.0)


# ---------------------------------------------------------------- star


def test_star_domain_examples():
    amb = HermSpace(1, 1)
    assert star_domain(graph([[1]]), graph([[2]]))
    bad = star_domain(f_subspace(amb), f_subspace(amb))
    assert not bad and bad.witness is not None
    assert star_domain(e_subspace(amb), graph([[5]]))


def test_star_domain_dimension():
    amb = HermSpace(2, 1)
    res = star_domain(f_subspace(amb), graph(np.zeros((1, 2))))
    assert not res and "dimension" in res.reason


def test_star_on_lines():
    L = star(graph([[1]]), graph([[2]]))
    assert subspace_distance(L, graph([[3]])) < 1e-15


def test_star_neutral_element():
    A = random_matrix(np.random.default_rng(0), 2, 3)
    assert subspace_distance(star(graph(A), e_subspace(HermSpace(3, 2))), graph(A)) < 1e-12


def test_star_domain_violation_raises():
    amb = HermSpace(1, 1)
    with pytest.raises(DomainViolationError):
        star(f_subspace(amb), f_subspace(amb))


def test_star_beyond_graphs():
    # L1 = F-line is not a graph, but L1 * Gamma_B is defined on C + C^2 when projections span E
    amb = HermSpace(2, 1)
    L1 = Subspace(amb, np.array([[1, 0], [0, 0], [0, 1]]))
    L2 = graph(np.array([[1, 2]]), amb)
    assert star_domain(L1, L2)
    assert star(L1, L2).dim == 2


@given(seeds, dims, dims)
@settings(max_examples=200)
def test_star_extends_addition(seed, p, q):
    rng = np.random.default_rng(seed)
    A, B = random_matrix(rng, q, p), random_matrix(rng, q, p)
    assert subspace_distance(star(graph(A), graph(B)), graph(A + B)) < 1e-10


@given(seeds, dims, dims)
def test_star_commutative(seed, p, q):
    rng = np.random.default_rng(seed)
    L1, L2 = graph(random_matrix(rng, q, p)), graph(random_matrix(rng, q, p))
    assert subspace_distance(star(L1, L2), star(L2, L1)) < 1e-10


@given(seeds, dims, dims)
def test_star_metric_independent(seed, p, q):
    rng = np.random.default_rng(seed)
    L1, L2 = graph(random_matrix(rng, q, p)), graph(random_matrix(rng, q, p))
    H = random_pd_metric(rng, p + q)
    assert subspace_distance(star(L1, L2), star(L1, L2, metric=H)) < 1e-9


@given(seeds, dims, dims)
def test_star_domain_sound(seed, p, q):
    # random subspaces that pass the domain test never break the intersection step
    rng = np.random.default_rng(seed)
    amb = HermSpace(p, q)
    L1 = Subspace(amb, random_matrix(rng, p + q, p))
    L2 = Subspace(amb, random_matrix(rng, p + q, p))
    if star_domain(L1, L2):
        assert star(L1, L2).dim == p


# ---------------------------------------------------------------- diamond


@given(seeds, dims, dims)
def test_diamond_extends(seed, p, q):
    rng = np.random.default_rng(seed)
    A, B = random_matrix(rng, q, p), random_matrix(rng, p, q)
    amb = HermSpace(p, q)
    L = diamond(graph(A, amb), graph_from_f(B, amb))
    assert subspace_distance(L, graph(A + B.conj().T, amb)) < 1e-10


def test_diamond_examples():
    rng = np.random.default_rng(3)
    A = random_matrix(rng, 2, 2)
    amb = HermSpace(2, 2)
    assert subspace_distance(diamond(graph(A, amb), f_subspace(amb)), graph(A, amb)) < 1e-12
    L = diamond(graph(np.zeros((2, 2)), amb), graph_from_f(np.eye(2), amb))
    assert subspace_distance(L, graph(np.eye(2), amb)) < 1e-12


def test_diamond_domain_violation():
    amb = HermSpace(1, 1)
    # L1 = F and L2 = E: L1-perp = E meets L2 = E inside E
    assert not diamond_domain(f_subspace(amb), e_subspace(amb))
    with pytest.raises(DomainViolationError):
        diamond(f_subspace(amb), e_subspace(amb))


# ---------------------------------------------------------------- chain variety


def test_chain_examples():
    amb = HermSpace(2, 2)
    assert chain_member(graph(E12, amb), graph_from_f(E12, amb))
    one = HermSpace(1, 1)
    assert not chain_member(graph([[1]], one), graph_from_f([[1]], one))
    assert chain_member(e_subspace(one), f_subspace(one))


@given(st.sampled_from([-3, -2, -1, 1, 2, 3]), st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_chain_rescaling_invariant(e, c):
    amb = HermSpace(2, 2)
    L1, L2 = graph(c * E12, amb), graph_from_f(E12, amb)
    lam = 10.0**e
    assert chain_member(rescale(L1, lam), rescale(L2, lam))
    bad1, bad2 = graph(np.eye(2), amb), graph_from_f(np.eye(2), amb)
    assert not chain_member(rescale(bad1, lam), rescale(bad2, lam))


def test_rescale_side_validation():
    with pytest.raises(ValueError):
        rescale(graph([[1]]), 2.0, "G")


# ---------------------------------------------------------------- strata


def test_strata_examples():
    assert grassmann_strata(np.array([[2, 1], [0, 1]])).kernel_dim == 0
    assert grassmann_strata(np.zeros((3, 3))).kernel_dim == 3
    st_ = grassmann_strata(np.diag([1.0, 0.0]))
    assert st_.kernel_dim == 1
    d = limit_probe(np.diag([1.0, 0.0]), [1e1, 1e3, 1e5, 1e7])
    assert all(b < a for a, b in zip(d, d[1:])) and d[-1] < 1e-6


@given(seeds, dims, dims)
def test_strata_kernel_rank(seed, p, q):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(0, min(p, q) + 1))
    A = random_matrix(rng, q, r) @ random_matrix(rng, r, p)
    st_ = grassmann_strata(A)
    assert st_.kernel_dim == p - r
    assert st_.fixed_point.dim == p


def test_to_json_roundtrip():
    import json

    L = graph([[1]])
    data = json.loads(L.to_json())
    frame = np.array([[complex(*z) for z in row] for row in data])
    assert subspace_distance(Subspace(L.ambient, frame), L) < 1e-15
