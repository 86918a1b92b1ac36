"""Linear subspaces of E + F, graphs of morphisms, and the extended addition operations.

Subspaces carry orthonormal frames. All rank decisions use one relative
threshold, RANK_TOL, so the domain predicates and the operations agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainViolationError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class HermSpace:
    p_E: int
    p_F: int

    def __post_init__(self):
        if self.p_E <= 0 or self.p_F <= 0:
            raise ValueError("both summands need positive dimension")

    @property
    def dim(self) -> int:
        return self.p_E + self.p_F

    def e_frame(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)[:, : self.p_E]

    def f_frame(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)[:, self.p_E:]


def _rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def _orth(M: np.ndarray) -> np.ndarray:
    """Orthonormal frame of the column span (relative threshold)."""
    if M.size == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return np.zeros((M.shape[0], 0), complex)
    return U[:, s > RANK_TOL * s[0]]


def _null(M: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal frame of the null space of M (n columns)."""
    if M.size == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(M)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    r = int(np.sum(s > RANK_TOL * scale))
    return Vh[r:].conj().T


class Subspace:
    """A subspace of E + F given by an orthonormal frame."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: HermSpace, frame: np.ndarray, orthonormalize: bool = True):
        frame = np.asarray(frame, dtype=complex).reshape(ambient.dim, -1)
        self.ambient = ambient
        self.basis = _orth(frame) if orthonormalize else frame
        self.basis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def perp(self) -> "Subspace":
        return Subspace(self.ambient, _null(self.basis.conj().T, self.ambient.dim))

    def distance(self, other: "Subspace") -> float:
        return subspace_distance(self, other)

    def to_json(self) -> str:
        return json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in self.basis])

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient=({self.ambient.p_E},{self.ambient.p_F}))"


def subspace_distance(a: Subspace, b: Subspace) -> float:
    """Sine of the largest principal angle; 1.0 when dimensions differ."""
    if a.dim != b.dim:
        return 1.0
    if a.dim == 0:
        return 0.0
    # the residual of b after projecting onto a has norm sin(largest angle);
    # this stays accurate for tiny angles where sqrt(1 - cos^2) does not
    resid = b.basis - a.basis @ (a.basis.conj().T @ b.basis)
    return float(min(1.0, np.linalg.norm(resid, 2)))


def intersect(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Frame of span(a) & span(b) via the null space of the stacked complement projectors."""
    Pa = _orth(a)
    Pb = _orth(b)
    I = np.eye(n, dtype=complex)
    M = np.vstack([I - Pa @ Pa.conj().T, I - Pb @ Pb.conj().T])
    return _null(M, n)


def graph(A: np.ndarray, ambient: HermSpace | None = None) -> Subspace:
    """Gamma_A = {(v, A v)} for A: E -> F (shape p_F x p_E)."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    q, p = A.shape
    amb = ambient or HermSpace(p, q)
    if (amb.p_F, amb.p_E) != (q, p):
        raise ValueError("matrix shape does not match the splitting")
    return Subspace(amb, np.vstack([np.eye(p), A]))


def graph_from_f(B: np.ndarray, ambient: HermSpace | None = None) -> Subspace:
    """{(B w, w)} for B: F -> E (shape p_E x p_F)."""
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    p, q = B.shape
    amb = ambient or HermSpace(p, q)
    return Subspace(amb, np.vstack([B, np.eye(q)]))


def e_subspace(ambient: HermSpace) -> Subspace:
    return Subspace(ambient, ambient.e_frame())


def f_subspace(ambient: HermSpace) -> Subspace:
    return Subspace(ambient, ambient.f_frame())


def project_e(L: Subspace) -> np.ndarray:
    """Frame of pi^E(L) inside E + F."""
    X = L.basis.copy()
    X[L.ambient.p_E:] = 0
    return _orth(X)


def project_f(L: Subspace) -> np.ndarray:
    X = L.basis.copy()
    X[: L.ambient.p_E] = 0
    return _orth(X)


@dataclass
class DomainResult:
    ok: bool
    witness: np.ndarray | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def star_domain(L1: Subspace, L2: Subspace) -> DomainResult:
    """pi^E(L1) + pi^E(L2) = E and L1 & L2 & F = 0."""
    amb = L1.ambient
    if L1.dim != amb.p_E or L2.dim != amb.p_E:
        return DomainResult(False, None, "both subspaces must have dimension dim E")
    n = amb.dim
    span = np.hstack([project_e(L1), project_e(L2)])
    if _rank(span) < amb.p_E:
        # witness: a vector of E orthogonal to both projections
        w = intersect(intersect(L1.perp().basis, L2.perp().basis, n), amb.e_frame(), n)
        return DomainResult(False, w[:, 0] if w.shape[1] else None, "projections to E do not span E")
    cap = intersect(intersect(L1.basis, L2.basis, n), amb.f_frame(), n)
    if cap.shape[1]:
        return DomainResult(False, cap[:, 0], "L1 and L2 meet inside F")
    return DomainResult(True)


def _h_projector(U: np.ndarray, H: np.ndarray) -> np.ndarray:
    G = U.conj().T @ H @ U
    return U @ np.linalg.solve(G, U.conj().T @ H)


def _intersect_h(a: np.ndarray, b: np.ndarray, H: np.ndarray | None) -> np.ndarray:
    n = a.shape[0]
    if H is None:
        return intersect(a, b, n)
    I = np.eye(n, dtype=complex)
    M = np.vstack([I - _h_projector(_orth(a), H), I - _h_projector(_orth(b), H)])
    return _null(M, n)


def _combine(L1: Subspace, L2: Subspace, sign: int, metric: np.ndarray | None) -> Subspace:
    """Direct sum, intersect with Diag(E) + F + F, then (v, w1, v, w2) -> (v, w1 + sign*w2)."""
    amb = L1.ambient
    p, q = amb.p_E, amb.p_F
    n = amb.dim
    G = np.zeros((2 * n, L1.dim + L2.dim), complex)
    G[:n, : L1.dim] = L1.basis
    G[n:, L1.dim:] = L2.basis
    # Diag(E) + F1 inside G = E + F + E + F
    D = np.zeros((2 * n, p + 2 * q), complex)
    D[:p, :p] = np.eye(p)
    D[n: n + p, :p] = np.eye(p)
    D[p:n, p: p + q] = np.eye(q)
    D[n + p:, p + q:] = np.eye(q)
    Hbig = None
    if metric is not None:
        Hbig = np.zeros((2 * n, 2 * n), complex)
        Hbig[:n, :n] = metric
        Hbig[n:, n:] = metric
    W = _intersect_h(G, D, Hbig)
    if W.shape[1] != p:
        raise DomainViolationError(f"diagonal intersection has dimension {W.shape[1]}, expected {p}")
    theta = np.zeros((n, 2 * n), complex)
    theta[:p, :p] = np.eye(p)
    theta[p:, p:n] = np.eye(q)
    theta[p:, n + p:] = sign * np.eye(q)
    image = theta @ W
    if _rank(image) != p:
        raise DomainViolationError("intersection meets the kernel of the addition map")
    return Subspace(amb, image)


def star(L1: Subspace, L2: Subspace, metric: np.ndarray | None = None, check: bool = True) -> Subspace:
    """Extension of (A, B) -> A + B to pairs of p-planes.

    `metric` is an optional positive-definite Hermitian matrix on E + F used for
    the intersection step; the result does not depend on it.
    """
    if check:
        dom = star_domain(L1, L2)
        if not dom:
            raise DomainViolationError(dom.reason)
    return _combine(L1, L2, +1, metric)


def diamond_domain(L1: Subspace, L2: Subspace) -> DomainResult:
    """L1^perp & L2 & E = 0 and L1 & L2^perp & F = 0."""
    amb = L1.ambient
    n = amb.dim
    if L1.dim != amb.p_E or L2.dim != amb.p_F:
        return DomainResult(False, None, "dimensions must be (dim E, dim F)")
    a = intersect(intersect(L1.perp().basis, L2.basis, n), amb.e_frame(), n)
    if a.shape[1]:
        return DomainResult(False, a[:, 0], "L1-perp and L2 meet inside E")
    b = intersect(intersect(L1.basis, L2.perp().basis, n), amb.f_frame(), n)
    if b.shape[1]:
        return DomainResult(False, b[:, 0], "L1 and L2-perp meet inside F")
    return DomainResult(True)


def diamond(L1: Subspace, L2: Subspace) -> Subspace:
    """Extension of (A, B) -> A + B^* with L1 a p-plane and L2 a q-plane."""
    dom = diamond_domain(L1, L2)
    if not dom:
        raise DomainViolationError(dom.reason)
    return _combine(L1, L2.perp(), -1, None)


def _contains(big: np.ndarray, small: np.ndarray) -> bool:
    if small.shape[1] == 0:
        return True
    return _rank(np.hstack([big, small])) == _rank(big) if big.shape[1] else _rank(small) == 0


def chain_member(L1: Subspace, L2: Subspace) -> bool:
    """Closure of {A B = 0, B A = 0}: pi^E(L2) in L1 & E and pi^F(L1) in L2 & F."""
    amb = L1.ambient
    n = amb.dim
    l1e = intersect(L1.basis, amb.e_frame(), n)
    l2f = intersect(L2.basis, amb.f_frame(), n)
    return _contains(l1e, project_e(L2)) and _contains(l2f, project_f(L1))


def rescale(L: Subspace, lam: complex, side: str = "F") -> Subspace:
    """Apply diag(I, lam I) (side F) or diag(lam I, I) (side E)."""
    amb = L.ambient
    d = np.ones(amb.dim, complex)
    if side == "F":
        d[amb.p_E:] = lam
    elif side == "E":
        d[: amb.p_E] = lam
    else:
        raise ValueError("side must be 'E' or 'F'")
    return Subspace(amb, d[:, None] * L.basis)


@dataclass
class Strata:
    kernel_dim: int
    fixed_point: Subspace  # ker A + Im A, the lam -> infinity limit of graph(lam A)
    kernel: np.ndarray
    image: np.ndarray


def grassmann_strata(A: np.ndarray) -> Strata:
    """Index i = dim ker A and the fixed point (L & E, pi^F(L)) attached to graph(A)."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    q, p = A.shape
    amb = HermSpace(p, q)
    L = graph(A, amb)
    ker = intersect(L.basis, amb.e_frame(), amb.dim)
    # pi^F(graph A) = Im A, embedded in F
    img_f = _orth(np.vstack([np.zeros((p, p)), A]))
    fixed = Subspace(amb, np.hstack([ker, img_f]))
    return Strata(ker.shape[1], fixed, ker, img_f)


def limit_probe(A: np.ndarray, lambdas: Sequence[float]) -> list[float]:
    """Distances from graph(lam A) to the fixed point ker A + Im A along a sweep."""
    st = grassmann_strata(A)
    amb = st.fixed_point.ambient
    return [subspace_distance(graph(lam * np.asarray(A, complex), amb), st.fixed_point) for lam in lambdas]


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_pd_metric(rng: np.random.Generator, n: int) -> np.ndarray:
    X = random_matrix(rng, n, n)
    return X @ X.conj().T + n * np.eye(n)
