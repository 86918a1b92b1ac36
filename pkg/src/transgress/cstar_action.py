"""Weighted C*-actions on P(V), V = V_0 + ... + V_k, and the closure of their graphs.

The action is lam*(v_0, ..., v_k) = (v_0, lam^b1 v_1, ..., lam^bk v_k). Its graph
closure in P^1 x P(V) x P(V) (coordinates [mu:lam], [w], [v]) is cut out by the
wedge equations of every connected interval of blocks. This module builds those
equations, the exceptional components, limit classification and empirical
limit sets of curves.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import SymbolicResidualError
from .exact_poly import Ideal, Polynomial


@dataclass(frozen=True)
class WeightedAction:
    block_dims: tuple[int, ...]
    weights: tuple[int, ...]

    def __init__(self, block_dims: Sequence[int], weights: Sequence[int]):
        dims = tuple(int(d) for d in block_dims)
        beta = tuple(int(b) for b in weights)
        if len(dims) != len(beta) or not dims:
            raise ValueError("need one weight per block")
        if any(d <= 0 for d in dims):
            raise ValueError("block dimensions must be positive")
        if beta[0] != 0:
            raise ValueError("weights must start at 0")
        if any(b <= a for a, b in zip(beta, beta[1:])):
            raise ValueError("weights must be strictly increasing")
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "weights", beta)

    @property
    def k(self) -> int:
        return len(self.block_dims) - 1

    @property
    def dim(self) -> int:
        return sum(self.block_dims)

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for d in self.block_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def block_of(self) -> np.ndarray:
        """Block index of every coordinate."""
        return np.repeat(np.arange(self.k + 1), self.block_dims)

    def coordinate_weights(self) -> np.ndarray:
        return np.repeat(np.array(self.weights, dtype=float), self.block_dims)

    def variables(self) -> tuple[str, ...]:
        w = [f"w{j}_{a}" for j, d in enumerate(self.block_dims) for a in range(d)]
        v = [f"v{j}_{a}" for j, d in enumerate(self.block_dims) for a in range(d)]
        return ("mu", "lam", *w, *v)

    def act(self, v: np.ndarray, lam: complex) -> np.ndarray:
        """lam * v on affine coordinates (any lam, no normalization)."""
        return np.asarray(v, dtype=complex) * np.power(complex(lam), self.coordinate_weights())


@dataclass
class EquationSystem:
    interval: tuple[int, int]
    equations: list[Polynomial]


@dataclass(frozen=True)
class ComponentDescriptor:
    index: int
    side: str  # "inf" or "0"
    ambient: tuple[str, str]
    equation: str
    slice_only: bool
    dimension: int


@dataclass
class LimitRecord:
    point: np.ndarray
    direction: str
    fixed_component_index: int
    limit: np.ndarray
    validation_lambda: float
    validation_distance: float


# ----------------------------------------------------------- symbolic part


def _mono(ring, **exps) -> Polynomial:
    e = [0] * len(ring)
    for name, p in exps.items():
        e[ring.index(name)] += p
    return Polynomial.monomial(ring, tuple(e))


def action_ideal(a: WeightedAction) -> Ideal:
    """Ideal generated by mu^(bk - bj) lam^bj v_j, coordinate-wise."""
    ring = a.variables()
    bk = a.weights[-1]
    gens = []
    for j, d in enumerate(a.block_dims):
        bj = a.weights[j]
        for c in range(d):
            gens.append(_mono(ring, mu=bk - bj, lam=bj) * Polynomial.var(ring, f"v{j}_{c}"))
    return Ideal(ring, gens)


def _interval_coordinates(a: WeightedAction, m: int, M: int):
    """(block, coordinate) pairs of blocks m..M."""
    return [(j, c) for j in range(m, M + 1) for c in range(a.block_dims[j])]


def interval_equations(a: WeightedAction, m: int, M: int) -> list[Polynomial]:
    ring = a.variables()
    beta = a.weights
    coords = _interval_coordinates(a, m, M)
    W = []
    V = []
    for j, c in coords:
        W.append(_mono(ring, mu=beta[M] - beta[j], lam=beta[j] - beta[m]) * Polynomial.var(ring, f"w{j}_{c}"))
        V.append(Polynomial.var(ring, f"v{j}_{c}"))
    return [W[p] * V[q] - W[q] * V[p] for p, q in combinations(range(len(coords)), 2)]


def fundamental_equations(a: WeightedAction) -> list[EquationSystem]:
    """One wedge system per connected interval [m, M] of blocks; (k+2 choose 2) systems."""
    return [
        EquationSystem((m, M), interval_equations(a, m, M))
        for m in range(a.k + 1)
        for M in range(m, a.k + 1)
    ]


def _normalize(p: Polynomial) -> Polynomial:
    """Sign-normalize so that equations equal up to sign compare equal."""
    if p.is_zero():
        return p
    lead = max(p.items(), key=lambda mc: mc[0])[1]
    return p * lead.inverse()


def reflected_action(a: WeightedAction) -> WeightedAction:
    bk = a.weights[-1]
    return WeightedAction(a.block_dims[::-1], [bk - b for b in a.weights[::-1]])


def symmetry_image(a: WeightedAction, systems: list[EquationSystem]) -> set[Polynomial]:
    """Apply block reversal and mu <-> lam to every equation, in the ring of the reflected action."""
    b = reflected_action(a)
    src = a.variables()
    dst = b.variables()
    k = a.k
    mapping = {"mu": Polynomial.var(dst, "lam"), "lam": Polynomial.var(dst, "mu")}
    for j, d in enumerate(a.block_dims):
        for c in range(d):
            mapping[f"w{j}_{c}"] = Polynomial.var(dst, f"w{k - j}_{c}")
            mapping[f"v{j}_{c}"] = Polynomial.var(dst, f"v{k - j}_{c}")
    assert set(mapping) == set(src)
    return {_normalize(e.substitute(mapping, dst)) for s in systems for e in s.equations}


def check_symmetry(a: WeightedAction) -> bool:
    """The reflected systems of a coincide with the systems of the reflected action."""
    image = symmetry_image(a, fundamental_equations(a))
    target = {_normalize(e) for s in fundamental_equations(reflected_action(a)) for e in s.equations}
    return image == target


def graph_substitution(a: WeightedAction, lam_value=None) -> tuple[dict, tuple[str, ...]]:
    """w := x, v := mu^(bk-bj) lam^bj x (lam symbolic, or a rational value)."""
    ring = a.variables()
    x = tuple(f"x{j}_{c}" for j, d in enumerate(a.block_dims) for c in range(d))
    target = ("mu", "lam") + x
    bk = a.weights[-1]
    mapping: dict[str, Polynomial] = {}
    for j, d in enumerate(a.block_dims):
        bj = a.weights[j]
        for c in range(d):
            xv = Polynomial.var(target, f"x{j}_{c}")
            mapping[f"w{j}_{c}"] = xv
            scale = _mono(target, mu=bk - bj, lam=bj)
            if lam_value is not None:
                scale = _mono(target, mu=bk - bj) * (Fraction(lam_value) ** bj)
            mapping[f"v{j}_{c}"] = scale * xv
    if lam_value is not None:
        mapping["lam"] = Polynomial.constant(target, Fraction(lam_value))
    assert set(mapping) | {"mu", "lam"} >= set(ring)
    return mapping, target


def symbolic_residuals(a: WeightedAction, lam_values: Sequence = ()) -> list[Polynomial]:
    """Every equation evaluated on parametrized graph points; all must be exactly zero."""
    out = []
    systems = fundamental_equations(a)
    for lam_value in [None, *lam_values]:
        mapping, target = graph_substitution(a, lam_value)
        for s in systems:
            for e in s.equations:
                out.append(e.substitute(mapping, target))
    return out


# -------------------------------------------------------------- components


def _block_label(sign: str, i: int) -> str:
    return f"P(V_{i}^{sign})"


def _stratum_dimension(a: WeightedAction, i: int, side: str, rng: np.random.Generator) -> int:
    """Complex rank of the Jacobian of the dense-stratum chart at a random point."""
    slices = a.block_slices()
    n = a.dim
    lo = slices[i].start if side == "0" else 0
    hi = slices[i].stop if side == "inf" else n
    # parameters: w on its support except one normalized entry of block i, and v off block i
    w_support = list(range(lo, hi)) if side == "inf" else list(range(slices[i].start, n))
    v_support = list(range(slices[i].stop, n)) if side == "inf" else list(range(0, slices[i].start))
    pivot = slices[i].start
    w_free = [c for c in w_support if c != pivot]
    nparams = len(w_free) + len(v_support)

    def chart(params):
        w = np.zeros(n, complex)
        w[pivot] = 1.0
        w[w_free] = params[: len(w_free)]
        v = np.zeros(n, complex)
        v[slices[i]] = w[slices[i]]
        v[v_support] = params[len(w_free):]
        return np.concatenate([np.delete(w / w[pivot], pivot), np.delete(v / v[pivot], pivot)])

    if nparams == 0:
        return 0
    p0 = rng.standard_normal(nparams) + 1j * rng.standard_normal(nparams)
    h = 1e-6
    base = chart(p0)
    cols = []
    for k in range(nparams):
        dp = np.zeros(nparams, complex)
        dp[k] = h
        cols.append((chart(p0 + dp) - base) / h)
    J = np.array(cols).T
    s = np.linalg.svd(J, compute_uv=False)
    return int(np.sum(s > 1e-8 * s[0]))


def exceptional_components(a: WeightedAction, seed: int = 0) -> list[ComponentDescriptor]:
    """C_i^inf for i < k and C_i^0 for i > 0, plus the slice-only C_k^inf and C_0^0 (k >= 1)."""
    if a.k == 0:
        return []
    rng = np.random.default_rng(seed)
    out = []
    for i in range(a.k + 1):
        out.append(
            ComponentDescriptor(
                i, "inf", (_block_label("+", i), _block_label("-", i)), f"w_{i} ^ v_{i} = 0",
                slice_only=(i == a.k), dimension=_stratum_dimension(a, i, "inf", rng),
            )
        )
    for i in range(a.k + 1):
        out.append(
            ComponentDescriptor(
                i, "0", (_block_label("-", i), _block_label("+", i)), f"w_{i} ^ v_{i} = 0",
                slice_only=(i == 0), dimension=_stratum_dimension(a, i, "0", rng),
            )
        )
    return out


# ------------------------------------------------------------------ limits


def chordal(a: np.ndarray, b: np.ndarray) -> float:
    """sin of the angle between complex lines [a] and [b]."""
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    ua = a / np.linalg.norm(a)
    ub = b / np.linalg.norm(b)
    # residual of projecting ub onto [a]; accurate near 0 unlike sqrt(1 - cos^2)
    return float(min(1.0, np.linalg.norm(ub - ua * np.vdot(ua, ub))))


def stable_act(a: WeightedAction, v: np.ndarray, log10_lam: float, phase: float = 0.0) -> np.ndarray:
    """lam * v normalized to unit length, computed in log space (no overflow for huge lam)."""
    v = np.asarray(v, complex)
    wts = a.coordinate_weights()
    with np.errstate(divide="ignore"):
        logmag = np.where(v != 0, np.log10(np.abs(v) + 0.0) + wts * log10_lam, -np.inf)
    top = np.max(logmag)
    mag = np.where(np.isfinite(logmag), 10.0 ** (logmag - top), 0.0)
    ang = np.angle(v) + wts * phase
    out = mag * np.exp(1j * ang)
    return out / np.linalg.norm(out)


def classify_limit(a: WeightedAction, v: Sequence[complex], direction: str = "inf") -> LimitRecord:
    """Limit of lam * v as lam -> inf (top nonzero block) or lam -> 0 (bottom nonzero block).

    The limit is validated numerically at the first lam in 1e3, 1e6, 1e9, 1e12 (or
    their inverses) where the chordal distance drops below 1e-4; the distance at
    the last probe is recorded if none does.
    """
    v = np.asarray(v, complex)
    if not np.any(v):
        raise ValueError("zero vector has no projective class")
    blocks = a.block_of()
    present = sorted({int(b) for b in blocks[np.abs(v) > 0]})
    if direction == "inf":
        i = present[-1]
    elif direction == "0":
        i = present[0]
    else:
        raise ValueError("direction must be 'inf' or '0'")
    limit = np.where(blocks == i, v, 0)
    limit = limit / np.linalg.norm(limit)
    dist = float("nan")
    lam = float("nan")
    for e in (3, 6, 9, 12):
        exp10 = e if direction == "inf" else -e
        dist = chordal(stable_act(a, v, exp10), limit)
        lam = 10.0**exp10
        if dist < 1e-4:
            break
    return LimitRecord(v, direction, i, limit, lam, dist)


def _stratum_pair(a: WeightedAction, i: int, side: str, rng: random.Random):
    """Random (w, v) in S(F_i) x_{F_i} U(F_i) (side inf) or U(F_i) x_{F_i} S(F_i) (side 0), and rho."""
    n = a.dim
    sl = a.block_slices()[i]
    blocks = a.block_of()

    def cnum():
        # magnitudes in [0.5, 1.5] keep samples inside a compact part of the stratum
        return rng.uniform(0.5, 1.5) * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))

    w = np.zeros(n, complex)
    v = np.zeros(n, complex)
    rho = cnum()
    for c in range(n):
        b = blocks[c]
        if b == i:
            w[c] = cnum()
            v[c] = rho * w[c]
        elif (b < i) == (side == "inf"):
            w[c] = cnum()
        else:
            v[c] = cnum()
    return w, v, rho, sl


def graph_approximation(a: WeightedAction, w, v, rho, i: int, side: str, lam: float):
    """A graph point x with (x, lam*x) close to (w, v) on the given stratum."""
    blocks = a.block_of()
    wts = a.coordinate_weights()
    beta_i = a.weights[i]
    x = np.array(w, complex)
    if side == "inf":
        far = blocks > i
    else:
        far = blocks < i
    x[far] = lam ** (beta_i - wts[far]) * np.asarray(v)[far] / rho
    return x


@dataclass
class ClosureReport:
    symbolic_max_terms: int
    symbolic_count: int
    systems: int
    expected_systems: int
    max_distance: float
    distances: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.symbolic_max_terms == 0 and self.systems == self.expected_systems and self.max_distance < 1e-3


def verify_graph_closure(a: WeightedAction, n_samples: int = 100, seed: int = 0, lam: float = 1e4) -> ClosureReport:
    rng = random.Random(seed)
    lam_values = [Fraction(rng.randint(1, 97), rng.randint(1, 97)) for _ in range(3)]
    residuals = symbolic_residuals(a, lam_values)
    worst = max((len(r) for r in residuals), default=0)
    if worst:
        raise SymbolicResidualError("a graph-closure equation does not vanish on graph points")
    systems = fundamental_equations(a)
    expected = math.comb(a.k + 2, 2)
    distances: dict[str, float] = {}
    for comp in exceptional_components(a, seed):
        if comp.slice_only:
            continue
        scale = lam if comp.side == "inf" else 1.0 / lam
        worst_d = 0.0
        for _ in range(n_samples):
            w, v, rho, _ = _stratum_pair(a, comp.index, comp.side, rng)
            x = graph_approximation(a, w, v, rho, comp.index, comp.side, scale)
            lx = a.act(x, scale)
            d = max(chordal(x, w), chordal(lx, v))
            # the P^1 factor: [1:lam] against [0:1] or [1:0]
            target = np.array([0, 1]) if comp.side == "inf" else np.array([1, 0])
            d = max(d, chordal(np.array([1, scale]), target))
            worst_d = max(worst_d, d)
        distances[f"C_{comp.index}^{comp.side}"] = worst_d
    return ClosureReport(
        symbolic_max_terms=worst,
        symbolic_count=len(residuals),
        systems=len(systems),
        expected_systems=expected,
        max_distance=max(distances.values(), default=0.0),
        distances=distances,
    )


# ------------------------------------------------------- empirical limits


@dataclass
class LimitPoint:
    param: complex
    lam: float
    phase: float
    coords: np.ndarray
    block_pair: tuple[int, int]
    residual: float
    interior: bool
    cluster_id: int = -1


@dataclass
class LimitSet:
    points: list[LimitPoint]
    clusters: dict[int, tuple[int, int]]

    def per_line(self, tol: float = 1e-3, interior_only: bool = True) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for p in self.points:
            if p.residual < tol and (p.interior or not interior_only):
                counts[p.block_pair] = counts.get(p.block_pair, 0) + 1
        return counts

    def to_csv(self) -> str:
        buf = io.StringIO()
        n = len(self.points[0].coords) if self.points else 0
        writer = csv.writer(buf, lineterminator="\n")
        header = ["param_re", "param_im", "lambda", "block_pair"]
        header += [f"limit_re_{c}" for c in range(n)] + [f"limit_im_{c}" for c in range(n)]
        writer.writerow(header + ["cluster_id"])
        for p in self.points:
            row = [repr(p.param.real), repr(p.param.imag), repr(p.lam), f"{p.block_pair[0]}-{p.block_pair[1]}"]
            row += [repr(float(x.real)) for x in p.coords] + [repr(float(x.imag)) for x in p.coords]
            writer.writerow(row + [p.cluster_id])
        return buf.getvalue()


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _nearest_line(a: WeightedAction, u: np.ndarray):
    """Nearest line spanned by two consecutive blocks (or one block when k = 0)."""
    blocks = a.block_of()
    best = None
    pairs = [(j, j + 1) for j in range(a.k)] or [(0, 0)]
    for j, jj in pairs:
        on = (blocks == j) | (blocks == jj)
        off = float(np.linalg.norm(u[~on]))
        if best is None or off < best[1]:
            best = ((j, jj), off)
    return best


def default_annulus_grid(n_radii: int = 35, n_phases: int = 8) -> list[complex]:
    radii = [10 ** (-0.25 * k) for k in range(2, 2 + n_radii)]
    return [r * complex(math.cos(2 * math.pi * m / n_phases), math.sin(2 * math.pi * m / n_phases))
            for r in radii for m in range(n_phases)]


def empirical_limit_set(
    a: WeightedAction,
    s: Callable[[complex], Sequence[complex]],
    grid: Sequence[complex],
    log10_lambdas: Sequence[float],
    phases: Sequence[float] = (0.0,),
    cluster_tol: float = 1e-3,
    interior_window: float = 1e-2,
) -> LimitSet:
    """Sample lam * s(z) over grid x schedule and attach points to consecutive-block lines.

    Points within cluster_tol of a line are merged by union-find into that
    line's cluster; other points keep cluster_id -1.
    """
    pts: list[LimitPoint] = []
    blocks = a.block_of()
    for z in grid:
        v = np.asarray(s(z), complex)
        for e in log10_lambdas:
            for ph in phases:
                u = stable_act(a, v, e, ph)
                pair, off = _nearest_line(a, u)
                on_a = float(np.linalg.norm(u[blocks == pair[0]]))
                on_b = float(np.linalg.norm(u[blocks == pair[1]]))
                interior = pair[0] != pair[1] and on_a > 0 and interior_window <= on_b / on_a <= 1 / interior_window
                pts.append(LimitPoint(z, 10.0**e, ph, u, pair, off, interior))
    # every on-line point is joined to the first on-line point of its line, so
    # each sampled line becomes one cluster
    uf = _UnionFind(len(pts))
    anchors: dict[tuple[int, int], int] = {}
    good = [i for i, p in enumerate(pts) if p.residual < cluster_tol]
    for i in good:
        pair = pts[i].block_pair
        if pair in anchors:
            uf.union(anchors[pair], i)
        else:
            anchors[pair] = i
    roots: dict[int, int] = {}
    clusters: dict[int, tuple[int, int]] = {}
    for i in good:
        r = uf.find(i)
        if r not in roots:
            roots[r] = len(roots)
            clusters[roots[r]] = pts[r].block_pair
        pts[i].cluster_id = roots[r]
    return LimitSet(pts, clusters)


def curve_from_exponents(coeffs: Sequence[Sequence[tuple[complex, int]]]) -> Callable[[complex], np.ndarray]:
    """s(z) whose j-th coordinate is sum c z^e over the given (c, e) pairs."""
    def s(z: complex) -> np.ndarray:
        return np.array([sum(c * z**e for c, e in terms) for terms in coeffs], complex)

    return s
