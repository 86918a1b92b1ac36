"""Rees ideals, projectivized normal cones and Samuel multiplicities.

Two independent routes compute the multiplicity of a section's zero scheme
along a component through a point p:

* Hilbert-Samuel: local lengths of powers I^t restricted to a generic slice
  of dimension d through p.
* Normal cone: the Hilbert function of the fiber of the projectivized normal
  cone, restricted to the same kind of slice and localized at p.

Localization at p is done by adding a power m^N of the maximal ideal and
growing N until the length stops changing (equality at N and N+1 forces
m^N to vanish locally, so the value is exact).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import yaml

from .errors import (
    InfiniteColengthError,
    NonGenericFiberError,
    PolynomialError,
    StabilizationError,
)
from .exact_poly import (
    GREVLEX,
    INFINITE,
    Ideal,
    Polynomial,
    eliminate,
    maximal_power,
    parse_polynomial,
    saturate,
    standard_monomial_count,
)

T_MAX = 24
STABLE_RUN = 3
N_CAP = 64
SLICE_CONSTANTS = (1, 3, 7, 13, 19, 29, 37, 43)


@dataclass(frozen=True)
class SectionData:
    base_vars: tuple[str, ...]
    components: tuple[Polynomial, ...]

    def __init__(self, base_vars: Sequence[str], components: Sequence[Polynomial | str]):
        base = tuple(base_vars)
        comps = []
        for c in components:
            if isinstance(c, str):
                c = parse_polynomial(c, base)
            elif c.variables != base:
                c = c.rename(base)
            comps.append(c)
        if not comps or all(c.is_zero() for c in comps):
            raise PolynomialError("section must have a component that is not identically zero")
        object.__setattr__(self, "base_vars", base)
        object.__setattr__(self, "components", tuple(comps))

    @property
    def rank(self) -> int:
        return len(self.components)

    def ideal(self) -> Ideal:
        return Ideal(self.base_vars, self.components)

    def scaled(self, c) -> "SectionData":
        return SectionData(self.base_vars, [g * c for g in self.components])


@dataclass
class ConeIdeal:
    base_vars: tuple[str, ...]
    fiber_vars: tuple[str, ...]
    ideal: Ideal
    saturation_noop: bool | None = None

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ideal.variables

    def base_part(self) -> Ideal:
        """Generators of fiber degree zero, as an ideal over the base."""
        idx = [self.variables.index(v) for v in self.fiber_vars]
        gens = [
            g.rename(self.base_vars)
            for g in self.ideal.generators
            if all(all(e[i] == 0 for i in idx) for e, _ in g.items())
        ]
        return Ideal(self.base_vars, gens)


def _fiber_names(base: Sequence[str], k: int) -> tuple[str, ...]:
    names = tuple(f"w{i + 1}" for i in range(k))
    clash = set(names) & set(base)
    if clash or "theta" in base:
        raise PolynomialError(f"base variables clash with fiber names {sorted(clash | {'theta'} & set(base))}")
    return names


def _saturating_form(s: SectionData, ring: tuple[str, ...], w: Sequence[str]) -> Polynomial:
    """A linear form sum c_i w_i whose pullback sum c_i s_i is not identically zero."""
    for c in SLICE_CONSTANTS:
        coeffs = [c**i for i in range(len(w))]
        pulled = sum((g * a for g, a in zip(s.components, coeffs)), Polynomial(s.base_vars))
        if not pulled.is_zero():
            return sum((Polynomial.var(ring, v) * a for v, a in zip(w, coeffs)), Polynomial(ring))
    raise PolynomialError("no admissible saturating form found")


def rees_ideal(s: SectionData) -> ConeIdeal:
    """Ideal of the closure of the graph of m -> [s(m)] in base x P^{k-1}."""
    base = s.base_vars
    w = _fiber_names(base, s.rank)
    t = "t_scale"
    ring = base + w + (t,)
    gens = [Polynomial.var(ring, wi) - Polynomial.var(ring, t) * si.rename(ring) for wi, si in zip(w, s.components)]
    elim = eliminate(Ideal(ring, gens), [t])
    target = base + w
    elim = elim.in_ring(target)
    ell = _saturating_form(s, target, w)
    sat = saturate(elim, ell)
    noop = sat.groebner() == elim.groebner()
    return ConeIdeal(base, w, Ideal(target, sat.groebner()), saturation_noop=noop)


def normal_cone_ideal(s: SectionData) -> ConeIdeal:
    """Ideal of P(C + C_X M): Rees generators plus the components of s, fiber (theta, w)."""
    rees = rees_ideal(s)
    ring = s.base_vars + ("theta",) + rees.fiber_vars
    gens = [g.rename(ring) for g in rees.ideal.groebner()]
    gens += [c.rename(ring) for c in s.components]
    return ConeIdeal(s.base_vars, ("theta",) + rees.fiber_vars, Ideal(ring, gens), rees.saturation_noop)


# ----------------------------------------------------------------- slices


def default_slice(n: int, d: int) -> list[list[Fraction]]:
    """n x d rational matrix B[i][j] = c_i^(j+1) with distinct c_i (Vandermonde-like)."""
    if n > len(SLICE_CONSTANTS):
        raise ValueError("default slice supports at most 8 base variables")
    return [[Fraction(SLICE_CONSTANTS[i]) ** (j + 1) for j in range(d)] for i in range(n)]


def _slice_names(d: int, taken: Sequence[str]) -> tuple[str, ...]:
    names = tuple(f"y{j + 1}" for j in range(d))
    k = 0
    while set(names) & set(taken):
        k += 1
        names = tuple(f"y{j + 1}_{k}" for j in range(d))
    return names


def _slice_substitution(
    base: Sequence[str], p: Sequence, d: int, slice_matrix, ring: tuple[str, ...], ynames: Sequence[str]
) -> dict[str, Polynomial]:
    if len(p) != len(base):
        raise ValueError("point dimension differs from base dimension")
    B = slice_matrix if slice_matrix is not None else default_slice(len(base), d)
    mapping = {}
    for i, v in enumerate(base):
        img = Polynomial.constant(ring, p[i])
        for j in range(d):
            img = img + Polynomial.var(ring, ynames[j]) * Fraction(B[i][j])
        mapping[v] = img
    return mapping


def _check_point(ideal_gens: Sequence[Polynomial], base: Sequence[str], p: Sequence):
    point = dict(zip(base, p))
    for g in ideal_gens:
        if g.evaluate(point):
            raise ValueError(f"point {tuple(p)} is not on the zero set ({g} does not vanish)")


def _local_length(gens: Sequence[Polynomial], ring: tuple[str, ...], local_vars: Sequence[str], n0: int):
    """Length at the origin of k[ring]/(gens) where all of ring is local_vars."""
    n = max(n0, 1)
    prev = None
    while n <= N_CAP:
        a = colength_with_power(gens, ring, local_vars, n)
        b = colength_with_power(gens, ring, local_vars, n + 1)
        if a is not INFINITE and a == b:
            return a
        prev = (a, b)
        n *= 2
    raise InfiniteColengthError(f"local length did not stabilize up to m^{N_CAP} (last {prev}); codimension too large?")


def colength_with_power(gens, ring, local_vars, n):
    ideal = Ideal(ring, list(gens) + maximal_power(ring, local_vars, n))
    return _colength_fast(ideal)


def _colength_fast(ideal: Ideal):
    basis = ideal.groebner(GREVLEX)
    if not basis:
        return INFINITE
    return standard_monomial_count([g.leading_monomial(GREVLEX) for g in basis], len(ideal.variables))


def _stable_difference(values: list[int], order: int, run: int = STABLE_RUN):
    diffs = list(values)
    for _ in range(order):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    if len(diffs) >= run and len(set(diffs[-run:])) == 1:
        return diffs[-1], diffs
    return None, diffs


def hilbert_samuel_multiplicity(
    I: Ideal,
    center: Sequence,
    d: int,
    slice_matrix=None,
    t_max: int = T_MAX,
) -> int:
    """Samuel multiplicity of I along a codimension-d component through `center`.

    H(t) is the local length of I^t restricted to a generic d-dimensional slice
    through the center; the multiplicity is the stabilized d-th difference.
    """
    base = I.variables
    if d < 1 or d > len(base):
        raise ValueError("codimension must lie in 1..n")
    _check_point(I.generators, base, center)
    y = _slice_names(d, base)
    mapping = _slice_substitution(base, center, d, slice_matrix, y, y)
    restricted = [g.substitute(mapping, y) for g in I.generators]
    restricted = [g for g in restricted if not g.is_zero()]
    if not restricted:
        raise InfiniteColengthError("ideal vanishes identically on the slice")
    sliced = Ideal(y, restricted)
    maxdeg = max(g.total_degree() for g in restricted)
    values = [0]
    for t in range(1, t_max + 1):
        power = sliced.power(t)
        values.append(_local_length(power.groebner(), y, y, t * maxdeg + 1))
        e, _ = _stable_difference(values, d)
        if e is not None:
            if e <= 0:
                raise StabilizationError(f"nonpositive multiplicity {e}")
            return e
    raise StabilizationError(f"Hilbert-Samuel differences did not stabilize by t={t_max}")


def _fiber_degree_counts(gb_leading, nvars, fiber_idx, local_idx, t_max, y_cap):
    """Standard monomials of each fiber degree 0..t_max (local exponents bounded by y_cap)."""
    counts = [0] * (t_max + 1)
    e = [0] * nvars
    order = local_idx + fiber_idx

    def divisible(mono):
        return any(all(a <= b for a, b in zip(m, mono)) for m in gb_leading)

    def rec(pos, fdeg):
        if pos == len(order):
            counts[fdeg] += 1
            return
        i = order[pos]
        is_fiber = i in fiber_idx
        a = 0
        while True:
            if is_fiber and fdeg + a > t_max:
                break
            if not is_fiber and a >= y_cap:
                break
            e[i] = a
            if divisible(tuple(e)):
                break
            rec(pos + 1, fdeg + a if is_fiber else fdeg)
            a += 1
        e[i] = 0

    rec(0, 0)
    return counts


def generic_fiber_degree(
    cone: ConeIdeal,
    p: Sequence,
    d: int | None = None,
    slice_matrix=None,
    t_max: int = T_MAX,
) -> int:
    """Degree of the fiber of the projectivized normal cone at a generic point of Z.

    The cone is restricted to a d-dimensional slice through p (default d = number
    of base variables) and localized there; the Hilbert function of the fiber
    grading has stabilized d-th difference equal to the degree. If instead it
    grows faster, the fiber has jumped dimension and NonGenericFiberError is raised.
    """
    base = cone.base_vars
    d = len(base) if d is None else d
    if d < 1 or d > len(base):
        raise ValueError("codimension must lie in 1..n")
    _check_point(cone.base_part().generators, base, p)
    y = _slice_names(d, cone.variables)
    ring = y + cone.fiber_vars
    mapping = _slice_substitution(base, p, d, slice_matrix, ring, y)
    gens = []
    for g in cone.ideal.generators:
        img = g.substitute(mapping | {v: Polynomial.var(ring, v) for v in cone.fiber_vars}, ring)
        if not img.is_zero():
            gens.append(img)
    fiber_idx = [ring.index(v) for v in cone.fiber_vars]
    local_idx = [ring.index(v) for v in y]
    maxdeg = max((g.total_degree() for g in gens), default=1)
    n = max(2, maxdeg + 1)
    counts = None
    while n <= N_CAP:
        c0 = _counts_for(gens, ring, y, n, fiber_idx, local_idx, t_max)
        c1 = _counts_for(gens, ring, y, n + 1, fiber_idx, local_idx, t_max)
        if c0 == c1:
            counts = c0
            break
        n *= 2
    if counts is None:
        raise InfiniteColengthError("cone fiber did not localize; codimension too large?")
    e, diffs = _stable_difference(counts, d)
    if e is not None and e > 0:
        return e
    higher, _ = _stable_difference(counts, d + 1)
    raise NonGenericFiberError(
        f"fiber Hilbert function grows faster than degree {d} (d-th differences {diffs[-4:]}, "
        f"next difference {higher}); the point is not generic"
    )


def _counts_for(gens, ring, y, n, fiber_idx, local_idx, t_max):
    ideal = Ideal(ring, list(gens) + maximal_power(ring, y, n))
    basis = ideal.groebner(GREVLEX)
    leading = [g.leading_monomial(GREVLEX) for g in basis]
    if any(sum(m) == 0 for m in leading):
        return [0] * (t_max + 1)
    return _fiber_degree_counts(leading, len(ring), fiber_idx, local_idx, t_max, n + 1)


# ---------------------------------------------------------------- reports


@dataclass
class MultiplicityReport:
    component_point: list[str]
    hs_multiplicity: int
    cone_fiber_degree: int
    agree: bool
    codimension: int
    saturation_noop: bool | None = None
    name: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def multiplicity_report(s: SectionData, p: Sequence, d: int, slice_matrix=None, name: str = "") -> MultiplicityReport:
    hs = hilbert_samuel_multiplicity(s.ideal(), p, d, slice_matrix)
    cone = normal_cone_ideal(s)
    deg = generic_fiber_degree(cone, p, d, slice_matrix)
    return MultiplicityReport(
        component_point=[str(Fraction(x)) for x in p],
        hs_multiplicity=hs,
        cone_fiber_degree=deg,
        agree=hs == deg,
        codimension=d,
        saturation_noop=cone.saturation_noop,
        name=name,
    )


# ----------------------------------------------------------------- corpus


@dataclass
class CorpusEntry:
    name: str
    section: SectionData
    points: list[tuple[tuple[Fraction, ...], int, int]] = field(default_factory=list)


def parse_corpus(text: str) -> list[CorpusEntry]:
    """Records {name, variables, components, test_points: [{point, codimension, expected}]}."""
    data = yaml.safe_load(text)
    out = []
    for rec in data["sections"]:
        sec = SectionData(rec["variables"], [str(c) for c in rec["components"]])
        pts = []
        for tp in rec["test_points"]:
            pt = tuple(Fraction(str(x)) for x in tp["point"])
            pts.append((pt, int(tp["codimension"]), int(tp["expected"])))
        out.append(CorpusEntry(rec["name"], sec, pts))
    return out


@lru_cache(maxsize=1)
def _corpus_text() -> str:
    return resources.files("transgress.data").joinpath("multiplicity_corpus.yaml").read_text()


def load_corpus() -> list[CorpusEntry]:
    return parse_corpus(_corpus_text())
