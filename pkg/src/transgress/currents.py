"""Currents as pairing functionals on compactly supported test forms.

Sign convention for the ddbar of a current: (ddbar T)(eta) := T(ddbar eta),
so for a locally integrable g, ddbar(g [M]) pairs with eta as the integral of
g ddbar eta. With this convention (i/pi) ddbar log|z| = delta_0 on C.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .errors import ChartDomainError, ConvergenceError, DimensionMismatchError
from .forms import (
    FormField,
    FormValue,
    Key,
    compile_expr,
    coordinate_symbols,
    exterior_ops,
    parse_expression,
    top_form_factor,
    top_key,
)
from .quadrature import QuadratureGrid, Rule, ball_rule

SingularSet = Sequence[complex]


# ------------------------------------------------------------ test forms


class TestForm:
    """q(z, zbar) * psi(|z - c|^2 / R^2) attached to form keys.

    psi(s) = e * exp(-1 / (1 - s)) for s < 1 and 0 otherwise, so psi(0) = 1 and
    psi vanishes with all derivatives on the boundary of the support ball.
    `coeffs` maps keys to polynomial factors; the default is a function.
    """

    __test__ = False  # not a pytest class

    def __init__(
        self,
        n: int,
        center: Sequence[complex],
        radius: float,
        coeffs: dict[Key, object] | None = None,
        label: str = "",
        _symbolic: dict[Key, object] | None = None,
    ):
        self.n = n
        self.center = tuple(complex(c) for c in center)
        if len(self.center) != n:
            raise ValueError("center needs one coordinate per dimension")
        if radius <= 0:
            raise ValueError("support radius must be positive")
        self.radius = float(radius)
        self.label = label
        z, zb = coordinate_symbols(n)
        c = [sp.nsimplify(x.real) + sp.I * sp.nsimplify(x.imag) for x in self.center]
        R2 = sp.nsimplify(self.radius) ** 2
        self._s_expr = sum((z[i] - c[i]) * (zb[i] - sp.conjugate(c[i])) for i in range(n)) / R2
        self._s_fn = compile_expr(self._s_expr, n)
        if _symbolic is not None:
            self.symbolic = _symbolic
        else:
            if coeffs is None:
                coeffs = {(): sp.Integer(1)}
            bump = sp.exp(1 - 1 / (1 - self._s_expr))
            self.symbolic = {tuple(k): sp.sympify(v) * bump for k, v in coeffs.items()}
        self._compiled: dict[Key, Callable] | None = None

    @classmethod
    def bump(cls, center: complex = 0j, radius: float = 0.5, poly=1, label: str = "") -> "TestForm":
        """A compactly supported function on C."""
        return cls(1, (center,), radius, {(): poly}, label)

    def degrees(self) -> set[int]:
        return {len(k) for k in self.symbolic}

    def support_box(self, i: int = 0) -> tuple[float, float, float, float]:
        c, R = self.center[i], self.radius
        return (c.real - R, c.real + R, c.imag - R, c.imag + R)

    def in_support(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, complex))
        return self._s_fn(points).real < 1.0

    def evaluate(self, points) -> FormValue:
        points = np.atleast_2d(np.asarray(points, complex))
        if self._compiled is None:
            self._compiled = {k: compile_expr(v, self.n) for k, v in self.symbolic.items()}
        inside = self.in_support(points)
        comps = {}
        with np.errstate(all="ignore"):
            for k, f in self._compiled.items():
                val = np.zeros(points.shape[0], complex)
                if np.any(inside):
                    val[inside] = f(points[inside])
                comps[k] = val
        return FormValue(self.n, comps, points.shape[0])

    __call__ = evaluate

    def value_at(self, point: Sequence[complex], key: Key = ()) -> complex:
        return complex(self.evaluate(np.array([point], complex)).get(key)[0])

    def _derived(self, symbolic: dict[Key, object], label: str) -> "TestForm":
        return TestForm(self.n, self.center, self.radius, label=label, _symbolic=symbolic)

    def ddbar(self) -> "TestForm":
        """ddbar eta = del(delbar eta), exact."""
        f = FormField.from_symbolic(self.n, self.symbolic)
        ops = exterior_ops(f)["delbar"]
        dd = exterior_ops(ops)["del"]
        sym = {k: v for k, v in dd.symbolic.items() if v != 0}
        return self._derived(sym or {(): sp.Integer(0)}, f"ddbar({self.label})")

    def scale(self, a: complex) -> "TestForm":
        return self._derived({k: a * v for k, v in self.symbolic.items()}, self.label)

    def add(self, other: "TestForm") -> "TestForm":
        if other.center != self.center or other.radius != self.radius:
            raise ValueError("test forms must share a support ball to be added")
        out = dict(self.symbolic)
        for k, v in other.symbolic.items():
            out[k] = out[k] + v if k in out else v
        return self._derived(out, f"{self.label}+{other.label}")


def zero_test_form(center: complex = 0j, radius: float = 0.5) -> TestForm:
    return TestForm(1, (center,), radius, {(): sp.Integer(0)}, "zero")


def default_bumps() -> list[TestForm]:
    """Five distinct bump functions whose supports contain the origin."""
    (z,), (zb,) = coordinate_symbols(1)
    return [
        TestForm.bump(0j, 0.5, 1, "b0"),
        TestForm.bump(0.1 + 0.05j, 0.6, 1, "b1"),
        TestForm.bump(-0.2j, 0.7, 1 + (z + zb) / 2, "b2"),
        TestForm.bump(0.15 + 0j, 0.45, 1 + z * zb, "b3"),
        TestForm.bump(-0.1 + 0.1j, 0.8, 2 - z * zb + sp.I * (z - zb), "b4"),
    ]


# ------------------------------------------------------------ currents


@dataclass(frozen=True)
class Support:
    kind: str  # "chart", "points", "curve"
    points: tuple[tuple[complex, ...], ...] = ()
    multiplicities: tuple[int, ...] = ()


class Current:
    """A linear functional on test forms."""

    def __init__(self, n: int, pair: Callable[[TestForm], complex], support: Support, label: str = ""):
        self.n = n
        self._pair = pair
        self.support = support
        self.label = label

    def __call__(self, eta: TestForm) -> complex:
        if eta.n != self.n:
            raise DimensionMismatchError("test form lives on a different chart")
        return complex(self._pair(eta))

    pair = __call__

    def scale(self, a: complex) -> "Current":
        return Current(self.n, lambda eta: a * self._pair(eta), self.support, f"{a}*{self.label}")

    def __add__(self, other: "Current") -> "Current":
        kind = self.support if self.support == other.support else Support("chart")
        return Current(self.n, lambda eta: self._pair(eta) + other._pair(eta), kind, f"{self.label}+{other.label}")

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)


def pairing_rule(eta: TestForm, centers: SingularSet = (), depth: int = 24, n_theta: int = 96) -> Rule:
    """Quadrature over the support disk of eta, refined at a singular center inside it."""
    c, R = eta.center[0], eta.radius
    inside = [complex(p) for p in centers if abs(complex(p) - c) < R * (1 - 1e-9)]
    if len(inside) > 1:
        grid = QuadratureGrid(eta.support_box(), order=64, centers=tuple(inside), depth=depth)
        return grid.rule()
    pole = inside[0] if inside else c
    return ball_rule(c, R, pole, n_theta, 16, depth)


def _top_coefficient(values: FormValue, n: int) -> np.ndarray:
    return values.get(top_key(n)) * top_form_factor(n)


def _wedge_top(a: FormValue, b: FormValue, n: int) -> np.ndarray:
    return _top_coefficient(a.wedge(b), n)


def form_current(
    omega: FormField, singular: SingularSet = (), depth: int = 24, n_theta: int = 96, label: str = ""
) -> Current:
    """Integration against a smooth (or integrably singular) form on C."""
    if omega.n != 1:
        raise DimensionMismatchError("form currents are integrated on one-dimensional charts")

    def pair(eta: TestForm) -> complex:
        rule = pairing_rule(eta, singular, depth, n_theta)
        pts = rule.points[:, None]
        ev = omega.evaluate(pts)
        if ev.shape:
            ev = ev.trace()
        return rule.integrate(_wedge_top(ev, eta.evaluate(pts), 1))

    return Current(1, pair, Support("chart"), label or omega.label)


def l1_current(
    g: Callable[[np.ndarray], np.ndarray],
    singular: SingularSet = (),
    depth: int = 24,
    certify: bool = True,
    rtol: float = 1e-6,
    label: str = "",
) -> Current:
    """g [C] for a locally integrable g with a declared finite singular set.

    With certify, the pairing is recomputed at double radial refinement depth
    and ConvergenceError is raised if the two disagree beyond rtol.
    """

    def at_depth(eta: TestForm, d: int) -> complex:
        rule = pairing_rule(eta, singular, d)
        pts = rule.points
        with np.errstate(all="ignore"):
            gv = np.asarray(g(pts), complex)
        top = _top_coefficient(eta.evaluate(pts[:, None]), 1)
        # deep radial nodes can round onto a center away from 0; their weight is ~1e-30
        on_center = np.isin(pts, np.asarray(singular, complex))
        with np.errstate(all="ignore"):
            integrand = np.where((top == 0) | on_center, 0.0, gv * top)
        if not np.all(np.isfinite(integrand)):
            raise ConvergenceError("integrand not finite at a quadrature node")
        return rule.integrate(integrand)

    def pair(eta: TestForm) -> complex:
        a = at_depth(eta, depth)
        if certify:
            b = at_depth(eta, 2 * depth)
            if abs(a - b) > rtol * max(abs(b), 1e-12) and abs(a - b) > 1e-14:
                raise ConvergenceError(f"refinement changed the pairing by {abs(a - b):.2e}")
            return b
        return a

    return Current(1, pair, Support("chart"), label)


def log_norm_current(
    section: Sequence[object],
    zeros: SingularSet,
    coefficient: complex = 1.0,
    metric=None,
    **kw,
) -> Current:
    """coefficient * log|s| [C] for a section s of a trivial bundle over C.

    metric: optional sympy expression for the squared-norm weight |s|^2 = s^H h s.
    """
    s = sp.Matrix([parse_expression(e, 1) if isinstance(e, str) else e for e in section])
    # evaluate s and h separately: an expanded |s|^2 cancels catastrophically near the zeros
    s_fn = compile_expr(s, 1)
    h_fn = compile_expr(sp.Matrix(metric), 1) if metric is not None else None

    def g(pts):
        sv = s_fn(pts[:, None])[:, :, 0]
        if h_fn is None:
            norm2 = np.sum(np.abs(sv) ** 2, axis=1)
        else:
            norm2 = np.einsum("ka,kab,kb->k", np.conj(sv), h_fn(pts[:, None]), sv).real
        return coefficient * 0.5 * np.log(norm2)

    return l1_current(g, zeros, label=f"{coefficient}*log|s|", **kw)


# ------------------------------------------------------------ analytic currents


@dataclass(frozen=True)
class PointStratum:
    point: tuple[complex, ...]


@dataclass(frozen=True)
class CurveStratum:
    """Image of t -> (phi_1(t), ..., phi_n(t)) for t in a parameter box."""

    components: tuple[object, ...]  # sympy expressions in the symbol "t"
    box: tuple[float, float, float, float]
    order: int = 64


def coordinate_line(n: int, axis: int, box: tuple[float, float, float, float], value: complex = 0j) -> CurveStratum:
    """{z_j = value for j != axis}, parametrized by z_axis."""
    t = sp.Symbol("t")
    comps = tuple(t if j == axis else sp.nsimplify(value) for j in range(n))
    return CurveStratum(comps, box)


def _curve_pair(stratum: CurveStratum, eta: TestForm) -> complex:
    n = eta.n
    if 2 not in eta.degrees():
        raise DimensionMismatchError("curves pair with 2-forms")
    t = sp.Symbol("t")
    (tz,), _ = coordinate_symbols(1)
    phi = [sp.sympify(c).subs(t, tz) for c in stratum.components]
    dphi = [sp.diff(p, tz) for p in phi]
    phi_fn = compile_expr(sp.Matrix([phi]), 1)
    dphi_fn = compile_expr(sp.Matrix([dphi]), 1)
    grid = QuadratureGrid(stratum.box, order=stratum.order)
    rule = grid.rule()
    tp = rule.points[:, None]
    pts = phi_fn(tp)[:, 0, :]
    d = dphi_fn(tp)[:, 0, :]
    val = eta.evaluate(pts)
    total = np.zeros(rule.size, complex)
    for key, coeff in val.comps.items():
        if len(key) != 2:
            continue
        a, b = key
        # pull back dx_a ^ dx_b to multiples of dt ^ dtbar
        def pb(g):
            return (d[:, g], 0) if g < n else (np.conj(d[:, g - n]), 1)

        (fa, ka), (fb, kb) = pb(a), pb(b)
        if ka == kb:
            continue
        sign = 1 if ka == 0 else -1
        total += sign * coeff * fa * fb
    return rule.integrate(total * top_form_factor(1))


def analytic_current(strata: Sequence[tuple[object, int]], n: int = 1, label: str = "") -> Current:
    """sum mult * [stratum] with positive integer multiplicities."""
    for _, m in strata:
        if int(m) != m or m <= 0:
            raise ValueError("multiplicities must be positive integers")

    def pair(eta: TestForm) -> complex:
        total = 0j
        for st, m in strata:
            if isinstance(st, PointStratum):
                if 0 not in eta.degrees():
                    raise DimensionMismatchError("points pair with functions")
                total += m * eta.value_at(st.point, ())
            elif isinstance(st, CurveStratum):
                total += m * _curve_pair(st, eta)
            else:
                raise TypeError(f"unknown stratum {st!r}")
        return total

    pts = tuple(st.point for st, _ in strata if isinstance(st, PointStratum))
    kind = "points" if len(pts) == len(strata) else "curve"
    mults = tuple(int(m) for _, m in strata)
    return Current(n, pair, Support(kind, pts, mults), label)


def delta(point: complex = 0j, multiplicity: int = 1) -> Current:
    return analytic_current([(PointStratum((complex(point),)), multiplicity)], 1, f"{multiplicity}*delta")


# ------------------------------------------------------------ operations


def ddbar_pair(T: Current, eta: TestForm) -> complex:
    """(ddbar T)(eta) := T(ddbar eta)."""
    return T(eta.ddbar())


def _chart_coordinates(Z: np.ndarray, dZ: list[np.ndarray], k: int):
    """Affine coordinates Z_j / Z_k (j != k) and their holomorphic derivatives."""
    idx = [j for j in range(Z.shape[1]) if j != k]
    zk = Z[:, k]
    u = Z[:, idx] / zk[:, None]
    du = [(dz[:, idx] * zk[:, None] - Z[:, idx] * dz[:, k][:, None]) / zk[:, None] ** 2 for dz in dZ]
    return u, du


def pullback_family(
    section: Sequence[object],
    chart_forms: Sequence[FormField | None],
    lam: complex,
    n: int = 1,
    seam_guard: float = 1e8,
) -> FormField:
    """Pull back a form on P(C + E) through m -> [1 : lam s(m)].

    lam = inf pulls back through m -> [0 : s(m)] into P(E); points where s
    vanishes contribute zero.

    chart_forms[k] is the form in the chart where homogeneous coordinate k is
    1, written in coordinates (z_1..z_n, u_1..u_r). At each point the chart
    with the largest homogeneous coordinate is used; when that chart is not
    supplied the best supplied chart is used if its coordinate is within
    seam_guard of the largest, otherwise ChartDomainError.
    """
    z, _ = coordinate_symbols(n)
    s = sp.Matrix(list(section))
    r = s.shape[0]
    if len(chart_forms) != r + 1:
        raise ValueError("need one (possibly None) chart form per homogeneous coordinate")
    s_fn = compile_expr(s.T, n)
    ds_fn = [compile_expr(s.T.diff(z[i]), n) for i in range(n)]
    at_infinity = lam == math.inf
    lam = 1.0 if at_infinity else complex(lam)
    N = n + r
    avail = [k for k, f in enumerate(chart_forms) if f is not None]
    if not avail:
        raise ValueError("no chart forms supplied")

    def ev(points):
        points = np.atleast_2d(np.asarray(points, complex))
        npts = points.shape[0]
        S = s_fn(points)[:, 0, :]
        head = np.zeros(npts, complex) if at_infinity else np.ones(npts, complex)
        Z = np.column_stack([head, lam * S])
        dZ = [np.column_stack([np.zeros(npts, complex), lam * f(points)[:, 0, :]]) for f in ds_fn]
        alive = np.any(Z != 0, axis=1)
        Z[~alive, 0] = 1.0  # placeholder chart point, masked out below
        mags = np.abs(Z)
        best = np.argmax(mags, axis=1)
        chosen = best.copy()
        for p in range(npts):
            if chart_forms[best[p]] is None:
                k = max(avail, key=lambda j: mags[p, j])
                if mags[p, k] * seam_guard < mags[p, best[p]]:
                    raise ChartDomainError("section reaches a region without a supplied chart")
                chosen[p] = k
        out = FormValue.zero(n, npts)
        for k in set(chosen.tolist()):
            sel = np.nonzero(chosen == k)[0]
            u, du = _chart_coordinates(Z[sel], [d[sel] for d in dZ], k)
            total_pts = np.column_stack([points[sel], u])
            val = chart_forms[k].evaluate(total_pts)
            part = _pull_components(val, du, n, N, len(sel))
            for key, v in part.items():
                full = np.zeros(npts, complex)
                full[sel] = np.where(alive[sel], v, 0.0)
                out = out + FormValue(n, {key: full}, npts)
        return out

    return FormField(n, ev, label="pullback@inf" if at_infinity else f"pullback@{lam}")


def _pull_components(val: FormValue, du: list[np.ndarray], n: int, N: int, npts: int) -> dict[Key, np.ndarray]:
    """Pull back total-space components through (z, u(z)) with u holomorphic."""

    def gen_pullback(g: int) -> FormValue:
        # 1-form on the base: pullback of the total-space generator g
        if g < n:
            return FormValue(n, {(g,): np.ones(npts, complex)}, npts)
        if g < N:
            a = g - n
            return FormValue(n, {(i,): du[i][:, a] for i in range(n)}, npts)
        if g < N + n:
            return FormValue(n, {(n + g - N,): np.ones(npts, complex)}, npts)
        a = g - N - n
        return FormValue(n, {(n + i,): np.conj(du[i][:, a]) for i in range(n)}, npts)

    out = FormValue.zero(n, npts)
    for key, coeff in val.comps.items():
        if coeff.ndim == 3:
            coeff = np.trace(coeff, axis1=1, axis2=2)
        acc = FormValue.scalar(n, coeff)
        for g in key:
            acc = acc.wedge(gen_pullback(g))
        out = out + acc
    return out.comps


def fs_chart_forms(r: int = 1, n: int = 1) -> list[FormField]:
    """c_1 of the dual tautological metric on C^n x P(C + C^r), in every chart."""
    N = n + r
    z, zb = coordinate_symbols(N)
    forms = []
    for k in range(r + 1):
        q = 1 + sum(z[j] * zb[j] for j in range(n, N))
        lg = sp.log(q)
        coeffs = {}
        for a in range(n, N):
            for b in range(n, N):
                c = sp.cancel(sp.diff(lg, z[a], zb[b]))
                if c != 0:
                    coeffs[(a, N + b)] = sp.I / (2 * sp.pi) * c
        forms.append(FormField.from_symbolic(N, coeffs, label=f"fs-chart{k}"))
    return forms


# ------------------------------------------------------------ weak limits


@dataclass
class WeakLimit:
    limit: complex
    alpha: float
    c: complex
    residual: float
    spread: float
    extrapolated: bool
    flags: list[str] = field(default_factory=list)
    raw: list[complex] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "limit": [self.limit.real, self.limit.imag],
            "alpha": self.alpha if math.isfinite(self.alpha) else "inf",
            "c": [self.c.real, self.c.imag],
            "residual": self.residual,
            "spread": self.spread,
            "extrapolated": self.extrapolated,
            "flags": list(self.flags),
        }


def weak_limit(
    lams: Sequence[float],
    values: Sequence[complex],
    max_rel_residual: float = 0.1,
    tail: int | None = None,
) -> WeakLimit:
    """Fit value(lam) = L + c lam^-alpha and return the extrapolated L.

    Only the tail of the schedule is fitted (default: the last half, at least
    four points), since early points are usually pre-asymptotic. alpha comes
    from regressing log|successive differences| on log lam; L and c then by
    linear least squares. The fit is refused (raw last value returned,
    extrapolated False) when its residual exceeds max_rel_residual of the
    spread of the fitted values, or when the tail oscillates.
    """
    lam_all = np.asarray(lams, float)
    v_all = np.asarray(values, complex)
    if lam_all.size < 4 or lam_all.size != v_all.size:
        raise ValueError("need at least four schedule points")
    if np.any(np.diff(lam_all) <= 0) or np.any(lam_all <= 0):
        raise ValueError("schedule must be positive and increasing")
    raw = [complex(x) for x in v_all]
    k = tail if tail is not None else max(4, (lam_all.size + 1) // 2)
    lam, v = lam_all[-k:], v_all[-k:]
    spread = float(np.max(np.abs(v - v[-1])))
    d = np.diff(v)
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.all(np.abs(d) <= 1e-13 * scale):
        return WeakLimit(complex(v[-1]), math.inf, 0j, 0.0, spread, True, ["constant"], raw)
    # direction of approach must be consistent in the tail
    proj = np.real(d * np.conj(d[-1]))
    if np.any(proj < 0):
        return WeakLimit(complex(v[-1]), math.nan, 0j, math.nan, spread, False, ["oscillatory tail"], raw)
    mid = np.sqrt(lam[1:] * lam[:-1])
    slope, _ = np.polyfit(np.log(mid), np.log(np.abs(d)), 1)
    alpha = float(-slope)
    if alpha <= 0:
        return WeakLimit(complex(v[-1]), alpha, 0j, math.nan, spread, False, ["non-decaying differences"], raw)
    A = np.column_stack([np.ones_like(lam), lam**-alpha]).astype(complex)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    residual = float(np.sqrt(np.mean(np.abs(A @ coef - v) ** 2)))
    if spread > 0 and residual > max_rel_residual * spread:
        flags = ["fit residual exceeds tolerance"]
        return WeakLimit(complex(v[-1]), alpha, complex(coef[1]), residual, spread, False, flags, raw)
    return WeakLimit(complex(coef[0]), alpha, complex(coef[1]), residual, spread, True, [], raw)


def lambda_sweep(
    pairing: Callable[[float], complex], lams: Sequence[float]
) -> list[tuple[float, complex]]:
    return [(float(l), complex(pairing(l))) for l in lams]


def sweep_csv(rows: Sequence[tuple[float, complex]]) -> str:
    lines = ["lambda,pairing_re,pairing_im"]
    lines += [f"{l!r},{v.real!r},{v.imag!r}" for l, v in rows]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ residual checks


@dataclass
class ResidualRecord:
    scenario: str
    test_form_id: str
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    grid_meta: dict

    def to_json(self) -> dict:
        d = asdict(self)
        d["lhs"] = [self.lhs.real, self.lhs.imag]
        d["rhs"] = [self.rhs.real, self.rhs.imag]
        return d


@dataclass
class ResidualReport:
    records: list[ResidualRecord]

    @property
    def max_abs(self) -> float:
        return max((r.abs_residual for r in self.records), default=0.0)

    @property
    def max_rel(self) -> float:
        return max((r.rel_residual for r in self.records), default=0.0)

    def to_json(self) -> str:
        return json.dumps([r.to_json() for r in self.records], sort_keys=True)


def transgression_residual(
    lhs_terms: Sequence[tuple[float, object]],
    T: Current,
    test_forms: Sequence[TestForm],
    scenario: str = "",
    grid_meta: dict | None = None,
) -> ResidualReport:
    """|sum sign * term(eta) - (ddbar T)(eta)| for each test form."""
    terms = []
    for sign, term in lhs_terms:
        if isinstance(term, FormField):
            term = form_current(term)
        terms.append((sign, term))
    records = []
    for k, eta in enumerate(test_forms):
        lhs = sum((sign * term(eta) for sign, term in terms), 0j)
        rhs = ddbar_pair(T, eta)
        err = abs(lhs - rhs)
        rel = err / max(abs(rhs), 1e-300) if rhs != 0 else (0.0 if err == 0 else math.inf)
        records.append(
            ResidualRecord(scenario, eta.label or f"eta{k}", complex(lhs), complex(rhs), err, rel, dict(grid_meta or {}))
        )
    return ResidualReport(records)
