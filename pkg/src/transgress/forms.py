"""Bigraded differential forms on coordinate charts of C^n.

A form is a dict from a *key* to coefficients. A key is a sorted tuple of
generator indices, where generator i < n is dz_{i+1} and generator n + i is
dzbar_{i+1}. Coefficients are numpy arrays over a batch of points, either of
shape (npts,) for scalar forms or (npts, r, r) for matrix-valued forms.

Symbolic coefficients use sympy symbols z_i and zb_i that are treated as
independent real symbols (Wirtinger calculus); numeric evaluation sets
zb_i = conj(z_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
import sympy as sp

from .errors import ChartDomainError

Key = tuple[int, ...]


# ------------------------------------------------------------ symbols


@lru_cache(maxsize=None)
def coordinate_symbols(n: int) -> tuple[tuple[sp.Symbol, ...], tuple[sp.Symbol, ...]]:
    z = tuple(sp.Symbol(f"z{i + 1}", real=True) for i in range(n))
    zb = tuple(sp.Symbol(f"zb{i + 1}", real=True) for i in range(n))
    return z, zb


def conj_expr(expr, n: int):
    """Complex conjugate of an expression in (z, zb): conjugate constants, swap z <-> zb."""
    z, zb = coordinate_symbols(n)
    swap = {**{a: b for a, b in zip(z, zb)}, **{b: a for a, b in zip(z, zb)}}
    if isinstance(expr, sp.MatrixBase):
        return expr.applyfunc(lambda e: sp.conjugate(e).xreplace(swap))
    return sp.conjugate(expr).xreplace(swap)


def parse_expression(text: str, n: int):
    """Parse config text in z1..zn, zb1..zbn and conj(...) into a sympy expression."""
    z, zb = coordinate_symbols(n)
    local = {s.name: s for s in z + zb}
    if n == 1:
        local.update(z=z[0], zb=zb[0])
    local["conj"] = lambda e: conj_expr(e, n)
    local["I"] = sp.I
    return sp.sympify(text, locals=local)


def compile_expr(expr, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Numeric evaluator over points of shape (npts, n); returns (npts,) or (npts, r, c)."""
    z, zb = coordinate_symbols(n)
    if isinstance(expr, sp.MatrixBase):
        rows, cols = expr.shape
        fns = [[compile_expr(expr[i, j], n) for j in range(cols)] for i in range(rows)]

        def mat(points):
            points = np.atleast_2d(points)
            out = np.empty((points.shape[0], rows, cols), complex)
            for i in range(rows):
                for j in range(cols):
                    out[:, i, j] = fns[i][j](points)
            return out

        return mat
    expr = sp.sympify(expr)
    if not expr.free_symbols:
        c = complex(expr)

        def const(points):
            return np.full(np.atleast_2d(points).shape[0], c, complex)

        return const
    f = sp.lambdify(z + zb, expr, modules="numpy")

    def fn(points):
        points = np.atleast_2d(np.asarray(points, complex))
        cols = [points[:, i] for i in range(n)] + [np.conj(points[:, i]) for i in range(n)]
        val = f(*cols)
        return np.broadcast_to(np.asarray(val, complex), (points.shape[0],)).copy()

    return fn


def d_z(expr, i: int, n: int):
    z, _ = coordinate_symbols(n)
    return sp.diff(expr, z[i])


def d_zb(expr, i: int, n: int):
    _, zb = coordinate_symbols(n)
    return sp.diff(expr, zb[i])


# ------------------------------------------------------------ keys


def merge_keys(a: Key, b: Key) -> tuple[int, Key] | None:
    """Sign and sorted key of dx_a ^ dx_b, or None if they share a generator."""
    if set(a) & set(b):
        return None
    seq = list(a) + list(b)
    # parity of the sorting permutation by counting inversions
    inv = sum(1 for x in a for y in b if x > y)
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def bidegree(key: Key, n: int) -> tuple[int, int]:
    p = sum(1 for g in key if g < n)
    return p, len(key) - p


def key_name(key: Key, n: int) -> str:
    if not key:
        return "1"
    parts = [f"dz{g + 1}" if g < n else f"dzb{g - n + 1}" for g in key]
    return "^".join(parts)


def top_key(n: int) -> Key:
    return tuple(range(2 * n))


def top_form_factor(n: int) -> complex:
    """dz_1..dz_n dzb_1..dzb_n = factor * dx_1 dy_1 ... dx_n dy_n."""
    return (-2j) ** n * (-1) ** (n * (n - 1) // 2)


# ------------------------------------------------------------ values


class FormValue:
    """A form evaluated on a batch of points."""

    __slots__ = ("n", "comps", "npts", "shape")

    def __init__(self, n: int, comps: Mapping[Key, np.ndarray], npts: int, shape: tuple[int, ...] = ()):
        self.n = n
        self.npts = npts
        self.shape = tuple(shape)
        self.comps = {tuple(k): np.asarray(v) for k, v in comps.items()}

    @classmethod
    def zero(cls, n: int, npts: int, shape=()) -> "FormValue":
        return cls(n, {}, npts, shape)

    @classmethod
    def scalar(cls, n: int, values: np.ndarray) -> "FormValue":
        values = np.asarray(values, complex)
        return cls(n, {(): values}, values.shape[0])

    def get(self, key: Key) -> np.ndarray:
        if key in self.comps:
            return self.comps[key]
        return np.zeros((self.npts,) + self.shape, complex)

    def __add__(self, other: "FormValue") -> "FormValue":
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return FormValue(self.n, out, self.npts, self.shape or other.shape)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "FormValue":
        c = np.asarray(c)
        if c.ndim == 1:
            c = c.reshape((-1,) + (1,) * len(self.shape))
        return FormValue(self.n, {k: v * c for k, v in self.comps.items()}, self.npts, self.shape)

    def wedge(self, other: "FormValue") -> "FormValue":
        out: dict[Key, np.ndarray] = {}
        for ka, va in self.comps.items():
            for kb, vb in other.comps.items():
                m = merge_keys(ka, kb)
                if m is None:
                    continue
                sign, key = m
                if va.ndim == 3 and vb.ndim == 3:
                    prod = va @ vb
                elif va.ndim == 3:
                    prod = va * vb[:, None, None]
                elif vb.ndim == 3:
                    prod = va[:, None, None] * vb
                else:
                    prod = va * vb
                prod = prod * sign
                out[key] = out[key] + prod if key in out else prod
        shape = self.shape or other.shape
        return FormValue(self.n, out, self.npts, shape)

    def trace(self) -> "FormValue":
        if not self.shape:
            return self
        return FormValue(self.n, {k: np.trace(v, axis1=1, axis2=2) for k, v in self.comps.items()}, self.npts)

    def degree_part(self, degree: int) -> "FormValue":
        return FormValue(self.n, {k: v for k, v in self.comps.items() if len(k) == degree}, self.npts, self.shape)

    def bidegree_part(self, p: int, q: int) -> "FormValue":
        return FormValue(
            self.n, {k: v for k, v in self.comps.items() if bidegree(k, self.n) == (p, q)}, self.npts, self.shape
        )

    def max_abs(self, predicate: Callable[[Key], bool] | None = None) -> float:
        vals = [float(np.max(np.abs(v))) for k, v in self.comps.items() if predicate is None or predicate(k)]
        return max(vals, default=0.0)

    def off_diagonal_bidegree_max(self) -> float:
        n = self.n
        return self.max_abs(lambda k: bidegree(k, n)[0] != bidegree(k, n)[1])

    def conjugate(self) -> "FormValue":
        """Complex conjugate form: conj coefficients, dz <-> dzbar (re-sorted with sign)."""
        n = self.n
        out = {}
        for k, v in self.comps.items():
            swapped = [g + n if g < n else g - n for g in k]
            sign = 1
            arr = list(swapped)
            for i in range(len(arr)):
                for j in range(len(arr) - 1 - i):
                    if arr[j] > arr[j + 1]:
                        arr[j], arr[j + 1] = arr[j + 1], arr[j]
                        sign = -sign
            cv = np.conj(v)
            if cv.ndim == 3:
                cv = np.swapaxes(cv, 1, 2)
            out[tuple(arr)] = sign * cv
        return FormValue(n, out, self.npts, self.shape)


# ------------------------------------------------------------ fields


@dataclass(frozen=True)
class Chart:
    """Product of rectangles [re_lo, re_hi] x [im_lo, im_hi] in each coordinate."""

    n: int
    domain: tuple[tuple[float, float, float, float], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1 or len(self.domain) != self.n:
            raise ValueError("chart needs one rectangle per coordinate")
        for lo_r, hi_r, lo_i, hi_i in self.domain:
            if not (lo_r < hi_r and lo_i < hi_i):
                raise ValueError("chart rectangles must be nonempty")

    @classmethod
    def box(cls, n: int, radius: float = 1.0) -> "Chart":
        return cls(n, tuple((-radius, radius, -radius, radius) for _ in range(n)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        ok = np.ones(points.shape[0], bool)
        for i, (lr, hr, li, hi) in enumerate(self.domain):
            ok &= (points[:, i].real >= lr) & (points[:, i].real <= hr)
            ok &= (points[:, i].imag >= li) & (points[:, i].imag <= hi)
        return ok

    def check(self, points: np.ndarray):
        if not np.all(self.contains(points)):
            raise ChartDomainError("evaluation point outside the chart domain")


class FormField:
    """A form given pointwise: evaluate(points) -> FormValue.

    `symbolic` maps keys to sympy expressions (or matrices) when the form is
    known in closed form; exterior derivatives then stay exact.
    """

    def __init__(
        self,
        n: int,
        evaluator: Callable[[np.ndarray], FormValue] | None = None,
        symbolic: Mapping[Key, object] | None = None,
        shape: tuple[int, ...] = (),
        chart: Chart | None = None,
        label: str = "",
        notes: tuple[str, ...] = (),
    ):
        if evaluator is None and symbolic is None:
            raise ValueError("need an evaluator or symbolic coefficients")
        self.n = n
        self.shape = tuple(shape)
        self.chart = chart
        self.label = label
        self.notes = tuple(notes)
        self.symbolic = dict(symbolic) if symbolic is not None else None
        if self.symbolic is not None:
            self.symbolic = {tuple(k): v for k, v in self.symbolic.items()}
        self._compiled = None
        self._evaluator = evaluator

    @classmethod
    def from_symbolic(cls, n: int, coeffs: Mapping[Key, object], chart: Chart | None = None, label: str = ""):
        shape = ()
        for v in coeffs.values():
            if isinstance(v, sp.MatrixBase):
                shape = v.shape
        return cls(n, symbolic=coeffs, shape=shape, chart=chart, label=label)

    @classmethod
    def function(cls, n: int, expr, chart: Chart | None = None, label: str = "") -> "FormField":
        return cls.from_symbolic(n, {(): expr}, chart, label)

    def _compile(self):
        if self._compiled is None:
            self._compiled = {k: compile_expr(v, self.n) for k, v in self.symbolic.items()}
        return self._compiled

    def evaluate(self, points: np.ndarray) -> FormValue:
        points = np.atleast_2d(np.asarray(points, complex))
        if self.chart is not None:
            self.chart.check(points)
        if self._evaluator is not None:
            return self._evaluator(points)
        comps = {k: f(points) for k, f in self._compile().items()}
        return FormValue(self.n, comps, points.shape[0], self.shape)

    __call__ = evaluate

    def degrees(self) -> set[int]:
        if self.symbolic is None:
            return set()
        return {len(k) for k in self.symbolic}

    # algebra on symbolic fields; numeric fields compose through evaluators
    def _binary(self, other: "FormField", op: str) -> "FormField":
        if self.symbolic is not None and other.symbolic is not None and op == "add":
            out = dict(self.symbolic)
            for k, v in other.symbolic.items():
                out[k] = out[k] + v if k in out else v
            return FormField.from_symbolic(self.n, out, self.chart or other.chart)
        if self.symbolic is not None and other.symbolic is not None and op == "wedge":
            out = {}
            for ka, va in self.symbolic.items():
                for kb, vb in other.symbolic.items():
                    m = merge_keys(ka, kb)
                    if m is None:
                        continue
                    sign, key = m
                    prod = sign * (va * vb)
                    out[key] = out[key] + prod if key in out else prod
            return FormField.from_symbolic(self.n, out, self.chart or other.chart)

        def ev(points):
            a, b = self.evaluate(points), other.evaluate(points)
            return a + b if op == "add" else a.wedge(b)

        return FormField(self.n, ev, shape=self.shape or other.shape, chart=self.chart or other.chart)

    def __add__(self, other):
        return self._binary(other, "add")

    def wedge(self, other):
        return self._binary(other, "wedge")

    def scale(self, c) -> "FormField":
        if self.symbolic is not None:
            return FormField.from_symbolic(self.n, {k: c * v for k, v in self.symbolic.items()}, self.chart)
        return FormField(self.n, lambda p: self.evaluate(p).scale(c), shape=self.shape, chart=self.chart)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)


# ------------------------------------------------------------ exterior ops


def _symbolic_derivative(field: FormField, which: str) -> FormField:
    n = field.n
    out: dict[Key, object] = {}
    for key, coeff in field.symbolic.items():
        gens = []
        if which in ("d", "del"):
            gens += list(range(n))
        if which in ("d", "delbar"):
            gens += [n + i for i in range(n)]
        for g in gens:
            i = g if g < n else g - n
            deriv = d_z if g < n else d_zb
            if isinstance(coeff, sp.MatrixBase):
                dc = coeff.applyfunc(lambda e: deriv(e, i, n))
                if dc.is_zero_matrix:
                    continue
            else:
                dc = deriv(coeff, i, n)
                if dc == 0:
                    continue
            m = merge_keys((g,), key)
            if m is None:
                continue
            sign, newkey = m
            out[newkey] = out[newkey] + sign * dc if newkey in out else sign * dc
    return FormField.from_symbolic(n, out, field.chart)


def _fd_derivative(field: FormField, which: str, h: float = 1e-3) -> FormField:
    """Wirtinger derivatives by Richardson-extrapolated central differences."""
    n = field.n

    def central(points, i, direction, step):
        e = np.zeros(n, complex)
        e[i] = direction * step
        plus = field.evaluate(points + e)
        minus = field.evaluate(points - e)
        return {k: (plus.get(k) - minus.get(k)) / (2 * step) for k in set(plus.comps) | set(minus.comps)}

    def partial(points, i, direction):
        a = central(points, i, direction, h)
        b = central(points, i, direction, h / 2)
        return {k: (4 * b[k] - a[k]) / 3 for k in a}

    def ev(points):
        points = np.atleast_2d(np.asarray(points, complex))
        out: dict[Key, np.ndarray] = {}
        for i in range(n):
            dx = partial(points, i, 1.0)
            dy = partial(points, i, 1j)
            for g in ([i] if which in ("d", "del") else []) + ([n + i] if which in ("d", "delbar") else []):
                sgn_y = -1j if g < n else 1j
                for k in dx:
                    m = merge_keys((g,), k)
                    if m is None:
                        continue
                    sign, newkey = m
                    val = sign * 0.5 * (dx[k] + sgn_y * dy[k])
                    out[newkey] = out[newkey] + val if newkey in out else val
        return FormValue(n, out, points.shape[0], field.shape)

    return FormField(n, ev, shape=field.shape)


def exterior_ops(field: FormField, fd_step: float = 1e-3) -> dict[str, FormField]:
    """{'del': d', 'delbar': d'', 'd': d} with d(f dx_I) = df ^ dx_I."""
    if field.symbolic is not None:
        return {w: _symbolic_derivative(field, w) for w in ("del", "delbar", "d")}
    return {w: _fd_derivative(field, w, fd_step) for w in ("del", "delbar", "d")}


def fd_exterior(field: FormField, which: str = "d", fd_step: float = 1e-3) -> FormField:
    """Finite-difference exterior derivative (validation oracle)."""
    return _fd_derivative(field, which, fd_step)
