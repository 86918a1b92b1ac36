"""Exact sparse multivariate polynomials over the Gaussian rationals.

Provides monomial orders, division with remainder, reduced Groebner bases
(Buchberger), elimination, saturation and quotient-dimension counting.
Everything here is exact; no floating point is involved.
"""

from __future__ import annotations

import heapq
import itertools
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import GroebnerCapError, PolynomialError, SaturationError

MAX_EXPONENT = 2**31 - 1


class GaussRational:
    """Exact complex number re + im*i with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction | int | str = 0, im: Fraction | int | str = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussRational":
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, str):
            return parse_coefficient(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussRational")

    def __add__(self, other):
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        o = GaussRational.coerce(other)
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussRational.coerce(other)
        if not self.im and not o.im:
            return GaussRational(self.re * o.re)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if not self.im:
            return GaussRational(1 / self.re)
        n = self.re * self.re + self.im * self.im
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({format_coefficient(self)!r})"

    def __str__(self):
        return format_coefficient(self)


ZERO = GaussRational(0)
ONE = GaussRational(1)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coefficient(c: GaussRational) -> str:
    """Canonical text: `a`, `a/b` or `(a/b+c/d*i)`."""
    if not c.im:
        return _fmt_fraction(c.re)
    sign = "+" if c.im > 0 else "-"
    return f"({_fmt_fraction(c.re)}{sign}{_fmt_fraction(abs(c.im))}*i)"


_COEF_RE = re.compile(r"^\(\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*?\s*i\s*\)$")


def parse_coefficient(text: str) -> GaussRational:
    text = text.strip()
    m = _COEF_RE.match(text)
    if m:
        im = Fraction(m.group(3))
        return GaussRational(Fraction(m.group(1)), im if m.group(2) == "+" else -im)
    try:
        return GaussRational(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise PolynomialError(f"bad coefficient {text!r}") from exc


Monomial = tuple[int, ...]


def _check_exponent(e: int) -> int:
    if e < 0 or e > MAX_EXPONENT:
        raise OverflowError(f"exponent {e} outside machine range")
    return e


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(_check_exponent(x + y) for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------- orders


def _grevlex_key(e: Sequence[int]) -> tuple:
    return (sum(e),) + tuple(-x for x in reversed(e))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order; `key` maps an exponent vector to a sortable tuple (larger = bigger)."""

    kind: str
    block: tuple[str, ...] = ()
    weights: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block", "weighted"):
            raise ValueError(f"unknown monomial order kind {self.kind!r}")
        if self.kind == "weighted" and any(w <= 0 for w in self.weights):
            raise ValueError("weighted order needs positive weights")

    def key_function(self, variables: Sequence[str]) -> Callable[[Monomial], tuple]:
        if self.kind == "lex":
            return tuple
        if self.kind == "grevlex":
            return _grevlex_key
        if self.kind == "weighted":
            if len(self.weights) != len(variables):
                raise ValueError("weight vector length differs from variable count")
            w = self.weights
            return lambda e: (sum(a * b for a, b in zip(w, e)),) + _grevlex_key(e)
        missing = set(self.block) - set(variables)
        if missing:
            raise ValueError(f"block variables {sorted(missing)} not in ring")
        front = [i for i, v in enumerate(variables) if v in self.block]
        rest = [i for i, v in enumerate(variables) if v not in self.block]

        def key(e):
            return _grevlex_key([e[i] for i in front]) + _grevlex_key([e[i] for i in rest])

        return key


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def block_order(front: Iterable[str]) -> MonomialOrder:
    return MonomialOrder("block", block=tuple(sorted(front)))


def weighted_order(weights: Iterable[int]) -> MonomialOrder:
    return MonomialOrder("weighted", weights=tuple(weights))


# ------------------------------------------------------------ polynomial


class Polynomial:
    """Immutable sparse polynomial: exponent tuple -> nonzero GaussRational."""

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Monomial, GaussRational] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(x) for x in mono)
            if len(mono) != n:
                raise PolynomialError("exponent length differs from variable count")
            for x in mono:
                _check_exponent(x)
            c = GaussRational.coerce(c)
            if c:
                clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.variables = variables
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, variables: Sequence[str], c=1) -> "Polynomial":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls._raw(variables, {tuple(e): ONE})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Monomial, c=1) -> "Polynomial":
        return cls(variables, {tuple(exps): c})

    @property
    def terms(self) -> dict[Monomial, GaussRational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self.variables.index(v) for v in names]
        return max((sum(e[i] for i in idx) for e in self._terms), default=-1)

    def involves(self, name: str) -> bool:
        i = self.variables.index(name)
        return any(e[i] for e in self._terms)

    def _same_ring(self, other: "Polynomial"):
        if self.variables != other.variables:
            raise PolynomialError(f"variable mismatch {self.variables} vs {other.variables}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._same_ring(other)
            return other
        return Polynomial.constant(self.variables, other)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self._terms)
        for m, c in other._terms.items():
            s = t.get(m)
            s = c if s is None else s + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Polynomial._raw(self.variables, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.variables, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = GaussRational.coerce(other)
            if not c:
                return Polynomial._raw(self.variables, {})
            return Polynomial._raw(self.variables, {m: v * c for m, v in self._terms.items()})
        self._same_ring(other)
        t: dict[Monomial, GaussRational] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mono_mul(m1, m2)
                s = t.get(m)
                t[m] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw(self.variables, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolynomialError("negative power")
        out = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_term(self, mono: Monomial, c: GaussRational) -> "Polynomial":
        return Polynomial._raw(
            self.variables, {mono_mul(m, mono): v * c for m, v in self._terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self._terms == other._terms
        try:
            return self == Polynomial.constant(self.variables, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # order-dependent accessors
    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        if not self._terms:
            raise PolynomialError("zero polynomial has no leading term")
        return max(self._terms, key=order.key_function(self.variables))

    def leading_coefficient(self, order: MonomialOrder) -> GaussRational:
        return self._terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder) -> "Polynomial":
        return self * self.leading_coefficient(order).inverse()

    # ring changes
    def rename(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express in a variable list that contains every variable actually used."""
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        used = [i for i, v in enumerate(self.variables) if any(e[i] for e in self._terms)]
        for i in used:
            if self.variables[i] not in pos:
                raise PolynomialError(f"variable {self.variables[i]} missing from target ring")
        t = {}
        for m, c in self._terms.items():
            e = [0] * len(variables)
            for i in used:
                e[pos[self.variables[i]]] = m[i]
            t[tuple(e)] = c
        return Polynomial._raw(variables, t)

    def substitute(self, mapping: Mapping[str, object], variables: Sequence[str] | None = None) -> "Polynomial":
        """Replace variables by polynomials (all in the ring `variables`) or constants."""
        target = tuple(variables) if variables is not None else self.variables
        images = []
        for v in self.variables:
            img = mapping.get(v)
            if img is None:
                img = Polynomial.var(target, v) if v in target else None
            elif not isinstance(img, Polynomial):
                img = Polynomial.constant(target, img)
            images.append(img)
        out = Polynomial._raw(target, {})
        powers: dict[tuple[int, int], Polynomial] = {}
        for m, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if not e:
                    continue
                if images[i] is None:
                    raise PolynomialError(f"no image for variable {self.variables[i]}")
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
            out = out + term
        return out

    def evaluate(self, point: Mapping[str, object]) -> GaussRational:
        total = ZERO
        vals = [GaussRational.coerce(point[v]) for v in self.variables]
        for m, c in self._terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t = t * v**e
            total = total + t
        return total

    def evaluate_complex(self, point: Sequence[complex]) -> complex:
        total = 0j
        for m, c in self._terms.items():
            t = complex(c)
            for v, e in zip(point, m):
                if e:
                    t *= v**e
            total += t
        return total

    def to_text(self, order: MonomialOrder = GREVLEX) -> str:
        return format_polynomial(self, order)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, vars={list(self.variables)})"


def format_polynomial(p: Polynomial, order: MonomialOrder = GREVLEX) -> str:
    """Canonical text, terms descending in `order`; print∘parse is the identity."""
    if p.is_zero():
        return "0"
    key = order.key_function(p.variables)
    pieces = []
    for k, mono in enumerate(sorted(p.items(), key=lambda mc: key(mc[0]), reverse=True)):
        m, c = mono
        negative = not c.im and c.re < 0
        if negative:
            c = -c
        factors = []
        for v, e in zip(p.variables, m):
            if e == 1:
                factors.append(v)
            elif e > 1:
                factors.append(f"{v}^{e}")
        mono_txt = "*".join(factors)
        if not mono_txt:
            body = format_coefficient(c)
        elif c == ONE:
            body = mono_txt
        else:
            body = f"{format_coefficient(c)}*{mono_txt}"
        if k == 0:
            pieces.append(("-" if negative else "") + body)
        else:
            pieces.append((" - " if negative else " + ") + body)
    return "".join(pieces)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<cplx>\([^()]*\))|(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*^]))"
)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse the canonical grammar: `3*x^2*y - (1/2+1*i)*z + 7`.

    `**` is accepted as a synonym for `^`.
    """
    variables = tuple(variables)
    if "i" in variables:
        raise PolynomialError("'i' is reserved for the imaginary unit")
    pos = {v: k for k, v in enumerate(variables)}
    tokens = []
    idx = 0
    text = text.strip().replace("**", "^")
    while idx < len(text):
        m = _TOKEN_RE.match(text, idx)
        if not m or m.end() == idx:
            raise PolynomialError(f"cannot parse {text!r} at position {idx}")
        idx = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    result = Polynomial._raw(variables, {})
    k = 0
    n = len(tokens)
    if n == 0:
        raise PolynomialError("empty polynomial text")
    while k < n:
        sign = 1
        while k < n and tokens[k] in (("op", "+"), ("op", "-")):
            if tokens[k][1] == "-":
                sign = -sign
            k += 1
        coef = GaussRational(sign)
        exps = [0] * len(variables)
        seen_factor = False
        while k < n:
            kind, val = tokens[k]
            if kind == "op" and val == "*":
                k += 1
                continue
            if kind == "op":
                break
            if kind in ("num", "cplx"):
                coef = coef * parse_coefficient(val)
            else:
                if val not in pos:
                    raise PolynomialError(f"unknown variable {val!r}")
                power = 1
                if k + 2 < n + 1 and k + 1 < n and tokens[k + 1] == ("op", "^"):
                    if k + 2 >= n or tokens[k + 2][0] != "num" or "/" in tokens[k + 2][1]:
                        raise PolynomialError("exponent must be a nonnegative integer")
                    power = int(tokens[k + 2][1])
                    k += 2
                exps[pos[val]] += power
            seen_factor = True
            k += 1
        if not seen_factor:
            raise PolynomialError(f"dangling sign in {text!r}")
        result = result + Polynomial(variables, {tuple(exps): coef})
    return result


# ------------------------------------------------------------- division


def _reduce_dict(
    p: dict[Monomial, GaussRational],
    basis: Sequence[tuple[Monomial, GaussRational, Polynomial]],
    key,
    full: bool = True,
) -> dict[Monomial, GaussRational]:
    remainder: dict[Monomial, GaussRational] = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for lm, lc, g in basis:
            if mono_divides(lm, m):
                q = mono_div(m, lm)
                f = c / lc
                for gm, gc in g.items():
                    t = mono_mul(gm, q)
                    s = p.get(t)
                    s = -(gc * f) if s is None else s - gc * f
                    if s:
                        p[t] = s
                    else:
                        p.pop(t, None)
                break
        else:
            remainder[m] = c
            del p[m]
            if not full:
                remainder.update(p)
                return remainder
    return remainder


def _basis_data(basis: Sequence[Polynomial], order: MonomialOrder):
    out = []
    for g in basis:
        if g.is_zero():
            raise PolynomialError("zero polynomial in division basis")
        lm = g.leading_monomial(order)
        out.append((lm, g._terms[lm], g))
    return out


def normal_form(f: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> Polynomial:
    """Fully reduced remainder of f on division by `basis`."""
    for g in basis:
        f._same_ring(g)
    key = order.key_function(f.variables)
    rem = _reduce_dict(dict(f._terms), _basis_data(basis, order), key)
    return Polynomial._raw(f.variables, rem)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    lf, lg = f.leading_monomial(order), g.leading_monomial(order)
    lcm = mono_lcm(lf, lg)
    a = f.mul_term(mono_div(lcm, lf), f._terms[lf].inverse())
    b = g.mul_term(mono_div(lcm, lg), g._terms[lg].inverse())
    return a - b


def groebner(
    gens: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    max_degree: int | None = None,
) -> list[Polynomial]:
    """Reduced Groebner basis by Buchberger's algorithm.

    Pairs are processed in order of increasing lcm degree. Coprime leading
    monomials are skipped (product criterion) and so are pairs made redundant
    by a third basis element (chain criterion).
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    variables = gens[0].variables
    for g in gens:
        if g.variables != variables:
            raise PolynomialError("generators live in different rings")
    key = order.key_function(variables)

    basis: list[Polynomial] = []
    lms: list[Monomial] = []
    lcs: list[GaussRational] = []
    queue: list = []
    pending: set[tuple[int, int]] = set()
    counter = itertools.count()

    def add(poly: Polynomial):
        lm = max(poly._terms, key=key)
        if max_degree is not None and sum(lm) > max_degree:
            raise GroebnerCapError(f"basis element of degree {sum(lm)} exceeds cap {max_degree}")
        poly = poly * poly._terms[lm].inverse()
        j = len(basis)
        basis.append(poly)
        lms.append(lm)
        lcs.append(ONE)
        for i in range(j):
            lcm = mono_lcm(lms[i], lm)
            heapq.heappush(queue, (sum(lcm), key(lcm), next(counter), i, j))
            pending.add((i, j))

    def reducer():
        return [(lms[i], ONE, basis[i]) for i in range(len(basis)) if basis[i] is not None]

    for g in gens:
        r = _reduce_dict(dict(g._terms), reducer(), key)
        if r:
            add(Polynomial._raw(variables, r))

    while queue:
        _, _, _, i, j = heapq.heappop(queue)
        pending.discard((i, j))
        lcm = mono_lcm(lms[i], lms[j])
        if all(a == 0 or b == 0 for a, b in zip(lms[i], lms[j])):
            continue
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if mono_divides(lms[k], lcm):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pending and b not in pending:
                    skip = True
                    break
        if skip:
            continue
        sp = s_polynomial(basis[i], basis[j], order)
        r = _reduce_dict(dict(sp._terms), reducer(), key)
        if r:
            add(Polynomial._raw(variables, r))

    return reduce_basis(basis, order)


def reduce_basis(basis: Sequence[Polynomial], order: MonomialOrder) -> list[Polynomial]:
    """Minimalize, inter-reduce, make monic and sort descending by leading monomial."""
    if not basis:
        return []
    key = order.key_function(basis[0].variables)
    items = [(g.leading_monomial(order), g) for g in basis if not g.is_zero()]
    items.sort(key=lambda t: key(t[0]))
    minimal: list[tuple[Monomial, Polynomial]] = []
    for lm, g in items:
        if not any(mono_divides(m2, lm) for m2, _ in minimal):
            minimal.append((lm, g))
    out = []
    for idx, (lm, g) in enumerate(minimal):
        others = [(m2, g2._terms[m2], g2) for k, (m2, g2) in enumerate(minimal) if k != idx]
        r = _reduce_dict(dict(g._terms), others, key)
        p = Polynomial._raw(g.variables, r)
        out.append(p.monic(order))
    out.sort(key=lambda g: key(g.leading_monomial(order)), reverse=True)
    return out


# ---------------------------------------------------------------- ideals


@dataclass
class Ideal:
    """Generators plus a thread-safe, write-once-per-order Groebner basis cache."""

    variables: tuple[str, ...]
    generators: tuple[Polynomial, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __init__(self, variables: Sequence[str], generators: Iterable[Polynomial] = ()):
        self.variables = tuple(variables)
        gens = []
        for g in generators:
            if g.variables != self.variables:
                g = g.rename(self.variables)
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self._cache = {}
        self._lock = threading.Lock()

    @classmethod
    def parse(cls, variables: Sequence[str], texts: Iterable[str]) -> "Ideal":
        return cls(variables, [parse_polynomial(t, variables) for t in texts])

    def groebner(self, order: MonomialOrder = GREVLEX, max_degree: int | None = None) -> list[Polynomial]:
        with self._lock:
            cached = self._cache.get(order)
            if cached is None:
                cached = tuple(groebner(list(self.generators), order, max_degree=max_degree))
                self._cache[order] = cached
        return list(cached)

    def contains(self, f: Polynomial, order: MonomialOrder = GREVLEX) -> bool:
        if f.variables != self.variables:
            f = f.rename(self.variables)
        g = self.groebner(order)
        if not g:
            return f.is_zero()
        return normal_form(f, g, order).is_zero()

    def reduce(self, f: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
        g = self.groebner(order)
        return normal_form(f, g, order) if g else f

    def is_unit(self) -> bool:
        g = self.groebner()
        return len(g) == 1 and g[0].total_degree() == 0

    def same_as(self, other: "Ideal") -> bool:
        """Ideal equality via reduced grevlex bases (canonical)."""
        if set(self.variables) != set(other.variables):
            return False
        o = other if other.variables == self.variables else other.in_ring(self.variables)
        return self.groebner() == o.groebner()

    def in_ring(self, variables: Sequence[str]) -> "Ideal":
        return Ideal(variables, [g.rename(variables) for g in self.generators])

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.variables != self.variables:
            raise PolynomialError("ideal sum across different rings")
        return Ideal(self.variables, self.generators + other.generators)

    def power(self, t: int) -> "Ideal":
        if t == 0:
            return Ideal(self.variables, [Polynomial.constant(self.variables, 1)])
        gens = list(self.groebner())
        out = {Polynomial.constant(self.variables, 1)}
        for _ in range(t):
            out = {a * b for a in out for b in gens}
        return Ideal(self.variables, sorted(out, key=str))

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


def maximal_power(variables: Sequence[str], names: Sequence[str], t: int) -> list[Polynomial]:
    """Generators of m^t for the ideal m generated by `names`."""
    variables = tuple(variables)
    idx = [variables.index(v) for v in names]
    out = []
    for combo in itertools.combinations_with_replacement(idx, t):
        e = [0] * len(variables)
        for i in combo:
            e[i] += 1
        out.append(Polynomial.monomial(variables, tuple(e)))
    return out


def eliminate(ideal: Ideal, drop_vars: Iterable[str], max_degree: int | None = None) -> Ideal:
    """Intersection of the ideal with the subring in the remaining variables."""
    drop = [v for v in ideal.variables if v in set(drop_vars)]
    extra = set(drop_vars) - set(ideal.variables)
    if extra:
        raise PolynomialError(f"cannot drop unknown variables {sorted(extra)}")
    if not drop:
        return ideal
    keep = tuple(v for v in ideal.variables if v not in drop)
    basis = ideal.groebner(block_order(drop), max_degree=max_degree)
    survivors = [g.rename(keep) for g in basis if not any(g.involves(v) for v in drop)]
    return Ideal(keep, survivors)


def _fresh_name(taken: Iterable[str], stem: str = "aux") -> str:
    taken = set(taken)
    k = 0
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def saturate(
    ideal: Ideal,
    f: Polynomial,
    max_rounds: int = 32,
    max_degree: int = 64,
) -> Ideal:
    """Saturation I : f^inf by the auxiliary-variable method.

    Each round adjoins w with w*f - 1 and eliminates w. Rounds repeat until the
    reduced basis stops changing; exceeding either cap raises SaturationError.
    """
    if f.is_zero():
        raise PolynomialError("cannot saturate by zero")
    if f.variables != ideal.variables:
        f = f.rename(ideal.variables)
    current = ideal
    for _ in range(max_rounds):
        w = _fresh_name(current.variables, "w_sat")
        ring = current.variables + (w,)
        gens = [g.rename(ring) for g in current.generators]
        gens.append(Polynomial.var(ring, w) * f.rename(ring) - 1)
        try:
            nxt = eliminate(Ideal(ring, gens), [w], max_degree=max_degree)
        except GroebnerCapError as exc:
            raise SaturationError(f"saturation exceeded degree cap {max_degree}") from exc
        if nxt.groebner() == current.groebner():
            return current if current.generators else nxt
        current = Ideal(nxt.variables, nxt.groebner())
    raise SaturationError(f"saturation did not stabilize within {max_rounds} rounds")


# -------------------------------------------------------------- colength


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0


INFINITE = _Infinite()


def standard_monomial_count(
    leading: Sequence[Monomial], nvars: int, predicate: Callable[[Monomial], bool] | None = None
):
    """Count monomials outside the monomial ideal spanned by `leading`.

    Returns INFINITE if some variable has no pure-power leading monomial.
    `predicate` restricts the count to monomials satisfying it.
    """
    if any(sum(m) == 0 for m in leading):
        return 0
    bounds = []
    for i in range(nvars):
        pure = [m[i] for m in leading if m[i] > 0 and all(m[j] == 0 for j in range(nvars) if j != i)]
        if not pure:
            return INFINITE
        bounds.append(min(pure))
    count = 0
    e = [0] * nvars

    def rec(i: int):
        nonlocal count
        if i == nvars:
            mono = tuple(e)
            if predicate is None or predicate(mono):
                count += 1
            return
        for a in range(bounds[i]):
            e[i] = a
            partial = tuple(e[: i + 1]) + (0,) * (nvars - i - 1)
            if any(mono_divides(m, partial) for m in leading):
                break
            rec(i + 1)
        e[i] = 0

    rec(0)
    return count


def colength(ideal: Ideal, order: MonomialOrder = GREVLEX):
    """dim_C of the quotient ring, or INFINITE."""
    basis = ideal.groebner(order)
    n = len(ideal.variables)
    if not basis:
        return 1 if n == 0 else INFINITE
    leading = [g.leading_monomial(order) for g in basis]
    return standard_monomial_count(leading, n)


def standard_monomials(ideal: Ideal, order: MonomialOrder = GREVLEX) -> list[Monomial]:
    """Explicit standard monomials of a zero-dimensional ideal."""
    basis = ideal.groebner(order)
    leading = [g.leading_monomial(order) for g in basis]
    found: list[Monomial] = []
    n = len(ideal.variables)
    if standard_monomial_count(leading, n) is INFINITE:
        raise PolynomialError("quotient is infinite dimensional")

    def keep(m):
        found.append(m)
        return True

    standard_monomial_count(leading, n, keep)
    return found
