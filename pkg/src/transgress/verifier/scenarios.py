"""The nine verification scenarios.

Each scenario appends checks to a Report. Numeric inputs come from the
validated config; the seed only drives randomized inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
import sympy as sp

from .. import chern_weil as cw
from .. import cone_mult as cm
from .. import cstar_action as cs
from .. import currents as cu
from .. import grassmann_corr as gc
from ..errors import ConfigError, DomainViolationError, StabilizationError
from ..exact_poly import GaussRational, Polynomial
from ..forms import (
    FormField,
    compile_expr,
    conj_expr,
    coordinate_symbols,
    exterior_ops,
    fd_exterior,
    parse_expression,
)
from ..quadrature import disk_rule
from .config import Bump, VerifierConfig
from .report import Report, bound, close, exact, predicate


# ------------------------------------------------------------ input helpers


def _expr(text: str, n: int = 1):
    try:
        return parse_expression(text, n)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from exc


def _holomorphic(text: str):
    e = _expr(text)
    (_,), (zb,) = coordinate_symbols(1)
    if zb in e.free_symbols:
        raise ConfigError(f"section component {text!r} must be holomorphic in z")
    return e


def _exact_component(expr) -> Polynomial:
    """A holomorphic sympy polynomial in z as an exact polynomial."""
    (z,), _ = coordinate_symbols(1)
    try:
        poly = sp.Poly(sp.expand(expr), z)
    except sp.PolynomialError as exc:
        raise ConfigError(f"{expr} is not a polynomial in z") from exc
    out = Polynomial.constant(("z",), 0)
    for (e,), c in poly.terms():
        re, im = sp.nsimplify(sp.re(c)), sp.nsimplify(sp.im(c))
        if not (re.is_Rational and im.is_Rational):
            raise ConfigError(f"coefficient {c} of {expr} is not Gaussian rational")
        coef = GaussRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
        out = out + Polynomial.monomial(("z",), (e,), coef)
    return out


def _cone_multiplicity(components, point: complex = 0j) -> int:
    pt = (Fraction(point.real).limit_denominator(10**6),)
    if point.imag:
        raise ConfigError("multiplicity points must be real rationals")
    section = cm.SectionData(("z",), [_exact_component(c) for c in components])
    rep = cm.multiplicity_report(section, pt, 1)
    if not rep.agree:
        raise StabilizationError("multiplicity routes disagree")
    return rep.hs_multiplicity


def _vanishing_order(components, point: complex = 0j) -> int:
    """Order of vanishing at a point, read off the Taylor expansions."""
    (z,), _ = coordinate_symbols(1)
    orders = [
        min(m[0] for m in sp.Poly(sp.expand(c.subs(z, z + point)), z).monoms())
        for c in components
        if sp.expand(c) != 0
    ]
    return min(orders)


def _bumps(bumps: list[Bump]) -> list[cu.TestForm]:
    return [
        cu.TestForm.bump(complex(*b.center), b.radius, _expr(b.poly), f"b{k}")
        for k, b in enumerate(bumps)
    ]


def _csv_name(*parts) -> str:
    return "_".join(str(p).replace("*", "").replace(" ", "") for p in parts) + ".csv"


# ------------------------------------------------------------ scenarios


def poincare_lelong(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.poincare_lelong, cfg.tolerances
    s = _holomorphic(sc.section)
    zero = complex(*sc.zero)
    h = _expr(sc.metric)
    q = sc.quadrature
    (z,), (zb,) = coordinate_symbols(1)
    mult = _cone_multiplicity([s], zero)
    rep.add(exact("normal cone multiplicity equals the vanishing order", _vanishing_order([s], zero), mult, "DERIVED"))
    c1 = cu.form_current(cw.chern_form(cw.MetricField(1, h), 1), [zero], q.depth, q.n_theta)
    T = cu.log_norm_current([s], [zero], 1j / math.pi, metric=[[h]], depth=q.depth)
    for eta in _bumps(sc.bumps):
        lhs = mult * eta.value_at((zero,)) - c1(eta)
        rep.add(close(f"[Z] - c1 = (i/pi) ddbar log|s| on {eta.label}", lhs, cu.ddbar_pair(T, eta), tol.log_singular, "PAPER"))
    # log|z| is locally integrable: the integral of |log|z|| over the unit disk is pi/2
    rule = disk_rule(1.0, 0j, 32, 64, q.depth)
    val = rule.integrate(-np.log(np.abs(rule.points)))
    rep.add(close("integral of |log|z|| over the unit disk", math.pi / 2, val, tol.quadrature, "TRIVIAL"))
    # integration by parts for a smooth potential
    g = z * zb + (z**2 + zb**2) / 3
    gf = compile_expr(g, 1)
    Tg = cu.l1_current(lambda p: gf(p[:, None]), [], depth=q.depth)
    ddg = exterior_ops(exterior_ops(FormField.function(1, g))["delbar"])["del"]
    for eta in _bumps(sc.bumps)[:2]:
        rep.add(close(f"integration by parts on {eta.label}", cu.form_current(ddg)(eta), cu.ddbar_pair(Tg, eta), tol.quadrature, "TRIVIAL"))


def generalized_pl(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.generalized_pl, cfg.tolerances
    q = sc.quadrature
    bumps = _bumps(sc.bumps)
    sections = [sc.section] + list(sc.extra_sections)
    for k, texts in enumerate(sections):
        comps = [_holomorphic(t) for t in texts]
        mult = _cone_multiplicity(comps)
        rep.add(exact(f"normal cone multiplicity of ({','.join(texts)}) equals the vanishing order",
                      _vanishing_order(comps), mult, "PAPER"))
        ib = cw.induced_bundles(cw.MetricField.flat(1, len(comps)), s=sp.Matrix(comps))
        c1 = cu.form_current(cw.chern_form(ib.line_dual, 1), [0j], q.depth, q.n_theta)
        T = cu.log_norm_current(comps, [0j], -1j / math.pi, depth=q.depth)
        label = ",".join(texts)
        for eta in bumps:
            lhs = -c1(eta) - mult * eta.value_at((0j,))
            rep.add(close(f"-c1(L*) - m delta = ddbar(-(i/pi) log|s|) for ({label}) on {eta.label}",
                          lhs, cu.ddbar_pair(T, eta), tol.transgression, "PAPER"))
    # weak limits of (lam s)^* c1(tau*)
    fs = cu.fs_chart_forms(1, 1)
    lams = [10.0**e for e in sc.log10_lambdas]
    for text in sc.sweep_sections:
        s = _holomorphic(text)
        m = _cone_multiplicity([s])
        for eta in bumps[: sc.sweep_bumps]:
            rows = cu.lambda_sweep(
                lambda l: cu.form_current(cu.pullback_family([s], fs, l), [0j], q.depth, q.n_theta)(eta), lams
            )
            rep.artifacts[_csv_name("sweep", text, eta.label)] = cu.sweep_csv(rows)
            if not rows:
                continue
            wl = cu.weak_limit([r[0] for r in rows], [r[1] for r in rows], tol.fit_residual)
            at_inf = cu.form_current(cu.pullback_family([s], fs, math.inf), [0j], q.depth, q.n_theta)(eta)
            target = at_inf + m * eta.value_at((0j,))
            rep.add(predicate(f"sweep fit accepted for s={text} on {eta.label}", wl.extrapolated,
                              wl.flags or ["accepted"], "accepted", "DERIVED"))
            rep.add(close(f"weak limit of (lam s)^* c1(tau*) for s={text} on {eta.label}", target, wl.limit,
                          tol.extrapolation, "PAPER", relative=True))


def thom_gysin(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.thom_gysin, cfg.tolerances
    q = sc.quadrature
    hexpr = _expr(sc.base_metric)
    hE = cw.MetricField(1, hexpr)
    base = np.array([[complex(*p)] for p in sc.base_points])
    hE.check_positive(base)
    hvals = hE.h(base).reshape(-1).real
    (w,), (wb,) = coordinate_symbols(1)
    bumps = _bumps(sc.bumps)
    # fiberwise: c1(tau*) - delta_0 = ddbar T with T = -(i/2pi) log(h|w|^2 / (1 + h|w|^2))
    for p, hv in zip(sc.base_points, hvals):
        hs = sp.nsimplify(hv)
        c1 = cu.form_current(cw.chern_form(cw.MetricField(1, 1 / (1 + hs * w * wb)), 1), [0j], q.depth, q.n_theta)

        def g(pts, hv=hv):
            r2 = hv * np.abs(pts) ** 2
            return -(1j / (2 * math.pi)) * np.log(r2 / (1 + r2))

        T = cu.l1_current(g, [0j], depth=q.depth)
        for eta in bumps:
            lhs = c1(eta) - eta.value_at((0j,))
            rep.add(close(f"c1(tau*) - [zero section] = ddbar T at base {p} on {eta.label}", lhs,
                          cu.ddbar_pair(T, eta), tol.log_singular, "PAPER"))
    # fiber integrals over P(C + E)
    ib = cw.induced_bundles(hE)
    c1t = cw.chern_form(ib.tau_dual, 1)
    fi = cw.fiber_integrate(c1t, radial_order=q.p1_radial_order, n_theta=q.p1_n_theta)(base)
    for k, p in enumerate(sc.base_points):
        rep.add(close(f"fiber integral of c1(tau*) at {p}", 1.0, fi.get(())[k], tol.quadrature, "DERIVED"))
    (Z, W), (ZB, WB) = coordinate_symbols(2)
    ht = hexpr.xreplace({coordinate_symbols(1)[0][0]: Z, coordinate_symbols(1)[1][0]: ZB})
    logs = FormField.function(2, sp.log(ht * W * WB / (1 + ht * W * WB)) / 2)
    fl = cw.fiber_integrate(logs.wedge(c1t), radial_order=16, n_theta=q.p1_n_theta, depth=q.depth)(base)
    for k, p in enumerate(sc.base_points):
        rep.add(close(f"fiber integral of log|s_tau| c1(tau*) at {p}", -0.5, fl.get(())[k], tol.log_singular, "DERIVED"))
    # the zero section pulls c1(tau*) back to zero
    pulled = cu.pullback_family([sp.Integer(0)], [c1t, None], 1.0)(base)
    rep.add(bound("zero-section pullback of c1(tau*)", pulled.max_abs(), tol.zero_section, "TRIVIAL"))


def multiplicity_localization(cfg: VerifierConfig, seed: int, rep: Report):
    sc = cfg.scenarios.multiplicity_localization
    if sc.use_corpus:
        for entry in cm.load_corpus():
            for pt, d, expected in entry.points:
                r = cm.multiplicity_report(entry.section, pt, d, name=entry.name)
                where = ",".join(r.component_point)
                rep.add(exact(f"{entry.name} at ({where}): Hilbert-Samuel", expected, r.hs_multiplicity, "DERIVED"))
                rep.add(exact(f"{entry.name} at ({where}): cone fiber degree", expected, r.cone_fiber_degree, "DERIVED"))
    for a in range(1, sc.product_law_max + 1):
        for b in range(1, sc.product_law_max + 1):
            section = cm.SectionData(("x", "y"), [f"x^{a}", f"y^{b}"])
            r = cm.multiplicity_report(section, (0, 0), 2)
            rep.add(exact(f"<x^{a}, y^{b}> Hilbert-Samuel", a * b, r.hs_multiplicity, "TRIVIAL"))
            rep.add(exact(f"<x^{a}, y^{b}> cone fiber degree", a * b, r.cone_fiber_degree, "TRIVIAL"))


def weighted_limits(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.weighted_limits, cfg.tolerances
    if len(sc.exponents) != len(sc.weights):
        raise ConfigError("one exponent list per weight is required")
    a = cs.WeightedAction((1,) * len(sc.weights), sc.weights)
    s = cs.curve_from_exponents(sc.exponents)
    n_steps = int(round(sc.log10_lambda_max / sc.log10_lambda_step))
    schedule = [sc.log10_lambda_step * k for k in range(2, n_steps + 1)]
    L = cs.empirical_limit_set(a, s, cs.default_annulus_grid(sc.n_radii, sc.n_phases), schedule,
                               cluster_tol=tol.limit_line)
    rep.artifacts["limit_points.csv"] = L.to_csv()
    counts = L.per_line(tol.limit_line)
    order = sorted(set(sc.weights))
    lines = [(i, i + 1) for i in range(len(order) - 1)]
    for pair in lines:
        n_pts = counts.get(pair, 0)
        rep.add(predicate(f"clustered interior points on line {pair}", n_pts >= sc.min_points_per_line, n_pts,
                          f">= {sc.min_points_per_line}", "PAPER"))
    stray = [p for p in L.points if p.cluster_id >= 0 and p.block_pair not in lines]
    rep.add(exact("no clusters off the predicted lines", 0, len(stray), "PAPER"))
    clustered = [p.residual for p in L.points if p.cluster_id >= 0 and p.interior]
    rep.add(bound("off-line residual of clustered interior points", max(clustered, default=math.inf),
                  tol.limit_line, "DERIVED"))


def cstar_closure(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.cstar_closure, cfg.tolerances
    for k in range(1, sc.max_k_count + 1):
        a = cs.WeightedAction((sc.block_dim,) * (k + 1), tuple(range(k + 1)))
        rep.add(exact(f"equation systems for k={k}", math.comb(k + 2, 2), len(cs.fundamental_equations(a)), "PAPER"))
        if k > sc.max_k_symbolic:
            continue
        r = cs.verify_graph_closure(a, sc.n_samples, seed, sc.lam)
        rep.add(exact(f"symbolic residual terms on graph points, k={k}", 0, r.symbolic_max_terms, "PAPER"))
        rep.add(bound(f"chordal distance of exceptional samples to graph points, k={k}", r.max_distance,
                      tol.closure, "DERIVED"))
        rep.add(exact(f"reflection symmetry of the equations, k={k}", True, cs.check_symmetry(a), "TRIVIAL"))


def _random_poly(rng: np.random.Generator, n: int, deg: int = 1):
    z, _ = coordinate_symbols(n)

    def c():
        re, im = rng.normal(size=2).round(3)
        return sp.nsimplify(re) + sp.I * sp.nsimplify(im)

    if n == 1:
        return sum(c() * z[0] ** i for i in range(deg + 1)) / 2
    return sum(c() * z[0] ** i * z[1] ** j for i in range(deg + 1) for j in range(deg + 1 - i)) / 2


def _random_metric(rng: np.random.Generator, n: int, r: int) -> cw.MetricField:
    G = sp.Matrix(r, r, lambda i, j: _random_poly(rng, n))
    return cw.MetricField(n, sp.eye(r) + conj_expr(G, n).T * G)


def superconnection_transgression(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.superconnection_transgression, cfg.tolerances
    rng = np.random.default_rng(seed)
    rp, rm = sc.ranks
    hp, hm = _random_metric(rng, 2, rp), _random_metric(rng, 2, rm)
    A = sp.Matrix(rm, rp, lambda i, j: _random_poly(rng, 2))
    data = cw.SuperBundleData(hp, hm, A)
    pts = (rng.uniform(-0.3, 0.3, (sc.n_points, 2)) + 1j * rng.uniform(-0.3, 0.3, (sc.n_points, 2)))

    def structure(d: cw.SuperBundleData, lam: float, tag: str):
        ch = cw.super_chern_character(cw.superconnection_curvature(d, lam))
        v = ch(pts)
        rep.add(bound(f"{tag} off-(p,p) part of ch at lambda={lam}", v.off_diagonal_bidegree_max(), tol.bidegree, "PAPER"))
        dch = fd_exterior(ch, "d", sc.fd_step)(pts)
        rep.add(bound(f"{tag} sup norm of d ch at lambda={lam}", dch.max_abs(), tol.closedness, "PAPER"))
        return v

    for lam in sc.lambdas:
        v = structure(data, lam, "random")
        if lam == 0:
            deg0 = v.get(())
            rep.add(predicate("degree-0 part of ch at lambda=0 is exactly r+ - r-", bool(np.all(deg0 == rp - rm)),
                              deg0.real.tolist(), str(rp - rm), "TRIVIAL"))
            c1 = (cw.chern_form(hp, 1)(pts) - cw.chern_form(hm, 1)(pts)).scale(-1)
            rep.add(bound("degree-2 part of ch at lambda=0 equals -(c1(E+) - c1(E-))",
                          (v.degree_part(2) - c1).max_abs(), tol.bidegree, "DERIVED"))
    # chain case: v+ = z1 e12 and v- = e12 on C^2 + C^2 compose to zero both ways
    (z1, _), _ = coordinate_symbols(2)
    chain = cw.SuperBundleData(_random_metric(rng, 2, 2), _random_metric(rng, 2, 2),
                               sp.Matrix([[0, z1], [0, 0]]), sp.Matrix([[0, 1], [0, 0]]))
    rep.add(bound("chain case v o v", chain.check_chain(pts), tol.bidegree, "TRIVIAL"))
    for lam in sc.lambdas:
        if lam:
            structure(chain, lam, "chain")
    # desk-scale sweep: E+ = E- = C with v = z
    flat = cw.MetricField.flat(1)
    (z,), _ = coordinate_symbols(1)
    line = cw.SuperBundleData(flat, flat, sp.Matrix([[z]]))
    lams = [10.0**e for e in sc.sweep_log10_lambdas]
    for eta in _bumps(sc.sweep_bumps):
        rows = cu.lambda_sweep(
            lambda l: cu.form_current(cw.super_chern_character(cw.superconnection_curvature(line, l)), [0j],
                                      sc.depth, sc.n_theta)(eta),
            lams,
        )
        rep.artifacts[_csv_name("superconnection_sweep", eta.label)] = cu.sweep_csv(rows)
        if not rows:
            continue
        wl = cu.weak_limit([r[0] for r in rows], [r[1] for r in rows], tol.fit_residual)
        rep.add(predicate(f"fitted decay exponent on {eta.label}", wl.alpha > 0, wl.alpha, "alpha > 0", "DERIVED"))
        ratio = wl.residual / wl.spread if wl.spread > 0 else math.inf
        rep.add(bound(f"relative fit residual on {eta.label}", ratio, tol.fit_residual, "DERIVED"))
        rep.add(close(f"limit pairing of ch against {eta.label} equals eta(0)", eta.value_at((0j,)), wl.limit,
                      tol.superconnection_limit, "PAPER"))


def correspondence_algebra(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.correspondence_algebra, cfg.tolerances
    rng = np.random.default_rng(seed)
    worst_star = worst_diamond = worst_metric = 0.0
    good = 0
    for _ in range(sc.cases):
        p, q = (int(x) for x in rng.integers(1, sc.max_dim + 1, 2))
        amb = gc.HermSpace(p, q)
        A, B = gc.random_matrix(rng, q, p), gc.random_matrix(rng, q, p)
        Bf = gc.random_matrix(rng, p, q)
        H = gc.random_pd_metric(rng, p + q)
        d1 = gc.star(gc.graph(A, amb), gc.graph(B, amb)).distance(gc.graph(A + B, amb))
        d2 = gc.diamond(gc.graph(A, amb), gc.graph_from_f(Bf, amb)).distance(gc.graph(A + Bf.conj().T, amb))
        d3 = gc.star(gc.graph(A, amb), gc.graph(B, amb), metric=H).distance(gc.star(gc.graph(A, amb), gc.graph(B, amb)))
        worst_star, worst_diamond, worst_metric = max(worst_star, d1), max(worst_diamond, d2), max(worst_metric, d3)
        good += d1 < tol.subspace and d2 < tol.subspace and d3 < tol.metric_independence
    rep.add(bound("star of graphs is the graph of the sum", worst_star, tol.subspace, "PAPER"))
    rep.add(bound("diamond of graphs is the graph of A + B*", worst_diamond, tol.subspace, "PAPER"))
    rep.add(bound("star is independent of the metric", worst_metric, tol.metric_independence, "PAPER"))
    rep.add(exact("randomized cases passing", sc.cases, good, "DERIVED"))
    # the E-plane is neutral
    amb = gc.HermSpace(2, 2)
    A = gc.random_matrix(rng, 2, 2)
    rep.add(bound("E is neutral for star", gc.star(gc.graph(A, amb), gc.e_subspace(amb)).distance(gc.graph(A, amb)),
                  tol.subspace, "TRIVIAL"))
    # on P^1 the pair (F, F) lies outside the domain
    line = gc.HermSpace(1, 1)
    dom = gc.star_domain(gc.f_subspace(line), gc.f_subspace(line))
    try:
        gc.star(gc.f_subspace(line), gc.f_subspace(line))
        raised = False
    except DomainViolationError:
        raised = True
    rep.add(exact("(F, F) on P^1 is rejected by the domain check", False, bool(dom), "TRIVIAL"))
    rep.add(exact("star raises on (F, F) over P^1", True, raised, "TRIVIAL"))
    N = np.array([[0, 1], [0, 0]], complex)
    rep.add(exact("nilpotent pair lies in the chain variety", True, gc.chain_member(gc.graph(N, amb), gc.graph_from_f(N, amb)), "DERIVED"))
    rep.add(exact("(1, 1) on C + C is not in the chain variety", False,
                  gc.chain_member(gc.graph(np.eye(1), line), gc.graph_from_f(np.eye(1), line)), "TRIVIAL"))


def metric_invariance(cfg: VerifierConfig, seed: int, rep: Report):
    sc, tol = cfg.scenarios.metric_invariance, cfg.tolerances
    fs = cw.fs_dual_metric()
    deg = cw.degree_on_p1(fs, fs, sc.radial_order, sc.n_theta)
    rep.add(close("degree of the dual tautological bundle on P^1", 1.0, deg, tol.degree, "DERIVED"))
    rng = np.random.default_rng(seed)
    for k in range(sc.perturbations):
        P = gc.random_pd_metric(rng, 2)
        P = P / P[0, 0].real
        a = round(float(P[1, 1].real), 3)
        c = complex(round(2 * P[0, 1].real, 3), round(2 * P[0, 1].imag, 3))
        m0, m1 = cw.perturbed_dual_metrics(a, c)
        deg = cw.degree_on_p1(m0, m1, sc.radial_order, sc.n_theta)
        rep.add(close(f"degree under perturbed metric {k} (a={a}, c={c})", 1.0, deg, tol.degree, "DERIVED"))


@dataclass(frozen=True)
class Scenario:
    name: str
    run: Callable[[VerifierConfig, int, Report], None]
    summary: str


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario("poincare_lelong", poincare_lelong, "[Z] - c1 = (i/pi) ddbar log|s| for a line bundle section"),
        Scenario("generalized_pl", generalized_pl, "multiplicity-weighted identity for a vector bundle section and its weak limits"),
        Scenario("thom_gysin", thom_gysin, "c1(tau*) minus the zero section is ddbar-exact on P(C + E)"),
        Scenario("multiplicity_localization", multiplicity_localization, "Hilbert-Samuel multiplicity equals the cone fiber degree"),
        Scenario("weighted_limits", weighted_limits, "limit set of a weighted curve is a union of lines"),
        Scenario("cstar_closure", cstar_closure, "graph-closure equations of a weighted action"),
        Scenario("superconnection_transgression", superconnection_transgression, "superconnection Chern characters and their limit"),
        Scenario("correspondence_algebra", correspondence_algebra, "star and diamond operations on subspaces"),
        Scenario("metric_invariance", metric_invariance, "degree of a line bundle on P^1 under metric changes"),
    ]
}


def list_scenarios() -> list[str]:
    return list(SCENARIOS)
