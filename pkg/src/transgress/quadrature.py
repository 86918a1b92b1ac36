"""Area quadrature on boxes and disks in C, with refinement around singular points.

Smooth regions use tensor Gauss-Legendre. Around each declared singular
center the enclosing box is cut into triangles from the center to the box
edges; each triangle is integrated in polar coordinates with Gauss-Legendre
in the angle and geometric radial panels (ratio 1/2) down to a fixed depth.
This integrates r log r and similar integrable singularities to high accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _gl_interval(a: float, b: float, order: int):
    x, w = gauss_legendre(order)
    return a + (b - a) * x, (b - a) * w


def _radial_panels(depth: int, ratio: float = 0.5) -> list[tuple[float, float]]:
    """Panels of [0, 1]: [r^(j+1), r^j] for j < depth, then [0, r^depth]."""
    panels = [(ratio ** (j + 1), ratio**j) for j in range(depth)]
    panels.append((0.0, ratio**depth))
    return panels


@dataclass(frozen=True)
class Rule:
    points: np.ndarray  # complex (N,)
    weights: np.ndarray  # real area weights (N,)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))

    def __add__(self, other: "Rule") -> "Rule":
        return Rule(np.concatenate([self.points, other.points]), np.concatenate([self.weights, other.weights]))

    @property
    def size(self) -> int:
        return self.points.size


def tensor_rule(box: tuple[float, float, float, float], order: int) -> Rule:
    x0, x1, y0, y1 = box
    xs, wx = _gl_interval(x0, x1, order)
    ys, wy = _gl_interval(y0, y1, order)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    W = np.outer(wx, wy)
    return Rule((X + 1j * Y).ravel(), W.ravel())


def polar_box_rule(
    center: complex,
    box: tuple[float, float, float, float],
    angular_order: int,
    radial_order: int,
    depth: int,
) -> Rule:
    """Polar rule over a box around an interior (or boundary) point."""
    x0, x1, y0, y1 = box
    corners = [complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    pts, wts = [], []
    panels = _radial_panels(depth)
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        ea, eb = a - center, b - center
        if abs(ea) == 0 or abs(eb) == 0:
            continue
        t0 = math.atan2(ea.imag, ea.real)
        t1 = math.atan2(eb.imag, eb.real)
        while t1 <= t0:
            t1 += 2 * math.pi
        if t1 - t0 >= math.pi - 1e-15:
            continue  # center lies on this edge
        # distance from center to the edge line, and the normal angle
        edge = b - a
        normal = complex(edge.imag, -edge.real) / abs(edge)
        dist = ((a - center).real * normal.real + (a - center).imag * normal.imag)
        if dist <= 0:
            normal, dist = -normal, -dist
        phi = math.atan2(normal.imag, normal.real)
        th, wth = _gl_interval(t0, t1, angular_order)
        rmax = dist / np.cos(th - phi)
        for lo, hi in panels:
            s, ws = _gl_interval(lo, hi, radial_order)
            S, TH = np.meshgrid(s, th, indexing="ij")
            R = S * rmax[None, :]
            W = np.outer(ws * s, wth * rmax**2)
            pts.append((center + R * np.exp(1j * TH)).ravel())
            wts.append(W.ravel())
    if not pts:
        return Rule(np.zeros(0, complex), np.zeros(0))
    return Rule(np.concatenate(pts), np.concatenate(wts))


def _split_boxes(box, centers: Sequence[complex]):
    """Bisect until every sub-box holds at most one center."""
    if len(centers) <= 1:
        return [(box, centers[0] if centers else None)]
    x0, x1, y0, y1 = box
    xs = sorted({c.real for c in centers})
    ys = sorted({c.imag for c in centers})
    if len(xs) == 1 and len(ys) == 1:
        raise ValueError("coincident singular centers")
    if xs[-1] - xs[0] >= ys[-1] - ys[0]:
        k = len(xs) // 2
        cut = 0.5 * (xs[k - 1] + xs[k])
        low = [c for c in centers if c.real < cut]
        high = [c for c in centers if c.real > cut]
        return _split_boxes((x0, cut, y0, y1), low) + _split_boxes((cut, x1, y0, y1), high)
    k = len(ys) // 2
    cut = 0.5 * (ys[k - 1] + ys[k])
    low = [c for c in centers if c.imag < cut]
    high = [c for c in centers if c.imag > cut]
    return _split_boxes((x0, x1, y0, cut), low) + _split_boxes((x0, x1, cut, y1), high)


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature over a box with declared singular centers."""

    box: tuple[float, float, float, float]
    order: int = 48
    centers: tuple[complex, ...] = ()
    depth: int = 24
    radial_order: int = 16
    angular_order: int = 32

    def rule(self) -> Rule:
        return _cached_rule(self)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> complex:
        r = self.rule()
        return r.integrate(f(r.points))

    def refined(self, depth: int) -> "QuadratureGrid":
        return QuadratureGrid(self.box, self.order, self.centers, depth, self.radial_order, self.angular_order)

    def volume(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)


@lru_cache(maxsize=64)
def _cached_rule(grid: QuadratureGrid) -> Rule:
    rules = []
    x0, x1, y0, y1 = grid.box
    inside = [complex(c) for c in grid.centers if x0 <= complex(c).real <= x1 and y0 <= complex(c).imag <= y1]
    for sub, center in _split_boxes(grid.box, inside):
        if center is None:
            rules.append(tensor_rule(sub, grid.order))
        else:
            rules.append(polar_box_rule(center, sub, grid.angular_order, grid.radial_order, grid.depth))
    out = rules[0]
    for r in rules[1:]:
        out = out + r
    return out


@lru_cache(maxsize=64)
def disk_rule(
    radius: float = 1.0,
    center: complex = 0j,
    radial_order: int = 32,
    n_theta: int = 64,
    depth: int = 0,
) -> Rule:
    """Polar rule on a disk: trapezoid in the angle, Gauss-Legendre in r.

    depth > 0 adds geometric radial panels toward the center.
    """
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    wth = np.full(n_theta, 2 * math.pi / n_theta)
    if depth:
        pieces = [_gl_interval(lo, hi, radial_order) for lo, hi in _radial_panels(depth)]
        r = np.concatenate([p[0] for p in pieces]) * radius
        wr = np.concatenate([p[1] for p in pieces]) * radius
    else:
        r, wr = _gl_interval(0.0, radius, radial_order)
    R, TH = np.meshgrid(r, th, indexing="ij")
    W = np.outer(wr * r, wth)
    return Rule((center + R * np.exp(1j * TH)).ravel(), W.ravel())


def _two_sided_panels(inner_depth: int, outer_depth: int) -> list[tuple[float, float]]:
    """Panels of [0, 1], geometric toward 0 below 1/2 and toward 1 above."""
    panels = [(0.0, 0.5**inner_depth)]
    panels += [(0.5 ** (j + 1), 0.5**j) for j in range(inner_depth - 1, 0, -1)]
    panels += [(1 - 0.5**j, 1 - 0.5 ** (j + 1)) for j in range(1, outer_depth)]
    panels.append((1 - 0.5**outer_depth, 1.0))
    return panels


@lru_cache(maxsize=256)
def ball_rule(
    center: complex,
    radius: float,
    pole: complex | None = None,
    n_theta: int = 96,
    radial_order: int = 16,
    inner_depth: int = 24,
    outer_depth: int = 14,
) -> Rule:
    """Rule on the disk |z - center| <= radius by rays from an interior pole.

    The angle uses the trapezoid rule; along each ray the radial fraction has
    geometric panels toward the pole (log-type singularities) and toward the
    boundary circle (flat bump edges).
    """
    pole = center if pole is None else complex(pole)
    d = pole - center
    if abs(d) >= radius:
        raise ValueError("pole must lie inside the disk")
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    wth = np.full(n_theta, 2 * math.pi / n_theta)
    e = np.exp(1j * th)
    b = (d * np.conj(e)).real
    rmax = -b + np.sqrt(b * b - abs(d) ** 2 + radius**2)
    pieces = [_gl_interval(lo, hi, radial_order) for lo, hi in _two_sided_panels(inner_depth, outer_depth)]
    s = np.concatenate([p[0] for p in pieces])
    ws = np.concatenate([p[1] for p in pieces])
    S, E = np.meshgrid(s, e, indexing="ij")
    R = S * rmax[None, :]
    W = np.outer(ws * s, wth * rmax**2)
    return Rule((pole + R * E).ravel(), W.ravel())
