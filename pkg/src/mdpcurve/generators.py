"""Deterministic test corpora: Koch samples, Cantor dust, circles, grids, uniform clouds."""

from math import cos, pi, sin, sqrt

import numpy as np

from .geom import convex_hull, diameter_pair

KINDS = ("koch", "cantor_dust", "circle", "random_uniform", "grid")


def koch(level: int) -> np.ndarray:
    """The ``4**level + 1`` vertices of the Koch polyline, rescaled to diameter 1."""
    if level < 0:
        raise ValueError("level must be >= 0")
    pts = [np.array([0.0, 0.0]), np.array([1.0, 0.0])]
    c, s = cos(pi / 3), sin(pi / 3)
    rot = np.array([[c, -s], [s, c]])
    for _ in range(level):
        out = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            d = (b - a) / 3.0
            p1 = a + d
            p3 = a + 2.0 * d
            p2 = p1 + rot @ d
            out.extend([p1, p2, p3, b])
        pts = out
    arr = np.array(pts)
    diam = diameter_pair(convex_hull(arr))[2]
    return arr / diam


def cantor_dust(level: int) -> np.ndarray:
    """Lower-left corners of the ``4**level`` squares of the ratio-1/4 planar Cantor set."""
    if level < 0:
        raise ValueError("level must be >= 0")
    corners = np.zeros((1, 2))
    size = 1.0
    for _ in range(level):
        size /= 4.0
        offs = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [3.0, 3.0]]) * size
        corners = (corners[:, None, :] + offs[None, :, :]).reshape(-1, 2)
    return corners[np.lexsort((corners[:, 1], corners[:, 0]))]


def circle(n: int) -> np.ndarray:
    """``n`` equally spaced points on the circle of diameter 1 centered at (1/2, 1/2)."""
    t = 2.0 * pi * np.arange(n) / n
    return np.stack([0.5 + 0.5 * np.cos(t), 0.5 + 0.5 * np.sin(t)], axis=1)


def random_uniform(n: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, 2))


def grid(n: int) -> np.ndarray:
    """``n x n`` lattice spanning the unit square."""
    if n == 1:
        return np.array([[0.0, 0.0]])
    t = np.linspace(0.0, 1.0, n)
    X, Y = np.meshgrid(t, t, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def generate(kind: str, level: int = 3, n: int = 64, seed: int = 0) -> np.ndarray:
    if kind == "koch":
        return koch(level)
    if kind == "cantor_dust":
        return cantor_dust(level)
    if kind == "circle":
        return circle(n)
    if kind == "random_uniform":
        return random_uniform(n, seed)
    if kind == "grid":
        return grid(n)
    raise ValueError(f"unknown generator {kind!r}")
