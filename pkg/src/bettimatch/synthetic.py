"""Synthetic volumes with known topology.

Each builder returns a binary float64 volume (foreground 1.0) whose
foreground, read as a superlevel set at threshold 0.5, realizes the
advertised Betti numbers once the grid is fine enough.  Radii are
fractions of the grid edge so the shapes scale with ``n``; walls stay
at least two voxels thick down to n = 16 so the vertex-built complex
does not tear along diagonals.

    ball        (1, 0, 0)
    shell       (1, 0, 1)
    torus       (1, 1, 0)
    torus_shell (1, 2, 1)
    two_balls   (2, 0, 0)
"""

import numpy as np

__all__ = [
    "ball",
    "shell",
    "torus",
    "torus_shell",
    "two_balls",
    "smoothed_noise",
]


def _radial(n: int, center=None) -> np.ndarray:
    """Distance of every voxel from ``center`` (grid midpoint by default)."""
    axes = np.indices((n, n, n)).astype(np.float64)
    if center is None:
        center = ((n - 1) / 2.0,) * 3
    return np.sqrt(sum((ax - c) ** 2 for ax, c in zip(axes, center)))


def ball(n: int, radius: float = 0.35) -> np.ndarray:
    return (_radial(n) <= radius * n).astype(np.float64)


def shell(n: int, outer: float = 0.4, inner: float = 0.22) -> np.ndarray:
    r = _radial(n)
    return ((r <= outer * n) & (r >= inner * n)).astype(np.float64)


def _tube_distance(n: int, ring_radius: float) -> np.ndarray:
    """Distance to the circle of radius ring_radius*n in the midplane."""
    x, y, z = np.indices((n, n, n)).astype(np.float64)
    c = (n - 1) / 2.0
    rho = np.sqrt((x - c) ** 2 + (y - c) ** 2)
    return np.sqrt((rho - ring_radius * n) ** 2 + (z - c) ** 2)


def torus(n: int, ring: float = 0.3, tube: float = 0.14) -> np.ndarray:
    return (_tube_distance(n, ring) <= tube * n).astype(np.float64)


def torus_shell(n: int, ring: float = 0.29, outer: float = 0.17, inner: float = 0.07) -> np.ndarray:
    d = _tube_distance(n, ring)
    return ((d <= outer * n) & (d >= inner * n)).astype(np.float64)


def two_balls(n: int, radius: float = 0.18) -> np.ndarray:
    shift = 0.22 * n
    c = (n - 1) / 2.0
    a = _radial(n, (c - shift, c, c)) <= radius * n
    b = _radial(n, (c + shift, c, c)) <= radius * n
    return (a | b).astype(np.float64)


def smoothed_noise(n: int, seed: int = 0, passes: int = 2) -> np.ndarray:
    """Box-blurred uniform noise; a hard, feature-rich benchmark input."""
    values = np.random.default_rng(seed).random((n, n, n))
    for _ in range(passes):
        acc = values.copy()
        for axis in range(3):
            acc += np.roll(values, 1, axis) + np.roll(values, -1, axis)
        values = acc / 7.0
    return values
