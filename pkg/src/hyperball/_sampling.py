"""Seeded point-cloud helpers shared by field validation, scans and tests."""

import numpy as np


def sphere_points(rng, count, n):
    """Uniform points on S^(n-1)."""
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def ball_points(rng, count, n, rmax=1.0):
    """Volume-uniform points in the ball of radius rmax."""
    d = sphere_points(rng, count, n)
    r = rmax * rng.random(count) ** (1.0 / n)
    return d * r[:, None]


def shell_points(rng, count, n, radius):
    """Uniform points on the sphere of the given radius."""
    return radius * sphere_points(rng, count, n)
