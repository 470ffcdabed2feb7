"""Closed-form test solutions of the exchange-driven magnetization equation.

Each case carries an exact unit-length field m(x, t) together with its time
derivative and Laplacian in closed form, and the source g that makes m solve

    dm/dt = -m x Lap(m) - alpha m x (m x Lap(m)) + g.

The spatial profile is built from the bump s^2 (1-s)^2, whose derivative
vanishes at s = 0 and s = 1, so the homogeneous Neumann condition holds
exactly on the unit domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def bump(s):
    """s^2 (1-s)^2; zero with zero slope at both ends of [0, 1]."""
    return s * s * (1.0 - s) ** 2


def bump_d1(s):
    return 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)


def bump_d2(s):
    return 2.0 - 12.0 * s + 12.0 * s * s


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact solution, derivatives, and source for the sourced dynamics.

    dimension 1 uses the phase u = bump(x); dimension 3 uses
    u = bump(x) bump(y) bump(z). In both, m = (cos(u) sin t, sin(u) sin t,
    cos t), which is unit length identically.
    """

    dimension: int
    alpha: float

    def __post_init__(self):
        if self.dimension not in (1, 3):
            raise ValueError(f"dimension must be 1 or 3, got {self.dimension}")

    def _phase(self, X, Y, Z):
        if self.dimension == 1:
            return bump(X)
        return bump(X) * bump(Y) * bump(Z)

    def exact(self, X, Y, Z, t: float) -> np.ndarray:
        u = self._phase(X, Y, Z)
        st = np.sin(t)
        shape = np.broadcast(X, Y, Z).shape
        return np.stack([
            np.cos(u) * st,
            np.sin(u) * st,
            np.broadcast_to(np.cos(t), shape).copy(),
        ])

    def time_derivative(self, X, Y, Z, t: float) -> np.ndarray:
        u = self._phase(X, Y, Z)
        ct = np.cos(t)
        shape = np.broadcast(X, Y, Z).shape
        return np.stack([
            np.cos(u) * ct,
            np.sin(u) * ct,
            np.broadcast_to(-np.sin(t), shape).copy(),
        ])

    def laplacian(self, X, Y, Z, t: float) -> np.ndarray:
        """Closed-form Lap(m) by the chain rule on the phase u."""
        if self.dimension == 1:
            u = bump(X)
            lap_u = bump_d2(X)
            grad2 = bump_d1(X) ** 2
        else:
            bx, by, bz = bump(X), bump(Y), bump(Z)
            u = bx * by * bz
            lap_u = bump_d2(X) * by * bz + bx * bump_d2(Y) * bz + bx * by * bump_d2(Z)
            grad2 = ((bump_d1(X) * by * bz) ** 2
                     + (bx * bump_d1(Y) * bz) ** 2
                     + (bx * by * bump_d1(Z)) ** 2)
        st = np.sin(t)
        shape = np.broadcast(X, Y, Z).shape
        return np.stack([
            (-np.sin(u) * lap_u - np.cos(u) * grad2) * st,
            (np.cos(u) * lap_u - np.sin(u) * grad2) * st,
            np.zeros(shape),
        ])

    def source(self, X, Y, Z, t: float) -> np.ndarray:
        """g = dm/dt + m x Lap(m) + alpha m x (m x Lap(m)), all closed form."""
        m = self.exact(X, Y, Z, t)
        lap = self.laplacian(X, Y, Z, t)
        cross = np.cross(m, lap, axis=0)
        return (self.time_derivative(X, Y, Z, t)
                + cross
                + self.alpha * np.cross(m, cross, axis=0))


def case_1d(alpha: float) -> ManufacturedCase:
    return ManufacturedCase(dimension=1, alpha=alpha)


def case_3d(alpha: float) -> ManufacturedCase:
    return ManufacturedCase(dimension=3, alpha=alpha)


def neel_wall_initial(eta: float):
    """In-plane wall profile (tanh(l), sech(l), 0), l = (0.5 - x)/(2 eta).

    Sampling function for the 2D benchmark without source; eta is usually the
    mesh spacing.
    """

    def fn(X, Y, Z):
        ell = (0.5 - X) / (2.0 * eta)
        return np.tanh(ell), 1.0 / np.cosh(ell), np.zeros_like(X)

    return fn
