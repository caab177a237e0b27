"""Radial eigenvalue references built on modified Bessel functions.

The disk and circle ground states reduce to one transcendental equation in
the radial wavenumber each; these are solved here by bracketed root-finding.
The reference path shares no discretization with the finite element solver,
so agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

import math

import scipy.special
from scipy.optimize import brentq

from .errors import ValidationError


def i0(x: float) -> float:
    """Modified Bessel function I0."""
    return float(scipy.special.i0(float(x)))


def i1(x: float) -> float:
    """Modified Bessel function I1."""
    return float(scipy.special.i1(float(x)))


def k0(x: float) -> float:
    """Modified Bessel function K0 (positive arguments only)."""
    x = float(x)
    if x <= 0.0:
        raise ValidationError("K0 requires x > 0")
    return float(scipy.special.k0(x))


def k1(x: float) -> float:
    """Modified Bessel function K1 (positive arguments only)."""
    x = float(x)
    if x <= 0.0:
        raise ValidationError("K1 requires x > 0")
    return float(scipy.special.k1(x))


def _expand_bracket(f, lo: float, hi: float) -> tuple[float, float]:
    flo = f(lo)
    for _ in range(60):
        if flo * f(hi) < 0:
            return lo, hi
        hi *= 2.0
    raise ValidationError("no sign change found for the radial root")


def disk_robin_ground_energy(alpha: float, radius: float = 1.0) -> float:
    """Ground-state energy of the Robin disk from the radial equation.

    The radially symmetric ground state at negative energy -k^2 satisfies
    ``k I1(kR) = alpha I0(kR)``; the returned value is ``-k^2``.
    """
    if alpha < 0:
        raise ValidationError("disk reference requires alpha >= 0")
    R = float(radius)
    if not R > 0:
        raise ValidationError("disk reference requires a positive radius")
    if alpha == 0:
        return 0.0

    def f(k):
        return k * i1(k * R) - alpha * i0(k * R)

    lo, hi = _expand_bracket(f, 1e-12, alpha + 2.0 / R + 2.0)
    k = brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    return -k * k


def circle_delta_ground_energy(alpha: float, radius: float = 1.0) -> float:
    """Ground-state energy of the delta interaction on a circle in the plane.

    Matching I0 inside to K0 outside with derivative jump ``-alpha u`` across
    the circle reduces, via the Wronskian, to ``alpha R I0(kR) K0(kR) = 1``;
    the returned value is ``-k^2``.
    """
    if alpha <= 0:
        raise ValidationError("circle delta reference requires alpha > 0")
    R = float(radius)
    if not R > 0:
        raise ValidationError("circle delta reference requires a positive radius")

    def g(k):
        return alpha * R * i0(k * R) * k0(k * R) - 1.0

    lo = 1e-12
    hi = alpha + 2.0 / R
    if g(lo) < 0:
        raise ValidationError("circle delta bracket failed near zero")
    while g(hi) > 0:
        hi *= 2.0
    k = brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    return -k * k


def line_delta_energy(alpha: float) -> float:
    """Ground-state energy of the delta interaction on a straight line."""
    return -0.25 * alpha * alpha


def half_plane_energy(alpha: float) -> float:
    """Ground-state energy of the Robin half-plane."""
    return -alpha * alpha
