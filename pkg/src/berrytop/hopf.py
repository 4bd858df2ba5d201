"""Numerical checks of the fiber-bundle picture behind the two-chart gauge.

Points of the unit 3-sphere project to the unit 2-sphere through the Hopf
map; the north/south sections pull the global connection 1-form

    omega = i (-y1 dx1 + x1 dy1 - y2 dx2 + x2 dy2)

back to the chart gauges +-(1/2)(1 -+ cos theta) d phi in reduced units.
The pullback here is computed by central differences of the section
coordinates rather than symbolically, so it is an independent check on the
closed forms used by the gauge module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .gauge import Chart

# finite-difference step (radians) for the pullback
PULLBACK_STEP = 1e-5


@dataclass(frozen=True)
class S3Point:
    """A point of the unit 3-sphere as a pair of complex amplitudes."""

    z1: complex
    z2: complex

    def __post_init__(self):
        norm = abs(self.z1) ** 2 + abs(self.z2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|z1|^2 + |z2|^2 = {norm!r} is not 1")

    def as_real(self) -> tuple[float, float, float, float]:
        """Coordinates (x1, y1, x2, y2) of the embedding in R^4."""
        return (self.z1.real, self.z1.imag, self.z2.real, self.z2.imag)


@dataclass(frozen=True)
class S3Param:
    """Angle parametrization (cos(theta/2) e^{i eps1}, sin(theta/2) e^{i eps2})."""

    theta: float
    eps1: float
    eps2: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")

    def to_point(self) -> S3Point:
        half = self.theta / 2.0
        return S3Point(math.cos(half) * cmath.exp(1j * self.eps1), math.sin(half) * cmath.exp(1j * self.eps2))


def hopf_project(p: Union[S3Param, S3Point]) -> np.ndarray:
    """Project a 3-sphere point to the unit 2-sphere.

    In angles: (sin theta cos(eps1 - eps2), sin theta sin(eps1 - eps2),
    cos theta); algebraically (2 Re(z1 conj(z2)), 2 Im(z1 conj(z2)),
    |z1|^2 - |z2|^2) -- the two agree identically.
    """
    if isinstance(p, S3Param):
        delta = p.eps1 - p.eps2
        return np.array(
            [math.sin(p.theta) * math.cos(delta), math.sin(p.theta) * math.sin(delta), math.cos(p.theta)]
        )
    cross = p.z1 * p.z2.conjugate()
    return np.array([2.0 * cross.real, 2.0 * cross.imag, abs(p.z1) ** 2 - abs(p.z2) ** 2])


def section(chart: Chart, theta: float, phi: float) -> S3Point:
    """Chart section over the 2-sphere: a 3-sphere point projecting to (theta, phi).

    North: (cos(theta/2), sin(theta/2) e^{-i phi}); south:
    (cos(theta/2) e^{i phi}, sin(theta/2)).  Composing with ``hopf_project``
    recovers the spherical parametrization exactly.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    half = theta / 2.0
    if chart is Chart.NORTH:
        return S3Point(complex(math.cos(half)), math.sin(half) * cmath.exp(-1j * phi))
    return S3Point(math.cos(half) * cmath.exp(1j * phi), complex(math.sin(half)))


class OneFormCoeffs(NamedTuple):
    a_theta: float
    a_phi: float


def _section_coords(chart: Chart, theta: float, phi: float) -> np.ndarray:
    return np.array(section(chart, theta, phi).as_real())


def _omega_on_tangent(coords: np.ndarray, tangent: np.ndarray) -> complex:
    x1, y1, x2, y2 = coords
    dx1, dy1, dx2, dy2 = tangent
    return 1j * (-y1 * dx1 + x1 * dy1 - y2 * dx2 + x2 * dy2)


def omega_pullback(chart: Chart, theta: float, phi: float, step: float = PULLBACK_STEP) -> OneFormCoeffs:
    """Pull the global 1-form back through a chart section by central differences.

    Returns the real reduced coefficients (a_theta, a_phi) of d theta and
    d phi; the form evaluates to i times a real number on these tangents, and
    the residual real part of i * omega(v) is asserted below 1e-10.  Expected
    closed forms: north (0, (1/2)(1 - cos theta)), south
    (0, -(1/2)(1 + cos theta)).  The stencil is clipped to theta in [0, pi].
    """
    coords = _section_coords(chart, theta, phi)
    theta_hi, theta_lo = min(theta + step, math.pi), max(theta - step, 0.0)
    d_theta = (_section_coords(chart, theta_hi, phi) - _section_coords(chart, theta_lo, phi)) / (
        theta_hi - theta_lo
    )
    d_phi = (_section_coords(chart, theta, phi + step) - _section_coords(chart, theta, phi - step)) / (
        2.0 * step
    )
    out = []
    for tangent in (d_theta, d_phi):
        value = 1j * _omega_on_tangent(coords, tangent)
        assert abs(value.imag) < 1e-10, f"pullback coefficient not real: {value!r}"
        out.append(value.real)
    return OneFormCoeffs(out[0], out[1])


def transition_function(from_chart: Chart, to_chart: Chart, phi: float) -> complex:
    """Fiber phase relating the two sections: section(to) = g * section(from).

    g_{south->north} = e^{-i phi} and g_{north->south} = e^{+i phi}; the two
    are mutual inverses, and the chart gauges differ by exactly one unit of
    d phi in reduced units.
    """
    if from_chart is to_chart:
        raise ValueError("transition function requires two distinct charts")
    if from_chart is Chart.SOUTH:
        return cmath.exp(-1j * phi)
    return cmath.exp(1j * phi)
