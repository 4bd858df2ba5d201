"""Line and surface integrals: loop phases, sphere and disk fluxes, winding
numbers, and a discrete-propagator oracle for the geometric phase.

Reduced units: the loop phase carries the spin-1/2 prefactor 1/2, so a unit
winding of a planar field yields a phase of pi.  Phases are reported
unwrapped, not reduced mod 2 pi.  All quadratures are midpoint rules with a
fixed summation order, so repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateFieldError, NonPlanarFieldError
from .fields import SpinorSystem, eval_field, field_magnitude, polar_angles
from .gauge import Chart, gauge_components_B
from .curvature import curvature_components_K
from .fields import field_jacobian

# Berry-phase prefactor for a spin-1/2 in reduced units
PHASE_PREFACTOR = 0.5

_AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class LoopSpec:
    """A discretized closed path.

    Circles are parametrized exactly (sample points lie on the circle,
    displacement elements use the analytic tangent); polylines subdivide
    their straight segments.  ``orientation`` +1 is counterclockwise as seen
    from the positive normal axis; -1 traverses the same samples backwards
    and is evaluated as the exact negation of the forward integral.
    ``turns`` > 1 traverses a circle that many times (winding loops).
    """

    kind: str
    steps: int
    orientation: int = +1
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 0.0
    normal: str = "z"
    turns: int = 1
    points: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("circle", "polyline"):
            raise ValueError(f"unknown loop kind {self.kind!r}")
        if self.steps < 8:
            raise ValueError("a loop needs at least 8 steps")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.kind == "circle":
            if self.radius <= 0:
                raise ValueError("circle radius must be positive")
            if self.normal not in _AXES:
                raise ValueError("circle normal must be one of x, y, z")
            if self.turns < 1:
                raise ValueError("turns must be a positive integer")
        else:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 3:
                raise ValueError("polyline needs at least 3 points of 3 components")
            if not np.allclose(pts[0], pts[-1], atol=0.0):
                raise ValueError("polyline must be closed (first point == last point)")

    @classmethod
    def circle(cls, radius, center=(0.0, 0.0, 0.0), normal="z", steps=4096, orientation=+1, turns=1):
        return cls("circle", steps, orientation, tuple(float(c) for c in center), float(radius), normal, turns)

    @classmethod
    def polyline(cls, points, steps=64, orientation=+1):
        pts = tuple(tuple(float(x) for x in p) for p in points)
        return cls("polyline", steps, orientation, points=pts)

    def _circle_frame(self):
        # in-plane unit vectors (u, v) so k(alpha) = center + r (u cos + v sin)
        axis = _AXES[self.normal]
        u = np.zeros(3)
        v = np.zeros(3)
        u[(axis + 1) % 3] = 1.0
        v[(axis + 2) % 3] = 1.0
        return u, v

    def segments(self):
        """Midpoint samples and displacement elements (forward orientation).

        Returns (mids, deltas): arrays of shape (n, 3) with sum(deltas) == 0.
        The sign for orientation -1 is applied by the integrators.
        """
        if self.kind == "circle":
            n = self.steps
            total = 2.0 * np.pi * self.turns
            d_alpha = total / n
            alpha_mid = (np.arange(n) + 0.5) * d_alpha
            u, v = self._circle_frame()
            center = np.asarray(self.center)
            mids = center + self.radius * (np.outer(np.cos(alpha_mid), u) + np.outer(np.sin(alpha_mid), v))
            tangents = self.radius * (np.outer(-np.sin(alpha_mid), u) + np.outer(np.cos(alpha_mid), v))
            return mids, tangents * d_alpha
        pts = np.asarray(self.points, dtype=float)
        sub = max(1, int(np.ceil(self.steps / (len(pts) - 1))))
        mids = []
        deltas = []
        for start, stop in zip(pts[:-1], pts[1:]):
            frac = (np.arange(sub) + 0.5) / sub
            mids.append(start + np.outer(frac, stop - start))
            deltas.append(np.tile((stop - start) / sub, (sub, 1)))
        return np.concatenate(mids), np.concatenate(deltas)

    def path_points(self):
        """Dense sample points along the loop (closure point included)."""
        if self.kind == "circle":
            n = self.steps
            total = 2.0 * np.pi * self.turns
            alpha = np.arange(n + 1) * (total / n)
            u, v = self._circle_frame()
            center = np.asarray(self.center)
            pts = center + self.radius * (np.outer(np.cos(alpha), u) + np.outer(np.sin(alpha), v))
        else:
            mids, _ = self.segments()
            pts = np.concatenate([mids, mids[:1]])
        return pts if self.orientation == +1 else pts[::-1]


@dataclass(frozen=True)
class SphereSpec:
    """Midpoint quadrature grid over a full sphere."""

    radius: float
    n_theta: int = 256
    n_phi: int = 256

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")
        if self.n_theta < 16 or self.n_phi < 16:
            raise ValueError("sphere grid needs at least 16 points per direction")


@dataclass(frozen=True)
class PhaseResult:
    phase: float  # radians, unwrapped
    chart_switches: int
    branch: int


def berry_phase_loop(
    system: SpinorSystem, loop: LoopSpec, branch: int = +1, chart: Optional[Chart] = None
) -> PhaseResult:
    """Loop phase (1/2) sum a(k_mid) . dk with per-point automatic charts.

    ``chart`` forces a single chart for both-chart consistency checks; the
    default picks north/south per sample point.  Raises DegenerateFieldError
    if the field vanishes on any sample.
    """
    mids, deltas = loop.segments()
    b = eval_field(system, mids)
    mags = field_magnitude(b)
    if np.any(mags == 0.0):
        raise DegenerateFieldError("loop passes through a field zero")
    if chart is None:
        north = b[:, 2] >= 0.0
    else:
        north = np.full(len(b), chart is Chart.NORTH)
    a_b = np.empty_like(b)
    if np.any(north):
        a_b[north] = gauge_components_B(b[north], Chart.NORTH, branch)
    if np.any(~north):
        a_b[~north] = gauge_components_B(b[~north], Chart.SOUTH, branch)
    jac = field_jacobian(system, mids)
    a_k = np.einsum("ni,nij->nj", a_b, jac)
    phase = PHASE_PREFACTOR * float(np.sum(a_k * deltas))
    switches = int(np.count_nonzero(north[1:] != north[:-1]))
    return PhaseResult(loop.orientation * phase, switches, branch)


def flux_sphere(field: Callable[[np.ndarray], np.ndarray], sphere: SphereSpec) -> float:
    """Midpoint quadrature of the outward flux of a vector field over a sphere.

    ``field`` maps an (..., 3) array of evaluation points to (..., 3) field
    values; it is called once with the whole grid.
    """
    d_theta = np.pi / sphere.n_theta
    d_phi = 2.0 * np.pi / sphere.n_phi
    theta = (np.arange(sphere.n_theta) + 0.5) * d_theta
    phi = (np.arange(sphere.n_phi) + 0.5) * d_phi
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    normals = np.empty((sphere.n_theta, sphere.n_phi, 3))
    normals[..., 0] = sin_t[:, None] * np.cos(phi)[None, :]
    normals[..., 1] = sin_t[:, None] * np.sin(phi)[None, :]
    normals[..., 2] = cos_t[:, None] * np.ones_like(phi)[None, :]
    values = np.asarray(field(sphere.radius * normals), dtype=float)
    if values.shape != normals.shape:
        raise ValueError(f"field returned shape {values.shape}, expected {normals.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field returned non-finite samples on the sphere")
    radial = np.einsum("tpi,tpi->tp", values, normals)
    weights = (sphere.radius**2) * sin_t * d_theta * d_phi
    return float(np.sum(radial * weights[:, None]))


def flux_disk(
    system: SpinorSystem,
    radius: float,
    branch: int = +1,
    n_r: int = 2048,
    n_phi: int = 64,
    inner_radius: Optional[float] = None,
) -> float:
    """Flux of the momentum-space curvature z component through a kz = 0 disk.

    When the field vanishes at the disk center (all the planar catalog
    systems) the disk is punctured with an inner cutoff of 1e-3 * radius, so
    only the smooth part of the curvature is integrated; their delta-function
    weight at the origin is recovered by ``berry_phase_loop`` via Stokes.
    Fields that stay nonzero at the center are integrated over the full disk.
    """
    if radius <= 0:
        raise ValueError("disk radius must be positive")
    if inner_radius is None:
        b0 = eval_field(system, np.zeros(3))
        inner_radius = 0.0 if field_magnitude(b0) > 0.0 else 1e-3 * radius
    if not 0.0 <= inner_radius < radius:
        raise ValueError("inner radius must lie inside the disk")
    d_r = (radius - inner_radius) / n_r
    d_phi = 2.0 * np.pi / n_phi
    r_mid = inner_radius + (np.arange(n_r) + 0.5) * d_r
    phi_mid = (np.arange(n_phi) + 0.5) * d_phi
    points = np.zeros((n_r, n_phi, 3))
    points[..., 0] = r_mid[:, None] * np.cos(phi_mid)[None, :]
    points[..., 1] = r_mid[:, None] * np.sin(phi_mid)[None, :]
    omega_z = curvature_components_K(system, points, branch)[..., 2]
    return float(np.sum(omega_z * r_mid[:, None]) * d_r * d_phi)


def winding_number(system: SpinorSystem, loop: LoopSpec) -> int:
    """Integer rotation count of a planar field around a loop.

    Requires bz == 0 (relative to |b|) on every sample; the unwrapped total
    turn of atan2(by, bx) must land on an integer multiple of 2 pi within
    1e-6 of a turn.
    """
    pts = loop.path_points()
    b = eval_field(system, pts)
    mags = field_magnitude(b)
    if np.any(mags == 0.0):
        raise DegenerateFieldError("loop passes through a field zero")
    if np.any(np.abs(b[:, 2]) > 1e-12 * mags):
        raise NonPlanarFieldError("winding number requires a planar field (bz = 0) on the loop")
    angles = np.arctan2(b[:, 1], b[:, 0])
    steps = np.diff(angles)
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    total = float(np.sum(steps))
    winding = total / (2.0 * np.pi)
    nearest = round(winding)
    if abs(winding - nearest) >= 1e-6:
        raise ValueError(f"winding {winding} is not an integer; refine the loop sampling")
    return int(nearest)


def _reference_spinors(b: np.ndarray, branch: int) -> np.ndarray:
    """Single-valued eigen-spinor sections used to track the overlap phase.

    The aligned branch uses the gauge with a real upper component, the
    anti-aligned branch the gauge with a real lower component; both stay
    continuous along any path that avoids the respective poles and keep the
    reported unwrapped phase on the (1 - cos theta) convention.
    """
    theta, phi = polar_angles(b)
    half = np.asarray(theta) / 2.0
    phase = np.exp(1j * np.asarray(phi))
    if branch == +1:
        up = np.cos(half).astype(complex)
        down = np.sin(half) * phase
    else:
        up = -np.sin(half) / phase
        down = np.cos(half).astype(complex)
    return np.stack(np.broadcast_arrays(up, down), axis=-1)


def adiabatic_phase_oracle(
    b_path: Callable[[np.ndarray], np.ndarray],
    mu_b_T: float,
    steps: int,
    branch: int = +1,
) -> PhaseResult:
    """Geometric phase from the discrete spinor propagator along a closed field path.

    ``b_path`` maps parameter values t in [0, 1] (array argument) to field
    vectors; the path must close.  The total duration is scaled so the
    accumulated precession angle is ``mu_b_T``; the propagator product
    exp(-i dt b . sigma) is applied step by step to the branch eigenspinor,
    the dynamic phase (trapezoid integral of the instantaneous eigenvalue) is
    divided out, and the residual overlap phase is accumulated unwrapped.

    The sign convention is fixed so the aligned branch on a counterclockwise
    loop at constant inclination converges to +(1/2)(1 - cos theta) * total
    azimuth, the same convention the gauge-integral loop phase uses.
    """
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    if steps < 16:
        raise ValueError("the propagator product needs at least 16 steps")
    t_edges = np.linspace(0.0, 1.0, steps + 1)
    t_mids = (t_edges[:-1] + t_edges[1:]) / 2.0
    b_edges = np.asarray(b_path(t_edges), dtype=float)
    b_mids = np.asarray(b_path(t_mids), dtype=float)
    if b_edges.shape != (steps + 1, 3) or b_mids.shape != (steps, 3):
        raise ValueError("b_path must return one 3-vector per parameter value")
    mag_edges = field_magnitude(b_edges)
    mag_mids = field_magnitude(b_mids)
    if np.any(mag_edges == 0.0) or np.any(mag_mids == 0.0):
        raise DegenerateFieldError("field vanishes on the path")
    if not np.allclose(b_edges[0], b_edges[-1], rtol=0.0, atol=1e-9 * max(1.0, mag_edges[0])):
        raise ValueError("b_path must be closed: b(0) == b(1)")

    duration = mu_b_T / float(np.mean(mag_mids))
    dt = duration / steps

    # U = exp(-i dt b . sigma) in closed form per step
    angle = mag_mids * dt
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    n_hat = b_mids / mag_mids[:, None]
    u00 = cos_a - 1j * sin_a * n_hat[:, 2]
    u01 = -1j * sin_a * (n_hat[:, 0] - 1j * n_hat[:, 1])
    u10 = -1j * sin_a * (n_hat[:, 0] + 1j * n_hat[:, 1])
    u11 = cos_a + 1j * sin_a * n_hat[:, 2]

    # incremental dynamic-phase removal, trapezoid on the edge magnitudes
    dyn = np.exp(1j * branch * dt * (mag_edges[:-1] + mag_edges[1:]) / 2.0)

    refs = _reference_spinors(b_edges, branch)
    psi = refs[0].copy()
    c_prev = complex(np.vdot(refs[0], psi))
    accumulated = 0.0
    for i in range(steps):
        psi = np.array([u00[i] * psi[0] + u01[i] * psi[1], u10[i] * psi[0] + u11[i] * psi[1]])
        psi *= dyn[i]
        c = complex(np.vdot(refs[i + 1], psi))
        accumulated += float(np.angle(c * np.conj(c_prev)))
        c_prev = c
    return PhaseResult(-accumulated, 0, branch)
