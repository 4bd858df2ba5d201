"""Dirac gauge potentials on the two Wu-Yang charts, in field space and pulled
back to momentum space.

Reduced units: the physical prefactor hbar/(2e) is set to 1, so the north
gauge equals (1 - cos theta) grad(phi) and carries monopole charge 1.  The
north chart is singular only on the -z half-axis, the south chart only on
the +z half-axis; ``auto_chart`` picks whichever keeps the evaluation point
far from the singularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ChartSingularError, DegenerateFieldError
from .fields import SpinorSystem, _check_k, eval_field, field_jacobian, field_magnitude

# relative margin below which a chart denominator counts as singular
CHART_SINGULAR_RTOL = 1e-12


class Chart(Enum):
    NORTH = "north"
    SOUTH = "south"


class Space(Enum):
    B = "B"
    K = "K"


@dataclass(frozen=True)
class GaugeVector:
    """Gauge potential value tagged with its space, chart and branch."""

    components: np.ndarray
    space: Space
    chart: Chart
    branch: int


def _check_b(b) -> tuple[np.ndarray, np.ndarray]:
    b = np.asarray(b, dtype=float)
    if b.shape[-1:] != (3,):
        raise ValueError(f"field vector must have 3 components, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("field components must be finite")
    mag = field_magnitude(b)
    if np.any(mag == 0.0):
        raise DegenerateFieldError("gauge potential undefined where the field vanishes")
    return b, mag


def gauge_components_B(b, chart: Chart, branch: int = +1) -> np.ndarray:
    """Raw components of the field-space Dirac gauge on the given chart.

    North: (-by, bx, 0) / (|b| (|b| + bz));  south: (by, -bx, 0) / (|b| (|b| - bz));
    both multiplied by ``branch``.  These are the Cartesian forms of
    +-(1 -+ cos theta) grad(phi).
    """
    b, mag = _check_b(b)
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    if chart is Chart.NORTH:
        denom_factor = mag + bz
        plane = np.stack(np.broadcast_arrays(-by, bx, np.zeros_like(bx)), axis=-1)
    else:
        denom_factor = mag - bz
        plane = np.stack(np.broadcast_arrays(by, -bx, np.zeros_like(bx)), axis=-1)
    if np.any(denom_factor < CHART_SINGULAR_RTOL * mag):
        raise ChartSingularError(chart)
    return branch * plane / (mag * denom_factor)[..., None]


def dirac_gauge_B(b, chart: Chart, branch: int = +1) -> GaugeVector:
    """Field-space Dirac gauge potential on one chart (reduced units)."""
    return GaugeVector(gauge_components_B(b, chart, branch), Space.B, chart, branch)


def auto_chart(b) -> Chart:
    """North for bz >= 0, south otherwise: maximizes distance from both strings."""
    b, _ = _check_b(b)
    if b.ndim != 1:
        raise ValueError("auto_chart expects a single field vector")
    return Chart.NORTH if b[2] >= 0.0 else Chart.SOUTH


def auto_charts(b) -> np.ndarray:
    """Vectorized chart selection: True where the north chart applies."""
    b, _ = _check_b(b)
    return b[..., 2] >= 0.0


def pullback_components_K(system: SpinorSystem, k, chart: Chart, branch: int | None = None) -> np.ndarray:
    """Momentum-space gauge a_mu = sum_i a_i^B db_i/dk_mu (chain rule through b(k))."""
    if branch is None:
        branch = system.branch
    k = _check_k(k)
    b = eval_field(system, k)
    a_b = gauge_components_B(b, chart, branch)
    jac = field_jacobian(system, k)
    return np.einsum("...i,...ij->...j", a_b, jac)


def pullback_gauge_K(system: SpinorSystem, k, chart: Chart) -> GaugeVector:
    """Pull the field-space gauge back to momentum space for a b(k) system.

    The branch comes from the system; DegenerateFieldError propagates from
    field zeros (k = 0 for every builtin) and ChartSingularError from points
    whose image lies on the chart's excluded axis.
    """
    return GaugeVector(pullback_components_K(system, k, chart), Space.K, chart, system.branch)


_PLANAR_GAUGE_SIGNS = {
    # (px, py) multiplying (ky, kx)/k^2 for each planar system, branch +1
    "linear_dresselhaus": (1.0, -1.0),
    "linear_rashba": (-1.0, 1.0),
    "monolayer_graphene": (-1.0, 1.0),
    "bilayer_graphene": (-2.0, 2.0),
}


def planar_gauge_reference(system: SpinorSystem, k) -> GaugeVector:
    """Closed-form in-plane gauge for the four planar systems.

    Valid for kz = 0 and k != 0; the result is the coupling-independent
    vector (p*ky, q*kx, 0)/k^2 with (p, q) fixed per system, times the
    system branch.  Serves as an independent reference for the pullback.
    """
    signs = _PLANAR_GAUGE_SIGNS.get(system.kind.value)
    if signs is None:
        raise ValueError(f"no planar closed form for system kind '{system.kind.value}'")
    k = _check_k(k)
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    ksq = kx**2 + ky**2
    if np.any(ksq == 0.0):
        raise DegenerateFieldError("planar gauge undefined at k = 0")
    if np.any(np.abs(kz) > 0.0):
        raise ValueError("planar gauge reference requires kz = 0")
    p, q = signs
    comps = np.stack(np.broadcast_arrays(p * ky, q * kx, np.zeros_like(kx)), axis=-1)
    comps = system.branch * comps / ksq[..., None]
    return GaugeVector(comps, Space.K, Chart.NORTH, system.branch)


def chart_transition_check(b) -> float:
    """Residual | a_N - a_S - 2 grad(phi) | of the two-chart transition relation.

    grad(phi) = (-by, bx, 0)/(bx^2 + by^2).  Off both half-axes this vanishes
    identically; values above ~1e-10 indicate an implementation fault.
    """
    b, mag = _check_b(b)
    bx, by = b[..., 0], b[..., 1]
    planar_sq = bx**2 + by**2
    if np.any(planar_sq < (CHART_SINGULAR_RTOL * mag) ** 2):
        raise ChartSingularError(Chart.NORTH, "transition relation undefined on the z axis")
    a_n = gauge_components_B(b, Chart.NORTH, +1)
    a_s = gauge_components_B(b, Chart.SOUTH, +1)
    grad_phi = np.stack(np.broadcast_arrays(-by, bx, np.zeros_like(bx)), axis=-1) / planar_sq[..., None]
    residual = np.linalg.norm(a_n - a_s - 2.0 * grad_phi, axis=-1)
    return float(residual) if residual.ndim == 0 else residual
