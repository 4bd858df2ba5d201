"""Topological magnetic fields: the field-space monopole, its momentum-space
transform, the regularized string field, and a finite-difference curl oracle.

Reduced units throughout (hbar/(2e) = 1): the monopole field is b/|b|^3 with
total sphere flux 4 pi.  The momentum-space transform uses the cyclic
cross-product ordering

    Omega_x = b.(d_y b x d_z b)/|b|^3,   and cyclic permutations,

which is the ordering validated by the curl oracle: for the identity map
b = k it reproduces k/|k|^3 for branch +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFieldError
from .fields import SpinorSystem, SystemKind, _check_k, eval_field, field_jacobian, field_magnitude
from .gauge import Chart, Space, _check_b, pullback_components_K


@dataclass(frozen=True)
class CurvatureVector:
    """Curvature value tagged with its space and branch."""

    components: np.ndarray
    space: Space
    branch: int


def monopole_components_B(b, branch: int = +1) -> np.ndarray:
    b, mag = _check_b(b)
    return branch * b / (mag**3)[..., None]


def monopole_curvature_B(b, branch: int = +1) -> CurvatureVector:
    """Field-space monopole curvature branch * b/|b|^3 (string excluded)."""
    return CurvatureVector(monopole_components_B(b, branch), Space.B, branch)


def curvature_components_K(system: SpinorSystem, k, branch: int | None = None) -> np.ndarray:
    if branch is None:
        branch = system.branch
    k = _check_k(k)
    b = eval_field(system, k)
    mag = field_magnitude(b)
    if np.any(mag == 0.0):
        raise DegenerateFieldError("curvature undefined where the field vanishes")
    jac = field_jacobian(system, k)
    d_x, d_y, d_z = jac[..., 0], jac[..., 1], jac[..., 2]
    unit = b / (mag**3)[..., None]
    comps = np.stack(
        [
            np.einsum("...i,...i->...", unit, np.cross(d_y, d_z)),
            np.einsum("...i,...i->...", unit, np.cross(d_z, d_x)),
            np.einsum("...i,...i->...", unit, np.cross(d_x, d_y)),
        ],
        axis=-1,
    )
    return branch * comps


def curvature_K(system: SpinorSystem, k, branch: int | None = None) -> CurvatureVector:
    """Momentum-space curvature of a b(k) system (cyclic ordering, see module doc)."""
    if branch is None:
        branch = system.branch
    return CurvatureVector(curvature_components_K(system, k, branch), Space.K, branch)


def numeric_curl_oracle(
    system: SpinorSystem, k, chart: Chart, branch: int = +1, h: float = 1e-4
) -> CurvatureVector:
    """Central-difference curl of the pulled-back gauge potential.

    Independent ground truth for ``curvature_K``: it never touches the
    algebraic curvature formula, only the gauge.  Every stencil point must
    stay off the field's zero locus and off the chart's singular axis.
    """
    k = _check_k(k)

    def gauge(point):
        return pullback_components_K(system, point, chart, branch)

    derivs = []  # derivs[j][..., i] = d a_i / d k_j
    for j in range(3):
        step = np.zeros_like(k)
        step[..., j] = h
        derivs.append((gauge(k + step) - gauge(k - step)) / (2.0 * h))
    curl = np.stack(
        [
            derivs[1][..., 2] - derivs[2][..., 1],
            derivs[2][..., 0] - derivs[0][..., 2],
            derivs[0][..., 1] - derivs[1][..., 0],
        ],
        axis=-1,
    )
    return CurvatureVector(curl, Space.K, branch)


def analytic_curvature_reference(system: SpinorSystem, k, branch: int = +1) -> CurvatureVector:
    """Closed-form curvature candidates for the two cubic-in-k catalog systems.

    Kept solely for comparison against ``curvature_K`` and the curl oracle.
    The cubic entry's scalar prefactor (kx^2 - ky^2) + cyclic sums to zero
    identically, so that candidate evaluates to the zero vector everywhere;
    the verification suite reports its discrepancy against the oracle rather
    than papering over it.
    """
    k = _check_k(k)
    b = eval_field(system, k)
    mag = field_magnitude(b)
    if np.any(mag == 0.0):
        raise DegenerateFieldError("curvature undefined where the field vanishes")
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    if system.kind is SystemKind.CUBIC_DRESSELHAUS:
        scalar = (kx**2 - ky**2) + (ky**2 - kz**2) + (kz**2 - kx**2)
        vec = np.stack(np.broadcast_arrays(kx, ky, kz), axis=-1)
    elif system.kind is SystemKind.PEREL_DRESSELHAUS:
        scalar = ky**2 - kx**2
        vec = np.stack(np.broadcast_arrays(kz**4 * kx, kz**4 * ky, kz**5), axis=-1)
    else:
        raise ValueError("closed-form curvature is tabulated only for the cubic-in-k systems")
    comps = branch * (scalar / (2.0 * mag**3))[..., None] * vec
    return CurvatureVector(comps, Space.K, branch)


def regularized_string_components(b, epsilon: float) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape[-1:] != (3,):
        raise ValueError(f"field vector must have 3 components, got shape {b.shape}")
    if not (isinstance(epsilon, (int, float)) and epsilon > 0.0):
        raise ValueError(f"regularization epsilon must be positive, got {epsilon!r}")
    eps_sq = float(epsilon) ** 2
    bz = b[..., 2]
    r = np.sqrt(np.sum(b * b, axis=-1) + eps_sq)
    string = eps_sq / (r**2 * (r - bz) ** 2) + eps_sq / (r**3 * (r - bz))
    comps = b / (r**3)[..., None]
    comps = comps.copy()
    comps[..., 2] -= string
    return comps


def regularized_string_field(b, epsilon: float) -> CurvatureVector:
    """Everywhere-regular curvature of the epsilon-regularized south gauge.

    Omega(b, eps) = b/R^3 - (eps^2/(R^2 (R - bz)^2) + eps^2/(R^3 (R - bz))) zhat
    with R^2 = |b|^2 + eps^2.  Off the +z axis the string terms are O(eps^2);
    on the axis they carry the compensating -4 pi flux tube, so the total
    sphere flux tends to zero as eps -> 0.
    """
    return CurvatureVector(regularized_string_components(b, epsilon), Space.B, +1)
