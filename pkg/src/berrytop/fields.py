"""Catalog of effective Zeeman field maps b(k) and their adiabatic eigenspinors.

Wavevectors and field values are plain length-3 float arrays; every function
broadcasts over leading axes, so a batch of shape (n, 3) evaluates in one
call.  Internal units absorb the Bohr magneton into the coupling constants,
which default to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateFieldError
from .fieldspec import FieldSpec, parse_field_spec

# finite-difference step rule for custom-field Jacobians
FD_STEP_SCALE = 1e-5


class SystemKind(Enum):
    LINEAR_DRESSELHAUS = "linear_dresselhaus"
    LINEAR_RASHBA = "linear_rashba"
    MONOLAYER_GRAPHENE = "monolayer_graphene"
    BILAYER_GRAPHENE = "bilayer_graphene"
    CUBIC_DRESSELHAUS = "cubic_dresselhaus"
    PEREL_DRESSELHAUS = "perel_dresselhaus"
    CUSTOM = "custom"


# coupling parameter required by each builtin kind
_REQUIRED_PARAM = {
    SystemKind.LINEAR_DRESSELHAUS: "eta_d",
    SystemKind.LINEAR_RASHBA: "eta_r",
    SystemKind.MONOLAYER_GRAPHENE: "a",
    SystemKind.BILAYER_GRAPHENE: "m",
    SystemKind.CUBIC_DRESSELHAUS: "eta_dc",
    SystemKind.PEREL_DRESSELHAUS: "eta_dk",
}

# homogeneity degree of b(k) under k -> lambda*k
HOMOGENEITY_DEGREE = {
    SystemKind.LINEAR_DRESSELHAUS: 1,
    SystemKind.LINEAR_RASHBA: 1,
    SystemKind.MONOLAYER_GRAPHENE: 1,
    SystemKind.BILAYER_GRAPHENE: 2,
    SystemKind.CUBIC_DRESSELHAUS: 3,
    SystemKind.PEREL_DRESSELHAUS: 3,
}

PLANAR_KINDS = (
    SystemKind.LINEAR_DRESSELHAUS,
    SystemKind.LINEAR_RASHBA,
    SystemKind.MONOLAYER_GRAPHENE,
    SystemKind.BILAYER_GRAPHENE,
)


@dataclass(frozen=True)
class SpinorSystem:
    """A named b(k) field map with coupling parameters and a branch sign.

    ``branch`` is +1 for the spin state aligned with the local field and -1
    for the anti-aligned state; operations that do not take an explicit
    branch argument use this one.  Instances are immutable and safe to share
    across threads.
    """

    kind: SystemKind
    params: dict = field(default_factory=dict)
    branch: int = +1
    custom_spec: Optional[FieldSpec] = None

    def __post_init__(self):
        if self.branch not in (+1, -1):
            raise ValueError(f"branch must be +1 or -1, got {self.branch!r}")
        if self.kind is SystemKind.CUSTOM:
            if self.custom_spec is None:
                raise ValueError("custom systems require a parsed field spec")
            return
        if self.custom_spec is not None:
            raise ValueError("builtin systems must not carry a custom field spec")
        name = _REQUIRED_PARAM[self.kind]
        merged = {name: 1.0}
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        value = merged[name]
        if not isinstance(value, (int, float)) or not math.isfinite(value) or value == 0.0:
            raise ValueError(f"parameter '{name}' must be finite and nonzero, got {value!r}")
        if self.kind is SystemKind.BILAYER_GRAPHENE and value <= 0.0:
            raise ValueError(f"bilayer band mass m must be positive, got {value!r}")

    @property
    def name(self) -> str:
        if self.kind is SystemKind.CUSTOM:
            return self.custom_spec.name
        return self.kind.value

    # -- constructors ------------------------------------------------------

    @classmethod
    def dresselhaus(cls, eta: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.LINEAR_DRESSELHAUS, {"eta_d": eta}, branch)

    @classmethod
    def rashba(cls, eta: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.LINEAR_RASHBA, {"eta_r": eta}, branch)

    @classmethod
    def monolayer(cls, a: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.MONOLAYER_GRAPHENE, {"a": a}, branch)

    @classmethod
    def bilayer(cls, m: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.BILAYER_GRAPHENE, {"m": m}, branch)

    @classmethod
    def cubic(cls, eta: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.CUBIC_DRESSELHAUS, {"eta_dc": eta}, branch)

    @classmethod
    def perel(cls, eta: float = 1.0, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.PEREL_DRESSELHAUS, {"eta_dk": eta}, branch)

    @classmethod
    def custom(cls, spec: FieldSpec, branch: int = +1) -> "SpinorSystem":
        return cls(SystemKind.CUSTOM, dict(spec.params), branch, spec)

    @classmethod
    def from_name(cls, name: str, params: Optional[dict] = None, branch: int = +1) -> "SpinorSystem":
        """Look up a builtin by a user-facing name (CLI entry point)."""
        key = name.strip().lower().replace("-", "_")
        kind = _NAME_ALIASES.get(key)
        if kind is None:
            known = ", ".join(sorted(set(_NAME_ALIASES)))
            raise ValueError(f"unknown system '{name}' (known: {known})")
        return cls(kind, dict(params or {}), branch)


_NAME_ALIASES = {
    "dresselhaus": SystemKind.LINEAR_DRESSELHAUS,
    "linear_dresselhaus": SystemKind.LINEAR_DRESSELHAUS,
    "rashba": SystemKind.LINEAR_RASHBA,
    "linear_rashba": SystemKind.LINEAR_RASHBA,
    "monolayer": SystemKind.MONOLAYER_GRAPHENE,
    "monolayer_graphene": SystemKind.MONOLAYER_GRAPHENE,
    "bilayer": SystemKind.BILAYER_GRAPHENE,
    "bilayer_graphene": SystemKind.BILAYER_GRAPHENE,
    "cubic": SystemKind.CUBIC_DRESSELHAUS,
    "cubic_dresselhaus": SystemKind.CUBIC_DRESSELHAUS,
    "perel": SystemKind.PEREL_DRESSELHAUS,
    "perel_dresselhaus": SystemKind.PEREL_DRESSELHAUS,
}


def gapped_rashba(delta: float, eta: float = 1.0, branch: int = +1) -> SpinorSystem:
    """Rashba field with a constant out-of-plane component bz = delta.

    Expressed through the custom-field machinery; the gap keeps |b| >= |delta|
    everywhere, so gauges and curvature are regular on the whole plane.
    """
    spec = parse_field_spec(
        {
            "name": "gapped_rashba",
            "params": {"eta_r": float(eta), "delta": float(delta)},
            "bx": "eta_r*ky",
            "by": "-eta_r*kx",
            "bz": "delta",
        }
    )
    return SpinorSystem.custom(spec, branch)


def _check_k(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (3,):
        raise ValueError(f"wavevector must have 3 components, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("wavevector components must be finite")
    return k


def eval_field(system: SpinorSystem, k) -> np.ndarray:
    """Evaluate b(k); broadcasts over leading axes of ``k``."""
    k = _check_k(k)
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    zeros = np.zeros_like(kx)
    kind = system.kind
    if kind is SystemKind.LINEAR_DRESSELHAUS:
        eta = system.params["eta_d"]
        comps = (eta * kx, -(eta * ky), zeros)
    elif kind is SystemKind.LINEAR_RASHBA:
        eta = system.params["eta_r"]
        comps = (eta * ky, -(eta * kx), zeros)
    elif kind is SystemKind.MONOLAYER_GRAPHENE:
        a = system.params["a"]
        comps = (a * kx, a * ky, zeros)
    elif kind is SystemKind.BILAYER_GRAPHENE:
        m = system.params["m"]
        comps = ((kx**2 - ky**2) / (2 * m), kx * ky / m, zeros)
    elif kind is SystemKind.CUBIC_DRESSELHAUS:
        eta = system.params["eta_dc"]
        comps = (
            eta * kx * (ky**2 - kz**2),
            eta * ky * (kz**2 - kx**2),
            eta * kz * (kx**2 - ky**2),
        )
    elif kind is SystemKind.PEREL_DRESSELHAUS:
        eta = system.params["eta_dk"]
        comps = (
            -eta * kx * kz**2,
            eta * ky * kz**2,
            eta * kz * (kx**2 - ky**2),
        )
    else:
        comps = system.custom_spec.evaluate(kx, ky, kz)
    bx, by, bz, _ = np.broadcast_arrays(*comps, kx)
    return np.stack([bx, by, bz], axis=-1)


def field_jacobian(system: SpinorSystem, k) -> np.ndarray:
    """Jacobian J[..., i, j] = d b_i / d k_j.

    Analytic for the builtin kinds; custom specs are differentiated by
    central differences with step 1e-5 * max(1, |k|) per axis.
    """
    k = _check_k(k)
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    zeros = np.zeros(np.broadcast(kx, ky, kz).shape)
    ones = np.ones_like(zeros)
    kind = system.kind
    if kind is SystemKind.LINEAR_DRESSELHAUS:
        eta = system.params["eta_d"]
        rows = [[eta * ones, zeros, zeros], [zeros, -eta * ones, zeros], [zeros, zeros, zeros]]
    elif kind is SystemKind.LINEAR_RASHBA:
        eta = system.params["eta_r"]
        rows = [[zeros, eta * ones, zeros], [-eta * ones, zeros, zeros], [zeros, zeros, zeros]]
    elif kind is SystemKind.MONOLAYER_GRAPHENE:
        a = system.params["a"]
        rows = [[a * ones, zeros, zeros], [zeros, a * ones, zeros], [zeros, zeros, zeros]]
    elif kind is SystemKind.BILAYER_GRAPHENE:
        m = system.params["m"]
        rows = [
            [kx / m, -ky / m, zeros],
            [ky / m, kx / m, zeros],
            [zeros, zeros, zeros],
        ]
    elif kind is SystemKind.CUBIC_DRESSELHAUS:
        eta = system.params["eta_dc"]
        rows = [
            [eta * (ky**2 - kz**2), 2 * eta * kx * ky, -2 * eta * kx * kz],
            [-2 * eta * kx * ky, eta * (kz**2 - kx**2), 2 * eta * ky * kz],
            [2 * eta * kx * kz, -2 * eta * ky * kz, eta * (kx**2 - ky**2)],
        ]
    elif kind is SystemKind.PEREL_DRESSELHAUS:
        eta = system.params["eta_dk"]
        rows = [
            [-eta * kz**2, zeros, -2 * eta * kx * kz],
            [zeros, eta * kz**2, 2 * eta * ky * kz],
            [2 * eta * kx * kz, -2 * eta * ky * kz, eta * (kx**2 - ky**2)],
        ]
    else:
        return _custom_jacobian(system, k)
    return np.stack([np.stack(np.broadcast_arrays(*row), axis=-1) for row in rows], axis=-2)


def _custom_jacobian(system: SpinorSystem, k: np.ndarray) -> np.ndarray:
    h = FD_STEP_SCALE * np.maximum(1.0, np.linalg.norm(k, axis=-1))
    cols = []
    for j in range(3):
        step = np.zeros_like(k)
        step[..., j] = h
        cols.append((eval_field(system, k + step) - eval_field(system, k - step)) / (2 * h)[..., None])
    return np.stack(cols, axis=-1)


class PolarAngles(NamedTuple):
    theta: float  # inclination from +z, in [0, pi]
    phi: float  # azimuth, in (-pi, pi]; 0 on the z axis by convention


def field_magnitude(b) -> np.ndarray:
    return np.linalg.norm(np.asarray(b, dtype=float), axis=-1)


def polar_angles(b) -> PolarAngles:
    """Inclination and azimuth of a field vector; rejects zero fields."""
    b = np.asarray(b, dtype=float)
    mag = field_magnitude(b)
    if np.any(mag == 0.0):
        raise DegenerateFieldError("polar angles undefined for a zero field")
    theta = np.arccos(np.clip(b[..., 2] / mag, -1.0, 1.0))
    phi = np.arctan2(b[..., 1], b[..., 0])
    phi = np.where(phi <= -np.pi, np.pi, phi)  # pin the branch cut to +pi
    if b.ndim == 1:
        return PolarAngles(float(theta), float(phi))
    return PolarAngles(theta, phi)


def eigenspinor(b, branch: int = +1) -> np.ndarray:
    """Normalized eigenvector of (b/|b|) . sigma with eigenvalue ``branch``.

    The global phase is fixed so the first nonzero component is real and
    non-negative, which makes the result deterministic.  Satisfies
    <z| sigma |z> = branch * b/|b|.
    """
    if branch not in (+1, -1):
        raise ValueError(f"branch must be +1 or -1, got {branch!r}")
    theta, phi = polar_angles(b)
    half = np.asarray(theta) / 2.0
    if branch == +1:
        up = np.cos(half).astype(complex)
        down = np.sin(half) * np.exp(1j * np.asarray(phi))
    else:
        up = np.sin(half).astype(complex)
        down = -np.cos(half) * np.exp(1j * np.asarray(phi))
    spinor = np.stack(np.broadcast_arrays(up, down), axis=-1)
    # construction already leaves the up component real >= 0; fix the exact
    # pole cases where it vanishes by making the down component real positive
    at_pole = np.abs(spinor[..., 0]) == 0.0
    if np.any(at_pole):
        down = np.where(at_pole, spinor[..., 1], 1.0)
        fix = np.where(at_pole, np.conj(down / np.abs(down)), 1.0)
        spinor = spinor * fix[..., None]
    return spinor


# -- catalog metadata (CLI listing and round-trip specs) ---------------------

CATALOG = [
    {
        "name": "linear_dresselhaus",
        "param": "eta_d",
        "field": "b = eta_d * (kx, -ky, 0)",
        "curvature": "delta function at k = 0, winding -1",
    },
    {
        "name": "linear_rashba",
        "param": "eta_r",
        "field": "b = eta_r * (ky, -kx, 0)",
        "curvature": "delta function at k = 0, winding +1",
    },
    {
        "name": "monolayer_graphene",
        "param": "a",
        "field": "b = a * (kx, ky, 0)",
        "curvature": "delta function at k = 0, winding +1",
    },
    {
        "name": "bilayer_graphene",
        "param": "m",
        "field": "b = (kx^2 - ky^2, 2 kx ky, 0) / (2 m)",
        "curvature": "delta function at k = 0, winding +2",
    },
    {
        "name": "cubic_dresselhaus",
        "param": "eta_dc",
        "field": "b = eta_dc * (kx (ky^2 - kz^2), ky (kz^2 - kx^2), kz (kx^2 - ky^2))",
        "curvature": "genuinely three-dimensional; compare with the numeric curl",
    },
    {
        "name": "perel_dresselhaus",
        "param": "eta_dk",
        "field": "b = eta_dk * (-kx kz^2, ky kz^2, kz (kx^2 - ky^2))",
        "curvature": "genuinely three-dimensional; compare with the numeric curl",
    },
]

_SPEC_TEMPLATES = {
    SystemKind.LINEAR_DRESSELHAUS: {"bx": "eta_d*kx", "by": "-eta_d*ky", "bz": "0"},
    SystemKind.LINEAR_RASHBA: {"bx": "eta_r*ky", "by": "-eta_r*kx", "bz": "0"},
    SystemKind.MONOLAYER_GRAPHENE: {"bx": "a*kx", "by": "a*ky", "bz": "0"},
    SystemKind.BILAYER_GRAPHENE: {"bx": "(kx^2 - ky^2)/(2*m)", "by": "kx*ky/m", "bz": "0"},
    SystemKind.CUBIC_DRESSELHAUS: {
        "bx": "eta_dc*kx*(ky^2 - kz^2)",
        "by": "eta_dc*ky*(kz^2 - kx^2)",
        "bz": "eta_dc*kz*(kx^2 - ky^2)",
    },
    SystemKind.PEREL_DRESSELHAUS: {
        "bx": "-eta_dk*kx*kz^2",
        "by": "eta_dk*ky*kz^2",
        "bz": "eta_dk*kz*(kx^2 - ky^2)",
    },
}


def as_field_spec_document(system: SpinorSystem) -> dict:
    """Re-express a builtin system as a custom field spec document."""
    if system.kind is SystemKind.CUSTOM:
        raise ValueError("system is already a custom field spec")
    doc = dict(_SPEC_TEMPLATES[system.kind])
    doc["name"] = system.kind.value
    doc["params"] = dict(system.params)
    return doc
