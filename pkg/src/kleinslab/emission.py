"""Spontaneous-emission rates and their conversion to dimensionless source edge data."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import CODATA, Constants
from .model import EdgeData, Family, validate_system


@dataclass(frozen=True)
class DipoleEmitter:
    """Point dipole with moment ``d`` (C m) and transition frequency ``omega0`` (rad/s).

    ``n_env`` is the real part of the refractive index of the host medium.
    """

    d: float
    omega0: float
    n_env: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d >= 0):
            raise ValueError(f"dipole moment must be finite and >= 0, got {self.d!r}")
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be finite and > 0, got {self.omega0!r}")
        if not (math.isfinite(self.n_env) and self.n_env > 0):
            raise ValueError(f"n_env must be finite and > 0, got {self.n_env!r}")
        if self.n_env < 1:
            warnings.warn(f"n_env={self.n_env} < 1: only meaningful for exotic media", stacklevel=3)


def gamma0(e: DipoleEmitter, constants: Constants = CODATA) -> float:
    """Free-space decay rate ``d^2 omega0^3 / (3 pi eps0 hbar c^3)`` in 1/s."""
    k = constants
    return e.d**2 * e.omega0**3 / (3.0 * math.pi * k.epsilon_0 * k.hbar * k.c**3)


def gamma_medium(e: DipoleEmitter, constants: Constants = CODATA) -> float:
    """Decay rate in a bulk dielectric: the free-space rate times ``n_env``."""
    return e.n_env * gamma0(e, constants)


@dataclass(frozen=True)
class EdgeShape:
    """How a source falls off from its interface, for building edge slopes.

    With edge value ``s``: constant gives slope 0, linear-edge gives
    ``s/length`` and exponential-edge gives ``-s/length``. The same rule is
    applied in both regions.
    """

    family: Family = Family.CONSTANT
    length: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.TABULATED:
            raise ValueError("tabulated profiles have no parametric edge shape")
        if self.family is not Family.CONSTANT and not (math.isfinite(self.length) and self.length != 0):
            raise ValueError("edge shape length must be finite and nonzero")

    def slope(self, value: float) -> float:
        if self.family is Family.CONSTANT:
            return 0.0
        if self.family is Family.LINEAR_EDGE:
            return value / self.length
        return -value / self.length


def edge_data_from_physical(e1: DipoleEmitter | None, e2: DipoleEmitter | None,
                            geometry, profile_family: EdgeShape, coupling: float,
                            reference_rate: float | None = None,
                            constants: Constants = CODATA) -> EdgeData:
    """Edge data from physical emitters in region 1 and/or region 2.

    Each edge value is ``coupling * gamma_medium(e) / reference_rate``; the
    slope follows from ``profile_family``. How a rate becomes a wave
    amplitude is not fixed by the model, so ``coupling`` is left entirely to
    the caller. ``geometry`` is the :class:`SlabSystem` the data is meant for
    and is only validated here.
    """
    if e1 is None and e2 is None:
        raise ValueError("need at least one emitter")
    if reference_rate is None:
        raise ValueError("a reference rate is required to make source values dimensionless")
    if not (math.isfinite(reference_rate) and reference_rate > 0):
        raise ValueError(f"reference rate must be finite and > 0, got {reference_rate!r}")
    if not (math.isfinite(coupling) and coupling >= 0):
        raise ValueError(f"coupling must be finite and >= 0, got {coupling!r}")
    if geometry is not None:
        validate_system(geometry)

    def edge(e):
        if e is None:
            return 0.0, 0.0
        s = coupling * gamma_medium(e, constants) / reference_rate
        return s, profile_family.slope(s)

    s1, s1p = edge(e1)
    s2, s2p = edge(e2)
    return EdgeData(s1, s1p, s2, s2p)
