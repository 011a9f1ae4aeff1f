"""Euler-Heisenberg source terms for light propagating on a strong background field.

Only the effective polarization ``P`` and magnetization ``M`` induced by a
static background ``(E_s, B_s)`` are evaluated; the nonlinear wave equation
itself is not solved. The point of the module is to put a number on how weak
this channel is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, Constants


def _vec3(v, name):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {np.shape(v)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} components must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BackgroundField:
    E_s: np.ndarray  # V/m
    B_s: np.ndarray  # T

    def __post_init__(self):
        object.__setattr__(self, "E_s", _vec3(self.E_s, "E_s"))
        object.__setattr__(self, "B_s", _vec3(self.B_s, "B_s"))

    def __neg__(self):
        return BackgroundField(-self.E_s, -self.B_s)

    def scaled(self, factor: float) -> "BackgroundField":
        return BackgroundField(factor * self.E_s, factor * self.B_s)


@dataclass(frozen=True)
class NonlinearSources:
    P: np.ndarray  # C/m^2
    M: np.ndarray  # A/m
    zeta: float


def zeta_constant(constants: Constants = CODATA) -> float:
    """Euler-Heisenberg coupling ``2 alpha^2 eps0^2 hbar^3 / (45 m_e^4 c^5)`` in SI units."""
    k = constants
    return 2.0 * k.alpha**2 * k.epsilon_0**2 * k.hbar**3 / (45.0 * k.m_e**4 * k.c**5)


def nonlinear_sources(f: BackgroundField, constants: Constants = CODATA) -> NonlinearSources:
    r"""Effective polarization and magnetization of the vacuum.

    .. math::

        P = 2\zeta [2(E^2 - c^2 B^2) E + 7 c^2 (E\cdot B) B]

        M = -2 c^2 \zeta [2(E^2 - c^2 B^2) B + 7 (E\cdot B) E]
    """
    zeta = zeta_constant(constants)
    c2 = constants.c**2
    E, B = f.E_s, f.B_s
    invariant = E @ E - c2 * (B @ B)
    dot = E @ B
    P = 2.0 * zeta * (2.0 * invariant * E + 7.0 * c2 * dot * B)
    M = -2.0 * c2 * zeta * (2.0 * invariant * B + 7.0 * dot * E)
    # adding +0.0 turns the -0.0 left by the negative prefactor into 0.0
    return NonlinearSources(P + 0.0, M + 0.0, zeta)


def observability_estimate(f: BackgroundField, probe_wavelength: float = 1e-6,
                           constants: Constants = CODATA) -> float:
    """Dimensionless strength of the vacuum nonlinearity for a given background.

    Returns ``(|P| + |M|/c) / (eps0 F)`` with ``F = max(|E_s|, c|B_s|)``,
    i.e. the induced source per unit field. This is the size of the relative
    index change a probe would see; it is zero for a vanishing background.

    The Euler-Heisenberg sources are dispersionless, so ``probe_wavelength``
    does not enter the figure; it is only checked against the pair threshold
    below which the low-energy expansion holds.
    """
    if not probe_wavelength > 0:
        raise ValueError("probe wavelength must be > 0")
    k = constants
    photon_energy = 2.0 * math.pi * k.hbar * k.c / probe_wavelength
    if photon_energy >= 0.1 * k.m_e * k.c**2:
        raise ValueError(
            f"probe photon energy {photon_energy:.3g} J is too close to the pair threshold "
            "for the low-energy effective theory"
        )
    scale = max(float(np.linalg.norm(f.E_s)), k.c * float(np.linalg.norm(f.B_s)))
    if scale == 0.0:
        return 0.0
    src = nonlinear_sources(f, constants)
    return (float(np.linalg.norm(src.P)) + float(np.linalg.norm(src.M)) / k.c) / (k.epsilon_0 * scale)
