"""Domain types for the three-region slab scattering problem.

Region 1 is ``x <= 0``, the evanescent slab occupies ``0 <= x <= a`` and
region 2 is ``x >= a``. All lengths are in solver units; only
:mod:`kleinslab.emission` and :mod:`kleinslab.nonlinear` deal in SI.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Variant(str, enum.Enum):
    """Which regions and directions carry spontaneous emission."""

    SOURCE_FREE = "source-free"
    CASE1 = "case1"  # region 1, forward only
    CASE2 = "case2"  # region 1, backward only
    CASE3 = "case3"  # region 1, isotropic
    CASE4 = "case4"  # region 2, backward only
    GENERAL = "general"  # both regions, isotropic

    @classmethod
    def parse(cls, name: str) -> "Variant":
        key = name.strip().lower().replace("_", "-")
        if key in ("sourcefree", "none"):
            key = "source-free"
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown scenario variant {name!r} (expected one of {valid})") from None


class Family(str, enum.Enum):
    CONSTANT = "constant"
    LINEAR_EDGE = "linear-edge"
    EXPONENTIAL_EDGE = "exponential-edge"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class SlabSystem:
    """Wavevectors and thickness of the slab problem.

    ``chi0`` is the decay constant of the evanescent field inside the slab
    (the interior wavevector is ``i*chi0``).
    """

    k1: float
    k2: float
    chi0: float
    a: float

    def __post_init__(self):
        validate_system(self)

    @property
    def opacity(self) -> float:
        return self.chi0 * self.a

    @property
    def symmetric(self) -> bool:
        return self.k1 == self.k2


def validate_system(sys: SlabSystem) -> SlabSystem:
    """Return ``sys`` unchanged if every field is finite and positive."""
    for name in ("k1", "k2", "chi0", "a"):
        value = getattr(sys, name)
        if not isinstance(value, (int, float, np.floating, np.integer)):
            raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
        if not math.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    if not math.isfinite(sys.chi0 * sys.a):
        raise ValueError(f"opacity chi0*a is not finite ({sys.chi0!r} * {sys.a!r})")
    return sys


@dataclass(frozen=True)
class SourceProfile:
    """Real, non-negative emission source ``S(x)`` attached to one region.

    Family parameters are expressed in the signed offset ``u = x - edge`` from
    the region's slab interface, so region 1 lives on ``u <= 0`` and region 2
    on ``u >= 0``. ``edge`` is 0 for region 1; for region 2 set it to the slab
    thickness when evaluating in absolute coordinates. The matching solver
    only reads the profile at its own edge (``u = 0``).

    Families and their parameters:

    constant
        ``S = s0``.
    linear-edge
        ``S = max(0, s0 + slope*u)``. At the clipping point the linear branch
        is taken, so ``S'(edge) == slope`` even when ``s0 == 0``.
    exponential-edge
        ``S = s0*exp(-u/decay_length)``, ``S' = -S/decay_length``. A positive
        length decays away from the slab in region 2; region 1 needs a
        negative length for the same shape.
    tabulated
        Piecewise-linear through ``(knots, values)``; at an interior knot the
        slope is that of the segment to its right, at the last knot that of
        the final segment.
    """

    family: Family
    region: int = 1
    s0: float = 0.0
    slope: float = 0.0
    decay_length: float = 1.0
    knots: tuple = ()
    values: tuple = ()
    edge: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.region not in (1, 2):
            raise ValueError(f"region must be 1 or 2, got {self.region!r}")
        if self.family is Family.TABULATED:
            knots = tuple(float(v) for v in self.knots)
            values = tuple(float(v) for v in self.values)
            if len(knots) < 2 or len(knots) != len(values):
                raise ValueError("tabulated profile needs >= 2 knots with matching values")
            if any(b <= a for a, b in zip(knots, knots[1:])):
                raise ValueError("tabulated knots must be strictly increasing")
            if any(v < 0 for v in values):
                raise ValueError("tabulated values must be >= 0")
            if self.region == 1 and not (knots[-1] == 0.0 and knots[0] < 0):
                raise ValueError("region-1 tabulated knots must end at offset 0")
            if self.region == 2 and not (knots[0] == 0.0 and knots[-1] > 0):
                raise ValueError("region-2 tabulated knots must start at offset 0")
            object.__setattr__(self, "knots", knots)
            object.__setattr__(self, "values", values)
        else:
            if not self.s0 >= 0:
                raise ValueError(f"source edge value s0 must be >= 0, got {self.s0!r}")
            if self.family is Family.EXPONENTIAL_EDGE and (
                self.decay_length == 0 or not math.isfinite(self.decay_length)
            ):
                raise ValueError("exponential-edge decay_length must be finite and nonzero")

    # offset-coordinate evaluation, no domain check
    def _value(self, u: float) -> float:
        fam = self.family
        if fam is Family.CONSTANT:
            return float(self.s0)
        if fam is Family.LINEAR_EDGE:
            return max(0.0, self.s0 + self.slope * u)
        if fam is Family.EXPONENTIAL_EDGE:
            return self.s0 * math.exp(-u / self.decay_length)
        return float(np.interp(u, self.knots, self.values))

    def _slope(self, u: float) -> float:
        fam = self.family
        if fam is Family.CONSTANT:
            return 0.0
        if fam is Family.LINEAR_EDGE:
            return self.slope if self.s0 + self.slope * u >= 0 else 0.0
        if fam is Family.EXPONENTIAL_EDGE:
            return -self._value(u) / self.decay_length
        knots = self.knots
        i = int(np.searchsorted(knots, u, side="right")) - 1
        i = min(max(i, 0), len(knots) - 2)
        return (self.values[i + 1] - self.values[i]) / (knots[i + 1] - knots[i])

    def _offset(self, x: float) -> float:
        u = x - self.edge
        inside = u <= 0 if self.region == 1 else u >= 0
        if self.family is Family.TABULATED:
            inside = inside and self.knots[0] <= u <= self.knots[-1]
        if not inside:
            raise ValueError(f"x={x!r} is outside the region-{self.region} domain of this profile")
        return u

    def value_at(self, x: float) -> float:
        return self._value(self._offset(x))

    def slope_at(self, x: float) -> float:
        return self._slope(self._offset(x))

    def at_edge(self) -> tuple[float, float]:
        """``(S, S')`` at the profile's slab interface."""
        return self._value(0.0), self._slope(0.0)

    def at_distance(self, d: float) -> float:
        """Value at distance ``d >= 0`` from the interface, into the region."""
        return self._value(-d if self.region == 1 else d)


def profile_eval(p: SourceProfile, x: float) -> tuple[float, float]:
    """Return ``(S(x), S'(x))`` in absolute coordinates."""
    u = p._offset(x)
    return p._value(u), p._slope(u)


@dataclass(frozen=True)
class EdgeData:
    """Source values and slopes at the two interfaces.

    These four numbers are all the solver and the opaque-limit formulas use.
    """

    s1_0: float = 0.0
    s1p_0: float = 0.0
    s2_a: float = 0.0
    s2p_a: float = 0.0

    def __post_init__(self):
        if not (self.s1_0 >= 0 and self.s2_a >= 0):
            raise ValueError("edge source values must be >= 0")

    def scaled(self, factor: float) -> "EdgeData":
        return EdgeData(*(factor * v for v in self.as_tuple()))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.s1_0, self.s1p_0, self.s2_a, self.s2p_a)


_REGION_RULES = {
    Variant.SOURCE_FREE: (False, False),
    Variant.CASE1: (True, False),
    Variant.CASE2: (True, False),
    Variant.CASE3: (True, False),
    Variant.CASE4: (False, True),
}


@dataclass(frozen=True)
class EmissionScenario:
    variant: Variant
    s1: SourceProfile | None = None
    s2: SourceProfile | None = None

    def __post_init__(self):
        variant = Variant.parse(self.variant) if isinstance(self.variant, str) else self.variant
        object.__setattr__(self, "variant", Variant(variant))
        if self.s1 is not None and self.s1.region != 1:
            raise ValueError("s1 must be a region-1 profile")
        if self.s2 is not None and self.s2.region != 2:
            raise ValueError("s2 must be a region-2 profile")
        has1, has2 = self.s1 is not None, self.s2 is not None
        if self.variant is Variant.GENERAL:
            if not (has1 or has2):
                raise ValueError("general scenario needs at least one source profile")
            return
        want1, want2 = _REGION_RULES[self.variant]
        if (has1, has2) != (want1, want2):
            need = {(False, False): "no source profiles",
                    (True, False): "an s1 profile only",
                    (False, True): "an s2 profile only"}[(want1, want2)]
            raise ValueError(f"{self.variant.value} scenario requires {need}")

    def edge_data(self) -> EdgeData:
        s1 = self.s1.at_edge() if self.s1 is not None else (0.0, 0.0)
        s2 = self.s2.at_edge() if self.s2 is not None else (0.0, 0.0)
        return EdgeData(s1[0], s1[1], s2[0], s2[1])


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes of the matched solution.

    ``b_scaled`` is the growing-mode amplitude referred to the far interface,
    ``B*exp(chi0*a)``; ``B`` itself underflows to zero for very opaque slabs.
    """

    R: complex
    T: complex
    A: complex
    B: complex
    b_scaled: complex
    k1: float
    k2: float
    residual: float = 0.0
    conditioning: float = 1.0

    @property
    def raw_reflection(self) -> float:
        return abs(self.R) ** 2

    @property
    def raw_transmission(self) -> float:
        return abs(self.T) ** 2

    @property
    def flux_transmission(self) -> float:
        return self.k2 / self.k1 * abs(self.T) ** 2


@dataclass(frozen=True)
class MeasuredProbabilities:
    r_meas_sq: float
    t_meas_sq: float
    normalization_note: str = field(default="", compare=False)

    def __post_init__(self):
        if not (self.r_meas_sq >= 0 and self.t_meas_sq >= 0):
            raise ValueError("measured probabilities must be >= 0")

    @property
    def total(self) -> float:
        return self.r_meas_sq + self.t_meas_sq
