"""Closed-form opaque-limit measured probabilities for the four source cases.

The array-level functions broadcast over numpy inputs and are what the
property tests and sweeps use; the ``caseN_closed`` wrappers take a
:class:`SlabSystem` and :class:`EdgeData` and check that ``k2 == k1``, the
only geometry for which the closed forms exist.
"""

import numpy as np

from .model import EdgeData, MeasuredProbabilities, SlabSystem, Variant


class DegenerateCaseError(ArithmeticError):
    pass


def _require_symmetric(sys: SlabSystem):
    if sys.k2 != sys.k1:
        raise ValueError(f"closed forms need k2 == k1 (got k1={sys.k1!r}, k2={sys.k2!r})")


def reflection_case1(s1_0):
    return (1.0 + np.asarray(s1_0, dtype=float)) ** 2


def reflection_case2(k1, chi0, s1p_0):
    k1, chi0, s1p_0 = (np.asarray(v, dtype=float) for v in (k1, chi0, s1p_0))
    return (k1**2 + (chi0 + s1p_0) ** 2) / (k1**2 + chi0**2)


def reflection_case3(k1, chi0, s1_0, s1p_0):
    """Case 3 reflection, written in terms of the rescaled quantities.

    ``kbar = k1 (1+S)``, ``chibar = chi0 (1+S) + S'`` and ``sbar = S'/(1+S)``
    with ``S = S1(0)``; the result is
    ``(kbar^2 + (chibar + sbar)^2) / (kbar^2 + chibar^2) * (1+S)``.
    """
    k1, chi0, s1_0, s1p_0 = (np.asarray(v, dtype=float) for v in (k1, chi0, s1_0, s1p_0))
    u = 1.0 + s1_0
    if np.any(u <= 0):
        raise ValueError("case 3 needs 1 + S1(0) > 0")
    kbar = k1 * u
    chibar = chi0 * u + s1p_0
    sbar = s1p_0 / u
    return (kbar**2 + (chibar + sbar) ** 2) / (kbar**2 + chibar**2) * u


def case4_terms(k1, chi0, s2_a, s2p_a):
    """Return ``(X, Y)``: ``X = (k1^2 + chi0^2 - kappa^2)^2``, ``Y = 4 S'^2 k1^2``."""
    k1, chi0, s2_a, s2p_a = (np.asarray(v, dtype=float) for v in (k1, chi0, s2_a, s2p_a))
    kappa_sq = s2_a**2 * k1**2 + (s2_a * chi0 - s2p_a) ** 2
    X = ((k1**2 + chi0**2) - kappa_sq) ** 2
    Y = 4.0 * s2p_a**2 * k1**2
    return X, Y


def probabilities_case4(k1, chi0, s2_a, s2p_a):
    X, Y = case4_terms(k1, chi0, s2_a, s2p_a)
    den = X + Y
    scale = (np.asarray(k1, dtype=float) ** 2 + np.asarray(chi0, dtype=float) ** 2) ** 2
    if np.any(den <= np.finfo(float).eps * scale):
        raise DegenerateCaseError(
            "case 4 denominator vanishes (S2'(a) = 0 and kappa^2 = k1^2 + chi0^2)"
        )
    s2 = np.asarray(s2_a, dtype=float) ** 2
    return (X + s2 * Y) / den, (s2 * X + Y) / den


def case1_closed(sys: SlabSystem, ed: EdgeData) -> MeasuredProbabilities:
    _require_symmetric(sys)
    return MeasuredProbabilities(float(reflection_case1(ed.s1_0)), 0.0, "case 1 opaque limit")


def case2_closed(sys: SlabSystem, ed: EdgeData) -> MeasuredProbabilities:
    _require_symmetric(sys)
    r = reflection_case2(sys.k1, sys.chi0, ed.s1p_0)
    return MeasuredProbabilities(float(r), 0.0, "case 2 opaque limit")


def case3_closed(sys: SlabSystem, ed: EdgeData) -> MeasuredProbabilities:
    _require_symmetric(sys)
    r = reflection_case3(sys.k1, sys.chi0, ed.s1_0, ed.s1p_0)
    return MeasuredProbabilities(float(r), 0.0, "case 3 opaque limit")


def case4_closed(sys: SlabSystem, ed: EdgeData) -> MeasuredProbabilities:
    _require_symmetric(sys)
    r, t = probabilities_case4(sys.k1, sys.chi0, ed.s2_a, ed.s2p_a)
    return MeasuredProbabilities(float(r), float(t), "case 4 opaque limit")


def sum_rule(ed: EdgeData) -> float:
    """``1 + S2(a)^2``.

    The two case-4 numerators add up to ``(1 + S2(a)^2)(X + Y)``, so the
    closed forms satisfy the rule identically.
    """
    return 1.0 + ed.s2_a**2


def barrier_transmission(k, chi0, a):
    """Textbook ``|T|^2`` for an evanescent barrier between equal media.

    ``1 / (1 + (k^2 + chi0^2)^2 / (4 k^2 chi0^2) * sinh^2(chi0 a))``
    """
    k, chi0, a = (np.asarray(v, dtype=float) for v in (k, chi0, a))
    pref = (k**2 + chi0**2) ** 2 / (4.0 * k**2 * chi0**2)
    return 1.0 / (1.0 + pref * np.sinh(chi0 * a) ** 2)


def closed_form_arrays(variant, k1, chi0, a, s1_0=0.0, s1p_0=0.0, s2_a=0.0, s2p_a=0.0):
    """Closed-form ``(r_meas, t_meas)`` for a variant, for ``k2 == k1``.

    Source-free uses the exact barrier formula at the given thickness; the
    four source cases use their opaque-limit expressions and ignore ``a``.
    Raises ``KeyError`` for the general variant, which has no closed form.
    """
    variant = Variant(variant)
    shape = np.broadcast_shapes(*(np.shape(v) for v in (k1, chi0, a, s1_0, s1p_0, s2_a, s2p_a)))
    zero = np.zeros(shape)
    if variant is Variant.SOURCE_FREE:
        t = barrier_transmission(k1, chi0, a) + zero
        return 1.0 - t, t
    if variant is Variant.CASE1:
        return reflection_case1(s1_0) + zero, zero
    if variant is Variant.CASE2:
        return reflection_case2(k1, chi0, s1p_0) + zero, zero
    if variant is Variant.CASE3:
        return reflection_case3(k1, chi0, s1_0, s1p_0) + zero, zero
    if variant is Variant.CASE4:
        r, t = probabilities_case4(k1, chi0, s2_a, s2p_a)
        return r + zero, t + zero
    raise KeyError(f"no closed form for the {variant.value} variant")
