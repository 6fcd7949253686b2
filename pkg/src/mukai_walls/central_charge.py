"""Central charges, exact phase comparison and the aligned-phase bracket.

A stability parameter is stored as ``(eta, s)`` with ``eta`` in ``H^perp`` and
``s = (omega^2)``, where ``omega`` is a positive multiple of ``H``.  The
imaginary part of the central charge is ``d (H, omega)``; the positive factor
``(H, omega)`` is common to all classes at a point, so only ``d`` is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .mukai_core import (
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    as_fraction,
    decompose_at,
    exp_beta,
    mukai_pairing,
)


@dataclass(frozen=True)
class StabilityPoint:
    """The parameter ``beta = b H + eta``, ``(omega^2) = s``, with ``b`` from the frame."""

    frame: BetaFrame
    eta: NSClass
    s: Fraction

    def __init__(self, frame: BetaFrame, eta, s):
        eta = NSClass(eta)
        s = as_fraction(s)
        if frame.surface.degree(eta) != 0:
            raise LatticeError("eta must be orthogonal to H")
        if s <= 0:
            raise LatticeError("s = (omega^2) must be positive")
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "s", s)

    @classmethod
    def at_frame(cls, frame: BetaFrame, s) -> "StabilityPoint":
        """The point whose ``beta`` is the frame's own base class."""
        return cls(frame, frame.eta_beta, s)

    @property
    def beta(self) -> NSClass:
        return self.frame.beta_at(self.eta)

    def with_s(self, s) -> "StabilityPoint":
        return StabilityPoint(self.frame, self.eta, s)


@dataclass(frozen=True)
class CentralValue:
    """``Z = re + i * im_coeff * (H, omega)``."""

    re: Fraction
    im_coeff: Fraction

    def is_zero(self) -> bool:
        return self.re == 0 and self.im_coeff == 0


def central_charge(v: MukaiVector, p: StabilityPoint) -> CentralValue:
    """``Z(v) = -a + r s/2 + i d (H, omega)`` in the frame at ``b H + eta``."""
    dec = decompose_at(v, p.frame.surface, p.beta)
    return CentralValue(-dec.a + dec.r * p.s / 2, dec.d)


def sigma_bracket(v: MukaiVector, v1: MukaiVector, p: StabilityPoint) -> Fraction:
    """``(r d1 - r1 d) s/2 - (a d1 - a1 d)``.

    Equal to ``Re Z(v) d1 - Re Z(v1) d``, the determinant of the two central
    charges with the factor ``(H, omega)`` removed.  Nonnegative exactly when
    ``phi(v1) >= phi(v)`` for classes in the upper half plane.
    """
    surface = p.frame.surface
    dec = decompose_at(v, surface, p.beta)
    dec1 = decompose_at(v1, surface, p.beta)
    return (dec.r * dec1.d - dec1.r * dec.d) * p.s / 2 - (dec.a * dec1.d - dec1.a * dec.d)


def _sector(z: CentralValue) -> int:
    if z.im_coeff > 0:
        return 0
    if z.im_coeff == 0 and z.re < 0:
        return 1
    if z.im_coeff < 0:
        return 2
    return 3


def phase_cmp(z1: CentralValue, z2: CentralValue) -> int:
    """Compare phases in ``(0, 2]``: -1, 0 or 1 as ``phi(z1)`` is less, equal or greater.

    >>> phase_cmp(CentralValue(-1, 0), CentralValue(1, 1))
    1
    """
    if z1.is_zero() or z2.is_zero():
        raise LatticeError("phase of a zero central value")
    s1, s2 = _sector(z1), _sector(z2)
    if s1 != s2:
        return 1 if s1 > s2 else -1
    if s1 in (1, 3):
        return 0
    cross = z2.re * z1.im_coeff - z2.im_coeff * z1.re
    return (cross > 0) - (cross < 0)


def xi_vector(v: MukaiVector, p: StabilityPoint) -> MukaiVector:
    """The real class whose orthogonal complement detects phase alignment with ``v``.

    ``<v1, xi_v> = 0`` exactly when ``Z(v1 - (d1/d) v) = 0``.
    """
    surface = p.frame.surface
    beta = p.beta
    d = decompose_at(v, surface, beta).d
    if d == 0:
        raise LatticeError("xi_v needs d(v) != 0")
    e = exp_beta(beta, surface) - MukaiVector(0, NSClass.zero(surface.rho), p.s / 2)
    h = MukaiVector(0, surface.H, surface.form(surface.H, beta))
    return e - (mukai_pairing(v / d, e, surface) / surface.H_sq) * h


@dataclass(frozen=True)
class EtaSmallness:
    """Exact evaluation of the two smallness bounds on a perturbation ``eta'``."""

    neg_eta_sq: Fraction
    bound_assumption: Fraction
    assumption_holds: bool
    bound_semistable: Fraction
    semistable_holds: bool
    charge_shift: Optional[Fraction]


def eta_smallness(r, eta_prime, p: StabilityPoint, D: Optional[NSClass] = None) -> EtaSmallness:
    """Check ``-(eta'^2) < min{r^2 s^2/8, s}`` and ``-(eta'^2) < 1/(2 r0^2 r^5)``.

    ``r`` is an explicit rank argument.  When ``D`` is given, the shift
    ``(eta', D) - (eta'^2) r/2`` of the real part of the central charge is also
    returned.
    """
    r = as_fraction(r)
    if r <= 0:
        raise LatticeError("rank argument must be positive")
    surface = p.frame.surface
    eta_prime = NSClass(eta_prime)
    if surface.degree(eta_prime) != 0:
        raise LatticeError("eta' must be orthogonal to H")
    q = -surface.square(eta_prime)
    bound1 = min(r * r * p.s * p.s / 8, p.s)
    bound2 = Fraction(1) / (2 * p.frame.r0 ** 2 * r ** 5)
    shift = None
    if D is not None:
        shift = surface.form(eta_prime, NSClass(D)) + q * r / 2
    return EtaSmallness(q, bound1, q < bound1, bound2, q < bound2, shift)
