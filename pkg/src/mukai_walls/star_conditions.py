"""Lattice-level decision procedures for the three phase conditions near large volume.

For ``v = r e^beta + a rho + (dH + D + ...)`` and a test class with data
``(r1, d1, a1)`` write ``P = d r1 - d1 r`` and

    B = P s/2 - (d a1 - d1 a).

Condition 1 (``r >= 0``, ``d > 0``): ``P > 0`` forces ``B > 0`` for every test
class with ``0 < d1 < d``.  Condition 2 is condition 1 for the dual class.
Condition 3 (``r >= 0``, ``d < 0``): ``P <= 0`` forces ``B <= 0``, strictly when
``P < 0``, for ``d <= d1 <= 0``.

Test classes range over lattice data, not objects: ``r1`` integral, ``d1`` in
``d_min Z`` with ``d1 + r1 b`` in ``delta Z``, ``r0 a1`` integral and
``d1^2 (H^2) - 2 r1 a1 >= -2 epsilon`` (the best case ``(D1^2) = 0``).  A
negative answer may therefore come from classes that no object realizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Optional

from .mukai_core import (
    BetaDecomposition,
    BetaFrame,
    LatticeError,
    MukaiVector,
    as_fraction,
    beta_decompose,
    beta_recompose,
    mukai_pairing,
)

REALIZABILITY_NOTE = "violations are lattice classes; whether objects realize them is not decided"


@dataclass(frozen=True)
class Witness:
    """A violating test class; ``neg_D1_sq_max`` bounds ``-(D1^2)`` for it."""

    r1: int
    d1: Fraction
    a1: Fraction
    neg_D1_sq_max: Fraction


@dataclass(frozen=True)
class StarReport:
    condition: str
    holds: bool
    witnesses: tuple[Witness, ...] = ()
    threshold_s: Optional[Fraction] = None
    note: str = ""


def dual(v: MukaiVector) -> MukaiVector:
    """``(r, xi, a) -> (r, -xi, a)``."""
    return MukaiVector(v.r, -v.c1, v.s)


def _floor_to(x: Fraction, step: Fraction) -> Fraction:
    """Largest element of ``step Z`` that is ``<= x``."""
    return step * floor(x / step)


def _admissible(r1: int, d1: Fraction, frame: BetaFrame) -> bool:
    # (c1(E1), H)/(H^2) = d1 + r1 b must be a degree of an integral class
    return ((d1 + r1 * frame.b) / frame.delta).denominator == 1


def _a1_max(r1: int, d1: Fraction, frame: BetaFrame) -> Fraction:
    s = frame.surface
    return _floor_to((d1 * d1 * s.H_sq + 2 * s.epsilon) / (2 * r1), Fraction(1, frame.r0))


def _witness(r1: int, d1: Fraction, a1: Fraction, frame: BetaFrame) -> Witness:
    s = frame.surface
    return Witness(r1, d1, a1, d1 * d1 * s.H_sq - 2 * r1 * a1 + 2 * s.epsilon)


def _d1_steps(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    """Multiples of ``step`` in the closed interval ``[lo, hi]``."""
    k_lo = -floor(-lo / step)
    k_hi = floor(hi / step)
    return [k * step for k in range(k_lo, k_hi + 1)]


def _star1_violations(r, a, d, frame: BetaFrame, s: Fraction) -> list[Witness]:
    h2 = frame.surface.H_sq
    eps = frame.surface.epsilon
    out = []
    for d1 in _d1_steps(frame.d_min, d - frame.d_min, frame.d_min):
        if not 0 < d1 < d:
            continue
        # B <= 0 needs P s/2 <= d a1_max - d1 a <= d (d1^2 H^2 + 2 eps)/2 + d1 |a|
        r1_lo = floor(r * d1 / d) + 1
        r1_hi = floor((d1 * r + (2 / s) * (d * (d1 * d1 * h2 + 2 * eps) / 2 + d1 * abs(a))) / d)
        for r1 in range(max(r1_lo, 1), r1_hi + 1):
            if not _admissible(r1, d1, frame):
                continue
            P = d * r1 - d1 * r
            a1 = _a1_max(r1, d1, frame)
            if P > 0 and P * s / 2 - (d * a1 - d1 * a) <= 0:
                out.append(_witness(r1, d1, a1, frame))
    return out


def check_star1(v: MukaiVector, frame: BetaFrame, s) -> StarReport:
    """Decide condition 1 for ``v`` at ``(omega^2) = s`` by finite enumeration."""
    s = as_fraction(s)
    dec = beta_decompose(v, frame)
    if dec.d <= 0 or dec.r < 0:
        raise LatticeError("condition 1 needs r >= 0 and d > 0")
    wit = _star1_violations(dec.r, dec.a, dec.d, frame, s)
    return StarReport("star1", not wit, tuple(wit), star1_threshold(v, frame), REALIZABILITY_NOTE if wit else "")


def star1_threshold(v: MukaiVector, frame: BetaFrame) -> Fraction:
    """A value ``s*`` such that condition 1 holds for every ``s > s*``."""
    dec = beta_decompose(v, frame)
    r, a, d = dec.r, dec.a, dec.d
    if d <= 0 or r < 0:
        raise LatticeError("threshold needs r >= 0 and d > 0")
    eps = frame.surface.epsilon
    excess = mukai_pairing(v, v, frame.surface) - frame.surface.square(dec.D)
    if r > 0:
        inner = max(d * eps, d * eps + (d - frame.d_min) / (2 * r) * excess)
    else:
        inner = d * eps + (d - frame.d_min) / 2 * excess + d * abs(a)
    return max(Fraction(0), 2 / frame.delta * inner)


def check_star2(v: MukaiVector, frame: BetaFrame, s) -> StarReport:
    """Condition 2 for ``v``: condition 1 for the dual class in the frame at ``-beta``."""
    dec = beta_decompose(v, frame)
    if dec.d >= 0 or dec.r < 0:
        raise LatticeError("condition 2 needs r >= 0 and d < 0")
    rep = check_star1(dual(v), frame.dual(), s)
    wit = tuple(Witness(w.r1, -w.d1, w.a1, w.neg_D1_sq_max) for w in rep.witnesses)
    return StarReport("star2", rep.holds, wit, rep.threshold_s, rep.note)


def check_star3(v: MukaiVector, frame: BetaFrame, s) -> StarReport:
    """Decide condition 3 for ``v`` at ``(omega^2) = s``.

    Test classes of rank zero are left out: with ``r1 = 0`` the value ``a1`` is
    unconstrained by ``<v1^2>`` and every such class (the point class, say)
    violates the condition at the lattice level.
    """
    s = as_fraction(s)
    dec = beta_decompose(v, frame)
    r, a, d = dec.r, dec.a, dec.d
    if d >= 0 or r < 0:
        raise LatticeError("condition 3 needs r >= 0 and d < 0")
    h2 = frame.surface.H_sq
    eps = frame.surface.epsilon
    wit = []
    for d1 in _d1_steps(d, Fraction(0), frame.d_min):
        # P <= 0 means r1 >= d1 r/d; B >= 0 fails once |d| r1 s/2 exceeds the rest
        r1_lo = max(1, -floor(-(d1 * r / d)))
        r1_hi = floor(r + (d * d * h2 + 2 * eps) / s + 2 * abs(a) / s)
        for r1 in range(r1_lo, r1_hi + 1):
            if not _admissible(r1, d1, frame):
                continue
            P = d * r1 - d1 * r
            a1 = _a1_max(r1, d1, frame)
            B = P * s / 2 - (d * a1 - d1 * a)
            if (P < 0 and B >= 0) or (P == 0 and B > 0):
                wit.append(_witness(r1, d1, a1, frame))
    return StarReport("star3", not wit, tuple(wit), None, REALIZABILITY_NOTE if wit else "")


def shifted_transform_shape(v: MukaiVector, frame: BetaFrame) -> MukaiVector:
    """``w = r0 a e^beta + (r/r0) rho - (dH + D + (dH + D, beta) rho)``."""
    dec = beta_decompose(v, frame)
    r0 = frame.r0
    return beta_recompose(BetaDecomposition(r0 * dec.a, dec.r / r0, -dec.d, -dec.D), frame)


def star_by_external_bound(v: MukaiVector, frame: BetaFrame, N) -> bool:
    """Whether ``d > N``; with ``N`` the user-supplied bound this gives condition 1
    for ``v`` and condition 3 for :func:`shifted_transform_shape`."""
    return beta_decompose(v, frame).d > as_fraction(N)


@dataclass
class GiesekerReport:
    lines: list[str] = field(default_factory=list)
    star1: Optional[StarReport] = None
    star2: Optional[StarReport] = None
    star3: Optional[StarReport] = None

    def __str__(self) -> str:
        return "\n".join(self.lines)


def gieseker_report(v: MukaiVector, frame: BetaFrame, s) -> GiesekerReport:
    """Advisory summary of which Gieseker/Bridgeland comparisons apply to ``(v, s)``."""
    s = as_fraction(s)
    dec = beta_decompose(v, frame)
    rep = GiesekerReport()
    say = rep.lines.append
    say(f"v = {v}; r = {dec.r}, d = {dec.d}, a = {dec.a}; s = {s}")
    if dec.r >= 0 and dec.d > 0:
        rep.star1 = check_star1(v, frame, s)
        say(f"condition 1: {'holds' if rep.star1.holds else 'fails'} (large-volume threshold s* = {rep.star1.threshold_s})")
        if dec.d == frame.d_min:
            say("d = d_min: condition 1 holds because no class has 0 < d1 < d")
        if rep.star1.holds:
            say("beta-twisted Gieseker semistability of v agrees with Bridgeland semistability in the tilted heart A^mu")
        if s > rep.star1.threshold_s:
            say("s exceeds s*: this agreement holds at this and every larger s")
    elif dec.r >= 0 and dec.d < 0:
        rep.star2 = check_star2(v, frame, s)
        rep.star3 = check_star3(v, frame, s)
        say(f"condition 2: {'holds' if rep.star2.holds else 'fails'}")
        say(f"condition 3: {'holds' if rep.star3.holds else 'fails'}")
        if rep.star2.holds:
            say("(-beta)-twisted semistability on the dual side agrees with Bridgeland semistability of v")
        if rep.star3.holds:
            say("mu-semistable objects of class v are beta-twisted semistable; their shifts E[1] are Bridgeland semistable")
    else:
        say("no comparison statement applies (needs r >= 0 and d != 0)")
    if frame.surface.epsilon == 1:
        if s > 2:
            say("K3: s > 2, the heart is the tilt A^mu")
        elif s < Fraction(2, frame.r0 ** 2):
            say(f"K3: s < 2/r0^2 = {Fraction(2, frame.r0 ** 2)}, the heart is the small-volume heart A")
        else:
            say("K3: s lies between 2/r0^2 and 2; the heart depends on the category chamber")
    for r in (rep.star1, rep.star2, rep.star3):
        if r is not None and not r.holds:
            say(REALIZABILITY_NOTE)
            break
    return rep
