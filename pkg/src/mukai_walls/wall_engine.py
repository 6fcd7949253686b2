"""Walls for categories and walls for stabilities in the parameter space.

Every wall is the zero set of a function of the form

    F(eta, s) = P (s - (eta^2)) + 2 (eta, w) - 2 A

with ``P`` rational, ``w`` in ``H^perp`` and ``A`` rational.  For ``P != 0`` this
is the half-sphere ``s + q(eta - c) = R`` where ``q(x) = -(x^2)``, ``c = w/P``
and ``R = 2A/P + q(c)``; for ``P = 0`` it is the vertical hyperplane
``(eta, w) = A``.  Regions are boxes in affine coordinates on ``H^perp`` times
an interval of ``s``.  All tests are exact.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Callable, Iterator, Optional, Sequence, Union

from .central_charge import StabilityPoint
from .mukai_core import (
    BetaDecomposition,
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    SurfaceData,
    _solve,
    as_fraction,
    decompose_at,
    degree_coset,
    exp_beta,
    mukai_pairing,
    orthogonal_basis,
    short_vectors,
)

log = logging.getLogger(__name__)


# --- regions -----------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """``eta = origin + sum x_i directions[i]`` with ``lo <= x <= hi``, ``s_lo <= s <= s_hi``.

    The directions must be linearly independent classes in ``H^perp``; with no
    directions the box is a segment of ``s`` at fixed ``eta = origin``.
    """

    origin: NSClass
    directions: tuple[NSClass, ...]
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    s_lo: Fraction
    s_hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(as_fraction(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(as_fraction(x) for x in self.hi))
        object.__setattr__(self, "s_lo", as_fraction(self.s_lo))
        object.__setattr__(self, "s_hi", as_fraction(self.s_hi))
        if not (len(self.directions) == len(self.lo) == len(self.hi)):
            raise LatticeError("box bounds do not match its directions")
        if any(a > b for a, b in zip(self.lo, self.hi)) or self.s_lo > self.s_hi:
            raise LatticeError("empty box")
        if self.s_lo <= 0:
            raise LatticeError("box must lie in s > 0")

    @property
    def dim(self) -> int:
        return len(self.directions)

    def eta(self, x: Sequence[Fraction]) -> NSClass:
        p = self.origin
        for xi, e in zip(x, self.directions):
            if xi:
                p = p + xi * e
        return p

    def vertices(self) -> list[NSClass]:
        return [self.eta(x) for x in itertools.product(*zip(self.lo, self.hi))]

    def centre(self) -> NSClass:
        return self.eta([(a + b) / 2 for a, b in zip(self.lo, self.hi)])

    def contains(self, p: StabilityPoint, surface: SurfaceData) -> bool:
        if not (self.s_lo <= p.s <= self.s_hi):
            return False
        x = self.coordinates(p.eta, surface)
        return x is not None and all(a <= xi <= b for a, xi, b in zip(self.lo, x, self.hi))

    def coordinates(self, eta: NSClass, surface: SurfaceData) -> Optional[list[Fraction]]:
        """Coordinates of ``eta`` in the box chart, or None if off the affine span."""
        diff = eta - self.origin
        if self.dim == 0:
            return [] if diff.is_zero() else None
        M = [[surface.form(e, f) for f in self.directions] for e in self.directions]
        x = _solve(M, [surface.form(e, diff) for e in self.directions])
        return x if self.eta(x) == eta else None

    def halves(self) -> tuple["Box", "Box"]:
        """Split along the longest side (the s-interval counts as a side)."""
        widths = [b - a for a, b in zip(self.lo, self.hi)]
        if not widths or self.s_hi - self.s_lo >= max(widths):
            m = (self.s_lo + self.s_hi) / 2
            return (_replace(self, s_hi=m), _replace(self, s_lo=m))
        i = widths.index(max(widths))
        m = (self.lo[i] + self.hi[i]) / 2
        hi1 = self.hi[:i] + (m,) + self.hi[i + 1:]
        lo2 = self.lo[:i] + (m,) + self.lo[i + 1:]
        return (_replace(self, hi=hi1), _replace(self, lo=lo2))


def _replace(box: Box, **kw) -> Box:
    fields = dict(origin=box.origin, directions=box.directions, lo=box.lo, hi=box.hi, s_lo=box.s_lo, s_hi=box.s_hi)
    fields.update(kw)
    if isinstance(box, FixedBetaInterval):
        return FixedBetaInterval(fields["origin"], fields["s_lo"], fields["s_hi"])
    return Box(**fields)


def make_box(surface: SurfaceData, x_ranges: Sequence[tuple], s_range: tuple,
             directions: Optional[Sequence] = None, origin=None) -> Box:
    """Box in coordinates along ``directions`` (default: a basis of ``H^perp`` in NS)."""
    dirs = tuple(NSClass(e) for e in directions) if directions is not None else orthogonal_basis(surface)
    for e in dirs:
        if surface.degree(e) != 0:
            raise LatticeError("box directions must be orthogonal to H")
    o = NSClass(origin) if origin is not None else NSClass.zero(surface.rho)
    if surface.degree(o) != 0:
        raise LatticeError("box origin must be orthogonal to H")
    return Box(o, dirs, tuple(r[0] for r in x_ranges), tuple(r[1] for r in x_ranges), s_range[0], s_range[1])


class FixedBetaInterval(Box):
    """The ray ``R_{>0} H`` at a fixed ``beta = bH + eta``, cut to ``[s_lo, s_hi]``."""

    def __init__(self, eta: NSClass, s_lo, s_hi):
        super().__init__(NSClass(eta), (), (), (), s_lo, s_hi)


Region = Union[Box, FixedBetaInterval]


def _minimize_quadratic_on_box(M, m, lo, hi) -> Fraction:
    """Minimum of ``x^T M x + 2 m^T x`` over the box; M positive definite.

    Enumerates active sets: each coordinate sits at a bound or is free; the
    free block solves the stationarity equations.  The true minimizer is one
    of the feasible candidates.
    """
    n = len(m)
    if n == 0:
        return Fraction(0)

    def value(x):
        return sum(x[i] * M[i][j] * x[j] for i in range(n) for j in range(n)) + 2 * sum(m[i] * x[i] for i in range(n))

    best = None
    for pattern in itertools.product((0, 1, 2), repeat=n):
        x: list[Optional[Fraction]] = [lo[i] if p == 0 else hi[i] if p == 1 else None for i, p in enumerate(pattern)]
        free = [i for i in range(n) if x[i] is None]
        if free:
            sub = [[M[i][j] for j in free] for i in free]
            rhs = [-(m[i] + sum(M[i][j] * x[j] for j in range(n) if x[j] is not None)) for i in free]
            sol = _solve(sub, rhs)
            if any(not (lo[i] <= xi <= hi[i]) for i, xi in zip(free, sol)):
                continue
            for i, xi in zip(free, sol):
                x[i] = xi
        val = value(x)
        if best is None or val < best:
            best = val
    return best


def q_range(box: Box, centre: NSClass, surface: SurfaceData) -> tuple[Fraction, Fraction]:
    """Exact range of ``q(eta - centre) = -((eta - centre)^2)`` over the box."""
    vals = [-surface.square(e - centre) for e in box.vertices()]
    n = box.dim
    if n == 0:
        return vals[0], vals[0]
    dirs = box.directions
    M = [[-surface.form(dirs[i], dirs[j]) for j in range(n)] for i in range(n)]
    off = box.origin - centre
    m = [-surface.form(dirs[i], off) for i in range(n)]
    qmin = _minimize_quadratic_on_box(M, m, box.lo, box.hi) - surface.square(off)
    return qmin, max(vals)


def linear_range(box: Box, w: NSClass, surface: SurfaceData) -> tuple[Fraction, Fraction]:
    """Range of ``(eta, w)`` over the box."""
    vals = [surface.form(e, w) for e in box.vertices()]
    return min(vals), max(vals)


# --- wall equations ----------------------------------------------------------

@dataclass(frozen=True)
class HalfSphere:
    """``s + q(eta - center) = radius_sq``."""

    center: NSClass
    radius_sq: Fraction


@dataclass(frozen=True)
class Hyperplane:
    """``(eta, normal) = offset``, independent of ``s``."""

    normal: NSClass
    offset: Fraction


@dataclass(frozen=True)
class WallEquation:
    """``F(eta, s) = P (s - (eta^2)) + 2 (eta, w) - 2 A``."""

    P: Fraction
    w: NSClass
    A: Fraction

    def __call__(self, eta: NSClass, s: Fraction, surface: SurfaceData) -> Fraction:
        return self.P * (s - surface.square(eta)) + 2 * surface.form(eta, self.w) - 2 * self.A

    def is_trivial(self) -> bool:
        return self.P == 0 and self.A == 0 and self.w.is_zero()

    def geometry(self, surface: SurfaceData) -> Union[HalfSphere, Hyperplane]:
        if self.P == 0:
            return Hyperplane(self.w, self.A)
        c = self.w / self.P
        return HalfSphere(c, 2 * self.A / self.P - surface.square(c))

    def meets(self, box: Box, surface: SurfaceData) -> bool:
        """Whether the zero set meets the closed box."""
        if self.is_trivial():
            return True
        if self.P == 0:
            lo, hi = linear_range(box, self.w, surface)
            return lo <= self.A <= hi
        geom = self.geometry(surface)
        qmin, qmax = q_range(box, geom.center, surface)
        # along the wall s = R - q(eta - c); its range over the box is an interval
        return geom.radius_sq - qmax <= box.s_hi and geom.radius_sq - qmin >= box.s_lo

    def g_range(self, box: Box, surface: SurfaceData) -> tuple[Fraction, Fraction]:
        """Range over the box of ``P (s - (eta^2)) + 2 (eta, w)``."""
        ps = sorted((self.P * box.s_lo, self.P * box.s_hi))
        if self.P == 0:
            lo, hi = linear_range(box, self.w, surface)
            return ps[0] + 2 * lo, ps[1] + 2 * hi
        c = self.w / self.P
        qmin, qmax = q_range(box, c, surface)
        # P q(eta) + 2 (eta, w) = P (q(eta - c) - q(c))
        qc = -surface.square(c)
        ends = sorted((self.P * (qmin - qc), self.P * (qmax - qc)))
        return ps[0] + ends[0], ps[1] + ends[1]

    def on_segment(self, eta0: NSClass, s0: Fraction, eta1: NSClass, s1: Fraction,
                   surface: SurfaceData) -> tuple[Fraction, Fraction, Fraction]:
        """Coefficients ``(alpha, beta, gamma)`` of ``F`` along ``t -> (1-t) p0 + t p1``."""
        de = eta1 - eta0
        ds = s1 - s0
        alpha = -self.P * surface.square(de)
        beta = self.P * (ds - 2 * surface.form(eta0, de)) + 2 * surface.form(de, self.w)
        gamma = self(eta0, s0, surface)
        return alpha, beta, gamma


def _separates(alpha: Fraction, beta: Fraction, gamma: Fraction) -> bool:
    """Whether ``alpha t^2 + beta t + gamma`` changes sign on the open interval (0, 1)."""
    f0 = gamma
    f1 = alpha + beta + gamma
    if f0 * f1 < 0:
        return True
    if alpha == 0:
        return False
    disc = beta * beta - 4 * alpha * gamma
    if disc <= 0:
        return False
    tv = -beta / (2 * alpha)
    if not (0 < tv < 1):
        return False
    fv = alpha * tv * tv + beta * tv + gamma
    # two simple roots inside (0, 1) when the vertex dips across zero
    return (f0 > 0 and fv < 0) or (f0 < 0 and fv > 0)


# --- walls for categories ----------------------------------------------------

@dataclass(frozen=True)
class CategoryWall:
    """A (-2)-vector ``u`` with ``d(u) = 0`` and the locus ``rk u s = -2 <e^{bH+eta}, u>``."""

    u: MukaiVector
    b: Fraction
    equation: WallEquation
    geometry: Optional[HalfSphere]

    @property
    def degenerate(self) -> bool:
        return self.u.r == 0

    @property
    def key(self) -> tuple:
        return ("category", self.u.coords())


def category_equation(u: MukaiVector, surface: SurfaceData, b) -> WallEquation:
    """``F = rk u s + 2 <e^{bH+eta}, u>`` written in wall-equation form."""
    b = as_fraction(b)
    h2 = surface.H_sq
    deg = surface.degree(u.c1)
    w = u.c1 - (deg / h2) * surface.H
    A = u.s - b * deg + u.r * b * b * h2 / 2
    return WallEquation(u.r, w, A)


def _canonical_u(u: MukaiVector) -> MukaiVector:
    if u.r < 0:
        return -u
    if u.r == 0:
        for c in u.c1:
            if c:
                return u if c > 0 else -u
    return u


def make_category_wall(u: MukaiVector, surface: SurfaceData, b) -> CategoryWall:
    b = as_fraction(b)
    if mukai_pairing(u, u, surface) != -2:
        raise LatticeError("category walls come from (-2)-vectors")
    if surface.degree(u.c1) != u.r * b * surface.H_sq:
        raise LatticeError("u is not orthogonal to H + (H, bH) rho")
    u = _canonical_u(u)
    eq = category_equation(u, surface, b)
    geom = eq.geometry(surface) if u.r > 0 else None
    return CategoryWall(u, b, eq, geom)


def category_wall_eval(u: MukaiVector, p: StabilityPoint, b=None) -> Fraction:
    """``rk u s + 2 <e^{bH+eta}, u>``; zero exactly on the wall of ``u``."""
    surface = p.frame.surface
    b = p.frame.b if b is None else as_fraction(b)
    beta = b * surface.H + p.eta
    return u.r * p.s + 2 * mukai_pairing(exp_beta(beta, surface), u, surface)


def _require_k3(surface: SurfaceData) -> None:
    if surface.epsilon != 1:
        raise LatticeError("walls for categories exist only on K3 surfaces")


def enumerate_R_beta(frame: BetaFrame) -> list[CategoryWall]:
    """All (-2)-vectors ``u`` with ``d(u) = 0``, ``rk u > 0`` and ``-<e^beta, u> > 0``.

    With ``a = -<e^beta, u>`` one has ``r0 a`` a positive integer and
    ``(D^2) = 2 r a - 2 <= 0``, so ``r <= 1/a <= r0``.
    """
    surface = frame.surface
    _require_k3(surface)
    beta = frame.beta
    out = []
    for r in range(1, frame.r0 + 1):
        coset = degree_coset(surface, r * surface.degree(beta))
        if coset is None:
            continue
        # D = c1 - r beta with -(D^2) = 2 - 2 r a < 2
        shifted = coset.shifted(-r * beta)
        for D in short_vectors(surface.gram, 2, shifted):
            if -surface.square(D) >= 2:
                continue
            c1 = D + r * beta
            s_num = surface.square(c1) + 2
            if (s_num / (2 * r)).denominator != 1:
                continue
            u = MukaiVector(r, c1, s_num / (2 * r))
            a = -mukai_pairing(exp_beta(beta, surface), u, surface)
            if a > 0:
                out.append(make_category_wall(u, surface, frame.b))
    return sorted(out, key=lambda w: w.u.coords())


def category_thresholds(frame: BetaFrame) -> list[Fraction]:
    """Sorted distinct values of ``(omega^2)/2 = -<e^beta, u>/rk u`` over ``u`` in the set above."""
    surface = frame.surface
    e = exp_beta(frame.beta, surface)
    return sorted({-mukai_pairing(e, w.u, surface) / w.u.r for w in enumerate_R_beta(frame)})


def _floor_sum_sqrt(x: Fraction, y: Fraction) -> int:
    """``floor(x + sqrt(y))`` for ``y >= 0``, exactly."""
    n = (x.numerator // x.denominator) + isqrt(y.numerator // y.denominator) + 2
    while n - x > 0 and (n - x) ** 2 > y:
        n -= 1
    return n


def category_walls_in_box(surface: SurfaceData, b, box: Box) -> list[CategoryWall]:
    """All walls for categories at ``b`` that meet the box, including rank-0 ones."""
    _require_k3(surface)
    b = as_fraction(b)
    h2 = surface.H_sq
    centre = box.centre()
    qmin_c, rbox = q_range(box, centre, surface)
    out: list[CategoryWall] = []
    # positive rank: 2/r^2 >= s for a point of the wall, so r^2 <= 2/s_lo
    r_max = _floor_sum_sqrt(Fraction(0), 2 / box.s_lo)
    for r in range(1, r_max + 1):
        coset = degree_coset(surface, r * b * h2)
        if coset is None:
            continue
        # q(c1 - r bH - r centre) <= (sqrt 2 + r sqrt(rbox))^2 <= 2 (2 + r^2 rbox)
        shift = r * b * surface.H + r * centre
        for X in short_vectors(surface.gram, 2 * (2 + r * r * rbox), coset.shifted(-shift)):
            c1 = X + shift
            s_num = surface.square(c1) + 2
            if (s_num / (2 * r)).denominator != 1:
                continue
            wall = make_category_wall(MukaiVector(r, c1, s_num / (2 * r)), surface, b)
            if wall.equation.meets(box, surface):
                out.append(wall)
    # rank zero: c1 in H^perp with (c1^2) = -2, hyperplane (eta, c1) = s_u
    zero_coset = degree_coset(surface, 0)
    for c1 in short_vectors(surface.gram, 2, zero_coset):
        if surface.square(c1) != -2 or _canonical_u(MukaiVector(0, c1, 0)).c1 != c1:
            continue
        lo, hi = linear_range(box, c1, surface)
        k_lo = -((-lo.numerator) // lo.denominator)
        k_hi = hi.numerator // hi.denominator
        for k in range(k_lo, k_hi + 1):
            out.append(make_category_wall(MukaiVector(0, c1, k), surface, b))
    return sorted(out, key=lambda w: w.u.coords())


# --- walls for stabilities ---------------------------------------------------

@dataclass(frozen=True)
class StabilityWall:
    """A wall for ``v`` keyed by the line through ``v1/d1 - v/d``.

    ``v1`` is the representative with the lexicographically least
    decomposition ``(r1, a1, d1, D1)`` among ``members``.
    """

    v: MukaiVector
    v1: MukaiVector
    members: tuple[MukaiVector, ...]
    equation: WallEquation
    geometry: Union[HalfSphere, Hyperplane]

    @property
    def key(self) -> tuple:
        return ("stability", self.v1.coords())


def stability_equation(v: MukaiVector, v1: MukaiVector, surface: SurfaceData, b) -> WallEquation:
    """Coefficients ``P = d r1 - d1 r``, ``w = d D1 - d1 D``, ``A = d a1 - d1 a`` at ``bH``."""
    beta = as_fraction(b) * surface.H
    x = decompose_at(v, surface, beta)
    y = decompose_at(v1, surface, beta)
    return WallEquation(x.d * y.r - y.d * x.r, x.d * y.D - y.d * x.D, x.d * y.a - y.d * x.a)


def stability_wall_eval(v: MukaiVector, v1: MukaiVector, p: StabilityPoint) -> Fraction:
    """``s (d r1 - d1 r) - 2 (-d <e^{bH+eta}, v1> + d1 <e^{bH+eta}, v>)``.

    Equal to ``-2 sigma_bracket(v, v1, p)``; zero exactly on the wall of ``v1``.
    """
    surface = p.frame.surface
    beta = p.beta
    e = exp_beta(beta, surface)
    d = decompose_at(v, surface, beta).d
    d1 = decompose_at(v1, surface, beta).d
    P = d * v1.r - d1 * v.r
    return p.s * P - 2 * (-d * mukai_pairing(e, v1, surface) + d1 * mukai_pairing(e, v, surface))


def _line_key(x: MukaiVector) -> tuple:
    coords = x.coords()
    den = lcm(*(c.denominator for c in coords))
    ints = [int(c * den) for c in coords]
    g = gcd(*ints)
    ints = [k // g for k in ints]
    first = next(k for k in ints if k)
    return tuple(ints if first > 0 else [-k for k in ints])


def bogomolov_lower(d1: Fraction, frame: BetaFrame) -> Fraction:
    """``-2 (d1/d_min)^2 epsilon``."""
    return -2 * (d1 / frame.d_min) ** 2 * frame.surface.epsilon


def candidate_upper(v_sq: Fraction, d: Fraction, d1: Fraction, frame: BetaFrame) -> Fraction:
    """``(d1/d) <v^2> + 2 d d1 epsilon / d_min^2``."""
    return d1 / d * v_sq + 2 * d * d1 * frame.surface.epsilon / frame.d_min ** 2


def _decomposition_key(dec: BetaDecomposition) -> tuple:
    return (dec.r, dec.a, dec.d, *dec.D.coeffs)


def stability_wall_candidates(v: MukaiVector, frame: BetaFrame, region: Region,
                              quotient_bogomolov: bool = False) -> list[StabilityWall]:
    """Numerical walls for ``v`` meeting ``region``.

    Lists every integral ``v1`` with ``0 < d1 < d``, ``d1`` in ``d_min Z`` and
    ``-2 d1^2 eps/d_min^2 <= <v1^2> < (d1/d) <v^2> + 2 d d1 eps/d_min^2``
    whose wall meets the region, grouped into walls.  On a
    :class:`FixedBetaInterval` the sharper bound using ``<v1^2> - (D1^2)``
    at that ``beta`` is also imposed.  With ``quotient_bogomolov`` the class
    ``v - v1`` must satisfy the Bogomolov bound as well, which every wall
    realized by a pair of semistable objects does.  Realizability by actual
    objects is not checked.
    """
    surface = frame.surface
    d = decompose_at(v, surface, frame.b * surface.H).d
    v_sq = mukai_pairing(v, v, surface)
    found = list(aligned_classes(v, frame, region, lambda d1: candidate_upper(v_sq, d, d1, frame),
                                 strict_upper=True, keep_trivial=False, include_full=False))
    if isinstance(region, FixedBetaInterval):
        dec_eta = decompose_at(v, surface, frame.beta_at(region.origin))
        excess = v_sq - surface.square(dec_eta.D)
        kept = []
        for v1, dec1, eq in found:
            dec1_eta = decompose_at(v1, surface, frame.beta_at(region.origin))
            rhs = dec1.d / d * excess + 2 * d * dec1.d * surface.epsilon / frame.d_min ** 2
            if mukai_pairing(v1, v1, surface) - surface.square(dec1_eta.D) < rhs:
                kept.append((v1, dec1, eq))
        found = kept
    if quotient_bogomolov:
        found = [(v1, dec1, eq) for v1, dec1, eq in found
                 if mukai_pairing(v - v1, v - v1, surface) >= bogomolov_lower(d - dec1.d, frame)]
    return _group_walls(v, d, found, surface)


def aligned_classes(v: MukaiVector, frame: BetaFrame, region: Region, upper_of: Callable[[Fraction], Fraction],
                    strict_upper: bool, keep_trivial: bool, include_full: bool
                    ) -> Iterator[tuple[MukaiVector, BetaDecomposition, WallEquation]]:
    """Integral ``v1`` with ``d1`` in ``d_min Z``, ``0 < d1 < d`` (``<= d`` with
    ``include_full``), ``bogomolov_lower(d1) <= <v1^2> <= upper_of(d1)`` and a
    wall meeting the region.

    Yields ``(v1, decomposition at bH, wall equation)``.  Classes whose wall
    equation vanishes identically are kept only with ``keep_trivial``; the
    upper bound is strict with ``strict_upper``, and boundary classes dropped
    that way are logged.
    """
    surface = frame.surface
    h2 = surface.H_sq
    b = frame.b
    bH = b * surface.H
    dec = decompose_at(v, surface, bH)
    r, a, d, D = dec.r, dec.a, dec.d, dec.D
    if d <= 0:
        raise LatticeError("stability walls need d(v) > 0")

    centre = region.centre()
    _, rbox = q_range(region, centre, surface)
    _, q_eta_max = q_range(region, NSClass.zero(surface.rho), surface)
    lin_lo, lin_hi = linear_range(region, D, surface)
    a_prime_max = max(abs(a - lin_lo), abs(a - lin_hi)) + abs(r) * q_eta_max / 2

    n_d1 = d / frame.d_min
    k_max = n_d1.numerator // n_d1.denominator
    for k in range(1, k_max + 1):
        d1 = k * frame.d_min
        if d1 > d or (d1 == d and not include_full):
            break
        lower = bogomolov_lower(d1, frame)
        upper = upper_of(d1)
        if upper < lower or (strict_upper and upper == lower):
            continue
        K = d1 * d1 * h2 - lower
        c_max = d1 / d * (region.s_hi * abs(r) + 2 * a_prime_max)
        r1_max = _floor_sum_sqrt(c_max / region.s_lo, K / region.s_lo)
        for r1 in range(-r1_max, r1_max + 1):
            deg1 = (r1 * b + d1) * h2
            coset = degree_coset(surface, deg1)
            if coset is None:
                continue
            # D1 = c1 - (r1 b + d1) H, searched around r1 * centre
            base = (r1 * b + d1) * surface.H
            T = K + abs(r1) * c_max
            bound = 2 * T + 2 * r1 * r1 * rbox
            for X in short_vectors(surface.gram, bound, coset.shifted(-base - r1 * centre)):
                D1 = X + r1 * centre
                c1 = D1 + base
                P = d * r1 - d1 * r
                w = d * D1 - d1 * D
                base_sq = d1 * d1 * h2 + surface.square(D1)
                eq0 = WallEquation(P, w, Fraction(0))
                g_lo, g_hi = eq0.g_range(region, surface)
                a1_lo = (g_lo + 2 * d1 * a) / (2 * d)
                a1_hi = (g_hi + 2 * d1 * a) / (2 * d)
                if r1 > 0:
                    a1_lo = max(a1_lo, (base_sq - upper) / (2 * r1))
                    a1_hi = min(a1_hi, (base_sq - lower) / (2 * r1))
                elif r1 < 0:
                    a1_lo = max(a1_lo, (base_sq - lower) / (2 * r1))
                    a1_hi = min(a1_hi, (base_sq - upper) / (2 * r1))
                elif not (lower <= base_sq <= upper):
                    continue
                if a1_lo > a1_hi:
                    continue
                # s1 = a1 + kappa with kappa = (d1 H + D1, bH) + r1 (bH)^2 / 2
                kappa = d1 * b * h2 + r1 * b * b * h2 / 2
                s1_lo = a1_lo + kappa
                s1_hi = a1_hi + kappa
                for s1 in range(-((-s1_lo.numerator) // s1_lo.denominator), s1_hi.numerator // s1_hi.denominator + 1):
                    v1 = MukaiVector(r1, c1, s1)
                    sq = mukai_pairing(v1, v1, surface)
                    if sq < lower or sq > upper:
                        continue
                    if strict_upper and sq == upper:
                        log.debug("dropping boundary candidate %r for %r", v1, v)
                        continue
                    dec1 = decompose_at(v1, surface, bH)
                    eq = WallEquation(P, w, d * dec1.a - d1 * a)
                    if eq.is_trivial() and not keep_trivial:
                        continue
                    if eq.meets(region, surface):
                        yield v1, dec1, eq


def _group_walls(v, d, found, surface) -> list[StabilityWall]:
    groups: dict[tuple, list] = {}
    for v1, dec1, eq in found:
        groups.setdefault(_line_key(v1 / dec1.d - v / d), []).append((v1, dec1, eq))
    walls = []
    for members in groups.values():
        members.sort(key=lambda m: _decomposition_key(m[1]))
        v1, _, eq = members[0]
        walls.append(StabilityWall(v, v1, tuple(m[0] for m in members), eq, eq.geometry(surface)))
    return sorted(walls, key=lambda w: w.v1.coords())


# --- chambers ----------------------------------------------------------------

@dataclass(frozen=True)
class ChamberSignature:
    """Signs of the wall functions at a point, in a fixed wall order."""

    entries: tuple[tuple[tuple, int], ...]

    @property
    def boundary(self) -> bool:
        return any(sign == 0 for _, sign in self.entries)

    def walls_through(self) -> list[tuple]:
        return [key for key, sign in self.entries if sign == 0]


@dataclass
class WallSet:
    """All walls relevant to ``v`` in a region: categories (K3) then stabilities."""

    surface: SurfaceData
    category: list[CategoryWall] = field(default_factory=list)
    stability: list[StabilityWall] = field(default_factory=list)

    def equations(self) -> list[tuple[tuple, WallEquation]]:
        return [(w.key, w.equation) for w in self.category] + [(w.key, w.equation) for w in self.stability]


def walls_in_region(v: Optional[MukaiVector], frame: BetaFrame, region: Region) -> WallSet:
    surface = frame.surface
    ws = WallSet(surface)
    if surface.epsilon == 1:
        ws.category = category_walls_in_box(surface, frame.b, region)
    if v is not None:
        ws.stability = stability_wall_candidates(v, frame, region)
    return ws


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def signature_at(walls: WallSet, p: StabilityPoint) -> ChamberSignature:
    return ChamberSignature(tuple((key, _sign(eq(p.eta, p.s, walls.surface))) for key, eq in walls.equations()))


def locate_chamber(v: Optional[MukaiVector], p: StabilityPoint, frame: BetaFrame, region: Region) -> ChamberSignature:
    """Sign vector of every wall meeting the region at ``p``; zero entries mark boundary points."""
    if not region.contains(p, frame.surface):
        raise LatticeError("point lies outside the region")
    return signature_at(walls_in_region(v, frame, region), p)


def same_chamber(v: Optional[MukaiVector], p: StabilityPoint, q: StabilityPoint, frame: BetaFrame, region: Region) -> bool:
    """Equal signatures and no wall crossed along the segment from ``p`` to ``q``."""
    walls = walls_in_region(v, frame, region)
    sp, sq = signature_at(walls, p), signature_at(walls, q)
    if sp != sq or sp.boundary:
        return False
    surface = frame.surface
    for _, eq in walls.equations():
        if _separates(*eq.on_segment(p.eta, p.s, q.eta, q.s, surface)):
            return False
    return True
