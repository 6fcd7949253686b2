"""Fourier-Mukai transforms as Mukai-lattice isometries and their action on parameters.

A transform is described only by its lattice data ``(r0, beta, beta', hat)``:

    e^beta              -> (1/r0) rho'
    rho                 -> r0 e^{beta'}
    C + (C, beta) rho   -> -(hat C) - (hat C, beta') rho'

where ``hat`` is an isometry ``NS(X) -> NS(X')``.  Since ``eta`` is orthogonal
to ``omega`` in every parameter, ``((eta + i omega)^2) = (eta^2) - s`` is
rational and no complex arithmetic is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from .central_charge import CentralValue, StabilityPoint, central_charge
from .mukai_core import (
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    SurfaceData,
    as_fraction,
    exp_beta,
    frame_constants,
    mukai_lattice_gram,
    mukai_pairing,
)

Matrix = tuple[tuple[Fraction, ...], ...]


def _matmul(A, B) -> list[list[Fraction]]:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _transpose(A) -> list[list[Fraction]]:
    return [list(col) for col in zip(*A)]


def _as_matrix(rows) -> Matrix:
    return tuple(tuple(as_fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class MukaiIsometry:
    """A pairing-preserving map between Mukai lattices, on coordinates ``(r, c1, s)``.

    ``r0``, ``beta``, ``beta_prime`` and ``hat_map`` are set when the map was
    built from transform data; composites carry only the matrix.
    ``omega_hat_nef`` records the user's assertion that the image of the
    polarization is nef and big, which lattice data cannot certify.
    """

    matrix: Matrix
    source: SurfaceData
    target: SurfaceData
    r0: Optional[int] = None
    beta: Optional[NSClass] = None
    beta_prime: Optional[NSClass] = None
    hat_map: Optional[Matrix] = None
    omega_hat_nef: bool = False

    def apply(self, v: MukaiVector) -> MukaiVector:
        x = v.coords()
        return MukaiVector.from_coords(sum(a * b for a, b in zip(row, x)) for row in self.matrix)

    def hat(self, C: NSClass) -> NSClass:
        if self.hat_map is None:
            raise LatticeError("isometry carries no NS map")
        return NSClass(sum(a * b for a, b in zip(row, C)) for row in self.hat_map)

    def compose(self, other: "MukaiIsometry") -> "MukaiIsometry":
        """``self`` after ``other``, stored as a raw isometry."""
        if other.target.gram != self.source.gram:
            raise LatticeError("isometries do not compose")
        return MukaiIsometry(_as_matrix(_matmul(self.matrix, other.matrix)), other.source, self.target)

    def preserves_pairing(self) -> bool:
        J = mukai_lattice_gram(self.source)
        Jp = mukai_lattice_gram(self.target)
        return _matmul(_matmul(_transpose(self.matrix), Jp), self.matrix) == [[Fraction(x) for x in row] for row in J]


def _primitive_positive(x: NSClass) -> NSClass:
    den = lcm(*(c.denominator for c in x))
    ints = [int(c * den) for c in x]
    g = gcd(*ints)
    return NSClass(k // g for k in ints)


def fm_build(r0: int, beta, beta_prime, hat_map: Sequence[Sequence], source: SurfaceData,
             target: Optional[SurfaceData] = None, omega_hat_nef: bool = False) -> MukaiIsometry:
    """Assemble the lattice map of a transform and verify that it is an isometry.

    Without ``target`` the target surface has the same Gram matrix and
    polarization the primitive integral class on the ray of ``hat H``.
    """
    if int(r0) != r0 or r0 < 1:
        raise LatticeError("r0 must be a positive integer")
    beta = NSClass(beta)
    hat = _as_matrix(hat_map)
    rho_src = source.rho
    if len(hat[0]) != rho_src:
        raise LatticeError("hat map has the wrong number of columns")
    if target is None:
        Hhat = NSClass(sum(a * b for a, b in zip(row, source.H)) for row in hat)
        target = SurfaceData(source.epsilon, source.gram, _primitive_positive(Hhat))
    beta_prime = NSClass(beta_prime)
    if len(hat) != target.rho or len(beta_prime) != target.rho or len(beta) != rho_src:
        raise LatticeError("dimension mismatch in transform data")
    G = [[Fraction(x) for x in row] for row in source.gram]
    Gp = [[Fraction(x) for x in row] for row in target.gram]
    if _matmul(_matmul(_transpose(hat), Gp), hat) != G:
        raise LatticeError("hat map is not an isometry of the NS forms")

    e_prime = exp_beta(beta_prime, target)
    rho_prime = MukaiVector.point(target.rho)
    e = exp_beta(beta, source)

    def image(x: MukaiVector) -> MukaiVector:
        a = -mukai_pairing(e, x, source)
        C = x.c1 - x.r * beta
        Chat = NSClass(sum(h * c for h, c in zip(row, C)) for row in hat)
        return (x.r / r0) * rho_prime + (a * r0) * e_prime - MukaiVector(0, Chat, target.form(Chat, beta_prime))

    n = rho_src + 2
    cols = []
    for k in range(n):
        basis = [0] * n
        basis[k] = 1
        cols.append(image(MukaiVector.from_coords(basis)).coords())
    matrix = _as_matrix(_transpose(cols))
    iso = MukaiIsometry(matrix, source, target, int(r0), beta, beta_prime, hat, omega_hat_nef)
    if not iso.preserves_pairing():
        raise LatticeError("assembled map does not preserve the Mukai pairing")
    return iso


def fm_image_shift(iso: MukaiIsometry, v: MukaiVector) -> MukaiVector:
    """The class of the shifted image, ``-Phi(v)``."""
    return -iso.apply(v)


def _require_fm(iso: MukaiIsometry) -> None:
    if iso.r0 is None:
        raise LatticeError("operation needs transform data, not a raw isometry")


def target_frame(iso: MukaiIsometry) -> BetaFrame:
    _require_fm(iso)
    return frame_constants(iso.target, iso.beta_prime)


def param_scale(iso: MukaiIsometry, p: StabilityPoint) -> tuple[NSClass, Fraction]:
    """``(eta_rel, f)`` with ``eta_rel = beta(p) - beta`` and ``f = -2/(r0((eta_rel^2) - s))``."""
    _require_fm(iso)
    surface = iso.source
    eta_rel = p.beta - iso.beta
    if surface.degree(eta_rel) != 0:
        raise LatticeError("point and transform use different b")
    return eta_rel, Fraction(-2) / (iso.r0 * (surface.square(eta_rel) - p.s))


def param_transform(iso: MukaiIsometry, p: StabilityPoint) -> StabilityPoint:
    """Image ``(beta' + f hat(eta_rel), f^2 s)`` of a parameter, as a point of the target frame."""
    eta_rel, f = param_scale(iso, p)
    eta_t = f * iso.hat(eta_rel)
    frame_t = target_frame(iso)
    # hat is an isometry, so (hat omega)^2 = s
    s_t = f * f * p.s
    eta_full = iso.beta_prime + eta_t - frame_t.b * iso.target.H
    return StabilityPoint(frame_t, eta_full, s_t)


def param_invariant(iso: MukaiIsometry, p: StabilityPoint) -> tuple[Fraction, Fraction]:
    """``((s~ - (eta~^2))(s - (eta^2)), 4/r0^2)``; the two agree."""
    eta_rel, _ = param_scale(iso, p)
    q = param_transform(iso, p)
    eta_t = q.beta - iso.beta_prime
    lhs = (q.s - iso.target.square(eta_t)) * (p.s - iso.source.square(eta_rel))
    return lhs, Fraction(4, iso.r0 ** 2)


def charge_commutation_check(iso: MukaiIsometry, v: MukaiVector, p: StabilityPoint) -> tuple[CentralValue, CentralValue]:
    """Both sides of ``Z'(-Phi(v)) = f Z(v)`` with imaginary parts divided by ``sqrt(s/(H^2))``.

    With ``omega = t H`` the imaginary parts are ``d' f t (H', hat H)`` and
    ``f d t (H^2)``; the common factor ``t`` is dropped, so both pairs are
    rational.
    """
    _, f = param_scale(iso, p)
    q = param_transform(iso, p)
    lhs_z = central_charge(fm_image_shift(iso, v), q)
    rhs_z = central_charge(v, p)
    Hhat = iso.hat(iso.source.H)
    lhs = CentralValue(lhs_z.re, lhs_z.im_coeff * f * iso.target.form(iso.target.H, Hhat))
    rhs = CentralValue(f * rhs_z.re, f * rhs_z.im_coeff * iso.source.H_sq)
    return lhs, rhs


def reflection_param(u: MukaiVector, p: StabilityPoint) -> StabilityPoint:
    """Parameter map of the reflection in a positive-rank (-2)-vector ``u``.

    With ``c1(u)/r = bH + upsilon``: ``eta - upsilon`` is scaled by
    ``f = 2/(r^2 (s - ((eta - upsilon)^2)))``, and ``s`` by ``f^2``.
    Its fixed points are exactly the wall of ``u``.
    """
    surface = p.frame.surface
    if mukai_pairing(u, u, surface) != -2:
        raise LatticeError("reflection needs a (-2)-vector")
    r = u.r
    if r <= 0:
        raise LatticeError("reflection parameter map needs rk u > 0")
    upsilon = u.c1 / r - p.frame.b * surface.H
    if surface.degree(upsilon) != 0:
        raise LatticeError("u must satisfy d(u) = 0 in this frame")
    eta_rel = p.eta - upsilon
    f = Fraction(2) / (r * r * (p.s - surface.square(eta_rel)))
    return StabilityPoint(p.frame, f * eta_rel + upsilon, f * f * p.s)


@dataclass(frozen=True)
class SpherePoint:
    """``(-2 xi/(r - 2a), (2a + r)/(2a - r))`` split into its real-NS and omega parts.

    ``X_omega_sq`` is the square of the ``omega`` coefficient measured by
    ``-(.)^2`` on the imaginary line, so the sphere relation reads
    ``-(X_eta^2) + X_omega_sq + Y^2 = 1``.
    """

    X_eta: NSClass
    X_omega_sq: Fraction
    Y: Fraction
    at_infinity: bool


def sphere_embed(r, xi_real, omega_sq, a, surface: SurfaceData) -> SpherePoint:
    """Chart of the point ``x = r + (xi_real + i omega) + a rho`` with ``<x^2> = 0``.

    ``xi_real`` lies in ``H^perp`` and ``omega`` on ``R H`` with ``(omega^2) =
    omega_sq``.  The class ``rho`` maps to the pole ``(0, 1)``, flagged as the
    point at infinity.
    """
    r, a, s = as_fraction(r), as_fraction(a), as_fraction(omega_sq)
    xi_real = NSClass(xi_real)
    if surface.degree(xi_real) != 0:
        raise LatticeError("xi must have its real part in H^perp")
    if s < 0:
        raise LatticeError("(omega^2) must be nonnegative")
    if surface.square(xi_real) - s - 2 * r * a != 0:
        raise LatticeError("x is not isotropic")
    if r == 2 * a:
        raise LatticeError("r = 2a has no chart value")
    k = -2 / (r - 2 * a)
    X_eta = k * xi_real
    X_omega_sq = k * k * s
    Y = (2 * a + r) / (2 * a - r)
    return SpherePoint(X_eta, X_omega_sq, Y, r == 0 and X_eta.is_zero() and s == 0)


def sphere_relation(pt: SpherePoint, surface: SurfaceData) -> Fraction:
    """``-(X_eta^2) + X_omega_sq + Y^2``; equal to 1 on the sphere."""
    return -surface.square(pt.X_eta) + pt.X_omega_sq + pt.Y * pt.Y
