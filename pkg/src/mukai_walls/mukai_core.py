"""Exact arithmetic on the algebraic Mukai lattice of an abelian or K3 surface.

The lattice is ``Z + NS(X) + Z rho`` with pairing

    <x, y> = (x1, y1) - x0 y2 - x2 y0

where ``(., .)`` is the intersection form on NS(X), given by a Gram matrix in
a fixed user-supplied basis.  Every value here is a :class:`fractions.Fraction`;
floats are rejected on input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence


class LatticeError(ValueError):
    """Invalid lattice input or violated precondition."""


class SignatureError(LatticeError):
    """The Gram matrix does not have signature (1, rho - 1)."""


def as_fraction(x) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    >>> as_fraction("3/6")
    Fraction(1, 2)
    """
    if isinstance(x, bool):
        raise LatticeError(f"not a rational number: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise LatticeError(f"not a rational number: {x!r}") from exc
    raise LatticeError(f"expected int, Fraction or rational string, got {type(x).__name__}")


def rational_gcd(values: Iterable[Fraction]) -> Fraction:
    """Non-negative generator of the subgroup of Q generated by ``values``."""
    vals = [as_fraction(v) for v in values]
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    g = 0
    for v in vals:
        g = gcd(g, v.numerator * (den // v.denominator))
    return Fraction(g, den)


@dataclass(frozen=True)
class NSClass:
    """A class in NS(X) tensor Q, stored by coordinates in the fixed basis."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in coeffs))

    @classmethod
    def zero(cls, rho: int) -> "NSClass":
        return cls((0,) * rho)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def _check(self, other: "NSClass") -> None:
        if len(other) != len(self):
            raise LatticeError("NS classes of different rank")

    def __add__(self, other: "NSClass") -> "NSClass":
        self._check(other)
        return NSClass(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "NSClass") -> "NSClass":
        self._check(other)
        return NSClass(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "NSClass":
        return NSClass(-a for a in self.coeffs)

    def __mul__(self, k) -> "NSClass":
        k = as_fraction(k)
        return NSClass(k * a for a in self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "NSClass":
        k = as_fraction(k)
        return NSClass(a / k for a in self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __repr__(self) -> str:
        return "NSClass(" + ", ".join(str(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class MukaiVector:
    """``r + c1 + s rho``: rank, NS component and rho-coefficient."""

    r: Fraction
    c1: NSClass
    s: Fraction

    def __init__(self, r, c1, s):
        object.__setattr__(self, "r", as_fraction(r))
        object.__setattr__(self, "c1", c1 if isinstance(c1, NSClass) else NSClass(c1))
        object.__setattr__(self, "s", as_fraction(s))

    @property
    def rho(self) -> int:
        return len(self.c1)

    @classmethod
    def zero(cls, rho: int) -> "MukaiVector":
        return cls(0, NSClass.zero(rho), 0)

    @classmethod
    def point(cls, rho: int) -> "MukaiVector":
        """The class rho of a point."""
        return cls(0, NSClass.zero(rho), 1)

    def __add__(self, other: "MukaiVector") -> "MukaiVector":
        return MukaiVector(self.r + other.r, self.c1 + other.c1, self.s + other.s)

    def __sub__(self, other: "MukaiVector") -> "MukaiVector":
        return MukaiVector(self.r - other.r, self.c1 - other.c1, self.s - other.s)

    def __neg__(self) -> "MukaiVector":
        return MukaiVector(-self.r, -self.c1, -self.s)

    def __mul__(self, k) -> "MukaiVector":
        k = as_fraction(k)
        return MukaiVector(k * self.r, k * self.c1, k * self.s)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "MukaiVector":
        k = as_fraction(k)
        return MukaiVector(self.r / k, self.c1 / k, self.s / k)

    def coords(self) -> tuple[Fraction, ...]:
        """Coordinates ``(r, c1_1, ..., c1_rho, s)``."""
        return (self.r, *self.c1.coeffs, self.s)

    @classmethod
    def from_coords(cls, coords: Sequence) -> "MukaiVector":
        coords = list(coords)
        return cls(coords[0], coords[1:-1], coords[-1])

    def is_zero(self) -> bool:
        return not any(self.coords())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords())

    def __repr__(self) -> str:
        return f"MukaiVector({self.r}, {list(map(str, self.c1))}, {self.s})".replace("'", "")


def _symmetric_inertia(matrix: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """Numbers of positive, negative and zero eigenvalues, by exact congruence."""
    m = [[Fraction(x) for x in row] for row in matrix]
    pos = neg = 0
    active = list(range(len(m)))
    while active:
        pivot = next((i for i in active if m[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i != j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # congruence e_i -> e_i + e_j makes the diagonal entry 2 m_ij
            for k in range(len(m)):
                m[i][k] += m[j][k]
            for k in range(len(m)):
                m[k][i] += m[k][j]
            continue
        p = m[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for i in active:
            f = m[i][pivot] / p
            if f:
                for j in active:
                    m[i][j] -= f * m[pivot][j]
    return pos, neg, len(m) - pos - neg


def inertia(matrix: Sequence[Sequence]) -> tuple[int, int, int]:
    """Sylvester inertia ``(n_+, n_-, n_0)`` of a rational symmetric matrix."""
    return _symmetric_inertia([[as_fraction(x) for x in row] for row in matrix])


@dataclass(frozen=True)
class SurfaceData:
    """NS lattice data of an abelian (``epsilon=0``) or K3 (``epsilon=1``) surface."""

    epsilon: int
    gram: tuple[tuple[int, ...], ...]
    H: NSClass

    def __init__(self, epsilon: int, gram: Sequence[Sequence], H: Iterable):
        if epsilon not in (0, 1):
            raise LatticeError("epsilon must be 0 (abelian) or 1 (K3)")
        rows = []
        for row in gram:
            ints = []
            for x in row:
                x = as_fraction(x)
                if x.denominator != 1:
                    raise LatticeError("Gram matrix must be integral")
                ints.append(int(x))
            rows.append(tuple(ints))
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise LatticeError("Gram matrix must be square and nonempty")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise LatticeError("Gram matrix must be symmetric")
        H = NSClass(H)
        if len(H) != n or not H.is_integral():
            raise LatticeError("H must be an integral vector of length rho")
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "gram", tuple(rows))
        object.__setattr__(self, "H", H)
        pos, neg, zero = inertia(rows)
        if zero:
            raise LatticeError("degenerate Gram matrix")
        if pos != 1:
            raise SignatureError(f"signature: expected (1, {n - 1}), got ({pos}, {neg})")
        h2 = self.H_sq
        if h2 <= 0 or h2 % 2:
            raise LatticeError("(H^2) must be a positive even integer")

    @property
    def rho(self) -> int:
        return len(self.gram)

    def form(self, x: NSClass, y: NSClass) -> Fraction:
        """Intersection number ``(x, y)``."""
        if len(x) != self.rho or len(y) != self.rho:
            raise LatticeError("dimension mismatch with surface")
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram[i]
                total += xi * sum(row[j] * yj for j, yj in enumerate(y))
        return total

    def square(self, x: NSClass) -> Fraction:
        return self.form(x, x)

    @cached_property
    def H_sq(self) -> Fraction:
        return self.form(self.H, self.H)

    def degree(self, x: NSClass) -> Fraction:
        """``(x, H)``."""
        return self.form(x, self.H)

    def degree_vector(self) -> tuple[int, ...]:
        """The integers ``h_i = (e_i, H)``."""
        return tuple(sum(self.gram[i][j] * int(self.H[j]) for j in range(self.rho)) for i in range(self.rho))


def mukai_pairing(x: MukaiVector, y: MukaiVector, surface: SurfaceData) -> Fraction:
    """``<x, y> = (x1, y1) - x0 y2 - x2 y0``."""
    return surface.form(x.c1, y.c1) - x.r * y.s - x.s * y.r


def exp_beta(beta: NSClass, surface: SurfaceData) -> MukaiVector:
    """``e^beta = (1, beta, (beta^2)/2)``."""
    return MukaiVector(1, beta, surface.square(beta) / 2)


def mukai_lattice_gram(surface: SurfaceData) -> list[list[int]]:
    """Gram matrix J of the Mukai pairing in coordinates ``(r, c1, s)``."""
    n = surface.rho + 2
    J = [[0] * n for _ in range(n)]
    for i in range(surface.rho):
        for j in range(surface.rho):
            J[i + 1][j + 1] = surface.gram[i][j]
    J[0][n - 1] = J[n - 1][0] = -1
    return J


# --- integer lattice helpers -------------------------------------------------

def unimodular_column_reduction(h: Sequence[int]) -> tuple[int, list[list[int]]]:
    """Return ``(g, U)`` with U unimodular and ``h U = (g, 0, ..., 0)``, ``g >= 0``.

    The columns of U after the first span the integer kernel of ``h``.
    """
    n = len(h)
    row = [int(x) for x in h]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, k: int) -> None:
        # column dst -= k * column src
        row[dst] -= k * row[src]
        for i in range(n):
            U[i][dst] -= k * U[i][src]

    def swap(i: int, j: int) -> None:
        row[i], row[j] = row[j], row[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    for j in range(1, n):
        while row[j] != 0:
            colop(0, j, row[0] // row[j])
            swap(0, j)
    if row[0] < 0:
        row[0] = -row[0]
        for r in U:
            r[0] = -r[0]
    return row[0], U


def _normalize_sign(vec: list[int]) -> list[int]:
    for x in vec:
        if x:
            return vec if x > 0 else [-y for y in vec]
    return vec


@dataclass(frozen=True)
class AffineLattice:
    """The coset ``offset + span_Z(basis)`` inside NS tensor Q."""

    offset: NSClass
    basis: tuple[NSClass, ...] = field(default_factory=tuple)

    def point(self, k: Sequence[int]) -> NSClass:
        p = self.offset
        for ki, b in zip(k, self.basis):
            if ki:
                p = p + ki * b
        return p

    def shifted(self, t: NSClass) -> "AffineLattice":
        return AffineLattice(self.offset + t, self.basis)


def orthogonal_basis(surface: SurfaceData) -> tuple[NSClass, ...]:
    """A basis of the integral lattice ``H^perp`` inside NS, sign-normalized."""
    _, U = unimodular_column_reduction(surface.degree_vector())
    n = surface.rho
    return tuple(NSClass(_normalize_sign([U[i][j] for i in range(n)])) for j in range(1, n))


def degree_coset(surface: SurfaceData, degree) -> AffineLattice | None:
    """The classes ``xi`` in NS with ``(xi, H) = degree``, or None if there are none."""
    degree = as_fraction(degree)
    g, U = unimodular_column_reduction(surface.degree_vector())
    if degree.denominator != 1 or int(degree) % g:
        return None
    k = int(degree) // g
    offset = NSClass(k * U[i][0] for i in range(surface.rho))
    return AffineLattice(offset, orthogonal_basis(surface))


# --- beta frames -------------------------------------------------------------

@dataclass(frozen=True)
class BetaFrame:
    """A base class beta on a surface with its derived constants.

    ``r0`` is the least positive integer with ``r0 e^beta`` integral, ``b0`` the
    denominator of ``b = (beta, H)/(H^2)``, ``d_min`` the positive generator of
    ``{(xi - r beta, H)/(H^2)}`` and ``delta`` that of ``{(xi, H)/(H^2)}``.
    """

    surface: SurfaceData
    beta: NSClass
    b: Fraction
    eta_beta: NSClass
    r0: int
    b0: int
    d_min: Fraction
    delta: Fraction

    def dual(self) -> "BetaFrame":
        """The frame at ``-beta``."""
        return frame_constants(self.surface, -self.beta)

    def beta_at(self, eta: NSClass) -> NSClass:
        """``b H + eta``."""
        return self.b * self.surface.H + eta


def frame_constants(surface: SurfaceData, beta: Iterable) -> BetaFrame:
    """Compute ``r0``, ``b0``, ``d_min`` and ``delta`` for ``beta``."""
    beta = NSClass(beta)
    if len(beta) != surface.rho:
        raise LatticeError("dimension mismatch with surface")
    h2 = surface.H_sq
    b = surface.degree(beta) / h2
    r0 = lcm(*(c.denominator for c in beta), (surface.square(beta) / 2).denominator)
    degrees = [Fraction(h) for h in surface.degree_vector()]
    delta = rational_gcd(degrees) / h2
    d_min = rational_gcd(degrees + [surface.degree(beta)]) / h2
    return BetaFrame(surface, beta, b, beta - b * surface.H, r0, b.denominator, d_min, delta)


@dataclass(frozen=True)
class BetaDecomposition:
    """``v = r e^beta + a rho + (dH + D) + (dH + D, beta) rho`` with ``(D, H) = 0``."""

    r: Fraction
    a: Fraction
    d: Fraction
    D: NSClass


def decompose_at(v: MukaiVector, surface: SurfaceData, beta: NSClass) -> BetaDecomposition:
    """Decomposition of ``v`` with respect to an arbitrary rational ``beta``."""
    a = -mukai_pairing(exp_beta(beta, surface), v, surface)
    xi = v.c1 - v.r * beta
    d = surface.degree(xi) / surface.H_sq
    return BetaDecomposition(v.r, a, d, xi - d * surface.H)


def beta_decompose(v: MukaiVector, frame: BetaFrame) -> BetaDecomposition:
    return decompose_at(v, frame.surface, frame.beta)


def recompose_at(dec: BetaDecomposition, surface: SurfaceData, beta: NSClass) -> MukaiVector:
    if surface.degree(dec.D) != 0:
        raise LatticeError("D is not orthogonal to H")
    xi = dec.d * surface.H + dec.D
    e = exp_beta(beta, surface)
    return dec.r * e + MukaiVector(0, xi, dec.a + surface.form(xi, beta))


def beta_recompose(dec: BetaDecomposition, frame: BetaFrame) -> MukaiVector:
    return recompose_at(dec, frame.surface, frame.beta)


def is_beta_integral(v: MukaiVector, frame: BetaFrame) -> bool:
    """``r`` integral, ``c1`` in NS and ``r0 a`` integral.

    This is the integrality used when enumerating classes in a frame; it does
    not imply that the rho-coefficient of ``v`` is an integer.
    """
    a = beta_decompose(v, frame).a
    return v.r.denominator == 1 and v.c1.is_integral() and (frame.r0 * a).denominator == 1


def reflect(u: MukaiVector, x: MukaiVector, surface: SurfaceData) -> MukaiVector:
    """Reflection ``x + <u, x> u`` in a (-2)-vector ``u``."""
    if mukai_pairing(u, u, surface) != -2:
        raise LatticeError("reflection needs a (-2)-vector")
    return x + mukai_pairing(u, x, surface) * u


# --- short vectors -----------------------------------------------------------

def _ldl_positive(Q: list[list[Fraction]]) -> list[list[Fraction]]:
    """Fincke-Pohst form: ``q(y) = sum_i A_ii (y_i + sum_{j>i} A_ij y_j)^2``.

    Raises LatticeError unless Q is positive definite.
    """
    n = len(Q)
    A = [row[:] for row in Q]
    for i in range(n):
        if A[i][i] <= 0:
            raise LatticeError("form is not definite")
        for j in range(i + 1, n):
            A[j][i] = A[i][j]
            A[i][j] = A[i][j] / A[i][i]
        for k in range(i + 1, n):
            for j in range(k, n):
                A[k][j] -= A[k][i] * A[i][j]
    return A


def _solve(Q: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(Q)
    m = [Q[i][:] + [rhs[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def _integers_near(center: Fraction, radius_sq: Fraction) -> range:
    """Integers k with ``(k - center)^2 <= radius_sq``."""
    if radius_sq < 0:
        return range(0)
    slack = isqrt(radius_sq.numerator // radius_sq.denominator) + 1
    lo = center.numerator // center.denominator - slack
    hi = -((-center.numerator) // center.denominator) + slack
    while (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def short_vectors(gram: Sequence[Sequence], norm_bound, coset: AffineLattice | None = None) -> list[NSClass]:
    """All ``D`` in ``coset`` with ``-(D^2) <= |norm_bound|``.

    ``gram`` is the intersection form in NS coordinates; it must be negative
    definite on the span of ``coset.basis`` (on all of Z^n when ``coset`` is
    omitted).  Output is sorted lexicographically by coordinates.
    """
    G = [[as_fraction(x) for x in row] for row in gram]
    n = len(G)
    bound = abs(as_fraction(norm_bound))
    if coset is None:
        coset = AffineLattice(NSClass.zero(n), tuple(NSClass(int(i == j) for j in range(n)) for i in range(n)))

    def form(x, y):
        return sum(x[i] * G[i][j] * y[j] for i in range(n) for j in range(n) if x[i] and y[j])

    B = coset.basis
    o = coset.offset
    c0 = -form(o, o)
    m = len(B)
    if m == 0:
        return [o] if c0 <= bound else []
    Q = [[-form(B[i], B[j]) for j in range(m)] for i in range(m)]
    lin = [-form(B[i], o) for i in range(m)]
    try:
        A = _ldl_positive(Q)
    except LatticeError:
        raise LatticeError("indefinite form on coset") from None
    centre = [-x for x in _solve(Q, lin)]
    # q(k) = (k - centre)^T Q (k - centre) + c0 - centre^T Q centre
    budget = bound - c0 + sum(centre[i] * Q[i][j] * centre[j] for i in range(m) for j in range(m))
    found: list[NSClass] = []
    k = [0] * m

    def descend(i: int, remaining: Fraction) -> None:
        shift = sum((A[i][j] * (k[j] - centre[j]) for j in range(i + 1, m)), Fraction(0))
        c = centre[i] - shift
        for ki in _integers_near(c, remaining / A[i][i]):
            k[i] = ki
            rest = remaining - A[i][i] * (ki - c) ** 2
            if i == 0:
                found.append(coset.point(k))
            else:
                descend(i - 1, rest)

    descend(m - 1, budget)
    # exact recheck guards against any slip in the completed square
    result = sorted({D for D in found if -form(D, D) <= bound}, key=lambda D: D.coeffs)
    return result
