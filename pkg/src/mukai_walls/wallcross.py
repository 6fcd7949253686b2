"""Phase-aligned decompositions on a wall and q-weighted counts across it.

At a point ``p`` on a wall for ``v`` the relevant tuples are ordered
decompositions ``v = v_1 + ... + v_s`` (``s >= 2``) whose central charges lie
on the ray of ``Z(v)``, with phases strictly decreasing at a point ``p_+`` or
``p_-`` just off the wall.  With an oracle ``N`` giving weighted counts on one
side, the count on the wall is

    N_side(v) + sum over tuples of q^{e} prod N_side(v_i),   e = sum_{i>j} <v_i, v_j>,

and equating the two sides determines ``N_+`` from ``N_-``.

Classes with ``Z = 0`` at ``p`` (for example on a wall for categories) enter
only when passed as ``null_classes``: such a part has phase 1 on the side
where its real part is negative and phase 0 on the other, so it leads a
minus-side tuple and ends a plus-side one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Protocol, Sequence, Union

import sympy

from .central_charge import StabilityPoint
from .mukai_core import (
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    SurfaceData,
    as_fraction,
    beta_decompose,
    decompose_at,
    mukai_pairing,
)
from .star_conditions import dual
from .wall_engine import Box, aligned_classes

MINUS = "minus"
PLUS = "plus"
_SIDE_SIGN = {MINUS: -1, PLUS: 1}


# --- Laurent polynomials in q --------------------------------------------------

class LaurentPolyQ:
    """Finite sum of ``c q^k`` with rational ``c`` and integer ``k``; zero terms are not stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        clean = {}
        for k, c in (terms or {}).items():
            if int(k) != k:
                raise LatticeError("exponents must be integers")
            c = as_fraction(c)
            if c:
                clean[int(k)] = c
        self.terms = clean

    @classmethod
    def monomial(cls, k: int, c=1) -> "LaurentPolyQ":
        return cls({k: c})

    @classmethod
    def constant(cls, c) -> "LaurentPolyQ":
        return cls({0: c})

    @classmethod
    def coerce(cls, x) -> "LaurentPolyQ":
        return x if isinstance(x, LaurentPolyQ) else cls.constant(x)

    def __add__(self, other) -> "LaurentPolyQ":
        other = LaurentPolyQ.coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPolyQ(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolyQ":
        return LaurentPolyQ({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPolyQ":
        return self + (-LaurentPolyQ.coerce(other))

    def __rsub__(self, other) -> "LaurentPolyQ":
        return LaurentPolyQ.coerce(other) - self

    def __mul__(self, other) -> "LaurentPolyQ":
        other = LaurentPolyQ.coerce(other)
        out: dict[int, Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPolyQ(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPolyQ":
        if n < 0:
            raise LatticeError("negative powers are not polynomials")
        out = LaurentPolyQ.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPolyQ.constant(other)
        if not isinstance(other, LaurentPolyQ):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, q) -> Fraction:
        q = as_fraction(q)
        return sum((c * q ** k for k, c in self.terms.items()), Fraction(0))

    def to_json(self) -> dict[str, str]:
        return {str(k): str(c) for k, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPolyQ":
        return cls({int(k): Fraction(str(c)) for k, c in data.items()})

    def to_sympy(self, q: sympy.Symbol) -> sympy.Expr:
        return sum((sympy.Rational(c.numerator, c.denominator) * q ** k for k, c in self.terms.items()), sympy.Integer(0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items(), reverse=True):
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                qk = "q" if k == 1 else f"q^{k}"
                body = qk if mag == 1 else f"{mag}*{qk}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPolyQ({self})"


def q_binomial(n: int, m: int) -> LaurentPolyQ:
    """Gaussian binomial ``[n choose m]_q`` by the q-Pascal rule."""
    if n < 0 or m < 0:
        raise LatticeError("q_binomial needs nonnegative arguments")
    if m > n:
        raise LatticeError("q_binomial needs m <= n")
    row = [LaurentPolyQ.constant(1)]
    for k in range(1, n + 1):
        # [k, j] = [k-1, j-1] + q^j [k-1, j]
        new = [LaurentPolyQ.constant(1)]
        for j in range(1, k):
            new.append(row[j - 1] + LaurentPolyQ.monomial(j) * row[j])
        new.append(LaurentPolyQ.constant(1))
        row = new
    return row[m]


def gl_count(N: int) -> LaurentPolyQ:
    """``#GL_N(F_q) = q^{N(N-1)/2} prod_{i=1}^{N} (q^i - 1)``."""
    if N < 0:
        raise LatticeError("gl_count needs N >= 0")
    out = LaurentPolyQ.monomial(N * (N - 1) // 2)
    for i in range(1, N + 1):
        out = out * (LaurentPolyQ.monomial(i) - 1)
    return out


# --- count oracles ---------------------------------------------------------------

class MissingCount(LatticeError):
    def __init__(self, vectors: Sequence[MukaiVector]):
        self.vectors = list(vectors)
        super().__init__("no count for " + ", ".join(str(v) for v in self.vectors))


class CountOracle(Protocol):
    def count(self, v: MukaiVector, phase: Optional[int] = None): ...

    def q_power(self, e: int): ...

    def zero(self): ...


def _key(v: MukaiVector) -> tuple:
    return tuple(v.coords())


class TableOracle:
    """Counts looked up in a table of Laurent polynomials.

    ``null_table`` holds counts for ``Z = 0`` classes keyed by ``(vector,
    phase)``; a class missing there falls back to ``table``.
    """

    def __init__(self, table: dict, null_table: Optional[dict] = None):
        self.table = {tuple(map(Fraction, k)): LaurentPolyQ.coerce(p) for k, p in table.items()}
        self.null_table = {(tuple(map(Fraction, k)), ph): LaurentPolyQ.coerce(p)
                           for (k, ph), p in (null_table or {}).items()}

    def count(self, v: MukaiVector, phase: Optional[int] = None) -> LaurentPolyQ:
        k = _key(v)
        if phase is not None and (k, phase) in self.null_table:
            return self.null_table[(k, phase)]
        if k in self.table:
            return self.table[k]
        raise MissingCount([v])

    def q_power(self, e: int) -> LaurentPolyQ:
        return LaurentPolyQ.monomial(e)

    def zero(self) -> LaurentPolyQ:
        return LaurentPolyQ()

    @classmethod
    def from_json(cls, data: Union[str, list]) -> "TableOracle":
        """``[{"vector": [r, c1..., s], "poly": {"k": "c"}, "phase"?: 0|1}, ...]``."""
        if isinstance(data, str):
            data = json.loads(data)
        table, null = {}, {}
        for entry in data:
            key = tuple(Fraction(str(x)) for x in entry["vector"])
            poly = LaurentPolyQ.from_json(entry["poly"])
            if entry.get("phase") is None:
                table[key] = poly
            else:
                null[(key, int(entry["phase"]))] = poly
        return cls(table, null)


def _atom_name(v: MukaiVector, phase: Optional[int]) -> str:
    body = ",".join(str(x) for x in v.coords())
    return f"N({body})" if phase is None else f"N({body};{phase})"


class SymbolicOracle:
    """Every count is an opaque sympy symbol ``N(r,c1,s)``; ``q`` is a symbol too.

    A ``Z = 0`` class counts the same objects on both sides of its wall, so
    its phase is ignored unless ``phase_atoms`` asks for separate symbols
    ``N(r,c1,s;phase)``.
    """

    def __init__(self, phase_atoms: bool = False):
        self.q = sympy.Symbol("q")
        self.phase_atoms = phase_atoms

    def count(self, v: MukaiVector, phase: Optional[int] = None) -> sympy.Expr:
        return sympy.Symbol(_atom_name(v, phase if self.phase_atoms else None))

    def q_power(self, e: int) -> sympy.Expr:
        return self.q ** e

    def zero(self) -> sympy.Expr:
        return sympy.Integer(0)


class _RecordingOracle:
    """Wraps an oracle, answering zero for missing classes and remembering them."""

    def __init__(self, inner):
        self.inner = inner
        self.missing: list[MukaiVector] = []

    def count(self, v, phase=None):
        try:
            return self.inner.count(v, phase)
        except MissingCount as exc:
            for x in exc.vectors:
                if x not in self.missing:
                    self.missing.append(x)
            return self.inner.zero()

    def q_power(self, e):
        return self.inner.q_power(e)

    def zero(self):
        return self.inner.zero()


def dual_consistency(oracle, vectors: Iterable[MukaiVector]) -> list[MukaiVector]:
    """Classes whose count differs from that of the dual class ``(r, -c1, s)``."""
    bad = []
    for v in vectors:
        a, b = oracle.count(v), oracle.count(dual(v))
        if sympy.simplify(a - b) != 0 if isinstance(a, sympy.Expr) else a != b:
            bad.append(v)
    return bad


# --- decompositions on a wall -------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """An ordered tuple of parts summing to ``v``.

    ``s_equivalent`` marks tuples with two consecutive parts of equal phase on
    this side; they are listed for bookkeeping and never enter counts.
    """

    parts: tuple[MukaiVector, ...]
    side: str
    point: StabilityPoint
    s_equivalent: bool = False

    def exponent(self, surface: SurfaceData) -> int:
        e = sum((mukai_pairing(self.parts[i], self.parts[j], surface)
                 for i in range(len(self.parts)) for j in range(i)), Fraction(0))
        if e.denominator != 1:
            raise LatticeError("q-exponent is not an integer; parts are not integral")
        return int(e)


def _quadratic_along(fn, p: StabilityPoint, delta_eta: NSClass, delta_s: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of ``t -> fn(eta + t delta_eta, s + t delta_s)``, a polynomial of degree <= 2."""
    f0 = fn(p.eta, p.s)
    f1 = fn(p.eta + delta_eta, p.s + delta_s)
    fm = fn(p.eta - delta_eta, p.s - delta_s)
    return f0, (f1 - fm) / 2, (f1 + fm) / 2 - f0


def _side_sign(coeffs: tuple[Fraction, Fraction, Fraction], side: int) -> int:
    """Sign for small ``t`` with ``sign(t) = side`` of a quadratic vanishing at 0."""
    _, c1, c2 = coeffs
    for c in (side * c1, c2):
        if c:
            return 1 if c > 0 else -1
    return 0


class _SideOrder:
    """Phase comparisons just off ``p`` along a perturbation direction."""

    def __init__(self, p: StabilityPoint, delta_eta: NSClass, delta_s: Fraction, side: int):
        self.p = p
        self.surface = p.frame.surface
        self.b = p.frame.b
        self.delta_eta = delta_eta
        self.delta_s = delta_s
        self.side = side
        self._decs: dict[tuple, object] = {}
        self._brackets: dict[tuple, int] = {}

    def _dec(self, x: MukaiVector, eta: NSClass):
        key = (x, eta)
        if key not in self._decs:
            self._decs[key] = decompose_at(x, self.surface, self.b * self.surface.H + eta)
        return self._decs[key]

    def bracket(self, x: MukaiVector, y: MukaiVector) -> int:
        """Sign of ``phi(y) - phi(x)`` on this side (parts with ``d > 0``)."""
        key = (x, y)
        if key in self._brackets:
            return self._brackets[key]

        def fn(eta, s):
            dx, dy = self._dec(x, eta), self._dec(y, eta)
            return (dx.r * dy.d - dy.r * dx.d) * s / 2 - (dx.a * dy.d - dy.a * dx.d)
        coeffs = _quadratic_along(fn, self.p, self.delta_eta, self.delta_s)
        if coeffs[0] != 0:
            raise LatticeError("parts are not phase-aligned at the wall point")
        self._brackets[key] = _side_sign(coeffs, self.side)
        return self._brackets[key]

    def null_phase(self, u: MukaiVector) -> int:
        """Phase 1 or 0 of a class with ``Z(u) = 0`` at ``p``."""
        def fn(eta, s):
            du = self._dec(u, eta)
            return -du.a + du.r * s / 2
        coeffs = _quadratic_along(fn, self.p, self.delta_eta, self.delta_s)
        sign = _side_sign(coeffs, self.side)
        if coeffs[0] != 0 or self._dec(u, self.p.eta).d != 0:
            raise LatticeError(f"{u} does not have Z = 0 at the wall point")
        if sign == 0:
            raise LatticeError(f"Z({u}) stays zero along the perturbation")
        return 1 if sign < 0 else 0


def _point_region(p: StabilityPoint) -> Box:
    return Box(p.eta, (), (), (), p.s, p.s)


def _aligned_parts(t: MukaiVector, frame: BetaFrame, p: StabilityPoint, include_full: bool) -> list[MukaiVector]:
    """Classes ``w`` with ``Z(w)`` on the ray of ``Z(t)`` that can occur in a decomposition of ``t``."""
    surface = frame.surface
    d = decompose_at(t, surface, frame.b * surface.H).d
    t_sq = mukai_pairing(t, t, surface)
    eps = surface.epsilon

    def upper(d1):
        # the sum bound with every other part at its Bogomolov minimum
        return d1 / d * t_sq + 2 * d1 * (d - d1) * eps / frame.d_min ** 2

    found = aligned_classes(t, frame, _point_region(p), upper, strict_upper=False, keep_trivial=True,
                            include_full=include_full)
    return sorted({v1 for v1, _, _ in found}, key=lambda x: x.coords())


def _ordered_tuples(t: MukaiVector, parts: list[MukaiVector], order: _SideOrder, surface: SurfaceData,
                    allow_single: bool) -> tuple[list[tuple], list[tuple]]:
    """Strict and S-equivalent phase-ordered tuples of ``parts`` summing to ``t``."""
    strict, equal = [], []
    d_of = {x: decompose_at(x, surface, order.b * surface.H).d for x in parts}

    def extend(prefix: list[MukaiVector], rest: MukaiVector, has_tie: bool):
        for w in parts:
            if prefix:
                last = prefix[-1]
                cmp = order.bracket(last, w)
                # phases must not increase; ties kept in coordinate order only
                if cmp > 0 or (cmp == 0 and w.coords() < last.coords()):
                    continue
                tie = has_tie or cmp == 0
            else:
                tie = False
            if w == rest:
                if prefix or allow_single:
                    (equal if tie else strict).append(tuple(prefix + [w]))
                continue
            if d_of[w] < decompose_at(rest, surface, order.b * surface.H).d:
                extend(prefix + [w], rest - w, tie)

    extend([], t, False)
    return strict, equal


def _check_side(side: str) -> int:
    if side not in _SIDE_SIGN:
        raise LatticeError("side must be 'minus' or 'plus'")
    return _SIDE_SIGN[side]


def _direction(p: StabilityPoint, direction) -> tuple[NSClass, Fraction]:
    if direction is None:
        return NSClass.zero(p.frame.surface.rho), Fraction(1)
    delta_eta, delta_s = NSClass(direction[0]), as_fraction(direction[1])
    if p.frame.surface.degree(delta_eta) != 0:
        raise LatticeError("perturbation of eta must be orthogonal to H")
    if delta_eta.is_zero() and delta_s == 0:
        raise LatticeError("zero perturbation direction")
    return delta_eta, delta_s


def decompositions_on_wall(v: MukaiVector, p: StabilityPoint, frame: BetaFrame, side: str,
                           direction=None, null_classes: Sequence[MukaiVector] = ()) -> list[Decomposition]:
    """All phase-aligned decompositions of ``v`` at ``p``, ordered for one side.

    ``side`` is ``"minus"`` or ``"plus"``: the point ``p + t direction`` with
    ``t`` small and negative or positive.  ``direction`` is a pair ``(delta_eta,
    delta_s)``, by default ``(0, 1)``.  Strictly ordered tuples come first;
    tuples with a tie in phase follow with ``s_equivalent`` set.  At a point on
    no wall the list is empty.
    """
    sgn = _check_side(side)
    if frame.b != p.frame.b or frame.surface != p.frame.surface:
        raise LatticeError("point and frame disagree")
    surface = frame.surface
    if decompose_at(v, surface, p.beta).d <= 0:
        raise LatticeError("decompositions need d(v) > 0")
    delta_eta, delta_s = _direction(p, direction)
    order = _SideOrder(p, delta_eta, delta_s, sgn)

    out: list[Decomposition] = []
    strict, equal = _ordered_tuples(v, _aligned_parts(v, frame, p, False), order, surface, allow_single=False)
    for n in null_classes:
        if not n.is_integral():
            raise LatticeError(f"null class {n} is not integral")
        phase = order.null_phase(n)
        # phase 1 leads on the minus side, phase 0 trails on the plus side
        if (side == MINUS) != (phase == 1):
            continue
        t = v - n
        if decompose_at(t, surface, p.beta).d != decompose_at(v, surface, p.beta).d:
            continue
        s_t, e_t = _ordered_tuples(t, _aligned_parts(t, frame, p, True), order, surface, allow_single=True)
        wrap = (lambda tup: (n,) + tup) if side == MINUS else (lambda tup: tup + (n,))
        strict += [wrap(tup) for tup in s_t]
        equal += [wrap(tup) for tup in e_t]
    out += [Decomposition(tup, side, p) for tup in strict]
    out += [Decomposition(tup, side, p, True) for tup in equal]
    return out


def wall_value(v: MukaiVector, oracle, p: StabilityPoint, side: str, decomps: Iterable[Decomposition],
               null_classes: Sequence[MukaiVector] = (), direction=None):
    """``N_side(v) + sum q^{e} prod N_side(v_i)`` over the strict tuples for ``side``.

    Parts listed in ``null_classes`` are looked up with their phase (1 on the
    minus side, 0 on the plus side).
    """
    _check_side(side)
    surface = p.frame.surface
    null = set(null_classes)
    total = oracle.count(v)
    for dec in decomps:
        if dec.side != side:
            raise LatticeError("decomposition is for the other side")
        if dec.s_equivalent:
            continue
        term = oracle.q_power(dec.exponent(surface))
        for x in dec.parts:
            term = term * (oracle.count(x, 1 if side == MINUS else 0) if x in null else oracle.count(x))
        total = total + term
    return total


def crossing_solve(v: MukaiVector, oracle_minus, p: StabilityPoint, direction=None,
                   null_classes: Sequence[MukaiVector] = (), max_depth: int = 64):
    """``N_+(v)`` from minus-side counts by equating the two wall values.

    Parts are solved recursively at the same point; counts of ``Z = 0``
    classes come from ``oracle_minus`` with their phase.  Raises
    :class:`MissingCount` listing every class the oracle lacks.
    """
    frame = p.frame
    surface = frame.surface
    null = set(null_classes)
    rec = _RecordingOracle(oracle_minus)
    memo: dict[tuple, object] = {}

    def solve(x: MukaiVector, depth: int):
        k = _key(x)
        if k in memo:
            return memo[k]
        if depth > max_depth:
            raise LatticeError("recursion through null classes does not terminate")
        minus = decompositions_on_wall(x, p, frame, MINUS, direction, null_classes)
        plus = decompositions_on_wall(x, p, frame, PLUS, direction, null_classes)
        val = wall_value(x, rec, p, MINUS, minus, null_classes)
        for dec in plus:
            if dec.s_equivalent:
                continue
            term = rec.q_power(dec.exponent(surface))
            for y in dec.parts:
                term = term * (rec.count(y, 0) if y in null else solve(y, depth + 1))
            val = val - term
        if isinstance(val, sympy.Expr):
            val = sympy.expand(val)
        memo[k] = val
        return val

    result = solve(v, 0)
    if rec.missing:
        raise MissingCount(rec.missing)
    return result


# --- dimensions and codimension -------------------------------------------------

def _divisibility(v: MukaiVector) -> int:
    if not v.is_integral():
        raise LatticeError(f"{v} is not integral")
    g = 0
    for x in v.coords():
        g = gcd(g, int(x))
    if g == 0:
        raise LatticeError("zero vector")
    return g


def expected_dim(v: MukaiVector, frame: BetaFrame) -> int:
    """Dimension of the semistable moduli for general ``(H, beta)``, with ``v = l v'``."""
    surface = frame.surface
    l = _divisibility(v)
    sq = mukai_pairing(v, v, surface)
    prim_sq = sq / (l * l)
    if sq > 0:
        return int(sq) + 1
    if sq == 0:
        return l
    if prim_sq == -2:
        return int(sq) + l * l
    raise LatticeError("no dimension formula for <v'^2> < -2")


@dataclass(frozen=True)
class CodimClassification:
    defect: int
    case: str


def _is_prim_isotropic(u: MukaiVector, surface: SurfaceData) -> bool:
    return mukai_pairing(u, u, surface) == 0 and _divisibility(u) == 1


def _primitive(u: MukaiVector) -> tuple[int, MukaiVector]:
    l = _divisibility(u)
    return l, u / l


def classify_codim(v: MukaiVector, parts: Sequence[MukaiVector], frame: BetaFrame) -> CodimClassification:
    """Defect ``dim M(v) - sum_{i>j} <v_i, v_j> - sum dim M(v_i)`` and the matching case.

    Cases: ``"a"`` (defect 0), ``"b1"``..``"b4"`` (defect 1), ``">=2"``, or
    ``"other"`` when the defect is 0 or 1 but no listed shape fits.  Abelian
    surfaces only; parts must have ``<v_i^2> >= 0``.
    """
    surface = frame.surface
    if surface.epsilon != 0:
        raise LatticeError("codimension classification needs epsilon = 0")
    parts = list(parts)
    if len(parts) < 2:
        raise LatticeError("need at least two parts")
    if sum(parts[1:], parts[0]) != v:
        raise LatticeError("parts do not sum to v")
    for x in parts:
        if mukai_pairing(x, x, surface) < 0:
            raise LatticeError("parts need <v_i^2> >= 0")
    pair = lambda x, y: mukai_pairing(x, y, surface)
    cross = sum(pair(parts[i], parts[j]) for i in range(len(parts)) for j in range(i))
    defect = expected_dim(v, frame) - int(cross) - sum(expected_dim(x, frame) for x in parts)
    if defect >= 2:
        return CodimClassification(defect, ">=2")
    s = len(parts)
    case = "other"
    if defect == 0 and s == 2:
        for x, y in (parts, parts[::-1]):
            l, u1 = _primitive(x)
            if mukai_pairing(u1, u1, surface) == 0 and pair(u1, y) == 1:
                case = "a"
    elif defect == 1 and s == 2:
        x, y = parts
        if pair(x, y) == 2 and (_is_prim_isotropic(x, surface) or _is_prim_isotropic(y, surface)):
            case = "b1"
        else:
            (lx, ux), (ly, uy) = _primitive(x), _primitive(y)
            if (lx, ly) == (2, 2) and pair(ux, ux) == pair(uy, uy) == 0 and pair(ux, uy) == 1:
                case = "b2"
    elif defect == 1 and s == 3:
        if all(pair(x, x) == 0 for x in parts) and all(
                pair(parts[i], parts[j]) == 1 for i in range(3) for j in range(i)) and pair(v, v) == 6:
            case = "b3"
        for k in range(3):
            u1, u2 = [parts[i] for i in range(3) if i != k]
            if (parts[k] == u1 + u2 and pair(u1, u1) == pair(u2, u2) == 0 and pair(u1, u2) == 1
                    and v == 2 * (u1 + u2)):
                case = "b4"
    return CodimClassification(defect, case)


# --- isotropic walls ----------------------------------------------------------

def _require_isotropic(w1: MukaiVector, surface: SurfaceData) -> None:
    if mukai_pairing(w1, w1, surface) != 0:
        raise LatticeError("w1 must be isotropic")


def isotropic_complement(v: MukaiVector, w1: MukaiVector, surface: SurfaceData) -> MukaiVector:
    """``w2 = v - (<v^2>/2) w1``; isotropic with ``<w1, w2> = 1`` when ``<v, w1> = 1``."""
    _require_isotropic(w1, surface)
    if mukai_pairing(v, w1, surface) != 1:
        raise LatticeError("need <v, w1> = 1")
    w2 = v - (mukai_pairing(v, v, surface) / 2) * w1
    assert mukai_pairing(w2, w2, surface) == 0 and mukai_pairing(w1, w2, surface) == 1
    return w2


def divisor_class_d(v: MukaiVector, w1: MukaiVector, surface: SurfaceData) -> MukaiVector:
    """``d = v - (<v^2>/2) w1`` for ``<v, w1> = 2``; then ``<d^2> = -<v^2>`` and ``d`` lies in ``v^perp``."""
    _require_isotropic(w1, surface)
    if mukai_pairing(v, w1, surface) != 2:
        raise LatticeError("need <v, w1> = 2")
    d = v - (mukai_pairing(v, v, surface) / 2) * w1
    assert mukai_pairing(d, d, surface) == -mukai_pairing(v, v, surface)
    assert mukai_pairing(v, d, surface) == 0
    return d


def theta_reflection(v: MukaiVector, w1: MukaiVector, x: MukaiVector, surface: SurfaceData) -> MukaiVector:
    """``x - <w1, x> d``, checked against ``x - 2 (<d, x>/<d, d>) d``, for ``x`` in ``v^perp``."""
    if mukai_pairing(v, x, surface) != 0:
        raise LatticeError("x must lie in v^perp")
    d = divisor_class_d(v, w1, surface)
    dd = mukai_pairing(d, d, surface)
    if dd == 0:
        raise LatticeError("<v^2> = 0 gives an isotropic d")
    first = x - mukai_pairing(w1, x, surface) * d
    second = x - (2 * mukai_pairing(d, x, surface) / dd) * d
    if first != second:
        raise LatticeError("the two reflection formulas disagree")
    return first


@dataclass(frozen=True)
class SlopeWall:
    """``s = (omega^2)`` where two isotropic classes align, by three expressions."""

    s: Fraction
    expressions: tuple[Fraction, Fraction, Fraction]
    positive: bool


def slope_behavior_s(w1, w2, frame: BetaFrame) -> SlopeWall:
    """Alignment value of ``(omega^2)`` for isotropic ``w1``, ``w2`` (vectors or decompositions)."""
    surface = frame.surface
    h2 = surface.H_sq
    decs = []
    for w in (w1, w2):
        if isinstance(w, MukaiVector):
            _require_isotropic(w, surface)
            w = beta_decompose(w, frame)
        elif w.d * w.d * h2 + surface.square(w.D) - 2 * w.r * w.a != 0:
            raise LatticeError("classes must be isotropic")
        decs.append(w)
    x, y = decs
    r1, d1, a1, D1 = x.r, x.d, x.a, x.D
    r2, d2, a2, D2 = y.r, y.d, y.a, y.D
    if r1 * r2 == 0 or r1 * d2 == r2 * d1 or d1 == 0 or d2 == 0:
        raise LatticeError("need r1 r2 != 0, d1 d2 != 0 and r1 d2 != r2 d1")
    e1 = 2 * (a1 / d1 - a2 / d2) / (r1 / d1 - r2 / d2)
    # ((H + D/d)^2) with (H, D) = 0
    sq = lambda D, d: h2 + surface.square(D) / (d * d)
    e2 = (sq(D1, d1) * d1 / r1 - sq(D2, d2) * d2 / r2) / (r1 / d1 - r2 / d2)
    e3 = -d1 * d2 / (r1 * r2) * h2 + (d2 * r2 * surface.square(D1) - r1 * d1 * surface.square(D2)) / (
        r1 * r2 * (r1 * d2 - r2 * d1))
    if not e1 == e2 == e3:
        raise LatticeError("the three expressions disagree")
    return SlopeWall(e1, (e1, e2, e3), e1 > 0)


@dataclass(frozen=True)
class BNFiber:
    """Fibre ``Gr(n, m)`` with ``n = 2m + <v, u>`` over the classes ``v - m u``."""

    n: int
    m: int
    count: LaurentPolyQ
    base: MukaiVector


def bn_fiber(v: MukaiVector, u: MukaiVector, m: int, surface: SurfaceData) -> BNFiber:
    if mukai_pairing(u, u, surface) != -2:
        raise LatticeError("u must be a (-2)-vector")
    if m < 0:
        raise LatticeError("m must be nonnegative")
    n = 2 * m + mukai_pairing(v, u, surface)
    if n.denominator != 1 or n < m:
        raise LatticeError("need 2m + <v, u> >= m")
    n = int(n)
    return BNFiber(n, m, q_binomial(n, m), v - m * u)
