import cmath
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EK3_D, EK3_GRAM
from mukai_walls.central_charge import (
    CentralValue,
    StabilityPoint,
    central_charge,
    eta_smallness,
    phase_cmp,
    sigma_bracket,
    xi_vector,
)
from mukai_walls.mukai_core import LatticeError, MukaiVector, decompose_at, frame_constants, mukai_pairing

small = st.integers(-5, 5)
pos = st.fractions(min_value=Fraction(1, 12), max_value=6, max_denominator=12)
coef = st.fractions(min_value=-2, max_value=2, max_denominator=6)


def vectors():
    return st.builds(lambda r, x, y, s: MukaiVector(r, [x, y], s), small, small, small, small)


def _symbolic_charge(v, beta, s, H_sq):
    """<e^{beta + i omega}, v> with omega = t H, t = sqrt(s/(H^2)), from the definition."""
    t = sympy.sqrt(sympy.Rational(s.numerator, s.denominator) / H_sq)
    n = 2
    H = (1, 4)
    B = [sympy.Rational(b.numerator, b.denominator) + sympy.I * t * H[i] for i, b in enumerate(beta)]
    c1 = [sympy.Integer(int(c)) for c in v.c1]
    bf = lambda x, y: sum(x[i] * EK3_GRAM[i][j] * y[j] for i in range(n) for j in range(n))
    return sympy.expand(bf(B, c1) - int(v.r) * bf(B, B) / 2 - int(v.s)), t


@settings(max_examples=60, deadline=None)
@given(v=vectors(), x=coef, s=pos)
def test_central_charge_matches_definition(ek3, v, x, s):
    frame = frame_constants(ek3, [0, 0])
    p = StabilityPoint(frame, x * EK3_D, s)
    z = central_charge(v, p)
    exact, t = _symbolic_charge(v, p.beta.coeffs, s, 6)
    re, im = exact.as_real_imag()
    assert sympy.simplify(re - sympy.Rational(z.re.numerator, z.re.denominator)) == 0
    # Im Z = d (H, omega) = d t (H^2)
    assert sympy.simplify(im - sympy.Rational(z.im_coeff.numerator, z.im_coeff.denominator) * t * 6) == 0


@settings(max_examples=300, deadline=None)
@given(a=coef, b=coef, c=coef, d=coef)
def test_phase_cmp_agrees_with_angles(a, b, c, d):
    z1, z2 = CentralValue(a, b), CentralValue(c, d)
    if z1.is_zero() or z2.is_zero():
        with pytest.raises(LatticeError):
            phase_cmp(z1, z2)
        return

    def phase(z):
        ang = cmath.phase(complex(float(z.re), float(z.im_coeff))) / math.pi
        return ang if ang > 0 else ang + 2

    p1, p2 = phase(z1), phase(z2)
    got = phase_cmp(z1, z2)
    if abs(p1 - p2) > 1e-9:
        assert got == (1 if p1 > p2 else -1)
    assert phase_cmp(z2, z1) == -got


def test_phase_cmp_ties():
    assert phase_cmp(CentralValue(1, 2), CentralValue(2, 4)) == 0
    assert phase_cmp(CentralValue(-1, 0), CentralValue(-5, 0)) == 0
    assert phase_cmp(CentralValue(-1, 0), CentralValue(1, 1)) == 1
    assert phase_cmp(CentralValue(1, 0), CentralValue(-1, -1)) == 1


@settings(max_examples=200, deadline=None)
@given(v=vectors(), v1=vectors(), x=coef, s=pos)
def test_sigma_bracket_is_charge_determinant(ek3, v, v1, x, s):
    p = StabilityPoint(frame_constants(ek3, [0, 0]), x * EK3_D, s)
    z, z1 = central_charge(v, p), central_charge(v1, p)
    assert sigma_bracket(v, v1, p) == z.re * z1.im_coeff - z1.re * z.im_coeff
    if z.im_coeff > 0 and z1.im_coeff > 0:
        assert (sigma_bracket(v, v1, p) >= 0) == (phase_cmp(z1, z) >= 0)


@settings(max_examples=200, deadline=None)
@given(v=vectors(), x1=vectors(), x=coef, s=pos)
def test_xi_vector_detects_alignment(ek3, v, x1, x, s):
    p = StabilityPoint(frame_constants(ek3, [0, 0]), x * EK3_D, s)
    d = decompose_at(v, ek3, p.beta).d
    if d == 0:
        with pytest.raises(LatticeError):
            xi_vector(v, p)
        return
    xi = xi_vector(v, p)
    assert mukai_pairing(v, xi, ek3) == 0
    d1 = decompose_at(x1, ek3, p.beta).d
    rest = x1 - (d1 / d) * v
    assert mukai_pairing(x1, xi, ek3) == central_charge(rest, p).re
    assert central_charge(rest, p).im_coeff == 0


def test_stability_point_validation(ek3):
    frame = frame_constants(ek3, [0, 0])
    with pytest.raises(LatticeError):
        StabilityPoint(frame, [1, 0], 1)
    with pytest.raises(LatticeError):
        StabilityPoint(frame, EK3_D, 0)
    p = StabilityPoint.at_frame(frame_constants(ek3, EK3_D / 3), 2)
    assert p.beta == EK3_D / 3
    assert p.with_s(3).s == 3


def test_eta_smallness(ek3):
    p = StabilityPoint(frame_constants(ek3, [0, 0]), [0, 0], 2)
    res = eta_smallness(1, EK3_D / 100, p, D=EK3_D)
    assert res.neg_eta_sq == Fraction(6, 10000)
    assert res.bound_assumption == min(Fraction(1, 8) * 4, 2)
    assert res.assumption_holds
    assert res.bound_semistable == Fraction(1, 2)
    assert res.semistable_holds
    assert res.charge_shift == ek3.form(EK3_D / 100, EK3_D) + Fraction(6, 10000) / 2
    assert not eta_smallness(2, EK3_D, p).semistable_holds
    with pytest.raises(LatticeError):
        eta_smallness(0, EK3_D, p)
