import random
from fractions import Fraction

import pytest
import sympy

from mukai_walls.central_charge import StabilityPoint
from mukai_walls.mukai_core import LatticeError, MukaiVector, NSClass, SurfaceData, frame_constants, mukai_pairing
from mukai_walls.wall_engine import FixedBetaInterval, stability_wall_candidates
from mukai_walls.wallcross import (
    MINUS,
    PLUS,
    LaurentPolyQ,
    MissingCount,
    SymbolicOracle,
    TableOracle,
    bn_fiber,
    classify_codim,
    crossing_solve,
    decompositions_on_wall,
    divisor_class_d,
    dual_consistency,
    expected_dim,
    gl_count,
    isotropic_complement,
    q_binomial,
    slope_behavior_s,
    theta_reflection,
    wall_value,
)
from oracles import naive_decompositions

AB1 = SurfaceData(0, [[2]], [1])
EK3 = SurfaceData(1, [[-2, 1], [1, 0]], [1, 4])
W1 = MukaiVector(-1, [1], -1)
W2 = MukaiVector(1, [1], 1)


def _wall_points(surface, v, lo, hi):
    """Values of s where a candidate wall for v crosses the ray eta = 0."""
    frame = frame_constants(surface, [0] * surface.rho)
    seg = FixedBetaInterval(NSClass.zero(surface.rho), lo, hi)
    pts = set()
    for w in stability_wall_candidates(v, frame, seg):
        eq = w.equation
        if eq.P and lo <= 2 * eq.A / eq.P <= hi:
            pts.add(2 * eq.A / eq.P)
    return frame, sorted(pts)


GENERATED = [
    (AB1, MukaiVector(0, [2], 0), Fraction(1, 4), 6),
    (AB1, MukaiVector(1, [2], 0), Fraction(1, 4), 6),
    (AB1, MukaiVector(0, [3], 1), Fraction(1, 4), 6),
    (AB1, MukaiVector(2, [2], -1), Fraction(1, 4), 6),
    (EK3, MukaiVector(0, [0, 2], 0), Fraction(1, 2), 3),
    (EK3, MukaiVector(1, [0, 2], -1), Fraction(1, 2), 3),
]


def _generated_walls():
    for surface, v, lo, hi in GENERATED:
        frame, pts = _wall_points(surface, v, lo, hi)
        for s in pts:
            yield frame, v, StabilityPoint(frame, NSClass.zero(surface.rho), s)


def _tuples(decs, strict=True):
    return [tuple(x.coords() for x in d.parts) for d in decs if d.s_equivalent != strict]


def test_ab1_example():
    frame = frame_constants(AB1, [0])
    v = MukaiVector(0, [2], 0)
    p = StabilityPoint(frame, [0], 2)
    minus = decompositions_on_wall(v, p, frame, MINUS)
    plus = decompositions_on_wall(v, p, frame, PLUS)
    assert [d.parts for d in minus if not d.s_equivalent] == [(W2, W1)]
    assert [d.parts for d in plus if not d.s_equivalent] == [(W1, W2)]
    assert [d.parts for d in plus if d.s_equivalent] == [(MukaiVector(0, [1], 0),) * 2]
    assert minus[0].exponent(AB1) == mukai_pairing(W1, W2, AB1) == 4
    oracle = SymbolicOracle()
    value = wall_value(v, oracle, p, MINUS, minus)
    N = lambda x: oracle.count(x)
    assert sympy.expand(value - (N(v) + oracle.q ** 4 * N(W1) * N(W2))) == 0
    assert sympy.expand(crossing_solve(v, oracle, p) - N(v)) == 0


def test_off_wall_point_has_no_decompositions():
    frame = frame_constants(AB1, [0])
    v = MukaiVector(0, [2], 0)
    p = StabilityPoint(frame, [0], 3)
    assert all(d.s_equivalent for d in decompositions_on_wall(v, p, frame, MINUS))
    assert decompositions_on_wall(MukaiVector(1, [2], 0), p, frame, MINUS) == []
    oracle = SymbolicOracle()
    assert crossing_solve(v, oracle, p) == oracle.count(v)


def test_side_symmetry_on_generated_walls():
    seen = 0
    for frame, v, p in _generated_walls():
        minus = decompositions_on_wall(v, p, frame, MINUS)
        plus = decompositions_on_wall(v, p, frame, PLUS)
        assert sorted(_tuples(minus)) == sorted(t[::-1] for t in _tuples(plus))
        seen += bool(minus)
    assert seen >= 8


def test_decompositions_match_naive_scan():
    for frame, v, p in _generated_walls():
        s = frame.surface
        for side, step in ((MINUS, Fraction(-1, 1000)), (PLUS, Fraction(1, 1000))):
            got = set(_tuples(decompositions_on_wall(v, p, frame, side)))
            expected = naive_decompositions(s.gram, s.H.coeffs, s.epsilon, v.coords(), p.beta.coeffs, p.s,
                                            p.beta.coeffs, p.s + step, frame.d_min, 6)
            assert got == expected


def test_decompositions_satisfy_bogomolov_sums():
    for frame, v, p in _generated_walls():
        s = frame.surface
        eps, dm = s.epsilon, frame.d_min
        d = s.degree(v.c1) / s.H_sq
        rhs = mukai_pairing(v, v, s) / d + 2 * d * eps / dm ** 2
        for dec in decompositions_on_wall(v, p, frame, MINUS):
            total = 0
            for x in dec.parts:
                dx = s.degree(x.c1) / s.H_sq
                assert mukai_pairing(x, x, s) >= -2 * (dx / dm) ** 2 * eps
                total += mukai_pairing(x, x, s) / dx + 2 * dx * eps / dm ** 2
            assert total <= rhs


def test_wall_value_is_order_independent():
    rng = random.Random(1)
    for frame, v, p in _generated_walls():
        decs = decompositions_on_wall(v, p, frame, MINUS)
        oracle = SymbolicOracle()
        base = wall_value(v, oracle, p, MINUS, decs)
        for _ in range(3):
            shuffled = decs[:]
            rng.shuffle(shuffled)
            assert sympy.expand(wall_value(v, oracle, p, MINUS, shuffled) - base) == 0


def test_symmetric_crossings_preserve_counts():
    for frame, v, p in _generated_walls():
        oracle = SymbolicOracle()
        assert sympy.expand(crossing_solve(v, oracle, p) - oracle.count(v)) == 0


def test_k3_crossing_with_three_part_tuples():
    frame = frame_constants(EK3, [0, 0])
    v = MukaiVector(0, [1, 3], 0)
    p = StabilityPoint(frame, [0, 0], Fraction(2, 3))
    minus = decompositions_on_wall(v, p, frame, MINUS)
    plus = decompositions_on_wall(v, p, frame, PLUS)
    strict = _tuples(minus)
    assert len(strict) == 6 and max(len(t) for t in strict) == 3
    assert sorted(strict) == sorted(t[::-1] for t in _tuples(plus))
    expected = naive_decompositions(EK3.gram, EK3.H.coeffs, EK3.epsilon, v.coords(), p.beta.coeffs, p.s,
                                    p.beta.coeffs, p.s - Fraction(1, 10 ** 4), frame.d_min, 6)
    assert set(strict) == expected
    oracle = SymbolicOracle()
    assert sympy.expand(crossing_solve(v, oracle, p) - oracle.count(v)) == 0


def test_null_class_crossing():
    # u = (1, 0, 1) has Z = 0 at beta = D/3, s = 4/3 on the elliptic K3
    frame = frame_constants(EK3, NSClass([1, -2]) / 3)
    p = StabilityPoint.at_frame(frame, Fraction(4, 3))
    u = MukaiVector(1, [0, 0], 1)
    v = MukaiVector(0, [0, 1], 1)
    minus = decompositions_on_wall(v, p, frame, MINUS, null_classes=[u])
    plus = decompositions_on_wall(v, p, frame, PLUS, null_classes=[u])
    rest = MukaiVector(-1, [0, 1], 0)
    assert [d.parts for d in minus] == [(u, rest)]
    assert [d.parts for d in plus] == [(rest, u)]
    oracle = SymbolicOracle()
    assert sympy.expand(crossing_solve(v, oracle, p, null_classes=[u]) - oracle.count(v)) == 0
    split = SymbolicOracle(phase_atoms=True)
    moved = crossing_solve(v, split, p, null_classes=[u])
    e = minus[0].exponent(EK3)
    expected = split.count(v) + split.q ** e * split.count(rest) * (split.count(u, 1) - split.count(u, 0))
    assert sympy.expand(moved - expected) == 0


def test_missing_counts_are_reported():
    frame = frame_constants(AB1, [0])
    v = MukaiVector(0, [2], 0)
    p = StabilityPoint(frame, [0], 2)
    oracle = TableOracle({v.coords(): LaurentPolyQ.constant(3)})
    with pytest.raises(MissingCount) as err:
        crossing_solve(v, oracle, p)
    assert set(err.value.vectors) == {W1, W2}
    full = TableOracle({v.coords(): 3, W1.coords(): LaurentPolyQ.monomial(1), W2.coords(): 2})
    assert crossing_solve(v, full, p) == LaurentPolyQ.constant(3)


def test_table_oracle_json_and_dual_consistency():
    data = [{"vector": [0, 2, 0], "poly": {"0": "3"}},
            {"vector": [1, 1, 1], "poly": {"1": "1/2", "-1": "2"}},
            {"vector": [1, -1, 1], "poly": {"1": "1/2", "-1": "2"}},
            {"vector": [0, -2, 0], "poly": {"0": "4"}},
            {"vector": [1, 0, 1], "poly": {"0": "5"}, "phase": 1}]
    oracle = TableOracle.from_json(data)
    assert oracle.count(MukaiVector(1, [1], 1)) == LaurentPolyQ({1: Fraction(1, 2), -1: 2})
    assert oracle.count(MukaiVector(1, [0], 1), 1) == LaurentPolyQ.constant(5)
    with pytest.raises(MissingCount):
        oracle.count(MukaiVector(1, [0], 1), 0)
    assert dual_consistency(oracle, [MukaiVector(1, [1], 1), MukaiVector(0, [2], 0)]) == [MukaiVector(0, [2], 0)]
    poly = LaurentPolyQ({2: 1, 0: -1})
    assert LaurentPolyQ.from_json(poly.to_json()) == poly


def test_laurent_arithmetic():
    q = LaurentPolyQ.monomial(1)
    assert str(q_binomial(4, 2)) == "q^4 + q^3 + 2*q^2 + q + 1"
    assert (q + 1) ** 2 == q * q + 2 * q + 1
    assert (q - q).is_zero()
    assert LaurentPolyQ.monomial(-1) * q == LaurentPolyQ.constant(1)
    assert (q ** 3 - 1)(Fraction(2)) == 7


@pytest.mark.parametrize("n", range(0, 9))
def test_q_binomial_and_gl_count_match_products(n):
    x = sympy.Symbol("q")
    for m in range(n + 1):
        num = sympy.prod([x ** (n - i) - 1 for i in range(m)])
        den = sympy.prod([x ** (i + 1) - 1 for i in range(m)])
        closed = sympy.cancel(num / den)
        assert sympy.expand(q_binomial(n, m).to_sympy(x) - closed) == 0
    closed_gl = sympy.prod([x ** n - x ** i for i in range(n)])
    assert sympy.expand(gl_count(n).to_sympy(x) - closed_gl) == 0
    assert q_binomial(n, 0) == LaurentPolyQ.constant(1)


def test_small_q_values():
    q = LaurentPolyQ.monomial(1)
    assert q_binomial(2, 1) == q + 1
    assert gl_count(2) == q ** 4 - q ** 3 - q ** 2 + q
    with pytest.raises(LatticeError):
        q_binomial(2, 3)


def test_expected_dim():
    frame = frame_constants(AB1, [0])
    assert expected_dim(MukaiVector(1, [2], 0), frame) == 9
    assert expected_dim(MukaiVector(2, [2], 2), frame) == 2
    k3 = frame_constants(EK3, [0, 0])
    assert expected_dim(MukaiVector(3, [0, 0], 3), k3) == -9


def test_codim_cases():
    frame = frame_constants(AB1, [0])
    u1, u2 = MukaiVector(1, [0], 0), MukaiVector(0, [0], -1)
    c = classify_codim(MukaiVector(2, [0], -1), [2 * u1, u2], frame)
    assert (c.case, c.defect) == ("a", 0)
    c = classify_codim(MukaiVector(1, [1], -2), [u1, MukaiVector(0, [1], -2)], frame)
    assert (c.case, c.defect) == ("b1", 1)
    c = classify_codim(2 * (u1 + u2), [u1, u2, u1 + u2], frame)
    assert (c.case, c.defect) == ("b4", 1)
    c = classify_codim(MukaiVector(2, [0], -4), [u1, MukaiVector(0, [0], -2), MukaiVector(1, [0], -2)], frame)
    assert (c.case, c.defect) == (">=2", 3)
    with pytest.raises(LatticeError):
        classify_codim(MukaiVector(2, [0], 0), [u1, u2], frame)


def test_codim_defect_two_ways():
    frame = frame_constants(AB1, [0])
    rng = random.Random(4)
    checked = 0
    while checked < 40:
        parts = [MukaiVector(rng.randint(0, 2), [rng.randint(0, 2)], rng.randint(-2, 2)) for _ in range(rng.randint(2, 3))]
        if any(mukai_pairing(x, x, AB1) < 0 or x.coords() == (0, 0, 0) for x in parts):
            continue
        v = sum(parts[1:], parts[0])
        if mukai_pairing(v, v, AB1) < 0:
            continue
        try:
            c = classify_codim(v, parts, frame)
        except LatticeError:
            continue
        direct = expected_dim(v, frame) - sum(expected_dim(x, frame) for x in parts)
        direct -= sum(mukai_pairing(parts[i], parts[j], AB1) for i in range(len(parts)) for j in range(i))
        assert c.defect == direct
        checked += 1


def test_isotropic_toolkit():
    v = MukaiVector(1, [0], -2)
    w1 = MukaiVector(1, [1], 1)
    w2 = isotropic_complement(v, w1, AB1)
    assert w2 == MukaiVector(-1, [-2], -4)
    v = MukaiVector(1, [0], -3)
    d = divisor_class_d(v, w1, AB1)
    assert d == MukaiVector(-2, [-3], -6)
    assert mukai_pairing(d, d, AB1) == -6 == -mukai_pairing(v, v, AB1)
    with pytest.raises(LatticeError):
        divisor_class_d(MukaiVector(1, [1], 0), w1, AB1)


def test_theta_reflection_properties():
    v = MukaiVector(1, [0], -3)
    w1 = MukaiVector(1, [1], 1)
    d = divisor_class_d(v, w1, AB1)
    assert theta_reflection(v, w1, d, AB1) == -d
    # v^perp is spanned by (0, H, 0) and (1, 0, 3); d = -2 (1, 0, 3) - 3 (0, H, 0)
    span = [MukaiVector(0, [1], 0), MukaiVector(1, [0], 3)]
    assert d == -2 * span[1] - 3 * span[0]
    for x in span:
        assert mukai_pairing(v, x, AB1) == 0
    rng = random.Random(8)
    for _ in range(40):
        cs = [rng.randint(-3, 3) for _ in span]
        x = sum((c * y for c, y in zip(cs, span)), MukaiVector(0, [0], 0))
        y = sum((rng.randint(-3, 3) * z for z in span), MukaiVector(0, [0], 0))
        tx, ty = theta_reflection(v, w1, x, AB1), theta_reflection(v, w1, y, AB1)
        assert mukai_pairing(tx, ty, AB1) == mukai_pairing(x, y, AB1)
        assert theta_reflection(v, w1, tx, AB1) == x
        if mukai_pairing(d, x, AB1) == 0:
            assert tx == x
    with pytest.raises(LatticeError):
        theta_reflection(v, w1, MukaiVector(1, [0], 0), AB1)


def test_slope_behavior():
    frame = frame_constants(AB1, [0])
    res = slope_behavior_s(W1, W2, frame)
    assert res.s == 2 and res.positive
    assert len(set(res.expressions)) == 1
    assert slope_behavior_s(W2, W1, frame).s == 2
    neg = slope_behavior_s(MukaiVector(1, [1], 1), MukaiVector(2, [1], Fraction(1, 2)), frame)
    assert neg.s == -1 and not neg.positive
    with pytest.raises(LatticeError):
        slope_behavior_s(MukaiVector(1, [1], 0), W2, frame)


def test_bn_fiber():
    k3 = SurfaceData(1, [[2]], [1])
    u = MukaiVector(1, [0], 1)
    v = MukaiVector(1, [1], -1)
    assert mukai_pairing(v, u, k3) == 0
    assert bn_fiber(v, u, 0, k3).count == LaurentPolyQ.constant(1)
    f = bn_fiber(v, u, 1, k3)
    assert (f.n, f.m, f.base) == (2, 1, MukaiVector(0, [1], -2))
    assert f.count == LaurentPolyQ.monomial(1) + 1
    with pytest.raises(LatticeError):
        bn_fiber(v, MukaiVector(1, [0], 0), 1, k3)
