import random
from fractions import Fraction

import pytest

from conftest import EK3_D
from mukai_walls.central_charge import StabilityPoint
from mukai_walls.fm_action import (
    charge_commutation_check,
    fm_build,
    fm_image_shift,
    param_invariant,
    param_scale,
    param_transform,
    reflection_param,
    sphere_embed,
    sphere_relation,
)
from mukai_walls.mukai_core import (
    LatticeError,
    MukaiVector,
    NSClass,
    SurfaceData,
    beta_decompose,
    exp_beta,
    frame_constants,
    mukai_pairing,
)
from mukai_walls.wall_engine import category_wall_eval

HYP = SurfaceData(0, [[0, 1], [1, 0]], [1, 1])


def _rand_frac(rng, lo, hi, den=7):
    return Fraction(rng.randint(lo * den, hi * den), den)


def _hyp_iso(r0):
    beta = NSClass([Fraction(1, r0), 0])
    return fm_build(r0, beta, beta, [[1, 0], [0, 1]], HYP), beta


def test_standard_transform_on_ab1(ab1):
    iso = fm_build(1, [0], [0], [[1]], ab1)
    assert iso.apply(MukaiVector(1, [0], 0)) == MukaiVector(0, [0], 1)
    assert iso.apply(MukaiVector(0, [0], 1)) == MukaiVector(1, [0], 0)
    assert iso.apply(MukaiVector(0, [1], 0)) == MukaiVector(0, [-1], 0)
    assert iso.preserves_pairing()
    assert fm_image_shift(iso, MukaiVector(1, [1], 1)) == MukaiVector(-1, [1], -1)
    # applying the transform twice is the identity on the (1, rho) plane and on NS
    twice = iso.compose(iso)
    for v in (MukaiVector(1, [0], 0), MukaiVector(0, [0], 1), MukaiVector(0, [1], 0)):
        assert twice.apply(v) == v


def test_non_isometric_hat_is_rejected(ab1, ek3):
    with pytest.raises(LatticeError):
        fm_build(1, [0], [0], [[2]], ab1)
    with pytest.raises(LatticeError):
        fm_build(0, [0], [0], [[1]], ab1)
    with pytest.raises(LatticeError):
        fm_build(1, [0, 0], [0, 0], [[1, 1], [0, 1]], ek3)


@pytest.mark.parametrize("r0", [1, 2, 3])
def test_image_decomposition(r0):
    iso, beta = _hyp_iso(r0)
    src = frame_constants(HYP, beta)
    assert (r0 * exp_beta(beta, HYP)).is_integral()
    assert fm_image_shift(iso, exp_beta(beta, HYP)) == Fraction(-1, r0) * MukaiVector.point(2)
    assert fm_image_shift(iso, MukaiVector.point(2)) == -r0 * exp_beta(beta, HYP)
    rng = random.Random(r0)
    for _ in range(30):
        v = MukaiVector(rng.randint(-4, 4), [rng.randint(-4, 4), rng.randint(-4, 4)], rng.randint(-4, 4))
        x = beta_decompose(v, src)
        y = beta_decompose(fm_image_shift(iso, v), frame_constants(iso.target, iso.beta_prime))
        assert (y.r, y.a, y.d, y.D) == (-r0 * x.a, -x.r / r0, x.d, x.D)


@pytest.mark.parametrize("r0,s,f,s_t", [
    (1, 2, 1, 2),
    (1, Fraction(1, 2), 4, 8),
    (2, 1, 1, 1),
])
def test_param_transform_examples(r0, s, f, s_t):
    iso, beta = _hyp_iso(r0)
    p = StabilityPoint.at_frame(frame_constants(HYP, beta), s)
    assert param_scale(iso, p)[1] == f
    q = param_transform(iso, p)
    assert q.s == s_t
    assert q.s * s == Fraction(4, r0 * r0)


@pytest.mark.parametrize("r0", [1, 2, 3])
def test_param_invariant_random(r0):
    iso, beta = _hyp_iso(r0)
    frame = frame_constants(HYP, beta)
    rng = random.Random(100 + r0)
    for _ in range(100):
        eta = frame.eta_beta + _rand_frac(rng, -3, 3) * NSClass([1, -1])
        p = StabilityPoint(frame, eta, _rand_frac(rng, 0, 5) + Fraction(1, 11))
        lhs, rhs = param_invariant(iso, p)
        assert lhs == rhs == Fraction(4, r0 * r0)


@pytest.mark.parametrize("r0", [1, 2, 3])
def test_charge_commutation_random(r0):
    iso, beta = _hyp_iso(r0)
    frame = frame_constants(HYP, beta)
    rng = random.Random(200 + r0)
    for _ in range(70):
        v = MukaiVector(rng.randint(-5, 5), [rng.randint(-5, 5), rng.randint(-5, 5)], rng.randint(-5, 5))
        eta = frame.eta_beta + _rand_frac(rng, -2, 2) * NSClass([1, -1])
        p = StabilityPoint(frame, eta, _rand_frac(rng, 0, 4) + Fraction(1, 13))
        lhs, rhs = charge_commutation_check(iso, v, p)
        assert lhs == rhs


def test_charge_commutation_on_k3(ek3_frames):
    frame = ek3_frames["D/3"]
    iso = fm_build(3, frame.beta, frame.beta, [[1, 0], [0, 1]], frame.surface)
    rng = random.Random(7)
    for _ in range(30):
        v = MukaiVector(rng.randint(-5, 5), [rng.randint(-5, 5), rng.randint(-5, 5)], rng.randint(-5, 5))
        p = StabilityPoint(frame, frame.eta_beta + _rand_frac(rng, -1, 1) * EK3_D, _rand_frac(rng, 0, 3) + Fraction(1, 5))
        lhs, rhs = charge_commutation_check(iso, v, p)
        assert lhs == rhs


def test_walls_are_transported(ek3):
    frame = frame_constants(ek3, [0, 0])
    iso = fm_build(1, [0, 0], [0, 0], [[1, 0], [0, 1]], ek3)
    u = MukaiVector(1, [0, 0], 1)
    image = fm_image_shift(iso, u)
    assert mukai_pairing(image, image, ek3) == -2
    for x in (Fraction(0), Fraction(1, 5), Fraction(-1, 3), Fraction(1, 2)):
        on = StabilityPoint(frame, x * EK3_D, 2 - 6 * x * x)
        assert category_wall_eval(u, on) == 0
        assert category_wall_eval(image, param_transform(iso, on)) == 0
        off = on.with_s(on.s + Fraction(1, 3))
        assert category_wall_eval(image, param_transform(iso, off)) != 0


def test_reflection_param_fixes_wall_and_is_involution(ek3):
    frame = frame_constants(ek3, [0, 0])
    u1 = MukaiVector(1, [0, 0], 1)
    assert reflection_param(u1, StabilityPoint(frame, [0, 0], 2)) == StabilityPoint(frame, [0, 0], 2)
    assert reflection_param(u1, StabilityPoint(frame, [0, 0], Fraction(1, 2))).s == 8
    u3 = MukaiVector(2, [1, -2], -1)
    rng = random.Random(3)
    for _ in range(100):
        u = rng.choice([u1, u3])
        p = StabilityPoint(frame, _rand_frac(rng, -2, 2) * EK3_D, _rand_frac(rng, 0, 3) + Fraction(1, 9))
        q = reflection_param(u, p)
        assert reflection_param(u, q) == p
        assert (q == p) == (category_wall_eval(u, p) == 0)
    with pytest.raises(LatticeError):
        reflection_param(MukaiVector(0, [1, -2], 0), StabilityPoint(frame, [0, 0], 1))


def test_sphere_embedding(ek3):
    assert sphere_embed(0, [0, 0], 0, 1, ek3).at_infinity
    pt = sphere_embed(1, [0, 0], 0, 0, ek3)
    assert (pt.X_eta, pt.X_omega_sq, pt.Y) == (NSClass([0, 0]), 0, -1)
    s = Fraction(3)
    pt = sphere_embed(1, [0, 0], s, -s / 2, ek3)
    assert pt.Y == (1 - s) / (-s - 1)
    rng = random.Random(9)
    for _ in range(50):
        r = rng.randint(-3, 3) or 1
        xi = _rand_frac(rng, -2, 2) * EK3_D
        s = _rand_frac(rng, 0, 3)
        a = (ek3.square(xi) - s) / (2 * r)
        if r == 2 * a:
            continue
        assert sphere_relation(sphere_embed(r, xi, s, a, ek3), ek3) == 1
    with pytest.raises(LatticeError):
        sphere_embed(1, [0, 0], 1, 5, ek3)
