import cmath
import itertools
import math

import mpmath
import pytest

from hypvol.chains import word_eval
from hypvol.errors import BudgetExceeded, DiscsOverlap, InvalidParameter, NotFound
from hypvol.isometry import (IDENTITY, INFINITY, ORIGIN, BoundaryPoint, Elementarity,
                             IsometryKind, apply_h3, classify, dist_h3, fixed_points,
                             is_elementary_pair)
from hypvol.representations import (certify_dense, certify_schottky, conjugate_pair_words,
                                    dense_psl2r, enumerate_words, find_exponents,
                                    fuchsian_surface_rep, h_alpha_beta, long_enough_bound,
                                    regular_polygon_vertices, restrict, rho_theta,
                                    threshold_lhs, threshold_tau0)
from hypvol.volume import signed_area_h2

THETA = math.sqrt(2) - 1


def frac(x):
    return x - math.floor(x)


def brute_exponents(thetas, tau0, limit=10 ** 6):
    """Plain scan oracle."""
    out = []
    for i in range(len(thetas)):
        for n in range(1, limit):
            fr = [frac(n * t) for t in thetas]
            if (fr[i] < tau0 or fr[i] > 1 - tau0) and all(
                    0.125 < f < 0.375 for j, f in enumerate(fr) if j != i):
                out.append(n)
                break
    return out


# ---------------------------------------------------------------- threshold

def test_tau0_value():
    mpmath.mp.dps = 30
    ref = mpmath.asin(mpmath.sinh(mpmath.mpf("0.052")) / mpmath.sinh(2)) / (2 * mpmath.pi)
    tau = threshold_tau0(1, 0.104)
    assert abs(tau - 0.002283) < 1e-6
    assert abs(tau - float(ref)) < 1e-15
    assert threshold_lhs(tau, 1) < 0.104


def test_tau0_monotone_and_clamped():
    vals = [threshold_tau0(r) for r in (0.5, 1, 2, 4, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert threshold_tau0(0.01, mu=50) < 0.25
    with pytest.raises(InvalidParameter):
        threshold_tau0(-1)
    with pytest.raises(InvalidParameter):
        threshold_tau0(1, mu=0)


def test_long_enough_bound():
    assert abs(long_enough_bound() - 25.274142369088185) < 1e-9


# ---------------------------------------------------------------- exponents

def test_find_exponents_one_angle():
    ns = find_exponents([THETA], 0.01)
    assert ns == brute_exponents([THETA], 0.01)


def test_find_exponents_two_angles():
    thetas = [math.sqrt(2) - 1, math.sqrt(3) - 1]
    ns = find_exponents(thetas, 0.01)
    assert ns == brute_exponents(thetas, 0.01)
    for i, n in enumerate(ns):
        fr = [frac(n * t) for t in thetas]
        assert fr[i] < 0.01 or fr[i] > 0.99
        assert all(0.125 < f < 0.375 for j, f in enumerate(fr) if j != i)


def test_find_exponents_budget():
    with pytest.raises(BudgetExceeded):
        find_exponents([THETA], 1e-9, max_n=1000)


# ---------------------------------------------------------------- families

def test_rho_theta_generators():
    rep = rho_theta(1.5, 0.2, THETA)
    a, b = rep.generators
    cl = classify(a)
    assert cl.kind is IsometryKind.LOXODROMIC and abs(cl.complex_length - (1.5 + 0.2j)) < 1e-12
    fb = fixed_points(b)
    assert {round(p.to_complex().real, 12) for p in fb} == {-1.0, 1.0}
    # both axes pass through (0, 1): b fixes it and a moves it along the vertical axis
    y = apply_h3(b, ORIGIN)
    assert dist_h3(y, ORIGIN) < 1e-12
    assert abs(apply_h3(a, ORIGIN).z) < 1e-12
    for k in range(1, 5):
        ang = classify(word_eval(rep, (2,) * k)).rotation_angle
        want = abs(math.remainder(2 * math.pi * k * THETA, 2 * math.pi))
        assert abs(ang - want) < 1e-9
    with pytest.raises(InvalidParameter):
        rho_theta(1, 0.5, THETA)


def test_h_alpha_beta_axes():
    rep = h_alpha_beta(3 + 1j, 2)
    x, y = rep.generators
    fx = fixed_points(x)
    assert any(p == INFINITY for p in fx) and any(p.isclose(BoundaryPoint.from_complex(0)) for p in fx)
    fy = sorted(p.to_complex().real for p in fixed_points(y))
    assert abs(fy[0] + 1) < 1e-12 and abs(fy[1] - 1) < 1e-12
    tau = classify(x).complex_length
    want = 2 * cmath.log(3 + 1j)
    assert abs(cmath.exp(tau) - cmath.exp(want)) < 1e-9 or abs(cmath.exp(tau) - cmath.exp(-want)) < 1e-9
    with pytest.raises(InvalidParameter):
        h_alpha_beta(1j, 2)


def test_dense_psl2r():
    rep = dense_psl2r(1, math.sqrt(2))
    a, b = rep.generators
    assert classify(a).is_hyperbolic and abs(classify(a).complex_length - 1) < 1e-12
    assert classify(b).kind is IsometryKind.ELLIPTIC
    assert is_elementary_pair(a, b, ambient="real") is Elementarity.NON_ELEMENTARY
    assert is_elementary_pair(a, b) is Elementarity.INVARIANT_PLANE


def test_fuchsian_rep():
    for g in (2, 3, 5):
        rep, relator = fuchsian_surface_rep(g)
        assert rep.rank == 2 * g and rep.field == "real"
        assert word_eval(rep, relator).isclose(IDENTITY, 1e-9)
        for gen in rep.generators:
            assert abs(gen.trace.real) > 2
        v = regular_polygon_vertices(g)
        area = math.fsum(signed_area_h2(v[0], v[k], v[k + 1]) for k in range(1, len(v) - 1))
        assert abs(area - 4 * math.pi * (g - 1)) < 1e-9


# ---------------------------------------------------------------- density

def test_enumerate_words_shortlex():
    words = list(enumerate_words(2, 2))
    assert words[:5] == [(), (1,), (-1,), (2,), (-2,)]
    assert len(words) == 1 + 4 + 12


def test_density_h_alpha_beta_log_parameters():
    a = 0.05 * cmath.exp(1j * math.pi / 5)
    rep = h_alpha_beta(cmath.exp(a), cmath.exp(0.05))
    cert = certify_dense(rep, mu=0.104)
    assert cert.valid and cert.verify(rep)
    body = cert.to_json()
    assert body["type"] == "DensityCertificate"
    assert {"parameters", "witnesses", "inequalities", "assumptions"} <= set(body)
    assert all(q["margin"] > 0 for q in body["inequalities"])


def test_density_rho_theta_conjugate_pair():
    r = 1.0
    n = find_exponents([THETA], threshold_tau0(r))[0]
    rep = restrict(rho_theta(r, 0.1, THETA), conjugate_pair_words(n))
    cert = certify_dense(rep, assumptions=["theta irrational"])
    assert cert.verify(rep)
    assert cert.assumptions == ["theta irrational"]


def test_density_refused_for_fuchsian():
    rep, _ = fuchsian_surface_rep(2)
    with pytest.raises(NotFound, match="InvariantPlane"):
        certify_dense(rep)


def test_density_not_found_for_schottky_parameters():
    with pytest.raises(NotFound):
        certify_dense(h_alpha_beta(101, 101))


# ---------------------------------------------------------------- Schottky

def pingpong_oracle(rep, cert, rng, samples=400):
    """Sample points outside each repelling disc and check where they land."""
    u = cert.conjugator
    for g, drep, datt in zip(rep.generators, cert.repelling, cert.attracting):
        gc = u @ g @ u.inverse()
        for _ in range(samples):
            rad = drep.radius * (1 + rng.exponential(2.0))
            z = drep.center + rad * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            w = (gc.a * z + gc.b) / (gc.c * z + gc.d)
            assert abs(w - datt.center) < datt.radius
        gi = gc.inverse()
        for _ in range(samples):
            rad = datt.radius * (1 + rng.exponential(2.0))
            z = datt.center + rad * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            w = (gi.a * z + gi.b) / (gi.c * z + gi.d)
            assert abs(w - drep.center) < drep.radius


def test_schottky_h101(rng):
    rep = h_alpha_beta(101, 101)
    cert = certify_schottky(rep)
    assert cert.margin > 0 and cert.valid and cert.verify(rep)
    pingpong_oracle(rep, cert, rng)
    discs = cert.discs()
    for d1, d2 in itertools.combinations(discs, 2):
        assert abs(d1.center - d2.center) > d1.radius + d2.radius
    # free and discrete: no short word is the identity or elliptic
    for w in enumerate_words(2, 4):
        if w:
            assert classify(word_eval(rep, w)).kind is IsometryKind.LOXODROMIC


def test_schottky_long_enough_rho_theta(rng):
    n = next(k for k in range(1, 100) if 0.125 < frac(k * THETA) < 0.375)
    rep = restrict(rho_theta(26, 0.1, THETA), conjugate_pair_words(n))
    cert = certify_schottky(rep)
    assert cert.verify(rep)
    pingpong_oracle(rep, cert, rng, samples=100)


def test_schottky_fails_for_small_translation():
    rep = h_alpha_beta(cmath.exp(0.05 * cmath.exp(1j * math.pi / 5)), cmath.exp(0.05))
    with pytest.raises(DiscsOverlap) as exc:
        certify_schottky(rep)
    assert exc.value.margin < 0


def test_literal_small_entries_are_schottky():
    # taken as matrix entries, |alpha| = |beta| = 0.05 gives long translations
    rep = h_alpha_beta(0.05 * cmath.exp(1j * math.pi / 5), 0.05)
    assert certify_schottky(rep).valid


def test_schottky_needs_loxodromic():
    with pytest.raises(InvalidParameter):
        certify_schottky(dense_psl2r(1, math.sqrt(2)))


def test_real_density_certificate():
    from hypvol.representations import certify_dense_real
    rep = dense_psl2r(1, math.sqrt(2))
    cert = certify_dense_real(rep)
    assert cert.valid and cert.verify(rep)
    assert abs(cert.rotation_angle - abs(math.remainder(math.pi * math.sqrt(2), 2 * math.pi))) < 1e-12
    assert cert.assumptions
    with pytest.raises(NotFound):
        # two rotations about the same point generate an elementary group
        from hypvol.isometry import rotation
        from hypvol.chains import FreeRepresentation
        certify_dense_real(FreeRepresentation((rotation(1.0), rotation(math.sqrt(2))), "real"))
