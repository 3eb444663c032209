import random
from fractions import Fraction as Q

import pytest

from ixspace.qlinalg import rank
from ixspace.sullivan import (
    CDGA,
    CDGAMorphism,
    CohomologyRing,
    FreeCGA,
    check_complementary_products,
    formal_cdga_from_ring,
    hurewicz_surjectivity_certificate,
    minimal_model,
    odd_triple_family,
    poly_is_zero,
    sphere_cohomology_cdga,
    verify_degree_bounds,
    zeta,
    zeta_injectivity_via_lemma,
)


# --- free algebra engine ------------------------------------------------------


def test_odd_square_vanishes():
    m = FreeCGA([("x", 3)], [{}], cap=10)
    assert m.mono_mul((0,), (0,)) is None


def test_graded_commutativity_of_monomials():
    m = FreeCGA([("x", 3), ("y", 3), ("t", 2)], [{}, {}, {}], cap=12)
    sx, mx = m.mono_mul((0,), (1,))  # x*y
    sy, my = m.mono_mul((1,), (0,))  # y*x
    assert mx == my == (0, 1)
    assert sx == -sy  # odd-odd anticommute
    se, me = m.mono_mul((2,), (0,))  # t*x, even-odd commute
    assert se == 1 and me == (0, 2)


def test_monomial_enumeration_even_powers():
    m = FreeCGA([("t", 2)], [{}], cap=10)
    assert m.monomials(6) == (((0, 0, 0)),)
    assert len(m.monomials(7)) == 0


def test_d_square_zero_enforced():
    with pytest.raises(ValueError):
        # d x = t, d t nonzero on purpose breaks d^2 = 0
        FreeCGA([("t", 2), ("x", 1)], [{(1, 1): Q(1)}, {(0,): Q(1)}], cap=6)


def test_family_cohomology_ranks_u3():
    m = odd_triple_family(3)
    dims = {t: m.cohomology(t).dim for t in range(1, 12)}
    expected = {3: 2, 8: 2, 11: 1}
    for t in range(1, 12):
        assert dims[t] == expected.get(t, 0), (t, dims[t])


def test_family_zeta_kernel_at_3u_minus_1():
    m = odd_triple_family(3)
    zd = zeta(m, 8)
    assert zd.kernel.dim == 2 and not zd.injective
    zd3 = zeta(m, 3)
    assert zd3.injective and zd3.matrix == rankless_identity(zd3.matrix)


def rankless_identity(m):
    from ixspace.qlinalg import RationalMatrix
    return RationalMatrix.identity(m.rows) if m.rows == m.cols else m


def test_zeta_kills_wordlength_two():
    m = odd_triple_family(3)
    h11 = m.cohomology(11)
    assert h11.dim == 1
    zd = zeta(m, 11)
    assert zd.matrix.is_zero()  # xyz has wordlength 3


# --- CDGA construction ----------------------------------------------------------


def test_unit_cdga():
    a = CDGA.build(6, [])
    assert a.cohomology(0).dim == 1
    for i in range(1, 7):
        assert a.cohomology(i).dim == 0


def test_cdga_axioms_enforced():
    with pytest.raises(ValueError):
        # x degree 2 with x*x = y but y*x*x associativity broken by bad table
        CDGA.build(8, [("x", 2), ("y", 4), ("z", 6)],
                   products={("x", "x"): {"y": 1}, ("x", "y"): {"z": 1},
                             ("y", "x"): {"z": -1}})


def test_truncated_polynomial_cdga():
    # Q[x]/x^3 with |x| = 2
    a = CDGA.build(10, [("x", 2), ("x2", 4)],
                   products={("x", "x"): {"x2": 1}, ("x", "x2"): {}, ("x2", "x2"): {}})
    assert [a.cohomology(i).dim for i in (0, 2, 4, 6)] == [1, 1, 1, 0]


def test_family_cdga_cohomology():
    a = family_cdga(3, cap=12)
    dims = {i: a.cohomology(i).dim for i in range(1, 12)}
    assert dims[3] == 2 and dims[8] == 2 and dims[11] == 1
    assert all(v == 0 for i, v in dims.items() if i not in (3, 8, 11))


def family_cdga(u, cap):
    """The odd triple family as a finite table algebra (basis = 8 monomials)."""
    x, y, z = "x", "y", "z"
    els = [(x, u), (y, u), (z, 2 * u - 1), ("xy", 2 * u), ("xz", 3 * u - 1),
           ("yz", 3 * u - 1), ("xyz", 4 * u - 1)]
    els = [(n, d) for n, d in els if d <= cap]
    names = dict(els)
    prods = {}

    def put(a, b, c, s):
        if a in names and b in names and (c is None or c in names):
            prods[(a, b)] = {} if c is None else {c: s}

    put(x, y, "xy", 1)
    put(x, z, "xz", 1)
    put(y, z, "yz", 1)
    put(x, "yz", "xyz", 1)
    put(y, "xz", "xyz", -1)
    put(z, "xy", "xyz", 1)
    put(x, x, None, 1)
    put(y, y, None, 1)
    put(z, z, None, 1)
    put(x, "xy", None, 1)
    put(y, "xy", None, 1)
    diffs = {}
    if "xy" in names and z in names:
        diffs = {z: {"xy": 1}}
    return CDGA.build(cap, els, products=prods, differentials=diffs)


# --- minimal models ---------------------------------------------------------------


def test_minimal_model_of_s3():
    a = sphere_cohomology_cdga(3, cap=10)
    res = minimal_model(a, 8)
    assert [d for _, d in res.model.generators] == [3]
    assert poly_is_zero(res.model.d_polys[0])
    assert res.certificate.all_isomorphisms and res.certificate.injective_above


def test_minimal_model_of_s2():
    a = sphere_cohomology_cdga(2, cap=9)
    res = minimal_model(a, 7)
    degrees = [d for _, d in res.model.generators]
    assert degrees == [2, 3]
    # d(degree-3 generator) = (degree-2 generator)^2 up to a scalar
    d3 = res.model.d_polys[1]
    assert set(d3) == {(0, 0)}
    assert res.certificate.minimal


def test_minimal_model_of_family_reproduces_generators():
    a = family_cdga(3, cap=14)
    res = minimal_model(a, 12)
    degrees = sorted(d for _, d in res.model.generators)
    assert degrees == [3, 3, 5]
    # exactly one generator carries a nonzero differential (dz = xy)
    nonzero = [p for p in res.model.d_polys if not poly_is_zero(p)]
    assert len(nonzero) == 1 and all(len(m) == 2 for m in nonzero[0])


def test_minimal_model_rejects_bad_preconditions():
    # nonzero H^1: exterior algebra on a degree-1 class
    a = CDGA.build(6, [("t", 1)], products={("t", "t"): {}})
    with pytest.raises(ValueError):
        minimal_model(a, 4)


def test_minimal_model_certificate_on_product_of_spheres():
    a = CDGA.build(14, [("x", 2), ("y", 2), ("xy", 4)],
                   products={("x", "x"): {}, ("y", "y"): {},
                             ("x", "y"): {"xy": 1}, ("x", "xy"): {},
                             ("y", "xy"): {}, ("xy", "xy"): {}})
    res = minimal_model(a, 12)
    assert res.certificate.all_isomorphisms
    assert res.certificate.injective_above
    assert verify_degree_bounds(res.model, 2)


def test_degree_bounds():
    m = odd_triple_family(3)
    assert verify_degree_bounds(m, 3)  # d vanishes through 2*3-2 = 4 and V starts at 3
    assert not verify_degree_bounds(m, 4)  # generators of degree 3 < 4 exist
    low = FreeCGA([("t", 1)], [{}], cap=4)
    assert not verify_degree_bounds(low, 2)


# --- complementary products and the injectivity criterion ------------------------


def test_s3_products_vanish():
    m = FreeCGA([("e", 3)], [{}], cap=12)
    ok, _ = check_complementary_products(m, 6)
    assert ok


def test_family_products_at_3u_minus_1_vanish():
    # H^3 x H^5 and H^4 x H^4 are all zero groups, so products vanish although
    # the projection is not injective there
    m = odd_triple_family(3)
    ok, _ = check_complementary_products(m, 8)
    assert ok
    assert not zeta(m, 8).injective


def test_torus_ring_products_fail():
    ring = CohomologyRing.from_table(
        {1: 2, 2: 1},
        {(1, 0, 1, 1): (Q(1),), (1, 0, 1, 0): (Q(0),), (1, 1, 1, 1): (Q(0),)})
    ok, witness = check_complementary_products(ring, 2)
    assert not ok
    assert witness is not None and witness.degree_left == 1


def test_lemma_verdict_on_s2_model():
    a = sphere_cohomology_cdga(2, cap=9)
    m = minimal_model(a, 7).model
    verdict = zeta_injectivity_via_lemma(m, 2, 2, 4)
    assert verdict.applies and verdict.zeta_injective


def test_lemma_inapplicable_on_family():
    m = odd_triple_family(3)
    verdict = zeta_injectivity_via_lemma(m, 3, 4, 8)
    assert not verdict.in_range and not verdict.applies
    assert not verdict.zeta_injective


def random_minimal_algebra(rng):
    """A random minimal algebra: closed generators in degrees >= r, plus
    possibly one exact generator whose differential is a product of closed
    ones (wordlength 2, so minimality holds)."""
    r = rng.randint(2, 4)
    gens = []
    for k in range(rng.randint(1, 3)):
        gens.append((f"a{k}", rng.randint(r, r + 3)))
    ds = [{} for _ in gens]
    if len(gens) >= 2 and rng.random() < 0.6:
        i, j = 0, 1
        di, dj = gens[i][1], gens[j][1]
        target = di + dj
        if (di % 2 == 1 and i == j) or target < 2:
            pass
        else:
            name = f"w"
            deg = target - 1
            if deg > r:  # keep generators at degree >= r
                mono = tuple(sorted((i, j)))
                if not (di % 2 == 1 and i == j):
                    gens.append((name, deg))
                    ds.append({mono: Q(1)})
    return FreeCGA(gens, ds, cap=max(d for _, d in gens) * 2 + 2)


def test_random_lemma_property():
    rng = random.Random(101)
    hits = 0
    trials = 0
    while hits < 30 and trials < 400:
        trials += 1
        m = random_minimal_algebra(rng)
        r = min(d for _, d in m.generators)
        s_candidates = [d for g, (_, d) in enumerate(m.generators)]
        s = 0
        for s_try in range(1, max(s_candidates) + 1):
            if all(poly_is_zero(m.d_polys[g])
                   for g, (_, d) in enumerate(m.generators) if d <= s_try):
                s = s_try
        if s == 0:
            continue
        t = rng.randint(2, r + s)
        if t > m.cap:
            continue
        ok, _ = check_complementary_products(m, t)
        if not ok:
            continue
        verdict = zeta_injectivity_via_lemma(m, r, s, t)
        assert verdict.applies
        assert verdict.zeta_injective
        hits += 1
    assert hits == 30


# --- Hurewicz certificates --------------------------------------------------------


def test_hurewicz_requires_flags():
    m = odd_triple_family(3)
    with pytest.raises(ValueError):
        hurewicz_surjectivity_certificate(m, 9, simply_connected=False,
                                          finite_type=True)


def test_hurewicz_on_sphere_model():
    a = sphere_cohomology_cdga(4, cap=12)
    m = minimal_model(a, 10).model
    cert = hurewicz_surjectivity_certificate(m, 5, True, True)
    assert cert.surjective  # H^4 is generated by the degree-4 generator


def test_hurewicz_fails_on_family_at_3u():
    m = odd_triple_family(3)
    cert = hurewicz_surjectivity_certificate(m, 9, True, True)  # n-1 = 8
    assert not cert.surjective and cert.kernel_dim == 2
    assert not cert.sufficient_route  # n = 9 > 3r - 1 = 8


def test_hurewicz_vacuous_when_no_cohomology():
    m = FreeCGA([("e", 3)], [{}], cap=12)
    cert = hurewicz_surjectivity_certificate(m, 8, True, True)  # H^7 = 0
    assert cert.surjective


def test_formal_surrogate_carries_caveat():
    ring = CohomologyRing.from_table({3: 1}, {})
    a = formal_cdga_from_ring(ring, cap=10)
    res = minimal_model(a, 8)
    cert = hurewicz_surjectivity_certificate(res.model, 4, True, True)
    assert any("formal" in c for c in cert.caveats)


def test_ring_from_free_cga_matches_direct_products():
    m = odd_triple_family(3)
    ring = CohomologyRing.from_free_cga(m, 11)
    # some product of a degree-3 class with a degree-8 class generates H^11
    products = [ring.product(3, a, 8, b) for a in range(2) for b in range(2)]
    assert any(any(e != 0 for e in v) for v in products)
    # and the span of all such products is exactly one-dimensional
    from ixspace.qlinalg import RationalMatrix, rank
    assert rank(RationalMatrix.from_columns(products, rows=1)) == 1
