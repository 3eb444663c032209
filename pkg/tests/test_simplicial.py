import random
from fractions import Fraction as Q

import pytest

from ixspace.chain import betti, cohomology, homology, mapping_cone
from ixspace.qlinalg import RationalMatrix, rank
from ixspace.simplicial import (
    Cochain,
    NonOrientableError,
    NotPseudomanifoldError,
    SimplicialComplex,
    SimplicialPair,
    cap,
    coboundary,
    cup,
    fundamental_cycle,
    relative_fundamental_cycle,
    simplicial_map,
    simplicial_mapping_cone,
    simplicial_mapping_cylinder,
    verify_pd_pair,
)
from ixspace.fixtures import (
    ball_pair,
    circle_triangulation,
    disc_pair,
    klein_grid,
    s2xs1,
    simplex_boundary,
    simplex_skeleton,
    torus_7,
)

from conftest import oracle_betti


def chain_oracle_betti(k, i):
    c = k.chain_complex()
    ranks = {d: c.rank(d) for d in c.degrees()}
    bnd = {d: c.d(d).entries for d in range(1, k.dim + 1)}
    return oracle_betti(ranks, bnd, i)


def test_triangle_boundary_is_circle():
    k = circle_triangulation()
    c = k.chain_complex()
    assert [homology(c, i).dim for i in (0, 1)] == [1, 1]
    assert chain_oracle_betti(k, 1) == 1


def test_boundary_of_4_simplex_is_s3():
    k = simplex_boundary(3)
    c = k.chain_complex()
    dims = [homology(c, i).dim for i in range(4)]
    assert dims == [1, 0, 0, 1]
    for i in range(4):
        assert dims[i] == chain_oracle_betti(k, i)


def test_closure_is_enforced():
    with pytest.raises(ValueError):
        SimplicialComplex(3, [((0,), (1,)), ((0, 1), (1, 2))])


def test_constant_map_is_augmentation_compatible():
    k = circle_triangulation()
    pt = SimplicialComplex.from_facets([(0,)], vertex_count=1)
    f = simplicial_map(k, pt, [0, 0, 0])
    # all vertices map to the point with coefficient 1, edges die
    assert f.component(0) == RationalMatrix([[1, 1, 1]])
    assert f.component(1).is_zero()


def test_simplicial_map_signs():
    # map collapsing a square-ish complex; check chain map property holds
    k = simplex_skeleton(2)
    f = simplicial_map(k, k, [0, 1, 2])
    assert f.component(2) == RationalMatrix([[1]])


def test_cup_unit():
    k = torus_7()
    one = Cochain.unit(k)
    rng = random.Random(0)
    beta = Cochain.from_values(k, 1, [rng.randint(-2, 2) for _ in k.simplices(1)])
    assert cup(one, beta).values == beta.values


def test_cup_leibniz_exact():
    k = torus_7()
    rng = random.Random(1)
    for _ in range(10):
        a = Cochain.from_values(k, 1, [rng.randint(-2, 2) for _ in k.simplices(1)])
        b = Cochain.from_values(k, 0, [rng.randint(-2, 2) for _ in k.simplices(0)])
        lhs = coboundary(cup(a, b))
        rhs1 = cup(coboundary(a), b)
        rhs2 = cup(a, coboundary(b)).scale((-1) ** a.degree)
        assert lhs.values == (rhs1 + rhs2).values


def _h1_cocycle_basis(k):
    c = k.chain_complex()
    h = cohomology(c, 1)
    return [Cochain(k, 1, tuple(rep)) for rep in h.cycle_representatives], h


def _class_in_h2(k, cochain):
    c = k.chain_complex()
    h2 = cohomology(c, 2)
    return h2.coords_of_cycle(cochain.values)


def test_torus_cup_products():
    k = torus_7()
    c = k.chain_complex()
    assert [homology(c, i).dim for i in range(3)] == [1, 2, 1]
    basis, _ = _h1_cocycle_basis(k)
    a, b = basis
    ab = _class_in_h2(k, cup(a, b))
    assert any(x != 0 for x in ab)  # [a] u [b] generates H^2
    aa = _class_in_h2(k, cup(a, a))
    assert all(x == 0 for x in aa)  # [a] u [a] = 0
    # graded commutativity on classes in odd degree: [a][b] = -[b][a]
    ba = _class_in_h2(k, cup(b, a))
    assert tuple(-x for x in ba) == ab


def test_s3_positive_products_vanish():
    k = simplex_boundary(3)
    c = k.chain_complex()
    assert cohomology(c, 1).dim == 0 and cohomology(c, 2).dim == 0


def test_cap_unit_and_zero():
    k = torus_7()
    z = fundamental_cycle(k)
    one = Cochain.unit(k)
    assert cap(one, z, 2) == tuple(z)
    zero = Cochain.from_values(k, 1, [0] * len(k.simplices(1)))
    assert all(v == 0 for v in cap(zero, z, 2))


def test_cap_cup_adjunction_exact():
    # (a u b) n c = a n (b n c) on the nose, random cochains on the torus
    k = torus_7()
    rng = random.Random(5)
    z = [rng.randint(-2, 2) for _ in k.simplices(2)]
    for _ in range(10):
        a = Cochain.from_values(k, 1, [rng.randint(-2, 2) for _ in k.simplices(1)])
        b = Cochain.from_values(k, 1, [rng.randint(-2, 2) for _ in k.simplices(1)])
        lhs = cap(cup(a, b), z, 2)
        rhs = cap(a, cap(b, z, 2), 1)
        assert lhs == rhs


def test_cap_boundary_identity():
    # d(a n c) = a n dc + (-1)^(n-p) (delta(a) n c) for degree-p cochains
    k = simplex_boundary(3)
    c = k.chain_complex()
    n = 3
    rng = random.Random(6)
    for p in (1, 2):
        for _ in range(6):
            a = Cochain.from_values(k, p, [rng.randint(-2, 2) for _ in k.simplices(p)])
            ch = [rng.randint(-2, 2) for _ in k.simplices(n)]
            lhs = c.d(n - p).apply(cap(a, ch, n))
            t1 = cap(a, c.d(n).apply(ch), n - 1)
            t2 = cap(coboundary(a), ch, n)
            sign = Q(-1) ** (n - p)
            rhs = tuple(x + sign * y for x, y in zip(t1, t2))
            assert lhs == rhs


def test_fundamental_cycle_circle():
    k = circle_triangulation()
    z = fundamental_cycle(k)
    d = k.chain_complex().d(1)
    assert all(e == 0 for e in d.apply(z))
    assert all(abs(e) == 1 for e in z)


def test_fundamental_cycle_s3():
    k = simplex_boundary(3)
    z = fundamental_cycle(k)
    assert all(abs(e) == 1 for e in z)
    assert all(e == 0 for e in k.chain_complex().d(3).apply(z))


def test_klein_fixture_is_nonorientable():
    k = klein_grid()
    c = k.chain_complex()
    # closed surface with chi = 0 and vanishing rational H_2: the Klein bottle
    assert k.euler_characteristic() == 0
    assert homology(c, 2).dim == 0
    assert homology(c, 1).dim == 1
    with pytest.raises(NonOrientableError):
        fundamental_cycle(k)


def test_open_complex_is_not_closed_pseudomanifold():
    with pytest.raises(NotPseudomanifoldError):
        fundamental_cycle(simplex_skeleton(2))


def test_verify_pd_disc_pair():
    pair = disc_pair()
    a = relative_fundamental_cycle(pair)
    report = verify_pd_pair(pair, 2, a)
    assert report.holds
    assert report.boundary_report is not None and report.boundary_report.holds


def test_verify_pd_sphere_and_zero_class():
    k = simplex_boundary(2)
    empty = SimplicialComplex(k.vertex_count, [()])
    pair = SimplicialPair(k, empty)
    z = fundamental_cycle(k)
    assert verify_pd_pair(pair, 2, z).holds
    zero = [0] * len(z)
    rep = verify_pd_pair(pair, 2, zero)
    assert not rep.holds and 0 in rep.failing_degrees()


def test_verify_pd_ball_pair():
    pair = ball_pair(4)
    a = relative_fundamental_cycle(pair)
    rep = verify_pd_pair(pair, 4, a)
    assert rep.holds
    # the boundary orientation is the S^3 fundamental class
    sub_c = pair.sub.chain_complex()
    da = pair.ambient.chain_complex().d(4).apply(a)
    z = pair.ambient_chain_to_sub(da, 3)
    assert homology(sub_c, 3).coords_of_cycle(z) != (Q(0),)


def test_orientation_scaling_invariance():
    pair = disc_pair()
    a = relative_fundamental_cycle(pair)
    for q in (Q(2), Q(5, 3)):
        scaled = [q * e for e in a]
        assert verify_pd_pair(pair, 2, scaled).holds


def test_simplicial_cylinder_of_identity():
    k = circle_triangulation()
    data = simplicial_mapping_cylinder(k, k, [0, 1, 2])
    bc = betti(data.complex.chain_complex())
    bk = betti(k.chain_complex())
    for d in set(bc) | set(bk):
        assert bc.get(d, 0) == bk.get(d, 0)


def test_simplicial_cone_of_identity_contractible():
    k = circle_triangulation()
    data = simplicial_mapping_cone(k, k, [0, 1, 2])
    b = betti(data.complex.chain_complex())
    assert b[0] == 1 and all(v == 0 for d, v in b.items() if d > 0)


def test_simplicial_cone_of_boundary_inclusion():
    # cone of S^2 -> D^3(full simplex on its vertices) has the homology of
    # D^3/S^2 = S^3 (up to the extra cone point)
    s2 = simplex_boundary(2)
    d3 = simplex_skeleton(3)
    data = simplicial_mapping_cone(s2, d3, [0, 1, 2, 3])
    b = betti(data.complex.chain_complex())
    assert b[0] == 1 and b.get(1, 0) == 0 and b.get(2, 0) == 0 and b[3] == 1


def test_cone_betti_matches_chain_cone_random():
    rng = random.Random(17)
    target = simplex_skeleton(3)
    complexes = [circle_triangulation(), simplex_boundary(2), simplex_skeleton(2)]
    for trial in range(10):
        src = complexes[trial % len(complexes)]
        vmap = sorted(rng.randint(0, 3) for _ in range(src.vertex_count))
        f = simplicial_map(src, target, vmap)
        cone_chain, _ = mapping_cone(f)
        data = simplicial_mapping_cone(src, target, vmap)
        bs = betti(data.complex.chain_complex())
        bc = betti(cone_chain)
        # the simplicial cone computes unreduced homology of the cone space
        for d in set(bs) | set(bc):
            expect = bc.get(d, 0) + (1 if d == 0 else 0)
            assert bs.get(d, 0) == expect


def test_product_s2xs1_homology():
    k = s2xs1()
    c = k.chain_complex()
    assert [homology(c, i).dim for i in range(4)] == [1, 1, 1, 1]
