"""Deterministic generators for the example inputs used by the CLI and the
test suite: small chain models of links, simplicial manifolds and products,
the twisted mapping-torus bundle family, depth-one space specifications, and
the odd-degree free-algebra family with dz = xy.
"""

from __future__ import annotations

from fractions import Fraction as Q
from itertools import combinations

from .qlinalg import RationalMatrix
from .chain import (
    ChainComplex,
    ChainMap,
    betti,
    direct_sum,
    homology,
    mapping_cylinder,
    moore_truncation,
)
from .simplicial import (
    SimplicialComplex,
    SimplicialPair,
    fundamental_cycle,
    relative_fundamental_cycle,
    simplicial_mapping_cone,
)
from .sullivan import CDGA, CohomologyRing
from .duality import (
    FlatBundle,
    LinkBundleData,
    PerversityPair,
    WittSpaceSpec,
    build_flat_bundle,
)


# --- chain models -------------------------------------------------------------

def point_chain() -> ChainComplex:
    return ChainComplex(0, [1])


def circle_chain() -> ChainComplex:
    return ChainComplex(0, [1, 1])


def sphere_chain(n: int) -> ChainComplex:
    """Minimal chain model of S^n: Q in degrees 0 and n, zero differential."""
    return ChainComplex(0, [1] + [0] * (n - 1) + [1])


def s1xs2_chain() -> ChainComplex:
    """Minimal model of S^1 x S^2: one generator in each degree 0..3."""
    return ChainComplex(0, [1, 1, 1, 1])


def connected_sum_chain() -> ChainComplex:
    """Minimal model of (S^1 x S^2) # (S^1 x S^2): middle homology doubled."""
    return ChainComplex(0, [1, 2, 2, 1])


def swap_monodromy(c: ChainComplex) -> ChainMap:
    """Order-2 automorphism of the connected-sum model interchanging the two
    summands in the middle degrees and fixing degrees 0 and top."""
    comps = {}
    for i in c.degrees():
        n = c.rank(i)
        if n == 2:
            comps[i] = RationalMatrix([[0, 1], [1, 0]])
        else:
            comps[i] = RationalMatrix.identity(n)
    return ChainMap(c, c, comps)


def sign_monodromy(c: ChainComplex, flip_degrees: tuple[int, ...]) -> ChainMap:
    """Order-2 automorphism acting by -1 in the listed degrees."""
    comps = {}
    for i in c.degrees():
        n = c.rank(i)
        s = -1 if i in flip_degrees else 1
        comps[i] = RationalMatrix.identity(n).scale(s)
    return ChainMap(c, c, comps)


LINK_CHAIN_MODELS = {
    "s3": sphere_chain(3),
    "s2": sphere_chain(2),
    "s1xs2": s1xs2_chain(),
    "connected-sum": connected_sum_chain(),
}


def link_monodromy(link: str, kind: str) -> tuple[ChainMap, int]:
    """(automorphism, order) for a named link model."""
    c = LINK_CHAIN_MODELS[link]
    if kind == "id":
        return ChainMap.identity(c), 1
    if kind == "order2":
        if link == "connected-sum":
            return swap_monodromy(c), 2
        if link == "s1xs2":
            return sign_monodromy(c, (1, 2)), 2
        raise ValueError(f"no order-2 monodromy defined for link {link!r}")
    raise ValueError(f"unknown monodromy kind {kind!r}")


# --- simplicial fixtures --------------------------------------------------------

def simplex_skeleton(n: int) -> SimplicialComplex:
    """The full n-simplex as a complex (a combinatorial n-ball)."""
    return SimplicialComplex.from_facets([tuple(range(n + 1))])


def simplex_boundary(n: int) -> SimplicialComplex:
    """The boundary of the (n+1)-simplex: a triangulated S^n."""
    verts = tuple(range(n + 2))
    return SimplicialComplex.from_facets(list(combinations(verts, n + 1)))


def circle_triangulation() -> SimplicialComplex:
    return simplex_boundary(1)


def disc_pair() -> SimplicialPair:
    """(D^2, boundary circle) as the full triangle with its edge cycle."""
    ambient = simplex_skeleton(2)
    sub = SimplicialComplex.from_facets([(0, 1), (1, 2), (0, 2)], vertex_count=3)
    return SimplicialPair(ambient, sub)


def ball_pair(n: int) -> SimplicialPair:
    """(D^n, S^{n-1}) as the n-simplex with its boundary."""
    ambient = simplex_skeleton(n)
    sub = SimplicialComplex.from_facets(
        list(combinations(range(n + 1), n)), vertex_count=n + 1)
    return SimplicialPair(ambient, sub)


def torus_7() -> SimplicialComplex:
    """The 7-vertex triangulation of the 2-torus."""
    facets = []
    for i in range(7):
        facets.append(tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))))
        facets.append(tuple(sorted(((i) % 7, (i + 2) % 7, (i + 3) % 7))))
    return SimplicialComplex.from_facets(facets, vertex_count=7)


def klein_grid() -> SimplicialComplex:
    """A 12-vertex flip-grid triangulation of the Klein bottle: a 4 x 3 grid of
    squares with the top row glued to the bottom through i -> -i."""
    m, rows = 4, 3

    def vid(i, j):
        i %= m
        if j == rows:
            return ((-i) % m, 0)
        return (i, j)

    tris = set()
    for j in range(rows):
        for i in range(m):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i, j + 1), vid(i + 1, j + 1)
            tris.add(tuple(sorted((a, b, d))))
            tris.add(tuple(sorted((a, c, d))))
    verts = sorted(set(v for t in tris for v in t))
    idx = {v: k for k, v in enumerate(verts)}
    facets = [tuple(sorted(idx[v] for v in t)) for t in tris]
    return SimplicialComplex.from_facets(facets, vertex_count=len(verts))


# --- products ------------------------------------------------------------------

def _product_vid(a: int, b: int, nl: int) -> int:
    return a * nl + b


def _staircase_facets(k_facets, l_facets, nl: int) -> list[tuple[int, ...]]:
    """Maximal staircase simplices of all facet pairs; the monotone-path
    triangulation of each prism sigma x tau."""
    out = []
    for sigma in k_facets:
        p = len(sigma) - 1
        for tau in l_facets:
            q = len(tau) - 1
            # lattice paths from (0,0) to (p,q): choose positions of the p "right" steps
            for rights in combinations(range(p + q), p):
                path = [(0, 0)]
                x = y = 0
                for step in range(p + q):
                    if step in rights:
                        x += 1
                    else:
                        y += 1
                    path.append((x, y))
                out.append(tuple(_product_vid(sigma[i], tau[j], nl) for i, j in path))
    return out


def _maximal_simplices(k: SimplicialComplex) -> list[tuple[int, ...]]:
    all_simplices = set()
    for d in range(k.dim + 1):
        all_simplices.update(k.simplices(d))
    maximal = []
    for d in range(k.dim, -1, -1):
        for s in k.simplices(d):
            if not any(set(s) < set(t) for t in maximal):
                maximal.append(s)
    return maximal


def product_complex(k: SimplicialComplex, l: SimplicialComplex) -> SimplicialComplex:
    """The ordered staircase triangulation of |K| x |L|; vertex (a, b) gets the
    label a * L.vertex_count + b, which is monotone for the product order."""
    facets = _staircase_facets(_maximal_simplices(k), _maximal_simplices(l),
                               l.vertex_count)
    return SimplicialComplex.from_facets(facets,
                                         vertex_count=k.vertex_count * l.vertex_count)


def product_pair(k: SimplicialComplex, k_sub: SimplicialComplex,
                 l: SimplicialComplex, l_sub: SimplicialComplex | None = None
                 ) -> SimplicialPair:
    """(K x L, K_sub x L_sub) with consistent product labels; passing
    l_sub=None uses all of L on the sub side."""
    ambient = product_complex(k, l)
    l_sub = l_sub if l_sub is not None else l
    sub_facets = _staircase_facets(_maximal_simplices(k_sub),
                                   _maximal_simplices(l_sub), l.vertex_count)
    sub = SimplicialComplex.from_facets(sub_facets,
                                        vertex_count=k.vertex_count * l.vertex_count)
    return SimplicialPair(ambient, sub)


def s2xs2() -> SimplicialComplex:
    s2 = simplex_boundary(2)
    return product_complex(s2, s2)


def cp2_like() -> SimplicialComplex:
    """A 9-vertex closed oriented combinatorial 4-manifold with the rational
    homology (Q, 0, Q, 0, Q) and a rank-one positive middle intersection form.

    The 36 facets are four orbits of 5-element vertex sets under the
    translation action of Z_3 x Z_3 on the vertex grid (vertex 3a + b is the
    grid point (a, b)); the orbit representatives were found by searching for
    translation-invariant two-fold covers of the 4-element subsets, and the
    test suite re-verifies the pseudomanifold, homology, duality, and
    signature properties."""
    reps = [(0, 1, 2, 3, 4), (0, 1, 3, 4, 6), (0, 1, 3, 5, 7), (0, 1, 4, 5, 6)]

    def translate(s, da, db):
        return tuple(sorted(3 * ((v // 3 + da) % 3) + ((v % 3) + db) % 3
                            for v in s))

    facets = sorted(set(translate(r, da, db)
                        for r in reps for da in range(3) for db in range(3)))
    # transpose two labels to fix the orientation with positive signature
    swap = {0: 1, 1: 0}
    facets = [tuple(sorted(swap.get(v, v) for v in s)) for s in facets]
    return SimplicialComplex.from_facets(facets, vertex_count=9)


def s2xd2_pair() -> SimplicialPair:
    """(S^2 x D^2, S^2 x S^1): a compact 4-manifold with boundary."""
    s2 = simplex_boundary(2)
    d2 = simplex_skeleton(2)
    s1 = SimplicialComplex.from_facets([(0, 1), (1, 2), (0, 2)], vertex_count=3)
    return product_pair(s2, s2, d2, s1)


def s2xs1() -> SimplicialComplex:
    s2 = simplex_boundary(2)
    s1 = simplex_boundary(1)
    return product_complex(s2, s1)


def disjoint_union(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    off = a.vertex_count
    facets = [s for s in _maximal_simplices(a)]
    facets += [tuple(v + off for v in s) for s in _maximal_simplices(b)]
    return SimplicialComplex.from_facets(facets,
                                         vertex_count=a.vertex_count + b.vertex_count)


# --- mapping-torus bundles -------------------------------------------------------

def bundle_data(link: str, monodromy: str = "id",
                fiber_fundamental=None, label: str | None = None) -> LinkBundleData:
    """Flat circle-base bundle input for a named link chain model."""
    fiber = LINK_CHAIN_MODELS[link]
    lam, order = link_monodromy(link, monodromy)
    c = fiber.top
    return LinkBundleData(fiber=fiber, fiber_dim=c, monodromy=lam, order=order,
                          fiber_fundamental=fiber_fundamental,
                          label=label or f"{link}/{monodromy}")


def standard_bundle(link: str, monodromy: str = "id") -> FlatBundle:
    return build_flat_bundle(bundle_data(link, monodromy), PerversityPair.middle())


def s2_bundle_with_simplicial_ring() -> FlatBundle:
    """The identity-monodromy bundle over the circle with fiber the 2-sphere,
    carrying the exact cup-product ring of a simplicial model of its
    truncation cone (the cone of the circle inclusion into S^2 x S^1)."""
    data = bundle_data("s2", "id", label="s2/id+ring")
    bundle = build_flat_bundle(data, PerversityPair.middle())
    s2 = simplex_boundary(2)
    s1 = simplex_boundary(1)
    prod = product_complex(s2, s1)
    # the fiber-basepoint circle {v0} x S^1 has product labels 0, 1, 2
    circle = SimplicialComplex.from_facets([(0, 1), (1, 2), (0, 2)],
                                           vertex_count=3)
    cone_data = simplicial_mapping_cone(circle, prod, [0, 1, 2])
    cone_simplicial = cone_data.complex
    b_model = betti(cone_simplicial.chain_complex())
    for i in range(0, bundle.n):
        expect = homology(bundle.cone, i).dim
        if b_model.get(i, 0) != expect:
            raise AssertionError(
                "simplicial cone model disagrees with the chain-level cone")
    ring = CohomologyRing.from_simplicial(cone_simplicial, bundle.n - 1)
    return FlatBundle(bundle.label, bundle.n, bundle.k, bundle.l, bundle.fiber,
                      bundle.total, bundle.truncated_total, bundle.truncation_map,
                      bundle.cone, bundle.cone_pair, bundle.total_fundamental,
                      ring)


# --- depth-one space specifications ------------------------------------------------

def d4xs1_wittspec() -> WittSpaceSpec:
    """Regular part D^4 x S^1 (chain model) with one boundary component
    S^3 x S^1 carried by the identity-monodromy bundle; dimension five."""
    bundle = standard_bundle("s3", "id")
    e = bundle.total  # ranks (1, 1, 0, 1, 1) in degrees 0..4, zero differential
    m = ChainComplex(0, [1, 1, 0, 1, 2, 1], {
        4: RationalMatrix([[0, 1]]),          # d(k4) = e3'
        5: RationalMatrix([[1], [0]]),        # d(k5) = e4'
    })
    incl = ChainMap(e, m, {
        0: RationalMatrix([[1]]),
        1: RationalMatrix([[1]]),
        3: RationalMatrix([[1]]),
        4: RationalMatrix([[1], [0]]),
    })
    return WittSpaceSpec(n=5, regular_chain=m, boundary_inclusion=incl,
                         strata=(bundle,), mu=(Q(1),))


def doubled_wittspec() -> WittSpaceSpec:
    """Regular part (S^3 x S^1) x [0,1] with both ends singular: two identity
    strata whose orientation cycles are opposite, matching the two boundary
    orientations of a cylinder."""
    b1 = standard_bundle("s3", "id")
    data2 = bundle_data("s3", "id", fiber_fundamental=(Q(-1),), label="s3/id(-)")
    b2 = build_flat_bundle(data2, PerversityPair.middle())
    e = b1.total
    cyl, incl_source, incl_target = mapping_cylinder(ChainMap.identity(e))
    esum = direct_sum([b1.total, b2.total])
    comps = {}
    for i in esum.degrees():
        t = incl_target.component(i)
        s = incl_source.component(i)
        comps[i] = t.hstack(s)
    incl = ChainMap(esum, cyl, comps)
    mu = [Q(0)] * cyl.rank(5)
    # cyl_5 = E_5 (+) E_5 (+) E_4; the prism chain over the orientation cycle
    off = e.rank(5) + e.rank(5)
    for j, c in enumerate(b1.total_fundamental):
        mu[off + j] = c
    return WittSpaceSpec(n=5, regular_chain=cyl, boundary_inclusion=incl,
                         strata=(b1, b2), mu=tuple(mu))


def isolated_ball_wittspec() -> WittSpaceSpec:
    """(D^4, S^3) with an isolated singular point: the boundary sphere is the
    link itself (precomputed data over a point base), truncated at degree 2."""
    pair = ball_pair(4)
    m = pair.ambient.chain_complex()
    e = pair.sub.chain_complex()
    incl = pair.inclusion_chain_map()
    trunc, tmap = moore_truncation(e, 2)
    fund = fundamental_cycle(pair.sub)
    data = LinkBundleData(fiber=e, fiber_dim=3, precomputed=(e, trunc, tmap),
                          total_fundamental=fund, label="isolated-point")
    bundle = build_flat_bundle(data, PerversityPair.middle())
    mu = relative_fundamental_cycle(pair)
    return WittSpaceSpec(n=4, regular_chain=m, boundary_inclusion=incl,
                         strata=(bundle,), regular_pair=pair, mu=mu)


def s2xd2_wittspec() -> WittSpaceSpec:
    """Dimension-four space with a singular circle: regular part S^2 x D^2,
    boundary S^2 x S^1 with its fiberwise truncation onto the basepoint
    circle, all from one product triangulation."""
    pair = s2xd2_pair()
    m = pair.ambient.chain_complex()
    e = pair.sub.chain_complex()
    incl = pair.inclusion_chain_map()
    # the circle {v0 of S^2} x S^1 has product labels (0, b) = b for b = 0,1,2
    circle = SimplicialComplex.from_facets([(0, 1), (1, 2), (0, 2)],
                                           vertex_count=pair.sub.vertex_count)
    sub_pair = SimplicialPair(pair.sub, circle)
    tmap = sub_pair.inclusion_chain_map()
    trunc = tmap.source
    fund = fundamental_cycle(pair.sub)
    fiber = simplex_boundary(2).chain_complex()
    data = LinkBundleData(fiber=fiber, fiber_dim=2,
                          precomputed=(e, trunc, tmap),
                          total_fundamental=fund, label="s2-circle-stratum")
    bundle = build_flat_bundle(data, PerversityPair.middle())
    mu = relative_fundamental_cycle(pair)
    return WittSpaceSpec(n=4, regular_chain=m, boundary_inclusion=incl,
                         strata=(bundle,), regular_pair=pair, mu=mu)


# --- free-algebra family ------------------------------------------------------------

def odd_triple_cdga(u: int, cap: int) -> CDGA:
    """The odd triple family as a finite table algebra: the eight monomials of
    the free algebra on x, y (degree u) and z (degree 2u-1) with dz = xy."""
    x, y, z = "x", "y", "z"
    els = [(x, u), (y, u), (z, 2 * u - 1), ("xy", 2 * u), ("xz", 3 * u - 1),
           ("yz", 3 * u - 1), ("xyz", 4 * u - 1)]
    els = [(nm, d) for nm, d in els if d <= cap]
    names = {nm for nm, _ in els}
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
    for nm in (x, y, z):
        put(nm, nm, None, 1)
    put(x, "xy", None, 1)
    put(y, "xy", None, 1)
    diffs = {}
    if "xy" in names and z in names:
        diffs = {z: {"xy": 1}}
    return CDGA.build(cap, els, products=prods, differentials=diffs)


def cdga_catalog(cap: int = 14) -> list[tuple[str, CDGA]]:
    """A deterministic catalog of finite commutative cochain algebras with
    H^0 = Q and H^1 = 0, for exercising the model construction."""
    from .sullivan import sphere_cohomology_cdga
    out = []
    for n in range(2, 8):
        out.append((f"sphere-{n}", sphere_cohomology_cdga(n, cap)))
    # truncated polynomial algebras Q[x]/x^m, |x| = 2
    for mdeg in (3, 4, 5):
        els = [(f"x{k}", 2 * k) for k in range(1, mdeg)]
        prods = {}
        for i in range(1, mdeg):
            for j in range(i, mdeg):
                key = (f"x{i}", f"x{j}")
                if i + j < mdeg:
                    prods[key] = {f"x{i + j}": 1}
                else:
                    prods[key] = {}
        out.append((f"truncated-poly-{mdeg}", CDGA.build(cap, els, products=prods)))
    # products of two spheres
    for a, b in ((2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (2, 5), (4, 4), (3, 5)):
        els = [("xa", a), ("xb", b)]
        prods = {("xa", "xa"): {}, ("xb", "xb"): {}}
        if a + b <= cap:
            els.append(("xab", a + b))
            prods[("xa", "xb")] = {"xab": 1}
            prods[("xa", "xab")] = {}
            prods[("xb", "xab")] = {}
            prods[("xab", "xab")] = {}
        out.append((f"s{a}xs{b}", CDGA.build(cap, els, products=prods)))
    # exterior algebras on two odd generators of equal degree
    for d in (3, 5):
        els = [("u", d), ("v", d), ("uv", 2 * d)]
        prods = {("u", "u"): {}, ("v", "v"): {}, ("u", "v"): {"uv": 1},
                 ("u", "uv"): {}, ("v", "uv"): {}, ("uv", "uv"): {}}
        out.append((f"exterior-{d}-{d}", CDGA.build(cap, els, products=prods)))
    # the twisted family
    out.append(("odd-triple-3", odd_triple_cdga(3, cap)))
    # wedge-like rings: two sphere classes with all products zero
    for a, b in ((2, 3), (3, 4), (2, 5)):
        els = [("p", a), ("q", b)]
        prods = {("p", "p"): {}, ("q", "q"): {}, ("p", "q"): {}}
        out.append((f"wedge-{a}-{b}", CDGA.build(cap, els, products=prods)))
    return out
