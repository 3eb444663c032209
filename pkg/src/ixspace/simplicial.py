"""Finite ordered simplicial complexes with cup/cap products and
Poincare-duality verification.

Vertices are integers 0..vertex_count-1 and every simplex is a strictly
increasing vertex tuple; the global vertex order is what makes the
Alexander-Whitney formulas deterministic.

Frozen sign conventions:
  cup:  (a u b)(v_0..v_{p+q}) = a(v_0..v_p) * b(v_p..v_{p+q})
  cap:  a n (v_0..v_n) = a(v_{n-p}..v_n) * (v_0..v_{n-p})
With cap evaluating on the back face, (a u b) n c = a n (b n c) holds on the
nose at chain level, and the boundary rule is
  d(a n c) = a n dc + (-1)^(n-p) (delta a) n c
for a of degree p capped with an n-chain c; the test suite checks this as an
exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from itertools import combinations
from typing import Iterable, Sequence

from .qlinalg import RationalMatrix, vector
from .chain import (
    ChainComplex,
    ChainMap,
    HomologyBasis,
    PairData,
    betti,
    cohomology,
    homology,
    pair_from_inclusion,
)


class NotPseudomanifoldError(ValueError):
    pass


class NonOrientableError(ValueError):
    pass


class SimplicialComplex:
    """An abstract ordered simplicial complex, closed under faces."""

    __slots__ = ("vertex_count", "_simplices", "_index", "_chain_cache")

    def __init__(self, vertex_count: int, simplices_by_dim: Sequence[Sequence[tuple]]):
        self.vertex_count = vertex_count
        table = []
        for dim, group in enumerate(simplices_by_dim):
            seen = sorted(set(tuple(s) for s in group))
            for s in seen:
                if len(s) != dim + 1 or any(s[i] >= s[i + 1] for i in range(dim)):
                    raise ValueError(f"bad simplex {s} in dimension {dim}")
                if s[0] < 0 or s[-1] >= vertex_count:
                    raise ValueError(f"vertex out of range in {s}")
            table.append(tuple(seen))
        # closure under faces
        for dim in range(len(table) - 1, 0, -1):
            lower = set(table[dim - 1])
            for s in table[dim]:
                for f in combinations(s, dim):
                    if f not in lower:
                        raise ValueError(f"complex not closed: missing face {f} of {s}")
        self._simplices = tuple(table)
        self._index = tuple({s: i for i, s in enumerate(group)} for group in table)
        self._chain_cache = None

    @classmethod
    def from_facets(cls, facets: Iterable[Sequence[int]],
                    vertex_count: int | None = None) -> "SimplicialComplex":
        facets = [tuple(sorted(f)) for f in facets]
        for f in facets:
            if len(set(f)) != len(f):
                raise ValueError(f"degenerate facet {f}")
        if vertex_count is None:
            vertex_count = max((v for f in facets for v in f), default=-1) + 1
        by_dim: list[set] = []
        for f in facets:
            for k in range(1, len(f) + 1):
                while len(by_dim) < k:
                    by_dim.append(set())
                for s in combinations(f, k):
                    by_dim[k - 1].add(s)
        return cls(vertex_count, [sorted(g) for g in by_dim])

    @property
    def dim(self) -> int:
        return len(self._simplices) - 1

    def simplices(self, dim: int) -> tuple[tuple, ...]:
        if 0 <= dim < len(self._simplices):
            return self._simplices[dim]
        return ()

    def index(self, simplex: tuple) -> int:
        return self._index[len(simplex) - 1][tuple(simplex)]

    def has_simplex(self, simplex: tuple) -> bool:
        d = len(simplex) - 1
        return 0 <= d < len(self._simplices) and tuple(simplex) in self._index[d]

    def n_simplices(self, dim: int) -> int:
        return len(self.simplices(dim))

    def chain_complex(self) -> ChainComplex:
        """Ordered simplicial chains with the alternating-sign boundary.
        The complex is built once and memoized on the instance."""
        if self._chain_cache is not None:
            return self._chain_cache
        ranks = [self.n_simplices(d) for d in range(self.dim + 1)]
        boundary = {}
        for d in range(1, self.dim + 1):
            rows, cols = ranks[d - 1], ranks[d]
            m = [[Q(0)] * cols for _ in range(rows)]
            for j, s in enumerate(self.simplices(d)):
                for k in range(d + 1):
                    face = s[:k] + s[k + 1:]
                    m[self.index(face)][j] += Q(-1) ** k
            boundary[d] = RationalMatrix(m, cols=cols)
        out = ChainComplex(0, ranks if ranks else [0], boundary)
        self._chain_cache = out
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.n_simplices(d) for d in range(self.dim + 1))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(other.has_simplex(s)
                   for d in range(self.dim + 1) for s in self.simplices(d))

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex)
                and self.vertex_count == other.vertex_count
                and self._simplices == other._simplices)

    def __repr__(self):
        f = [self.n_simplices(d) for d in range(self.dim + 1)]
        return f"SimplicialComplex(V={self.vertex_count}, f={f})"


@dataclass(frozen=True, eq=False)
class SimplicialPair:
    """An ambient complex with a subcomplex (on the same vertex labels)."""

    ambient: SimplicialComplex
    sub: SimplicialComplex

    def __post_init__(self):
        if not self.sub.is_subcomplex_of(self.ambient):
            raise ValueError("sub is not a subcomplex of ambient")
        object.__setattr__(self, "_pair_cache", None)

    def inclusion_chain_map(self) -> ChainMap:
        a = self.ambient.chain_complex()
        s = self.sub.chain_complex()
        comps = {}
        for d in range(self.sub.dim + 1):
            rows, cols = a.rank(d), s.rank(d)
            m = [[Q(0)] * cols for _ in range(rows)]
            for j, simplex in enumerate(self.sub.simplices(d)):
                m[self.ambient.index(simplex)][j] = Q(1)
            comps[d] = RationalMatrix(m, cols=cols)
        return ChainMap(s, a, comps)

    def pair_data(self) -> PairData:
        cached = getattr(self, "_pair_cache", None)
        if cached is None:
            cached = pair_from_inclusion(self.inclusion_chain_map())
            object.__setattr__(self, "_pair_cache", cached)
        return cached

    def sub_chain_in_ambient(self, v: Sequence, dim: int) -> tuple[Q, ...]:
        incl = self.inclusion_chain_map()
        return incl.apply(dim, v)

    def ambient_chain_to_sub(self, v: Sequence, dim: int) -> tuple[Q, ...]:
        """Re-express an ambient chain supported on sub in sub coordinates."""
        v = vector(v)
        out = [Q(0)] * self.sub.n_simplices(dim)
        for j, simplex in enumerate(self.ambient.simplices(dim)):
            if v[j] != 0:
                if not self.sub.has_simplex(simplex):
                    raise ValueError(f"chain not supported on the subcomplex: {simplex}")
                out[self.sub.index(simplex)] = v[j]
        return tuple(out)


@dataclass(frozen=True)
class Cochain:
    """A rational simplicial cochain, one value per ordered simplex."""

    complex: SimplicialComplex
    degree: int
    values: tuple[Q, ...]

    def __post_init__(self):
        if len(self.values) != self.complex.n_simplices(self.degree):
            raise ValueError("cochain value count mismatch")

    @classmethod
    def from_values(cls, complex_: SimplicialComplex, degree: int, values) -> "Cochain":
        return cls(complex_, degree, vector(values))

    @classmethod
    def unit(cls, complex_: SimplicialComplex) -> "Cochain":
        return cls(complex_, 0, tuple(Q(1) for _ in complex_.simplices(0)))

    def value(self, simplex: tuple) -> Q:
        return self.values[self.complex.index(simplex)]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.complex is not other.complex and self.complex != other.complex:
            raise ValueError("cochain complex mismatch")
        if self.degree != other.degree:
            raise ValueError("cochain degree mismatch")
        return Cochain(self.complex, self.degree,
                       tuple(a + b for a, b in zip(self.values, other.values)))

    def scale(self, t) -> "Cochain":
        t = Q(t)
        return Cochain(self.complex, self.degree, tuple(t * v for v in self.values))


def coboundary(a: Cochain) -> Cochain:
    k = a.complex
    p = a.degree
    out = [Q(0)] * k.n_simplices(p + 1)
    for j, s in enumerate(k.simplices(p + 1)):
        acc = Q(0)
        for i in range(p + 2):
            acc += Q(-1) ** i * a.value(s[:i] + s[i + 1:])
        out[j] = acc
    return Cochain(k, p + 1, tuple(out))


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney front/back product on ordered simplices."""
    if a.complex is not b.complex and a.complex != b.complex:
        raise ValueError("cup product needs cochains on the same complex")
    k = a.complex
    p, q = a.degree, b.degree
    out = [Q(0)] * k.n_simplices(p + q)
    for j, s in enumerate(k.simplices(p + q)):
        out[j] = a.value(s[: p + 1]) * b.value(s[p:])
    return Cochain(k, p + q, tuple(out))


def cap(a: Cochain, c: Sequence, n: int) -> tuple[Q, ...]:
    """Cap an n-chain (coefficient vector over the n-simplices) with a
    degree-p cochain; the result is an (n-p)-chain.  Evaluates a on the back
    face and keeps the front face."""
    k = a.complex
    p = a.degree
    if p > n:
        raise ValueError("cochain degree exceeds chain degree")
    c = vector(c)
    if len(c) != k.n_simplices(n):
        raise ValueError("chain length mismatch")
    out = [Q(0)] * k.n_simplices(n - p)
    for j, s in enumerate(k.simplices(n)):
        if c[j] == 0:
            continue
        out[k.index(s[: n - p + 1])] += c[j] * a.value(s[n - p:])
    return tuple(out)


def simplicial_map(source: SimplicialComplex, target: SimplicialComplex,
                   vertex_map: Sequence[int]) -> ChainMap:
    """Chain map induced by a simplicial vertex map; simplices with repeated
    image vertices contribute zero."""
    vm = tuple(vertex_map)
    if len(vm) != source.vertex_count:
        raise ValueError("vertex map length mismatch")
    for d in range(source.dim + 1):
        for s in source.simplices(d):
            image = tuple(sorted(set(vm[v] for v in s)))
            if not target.has_simplex(image):
                raise ValueError(f"vertex map is not simplicial on {s}")
    cs = source.chain_complex()
    ct = target.chain_complex()
    comps = {}
    for d in range(source.dim + 1):
        rows, cols = ct.rank(d), cs.rank(d)
        m = [[Q(0)] * cols for _ in range(rows)]
        for j, s in enumerate(source.simplices(d)):
            imgs = [vm[v] for v in s]
            if len(set(imgs)) != len(imgs):
                continue
            sign, ordered = _sort_sign(imgs)
            m[target.index(tuple(ordered))][j] += sign
        comps[d] = RationalMatrix(m, cols=cols)
    return ChainMap(cs, ct, comps)


def _sort_sign(values: list[int]) -> tuple[Q, list[int]]:
    sign = 1
    vals = list(values)
    for i in range(len(vals)):
        for j in range(len(vals) - 1 - i):
            if vals[j] > vals[j + 1]:
                vals[j], vals[j + 1] = vals[j + 1], vals[j]
                sign = -sign
    return Q(sign), vals


# --- orientation and fundamental cycles --------------------------------------

def _check_pseudomanifold(k: SimplicialComplex, boundary_ok: bool):
    n = k.dim
    if n < 1:
        raise NotPseudomanifoldError("dimension must be at least 1")
    face_count: dict[tuple, int] = {}
    for s in k.simplices(n):
        for i in range(n + 1):
            f = s[:i] + s[i + 1:]
            face_count[f] = face_count.get(f, 0) + 1
    for f, cnt in face_count.items():
        if cnt > 2 or (cnt == 1 and not boundary_ok):
            raise NotPseudomanifoldError(
                f"face {f} lies in {cnt} top simplices")
    # purity: every simplex is a face of a top simplex
    tops = set()
    for s in k.simplices(n):
        for r in range(1, n + 2):
            tops.update(combinations(s, r))
    for d in range(k.dim + 1):
        for s in k.simplices(d):
            if s not in tops:
                raise NotPseudomanifoldError(f"simplex {s} not contained in a facet")
    return face_count


def _propagate_signs(k: SimplicialComplex, hints: dict | None = None) -> dict[tuple, int]:
    """BFS sign propagation over the dual graph.  Raises on orientation
    conflicts and on disconnected top strata."""
    n = k.dim
    tops = k.simplices(n)
    by_face: dict[tuple, list[tuple[int, int]]] = {}
    for idx, s in enumerate(tops):
        for i in range(n + 1):
            f = s[:i] + s[i + 1:]
            by_face.setdefault(f, []).append((idx, i))
    signs: dict[int, int] = {}
    hints = dict(hints or {})
    start = 0
    start_sign = 1
    if hints:
        first = sorted(hints)[0]
        start = tops.index(tuple(first))
        start_sign = 1 if hints[first] >= 0 else -1
    signs[start] = start_sign
    queue = [start]
    while queue:
        cur = queue.pop(0)
        s = tops[cur]
        for i in range(n + 1):
            f = s[:i] + s[i + 1:]
            for other, j in by_face[f]:
                if other == cur:
                    continue
                # induced orientations on the shared face must cancel
                needed = -signs[cur] * (-1) ** i * (-1) ** j
                if other in signs:
                    if signs[other] != needed:
                        raise NonOrientableError(
                            f"orientation conflict across face {f}")
                else:
                    signs[other] = needed
                    queue.append(other)
    if len(signs) != len(tops):
        raise NotPseudomanifoldError("top-dimensional simplices are not connected")
    return {tops[i]: sg for i, sg in signs.items()}


def fundamental_cycle(k: SimplicialComplex, hints: dict | None = None) -> tuple[Q, ...]:
    """Signed sum of the top simplices of a closed oriented combinatorial
    pseudomanifold; errors when a face count, connectivity, or orientation
    check fails."""
    _check_pseudomanifold(k, boundary_ok=False)
    signs = _propagate_signs(k, hints)
    z = [Q(signs[s]) for s in k.simplices(k.dim)]
    d = k.chain_complex().d(k.dim)
    if not all(e == 0 for e in d.apply(z)):
        raise NonOrientableError("propagated signs do not close up")
    return tuple(z)


def relative_fundamental_cycle(pair: SimplicialPair,
                               hints: dict | None = None) -> tuple[Q, ...]:
    """Signed top-simplex sum of a compact pseudomanifold with boundary in the
    subcomplex; the boundary of the result is supported on the subcomplex."""
    k = pair.ambient
    n = k.dim
    face_count = _check_pseudomanifold(k, boundary_ok=True)
    for f, cnt in face_count.items():
        if cnt == 1 and not pair.sub.has_simplex(f):
            raise NotPseudomanifoldError(
                f"boundary face {f} is not in the subcomplex")
    signs = _propagate_signs(k, hints)
    z = [Q(signs[s]) for s in k.simplices(n)]
    dz = k.chain_complex().d(n).apply(z)
    for j, val in enumerate(dz):
        if val != 0 and not pair.sub.has_simplex(k.simplices(n - 1)[j]):
            raise NonOrientableError("boundary of the relative cycle escapes the subcomplex")
    return tuple(z)


# --- duality verification -----------------------------------------------------

@dataclass(frozen=True)
class PDDegreeCheck:
    degree: int
    dim_cohomology: int
    dim_relative_homology: int
    matrix: RationalMatrix
    is_isomorphism: bool


@dataclass(frozen=True)
class PDReport:
    n: int
    degree_checks: tuple[PDDegreeCheck, ...]
    boundary_report: "PDReport | None"
    holds: bool
    failure_witness: tuple | None  # (degree, kernel vector over H^r basis) if not holds

    def failing_degrees(self) -> list[int]:
        return [c.degree for c in self.degree_checks if not c.is_isomorphism]


def cap_duality_matrix(pair: SimplicialPair, n: int, a: Sequence, r: int,
                       pd: PairData | None = None) -> tuple[RationalMatrix, HomologyBasis, HomologyBasis]:
    """Matrix of - n a : H^r(ambient) -> H_{n-r}(ambient, sub) in canonical bases."""
    k = pair.ambient
    ck = k.chain_complex()
    pd = pd if pd is not None else pair.pair_data()
    hc = cohomology(ck, r)
    hrel = pd.relative_homology[n - r] if n - r in pd.relative_homology else None
    target_dim = hrel.dim if hrel else 0
    cols = []
    for rep in hc.cycle_representatives:
        alpha = Cochain(k, r, tuple(rep))
        chain_result = cap(alpha, a, n)
        rel_coords = pd.quotient_map.apply(n - r, chain_result)
        cols.append(hrel.coords_of_cycle(rel_coords) if hrel else ())
    m = RationalMatrix.from_columns(cols, rows=target_dim) if cols else \
        RationalMatrix.zero(target_dim, 0)
    return m, hc, hrel


def verify_pd_pair(pair: SimplicialPair, n: int, a: Sequence,
                   check_boundary: bool = True) -> PDReport:
    """Check that capping with the class of the relative cycle `a` gives
    isomorphisms H^r(A) -> H_{n-r}(A, B) in every degree, and that the
    connecting image of `a` orients the boundary as an (n-1)-dimensional
    Poincare space."""
    k = pair.ambient
    ck = k.chain_complex()
    a = vector(a)
    if len(a) != ck.rank(n):
        raise ValueError("orientation chain has the wrong length")
    da = ck.d(n).apply(a) if n > 0 else ()
    for j, val in enumerate(da):
        if val != 0 and not pair.sub.has_simplex(k.simplices(n - 1)[j]):
            raise ValueError("orientation chain is not a relative cycle")
    pd = pair.pair_data()
    checks = []
    witness = None
    lo = 0
    hi = max(n, k.dim)
    for r in range(lo, hi + 1):
        if r > n:
            hc = cohomology(ck, r)
            rel_dim = 0
            m = RationalMatrix.zero(0, hc.dim)
            iso = hc.dim == 0
        else:
            m, hc, hrel = cap_duality_matrix(pair, n, a, r, pd)
            rel_dim = hrel.dim if hrel else 0
            from .qlinalg import rank as _rank
            iso = (hc.dim == rel_dim) and (_rank(m) == hc.dim)
        checks.append(PDDegreeCheck(r, hc.dim, rel_dim, m, iso))
        if not iso and witness is None:
            from .qlinalg import kernel_basis as _kb
            kb = _kb(m)
            if kb.dim:
                witness = (r, kb.basis_vectors()[0])
            else:
                witness = (r, None)
    boundary_report = None
    holds = all(c.is_isomorphism for c in checks)
    if check_boundary and pair.sub.n_simplices(0) > 0 and n >= 1:
        sub_boundary = pair.ambient_chain_to_sub(da, n - 1)
        empty = SimplicialComplex(pair.sub.vertex_count, [()])
        boundary_report = verify_pd_pair(SimplicialPair(pair.sub, empty),
                                         n - 1, sub_boundary, check_boundary=False)
        holds = holds and boundary_report.holds
    return PDReport(n, tuple(checks), boundary_report, holds, witness)


# --- simplicial mapping cylinder and cone -------------------------------------

@dataclass(frozen=True)
class CylinderData:
    complex: SimplicialComplex
    target_relabel: tuple[int, ...]      # old target vertex -> cylinder vertex
    source_offset: int                   # source vertex v -> v + source_offset
    apex: int | None                     # set for cones


def _monotone_relabel(source: SimplicialComplex, target: SimplicialComplex,
                      vertex_map: Sequence[int]) -> tuple[int, ...]:
    """A relabeling of the target's vertices making the map order-preserving on
    every simplex, by topologically sorting the order constraints the source
    simplices impose.  Raises if the constraints are cyclic."""
    n = target.vertex_count
    succ: dict[int, set] = {v: set() for v in range(n)}
    indeg = {v: 0 for v in range(n)}
    for d in range(source.dim + 1):
        for s in source.simplices(d):
            for i in range(len(s)):
                for j in range(i + 1, len(s)):
                    u, w = vertex_map[s[i]], vertex_map[s[j]]
                    if u != w and w not in succ[u]:
                        succ[u].add(w)
                        indeg[w] += 1
    import heapq
    ready = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != n:
        raise ValueError("vertex map cannot be made order-preserving (cyclic constraints)")
    relabel = [0] * n
    for pos, v in enumerate(order):
        relabel[v] = pos
    return tuple(relabel)


def simplicial_mapping_cylinder(source: SimplicialComplex, target: SimplicialComplex,
                                vertex_map: Sequence[int]) -> CylinderData:
    """The ordered simplicial mapping cylinder: target vertices first (relabeled
    so the map is monotone), source vertices on top; simplices are
    f(front face of s) + (back face of s) for s in the source, plus the target.

    The construction is validated by comparing its homology with the target's.
    """
    vm = tuple(vertex_map)
    for d in range(source.dim + 1):
        for s in source.simplices(d):
            image = tuple(sorted(set(vm[v] for v in s)))
            if not target.has_simplex(image):
                raise ValueError(f"vertex map is not simplicial on {s}")
    relabel = _monotone_relabel(source, target, vm)
    nt = target.vertex_count
    offset = nt
    facet_list = []
    for d in range(target.dim + 1):
        for s in target.simplices(d):
            facet_list.append(tuple(sorted(relabel[v] for v in s)))
    for d in range(source.dim + 1):
        for s in source.simplices(d):
            for j in range(len(s)):
                front = sorted(set(relabel[vm[v]] for v in s[: j + 1]))
                back = [v + offset for v in s[j:]]
                facet_list.append(tuple(front + back))
    cyl = SimplicialComplex.from_facets(facet_list,
                                        vertex_count=nt + source.vertex_count)
    tb = betti(target.chain_complex())
    cb = betti(cyl.chain_complex())
    for d in set(tb) | set(cb):
        if tb.get(d, 0) != cb.get(d, 0):
            raise AssertionError("cylinder is not quasi-isomorphic to the target")
    return CylinderData(cyl, relabel, offset, None)


def simplicial_mapping_cone(source: SimplicialComplex, target: SimplicialComplex,
                            vertex_map: Sequence[int]) -> CylinderData:
    """Mapping cylinder with a cone attached over the source end."""
    cyl = simplicial_mapping_cylinder(source, target, vertex_map)
    apex = cyl.complex.vertex_count
    facets = []
    for d in range(cyl.complex.dim + 1):
        for s in cyl.complex.simplices(d):
            facets.append(s)
    for d in range(source.dim + 1):
        for s in source.simplices(d):
            facets.append(tuple([v + cyl.source_offset for v in s] + [apex]))
    facets.append((apex,))
    cone = SimplicialComplex.from_facets(facets, vertex_count=apex + 1)
    return CylinderData(cone, cyl.target_relabel, cyl.source_offset, apex)
