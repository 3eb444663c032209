"""Finitely generated chain complexes over Q and the chain-level constructions:
mapping cones and cylinders, algebraic mapping tori, Moore truncations (plain
and equivariant), top-cell attachment, homotopy pushouts, and the long-exact-
sequence bookkeeping of pairs.

Sign conventions, frozen for reproducibility:
  cone(f)_i    = target_i (+) source_{i-1},        d(y, x) = (dy + fx, -dx)
  cyl(f)_i     = target_i (+) source_i (+) source_{i-1},
                                                   d(y, x, a) = (dy + fa, dx - a, -da)
  torus(phi)_i = C_i (+) C_{i-1},                  d(y, x) = (dy + (phi - id)x, -dx)
  pushout(f: A->X, g: A->Y)_i = X_i (+) Y_i (+) A_{i-1},
                                                   d(x, y, a) = (dx + fa, dy - ga, -da)

The homology of cone(f) is the reduced homology of the spatial mapping cone
whenever f is surjective on H_0 (true for every cone this package builds);
reports that need unreduced Betti numbers add the basepoint back at degree 0.

All values are immutable after construction; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Sequence

from .qlinalg import (
    RationalMatrix,
    Subspace,
    block_diagonal,
    image_basis,
    inverse,
    kernel_basis,
    quotient_basis,
    rank,
    solve,
    solve_matrix,
    vector,
)


class ChainComplex:
    """A finitely generated graded Q-complex on degrees [bottom, top].

    Immutable after construction; homology and the dual complex are memoized
    on the instance (recomputation is the only cost of a race)."""

    __slots__ = ("bottom", "top", "_ranks", "_boundary", "_hcache", "_dual")

    def __init__(self, bottom: int, ranks: Sequence[int],
                 boundary: dict[int, RationalMatrix] | None = None):
        self.bottom = bottom
        self.top = bottom + len(ranks) - 1
        self._ranks = tuple(int(r) for r in ranks)
        if any(r < 0 for r in self._ranks):
            raise ValueError("negative rank")
        boundary = dict(boundary or {})
        full: dict[int, RationalMatrix] = {}
        for i in range(bottom + 1, self.top + 1):
            d = boundary.pop(i, None)
            if d is None:
                d = RationalMatrix.zero(self.rank(i - 1), self.rank(i))
            if (d.rows, d.cols) != (self.rank(i - 1), self.rank(i)):
                raise ValueError(
                    f"boundary at degree {i} has shape {d.rows}x{d.cols}, "
                    f"expected {self.rank(i - 1)}x{self.rank(i)}")
            full[i] = d
        if boundary:
            raise ValueError(f"boundary degrees out of range: {sorted(boundary)}")
        self._boundary = full
        for i in range(bottom + 2, self.top + 1):
            if not (full[i - 1] * full[i]).is_zero():
                raise ValueError(f"d o d != 0 at degree {i}")
        self._hcache = {}
        self._dual = None

    def rank(self, i: int) -> int:
        if self.bottom <= i <= self.top:
            return self._ranks[i - self.bottom]
        return 0

    @property
    def ranks(self) -> tuple[int, ...]:
        return self._ranks

    def d(self, i: int) -> RationalMatrix:
        m = self._boundary.get(i)
        if m is None:
            m = RationalMatrix.zero(self.rank(i - 1), self.rank(i))
        return m

    def degrees(self) -> range:
        return range(self.bottom, self.top + 1)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.rank(i) for i in self.degrees())

    def zero_chain(self, i: int) -> tuple[Q, ...]:
        return (Q(0),) * self.rank(i)

    def __eq__(self, other):
        return (isinstance(other, ChainComplex)
                and self.bottom == other.bottom
                and self._ranks == other._ranks
                and all(self.d(i) == other.d(i)
                        for i in range(self.bottom + 1, self.top + 1)))

    def __repr__(self):
        return f"ChainComplex([{self.bottom},{self.top}], ranks={self._ranks})"


def zero_complex(at_degree: int = 0) -> ChainComplex:
    return ChainComplex(at_degree, [0])


def point_complex() -> ChainComplex:
    return ChainComplex(0, [1])


class ChainMap:
    """A degreewise linear map commuting with the boundary operators."""

    __slots__ = ("source", "target", "_components")

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 components: dict[int, RationalMatrix] | None = None,
                 check: bool = True):
        self.source = source
        self.target = target
        comp = dict(components or {})
        full: dict[int, RationalMatrix] = {}
        for i in range(source.bottom, source.top + 1):
            f = comp.pop(i, None)
            if f is None:
                f = RationalMatrix.zero(target.rank(i), source.rank(i))
            if (f.rows, f.cols) != (target.rank(i), source.rank(i)):
                raise ValueError(
                    f"component at degree {i} has shape {f.rows}x{f.cols}, "
                    f"expected {target.rank(i)}x{source.rank(i)}")
            full[i] = f
        for i, f in comp.items():
            if not f.is_zero():
                raise ValueError(f"nonzero component at degree {i} outside source range")
        self._components = full
        if check:
            for i in range(source.bottom + 1, source.top + 1):
                lhs = target.d(i) * self.component(i)
                rhs = self.component(i - 1) * source.d(i)
                if lhs != rhs:
                    raise ValueError(f"not a chain map at degree {i}")

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, {i: RationalMatrix.identity(c.rank(i)) for i in c.degrees()},
                   check=False)

    def component(self, i: int) -> RationalMatrix:
        f = self._components.get(i)
        if f is None:
            f = RationalMatrix.zero(self.target.rank(i), self.source.rank(i))
        return f

    def apply(self, i: int, v: Sequence) -> tuple[Q, ...]:
        return self.component(i).apply(v)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other (other first)."""
        if other.target is not self.source and not (other.target == self.source):
            raise ValueError("composition mismatch")
        comps = {i: self.component(i) * other.component(i)
                 for i in other.source.degrees()}
        return ChainMap(other.source, self.target, comps, check=False)

    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def power(self, n: int) -> "ChainMap":
        out = ChainMap.identity(self.source)
        for _ in range(n):
            out = self.compose(out)
        return out

    def __eq__(self, other):
        return (isinstance(other, ChainMap)
                and self.source == other.source and self.target == other.target
                and all(self.component(i) == other.component(i)
                        for i in self.source.degrees()))

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def direct_sum(complexes: Sequence[ChainComplex]) -> ChainComplex:
    if not complexes:
        return zero_complex()
    bottom = min(c.bottom for c in complexes)
    top = max(c.top for c in complexes)
    ranks = [sum(c.rank(i) for c in complexes) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        boundary[i] = block_diagonal([c.d(i) for c in complexes])
    return ChainComplex(bottom, ranks, boundary)


def direct_sum_maps(maps: Sequence[ChainMap], source: ChainComplex | None = None,
                    target: ChainComplex | None = None) -> ChainMap:
    source = source if source is not None else direct_sum([m.source for m in maps])
    target = target if target is not None else direct_sum([m.target for m in maps])
    comps = {}
    for i in source.degrees():
        comps[i] = block_diagonal([m.component(i) for m in maps])
    return ChainMap(source, target, comps, check=False)


# --- homology ---------------------------------------------------------------

@dataclass(frozen=True)
class HomologyBasis:
    """Canonical homology data at one degree: cycle representatives forming a
    basis of H modulo the boundary subspace."""

    complex: ChainComplex
    degree: int
    cycle_representatives: tuple[tuple[Q, ...], ...]
    boundary_subspace: Subspace
    cycle_subspace: Subspace

    @property
    def dim(self) -> int:
        return len(self.cycle_representatives)

    def coords_of_cycle(self, z: Sequence) -> tuple[Q, ...]:
        """Express a cycle's class in this basis (error if z is not a cycle)."""
        z = vector(z)
        n = self.complex.rank(self.degree)
        if len(z) != n:
            raise ValueError("chain length mismatch")
        d = self.complex.d(self.degree)
        if self.degree > self.complex.bottom and not all(e == 0 for e in d.apply(z)):
            raise ValueError("not a cycle")
        if self.dim == 0 and self.boundary_subspace.dim == 0:
            return ()
        cols = list(self.cycle_representatives) + self.boundary_subspace.basis_vectors()
        m = RationalMatrix.from_columns(cols, rows=n)
        x = solve(m, z)
        if x is None:
            raise ValueError("cycle not in the cycle space (inconsistent input)")
        return tuple(x[: self.dim])

    def coords_of_cycles(self, cycles: RationalMatrix) -> RationalMatrix:
        """Class coordinates of many cycles (as columns) with one elimination."""
        n = self.complex.rank(self.degree)
        if cycles.rows != n:
            raise ValueError("chain length mismatch")
        if self.dim == 0 and self.boundary_subspace.dim == 0:
            if not cycles.is_zero():
                raise ValueError("nonzero cycle in a zero group")
            return RationalMatrix.zero(0, cycles.cols)
        cols = list(self.cycle_representatives) + self.boundary_subspace.basis_vectors()
        m = RationalMatrix.from_columns(cols, rows=n)
        x = solve_matrix(m, cycles)
        if x is None:
            raise ValueError("columns are not cycles of this degree")
        return RationalMatrix(x.entries[: self.dim], cols=cycles.cols)

    def class_is_zero(self, z: Sequence) -> bool:
        return all(c == 0 for c in self.coords_of_cycle(z))


def homology(c: ChainComplex, i: int) -> HomologyBasis:
    """H_i(c) with canonical representatives: the echelon complement of the
    boundary space inside the cycle space."""
    cached = c._hcache.get(i)
    if cached is not None:
        return cached
    n = c.rank(i)
    if n == 0:
        out = HomologyBasis(c, i, (), Subspace.zero(0), Subspace.zero(0))
    else:
        cycles = kernel_basis(c.d(i)) if i > c.bottom else Subspace.full(n)
        boundaries = image_basis(c.d(i + 1)) if i < c.top else Subspace.zero(n)
        reps = quotient_basis(boundaries, cycles)
        out = HomologyBasis(c, i, tuple(reps.basis_vectors()), boundaries, cycles)
    c._hcache[i] = out
    return out


def betti(c: ChainComplex) -> dict[int, int]:
    return {i: homology(c, i).dim for i in c.degrees()}


def induced_map(f: ChainMap, i: int,
                source_h: HomologyBasis | None = None,
                target_h: HomologyBasis | None = None) -> RationalMatrix:
    """Matrix of H_i(f) in the canonical homology bases."""
    hs = source_h if source_h is not None else homology(f.source, i)
    ht = target_h if target_h is not None else homology(f.target, i)
    if hs.dim == 0:
        return RationalMatrix.zero(ht.dim, 0)
    images = f.component(i) * RationalMatrix.from_columns(
        list(hs.cycle_representatives), rows=f.source.rank(i))
    return ht.coords_of_cycles(images)


def dualize(c: ChainComplex) -> ChainComplex:
    """The cochain complex as a ChainComplex under i -> -i: degree -i holds the
    dual of C_i, and the boundary is the transposed coboundary."""
    if c._dual is not None:
        return c._dual
    bottom = -c.top
    ranks = [c.rank(-j) for j in range(bottom, -c.bottom + 1)]
    boundary = {}
    for j in range(bottom + 1, -c.bottom + 1):
        boundary[j] = c.d(-j + 1).transpose()
    out = ChainComplex(bottom, ranks, boundary)
    c._dual = out
    return out


def cohomology(c: ChainComplex, i: int) -> HomologyBasis:
    """H^i(c); representatives are cocycle vectors in the dual basis of C_i."""
    return homology(dualize(c), -i)


# --- pairs and the long exact sequence ---------------------------------------

@dataclass(frozen=True)
class PairData:
    """A subcomplex inclusion with its quotient complex and connecting maps.

    `connecting[i]` is the matrix of the zig-zag map H_i(relative) ->
    H_{i-1}(sub) in the canonical homology bases; `lift[i]` embeds relative
    coordinates back into the ambient complex.
    """

    inclusion: ChainMap
    relative_complex: ChainComplex
    quotient_map: ChainMap
    lift: dict[int, RationalMatrix]
    connecting: dict[int, RationalMatrix]
    sub_homology: dict[int, HomologyBasis]
    ambient_homology: dict[int, HomologyBasis]
    relative_homology: dict[int, HomologyBasis]

    @property
    def sub(self) -> ChainComplex:
        return self.inclusion.source

    @property
    def ambient(self) -> ChainComplex:
        return self.inclusion.target

    def verify_les(self) -> bool:
        """Exactness of ... -> H_i(sub) -> H_i(amb) -> H_i(rel) -> H_{i-1}(sub) -> ...
        checked slot by slot: composites vanish and ranks fill each kernel."""
        lo = min(self.ambient.bottom, self.sub.bottom)
        hi = max(self.ambient.top, self.sub.top) + 1
        for i in range(lo, hi + 1):
            hi_s = self.sub_homology.get(i)
            hi_a = self.ambient_homology.get(i)
            hi_r = self.relative_homology.get(i)
            ds, da, dr = (h.dim if h else 0 for h in (hi_s, hi_a, hi_r))
            mi = induced_map(self.inclusion, i) if ds or da else RationalMatrix.zero(da, ds)
            mq = induced_map(self.quotient_map, i) if da or dr else RationalMatrix.zero(dr, da)
            mc = self.connecting.get(i, RationalMatrix.zero(
                self.sub_homology[i - 1].dim if i - 1 in self.sub_homology else 0, dr))
            prev_c = self.connecting.get(i + 1, None)
            rank_prev_c = rank(prev_c) if prev_c is not None else 0
            # exact at H_i(sub): im(connecting_{i+1}) = ker(H_i(incl))
            if not (rank_prev_c + rank(mi) == ds and _composite_zero(mi, prev_c)):
                return False
            # exact at H_i(amb): im(H_i(incl)) = ker(H_i(quot))
            if not (rank(mi) + rank(mq) == da and _composite_zero(mq, mi)):
                return False
            # exact at H_i(rel): im(H_i(quot)) = ker(connecting_i)
            if not (rank(mq) + rank(mc) == dr and _composite_zero(mc, mq)):
                return False
        return True


def _composite_zero(second: RationalMatrix, first: RationalMatrix | None) -> bool:
    if first is None or first.cols == 0 or second.rows == 0:
        return True
    return (second * first).is_zero()


def _unit_columns(cols) -> bool:
    """True when every column is a standard basis vector (then the assembled
    square matrix is a permutation and inverts by transposition)."""
    seen = set()
    for c in cols:
        pos = None
        for idx, e in enumerate(c):
            if e == 0:
                continue
            if e != 1 or pos is not None:
                return False
            pos = idx
        if pos is None or pos in seen:
            return False
        seen.add(pos)
    return True


def pair_from_inclusion(incl: ChainMap) -> PairData:
    """Quotient complex, boundary connecting maps, and homology data for a
    degreewise-injective chain map."""
    s, a = incl.source, incl.target
    if all(s.rank(i) == 0 for i in s.degrees()):
        # trivial subcomplex: the relative complex is the ambient one
        bottom, top = min(s.bottom, a.bottom), max(s.top, a.top)
        ident = {i: RationalMatrix.identity(a.rank(i)) for i in a.degrees()}
        qmap = ChainMap(a, a, ident, check=False)
        sub_h = {i: homology(s, i) for i in range(bottom - 1, top + 1)}
        amb_h = {i: homology(a, i) for i in range(bottom - 1, top + 2)}
        connecting = {i: RationalMatrix.zero(0, amb_h[i].dim if i in amb_h else 0)
                      for i in range(bottom, top + 2)}
        return PairData(incl, a, qmap, dict(ident), connecting, sub_h, amb_h,
                        dict(amb_h))
    bottom = min(s.bottom, a.bottom)
    top = max(s.top, a.top)
    lifts: dict[int, RationalMatrix] = {}
    proj: dict[int, RationalMatrix] = {}
    rel_ranks = []
    for i in range(bottom, top + 1):
        fi = incl.component(i)
        if rank(fi) != s.rank(i):
            raise ValueError(f"inclusion not injective at degree {i}")
        u = image_basis(fi)
        w = quotient_basis(u, Subspace.full(a.rank(i)))
        lifts[i] = w.basis if w.dim else RationalMatrix.zero(a.rank(i), 0)
        # projection onto W-coordinates along U: the last block of [U | W]^{-1}
        cols = u.basis_vectors() + w.basis_vectors()
        if not cols:
            proj[i] = RationalMatrix.zero(0, 0)
        elif _unit_columns(cols):
            # inclusion-style basis: the inverse is the transpose
            m = RationalMatrix.from_columns(cols, rows=a.rank(i)).transpose()
            proj[i] = RationalMatrix(m.entries[u.dim:], cols=a.rank(i))
        else:
            inv = inverse(RationalMatrix.from_columns(cols, rows=a.rank(i)))
            proj[i] = RationalMatrix(inv.entries[u.dim:], cols=a.rank(i))
        rel_ranks.append(w.dim)
    rel_boundary = {}
    for i in range(bottom + 1, top + 1):
        rel_boundary[i] = proj[i - 1] * (a.d(i) * lifts[i])
    rel = ChainComplex(bottom, rel_ranks, rel_boundary)
    qmap = ChainMap(a, rel, {i: proj[i] for i in range(bottom, top + 1)}, check=False)

    sub_h = {i: homology(s, i) for i in range(bottom - 1, top + 1)}
    amb_h = {i: homology(a, i) for i in range(bottom - 1, top + 1)}
    rel_h = {i: homology(rel, i) for i in range(bottom - 1, top + 2)}
    connecting: dict[int, RationalMatrix] = {}
    for i in range(bottom, top + 2):
        hr = rel_h.get(i)
        hs = sub_h.get(i - 1)
        tr = hr.dim if hr else 0
        ts = hs.dim if hs else 0
        if not hr or tr == 0:
            connecting[i] = RationalMatrix.zero(ts, tr)
            continue
        reps = RationalMatrix.from_columns(list(hr.cycle_representatives),
                                           rows=rel.rank(i))
        lifted = (lifts[i] * reps) if i in lifts else RationalMatrix.zero(a.rank(i), tr)
        das = a.d(i) * lifted
        zs = solve_matrix(incl.component(i - 1), das)
        if zs is None:
            raise ValueError("relative cycle boundary escaped the subcomplex")
        connecting[i] = hs.coords_of_cycles(zs) if hs else RationalMatrix.zero(0, tr)
    return PairData(incl, rel, qmap, lifts, connecting, sub_h, amb_h, rel_h)


# --- constructions ------------------------------------------------------------

def mapping_cone(f: ChainMap) -> tuple[ChainComplex, PairData]:
    """cone(f) with the pair (cone, target); d(y, x) = (dy + fx, -dx)."""
    s, t = f.source, f.target
    bottom = min(t.bottom, s.bottom + 1)
    top = max(t.top, s.top + 1)
    ranks = [t.rank(i) + s.rank(i - 1) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        rt, rs = t.rank(i), s.rank(i - 1)
        rows = t.rank(i - 1) + s.rank(i - 2)
        m = [[Q(0)] * (rt + rs) for _ in range(rows)]
        dt = t.d(i)
        for r in range(dt.rows):
            for c in range(dt.cols):
                m[r][c] = dt[r, c]
        fc = f.component(i - 1)
        for r in range(fc.rows):
            for c in range(fc.cols):
                m[r][rt + c] = fc[r, c]
        ds = s.d(i - 1)
        for r in range(ds.rows):
            for c in range(ds.cols):
                m[t.rank(i - 1) + r][rt + c] = -ds[r, c]
        boundary[i] = RationalMatrix(m, cols=rt + rs)
    cone = ChainComplex(bottom, ranks, boundary)
    incl = ChainMap(t, cone, {
        i: RationalMatrix([[Q(1) if r == c else Q(0) for c in range(t.rank(i))]
                           for r in range(cone.rank(i))], cols=t.rank(i))
        for i in t.degrees()}, check=False)
    return cone, pair_from_inclusion(incl)


def augmented_mapping_cone(f: ChainMap) -> tuple[ChainComplex, PairData]:
    """The mapping cone including its cone point: one extra degree-0 generator
    p, with each shifted source 0-generator v carrying d(v) = f(v) - p.

    Unlike `mapping_cone`, whose homology is the reduced homology of the cone
    space, this complex computes unreduced homology, so pairs built on it have
    the honest long exact sequences in low degrees."""
    s, t = f.source, f.target
    bottom = min(t.bottom, s.bottom + 1, 0)
    top = max(t.top, s.top + 1, 0)

    def rank_at(i):
        return t.rank(i) + s.rank(i - 1) + (1 if i == 0 else 0)

    ranks = [rank_at(i) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        rt, rs = t.rank(i), s.rank(i - 1)
        rows = rank_at(i - 1)
        m = [[Q(0)] * (rt + rs) for _ in range(rows)]
        dt = t.d(i)
        for r in range(dt.rows):
            for c in range(dt.cols):
                m[r][c] = dt[r, c]
        fc = f.component(i - 1)
        for r in range(fc.rows):
            for c in range(fc.cols):
                m[r][rt + c] = fc[r, c]
        ds = s.d(i - 1)
        for r in range(ds.rows):
            for c in range(ds.cols):
                m[t.rank(i - 1) + r][rt + c] = -ds[r, c]
        if i == 1:
            pt_row = t.rank(0) + s.rank(-1)
            for c in range(rs):
                m[pt_row][rt + c] = Q(-1)
        boundary[i] = RationalMatrix(m, cols=rt + rs)
    cone = ChainComplex(bottom, ranks, boundary)
    incl = ChainMap(t, cone, {
        i: RationalMatrix([[Q(1) if r == c else Q(0) for c in range(t.rank(i))]
                           for r in range(cone.rank(i))], cols=t.rank(i))
        for i in t.degrees()}, check=False)
    return cone, pair_from_inclusion(incl)


def cone_source_shift_inclusion(f: ChainMap, cone: ChainComplex) -> dict[int, RationalMatrix]:
    """Embedding of source_{i-1} as the second block of cone_i (not a chain map;
    used for assembling chains by block)."""
    out = {}
    t = f.target
    for i in cone.degrees():
        rt, rs = t.rank(i), f.source.rank(i - 1)
        m = [[Q(0)] * rs for _ in range(cone.rank(i))]
        for c in range(rs):
            m[rt + c][c] = Q(1)
        out[i] = RationalMatrix(m, cols=rs)
    return out


def mapping_cylinder(f: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """cyl(f) with the source and target inclusions; the target inclusion is a
    quasi-isomorphism (checked by the caller's tests, not assumed here)."""
    s, t = f.source, f.target
    bottom = min(t.bottom, s.bottom)
    top = max(t.top, s.top + 1)
    ranks = [t.rank(i) + s.rank(i) + s.rank(i - 1) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        rt, rs, ra = t.rank(i), s.rank(i), s.rank(i - 1)
        rows_t, rows_s, rows_a = t.rank(i - 1), s.rank(i - 1), s.rank(i - 2)
        m = [[Q(0)] * (rt + rs + ra) for _ in range(rows_t + rows_s + rows_a)]
        dt, ds, da = t.d(i), s.d(i), s.d(i - 1)
        for r in range(rows_t):
            for c in range(rt):
                m[r][c] = dt[r, c]
        fc = f.component(i - 1)
        for r in range(rows_t):
            for c in range(ra):
                m[r][rt + rs + c] = fc[r, c]
        for r in range(rows_s):
            for c in range(rs):
                m[rows_t + r][rt + c] = ds[r, c]
        for c in range(ra):
            m[rows_t + c][rt + rs + c] = Q(-1)
        for r in range(rows_a):
            for c in range(ra):
                m[rows_t + rows_s + r][rt + rs + c] = -da[r, c]
        boundary[i] = RationalMatrix(m, cols=rt + rs + ra)
    cyl = ChainComplex(bottom, ranks, boundary)

    def embed(block_offset, src):
        comps = {}
        for i in src.degrees():
            m = [[Q(0)] * src.rank(i) for _ in range(cyl.rank(i))]
            off = block_offset(i)
            for c in range(src.rank(i)):
                m[off + c][c] = Q(1)
            comps[i] = RationalMatrix(m, cols=src.rank(i))
        return comps

    incl_target = ChainMap(t, cyl, embed(lambda i: 0, t), check=False)
    incl_source = ChainMap(s, cyl, embed(lambda i: t.rank(i), s), check=False)
    return cyl, incl_source, incl_target


def algebraic_mapping_torus(phi: ChainMap) -> ChainComplex:
    """Mapping torus of an endomorphism: the cone of (phi - id) on C, modeling
    the flat bundle over the circle with monodromy phi."""
    if not phi.is_endomorphism():
        raise ValueError("mapping torus needs an endomorphism")
    c = phi.source
    diff = ChainMap(c, c, {
        i: phi.component(i) - RationalMatrix.identity(c.rank(i))
        for i in c.degrees()}, check=False)
    torus, _ = mapping_cone(diff)
    return torus


def verify_wang_ranks(phi: ChainMap, torus: ChainComplex) -> bool:
    """dim H_i(torus) = dim coker(H_i(phi) - id) + dim ker(H_{i-1}(phi) - id)."""
    c = phi.source
    hs = {i: homology(c, i) for i in range(c.bottom, c.top + 1)}
    for i in range(torus.bottom, torus.top + 1):
        expected = 0
        if i in hs:
            m = induced_map(phi, i, hs[i], hs[i])
            m = m - RationalMatrix.identity(hs[i].dim)
            expected += hs[i].dim - rank(m)
        if i - 1 in hs:
            m = induced_map(phi, i - 1, hs[i - 1], hs[i - 1])
            m = m - RationalMatrix.identity(hs[i - 1].dim)
            expected += kernel_basis(m).dim
        if homology(torus, i).dim != expected:
            return False
    return True


def moore_truncation(c: ChainComplex, r: int) -> tuple[ChainComplex, ChainMap]:
    """Chain-level homology truncation: below degree r nothing changes, degree r
    is replaced by the canonical echelon complement W of the cycle space, and
    everything above is zero.  The inclusion induces isomorphisms on H_i for
    i < r, and H_i of the result vanishes for i >= r; both facts are asserted
    after construction.
    """
    if r < 1:
        raise ValueError("truncation degree must be >= 1")
    w = _cycle_complement(c, r)
    return _assemble_truncation(c, r, w)


def equivariant_moore_truncation(c: ChainComplex, phi: ChainMap, order: int,
                                 r: int) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Moore truncation whose degree-r complement is invariant under the
    finite-order automorphism phi, obtained by averaging the projection onto
    the echelon complement over the phi-orbit (Maschke over Q)."""
    if r < 1:
        raise ValueError("truncation degree must be >= 1")
    if not phi.is_endomorphism() or not (phi.source == c):
        raise ValueError("phi must be an endomorphism of c")
    if order < 1 or not (phi.power(order) == ChainMap.identity(c)):
        raise ValueError(f"phi does not have order dividing {order}")
    w0 = _cycle_complement(c, r)
    n = c.rank(r)
    if w0.dim and n:
        cycles = kernel_basis(c.d(r)) if r > c.bottom else Subspace.full(n)
        # projector onto W0 along the cycle space: W0 . (tail block of [Z|W0]^{-1})
        cols = cycles.basis_vectors() + w0.basis_vectors()
        inv = inverse(RationalMatrix.from_columns(cols, rows=n))
        tail = RationalMatrix(inv.entries[cycles.dim:], cols=n)
        pi0 = w0.basis * tail
        # average phi^{-j} o pi0 o phi^j over the orbit; phi^{-j} = phi^{order-j}
        powers = [RationalMatrix.identity(n)]
        for _ in range(order):
            powers.append(phi.component(r) * powers[-1])
        avg = RationalMatrix.zero(n, n)
        for j in range(order):
            avg = avg + powers[order - j] * (pi0 * powers[j])
        avg = avg.scale(Q(1, order))
        w = image_basis(avg)
    else:
        w = w0
    trunc, incl = _assemble_truncation(c, r, w)
    # restrict phi to the truncation
    comps = {}
    for i in trunc.degrees():
        if i < r:
            comps[i] = phi.component(i)
        else:
            cols = []
            for bvec in w.basis_vectors():
                img = phi.component(r).apply(bvec)
                coords = w.coords(img)
                if coords is None:
                    raise ValueError("averaged complement is not phi-invariant")
                cols.append(coords)
            comps[i] = RationalMatrix.from_columns(cols, rows=w.dim) if cols else \
                RationalMatrix.zero(0, 0)
    phi_trunc = ChainMap(trunc, trunc, comps)
    if not (phi_trunc.power(order) == ChainMap.identity(trunc)):
        raise AssertionError("restricted automorphism lost its order")
    return trunc, incl, phi_trunc


def _cycle_complement(c: ChainComplex, r: int) -> Subspace:
    n = c.rank(r)
    if n == 0:
        return Subspace.zero(0)
    cycles = kernel_basis(c.d(r)) if r > c.bottom else Subspace.full(n)
    return quotient_basis(cycles, Subspace.full(n))


def _assemble_truncation(c: ChainComplex, r: int,
                         w: Subspace) -> tuple[ChainComplex, ChainMap]:
    bottom = c.bottom
    if r > c.top:
        # above the complex: nothing to cut, f_< is the identity
        trunc, incl = c, ChainMap.identity(c)
    elif r <= c.bottom:
        # nothing below r survives except the degree-r complement
        trunc = ChainComplex(r, [w.dim])
        incl = ChainMap(trunc, c, {r: w.basis if w.dim else
                                   RationalMatrix.zero(c.rank(r), 0)}, check=False)
    else:
        ranks = [c.rank(i) for i in range(bottom, r)] + [w.dim]
        boundary = {i: c.d(i) for i in range(bottom + 1, r)}
        if w.dim:
            boundary[r] = c.d(r) * w.basis
        trunc = ChainComplex(bottom, ranks, boundary)
        comps = {i: RationalMatrix.identity(c.rank(i)) for i in range(bottom, r)}
        comps[r] = w.basis if w.dim else RationalMatrix.zero(c.rank(r), 0)
        incl = ChainMap(trunc, c, comps, check=False)
    _assert_moore(c, trunc, incl, r)
    return trunc, incl


def _assert_moore(c: ChainComplex, trunc: ChainComplex, incl: ChainMap, r: int):
    for i in range(min(c.bottom, trunc.bottom), max(c.top, trunc.top) + 1):
        hs = homology(trunc, i)
        if i >= r:
            if hs.dim != 0:
                raise AssertionError(f"truncation has homology in degree {i} >= {r}")
        else:
            ht = homology(c, i)
            m = induced_map(incl, i, hs, ht)
            if not (hs.dim == ht.dim and rank(m) == ht.dim):
                raise AssertionError(f"truncation not an H-isomorphism in degree {i}")


def is_moore_approximation(f: ChainMap, r: int) -> bool:
    """Does f: L_< -> L induce isos on H_i for i < r with H_i(L_<) = 0 for i >= r?"""
    lo = min(f.source.bottom, f.target.bottom)
    hi = max(f.source.top, f.target.top)
    for i in range(lo, hi + 1):
        hs = homology(f.source, i)
        if i >= r:
            if hs.dim != 0:
                return False
        else:
            ht = homology(f.target, i)
            if hs.dim != ht.dim or rank(induced_map(f, i, hs, ht)) != ht.dim:
                return False
    return True


def attach_top_cell(c: ChainComplex, z: Sequence, n: int) -> tuple[ChainComplex, PairData]:
    """Attach one generator e in degree n with d(e) = z, where z is a cycle in
    degree n-1.  The relative homology of (result, c) is Q concentrated in
    degree n."""
    z = vector(z)
    if len(z) != c.rank(n - 1):
        raise ValueError("attaching chain has the wrong length")
    if n - 1 > c.bottom and not all(e == 0 for e in c.d(n - 1).apply(z)):
        raise ValueError("attaching chain is not a cycle")
    bottom = min(c.bottom, n)
    top = max(c.top, n)
    ranks = [c.rank(i) + (1 if i == n else 0) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        d = c.d(i)
        if i == n:
            extra = RationalMatrix.from_columns([z], rows=c.rank(n - 1))
            d = d.hstack(extra)
        elif i == n + 1:
            # d_{n+1} gains a zero row for the new degree-n generator
            d = RationalMatrix(list(d.entries) + [[Q(0)] * c.rank(i)], cols=c.rank(i))
        boundary[i] = d
    out = ChainComplex(bottom, ranks, boundary)
    incl = ChainMap(c, out, {
        i: RationalMatrix([[Q(1) if r == cc else Q(0) for cc in range(c.rank(i))]
                           for r in range(out.rank(i))], cols=c.rank(i))
        for i in c.degrees()}, check=False)
    pair = pair_from_inclusion(incl)
    if homology(pair.relative_complex, n).dim != 1:
        raise AssertionError("relative homology of a single-cell attachment must be Q")
    return out, pair


def connecting_image_membership(pair: PairData, n: int, c: Sequence
                                ) -> tuple[bool, tuple[Q, ...] | None]:
    """Is the class c (coordinates in the canonical basis of H_{n-1}(sub)) in
    the image of the connecting map H_n(relative) -> H_{n-1}(sub)?  Returns the
    preimage witness on success."""
    hs = pair.sub_homology.get(n - 1)
    if hs is None:
        raise ValueError(f"degree {n} out of range for this pair")
    c = vector(c)
    if len(c) != hs.dim:
        raise ValueError("class coordinate length mismatch")
    m = pair.connecting.get(n)
    if m is None:
        m = RationalMatrix.zero(hs.dim, 0)
    x = solve(m, c)
    return (x is not None), x


def homotopy_pushout(f: ChainMap, g: ChainMap
                     ) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Homotopy pushout of X <-f- A -g-> Y: degree i part X_i + Y_i + A_{i-1},
    d(x, y, a) = (dx + fa, dy - ga, -da).  Returns (P, incl_X, incl_Y)."""
    if not (f.source == g.source):
        raise ValueError("pushout needs a common source")
    a, x, y = f.source, f.target, g.target
    bottom = min(x.bottom, y.bottom, a.bottom)
    top = max(x.top, y.top, a.top + 1)
    ranks = [x.rank(i) + y.rank(i) + a.rank(i - 1) for i in range(bottom, top + 1)]
    boundary = {}
    for i in range(bottom + 1, top + 1):
        rx, ry, ra = x.rank(i), y.rank(i), a.rank(i - 1)
        rows_x, rows_y, rows_a = x.rank(i - 1), y.rank(i - 1), a.rank(i - 2)
        m = [[Q(0)] * (rx + ry + ra) for _ in range(rows_x + rows_y + rows_a)]
        dx, dy, da = x.d(i), y.d(i), a.d(i - 1)
        for r in range(rows_x):
            for cc in range(rx):
                m[r][cc] = dx[r, cc]
        fc = f.component(i - 1)
        for r in range(rows_x):
            for cc in range(ra):
                m[r][rx + ry + cc] = fc[r, cc]
        for r in range(rows_y):
            for cc in range(ry):
                m[rows_x + r][rx + cc] = dy[r, cc]
        gc = g.component(i - 1)
        for r in range(rows_y):
            for cc in range(ra):
                m[rows_x + r][rx + ry + cc] = -gc[r, cc]
        for r in range(rows_a):
            for cc in range(ra):
                m[rows_x + rows_y + r][rx + ry + cc] = -da[r, cc]
        boundary[i] = RationalMatrix(m, cols=rx + ry + ra)
    p = ChainComplex(bottom, ranks, boundary)

    def embed(offset_fn, src):
        comps = {}
        for i in src.degrees():
            m = [[Q(0)] * src.rank(i) for _ in range(p.rank(i))]
            off = offset_fn(i)
            for cc in range(src.rank(i)):
                m[off + cc][cc] = Q(1)
            comps[i] = RationalMatrix(m, cols=src.rank(i))
        return comps

    incl_x = ChainMap(x, p, embed(lambda i: 0, x), check=False)
    incl_y = ChainMap(y, p, embed(lambda i: x.rank(i), y), check=False)
    return p, incl_x, incl_y


def verify_mayer_vietoris_ranks(f: ChainMap, g: ChainMap, p: ChainComplex) -> bool:
    """dim H_i(P) = dim coker(H_i(A)->H_i(X)+H_i(Y)) + dim ker at i-1."""
    a = f.source
    lo, hi = p.bottom, p.top

    def pair_map(i):
        ha = homology(a, i)
        hx = homology(f.target, i)
        hy = homology(g.target, i)
        mf = induced_map(f, i, ha, hx)
        mg = induced_map(g, i, ha, hy)
        rows = list(mf.entries) + list(mg.entries)
        return RationalMatrix(rows) if rows else RationalMatrix.zero(0, ha.dim), \
            ha.dim, hx.dim + hy.dim

    for i in range(lo, hi + 1):
        m, da, dxy = pair_map(i)
        expected = dxy - rank(m)
        m2, da2, _ = pair_map(i - 1)
        expected += da2 - rank(m2)
        if homology(p, i).dim != expected:
            return False
    return True
