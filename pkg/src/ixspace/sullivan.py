"""Free graded-commutative algebras, finite commutative cochain algebras, the
inductive minimal-model algorithm, and the wordlength-projection criterion
that detects rational Hurewicz surjectivity.

Monomials are sorted tuples of generator indices with Koszul signs; odd
generators square to zero, even generators may repeat.  Everything is
truncated at an explicit certification degree: all claims made by the
certificates below are per-degree statements verified inside that bound.

Choice rules are fixed so runs are reproducible: new-generator targets are the
echelon complement of the image, kernel generators are the echelon kernel
basis, and preimages are the first solution of the linear system with free
variables set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import lru_cache
from typing import Callable, Sequence

from .qlinalg import (
    RationalMatrix,
    Subspace,
    image_basis,
    kernel_basis,
    quotient_basis,
    rank,
    solve,
    vector,
)

Polynomial = dict  # monomial tuple -> Fraction


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, Q(0)) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_scale(a: Polynomial, t) -> Polynomial:
    t = Q(t)
    if t == 0:
        return {}
    return {m: t * c for m, c in a.items()}


def poly_is_zero(a: Polynomial) -> bool:
    return all(c == 0 for c in a.values())


class GradedVectorSpace:
    """Positively graded vector space with named basis elements."""

    __slots__ = ("names",)

    def __init__(self, names_by_degree: dict[int, Sequence[str]]):
        table = {}
        for deg, names in sorted(names_by_degree.items()):
            if deg < 1:
                raise ValueError("degrees must be >= 1")
            if names:
                table[deg] = tuple(names)
        self.names = table

    def dim(self, degree: int) -> int:
        return len(self.names.get(degree, ()))

    def degrees(self) -> list[int]:
        return sorted(self.names)


class FreeCGA:
    """A free graded-commutative algebra with a derivational differential,
    certified up to `cap`."""

    def __init__(self, generators: Sequence[tuple[str, int]],
                 differentials: Sequence[Polynomial], cap: int,
                 check: bool = True, formal: bool = False):
        self.generators = tuple((str(n), int(d)) for n, d in generators)
        if any(d < 1 for _, d in self.generators):
            raise ValueError("generator degrees must be >= 1")
        if len(set(n for n, _ in self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")
        self.cap = int(cap)
        self.formal = formal
        self.d_polys = tuple(dict(p) for p in differentials)
        if len(self.d_polys) != len(self.generators):
            raise ValueError("one differential per generator required")
        self._mono_cache: dict[int, tuple[tuple, ...]] = {}
        self._mono_index: dict[int, dict] = {}
        self._coh_cache: dict[int, "AlgebraCohomology"] = {}
        if check:
            for g, p in enumerate(self.d_polys):
                deg = self.generators[g][1] + 1
                for m, _ in p.items():
                    if self.monomial_degree(m) != deg:
                        raise ValueError(
                            f"d({self.generators[g][0]}) is not homogeneous of degree {deg}")
            for g in range(len(self.generators)):
                if not poly_is_zero(self.d(self.d_polys[g])):
                    raise ValueError(
                        f"d^2 != 0 on generator {self.generators[g][0]}")

    # --- structure ----------------------------------------------------------

    def degree_of(self, gen: int) -> int:
        return self.generators[gen][1]

    def gen_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.generators):
            if n == name:
                return i
        raise KeyError(name)

    def monomial_degree(self, m: tuple) -> int:
        return sum(self.degree_of(g) for g in m)

    def generator_indices(self, degree: int) -> list[int]:
        return [i for i, (_, d) in enumerate(self.generators) if d == degree]

    def monomials(self, degree: int) -> tuple[tuple, ...]:
        cached = self._mono_cache.get(degree)
        if cached is not None:
            return cached
        out: list[tuple] = []
        gens = self.generators

        def rec(start: int, remaining: int, acc: list):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for g in range(start, len(gens)):
                dg = gens[g][1]
                if dg > remaining:
                    continue
                if dg % 2 == 1 and acc and acc[-1] == g:
                    continue
                acc.append(g)
                rec(g, remaining - dg, acc)
                acc.pop()

        if degree == 0:
            out.append(())
        elif degree > 0:
            rec(0, degree, [])
        result = tuple(sorted(out))
        self._mono_cache[degree] = result
        self._mono_index[degree] = {m: i for i, m in enumerate(result)}
        return result

    def monomial_index(self, m: tuple) -> int:
        deg = self.monomial_degree(m)
        self.monomials(deg)
        return self._mono_index[deg][m]

    def mono_mul(self, m1: tuple, m2: tuple) -> tuple[Q, tuple] | None:
        """Product of two sorted monomials: (sign, merged) or None if an odd
        generator repeats."""
        sign = 1
        merged = []
        i, j = 0, 0
        odd_left = [g for g in m1 if self.degree_of(g) % 2 == 1]
        # merge, counting odd-over-odd transpositions
        remaining_odd = len(odd_left)
        oi = 0
        while i < len(m1) and j < len(m2):
            if m1[i] <= m2[j]:
                g = m1[i]
                i += 1
                if self.degree_of(g) % 2 == 1:
                    oi += 1
                merged.append(g)
            else:
                g = m2[j]
                j += 1
                if self.degree_of(g) % 2 == 1:
                    jumps = remaining_odd - oi
                    if jumps % 2 == 1:
                        sign = -sign
                merged.append(g)
        merged.extend(m1[i:])
        merged.extend(m2[j:])
        for k in range(len(merged) - 1):
            if merged[k] == merged[k + 1] and self.degree_of(merged[k]) % 2 == 1:
                return None
        return Q(sign), tuple(merged)

    def mul(self, a: Polynomial, b: Polynomial) -> Polynomial:
        out: Polynomial = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                r = self.mono_mul(m1, m2)
                if r is None:
                    continue
                s, m = r
                v = out.get(m, Q(0)) + s * c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def generator_poly(self, gen: int) -> Polynomial:
        return {(gen,): Q(1)}

    def d(self, a: Polynomial) -> Polynomial:
        out: Polynomial = {}
        for m, c in a.items():
            sign = Q(1)
            for t, g in enumerate(m):
                prefix = {m[:t]: sign}
                suffix = {m[t + 1:]: Q(1)}
                term = self.mul(self.mul(prefix, self.d_polys[g]), suffix)
                out = poly_add(out, poly_scale(term, c))
                if self.degree_of(g) % 2 == 1:
                    sign = -sign
        return out

    # --- linear algebra per degree -------------------------------------------

    def poly_to_vector(self, a: Polynomial, degree: int) -> tuple[Q, ...]:
        monos = self.monomials(degree)
        out = [Q(0)] * len(monos)
        for m, c in a.items():
            if c == 0:
                continue
            if self.monomial_degree(m) != degree:
                raise ValueError("polynomial is not homogeneous of the stated degree")
            out[self._mono_index[degree][m]] = c
        return tuple(out)

    def vector_to_poly(self, v: Sequence, degree: int) -> Polynomial:
        monos = self.monomials(degree)
        return {m: Q(c) for m, c in zip(monos, vector(v)) if c != 0}

    def d_matrix(self, degree: int) -> RationalMatrix:
        src = self.monomials(degree)
        dst = self.monomials(degree + 1)
        cols = []
        for m in src:
            dm = self.d({m: Q(1)})
            cols.append(self.poly_to_vector(dm, degree + 1))
        return RationalMatrix.from_columns(cols, rows=len(dst)) if cols else \
            RationalMatrix.zero(len(dst), 0)

    def cohomology(self, degree: int) -> "AlgebraCohomology":
        cached = self._coh_cache.get(degree)
        if cached is not None:
            return cached
        n = len(self.monomials(degree))
        cocycles = kernel_basis(self.d_matrix(degree)) if n else Subspace.zero(0)
        if degree >= 1:
            cobound = image_basis(self.d_matrix(degree - 1))
        else:
            cobound = Subspace.zero(n)
        reps = quotient_basis(cobound, cocycles)
        out = AlgebraCohomology(degree, tuple(reps.basis_vectors()), cobound, n)
        self._coh_cache[degree] = out
        return out

    def is_minimal(self) -> bool:
        """im d inside wordlength >= 2 (the Sullivan nilpotence refinement)."""
        return all(all(len(m) >= 2 for m in p) for p in self.d_polys)

    def extend(self, new_generators: Sequence[tuple[str, int]],
               new_differentials: Sequence[Polynomial]) -> "FreeCGA":
        return FreeCGA(self.generators + tuple(new_generators),
                       self.d_polys + tuple(dict(p) for p in new_differentials),
                       self.cap, formal=self.formal)

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in self.generators)
        return f"FreeCGA([{gens}], cap={self.cap})"


@dataclass(frozen=True)
class AlgebraCohomology:
    """Cohomology of a graded algebra at one degree, in a fixed basis of the
    underlying degree-component."""

    degree: int
    representatives: tuple[tuple[Q, ...], ...]
    coboundaries: Subspace
    component_dim: int

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def coords_of_cocycle(self, v: Sequence) -> tuple[Q, ...]:
        v = vector(v)
        if self.dim == 0 and self.coboundaries.dim == 0:
            if any(e != 0 for e in v):
                raise ValueError("nonzero cocycle in a zero group")
            return ()
        cols = list(self.representatives) + self.coboundaries.basis_vectors()
        x = solve(RationalMatrix.from_columns(cols, rows=self.component_dim), v)
        if x is None:
            raise ValueError("vector is not a cocycle of this degree")
        return tuple(x[: self.dim])

    def class_is_zero(self, v: Sequence) -> bool:
        return all(c == 0 for c in self.coords_of_cocycle(v))


# --- finite commutative cochain algebras ---------------------------------------

class CDGA:
    """A finite-dimensional graded-commutative cochain algebra, given by a
    basis per degree, structure constants, and differential matrices.

    Everything in degrees above `cap` is treated as zero (the quotient by the
    ideal of high degrees), which keeps all axioms exact.  Associativity,
    graded commutativity, the Leibniz rule, d^2 = 0, and unitality are checked
    on basis elements at construction.
    """

    def __init__(self, cap: int, basis: dict[int, Sequence[str]],
                 products: dict, differential: dict[int, RationalMatrix],
                 check: bool = True, formal: bool = False):
        self.cap = int(cap)
        self.formal = formal
        self.basis = {d: tuple(basis.get(d, ())) for d in range(cap + 1)}
        if len(self.basis.get(0, ())) != 1:
            raise ValueError("degree 0 must be the unit line")
        self._products = {}
        for (i, a, j, b), vec in products.items():
            if i + j <= cap:
                self._products[(i, a, j, b)] = vector(vec)
        self.differential = {}
        for d in range(cap + 1):
            m = differential.get(d)
            rows = self.dim(d + 1)
            cols = self.dim(d)
            if m is None:
                m = RationalMatrix.zero(rows, cols)
            if (m.rows, m.cols) != (rows, cols):
                raise ValueError(f"differential at degree {d} has the wrong shape")
            self.differential[d] = m
        self._coh_cache: dict[int, AlgebraCohomology] = {}
        if check:
            self._verify()

    def dim(self, degree: int) -> int:
        if 0 <= degree <= self.cap:
            return len(self.basis[degree])
        return 0

    def unit(self) -> tuple[int, tuple[Q, ...]]:
        return 0, (Q(1),)

    def zero(self, degree: int) -> tuple[Q, ...]:
        return (Q(0),) * self.dim(degree)

    def product_basis(self, i: int, a: int, j: int, b: int) -> tuple[Q, ...]:
        if i + j > self.cap:
            return ()
        if i == 0:
            return tuple((Q(1) if k == b else Q(0)) for k in range(self.dim(j)))
        if j == 0:
            return tuple((Q(1) if k == a else Q(0)) for k in range(self.dim(i)))
        v = self._products.get((i, a, j, b))
        if v is not None:
            return v
        w = self._products.get((j, b, i, a))
        if w is not None:
            sign = Q(-1) ** (i * j)
            return tuple(sign * e for e in w)
        return self.zero(i + j)

    def multiply(self, i: int, v: Sequence, j: int, w: Sequence) -> tuple[Q, ...]:
        if i + j > self.cap:
            return ()
        v, w = vector(v), vector(w)
        out = [Q(0)] * self.dim(i + j)
        for a, va in enumerate(v):
            if va == 0:
                continue
            for b, wb in enumerate(w):
                if wb == 0:
                    continue
                pb = self.product_basis(i, a, j, b)
                for k, e in enumerate(pb):
                    out[k] += va * wb * e
        return tuple(out)

    def d_apply(self, degree: int, v: Sequence) -> tuple[Q, ...]:
        if degree >= self.cap:
            return ()
        return self.differential[degree].apply(v)

    def cohomology(self, degree: int) -> AlgebraCohomology:
        cached = self._coh_cache.get(degree)
        if cached is not None:
            return cached
        n = self.dim(degree)
        if degree > self.cap or degree < 0:
            out = AlgebraCohomology(degree, (), Subspace.zero(0), 0)
        else:
            cocycles = kernel_basis(self.differential[degree]) if degree < self.cap \
                else Subspace.full(n)
            cobound = image_basis(self.differential[degree - 1]) if degree >= 1 \
                else Subspace.zero(n)
            reps = quotient_basis(cobound, cocycles)
            out = AlgebraCohomology(degree, tuple(reps.basis_vectors()), cobound, n)
        self._coh_cache[degree] = out
        return out

    def _verify(self):
        cap = self.cap
        for i in range(cap + 1):
            for j in range(cap + 1 - i):
                for a in range(self.dim(i)):
                    for b in range(self.dim(j)):
                        ab = self.product_basis(i, a, j, b)
                        ba = self.product_basis(j, b, i, a)
                        sign = Q(-1) ** (i * j)
                        if tuple(sign * e for e in ba) != tuple(ab):
                            raise ValueError(
                                f"graded commutativity fails on ({i},{a}) ({j},{b})")
        for i in range(cap + 1):
            for j in range(cap + 1 - i):
                for k in range(cap + 1 - i - j):
                    for a in range(self.dim(i)):
                        for b in range(self.dim(j)):
                            ab = self.product_basis(i, a, j, b)
                            for c in range(self.dim(k)):
                                bc = self.product_basis(j, b, k, c)
                                lhs = self.multiply(i + j, ab, k,
                                                    _unit_vec(self.dim(k), c))
                                rhs = self.multiply(i, _unit_vec(self.dim(i), a),
                                                    j + k, bc)
                                if tuple(lhs) != tuple(rhs):
                                    raise ValueError(
                                        f"associativity fails on degrees ({i},{j},{k})")
        for i in range(cap):
            m2 = self.differential.get(i + 1)
            comp = m2 * self.differential[i] if m2 is not None else None
            if comp is not None and not comp.is_zero():
                raise ValueError(f"d^2 != 0 at degree {i}")
        for i in range(cap + 1):
            for j in range(cap + 1 - i):
                for a in range(self.dim(i)):
                    for b in range(self.dim(j)):
                        ab = self.product_basis(i, a, j, b)
                        lhs = self.d_apply(i + j, ab)
                        da = self.d_apply(i, _unit_vec(self.dim(i), a))
                        db = self.d_apply(j, _unit_vec(self.dim(j), b))
                        t1 = self.multiply(i + 1, da, j, _unit_vec(self.dim(j), b)) \
                            if i + 1 + j <= self.cap else ()
                        t2 = self.multiply(i, _unit_vec(self.dim(i), a), j + 1, db) \
                            if i + j + 1 <= self.cap else ()
                        sign = Q(-1) ** i
                        rhs = tuple(x + sign * y for x, y in zip(t1, t2)) if t1 else ()
                        if tuple(lhs) != tuple(rhs):
                            raise ValueError(
                                f"Leibniz fails on ({i},{a}) x ({j},{b})")
        du = self.d_apply(0, (Q(1),))
        if any(e != 0 for e in du):
            raise ValueError("the unit must be a cocycle")

    @classmethod
    def build(cls, cap: int, elements: Sequence[tuple[str, int]],
              products: dict | None = None, differentials: dict | None = None,
              formal: bool = False, check: bool = True) -> "CDGA":
        """Convenience constructor from named elements.

        `elements` lists positive-degree basis elements; the unit "1" in
        degree 0 is implicit.  `products` maps (name_a, name_b) to
        {name_c: coeff}; only one orientation per unordered pair is needed.
        `differentials` maps name to {name: coeff}."""
        basis: dict[int, list[str]] = {0: ["1"]}
        degree = {"1": 0}
        for name, deg in elements:
            if deg < 1 or deg > cap:
                raise ValueError(f"element {name} out of degree range")
            basis.setdefault(deg, []).append(name)
            degree[name] = deg
        index = {}
        for d, names in basis.items():
            for k, n in enumerate(names):
                index[n] = k
        prods = {}
        for (na, nb), expansion in (products or {}).items():
            i, j = degree[na], degree[nb]
            if i + j > cap:
                continue
            vec = [Q(0)] * len(basis.get(i + j, []))
            for nc, coeff in expansion.items():
                if degree[nc] != i + j:
                    raise ValueError(f"product {na}*{nb} lands in the wrong degree")
                vec[index[nc]] = Q(coeff)
            prods[(i, index[na], j, index[nb])] = tuple(vec)
        diff = {}
        for d in range(cap + 1):
            rows = len(basis.get(d + 1, []))
            cols = len(basis.get(d, []))
            diff[d] = [[Q(0)] * cols for _ in range(rows)]
        for name, expansion in (differentials or {}).items():
            d = degree[name]
            for nc, coeff in expansion.items():
                if degree[nc] != d + 1:
                    raise ValueError(f"d({name}) lands in the wrong degree")
                diff[d][index[nc]][index[name]] = Q(coeff)
        diff_m = {d: RationalMatrix(rows, cols=len(basis.get(d, [])))
                  for d, rows in diff.items()}
        return cls(cap, {d: tuple(n) for d, n in basis.items()}, prods, diff_m,
                   check=check, formal=formal)


def _unit_vec(n: int, k: int) -> tuple[Q, ...]:
    return tuple(Q(1) if i == k else Q(0) for i in range(n))


class CDGAMorphism:
    """A cochain-algebra morphism from a FreeCGA into a CDGA, determined by its
    generator values and extended multiplicatively."""

    def __init__(self, source: FreeCGA, target: CDGA,
                 generator_values: Sequence[Sequence], check: bool = True):
        self.source = source
        self.target = target
        self.values = tuple(vector(v) for v in generator_values)
        if len(self.values) != len(source.generators):
            raise ValueError("one value per generator required")
        for g, v in enumerate(self.values):
            deg = source.degree_of(g)
            if len(v) != target.dim(deg):
                raise ValueError(
                    f"value for generator {source.generators[g][0]} has wrong length")
        if check:
            bound = min(source.cap, target.cap)
            for g in range(len(self.values)):
                deg = source.degree_of(g)
                if deg + 1 > bound:
                    continue
                lhs = target.d_apply(deg, self.values[g])
                rhs = self.evaluate(source.d_polys[g], deg + 1)
                if tuple(lhs) != tuple(rhs):
                    raise ValueError(
                        f"morphism does not commute with d on {source.generators[g][0]}")

    def evaluate_monomial(self, m: tuple) -> tuple[int, tuple[Q, ...]]:
        deg = 0
        acc = (Q(1),)
        for g in m:
            gd = self.source.degree_of(g)
            acc = self.target.multiply(deg, acc, gd, self.values[g])
            deg += gd
            if deg > self.target.cap:
                return deg, ()
        return deg, tuple(acc)

    def evaluate(self, p: Polynomial, degree: int) -> tuple[Q, ...]:
        out = [Q(0)] * self.target.dim(degree)
        for m, c in p.items():
            if self.source.monomial_degree(m) != degree:
                raise ValueError("polynomial not homogeneous")
            _, v = self.evaluate_monomial(m)
            for k, e in enumerate(v):
                out[k] += c * e
        return tuple(out)

    def induced_cohomology_matrix(self, degree: int) -> RationalMatrix:
        hm = self.source.cohomology(degree)
        ha = self.target.cohomology(degree)
        cols = []
        for rep in hm.representatives:
            p = self.source.vector_to_poly(rep, degree)
            image = self.evaluate(p, degree)
            cols.append(ha.coords_of_cocycle(image))
        return RationalMatrix.from_columns(cols, rows=ha.dim) if cols else \
            RationalMatrix.zero(ha.dim, 0)

    def extend(self, new_values: Sequence[Sequence], new_source: FreeCGA,
               check: bool = True) -> "CDGAMorphism":
        return CDGAMorphism(new_source, self.target,
                            self.values + tuple(vector(v) for v in new_values),
                            check=check)


# --- the minimal model algorithm ------------------------------------------------

@dataclass(frozen=True)
class StageRecord:
    degree: int
    new_closed_generators: int
    new_exact_generators: int


@dataclass(frozen=True)
class ModelCertificate:
    """Verified rank data for a constructed model: per-degree cohomology
    dimensions of model and target, isomorphism flags through `iso_bound`, and
    injectivity one degree above."""

    iso_bound: int
    dims_model: tuple[int, ...]
    dims_target: tuple[int, ...]
    iso_flags: tuple[bool, ...]
    injective_above: bool
    minimal: bool
    first_nonzero_degree: int | None
    degree_bounds_hold: bool
    stages: tuple[StageRecord, ...]
    formal_surrogate: bool

    @property
    def all_isomorphisms(self) -> bool:
        return all(self.iso_flags)


@dataclass(frozen=True)
class MinimalModel:
    model: FreeCGA
    morphism: CDGAMorphism
    certificate: ModelCertificate


def minimal_model(a: CDGA, n: int) -> MinimalModel:
    """Run the inductive construction up to stage n: the result has
    H^i(morphism) an isomorphism for i <= n and injective at n + 1, with
    im d contained in wordlength >= 2.

    Requires H^0(a) = Q and H^1(a) = 0, and a.cap >= n + 2 so the top
    certificate degrees are honest.
    """
    if a.cap < n + 2:
        raise ValueError(f"target algebra must be defined up to degree {n + 2}")
    h0 = a.cohomology(0)
    if h0.dim != 1:
        raise ValueError("H^0 of the target must be Q")
    if a.cohomology(1).dim != 0:
        raise ValueError("H^1 of the target must vanish")

    model = FreeCGA((), (), cap=n + 2, formal=a.formal)
    morphism = CDGAMorphism(model, a, ())
    stages = []

    # stage 2: generators dual to H^2(a)
    h2 = a.cohomology(2)
    gens = [(f"v2_{k}", 2) for k in range(h2.dim)]
    model = model.extend(gens, [{} for _ in gens])
    morphism = morphism.extend(list(h2.representatives), model)
    stages.append(StageRecord(2, h2.dim, 0))

    for k in range(2, n):
        # new degree-(k+1) generators: complement of im H^{k+1}(m) and
        # kernel of H^{k+2}(m)
        ha1 = a.cohomology(k + 1)
        phi = morphism.induced_cohomology_matrix(k + 1)
        comp = quotient_basis(image_basis(phi), Subspace.full(ha1.dim))
        closed_targets = []
        for coeffs in comp.basis_vectors():
            v = [Q(0)] * a.dim(k + 1)
            for c, rep in zip(coeffs, ha1.representatives):
                for idx, e in enumerate(rep):
                    v[idx] += c * e
            closed_targets.append(tuple(v))

        hm2 = model.cohomology(k + 2)
        psi = morphism.induced_cohomology_matrix(k + 2)
        ker = kernel_basis(psi)
        exact_data = []
        for coeffs in ker.basis_vectors():
            z: Polynomial = {}
            for c, rep in zip(coeffs, hm2.representatives):
                z = poly_add(z, poly_scale(model.vector_to_poly(rep, k + 2), c))
            mz = morphism.evaluate(z, k + 2)
            b = solve(a.differential[k + 1], mz)
            if b is None:
                raise AssertionError(
                    "image of a kernel class is not exact; target algebra inconsistent")
            exact_data.append((z, tuple(b)))

        new_gens = [(f"v{k + 1}_{idx}", k + 1) for idx in range(len(closed_targets))]
        new_gens += [(f"w{k + 1}_{idx}", k + 1) for idx in range(len(exact_data))]
        new_ds: list[Polynomial] = [{} for _ in closed_targets]
        new_ds += [z for z, _ in exact_data]
        new_vals = list(closed_targets) + [b for _, b in exact_data]
        if new_gens:
            model = model.extend(new_gens, new_ds)
            morphism = morphism.extend(new_vals, model)
        stages.append(StageRecord(k + 1, len(closed_targets), len(exact_data)))

    # certification
    dims_m, dims_a, flags = [], [], []
    for i in range(0, n + 1):
        hm = model.cohomology(i) if i > 0 else None
        dm = hm.dim if hm else 1  # H^0(free CGA) = Q by construction
        da = a.cohomology(i).dim
        if i == 0:
            iso = da == 1
        else:
            m = morphism.induced_cohomology_matrix(i)
            iso = (dm == da) and rank(m) == da
        dims_m.append(dm)
        dims_a.append(da)
        flags.append(iso)
    minj = morphism.induced_cohomology_matrix(n + 1)
    injective = kernel_basis(minj).dim == 0
    minimal = model.is_minimal()
    r = first_nonzero_cohomology_degree(a, n + 1)
    bounds = verify_degree_bounds(model, r) if r is not None else True
    cert = ModelCertificate(n, tuple(dims_m), tuple(dims_a), tuple(flags),
                            injective, minimal, r, bounds, tuple(stages),
                            a.formal)
    if not (cert.all_isomorphisms and injective and minimal):
        raise AssertionError(f"model construction failed its certificate: {cert}")
    return MinimalModel(model, morphism, cert)


def first_nonzero_cohomology_degree(a, up_to: int) -> int | None:
    for i in range(2, up_to + 1):
        if a.cohomology(i).dim:
            return i
    return None


def verify_degree_bounds(model: FreeCGA, r: int) -> bool:
    """V^{<r} = 0 and d = 0 on all elements of degree <= 2r - 2 (equivalently
    on all generators of those degrees)."""
    for g, (_, deg) in enumerate(model.generators):
        if deg < r:
            return False
        if deg <= 2 * r - 2 and not poly_is_zero(model.d_polys[g]):
            return False
    return True


# --- the wordlength-projection criterion ------------------------------------------

@dataclass(frozen=True)
class ZetaData:
    """The projection-to-generators map on cohomology at one degree."""

    degree: int
    matrix: RationalMatrix            # H^t -> V^t in canonical bases
    kernel: Subspace                  # inside H^t coordinates
    cohomology: AlgebraCohomology

    @property
    def injective(self) -> bool:
        return self.kernel.dim == 0


def zeta(model: FreeCGA, t: int) -> ZetaData:
    """Matrix of the map sending a class [z] to the wordlength-one part of z.
    Only well defined for minimal algebras, where exact elements have no
    wordlength-one component."""
    if not model.is_minimal():
        raise ValueError("the projection criterion needs a minimal algebra")
    if t > model.cap:
        raise ValueError(f"degree {t} exceeds the certification bound {model.cap}")
    h = model.cohomology(t)
    gens = model.generator_indices(t)
    cols = []
    for rep in h.representatives:
        p = model.vector_to_poly(rep, t)
        col = [p.get((g,), Q(0)) for g in gens]
        cols.append(col)
    m = RationalMatrix.from_columns(cols, rows=len(gens)) if cols else \
        RationalMatrix.zero(len(gens), 0)
    return ZetaData(t, m, kernel_basis(m), h)


# --- cohomology rings (product sources) -------------------------------------------

class CohomologyRing:
    """A graded-commutative ring on explicit bases: the product source consumed
    by complementary-product checks and the obstruction computation.

    provenance records where the products came from ("simplicial" and
    algebra-derived rings are exact; "table" rings are trusted caller input and
    flagged as such in reports).
    """

    def __init__(self, dims: dict[int, int],
                 product_fn: Callable[[int, int, int, int], tuple[Q, ...]],
                 provenance: str, trusted_input: bool = False):
        self.dims = {d: n for d, n in dims.items() if n}
        self.product_fn = product_fn
        self.provenance = provenance
        self.trusted_input = trusted_input

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def product(self, i: int, a: int, j: int, b: int) -> tuple[Q, ...]:
        """Product of the a-th degree-i and b-th degree-j basis classes,
        in the degree-(i+j) basis."""
        return self.product_fn(i, a, j, b)

    @classmethod
    def from_free_cga(cls, model: FreeCGA, up_to: int) -> "CohomologyRing":
        dims = {i: model.cohomology(i).dim for i in range(1, up_to + 1)}

        def product(i, a, j, b):
            hi, hj = model.cohomology(i), model.cohomology(j)
            hij = model.cohomology(i + j)
            p = model.vector_to_poly(hi.representatives[a], i)
            q = model.vector_to_poly(hj.representatives[b], j)
            prod = model.mul(p, q)
            return hij.coords_of_cocycle(model.poly_to_vector(prod, i + j)) \
                if i + j <= up_to else ()

        return cls(dims, product, "free-cga")

    @classmethod
    def from_cdga(cls, a: CDGA, up_to: int) -> "CohomologyRing":
        dims = {i: a.cohomology(i).dim for i in range(1, up_to + 1)}

        def product(i, aa, j, bb):
            hi, hj = a.cohomology(i), a.cohomology(j)
            hij = a.cohomology(i + j)
            v = a.multiply(i, hi.representatives[aa], j, hj.representatives[bb])
            return hij.coords_of_cocycle(v) if i + j <= up_to else ()

        return cls(dims, product, "cdga", trusted_input=False)

    @classmethod
    def from_simplicial(cls, complex_, up_to: int,
                        reduced: bool = True) -> "CohomologyRing":
        """Exact cup-product ring of a simplicial complex (reduced: degree-0
        classes are dropped, so only positive degrees appear)."""
        from .chain import cohomology as chain_cohomology
        from .simplicial import Cochain, cup
        ck = complex_.chain_complex()
        coh = {i: chain_cohomology(ck, i) for i in range(0, up_to + 1)}
        dims = {i: coh[i].dim for i in range(1, up_to + 1)}

        def product(i, a, j, b):
            if i + j > up_to:
                return ()
            ca = Cochain(complex_, i, tuple(coh[i].cycle_representatives[a]))
            cb = Cochain(complex_, j, tuple(coh[j].cycle_representatives[b]))
            return coh[i + j].coords_of_cycle(cup(ca, cb).values)

        return cls(dims, product, "simplicial")

    @classmethod
    def from_table(cls, dims: dict[int, int],
                   table: dict[tuple[int, int, int, int], Sequence]) -> "CohomologyRing":
        """Trusted caller-supplied ring data; flagged in downstream reports."""
        clean = {}
        for key, vec in table.items():
            clean[key] = vector(vec)

        def product(i, a, j, b):
            v = clean.get((i, a, j, b))
            if v is not None:
                return v
            w = clean.get((j, b, i, a))
            if w is not None:
                sign = Q(-1) ** (i * j)
                return tuple(sign * e for e in w)
            return tuple(Q(0) for _ in range(dims.get(i + j, 0)))

        return cls(dims, product, "table", trusted_input=True)


@dataclass(frozen=True)
class ProductWitness:
    degree_left: int
    index_left: int
    index_right: int
    product_class: tuple[Q, ...]


def check_complementary_products(source, t: int) -> tuple[bool, ProductWitness | None]:
    """Exhaustively check that every product H^i x H^{t-i} -> H^t of positive
    complementary degrees vanishes; returns a witness pair on failure."""
    ring = source if isinstance(source, CohomologyRing) else \
        CohomologyRing.from_free_cga(source, t)
    for i in range(1, t):
        j = t - i
        for a in range(ring.dim(i)):
            for b in range(ring.dim(j)):
                v = ring.product(i, a, j, b)
                if any(e != 0 for e in v):
                    return False, ProductWitness(i, a, b, tuple(v))
    return True, None


@dataclass(frozen=True)
class LemmaVerdict:
    """Hypothesis record for the injectivity criterion: generators start at r,
    the differential vanishes through degree s, complementary products vanish
    at t, and t <= r + s."""

    r: int
    s: int
    t: int
    generators_start_at_r: bool
    d_vanishes_through_s: bool
    products_vanish: bool
    in_range: bool
    applies: bool
    zeta_injective: bool
    kernel_dim: int


def zeta_injectivity_via_lemma(model: FreeCGA, r: int, s: int, t: int) -> LemmaVerdict:
    """Check the hypotheses and, when they hold, assert injectivity of the
    wordlength projection at degree t, cross-checked against the directly
    computed kernel.  A kernel in the applicable case is a hard error: it
    would contradict a proved statement."""
    gens_ok = all(deg >= r for _, deg in model.generators)
    d_ok = all(poly_is_zero(model.d_polys[g])
               for g, (_, deg) in enumerate(model.generators) if deg <= s)
    products_ok, _ = check_complementary_products(model, t)
    in_range = t <= r + s
    applies = gens_ok and d_ok and products_ok and in_range
    zd = zeta(model, t)
    if applies and not zd.injective:
        raise AssertionError(
            "projection kernel found although the injectivity criterion applies")
    return LemmaVerdict(r, s, t, gens_ok, d_ok, products_ok, in_range,
                        applies, zd.injective, zd.kernel.dim)


@dataclass(frozen=True)
class HurewiczCertificate:
    """Surjectivity certificate for the degree-(n-1) rational Hurewicz map of
    a space whose minimal model is given.

    The equivalence with injectivity of the wordlength projection requires the
    caller-asserted hypotheses (simple connectivity, finite type), which are
    recorded, not verified.  `sufficient_route` marks the independent
    low-degree criterion: n <= 3r - 1 plus vanishing complementary products.
    """

    n: int
    surjective: bool
    kernel_dim: int
    simply_connected_asserted: bool
    finite_type_asserted: bool
    r: int | None
    route_in_range: bool
    route_products_vanish: bool
    sufficient_route: bool
    caveats: tuple[str, ...]


def hurewicz_surjectivity_certificate(model: FreeCGA, n: int,
                                      simply_connected: bool,
                                      finite_type: bool) -> HurewiczCertificate:
    if not (simply_connected and finite_type):
        raise ValueError(
            "the criterion requires caller-asserted simple connectivity and finite type")
    zd = zeta(model, n - 1)
    r = None
    for i in range(2, model.cap + 1):
        if model.cohomology(i).dim:
            r = i
            break
    in_range = r is not None and n <= 3 * r - 1
    products_ok, _ = check_complementary_products(model, n - 1) if r is not None \
        else (True, None)
    sufficient = bool(in_range and products_ok)
    if sufficient and not zd.injective:
        raise AssertionError(
            "low-degree route asserts surjectivity but the projection has a kernel")
    caveats = []
    if model.formal:
        caveats.append(
            "model built from a cohomology ring with zero differential; exact only "
            "for formal spaces")
    return HurewiczCertificate(n, zd.injective, zd.kernel.dim, simply_connected,
                               finite_type, r, in_range, products_ok, sufficient,
                               tuple(caveats))


# --- ready-made algebras ------------------------------------------------------------

def odd_triple_family(u: int, cap: int | None = None) -> FreeCGA:
    """The free minimal algebra on x, y of odd degree u and z of degree 2u - 1
    with dz = xy.  Its positive cohomology is concentrated in degrees u,
    3u - 1, and 4u - 1 with ranks 2, 2, 1."""
    if u < 3 or u % 2 == 0:
        raise ValueError("the family needs an odd degree u >= 3")
    cap = cap if cap is not None else 4 * u + 1
    gens = [("x", u), ("y", u), ("z", 2 * u - 1)]
    ds = [{}, {}, {(0, 1): Q(1)}]
    return FreeCGA(gens, ds, cap=cap)


def sphere_cohomology_cdga(n: int, cap: int) -> CDGA:
    """H*(S^n) as a CDGA with zero differential."""
    products = {("e", "e"): {}} if 2 * n <= cap else {}
    return CDGA.build(cap, [("e", n)], products=products)


def formal_cdga_from_ring(ring: CohomologyRing, cap: int) -> CDGA:
    """The cohomology ring regarded as a CDGA with zero differential: the
    formal surrogate.  Results derived through it carry a formality caveat."""
    elements = []
    names = {}
    for d in sorted(ring.dims):
        if d > cap:
            continue
        for k in range(ring.dim(d)):
            nm = f"h{d}_{k}"
            names[(d, k)] = nm
            elements.append((nm, d))
    products = {}
    for i in sorted(ring.dims):
        for j in sorted(ring.dims):
            if i > j or i + j > cap:
                continue
            for a in range(ring.dim(i)):
                for b in range(ring.dim(j)):
                    v = ring.product(i, a, j, b)
                    expansion = {names[(i + j, k)]: c
                                 for k, c in enumerate(v) if c != 0}
                    if expansion:
                        products[(names[(i, a)], names[(j, b)])] = expansion
    return CDGA.build(cap, elements, products=products, formal=True)
