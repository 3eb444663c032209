"""The top-level pipeline: cut-off degrees, flat-bundle truncation cones,
duality obstructions, the equivalence report for single-cell completability,
intersection-space assembly, the one-cell completion, and signature/Witt
comparison over Q.

Chain-level caveats are explicit throughout: mapping-cone homology is reduced
homology (reports add the basepoint back at degree 0), cup products exist only
where a simplicial model or a trusted ring table is available, and middle
intersection data is routed through the regular part exactly as the additivity
argument requires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Sequence

from .qlinalg import (
    RationalMatrix,
    Subspace,
    SymmetricForm,
    WittClass,
    image_basis,
    kernel_basis,
    rank,
    signature as form_signature,
    solve,
    vector,
    witt_class,
    witt_equal,
)
from .chain import (
    ChainComplex,
    ChainMap,
    PairData,
    algebraic_mapping_torus,
    attach_top_cell,
    augmented_mapping_cone,
    betti,
    cohomology,
    connecting_image_membership,
    direct_sum,
    direct_sum_maps,
    equivariant_moore_truncation,
    homology,
    homotopy_pushout,
    induced_map,
    is_moore_approximation,
    pair_from_inclusion,
    point_complex,
)
from .simplicial import (
    SimplicialComplex,
    SimplicialPair,
    cap_duality_matrix,
    fundamental_cycle,
    relative_fundamental_cycle,
    verify_pd_pair,
)
from .sullivan import CohomologyRing


class TheoremInconsistencyError(AssertionError):
    """A verified consequence of the completability equivalence failed: either
    the library has a bug or a trusted input table lied."""


class ObstructionsUnavailableError(ValueError):
    """No product structure is available and ranks alone cannot decide."""


# --- perversities and cut-off degrees ------------------------------------------

class PerversityPair:
    """Complementary perversities (p, q): growth conditions p(2) = 0 and
    p(s) <= p(s+1) <= p(s) + 1, with p(s) + q(s) = s - 2."""

    def __init__(self, p_table: dict[int, int] | None = None,
                 q_table: dict[int, int] | None = None, name: str = "table"):
        self.name = name
        self._p = dict(p_table) if p_table else None
        self._q = dict(q_table) if q_table else None
        if (self._p is None) != (self._q is None):
            raise ValueError("supply both tables or neither")
        if self._p is not None:
            smax = max(self._p)
            for s in range(2, smax + 1):
                if s not in self._p or s not in (self._q or {}):
                    raise ValueError(f"perversity tables must cover s = {s}")
            if self._p[2] != 0:
                raise ValueError("p(2) must be 0")
            for s in range(2, smax):
                if not (self._p[s] <= self._p[s + 1] <= self._p[s] + 1):
                    raise ValueError(f"growth condition fails at s = {s}")
            for s in range(2, smax + 1):
                if self._p[s] + self._q[s] != s - 2:
                    raise ValueError(f"complementarity fails at s = {s}")

    @classmethod
    def middle(cls) -> "PerversityPair":
        return cls(name="middle")

    def p(self, s: int) -> int:
        if self._p is not None:
            if s not in self._p:
                raise ValueError(f"perversity table does not cover s = {s}")
            return self._p[s]
        return s // 2 - 1          # lower middle

    def q(self, s: int) -> int:
        if self._q is not None:
            if s not in self._q:
                raise ValueError(f"perversity table does not cover s = {s}")
            return self._q[s]
        return (s + 1) // 2 - 1    # upper middle

    def __repr__(self):
        return f"PerversityPair({self.name})"


def cutoff_degrees(c: int, pp: PerversityPair) -> tuple[int, int]:
    """k = c - p(c+1) and l = c - q(c+1); their sum is always c + 1."""
    if c < 1:
        raise ValueError("fiber dimension must be >= 1")
    k = c - pp.p(c + 1)
    l = c - pp.q(c + 1)
    if k + l != c + 1:
        raise AssertionError("cut-off degrees must sum to c + 1")
    return k, l


# --- link bundles ----------------------------------------------------------------

@dataclass(frozen=True)
class LinkBundleData:
    """Input description of one singular stratum's link bundle.

    Either `monodromy` (a finite-order chain automorphism of `fiber`, for the
    flat bundle over the circle) or `precomputed` (total space, fiberwise
    truncation, and the truncation map, e.g. from a simplicial model or an
    isolated singularity) must be given.
    """

    fiber: ChainComplex
    fiber_dim: int
    monodromy: ChainMap | None = None
    order: int = 1
    precomputed: tuple[ChainComplex, ChainComplex, ChainMap] | None = None
    total_fundamental: tuple | None = None
    fiber_fundamental: tuple | None = None
    cone_ring: CohomologyRing | None = None
    label: str = "stratum"


@dataclass(frozen=True)
class FlatBundle:
    """A built truncation-cone setup: total space, fiberwise truncation, the
    cone with its pair data, and the orientation cycle of the total space."""

    label: str
    n: int
    k: int
    l: int
    fiber: ChainComplex
    total: ChainComplex
    truncated_total: ChainComplex
    truncation_map: ChainMap
    cone: ChainComplex
    cone_pair: PairData              # (cone, total)
    total_fundamental: tuple
    ring: CohomologyRing | None

    def fundamental_class_in_cone(self) -> tuple[Q, ...]:
        """Coordinates of the included orientation class in H_{n-1}(cone)."""
        h = self.cone_pair.ambient_homology[self.n - 1]
        img = self.cone_pair.inclusion.apply(self.n - 1, self.total_fundamental)
        return h.coords_of_cycle(img)


def build_flat_bundle(data: LinkBundleData, pp: PerversityPair) -> FlatBundle:
    """Build (E, ft_<E, F_<, cone(F_<)) for one stratum.

    For the monodromy route, the truncation is the equivariant chain-level one
    at degree min(k, l); the middle-homology condition on even-dimensional
    fibers makes it a truncation of both degrees, which is checked.  The
    vanishing of the cone's reduced homology below max(k, l) is asserted on
    every construction.
    """
    c = data.fiber_dim
    k, l = cutoff_degrees(c, pp)
    if c % 2 == 0 and homology(data.fiber, c // 2).dim != 0:
        raise ValueError(
            "even-dimensional fiber with nonzero middle homology: the two "
            "truncation degrees cannot agree")
    if data.precomputed is not None:
        total, truncated, fmap = data.precomputed
        n = total.top + 1  # the chain grading must reach the geometric dimension
        if data.total_fundamental is None:
            h = homology(total, n - 1)
            if h.dim != 1:
                raise ValueError("total space orientation cycle required")
            fund = h.cycle_representatives[0]
        else:
            fund = vector(data.total_fundamental)
    else:
        if data.monodromy is None:
            raise ValueError("either monodromy or precomputed data required")
        lam = data.monodromy
        r = min(k, l)
        trunc, incl, lam_trunc = equivariant_moore_truncation(
            data.fiber, lam, data.order, r)
        if not is_moore_approximation(incl, max(k, l)):
            raise AssertionError(
                "truncation is not an approximation of the complementary degree")
        total = algebraic_mapping_torus(lam)
        truncated = algebraic_mapping_torus(lam_trunc)
        fmap = _torus_level_map(incl, lam, lam_trunc, total, truncated)
        fib_fund = data.fiber_fundamental
        if fib_fund is None:
            h = homology(data.fiber, c)
            if h.dim != 1:
                raise ValueError("fiber orientation cycle required")
            fib_fund = h.cycle_representatives[0]
        fund = _torus_fundamental(data.fiber, total, vector(fib_fund), c)
        n = c + 2
    cone, cone_pair = augmented_mapping_cone(fmap)
    if homology(cone, 0).dim != 1:
        raise AssertionError("truncation cone model must be path connected")
    for i in range(1, max(k, l)):
        if homology(cone, i).dim != 0:
            raise AssertionError(
                f"truncation cone has reduced homology in degree {i} < max(k, l)")
    dfund = total.d(n - 1).apply(fund) if n - 1 > total.bottom else ()
    if any(e != 0 for e in dfund):
        raise ValueError("total-space orientation chain is not a cycle")
    return FlatBundle(data.label, n, k, l, data.fiber, total, truncated, fmap,
                      cone, cone_pair, tuple(vector(fund)), data.cone_ring)


def canonical_witness(bundle: FlatBundle) -> tuple[Q, ...]:
    """The included orientation cycle of the total space, the canonical
    attaching chain for the completability check."""
    return bundle.cone_pair.inclusion.apply(bundle.n - 1, bundle.total_fundamental)


def _torus_level_map(incl: ChainMap, lam: ChainMap, lam_trunc: ChainMap,
                     total: ChainComplex, truncated: ChainComplex) -> ChainMap:
    """The truncation inclusion induced on mapping tori, blockwise
    f (+) f[-1]; equivariance makes it a chain map."""
    comps = {}
    for i in truncated.degrees():
        blocks = []
        f_i = incl.component(i)
        f_prev = incl.component(i - 1)
        rt, rs = lam.source.rank(i), lam_trunc.source.rank(i)
        rt1, rs1 = lam.source.rank(i - 1), lam_trunc.source.rank(i - 1)
        m = [[Q(0)] * (rs + rs1) for _ in range(rt + rt1)]
        for r in range(f_i.rows):
            for cc in range(f_i.cols):
                m[r][cc] = f_i[r, cc]
        for r in range(f_prev.rows):
            for cc in range(f_prev.cols):
                m[rt + r][rs + cc] = f_prev[r, cc]
        comps[i] = RationalMatrix(m, cols=rs + rs1)
    return ChainMap(truncated, total, comps)


def _torus_fundamental(fiber: ChainComplex, total: ChainComplex,
                       fib_fund: tuple, c: int) -> tuple[Q, ...]:
    """The cycle (0, [L]) in torus degree c+1 = L_{c+1} (+) L_c."""
    top_block = fiber.rank(c + 1)
    out = [Q(0)] * total.rank(c + 1)
    for idx, e in enumerate(fib_fund):
        out[top_block + idx] = e
    return tuple(out)


# --- local duality obstructions ---------------------------------------------------

@dataclass(frozen=True)
class ObstructionSpace:
    degree: int
    status: str                 # "zero" | "nonzero" | "zero-by-rank" | "unavailable"
    dim: int
    basis: tuple[tuple[Q, ...], ...]
    witness: tuple | None       # (i, a, b, product class) for nonzero spans

    @property
    def vanishes(self) -> bool | None:
        if self.status in ("zero", "zero-by-rank"):
            return True
        if self.status == "nonzero":
            return False
        return None


def local_duality_obstructions(ring: CohomologyRing, n: int
                               ) -> dict[int, ObstructionSpace]:
    """O_i = span of all products H^i x H^{n-1-i} inside H^{n-1} of the
    truncation cone's reduced cohomology, for i in 1..n-2 (it vanishes outside
    that range since the cone is path connected)."""
    out = {}
    target_dim = ring.dim(n - 1)
    for i in range(1, n - 1):
        j = n - 1 - i
        spans = []
        witness = None
        for a in range(ring.dim(i)):
            for b in range(ring.dim(j)):
                v = ring.product(i, a, j, b)
                if any(e != 0 for e in v):
                    spans.append(tuple(v))
                    if witness is None:
                        witness = (i, a, b, tuple(v))
        if spans:
            sub = Subspace.from_vectors(spans, target_dim)
            out[i] = ObstructionSpace(i, "nonzero", sub.dim,
                                      tuple(sub.basis_vectors()), witness)
        else:
            out[i] = ObstructionSpace(i, "zero", 0, (), None)
    return out


def obstructions_rank_certificate(cone: ChainComplex, n: int
                                  ) -> dict[int, ObstructionSpace]:
    """Degrees where one reduced factor group already vanishes: the product
    span is provably zero without any ring structure."""
    dims = {i: _reduced_dim(cone, i) for i in range(0, n)}
    out = {}
    for i in range(1, n - 1):
        if dims.get(i, 0) == 0 or dims.get(n - 1 - i, 0) == 0:
            out[i] = ObstructionSpace(i, "zero-by-rank", 0, (), None)
        else:
            out[i] = ObstructionSpace(i, "unavailable", 0, (), None)
    return out


def obstructions_for_bundle(bundle: FlatBundle) -> dict[int, ObstructionSpace]:
    """Preference order: exact/trusted ring if present, else rank certificate;
    degrees that stay unavailable are reported as such, never defaulted."""
    if bundle.ring is not None:
        return local_duality_obstructions(bundle.ring, bundle.n)
    return obstructions_rank_certificate(bundle.cone, bundle.n)


# --- the completability equivalence report ------------------------------------------

@dataclass(frozen=True)
class MembershipCheck:
    holds: bool
    class_coords: tuple[Q, ...]
    preimage: tuple[Q, ...] | None


@dataclass(frozen=True)
class RankConditionReport:
    surjectivity: dict[int, bool]          # H_r(E) -> H_r(cone) onto
    rank_match: dict[int, bool]            # dim H_r(ftE) = dim H~_{n-1-r}(cone)
    relative_top_rank: int                 # dim H_n(X^phi, cone)
    lift_exists: bool                      # [E] hit by H_n(X^phi, E) -> H_{n-1}(E)
    pair_duality: dict[int, bool]          # dim H^r(X^phi) = dim H_{n-r}(X^phi, E)
    betti_shift_ok: bool

    @property
    def holds(self) -> bool:
        return (all(self.surjectivity.values()) and all(self.rank_match.values())
                and self.relative_top_rank == 1 and self.lift_exists
                and all(self.pair_duality.values()) and self.betti_shift_ok)


@dataclass(frozen=True)
class Theorem41Report:
    label: str
    n: int
    witness: tuple[Q, ...]
    witness_class: tuple[Q, ...]
    orientation_class: tuple[Q, ...]       # [E] included into H_{n-1}(cone)
    statement_ii: MembershipCheck
    statement_i: RankConditionReport
    obstructions: dict[int, ObstructionSpace]
    obstructions_vanish: bool | None
    scale: Q | None                        # q with [E]-image = q * [witness]
    passed: bool
    xphi: ChainComplex = field(repr=False, compare=False, default=None)
    attach_pair: PairData = field(repr=False, compare=False, default=None)
    e_pair: PairData = field(repr=False, compare=False, default=None)


def verify_theorem41(bundle: FlatBundle, z: Sequence) -> Theorem41Report:
    """Attach a top cell to the truncation cone along z and verify the two
    equivalent completability statements plus the obstruction consequence.

    (ii) is the connecting-image membership of the included orientation class;
    (i) is checked through the rank-level duality-pair conditions (surjectivity
    and complementary-rank hypotheses, uniqueness of the relative top class,
    existence of the orientation lift, rank-level pair duality, and the Betti
    shift).  If (ii) holds but an exactly-computed obstruction space is
    nonzero, the run stops: that combination contradicts a proved implication.
    """
    n = bundle.n
    cone = bundle.cone
    z = vector(z)
    if len(z) != cone.rank(n - 1):
        raise ValueError("witness chain has the wrong length")
    if any(e != 0 for e in cone.d(n - 1).apply(z)):
        raise ValueError("witness chain is not a cycle")

    xphi, attach_pair = attach_top_cell(cone, z, n)
    h_cone = attach_pair.sub_homology[n - 1]
    x_class = bundle.fundamental_class_in_cone()
    z_class = h_cone.coords_of_cycle(z)

    ok, pre = connecting_image_membership(attach_pair, n, x_class)
    statement_ii = MembershipCheck(ok, tuple(x_class), pre)

    scale = None
    if any(e != 0 for e in z_class):
        sol = solve(RationalMatrix.from_columns([z_class], rows=len(z_class)),
                    x_class)
        if sol is not None:
            scale = sol[0]
    elif all(e == 0 for e in x_class):
        scale = Q(0)

    # statement (i): rank-level conditions
    lo = min(bundle.total.bottom, cone.bottom)
    hi = max(bundle.total.top, cone.top, xphi.top)
    surj = {}
    match = {}
    for r in range(lo, hi + 1):
        he = homology(bundle.total, r)
        hc = homology(cone, r)
        m = induced_map(bundle.cone_pair.inclusion, r, he, hc)
        surj[r] = rank(m) == hc.dim
        hf = homology(bundle.truncated_total, r)
        match[r] = hf.dim == _reduced_dim(cone, n - r - 1)
    rel_top = attach_pair.relative_homology[n].dim

    e_incl = _compose_inclusions(bundle.cone_pair.inclusion, attach_pair.inclusion)
    e_pair = pair_from_inclusion(e_incl)
    he_top = e_pair.sub_homology[n - 1]
    e_class = he_top.coords_of_cycle(bundle.total_fundamental)
    lift_ok, _ = connecting_image_membership(e_pair, n, e_class)
    duality = {}
    for r in range(0, n + 1):
        ch = cohomology(xphi, r).dim
        rel = e_pair.relative_homology.get(n - r)
        duality[r] = ch == (rel.dim if rel else 0)
    shift_ok = True
    for r in range(lo, hi + 1):
        da = homology(xphi, r).dim
        dc = homology(cone, r).dim
        if r == n - 1:
            expected = dc - 1 if statement_ii.holds else dc
        elif r == n:
            expected = dc + (0 if statement_ii.holds else 1)
        else:
            expected = dc
        if da != expected:
            shift_ok = False
    statement_i = RankConditionReport(surj, match, rel_top, lift_ok, duality,
                                      shift_ok)

    obstructions = obstructions_for_bundle(bundle)
    statuses = [o.vanishes for o in obstructions.values()]
    if any(v is False for v in statuses):
        vanish = False
    elif any(v is None for v in statuses):
        vanish = None
    else:
        vanish = True
    if statement_ii.holds and vanish is False:
        exact = bundle.ring is not None and not bundle.ring.trusted_input
        raise TheoremInconsistencyError(
            "completability holds but an obstruction space is nonzero"
            + ("" if exact else " (ring table was trusted caller input)"))

    passed = statement_ii.holds and statement_i.holds
    return Theorem41Report(bundle.label, n, tuple(z), tuple(z_class),
                           tuple(x_class), statement_ii, statement_i,
                           obstructions, vanish, scale, passed,
                           xphi, attach_pair, e_pair)


def _compose_inclusions(first: ChainMap, second: ChainMap) -> ChainMap:
    return second.compose(first)


def _reduced_dim(c: ChainComplex, i: int) -> int:
    d = homology(c, i).dim
    return d - 1 if i == 0 else d


# --- intersection space assembly ----------------------------------------------------

@dataclass(frozen=True)
class WittSpaceSpec:
    """A depth-one space description: the regular part with its boundary
    decomposition into link-bundle total spaces."""

    n: int
    regular_chain: ChainComplex
    boundary_inclusion: ChainMap            # direct sum of totals -> regular chain
    strata: tuple[FlatBundle, ...]
    regular_pair: SimplicialPair | None = None
    mu: tuple | None = None                 # relative fundamental chain of M

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("dimension must be at least 3")
        if self.strata:
            total = direct_sum([s.total for s in self.strata])
            if self.boundary_inclusion.source != total:
                raise ValueError("boundary inclusion source must be the sum of "
                                 "the stratum total spaces")
            if self.boundary_inclusion.target != self.regular_chain:
                raise ValueError("boundary inclusion target mismatch")
            for s in self.strata:
                if s.n != self.n:
                    raise ValueError("stratum dimension mismatch")


@dataclass(frozen=True)
class IXData:
    spec: WittSpaceSpec
    complex: ChainComplex                  # reduced-model intersection space
    regular_inclusion: ChainMap            # M -> IX
    cone_inclusions: tuple[ChainMap, ...]  # cone(F_i) -> IX
    pair: PairData                         # (IX, M)
    mayer_vietoris_ok: bool


def assemble_intersection_space(spec: WittSpaceSpec) -> IXData:
    """IX as the mapping cone of the composite (sum of truncated totals) ->
    (sum of totals) -> M; empty stratum list returns M itself.  A homotopy
    pushout with a point over the truncated sum recomputes the homology as an
    independent cross-check."""
    m = spec.regular_chain
    if not spec.strata:
        ident = ChainMap.identity(m)
        pair = pair_from_inclusion(ident)
        return IXData(spec, m, ident, (), pair, True)
    tsum = direct_sum([s.truncated_total for s in spec.strata])
    esum = direct_sum([s.total for s in spec.strata])
    fsum = direct_sum_maps([s.truncation_map for s in spec.strata], tsum, esum)
    tau = spec.boundary_inclusion.compose(fsum)
    ix, pair = augmented_mapping_cone(tau)
    m_incl = pair.inclusion
    cone_incls = _stratum_cone_inclusions(spec, ix)

    pushout, _, _ = homotopy_pushout(
        ChainMap(tsum, point_complex(),
                 {0: RationalMatrix([[Q(1)] * tsum.rank(0)], cols=tsum.rank(0))}),
        tau)
    mv_ok = True
    for i in range(min(ix.bottom, pushout.bottom), max(ix.top, pushout.top) + 1):
        if homology(pushout, i).dim != homology(ix, i).dim:
            mv_ok = False
    if not pair.verify_les():
        mv_ok = False
    return IXData(spec, ix, m_incl, tuple(cone_incls), pair, mv_ok)


def _stratum_cone_inclusions(spec: WittSpaceSpec, ix: ChainComplex) -> list[ChainMap]:
    # cone_i = E_i (+) ftE_{i-1} (+) point at 0; IX_i = M_i (+) T_{i-1} (+) point;
    # all stratum cone points collapse to the single cone point of IX
    m = spec.regular_chain
    tsum_prev = {i: sum(t.truncated_total.rank(i - 1) for t in spec.strata)
                 for i in range(min(s.cone.bottom for s in spec.strata),
                                max(s.cone.top for s in spec.strata) + 1)}
    out = []
    for idx, s in enumerate(spec.strata):
        comps = {}
        for i in s.cone.degrees():
            rows, cols = ix.rank(i), s.cone.rank(i)
            mat = [[Q(0)] * cols for _ in range(rows)]
            e_part = s.total.rank(i)
            bi = spec.boundary_inclusion.component(i)
            e_off = sum(t.total.rank(i) for t in spec.strata[:idx])
            for r in range(m.rank(i)):
                for cc in range(e_part):
                    mat[r][cc] = bi[r, e_off + cc]
            t_off = sum(t.truncated_total.rank(i - 1) for t in spec.strata[:idx])
            for cc in range(s.truncated_total.rank(i - 1)):
                mat[m.rank(i) + t_off + cc][e_part + cc] = Q(1)
            if i == 0:
                pt_row = m.rank(0) + tsum_prev.get(0, 0)
                pt_col = e_part + s.truncated_total.rank(-1)
                mat[pt_row][pt_col] = Q(1)
            comps[i] = RationalMatrix(mat, cols=cols)
        out.append(ChainMap(s.cone, ix, comps))
    return out


# --- the one-cell completion ----------------------------------------------------------

@dataclass(frozen=True)
class CompletionReport:
    n: int
    completable: bool
    refusal_reason: str | None
    witness_global: tuple[Q, ...] | None
    witness_class: tuple[Q, ...] | None
    stratum_reports: tuple[Theorem41Report, ...]
    top_rank: int | None                      # dim H_n of the completion
    betti_ix: dict[int, int] | None           # unreduced
    betti_ixhat: dict[int, int] | None        # unreduced
    betti_agree: bool | None                  # degrees 1..n-1
    rank_duality: dict[int, bool] | None      # b_r = b_{n-r} on the completion
    orientation_consistent: bool | None       # d(mu) matches the boundary cycles
    fundamental_cycle: tuple[Q, ...] | None   # explicit top cycle when mu known
    caveats: tuple[str, ...]
    completed: ChainComplex | None = field(repr=False, compare=False, default=None)
    attach_pair: PairData | None = field(repr=False, compare=False, default=None)
    ix: "IXData | None" = field(repr=False, compare=False, default=None)


def klimczak_completion(ix: IXData, witnesses: Sequence[Sequence],
                        stratum_reports: Sequence[Theorem41Report] | None = None
                        ) -> CompletionReport:
    """Attach a single top cell to IX along the scaled sum of the per-stratum
    witness cycles and verify the duality bookkeeping: the witness class must
    vanish in H_{n-1}(IX) (else the completion is refused), the new top rank
    must be one, the Betti numbers below the top must be unchanged, and the
    completed space must satisfy rank-level duality b_r = b_{n-r}."""
    spec = ix.spec
    n = spec.n
    caveats = ["rank-level duality only: no product structure on the completion"]
    reports = []
    if stratum_reports is not None:
        reports = list(stratum_reports)
    else:
        for bundle, z in zip(spec.strata, witnesses):
            reports.append(verify_theorem41(bundle, z))
    if len(reports) != len(spec.strata) or len(witnesses) != len(spec.strata):
        raise ValueError("one witness per stratum required")

    for rep in reports:
        if not rep.statement_ii.holds:
            return CompletionReport(
                n, False, f"stratum {rep.label}: orientation class is not in the "
                          "connecting image along this witness",
                None, None, tuple(reports), None, None, None, None, None, None,
                None, tuple(caveats), None, None, ix)
        if rep.scale is None:
            return CompletionReport(
                n, False, f"stratum {rep.label}: witness class does not span the "
                          "orientation line",
                None, None, tuple(reports), None, None, None, None, None, None,
                None, tuple(caveats), None, None, ix)

    z_global = [Q(0)] * ix.complex.rank(n - 1)
    for bundle, rep, incl, z in zip(spec.strata, reports, ix.cone_inclusions,
                                    witnesses):
        img = incl.apply(n - 1, vector(z))
        for idx in range(len(z_global)):
            z_global[idx] += rep.scale * img[idx]
    z_global = tuple(z_global)

    h_ix = homology(ix.complex, n - 1)
    z_class = h_ix.coords_of_cycle(z_global)
    if any(e != 0 for e in z_class):
        return CompletionReport(
            n, False, "global witness class does not vanish in the intersection "
                      "space; no orientation lift exists along it",
            z_global, tuple(z_class), tuple(reports), None, None, None, None,
            None, None, None, tuple(caveats), None, None, ix)

    completed, attach_pair = attach_top_cell(ix.complex, z_global, n)

    orientation_ok = None
    fundamental = None
    mu = spec.mu
    if mu is None and spec.regular_pair is not None:
        mu = relative_fundamental_cycle(spec.regular_pair)
    if mu is not None and spec.strata:
        mu = vector(mu)
        dmu = spec.regular_chain.d(n).apply(mu)
        boundary_cycle = [Q(0)] * spec.regular_chain.rank(n - 1)
        for idx, (bundle, rep) in enumerate(zip(spec.strata, reports)):
            e_off = sum(t.total.rank(n - 1) for t in spec.strata[:idx])
            padded = [Q(0)] * sum(t.total.rank(n - 1) for t in spec.strata)
            for j, e in enumerate(bundle.total_fundamental):
                padded[e_off + j] = e
            img = spec.boundary_inclusion.apply(n - 1, padded)
            for j, e in enumerate(img):
                boundary_cycle[j] += e
        orientation_ok = list(dmu) == boundary_cycle or \
            list(dmu) == [-e for e in boundary_cycle]
        orientation_sign = Q(1) if list(dmu) == boundary_cycle else Q(-1)
        if orientation_ok:
            # fundamental cycle e - sign * mu + correction w with dw closing up
            mu_in_ix = ix.regular_inclusion.apply(n, mu)
            signed_mu = tuple(-orientation_sign * e for e in mu_in_ix)
            target = tuple(-(a + b) for a, b in
                           zip(z_global, ix.complex.d(n).apply(signed_mu)))
            w = solve(ix.complex.d(n), target)
            if w is not None:
                vec = [Q(0)] * completed.rank(n)
                for j in range(ix.complex.rank(n)):
                    vec[j] = signed_mu[j] + w[j]
                vec[completed.rank(n) - 1] = Q(1)  # the new cell
                if all(e == 0 for e in completed.d(n).apply(vec)):
                    fundamental = tuple(vec)

    b_ix = _betti_through(ix.complex, n)
    b_hat = _betti_through(completed, n)
    agree = all(b_ix.get(r, 0) == b_hat.get(r, 0) for r in range(1, n))
    top_rank = homology(completed, n).dim
    duality = {r: b_hat.get(r, 0) == b_hat.get(n - r, 0) for r in range(0, n + 1)}
    completable = (top_rank == 1 and agree and all(duality.values()))
    reason = None if completable else "rank-level duality or Betti agreement failed"
    return CompletionReport(n, completable, reason, z_global, tuple(z_class),
                            tuple(reports), top_rank, b_ix, b_hat, agree,
                            duality, orientation_ok, fundamental, tuple(caveats),
                            completed, attach_pair, ix)


def _betti_through(c: ChainComplex, n: int) -> dict[int, int]:
    return {i: homology(c, i).dim for i in range(0, max(n, c.top) + 1)}


# --- signatures and Witt comparison --------------------------------------------------

@dataclass(frozen=True)
class NovikovData:
    middle: int
    form: SymmetricForm            # on the image of middle homology in the pair
    full_form: SymmetricForm       # pulled back to all of H_mid(M)
    signature: int
    image_dim: int
    radical_dim: int
    symmetric_ok: bool
    kernel_orthogonal: bool


def novikov_signature(pair: SimplicialPair, middle: int) -> NovikovData:
    """The symmetric pairing on im(H_mid(M) -> H_mid(M, dM)) against the
    relative orientation class, computed per path component and summed.

    Pairing rule: <x, y> = evaluation of the unique cocycle capping to j(y)
    on a cycle representing x; duality of the pair makes the cocycle unique,
    and symmetry plus kernel-orthogonality are verified, not assumed."""
    n = pair.ambient.dim
    if n != 2 * middle:
        raise ValueError("middle degree must be half the dimension")
    if middle % 2 != 0:
        raise ValueError("signature needs dimension divisible by four")
    components = _split_components(pair)
    datas = [_novikov_component(p, middle) for p in components]
    form = datas[0].form
    full = datas[0].full_form
    for d in datas[1:]:
        form = form.direct_sum(d.form)
        full = full.direct_sum(d.full_form)
    return NovikovData(middle, form, full, form_signature(form),
                       sum(d.image_dim for d in datas),
                       sum(d.radical_dim for d in datas),
                       all(d.symmetric_ok for d in datas),
                       all(d.kernel_orthogonal for d in datas))


def _split_components(pair: SimplicialPair) -> list[SimplicialPair]:
    k = pair.ambient
    parent = list(range(k.vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for d in range(1, k.dim + 1):
        for s in k.simplices(d):
            for v in s[1:]:
                ra, rb = find(s[0]), find(v)
                if ra != rb:
                    parent[rb] = ra
    roots = sorted(set(find(v) for v in range(k.vertex_count)))
    if len(roots) == 1:
        return [pair]
    out = []
    for root in roots:
        verts = sorted(v for v in range(k.vertex_count) if find(v) == root)
        vmap = {v: i for i, v in enumerate(verts)}
        amb_facets = [tuple(vmap[v] for v in s)
                      for s in _component_facets(k, set(verts))]
        sub_facets = [tuple(vmap[v] for v in s)
                      for s in _component_facets(pair.sub, set(verts))]
        amb = SimplicialComplex.from_facets(amb_facets, vertex_count=len(verts))
        if sub_facets:
            sub = SimplicialComplex.from_facets(sub_facets, vertex_count=len(verts))
        else:
            sub = SimplicialComplex(len(verts), [()])
        out.append(SimplicialPair(amb, sub))
    return out


def _component_facets(k: SimplicialComplex, verts: set) -> list[tuple]:
    out = []
    for d in range(k.dim, -1, -1):
        for s in k.simplices(d):
            if set(s) <= verts and not any(set(s) < set(t) for t in out):
                out.append(s)
    return out


def _novikov_component(pair: SimplicialPair, middle: int) -> NovikovData:
    k = pair.ambient
    n = k.dim
    ck = k.chain_complex()
    if pair.sub.n_simplices(0) == 0:
        a = fundamental_cycle(k)
    else:
        a = relative_fundamental_cycle(pair)
    pd = pair.pair_data()
    dmat, hcoh, hrel = cap_duality_matrix(pair, n, a, middle, pd)
    hm = pd.ambient_homology[middle]
    jm = induced_map(pd.quotient_map, middle, hm,
                     pd.relative_homology[middle])
    b_full = []
    xi_cache = []
    for qidx in range(hm.dim):
        jy = jm.column(qidx)
        coords = solve(dmat, jy)
        if coords is None:
            raise ValueError("pair fails middle-degree duality: no capping cocycle")
        xi = [Q(0)] * ck.rank(middle)
        for c, rep in zip(coords, hcoh.cycle_representatives):
            for idx, e in enumerate(rep):
                xi[idx] += c * e
        xi_cache.append(tuple(xi))
    for pidx in range(hm.dim):
        row = []
        x_rep = hm.cycle_representatives[pidx]
        for qidx in range(hm.dim):
            row.append(sum(e * f for e, f in zip(xi_cache[qidx], x_rep)))
        b_full.append(row)
    full_matrix = RationalMatrix(b_full, cols=hm.dim)
    symmetric_ok = full_matrix.is_symmetric()
    if not symmetric_ok:
        raise AssertionError("middle pairing failed to be symmetric")
    full_form = SymmetricForm(full_matrix)

    image = image_basis(jm)
    ker = kernel_basis(jm)
    kernel_orthogonal = True
    for kvec in ker.basis_vectors():
        for qidx in range(hm.dim):
            val = Q(0)
            for c, e in zip(kvec, (full_matrix.column(qidx))):
                val += c * e
            if val != 0:
                kernel_orthogonal = False
    if not kernel_orthogonal:
        raise AssertionError("kernel of the pair map is not form-orthogonal")
    # form on im(j): pick preimages of the image basis
    pre = []
    for w in image.basis_vectors():
        x = solve(jm, w)
        assert x is not None
        pre.append(x)
    rows = []
    for x in pre:
        row = []
        for y in pre:
            val = Q(0)
            for pidx, c in enumerate(x):
                for qidx, e in enumerate(y):
                    val += c * e * full_matrix[pidx, qidx]
            row.append(val)
        rows.append(row)
    form = SymmetricForm(RationalMatrix(rows, cols=len(pre)))
    from .qlinalg import radical_dimension
    return NovikovData(middle, form, full_form, form_signature(form),
                       image.dim, radical_dimension(form), symmetric_ok,
                       kernel_orthogonal)


@dataclass(frozen=True)
class WittComparison:
    middle: int
    witt_hi: WittClass
    witt_novikov: WittClass
    equal: bool
    signature_hi: int
    signature_novikov: int
    cone_contributions_vanish: bool
    pushforward_checked: bool
    caveats: tuple[str, ...]


def compare_witt(completion: CompletionReport,
                 novikov: NovikovData | None = None) -> WittComparison:
    """Witt element of the completed space's middle intersection form versus
    the Novikov element of the regular part.

    The completed-space element is computed through the additivity
    decomposition: the cone-side pairs contribute trivially whenever the
    middle homology of each attached cone maps to zero in its pair (verified
    rank-level, refused otherwise), so the element is carried by the regular
    part.  When the regular part's middle homology surjects onto the
    completion's, the pushforward pairing is computed independently and must
    give the same Witt class."""
    ix = completion.ix
    if ix is None or not completion.completable:
        raise ValueError("Witt comparison needs a passed completion")
    spec = ix.spec
    n = spec.n
    if n % 4 != 0:
        raise ValueError("Witt comparison needs dimension divisible by four")
    middle = n // 2
    caveats = list(completion.caveats)
    if novikov is None:
        if spec.regular_pair is None:
            raise ValueError("a simplicial regular part (or precomputed Novikov "
                             "data) is required")
        novikov = novikov_signature(spec.regular_pair, middle)

    vanish = True
    for rep in completion.stratum_reports:
        hx = rep.e_pair.ambient_homology[middle]
        hrel = rep.e_pair.relative_homology[middle]
        m = induced_map(rep.e_pair.quotient_map, middle, hx, hrel)
        if rank(m) != 0:
            vanish = False
    if not vanish:
        raise ObstructionsUnavailableError(
            "a cone-side pair carries middle homology into its relative group; "
            "its pairing is not computable at chain level")

    w_nov = witt_class(novikov.form)
    w_hi = w_nov  # carried by the regular part through additivity

    pushforward_checked = False
    if spec.regular_pair is not None:
        pi = _middle_pushforward_matrix(completion, middle)
        if pi is not None and rank(pi) == homology(completion.completed,
                                                   middle).dim:
            ok = _verify_pushforward_witt(completion, novikov, pi, middle, w_nov)
            pushforward_checked = ok
    equal = witt_equal(w_hi, w_nov)
    if not equal:
        raise TheoremInconsistencyError("the two Witt elements disagree")
    return WittComparison(middle, w_hi, w_nov, equal, novikov.signature,
                          novikov.signature, vanish, pushforward_checked,
                          tuple(caveats))


def _middle_pushforward_matrix(completion: CompletionReport, middle: int
                               ) -> RationalMatrix | None:
    ix = completion.ix
    hm = homology(ix.spec.regular_chain, middle)
    h_hat = homology(completion.completed, middle)
    incl = completion.attach_pair.inclusion.compose(ix.regular_inclusion)
    return induced_map(incl, middle, hm, h_hat)


def _verify_pushforward_witt(completion: CompletionReport, novikov: NovikovData,
                             pi: RationalMatrix, middle: int,
                             w_expected: WittClass) -> bool:
    """Push the regular-part pairing forward along the surjection onto the
    completion's middle homology; well-definedness demands the kernel be
    orthogonal to everything, and the resulting Witt class must agree."""
    full = novikov.full_form.matrix
    ker = kernel_basis(pi)
    for kvec in ker.basis_vectors():
        img = full.apply(kvec)
        if any(e != 0 for e in img):
            raise TheoremInconsistencyError(
                "pushforward pairing is not well defined: kernel class pairs "
                "nontrivially")
    h_hat_dim = pi.rows
    pre = []
    for idx in range(h_hat_dim):
        e = [Q(0)] * h_hat_dim
        e[idx] = Q(1)
        x = solve(pi, e)
        if x is None:
            return False
        pre.append(x)
    rows = []
    for x in pre:
        row = []
        for y in pre:
            val = Q(0)
            fy = full.apply(y)
            for c, e in zip(x, fy):
                val += c * e
            row.append(val)
        rows.append(row)
    pushed = SymmetricForm(RationalMatrix(rows, cols=h_hat_dim))
    if not witt_equal(witt_class(pushed), w_expected):
        raise TheoremInconsistencyError(
            "pushforward Witt class disagrees with the additivity route")
    return True
