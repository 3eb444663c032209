"""Exact linear algebra over Q.

Everything downstream (homology, truncations, duality verdicts, signatures)
reduces to the routines in this module, so the contract here is strict:
entries are `fractions.Fraction` (always in lowest terms with positive
denominator, which Fraction guarantees), no floats anywhere, and every
operation is deterministic -- pivots are always the first nonzero entry in
column order.  All values are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

DEFAULT_FACTOR_BOUND = 10 ** 6
FACTOR_BOUND_ENV = "WD_FACTOR_BOUND"


class FactorizationBoundError(ValueError):
    """A Witt-invariant computation hit a factor above the trial-division bound."""


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def vector(entries: Iterable) -> tuple[Fraction, ...]:
    return tuple(_q(e) for e in entries)


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return all(e == 0 for e in v)


class RationalMatrix:
    """Immutable matrix over Q, stored dense as a tuple of row tuples.

    `cols` must be passed explicitly when constructing a matrix with no rows,
    since the shape cannot be read off the (empty) entry list.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        rows = tuple(tuple(_q(e) for e in row) for row in entries)
        self.entries = rows
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else (cols or 0)
        for row in rows:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RationalMatrix":
        cols = [vector(c) for c in columns]
        if rows is None:
            if not cols:
                raise ValueError("row count needed for a matrix with no columns")
            rows = len(cols[0])
        for c in cols:
            if len(c) != rows:
                raise ValueError("column length mismatch")
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(rows)],
                   cols=len(cols))

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([[self.entries[i][j] for i in range(self.rows)]
                               for j in range(self.cols)], cols=self.rows)

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
            # row-sparse product: skip zero entries of the left factor
            oe = other.entries
            zero = Q(0)
            out = []
            for row in self.entries:
                nz = [(j, v) for j, v in enumerate(row) if v]
                if not nz:
                    out.append([zero] * other.cols)
                    continue
                acc = [zero] * other.cols
                for j, v in nz:
                    orow = oe[j]
                    for k in range(other.cols):
                        w = orow[k]
                        if w:
                            acc[k] += v * w
                out.append(acc)
            return RationalMatrix(out, cols=other.cols)
        if isinstance(other, (tuple, list)):
            return self.apply(other)
        return NotImplemented

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        v = vector(v)
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != cols {self.cols}")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def scale(self, c) -> "RationalMatrix":
        c = _q(c)
        return RationalMatrix([[c * e for e in row] for row in self.entries],
                              cols=self.cols)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return RationalMatrix([[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.entries, other.entries)],
                              cols=self.cols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other.scale(-1)

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalMatrix)
                and self.entries == other.entries
                and self.cols == other.cols)

    def __hash__(self):
        return hash((self.cols, self.entries))

    def is_zero(self) -> bool:
        return all(e == 0 for row in self.entries for e in row)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols))

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return RationalMatrix([r1 + r2 for r1, r2 in zip(self.entries, other.entries)],
                              cols=self.cols + other.cols)

    def submatrix_columns(self, js: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([[row[j] for j in js] for row in self.entries],
                              cols=len(js))

    def __repr__(self):
        body = "; ".join(" ".join(str(e) for e in row) for row in self.entries)
        return f"RationalMatrix({self.rows}x{self.cols}: {body})"


def block_diagonal(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[Q(0)] * cols for _ in range(rows)]
    i0 = j0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[i0 + i][j0 + j] = b.entries[i][j]
        i0 += b.rows
        j0 += b.cols
    return RationalMatrix(out, cols=cols)


# --- elimination cores ------------------------------------------------------

def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a >= 0 else -a


def _sparse_int_rows(m: RationalMatrix) -> list[dict]:
    """Denominator-cleared rows as {column: nonzero int} dicts."""
    out = []
    for row in m.entries:
        lcm = 1
        for e in row:
            if e.denominator != 1:
                lcm = lcm * e.denominator // _gcd(lcm, e.denominator)
        out.append({j: int(e * lcm) for j, e in enumerate(row) if e})
    return out


def _eliminate(rows: list[dict], nc: int, full: bool) -> tuple[int, ...]:
    """Integer row elimination in place with the first-nonzero pivot rule and
    per-row gcd reduction (fraction-free: only cross-multiplications, no
    division by pivots).  `full` also clears entries above the pivots, which
    yields the reduced echelon shape up to row scaling."""
    nr = len(rows)
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i].get(c):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        pv = prow[c]
        targets = range(nr) if full else range(r + 1, nr)
        for i in targets:
            if i == r:
                continue
            f = rows[i].get(c)
            if not f:
                continue
            ri = rows[i]
            new = {k: pv * v for k, v in ri.items()}
            for k, v in prow.items():
                w = new.get(k, 0) - f * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            g = 0
            for v in new.values():
                g = _gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                new = {k: v // g for k, v in new.items()}
            rows[i] = new
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return tuple(pivots)


def rank(m: RationalMatrix) -> int:
    """Rank by fraction-free integer elimination (cross-multiplication with
    gcd reduction) on the denominator-cleared matrix.  Pivot = first nonzero
    entry in column order."""
    if m.rows == 0 or m.cols == 0:
        return 0
    rows = _sparse_int_rows(m)
    return len(_eliminate(rows, m.cols, full=False))


def rref(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Reduced row echelon form with the first-nonzero pivot rule.

    The RREF of a matrix is unique, so the implementation is free to eliminate
    on denominator-cleared sparse integer rows and divide by the pivots only
    at the end."""
    nr, nc = m.rows, m.cols
    rows = _sparse_int_rows(m)
    pivots = _eliminate(rows, nc, full=True)
    zero = Q(0)
    out = []
    for i in range(nr):
        dense = [zero] * nc
        if i < len(pivots):
            pv = Q(rows[i][pivots[i]])
            for k, v in rows[i].items():
                dense[k] = Q(v) / pv
        else:
            for k, v in rows[i].items():
                dense[k] = Q(v)
        out.append(dense)
    return RationalMatrix(out, cols=nc), tuple(pivots)


def rcef(m: RationalMatrix) -> RationalMatrix:
    """Reduced column echelon form: the canonical basis matrix of the column
    span (zero columns dropped).  Subspace equality is equality of this."""
    r, pivots = rref(m.transpose())
    cols = [r.row(i) for i in range(len(pivots))]
    return RationalMatrix.from_columns(cols, rows=m.rows)


def solve(m: RationalMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of m x = b (free variables set to 0), or None."""
    b = vector(b)
    if len(b) != m.rows:
        raise ValueError("rhs length mismatch")
    if m.cols == 0:
        return () if is_zero_vector(b) else None
    aug = m.hstack(RationalMatrix.from_columns([b], rows=m.rows))
    r, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Q(0)] * m.cols
    for i, c in enumerate(pivots):
        x[c] = r[i, m.cols]
    return tuple(x)


def solve_matrix(m: RationalMatrix, rhs: RationalMatrix) -> RationalMatrix | None:
    """Solve m X = rhs column by column with one shared elimination; returns
    None if any column has no solution.  Free variables are set to 0."""
    if m.rows != rhs.rows:
        raise ValueError("rhs row count mismatch")
    if rhs.cols == 0:
        return RationalMatrix.zero(m.cols, 0)
    aug = m.hstack(rhs)
    r, pivots = rref(aug)
    if any(p >= m.cols for p in pivots):
        return None
    out = [[Q(0)] * rhs.cols for _ in range(m.cols)]
    for i, c in enumerate(pivots):
        for j in range(rhs.cols):
            out[c][j] = r[i, m.cols + j]
    return RationalMatrix(out, cols=rhs.cols)


def inverse(m: RationalMatrix) -> RationalMatrix:
    if m.rows != m.cols:
        raise ValueError("only square matrices invert")
    out = solve_matrix(m, RationalMatrix.identity(m.rows))
    if out is None or rank(m) != m.rows:
        raise ValueError("matrix is singular")
    return out


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n, canonically represented by its RCEF basis matrix."""

    ambient_dim: int
    basis: RationalMatrix  # columns form the basis, in reduced column echelon form

    @classmethod
    def from_vectors(cls, vectors_: Sequence[Sequence], ambient_dim: int) -> "Subspace":
        cols = [vector(v) for v in vectors_]
        for c in cols:
            if len(c) != ambient_dim:
                raise ValueError("vector length != ambient dimension")
        if not cols:
            return cls(ambient_dim, RationalMatrix.zero(ambient_dim, 0))
        return cls(ambient_dim, rcef(RationalMatrix.from_columns(cols, rows=ambient_dim)))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RationalMatrix.zero(ambient_dim, 0))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RationalMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.cols

    def contains(self, v: Sequence) -> bool:
        return self.coords(v) is not None

    def coords(self, v: Sequence) -> tuple[Fraction, ...] | None:
        """Coordinates of v in the canonical basis, or None if v is outside."""
        return solve(self.basis, v)

    def basis_vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.columns()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))


def kernel_basis(m: RationalMatrix) -> Subspace:
    r, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    vectors_ = []
    for f in free:
        v = [Q(0)] * m.cols
        v[f] = Q(1)
        for i, c in enumerate(pivots):
            v[c] = -r[i, f]
        vectors_.append(v)
    return Subspace.from_vectors(vectors_, m.cols)


def image_basis(m: RationalMatrix) -> Subspace:
    if m.cols == 0:
        return Subspace.zero(m.rows)
    return Subspace(m.rows, rcef(m))


class _Eliminator:
    """Incremental row-echelon store for membership and independence tests."""

    __slots__ = ("rows", "pivots")

    def __init__(self):
        self.rows = []
        self.pivots = []

    def reduce(self, v: Sequence) -> list[Fraction]:
        v = list(vector(v))
        for p, row in zip(self.pivots, self.rows):
            if v[p] != 0:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def insert(self, v: Sequence) -> bool:
        """Reduce v against the store; insert the residue if nonzero.
        Returns True when v was independent of the current span."""
        res = self.reduce(v)
        for p, e in enumerate(res):
            if e != 0:
                inv = e
                self.rows.append([x / inv for x in res])
                self.pivots.append(p)
                return True
        return False


def quotient_basis(sub: Subspace, ambient: Subspace) -> Subspace:
    """Representatives of a complement of `sub` inside `ambient`.

    Greedy extension of sub's basis by ambient's canonical basis vectors, in
    order; the chosen vectors are then RCEF-canonicalized.  Errors if sub is
    not contained in ambient.
    """
    if sub.ambient_dim != ambient.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    amb = _Eliminator()
    for v in ambient.basis_vectors():
        amb.insert(v)
    elim = _Eliminator()
    for v in sub.basis_vectors():
        if any(e != 0 for e in amb.reduce(v)):
            raise ValueError("sub is not contained in ambient")
        elim.insert(v)
    chosen = []
    for v in ambient.basis_vectors():
        if elim.insert(v):
            chosen.append(v)
    return Subspace.from_vectors(chosen, sub.ambient_dim)


# --- symmetric forms --------------------------------------------------------

class SymmetricForm:
    """A rational symmetric bilinear form, given by its Gram matrix."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix: RationalMatrix):
        if not matrix.is_symmetric():
            raise ValueError("matrix is not symmetric")
        self.matrix = matrix
        self.dim = matrix.rows

    @classmethod
    def diagonal(cls, entries: Sequence) -> "SymmetricForm":
        es = vector(entries)
        n = len(es)
        return cls(RationalMatrix([[es[i] if i == j else 0 for j in range(n)]
                                   for i in range(n)]))

    def direct_sum(self, other: "SymmetricForm") -> "SymmetricForm":
        return SymmetricForm(block_diagonal([self.matrix, other.matrix]))

    def __eq__(self, other):
        return isinstance(other, SymmetricForm) and self.matrix == other.matrix

    def __repr__(self):
        return f"SymmetricForm({self.matrix!r})"


def congruence_diagonalization(f: SymmetricForm) -> tuple[list[Fraction], RationalMatrix]:
    """Diagonalize by symmetric row/column operations.

    Returns (diagonal entries, P) with P^T * f.matrix * P the diagonal matrix.
    Zero entries are kept (they count the radical).  Deterministic: always the
    first usable pivot, and the classical row+col addition trick when the
    diagonal vanishes but an off-diagonal entry does not.
    """
    n = f.dim
    a = [list(row) for row in f.matrix.entries]
    p = [[Q(1) if i == j else Q(0) for j in range(n)] for i in range(n)]

    def add_col(dst, src, c):
        # column op on a (and p): col_dst += c * col_src
        for i in range(n):
            a[i][dst] += c * a[i][src]
            p[i][dst] += c * p[i][src]

    def add_row(dst, src, c):
        for j in range(n):
            a[dst][j] += c * a[src][j]

    def swap(i, j):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
            p[r][i], p[r][j] = p[r][j], p[r][i]
        a[i], a[j] = a[j], a[i]

    for i in range(n):
        if a[i][i] == 0:
            pivot = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if pivot is not None:
                swap(i, pivot)
            else:
                off = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if off is None:
                    continue  # whole trailing row/col is zero: radical direction
                add_col(i, off, Q(1))
                add_row(i, off, Q(1))
        for j in range(i + 1, n):
            if a[i][j] != 0:
                c = -a[i][j] / a[i][i]
                add_col(j, i, c)
                add_row(j, i, c)
    return [a[i][i] for i in range(n)], RationalMatrix(p)


def diagonalize_symmetric(f: SymmetricForm) -> list[Fraction]:
    return congruence_diagonalization(f)[0]


def radical_dimension(f: SymmetricForm) -> int:
    return sum(1 for e in diagonalize_symmetric(f) if e == 0)


def signature(f: SymmetricForm) -> int:
    entries = diagonalize_symmetric(f)
    return sum(1 for e in entries if e > 0) - sum(1 for e in entries if e < 0)


# --- Witt invariants --------------------------------------------------------

def _factor_bound(bound: int | None) -> int:
    if bound is not None:
        return bound
    env = os.environ.get(FACTOR_BOUND_ENV)
    if env:
        return int(env)
    return DEFAULT_FACTOR_BOUND


def _trial_factor(n: int, bound: int) -> dict[int, int]:
    """Prime factorization of n > 0 by trial division up to `bound`."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n and d <= bound:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        if n > bound:
            raise FactorizationBoundError(
                f"factor {n} exceeds the trial-division bound {bound}")
        factors[n] = factors.get(n, 0) + 1
    return factors


def _legendre(a: int, p: int) -> int:
    """Legendre symbol of a mod the odd prime p; a must be a unit mod p."""
    r = pow(a % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class WittClass:
    """Witt invariants of a nondegenerate symmetric form over Q.

    Complete by the residue exact sequence: the signature plus, for each prime,
    the pair (rank mod 2, signed discriminant class) of the second-residue form
    over F_p.  Only nontrivial residue entries are stored, so equality of these
    records is equality in the Witt group.
    """

    signature: int
    residue_data: tuple[tuple[int, tuple[int, int]], ...]  # (p, (rank mod 2, legendre of signed disc))
    dyadic_data: tuple[int, int]  # (rank mod 2 at 2, trivial square class tag)

    def __repr__(self):
        res = {p: d for p, d in self.residue_data}
        return f"WittClass(sig={self.signature}, residues={res}, dyadic={self.dyadic_data})"


def witt_class(f: SymmetricForm, bound: int | None = None) -> WittClass:
    """Witt class of f (radical quotiented away first).

    Each diagonal entry is factored by trial division; the second-residue form
    at an odd prime p collects the units u of entries u * p^e with e odd, and is
    recorded by (rank mod 2, Legendre symbol of its signed discriminant
    (-1)^(m(m-1)/2) * det).  At p = 2 only the rank parity survives.
    """
    bound = _factor_bound(bound)
    entries = [e for e in diagonalize_symmetric(f) if e != 0]
    sig = sum(1 for e in entries if e > 0) - sum(1 for e in entries if e < 0)

    residues: dict[int, list[int]] = {}  # p -> unit residues mod p
    dyadic_rank = 0
    for e in entries:
        num, den = abs(e.numerator), e.denominator
        factors = _trial_factor(num, bound) if num > 1 else {}
        for p, k in (_trial_factor(den, bound) if den > 1 else {}).items():
            factors[p] = factors.get(p, 0) - k
        for p, k in sorted(factors.items()):
            if k % 2 == 0:
                continue
            if p == 2:
                dyadic_rank += 1
                continue
            unit = e / Q(p) ** k
            u = (unit.numerator * pow(unit.denominator, -1, p)) % p
            residues.setdefault(p, []).append(u)

    residue_data = []
    for p in sorted(residues):
        us = residues[p]
        m = len(us)
        det = 1
        for u in us:
            det = (det * u) % p
        if m * (m - 1) // 2 % 2 == 1:
            det = (-det) % p
        inv = (m % 2, _legendre(det, p))
        if inv != (0, 1):
            residue_data.append((p, inv))
    return WittClass(sig, tuple(residue_data), (dyadic_rank % 2, 1))


def witt_equal(a: SymmetricForm | WittClass, b: SymmetricForm | WittClass,
               bound: int | None = None) -> bool:
    wa = a if isinstance(a, WittClass) else witt_class(a, bound)
    wb = b if isinstance(b, WittClass) else witt_class(b, bound)
    return (wa.signature == wb.signature
            and wa.residue_data == wb.residue_data
            and wa.dyadic_data == wb.dyadic_data)
