import random
from fractions import Fraction as Q

import pytest

from ixspace.qlinalg import (
    DEFAULT_FACTOR_BOUND,
    FactorizationBoundError,
    RationalMatrix,
    Subspace,
    SymmetricForm,
    congruence_diagonalization,
    diagonalize_symmetric,
    image_basis,
    kernel_basis,
    quotient_basis,
    radical_dimension,
    rank,
    rcef,
    signature,
    solve,
    witt_class,
    witt_equal,
)

from conftest import oracle_rank


def M(rows):
    return RationalMatrix(rows)


def test_rank_trivial_cases():
    assert rank(M([[0, 0, 0], [0, 0, 0], [0, 0, 0]])) == 0
    assert rank(RationalMatrix.identity(3)) == 3


def test_rank_derived_example():
    # [[1,2],[2,4]]: second row is twice the first, so rank 1 by hand reduction.
    assert rank(M([[1, 2], [2, 4]])) == 1


def test_rank_matches_independent_oracle_on_random_matrices():
    rng = random.Random(7)
    for _ in range(60):
        nr, nc = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[Q(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(nc)]
                for _ in range(nr)]
        assert rank(M(rows)) == oracle_rank(rows)


def test_rank_nullity():
    rng = random.Random(11)
    for _ in range(40):
        nr, nc = rng.randint(1, 6), rng.randint(1, 6)
        m = M([[rng.randint(-3, 3) for _ in range(nc)] for _ in range(nr)])
        assert rank(m) + kernel_basis(m).dim == m.cols


def test_kernel_trivial_and_derived():
    assert kernel_basis(RationalMatrix.identity(2)).dim == 0
    k = kernel_basis(M([[1, 1]]))
    assert k.dim == 1
    (v,) = k.basis_vectors()
    # span{(1,-1)}
    assert v[0] * Q(-1) == v[1] and v[0] != 0


def test_image_basis_is_canonical():
    a = image_basis(M([[1, 2], [2, 4]]))
    b = image_basis(M([[3], [6]]))
    assert a == b and a.dim == 1


def test_solve_and_no_solution():
    m = M([[1, 2], [3, 4]])
    x = solve(m, [5, 11])
    assert x is not None and m.apply(x) == (Q(5), Q(11))
    assert solve(M([[1, 1], [1, 1]]), [0, 1]) is None


def test_quotient_basis_coordinate_complement():
    e1 = Subspace.from_vectors([[1, 0]], 2)
    full = Subspace.full(2)
    q = quotient_basis(e1, full)
    assert q == Subspace.from_vectors([[0, 1]], 2)


def test_quotient_basis_requires_containment():
    s = Subspace.from_vectors([[1, 0, 0]], 3)
    amb = Subspace.from_vectors([[0, 1, 0], [0, 0, 1]], 3)
    with pytest.raises(ValueError):
        quotient_basis(s, amb)


def test_quotient_plus_sub_spans_ambient():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(2, 5)
        vs = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, n))]
        sub = Subspace.from_vectors(vs, n)
        amb = Subspace.full(n)
        comp = quotient_basis(sub, amb)
        assert sub.dim + comp.dim == n
        joint = sub.basis_vectors() + comp.basis_vectors()
        assert rank(RationalMatrix.from_columns(joint, rows=n)) == n


def test_rcef_is_idempotent_and_span_preserving():
    m = M([[1, 2, 3], [0, 1, 1], [1, 3, 4]])
    c = rcef(m)
    assert rcef(c) == c
    assert image_basis(m) == image_basis(c)


def test_diagonalize_trivial():
    f = SymmetricForm.diagonal([1, -1])
    assert diagonalize_symmetric(f) == [Q(1), Q(-1)]


def test_diagonalize_hyperbolic_plane():
    # completing the square on xy gives one positive and one negative entry
    # with discriminant -1 modulo squares.
    f = SymmetricForm(M([[0, 1], [1, 0]]))
    d = diagonalize_symmetric(f)
    assert sorted(e > 0 for e in d) == [False, True]
    disc = d[0] * d[1]
    assert disc < 0
    # -disc is a square: disc ~ -1 mod squares
    r = (-disc).numerator * (-disc).denominator
    assert int(r ** Q(1, 2)) ** 2 == r


def test_diagonalize_positive_definite_two_by_two():
    # leading principal minors 2 and 3 are positive, so both entries positive.
    f = SymmetricForm(M([[2, 1], [1, 2]]))
    d = diagonalize_symmetric(f)
    assert all(e > 0 for e in d)


def test_congruence_witness():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 5)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                v = Q(rng.randint(-3, 3))
                rows[i][j] = v
                rows[j][i] = v
        f = SymmetricForm(M(rows))
        d, p = congruence_diagonalization(f)
        lhs = p.transpose() * f.matrix * p
        assert lhs == RationalMatrix(
            [[d[i] if i == j else 0 for j in range(n)] for i in range(n)])


def test_signature_examples():
    assert signature(SymmetricForm.diagonal([1, 1, -1])) == 1
    assert signature(SymmetricForm(M([[0, 1], [1, 0]]))) == 0
    # char poly of [[2,1],[1,2]] is (x-1)(x-3): both eigenvalues positive.
    assert signature(SymmetricForm(M([[2, 1], [1, 2]]))) == 2


def test_signature_additivity():
    rng = random.Random(13)
    for _ in range(20):
        f = SymmetricForm.diagonal([rng.randint(-4, 4) for _ in range(3)])
        g = SymmetricForm.diagonal([rng.randint(-4, 4) for _ in range(2)])
        assert signature(f.direct_sum(g)) == signature(f) + signature(g)


def test_radical_reported():
    f = SymmetricForm.diagonal([0, 3, 0])
    assert radical_dimension(f) == 2


def second_residue_oracle(entry, p):
    """Independent second-residue computation for a rank-one form <entry>."""
    e = Q(entry)
    v = 0
    while e.numerator % p == 0:
        e /= p
        v += 1
    while e.denominator % p == 0:
        e *= p
        v -= 1
    if v % 2 == 0:
        return None
    return (e.numerator * pow(e.denominator, -1, p)) % p


def test_witt_hyperbolic_is_zero():
    w = witt_class(SymmetricForm(M([[0, 1], [1, 0]])))
    assert w.signature == 0 and w.residue_data == () and w.dyadic_data == (0, 1)


def test_witt_square_scaling():
    assert witt_equal(SymmetricForm.diagonal([1]), SymmetricForm.diagonal([4]))


def test_witt_three_vs_one():
    w3 = witt_class(SymmetricForm.diagonal([3]))
    w1 = witt_class(SymmetricForm.diagonal([1]))
    assert not witt_equal(w3, w1)
    # the residue at 3 of <3> is the unit 1 with odd valuation
    assert second_residue_oracle(3, 3) == 1
    assert dict(w3.residue_data)[3][0] == 1


def test_witt_residue_against_oracle():
    for entry in [Q(3), Q(5), Q(15), Q(1, 3), Q(-7), Q(12), Q(45)]:
        w = witt_class(SymmetricForm.diagonal([entry]))
        res = dict(w.residue_data)
        for p in (3, 5, 7):
            u = second_residue_oracle(entry, p)
            if u is None:
                assert p not in res or res[p] == (0, 1)
            else:
                assert res[p][0] == 1


def test_witt_factor_bound():
    big = 1000003  # prime above the default bound
    assert big > DEFAULT_FACTOR_BOUND
    with pytest.raises(FactorizationBoundError):
        witt_class(SymmetricForm.diagonal([big]))
    # raising the bound makes it computable
    w = witt_class(SymmetricForm.diagonal([big]), bound=big + 1)
    assert dict(w.residue_data)[big][0] == 1


def test_witt_env_override(monkeypatch):
    big = 1000003
    monkeypatch.setenv("WD_FACTOR_BOUND", str(big + 1))
    w = witt_class(SymmetricForm.diagonal([big]))
    assert dict(w.residue_data)[big][0] == 1


def test_determinism_bit_identical():
    rows = [[Q(1, 2), 3, 0], [3, Q(-2, 5), 1], [0, 1, 7]]
    f = SymmetricForm(M(rows))
    assert diagonalize_symmetric(f) == diagonalize_symmetric(SymmetricForm(M(rows)))
    assert kernel_basis(M(rows)) == kernel_basis(M(rows))
