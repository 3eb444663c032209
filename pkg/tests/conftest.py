"""Shared independent oracles.

These deliberately avoid the library's own elimination code paths: oracle_rank
uses last-nonzero pivoting and plain fraction arithmetic, so rank agreement is
a genuine cross-check rather than the same algorithm run twice.
"""

from fractions import Fraction


def oracle_rank(rows) -> int:
    a = [[Fraction(e) for e in row] for row in rows]
    if not a or not a[0]:
        return 0
    nr, nc = len(a), len(a[0])
    r = 0
    for c in range(nc - 1, -1, -1):  # columns right-to-left
        piv = None
        for i in range(nr - 1, r - 1, -1):  # rows bottom-up
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == nr:
            break
    return r


def oracle_betti(ranks_by_degree, boundaries, degree) -> int:
    """dim H_degree = (rank C_degree - rank d_degree) - rank d_{degree+1}."""
    n = ranks_by_degree.get(degree, 0)
    if n == 0:
        return 0
    d_here = boundaries.get(degree)
    d_above = boundaries.get(degree + 1)
    rk_here = oracle_rank(d_here) if d_here else 0
    rk_above = oracle_rank(d_above) if d_above else 0
    return n - rk_here - rk_above
