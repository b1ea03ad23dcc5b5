"""Integral LLL reduction (exact integer arithmetic, delta = 3/4).

The Gram-Schmidt data are kept as the integers ``d_i`` (Gram determinants)
and ``lam[k][j] = d_{j+1} * mu[k][j]``, so no rationals appear.
"""

from __future__ import annotations


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b for b > 0
    return (2 * a + b) // (2 * b)


def lll_reduce(basis: list[list[int]]) -> list[list[int]]:
    """LLL-reduce the rows of ``basis``; rows must be linearly independent."""
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n <= 1:
        return b
    # 1-based bookkeeping mirrors the textbook statement of the algorithm
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("zero vector in basis")
    k, k_max = 2, 1

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = _round_div(lam[k][l], d[l])
            bl = b[l - 1]
            b[k - 1] = [x - q * y for x, y in zip(b[k - 1], bl)]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, k_max + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > k_max:
            k_max = k
            for j in range(1, k + 1):
                u = _dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("basis rows are linearly dependent")
                    d[k] = u
        red(k, k - 1)
        if 4 * d[k] * d[k - 2] < 3 * d[k - 1] ** 2 - 4 * lam[k][k - 1] ** 2:
            swap(k)
            k = max(2, k - 1)
            continue
        for l in range(k - 2, 0, -1):
            red(k, l)
        k += 1
    return b
