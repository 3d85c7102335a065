"""Reference implementations that share no code with the package.

Everything here is written from the defining formulas with plain numpy or
exact rationals, so agreement with the package is evidence rather than
tautology.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def pade_expm(M: np.ndarray, q: int = 8) -> np.ndarray:
    """Matrix exponential by diagonal Pade approximation with scaling and squaring."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    norm = np.abs(M).sum(axis=0).max() if n else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.25)))) if norm > 0.25 else 0
    X = M / 2.0**s
    c = [
        math.factorial(2 * q - k) * math.factorial(q)
        / (math.factorial(2 * q) * math.factorial(k) * math.factorial(q - k))
        for k in range(q + 1)
    ]
    N = np.zeros_like(X)
    D = np.zeros_like(X)
    P = np.eye(n)
    for k in range(q + 1):
        N += c[k] * P
        D += (-1) ** k * c[k] * P
        P = P @ X
    E = np.linalg.solve(D, N)
    for _ in range(s):
        E = E @ E
    return E


def zero_input_flow(A, c_n: float, x0, t: float) -> np.ndarray:
    """x(t) for x' = (A - c_n I) x with A frozen."""
    A = np.asarray(A, dtype=float)
    return pade_expm((A - c_n * np.eye(A.shape[0])) * t) @ np.asarray(x0, dtype=float)


def exact_rank(M) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    rows = [[Fraction(v) for v in row] for row in np.asarray(M).tolist()]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, m) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(m):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def krylov_exact_rank(H, B) -> int:
    """Exact rank of [B, HB, ..., H^(n-1)B] for rational-valued inputs."""
    H = [[Fraction(v) for v in row] for row in np.asarray(H).tolist()]
    B = [[Fraction(v) for v in row] for row in np.atleast_2d(np.asarray(B)).tolist()]
    n = len(H)
    blocks = [B]
    cur = B
    for _ in range(n - 1):
        cur = [[sum(H[i][k] * cur[k][j] for k in range(n)) for j in range(len(cur[0]))] for i in range(n)]
        blocks.append(cur)
    C = [[v for blk in blocks for v in blk[i]] for i in range(n)]
    return exact_rank(C)


def hebbian_reference(A, edges, x, ca_plus, ca_minus, bounds) -> np.ndarray:
    """Element-by-element weight map with tanh activation.

    ``edges`` is an iterable of (i, j, sign) with 1-based nodes; ``bounds`` is
    (a_minus_lo, a_minus_hi, a_plus_lo, a_plus_hi).
    """
    lo_m, hi_m, lo_p, hi_p = bounds
    out = np.array(A, dtype=float)
    for i, j, sign in edges:
        a = A[i - 1][j - 1]
        act = math.tanh(x[i - 1] * x[j - 1])
        if sign == "plus":
            v = min(max(ca_plus * a + act, lo_p), hi_p)
        else:
            v = min(max(ca_minus * a + act, lo_m), hi_m)
        out[i - 1][j - 1] = out[j - 1][i - 1] = v
    return out


def scalar_care(h: float, b: float, q: float, r: float) -> float:
    """Positive root of 2 h p - p^2 b^2 / r + q = 0."""
    g = b * b / r
    return (h + math.sqrt(h * h + g * q)) / g
