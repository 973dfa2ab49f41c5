"""Hot kernels with numba and pure-numpy twins.

Every public function here dispatches on the active backend (see
``_backend``).  The private twins are kept importable so the test suite and
the benchmark can compare them directly.

Shapes: ``L`` is a (G, n) matrix of loss vectors, row i = l(p_i); ``P`` is
the (G, n) matrix of grid points.  Entries of ``L`` may be +inf; grid points
are strictly positive, so products with +inf never hit the 0*inf case.
"""

import itertools

import numpy as np

from ._backend import USE_NUMBA, jit


# ---------------------------------------------------------------------------
# pairwise properness scan
# ---------------------------------------------------------------------------
def _worst_violation_loops(L, P, diag):
    # violation[i, j] = <l(p_j); p_j> - <l(p_i); p_j>; proper <=> all <= 0
    G, n = L.shape
    worst = -np.inf
    wi = 0
    wj = 0
    for i in range(G):
        for j in range(G):
            e = 0.0
            for y in range(n):
                e += L[i, y] * P[j, y]
            v = diag[j] - e
            if v > worst:
                worst = v
                wi = i
                wj = j
    return worst, wi, wj


_worst_violation_jit = jit(_worst_violation_loops)


def _worst_violation_numpy(L, P, diag):
    with np.errstate(invalid="ignore"):
        M = L @ P.T  # M[i, j] = <l(p_i); p_j>
        V = diag[None, :] - M
    # inf - inf on self-pairs of infinite rows: not a violation (matches the
    # loop twin, whose nan comparisons are falsy)
    V = np.where(np.isnan(V), -np.inf, V)
    k = int(np.argmax(V))
    i, j = divmod(k, V.shape[1])
    return float(V[i, j]), i, j


def worst_properness_violation(L, P):
    """Largest violation of <l(q);q> <= <l(p);q> over all grid pairs.

    Returns ``(worst, i, j)`` where ``worst`` is the signed worst gap
    (<= 0 means proper on the grid) and ``(i, j)`` indexes the witness pair
    ``p = P[i]``, ``q = P[j]``.
    """
    L = np.ascontiguousarray(L, dtype=np.float64)
    P = np.ascontiguousarray(P, dtype=np.float64)
    diag = np.einsum("ij,ij->i", L, P)
    if USE_NUMBA:
        worst, i, j = _worst_violation_jit(L, P, diag)
        return float(worst), int(i), int(j)
    return _worst_violation_numpy(L, P, diag)


# ---------------------------------------------------------------------------
# pairwise expected-loss matrix (used by Bregman / regret scans)
# ---------------------------------------------------------------------------
def _expected_matrix_loops(L, P):
    G, n = L.shape
    M = np.empty((G, G))
    for i in range(G):
        for j in range(G):
            e = 0.0
            for y in range(n):
                e += L[i, y] * P[j, y]
            M[i, j] = e
    return M


_expected_matrix_jit = jit(_expected_matrix_loops)


def _expected_matrix_numpy(L, P):
    return L @ P.T


def expected_loss_matrix(L, P):
    """M[i, j] = <l(p_i); p_j> for all grid pairs."""
    L = np.ascontiguousarray(L, dtype=np.float64)
    P = np.ascontiguousarray(P, dtype=np.float64)
    if USE_NUMBA:
        return _expected_matrix_jit(L, P)
    return _expected_matrix_numpy(L, P)


# ---------------------------------------------------------------------------
# lattice compositions (simplex grids)
# ---------------------------------------------------------------------------
def _compositions_loops(total, parts):
    # ascending lexicographic enumeration via the standard successor step:
    # bump the rightmost position whose suffix still carries mass, zero the
    # suffix, park the remainder in the last slot
    count = 1
    for i in range(parts - 1):
        count = count * (total + i + 1) // (i + 1)
    out = np.zeros((count, parts), dtype=np.int64)
    k = np.zeros(parts, dtype=np.int64)
    k[parts - 1] = total
    row = 0
    while True:
        for y in range(parts):
            out[row, y] = k[y]
        row += 1
        if row == count:
            break
        i = parts - 2
        tail = k[parts - 1]
        while tail == 0:
            tail = 0
            i -= 1
            for y in range(i + 1, parts):
                tail += k[y]
        k[i] += 1
        for y in range(i + 1, parts):
            k[y] = 0
        k[parts - 1] = tail - 1
    return out


_compositions_jit = jit(_compositions_loops)


def _compositions_numpy(total, parts):
    # stars and bars through itertools.combinations (C speed), lex ascending
    m = total + parts - 1
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(m), parts - 1)),
        dtype=np.int64,
    ).reshape(-1, parts - 1)
    edges = np.hstack(
        [
            np.full((combos.shape[0], 1), -1, dtype=np.int64),
            combos,
            np.full((combos.shape[0], 1), m, dtype=np.int64),
        ]
    )
    return np.diff(edges, axis=1) - 1


def compositions(total: int, parts: int) -> np.ndarray:
    """All length-``parts`` tuples of nonnegative ints summing to ``total``.

    Rows are in ascending lexicographic order; shape
    (C(total+parts-1, parts-1), parts).
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < 0:
        raise ValueError("total must be >= 0")
    if parts == 1:
        return np.full((1, 1), total, dtype=np.int64)
    if USE_NUMBA:
        return _compositions_jit(total, parts)
    return _compositions_numpy(total, parts)
