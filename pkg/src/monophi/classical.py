"""Classical stochastic backend: probability tables over finite metric spaces.

A process from A to B is a dense nonnegative table ``f[a, b]`` (row = input
point, column = output point); causal processes are the row-stochastic ones.
Distributions are flat nonnegative vectors over the little-endian product
index (see :mod:`monophi.indexing`).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .indexing import as_axes, flatten_index, product_dim

TOL_CAUSAL = 1e-9
_RC_TOL = 1e-12  # reduced-cost threshold for the transport solver
_MAX_PIVOTS = 20000


# ---------------------------------------------------------------------------
# table algebra
# ---------------------------------------------------------------------------

def compose_tables(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Table of "f then g": (g @ f)(a, c) = sum_b f(a, b) g(b, c)."""
    return f @ g


def tensor_tables(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Side-by-side table on the little-endian product index.

    The first factor is the fast index, so the slow (second) factor is the
    left Kronecker operand.
    """
    return np.kron(g, f)


def dagger_table(f: np.ndarray) -> np.ndarray:
    return f.T.copy()


def identity_table(dim: int) -> np.ndarray:
    return np.eye(dim)


def discard_table(dim: int) -> np.ndarray:
    return np.ones((dim, 1))


def mixed_vector(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def apply_table(dist: np.ndarray, f: np.ndarray) -> np.ndarray:
    return dist @ f


def kron_vec(slow: np.ndarray, fast: np.ndarray) -> np.ndarray:
    """Kronecker product of vectors with ``fast`` as the fast index."""
    return np.multiply.outer(slow, fast).reshape(-1)


def permutation_table(perm: np.ndarray) -> np.ndarray:
    table = np.zeros((perm.size, perm.size))
    table[np.arange(perm.size), perm] = 1.0
    return table


def is_row_stochastic(f: np.ndarray, tol: float = TOL_CAUSAL) -> bool:
    return bool(np.all(np.abs(f.sum(axis=1) - 1.0) <= tol))


def preserves_uniform(f: np.ndarray, tol: float = TOL_CAUSAL) -> bool:
    dom, cod = f.shape
    return bool(np.all(np.abs(f.sum(axis=0) / dom - 1.0 / cod) <= tol))


def marginalize(dist: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Sum out every element not in ``keep`` (kept elements stay in order)."""
    drop = tuple(i for i in range(len(dims)) if i not in keep)
    if not drop:
        return dist.copy()
    axes = as_axes(dist, dims)
    return axes.sum(axis=drop).reshape(-1, order="F")


# ---------------------------------------------------------------------------
# copying and comparison (the canonical Frobenius structure)
# ---------------------------------------------------------------------------

def copy_table(dim: int, copies: int) -> np.ndarray:
    """Broadcast a point to ``copies`` identical points: a -> (a, ..., a)."""
    if copies < 1:
        raise ValidationError("copy needs at least one output branch")
    table = np.zeros((dim, dim**copies))
    stride = sum(dim**i for i in range(copies))
    for a in range(dim):
        table[a, a * stride] = 1.0
    return table


def compare_table(dim: int, copies: int) -> np.ndarray:
    """Merge equal points: (a, ..., a) -> a, everything unequal -> 0."""
    if copies < 1:
        raise ValidationError("compare needs at least one input branch")
    stride = sum(dim**i for i in range(copies))
    table = np.zeros((dim**copies, dim))
    for a in range(dim):
        table[a * stride, a] = 1.0
    return table


# ---------------------------------------------------------------------------
# ground metrics
# ---------------------------------------------------------------------------

def point_metric(dim: int) -> np.ndarray:
    return 1.0 - np.eye(dim)


def sum_metric(ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    """Product-space metric d((a,b),(a',b')) = d(a,a') + d(b,b')."""
    da, db = ma.shape[0], mb.shape[0]
    return np.kron(mb, np.ones((da, da))) + np.kron(np.ones((db, db)), ma)


def check_metric(m: np.ndarray, tol: float = 1e-9) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("metric table must be square")
    if np.any(m < -tol):
        raise ValidationError("metric table has negative entries")
    if np.any(np.abs(np.diag(m)) > tol):
        raise ValidationError("metric table has a nonzero diagonal")
    if np.any(np.abs(m - m.T) > tol):
        raise ValidationError("metric table is not symmetric")
    best = np.min(m[:, None, :] + m.T[None, :, :].transpose(0, 2, 1), axis=2)
    if np.any(m > best + tol):
        raise ValidationError("metric table violates the triangle inequality")


def restrict_metric(metric: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Metric on the kept elements, read off the section at complement = 0.

    Well defined for every metric this package constructs (sums of
    per-element tables and the global point metric).
    """
    idx = np.zeros(product_dim(tuple(dims[i] for i in keep)), dtype=np.intp)
    sub_dims = tuple(dims[i] for i in keep)
    for flat in range(idx.size):
        config = [0] * len(dims)
        rem = flat
        for pos, i in enumerate(keep):
            config[i] = rem % sub_dims[pos]
            rem //= sub_dims[pos]
        idx[flat] = flatten_index(tuple(config), dims)
    return metric[np.ix_(idx, idx)].copy()


def permute_metric(metric: np.ndarray, perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return metric[np.ix_(inv, inv)].copy()


# ---------------------------------------------------------------------------
# earth mover's distance
# ---------------------------------------------------------------------------

def emd(s: np.ndarray, t: np.ndarray, metric: np.ndarray, *,
        tol_causal: float = TOL_CAUSAL, validate: bool = True) -> float:
    """Optimal-transport cost between two probability vectors.

    Solved with a transportation simplex (northwest-corner start, Bland's
    entering rule, lexicographic leaving rule) so repeated runs are
    bit-identical.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if validate:
        for name, v in (("first", s), ("second", t)):
            if v.ndim != 1 or v.size != metric.shape[0]:
                raise ValidationError(f"{name} distribution has wrong size")
            if np.any(v < -tol_causal):
                raise ValidationError(f"{name} distribution has negative mass")
            if abs(v.sum() - 1.0) > tol_causal:
                raise ValidationError(f"{name} distribution is not normalised")
    if np.array_equal(s, t):
        return 0.0
    supply = np.maximum(s, 0.0)
    demand = np.maximum(t, 0.0)
    demand = demand * (supply.sum() / demand.sum())
    rows = np.flatnonzero(supply)
    cols = np.flatnonzero(demand)
    if rows.size == 1:
        return float(np.dot(demand, metric[rows[0]]))
    if cols.size == 1:
        return float(np.dot(supply, metric[:, cols[0]]))
    return _transport_simplex(supply[rows], demand[cols],
                              np.ascontiguousarray(metric[np.ix_(rows, cols)]))


def _northwest_corner(supply: np.ndarray, demand: np.ndarray):
    m, n = supply.size, demand.size
    rs, rd = supply.copy(), demand.copy()
    basis: list[tuple[int, int]] = []
    alloc: dict[tuple[int, int], float] = {}
    i = j = 0
    while True:
        a = min(rs[i], rd[j])
        basis.append((i, j))
        alloc[(i, j)] = a
        rs[i] -= a
        rd[j] -= a
        if i == m - 1 and j == n - 1:
            break
        if i < m - 1 and (rs[i] <= rd[j] or j == n - 1):
            i += 1
        else:
            j += 1
    return basis, alloc


def _potentials(rows, cols, cost, m, n):
    u = [None] * m
    v = [None] * n
    u[0] = 0.0
    stack = [(True, 0)]
    while stack:
        is_row, k = stack.pop()
        if is_row:
            uk = u[k]
            for j in rows[k]:
                if v[j] is None:
                    v[j] = cost[k, j] - uk
                    stack.append((False, j))
        else:
            vk = v[k]
            for i in cols[k]:
                if u[i] is None:
                    u[i] = cost[i, k] - vk
                    stack.append((True, i))
    return np.array(u, dtype=float), np.array(v, dtype=float)


def _cycle(rows, cols, entering, m):
    """Cells of the unique cycle closed by ``entering``, starting with it.

    ``rows[i]``/``cols[j]`` give the basis adjacency; nodes are encoded as
    ``i`` for rows and ``m + j`` for columns.
    """
    i0, j0 = entering
    start, goal = m + j0, i0
    parent = {start: (start, None)}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        if node >= m:
            j = node - m
            for i in cols[j]:
                if i not in parent:
                    parent[i] = (node, (i, j))
                    stack.append(i)
        else:
            for j in rows[node]:
                nxt = m + j
                if nxt not in parent:
                    parent[nxt] = (node, (node, j))
                    stack.append(nxt)
    cells = [entering]
    node = goal
    while node != start:
        prev, edge = parent[node]
        cells.append(edge)
        node = prev
    return cells


def _transport_simplex(supply: np.ndarray, demand: np.ndarray, cost: np.ndarray) -> float:
    m, n = cost.shape
    basis, alloc = _northwest_corner(supply, demand)
    basic = np.zeros((m, n), dtype=bool)
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for i, j in basis:
        basic[i, j] = True
        rows[i].append(j)
        cols[j].append(i)
    for _ in range(_MAX_PIVOTS):
        u, v = _potentials(rows, cols, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        improving = (reduced < -_RC_TOL) & ~basic
        if not improving.any():
            break
        flat = int(np.argmax(improving))  # first True in row-major = Bland's rule
        entering = (flat // n, flat % n)
        cells = _cycle(rows, cols, entering, m)
        minus = cells[1::2]
        theta = min(alloc[c] for c in minus)
        leaving = min(c for c in minus if alloc[c] == theta)
        for pos, c in enumerate(cells):
            if pos == 0:
                alloc[c] = theta
            elif pos % 2:
                alloc[c] -= theta
            else:
                alloc[c] += theta
        del alloc[leaving]
        basic[leaving] = False
        basic[entering] = True
        rows[leaving[0]].remove(leaving[1])
        cols[leaving[1]].remove(leaving[0])
        rows[entering[0]].append(entering[1])
        cols[entering[1]].append(entering[0])
    else:
        raise RuntimeError("transport solver failed to converge")
    return float(sum(cost[c] * alloc[c] for c in sorted(alloc)))
