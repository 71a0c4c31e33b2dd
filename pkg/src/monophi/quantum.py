"""Quantum backend: completely positive maps stored as Choi matrices.

A process from a ``d_in``-dimensional to a ``d_out``-dimensional Hilbert
space is the Choi matrix ``J = sum_ij |i><j| (x) f(|i><j|)`` laid out as a
``(d_in*d_out) x (d_in*d_out)`` complex array with the input index major.
Internally most operations work on the four-index view
``C[i, k, j, l] = <k| f(|i><j|) |l>``.

Composite Hilbert spaces use the same little-endian element convention as
the classical backend (first element = fastest index).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

TOL_CPTP = 1e-8
TOL_PSD = 1e-9
TOL_HERM = 1e-10


def c4(choi: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Four-index view of a Choi matrix."""
    return choi.reshape(d_in, d_out, d_in, d_out)


def c2(choi4: np.ndarray) -> np.ndarray:
    d_in, d_out = choi4.shape[0], choi4.shape[1]
    return choi4.reshape(d_in * d_out, d_in * d_out)


def identity_choi(dim: int) -> np.ndarray:
    vec = np.eye(dim, dtype=complex).reshape(-1)
    return np.outer(vec, vec.conj())


def compose_choi(f: np.ndarray, g: np.ndarray, dims: tuple[int, int, int]) -> np.ndarray:
    """Choi of "f then g" for f: a -> b and g: b -> c, dims = (a, b, c)."""
    da, db, dc = dims
    out = np.einsum("ikjl,kmln->imjn", c4(f, da, db), c4(g, db, dc))
    return c2(out)


def tensor_choi(f: np.ndarray, g: np.ndarray,
                f_dims: tuple[int, int], g_dims: tuple[int, int]) -> np.ndarray:
    """Choi of the side-by-side map on little-endian composite spaces."""
    da, db = f_dims
    dc, dd = g_dims
    out = np.einsum("abij,cdkl->cadbkilj",
                    c4(f, da, db), c4(g, dc, dd)).reshape(da * dc, db * dd, da * dc, db * dd)
    return c2(out)


def dagger_choi(f: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Hilbert-Schmidt adjoint: Tr[f(x)^dag y] = Tr[x^dag f^dag(y)]."""
    return c2(c4(f, d_in, d_out).conj().transpose(1, 0, 3, 2))


def apply_choi(f: np.ndarray, rho: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    return np.einsum("ij,ikjl->kl", rho, c4(f, d_in, d_out))


def discard_choi(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex).reshape(dim, 1, dim, 1).reshape(dim, dim)


def mixed_state(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def mixed_choi(dim: int) -> np.ndarray:
    """Choi of the preparation I -> mixed state."""
    return (np.eye(dim, dtype=complex) / dim).reshape(1, dim, 1, dim).reshape(dim, dim)


def unitary_channel(u: np.ndarray) -> np.ndarray:
    return c2(np.einsum("ki,lj->ikjl", u, u.conj()))


def kraus_to_choi(kraus: list[np.ndarray]) -> np.ndarray:
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise ValidationError("empty Kraus list")
    d_out, d_in = ops[0].shape
    choi4 = np.zeros((d_in, d_out, d_in, d_out), dtype=complex)
    for k in ops:
        if k.shape != (d_out, d_in):
            raise ValidationError("Kraus operators have mismatched shapes")
        choi4 += np.einsum("ki,lj->ikjl", k, k.conj())
    return c2(choi4)


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace out every tensor factor not in ``keep``."""
    n = len(dims)
    rev = dims[::-1]
    arr = rho.reshape(rev + rev)
    # axis of element i on the row (resp. column) side
    row = {i: n - 1 - i for i in range(n)}
    col = {i: 2 * n - 1 - i for i in range(n)}
    letters = "abcdefghijklmnopqrstuvwxyz"
    labels = [""] * (2 * n)
    pos = 0
    for i in range(n):
        labels[row[i]] = letters[pos]
        pos += 1
    for i in range(n):
        if i in keep:
            labels[col[i]] = letters[pos]
            pos += 1
        else:
            labels[col[i]] = labels[row[i]]
    out_rows = [labels[row[i]] for i in sorted(keep, reverse=True)]
    out_cols = [labels[col[i]] for i in sorted(keep, reverse=True)]
    spec = "".join(labels) + "->" + "".join(out_rows) + "".join(out_cols)
    kept = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(spec, arr).reshape(kept, kept)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho - sigma)
    return float(0.5 * np.abs(eigs).sum())


def is_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_psd(a: np.ndarray, tol: float = TOL_PSD) -> bool:
    if not is_hermitian(a, max(tol, TOL_HERM)):
        return False
    return bool(np.linalg.eigvalsh((a + a.conj().T) / 2).min() >= -tol)


def is_cp(choi: np.ndarray, tol: float = TOL_CPTP) -> bool:
    return is_psd(choi, tol)


def is_tp(choi: np.ndarray, d_in: int, d_out: int, tol: float = TOL_CPTP) -> bool:
    marg = np.einsum("ikjk->ij", c4(choi, d_in, d_out))
    return bool(np.max(np.abs(marg - np.eye(d_in))) <= tol)


def is_unital_scaled(choi: np.ndarray, d_in: int, d_out: int, tol: float = TOL_CPTP) -> bool:
    """Whether the map sends the maximally mixed state to the maximally mixed state."""
    out = np.einsum("ikil->kl", c4(choi, d_in, d_out)) / d_in
    return bool(np.max(np.abs(out - np.eye(d_out) / d_out)) <= tol)


def is_cptp(choi: np.ndarray, d_in: int, d_out: int, tol: float = TOL_CPTP) -> bool:
    return is_cp(choi, tol) and is_tp(choi, d_in, d_out, tol)


# ---------------------------------------------------------------------------
# classical embedding
# ---------------------------------------------------------------------------

def embed_table(table: np.ndarray) -> np.ndarray:
    """Choi of the basis-diagonal channel of a stochastic table."""
    d_in, d_out = table.shape
    choi4 = np.zeros((d_in, d_out, d_in, d_out), dtype=complex)
    for a in range(d_in):
        for b in range(d_out):
            choi4[a, b, a, b] = table[a, b]
    return c2(choi4)


def embed_distribution(dist: np.ndarray) -> np.ndarray:
    return np.diag(np.asarray(dist, dtype=complex))
