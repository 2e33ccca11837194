"""Signed hypercube matrices and the eigenvalue facts built on them.

Vertex ``u`` of the cube ``Q^n`` is matrix row ``u``. Bit ``n-1`` of ``u``
picks the recursive block: 0 for the upper-left ``A_{n-1}`` block, 1 for the
lower-right ``-A_{n-1}`` block, with identity blocks joining the halves. In
closed form the edge between ``u`` and ``u ^ 2**i`` carries the sign
``(-1) ** popcount(u >> (i + 1))``.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DimensionTooLarge,
    EmptySelection,
    IndexOutOfRange,
    InvalidParams,
    ParseError,
)

MAX_AN_DIM = 20
MAX_DENSE_DIM = 1024
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class SignedMatrix:
    """Symmetric square matrix with entries in {-1, 0, 1}, stored as CSR rows.

    Row ``u`` holds columns ``indices[indptr[u]:indptr[u+1]]`` (sorted) with
    values ``data[...]``, each ``-1`` or ``+1``; absent entries are zero.
    """

    dim: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("indptr", "indices", "data"):
            arr = np.asarray(getattr(self, name))
            arr = arr.astype(np.int8 if name == "data" else np.int64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.indptr.shape != (self.dim + 1,) or self.indptr[-1] != self.indices.size:
            raise InvalidParams("inconsistent CSR layout")
        if self.data.size and not np.isin(self.data, (-1, 1)).all():
            raise InvalidParams("stored values must be -1 or +1")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.dim):
            raise IndexOutOfRange("column index outside the matrix")
        csr = self.csr
        if (csr != csr.T).nnz:
            raise InvalidParams("signed matrix must be symmetric")

    @classmethod
    def from_dense(cls, array):
        arr = np.asarray(array)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (-1, 0, 1)).all():
            raise InvalidParams("entries must lie in {-1, 0, 1}")
        csr = sp.csr_matrix(arr.astype(np.int8))
        csr.sort_indices()
        return cls(arr.shape[0], csr.indptr, csr.indices, csr.data)

    @classmethod
    def from_coo(cls, dim, rows, cols, vals):
        csr = sp.coo_matrix(
            (np.asarray(vals, dtype=np.int8), (np.asarray(rows), np.asarray(cols))),
            shape=(dim, dim),
        ).tocsr()
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        return cls(dim, csr.indptr, csr.indices, csr.data)

    @functools.cached_property
    def csr(self):
        return sp.csr_matrix(
            (self.data.astype(np.int64), self.indices, self.indptr), shape=(self.dim, self.dim)
        )

    @property
    def nnz(self):
        return int(self.indices.size)

    def entry(self, u, v):
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], v)
        if pos < hi and self.indices[pos] == v:
            return int(self.data[pos])
        return 0

    def row(self, u):
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.data[lo:hi].tolist()))

    def to_dense(self):
        return self.csr.toarray().astype(np.int8)

    def trace(self):
        return int(self.csr.diagonal().sum())

    def abs(self):
        return SignedMatrix(self.dim, self.indptr, self.indices, np.abs(self.data))

    def row_weights(self):
        """Number of nonzero entries per row, i.e. the Gershgorin radii plus |diagonal|."""
        return np.diff(self.indptr)

    def __eq__(self, other):
        if not isinstance(other, SignedMatrix):
            return NotImplemented
        return self.dim == other.dim and (self.csr != other.csr).nnz == 0

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted descending, each certified within ``tol``."""

    values: np.ndarray
    tol: float

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=np.float64))[::-1].copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def dim(self):
        return self.values.size

    def to_json(self):
        return json.dumps({"values": self.values.tolist(), "tol": self.tol})

    @classmethod
    def from_json(cls, text):
        try:
            payload = json.loads(text)
            return cls(np.asarray(payload["values"], dtype=np.float64), float(payload["tol"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"malformed spectrum dump: {exc}") from exc


def _popcount(arr):
    out = np.zeros_like(arr)
    arr = arr.copy()
    while arr.any():
        out += arr & 1
        arr >>= 1
    return out


def build_an(n):
    """The signed adjacency matrix ``A_n`` of ``Q^n`` (``A_n @ A_n == n * I``)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParams(f"build_an needs n >= 1, got {n!r}")
    if n > MAX_AN_DIM:
        raise DimensionTooLarge(f"A_n is capped at n={MAX_AN_DIM}")
    dim = 1 << n
    u = np.arange(dim, dtype=np.int64)
    # row u, one entry per coordinate; ascending column order is restored below
    cols = u[:, None] ^ (np.int64(1) << np.arange(n, dtype=np.int64))[None, :]
    signs = 1 - 2 * (_popcount(u[:, None] >> np.arange(1, n + 1, dtype=np.int64)[None, :]) & 1)
    order = np.argsort(cols, axis=1, kind="stable")
    cols = np.take_along_axis(cols, order, axis=1)
    signs = np.take_along_axis(signs, order, axis=1)
    indptr = np.arange(0, dim * n + 1, n, dtype=np.int64)
    return SignedMatrix(dim, indptr, cols.ravel(), signs.ravel())


@dataclass(frozen=True)
class SquareCertificate:
    """Outcome of the exact check ``A @ A == n * I``.

    When the identity holds the spectrum lies in ``{+sqrt(n), -sqrt(n)}``,
    and the exact trace fixes how many eigenvalues take each sign.
    """

    n: int
    dim: int
    holds: bool
    trace: int
    plus_multiplicity: int | None
    minus_multiplicity: int | None
    first_bad_entry: tuple | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {
            "n": self.n,
            "dim": self.dim,
            "square_is_nI": self.holds,
            "trace": self.trace,
            "plus_multiplicity": self.plus_multiplicity,
            "minus_multiplicity": self.minus_multiplicity,
            "first_bad_entry": list(self.first_bad_entry) if self.first_bad_entry else None,
        }


def verify_square_identity(A, n):
    csr = A.csr
    diff = (csr @ csr - n * sp.identity(A.dim, dtype=np.int64, format="csr")).tocoo()
    diff.eliminate_zeros()
    holds = diff.nnz == 0
    bad = None
    if not holds:
        k = int(np.lexsort((diff.col, diff.row))[0])
        bad = (int(diff.row[k]), int(diff.col[k]), int(diff.data[k]) + (n if diff.row[k] == diff.col[k] else 0))
    trace = A.trace()
    plus = minus = None
    # A^2 = nI and eigenvalues +-sqrt(n): (plus - minus) * sqrt(n) = trace
    if holds and n > 0:
        root = math.isqrt(n)
        if trace == 0:
            plus = minus = A.dim // 2
        elif root * root == n and trace % root == 0:
            gap = trace // root
            plus, minus = (A.dim + gap) // 2, (A.dim - gap) // 2
    return SquareCertificate(n, A.dim, holds, trace, plus, minus, bad)


def principal_submatrix(A, S):
    """Keep the rows and columns listed in ``S`` (in increasing index order)."""
    idx = np.unique(np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64))
    if idx.size == 0:
        raise EmptySelection("principal submatrix needs at least one index")
    if idx[0] < 0 or idx[-1] >= A.dim:
        raise IndexOutOfRange(f"indices must lie in [0, {A.dim})")
    sub = A.csr[idx][:, idx].tocsr()
    sub.sort_indices()
    return SignedMatrix(idx.size, sub.indptr, sub.indices, sub.data)


def _start_vector(dim):
    # deterministic: all ones plus a small fixed index-dependent perturbation
    rng = np.random.default_rng(0x5EED)
    x = 1.0 + 0.25 * rng.standard_normal(dim)
    return x / np.linalg.norm(x)


def _as_operator(A):
    if isinstance(A, SignedMatrix):
        return A.csr.astype(np.float64), A.dim
    if sp.issparse(A):
        return A.tocsr().astype(np.float64), A.shape[0]
    arr = np.asarray(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr, arr.shape[0]


def _gershgorin_bound(op):
    if sp.issparse(op):
        return float(abs(op).sum(axis=1).max()) if op.shape[0] else 0.0
    return float(np.abs(op).sum(axis=1).max()) if op.shape[0] else 0.0


def power_iteration(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, window=32, detect_stall=True):
    """Largest eigenvalue of a symmetric matrix by shifted power iteration.

    The matrix is shifted by one more than its Gershgorin bound, so every
    shifted eigenvalue is positive and the top one dominates even when the
    spectrum is symmetric about zero. The Rayleigh quotient ``rho`` then
    rises monotonically towards the top eigenvalue and never overshoots it.

    Converged only when the residual ``||A x - rho x||`` is at most ``tol``.
    The start vector is in generic position, so its weight on the top
    eigenvector is bounded away from zero and only grows; a small residual
    then pins ``rho`` to the top eigenvalue rather than to a lower one.
    (Watching ``rho`` level off is not enough: with eigenvalues clustered
    just under the top, ``rho`` plateaus long before it arrives.)

    The residual is sampled at doubling checkpoints (``window``, ``2*window``,
    ...). If it fails to drop by a factor of four over a doubling, the
    spectral gap is too small for this method and the run is declared
    stalled.

    Returns ``(rho, x, iterations)``. Raises :class:`ConvergenceFailure` on
    a stall (only with ``detect_stall``) or when ``max_iter`` is reached.
    """
    op, dim = _as_operator(A)
    if dim == 0:
        raise EmptySelection("empty matrix has no eigenvalues")
    if tol <= 0:
        raise InvalidParams("tol must be positive")
    shift = _gershgorin_bound(op) + 1.0
    x = _start_vector(dim)
    checkpoint, last_residual = window, None
    for it in range(1, max_iter + 1):
        y = op @ x
        rho = float(x @ y)
        residual = float(np.linalg.norm(y - rho * x))
        if residual <= tol:
            return rho, x, it
        if it == checkpoint:
            if detect_stall and last_residual is not None and residual > last_residual / 4:
                raise ConvergenceFailure(
                    f"power iteration stalled at step {it}: residual {residual:.2e} "
                    f"after {last_residual:.2e} at step {it // 2}"
                )
            last_residual, checkpoint = residual, 2 * checkpoint
        z = y + shift * x
        x = z / np.linalg.norm(z)
    raise ConvergenceFailure(f"power iteration did not reach tol={tol} in {max_iter} steps")


def lambda_max(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, fallback=True):
    """Largest eigenvalue of a symmetric signed (or real) matrix, within ``tol``.

    Power iteration runs first. When it stalls and the matrix is small enough
    to diagonalize densely, the answer comes from LAPACK's symmetric
    eigensolver instead; :func:`full_spectrum` stays independent of both
    routes so it can serve as their cross-check.
    """
    op, dim = _as_operator(A)
    dense_ok = fallback and dim <= MAX_DENSE_DIM
    try:
        return power_iteration(op, tol=tol, max_iter=max_iter, detect_stall=dense_ok)[0]
    except ConvergenceFailure:
        if not dense_ok:
            raise
        dense = op.toarray() if sp.issparse(op) else op
        return float(np.linalg.eigvalsh(dense)[-1])


def _round_robin(players):
    """Rounds of disjoint pairs covering every pair once (circle method)."""
    ring = list(range(players))
    rounds = []
    for _ in range(players - 1):
        half = players // 2
        rounds.append((np.array(ring[:half]), np.array(ring[::-1][:half])))
        ring = [ring[0], ring[-1], *ring[1:-1]]
    return rounds


def full_spectrum(A, tol=1e-10, max_sweeps=60):
    """All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in rounds of disjoint
    pairs so a whole round is one vectorized update. Iterates until the
    off-diagonal Frobenius norm is at most ``tol``; by Weyl's inequality each
    returned eigenvalue is then within ``tol`` of the true one.
    """
    if isinstance(A, SignedMatrix):
        A = A.to_dense()
    a = np.array(A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if dim == 0:
        raise EmptySelection("empty matrix has no eigenvalues")
    if dim > MAX_DENSE_DIM:
        raise DimensionTooLarge(f"dense diagonalization is capped at dim={MAX_DENSE_DIM}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12):
        raise InvalidParams("full_spectrum needs a symmetric matrix")
    a = (a + a.T) / 2
    players = dim + (dim % 2)
    rounds = [
        (p[keep], q[keep])
        for p, q in _round_robin(players)
        for keep in [(p < dim) & (q < dim)]
    ]

    off_diagonal = ~np.eye(dim, dtype=bool)

    def off_norm():
        return float(np.linalg.norm(a[off_diagonal]))

    for _ in range(max_sweeps):
        if off_norm() <= tol:
            return Spectrum(np.diag(a).copy(), tol)
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(tau) > 1e150
            safe = np.where(big, 0.0, tau)
            t = np.where(safe >= 0, 1.0, -1.0) / (np.abs(safe) + np.sqrt(1.0 + safe * safe))
            t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            col_p, col_q = a[:, p].copy(), a[:, q]
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :]
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
    if off_norm() <= tol:
        return Spectrum(np.diag(a).copy(), tol)
    raise ConvergenceFailure(f"Jacobi sweeps did not reach tol={tol} in {max_sweeps} sweeps")


def check_interlacing(parent, child, eps=1e-7):
    """Whether ``lambda_i + eps >= mu_i`` and ``mu_i + eps >= lambda_{i+n-m}`` for all ``i``."""
    lam, mu = parent.values, child.values
    n, m = lam.size, mu.size
    if m >= n:
        raise DimensionMismatch(f"child dimension {m} must be below parent dimension {n}")
    upper = lam[:m] + eps >= mu
    lower = mu + eps >= lam[n - m:]
    return bool(upper.all() and lower.all())


def _adjacency(H):
    adj = H.tocsr() if sp.issparse(H) else sp.csr_matrix(np.asarray(H))
    if adj.shape[0] != adj.shape[1]:
        raise DimensionMismatch(f"adjacency must be square, got shape {adj.shape}")
    adj = adj.astype(bool).astype(np.int64)
    adj.setdiag(0)
    adj.eliminate_zeros()
    return adj


def check_support(A, H):
    """True iff every nonzero entry of ``A`` sits on an edge of graph ``H``."""
    adj = _adjacency(H)
    if adj.shape[0] != A.dim:
        raise DimensionMismatch(f"matrix has dim {A.dim}, graph has {adj.shape[0]} vertices")
    outside = abs(A.csr) - abs(A.csr).multiply(adj)
    return outside.count_nonzero() == 0


def max_degree(H):
    adj = _adjacency(H)
    return int(np.diff(adj.indptr).max()) if adj.shape[0] else 0


def check_degree_bound(A, H, tol=DEFAULT_TOL):
    """True iff the maximum degree of ``H`` is at least ``lambda_max(A) - tol``."""
    if not check_support(A, H):
        raise InvalidParams("A has a nonzero entry on a non-edge of H")
    return max_degree(H) >= lambda_max(A, tol=tol) - tol


def dump_matrix(A):
    """Text dump: ``"dim nnz"`` then one ``"row col value"`` line per upper-triangle entry.

    ``nnz`` counts the triple lines; diagonal entries (never present in
    ``A_n``) are written with ``row == col``.
    """
    coo = sp.triu(A.csr).tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{A.dim} {coo.nnz}"]
    lines += [f"{coo.row[k]} {coo.col[k]} {coo.data[k]}" for k in order]
    return "\n".join(lines) + "\n"


def load_matrix(text):
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise ParseError("matrix dump must start with a 'dim nnz' header")
    try:
        dim, nnz = (int(v) for v in lines[0])
        triples = [tuple(int(v) for v in ln) for ln in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"non-integer field in matrix dump: {exc}") from exc
    if dim < 0 or nnz != len(triples):
        raise ParseError(f"header promises {nnz} entries, found {len(triples)}")
    rows, cols, vals = [], [], []
    seen = set()
    for t in triples:
        if len(t) != 3:
            raise ParseError(f"expected 'row col value', got {t}")
        r, c, v = t
        if not (0 <= r <= c < dim):
            raise ParseError(f"entry ({r}, {c}) must satisfy 0 <= row <= col < {dim}")
        if v not in (-1, 1):
            raise ParseError(f"entry value must be -1 or 1, got {v}")
        if (r, c) in seen:
            raise ParseError(f"duplicate entry ({r}, {c})")
        seen.add((r, c))
        rows.append(r)
        cols.append(c)
        vals.append(v)
        if r != c:
            rows.append(c)
            cols.append(r)
            vals.append(v)
    return SignedMatrix.from_coo(dim, rows, cols, vals)
