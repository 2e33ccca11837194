"""The hypercube graph ``Q^n`` and its induced subgraphs.

Vertices are integers in ``[0, 2**n)``; two vertices are adjacent when they
differ in exactly one bit. A vertex set is a membership bit vector, rendered
in the same hex format as truth tables.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from ._parallel import map_chunks
from .boolfn import bits_to_hex, hex_to_bits, isqrt_ceil, popcounts
from .errors import (
    CounterexampleFound,
    DimensionTooLarge,
    IndexOutOfRange,
    InvalidParams,
    NotFound,
)

MAX_CUBE_DIM = 20
MAX_EXHAUSTIVE_DIM = 4
MAX_RANDOM_DIM = 12
MAX_EXACT_G_DIM = 5
MAX_TIGHT_DIM = 16


def _check_dim(n, cap=MAX_CUBE_DIM, low=0):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < low:
        raise InvalidParams(f"cube dimension must be an integer >= {low}, got {n!r}")
    if n > cap:
        raise DimensionTooLarge(f"n={n} exceeds the supported maximum of {cap}")
    return int(n)


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Subset of the vertices of ``Q^n`` as a membership bit vector."""

    n: int
    members: np.ndarray

    def __post_init__(self):
        n = _check_dim(self.n)
        members = np.asarray(self.members)
        if members.shape != (1 << n,):
            raise InvalidParams(f"membership vector for n={n} needs {1 << n} entries, got {members.shape}")
        if members.size and not np.isin(members, (0, 1)).all():
            raise InvalidParams("membership entries must be 0 or 1")
        members = members.astype(np.uint8, copy=True)
        members.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "members", members)

    @classmethod
    def from_indices(cls, n, vertices):
        n = _check_dim(n)
        members = np.zeros(1 << n, dtype=np.uint8)
        idx = np.asarray(list(vertices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= 1 << n):
            raise IndexOutOfRange(f"vertices must lie in [0, {1 << n})")
        members[idx] = 1
        return cls(n, members)

    @classmethod
    def from_hex(cls, text, n):
        return cls(n, hex_to_bits(text, n))

    def to_hex(self):
        return bits_to_hex(self.members, self.n)

    def cardinality(self):
        return int(self.members.sum())

    __len__ = cardinality

    def indices(self):
        return np.flatnonzero(self.members)

    def complement(self):
        return VertexSet(self.n, 1 - self.members)

    def __contains__(self, v):
        return 0 <= v < self.members.size and bool(self.members[v])

    def __eq__(self, other):
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.n, self.members.tobytes()))

    def __repr__(self):
        return f"VertexSet(n={self.n}, size={self.cardinality()}, hex={self.to_hex()!r})"

    def to_dict(self):
        return {"n": self.n, "size": self.cardinality(), "members": self.to_hex()}


@dataclass(frozen=True)
class DegreeReport:
    delta_h: int
    delta_complement: int
    gamma: int
    argmax_h: int | None
    argmax_complement: int | None

    def to_dict(self):
        return dict(self.__dict__)


def neighbors(n, v):
    if not 0 <= v < 1 << n:
        raise IndexOutOfRange(f"vertex {v} outside [0, {1 << n})")
    return [v ^ (1 << i) for i in range(n)]


def adjacency(n):
    """0/1 adjacency matrix of ``Q^n`` built straight from the one-bit rule."""
    n = _check_dim(n, 12)
    v = np.arange(1 << n)
    diff = v[:, None] ^ v[None, :]
    return ((diff & (diff - 1)) == 0) & (diff != 0)


def side_degrees(members, n):
    """Degree of every vertex inside its own side (``H`` or ``Q^n - H``).

    Works on one membership vector or a stack of them (last axis).
    """
    members = np.asarray(members, dtype=np.uint8)
    out = np.zeros(members.shape, dtype=np.int64)
    lead = members.shape[:-1]
    for i in range(n):
        step = 1 << i
        flipped = members.reshape(*lead, -1, 2, step)[..., ::-1, :].reshape(members.shape)
        out += members == flipped
    return out


def _side_max(deg, mask):
    if not mask.any():
        return 0, None
    masked = np.where(mask, deg, -1)
    v = int(np.argmax(masked))
    return int(masked[v]), v


def induced_degrees(H):
    deg = side_degrees(H.members, H.n)
    inside = H.members.astype(bool)
    delta_h, arg_h = _side_max(deg, inside)
    delta_c, arg_c = _side_max(deg, ~inside)
    return DegreeReport(delta_h, delta_c, max(delta_h, delta_c), arg_h, arg_c)


def max_degree(H):
    return induced_degrees(H).delta_h


def even_vertices(n):
    return VertexSet(n, 1 - (popcounts(n) & 1))


def star_plus_isolated(n):
    """All even-weight vertices plus vertex 1: a star ``K_{1,n}`` and isolated vertices."""
    n = _check_dim(n, low=1)
    members = (1 - (popcounts(n) & 1)).astype(np.uint8)
    members[1] = 1
    return VertexSet(n, members)


def induced_adjacency(H):
    """Dense 0/1 adjacency matrix of the subgraph induced on ``H`` (members in index order)."""
    idx = H.indices()
    diff = idx[:, None] ^ idx[None, :]
    return (((diff & (diff - 1)) == 0) & (diff != 0)).astype(np.int8)


@functools.lru_cache(maxsize=None)
def _an(n):
    return spectral.build_an(n)


def spectral_certificate(H, tol=spectral.DEFAULT_TOL):
    """Top eigenvalue of the principal submatrix of ``A_n`` on the vertices of ``H``.

    For ``|H| = 2**(n-1) + 1`` the result is at least ``sqrt(n)`` by
    interlacing and at most the maximum degree of ``H``.
    """
    n = _check_dim(H.n, low=1)
    if H.cardinality() != (1 << (n - 1)) + 1:
        raise InvalidParams(f"certificate needs |H| = {(1 << (n - 1)) + 1}, got {H.cardinality()}")
    return spectral.lambda_max(spectral.principal_submatrix(_an(n), H.indices()), tol=tol)


@dataclass
class Theorem1Report:
    n: int
    mode: str
    trials: int
    seed: int | None
    bound: int
    min_delta: int
    witness: str
    min_lambda: float | None = None
    tol: float | None = None
    counterexample: dict | None = None
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        out = {
            "theorem": "theorem1",
            "n": self.n,
            "mode": self.mode,
            "trials": self.trials,
            "seed": self.seed,
            "bound": self.bound,
            "min_delta": self.min_delta,
            "witness": self.witness,
            "failures": self.failures,
        }
        if self.min_lambda is not None:
            out["min_lambda"] = self.min_lambda
            out["tol"] = self.tol
        return out


def _delta_rows(members, n):
    """Maximum degree inside ``H`` for every row of a stack of membership vectors."""
    deg = side_degrees(members, n)
    return np.where(members.astype(bool), deg, 0).max(axis=1)


def _random_subset(rng, n, size):
    members = np.zeros(1 << n, dtype=np.uint8)
    members[rng.permutation(1 << n)[:size]] = 1
    return members


def _certify_chunk(args):
    n, seeds, size, tol, certify = args
    rows = []
    for seq in seeds:
        members = _random_subset(np.random.default_rng(seq), n, size)
        H = VertexSet(n, members)
        delta = max_degree(H)
        lam = spectral_certificate(H, tol=tol) if certify else None
        rows.append((delta, lam, H.to_hex()))
    return rows


def verify_theorem1(n, mode="exhaustive", trials=1000, seed=None, certify=False,
                    tol=1e-6, jobs=1, strict=True):
    """Check that every tested ``(2**(n-1) + 1)``-vertex subset has max degree ``>= sqrt(n)``.

    ``exhaustive`` enumerates every subset of that size (``n <= 4``);
    ``random`` draws ``trials`` subsets from ``seed``. With ``certify`` each
    random subset also gets its spectral certificate, which must satisfy
    ``sqrt(n) - tol <= lambda <= Delta(H) + tol``.
    """
    n = _check_dim(n, MAX_RANDOM_DIM, low=1)
    size = (1 << (n - 1)) + 1
    bound = isqrt_ceil(n)
    if mode == "exhaustive":
        if n > MAX_EXHAUSTIVE_DIM:
            raise DimensionTooLarge(f"exhaustive mode is capped at n={MAX_EXHAUSTIVE_DIM}")
        combos = np.array(list(itertools.combinations(range(1 << n), size)), dtype=np.int64)
        members = np.zeros((combos.shape[0], 1 << n), dtype=np.uint8)
        np.put_along_axis(members, combos, 1, axis=1)
        deltas = _delta_rows(members, n)
        best = int(np.argmin(deltas))
        report = Theorem1Report(n, mode, int(combos.shape[0]), None, bound, int(deltas[best]),
                                bits_to_hex(members[best], n))
        bad = np.flatnonzero(deltas < bound)
        report.failures = [{"witness": bits_to_hex(members[k], n), "delta": int(deltas[k])} for k in bad[:10]]
    elif mode == "random":
        if seed is None:
            raise InvalidParams("random mode needs an explicit seed")
        if trials < 1:
            raise InvalidParams("trials must be positive")
        seeds = np.random.SeedSequence(seed).spawn(trials)
        width = max(1, -(-trials // max(1, jobs * 4)))
        chunks = [(n, seeds[i:i + width], size, tol, certify) for i in range(0, trials, width)]
        rows = [row for chunk in map_chunks(_certify_chunk, chunks, jobs) for row in chunk]
        deltas = np.array([r[0] for r in rows])
        best = int(np.argmin(deltas))
        report = Theorem1Report(n, mode, trials, seed, bound, int(deltas[best]), rows[best][2])
        for delta, lam, hexed in rows:
            if delta < bound:
                report.failures.append({"witness": hexed, "delta": delta, "reason": "delta below ceil(sqrt(n))"})
        if certify:
            lams = np.array([r[1] for r in rows])
            report.min_lambda = float(lams.min())
            report.tol = tol
            root = math.sqrt(n)
            for delta, lam, hexed in rows:
                if lam < root - tol:
                    report.failures.append({"witness": hexed, "lambda": lam, "reason": "lambda below sqrt(n)"})
                elif delta < lam - tol:
                    report.failures.append({"witness": hexed, "delta": delta, "lambda": lam,
                                            "reason": "delta below lambda"})
    else:
        raise InvalidParams(f"mode must be 'exhaustive' or 'random', got {mode!r}")
    if report.failures:
        report.counterexample = report.failures[0]
        if strict:
            raise CounterexampleFound(f"theorem1 check failed at n={n}: {report.failures[0]}", report)
    return report


def _search_bounded_set(n, size, limit):
    """First ``size``-subset (lexicographic) whose induced max degree is ``<= limit``, or ``None``.

    Branches stop as soon as an included vertex would exceed ``limit``
    included neighbors.
    """
    total = 1 << n
    deg = [0] * total
    chosen = []
    nbrs = [neighbors(n, v) for v in range(total)]
    inside = [False] * total

    def fits(v):
        if deg[v] > limit:
            return False
        return all(deg[u] < limit for u in nbrs[v] if inside[u])

    def place(v, sign):
        inside[v] = sign > 0
        for u in nbrs[v]:
            deg[u] += sign

    def go(start):
        if len(chosen) == size:
            return True
        for v in range(start, total - (size - len(chosen)) + 1):
            if fits(v):
                chosen.append(v)
                place(v, 1)
                if go(v + 1):
                    return True
                place(v, -1)
                chosen.pop()
        return False

    return list(chosen) if go(0) else None


def _trim_to(H, size):
    """Drop highest-degree vertices from ``H`` until ``size`` remain; max degree never rises."""
    n = H.n
    members = H.members.copy()
    deg = np.where(members.astype(bool), side_degrees(members, n), -1)
    for _ in range(H.cardinality() - size):
        v = int(np.argmax(deg))
        members[v] = 0
        deg[v] = -1
        for u in neighbors(n, v):
            if members[u]:
                deg[u] -= 1
    return VertexSet(n, members)


def find_tight_witness(n):
    """A ``(2**(n-1) + 1)``-vertex subset with max degree exactly ``sqrt(n)``.

    ``n = 1`` is the single edge; ``n = 4`` comes from exhaustive search; for
    ``n = m*m >= 9`` the larger side of the parity-twisted set of
    AND-of-ORs(m) (max degree ``m``) is trimmed to size, and the result is
    recounted.
    """
    n = _check_dim(n, MAX_TIGHT_DIM, low=1)
    root = math.isqrt(n)
    if root * root != n:
        raise InvalidParams(f"tight witnesses exist only for perfect squares, got n={n}")
    size = (1 << (n - 1)) + 1
    if n <= MAX_EXHAUSTIVE_DIM:
        found = _search_bounded_set(n, size, root)
        if found is None:
            raise NotFound(f"no {size}-vertex subset of Q^{n} with max degree {root}")
        H = VertexSet.from_indices(n, found)
    else:
        from .boolfn import and_of_ors
        from .bridge import gl_map

        inst = gl_map(and_of_ors(root))
        side = inst.h_set if inst.h_set.cardinality() >= size else inst.h_set.complement()
        if side.cardinality() < size:
            raise NotFound("both sides of the parity-twisted set are balanced; no side to trim")
        H = _trim_to(side, size)
    delta = max_degree(H)
    if delta != root:
        raise NotFound(f"constructed set has max degree {delta}, expected {root}")
    return H


# -- g(n, k) -----------------------------------------------------------------------

@dataclass
class GBounds:
    """Bracket on ``g(n, k)``: the least ``t`` such that every ``t``-vertex subset has max degree ``>= k``."""

    n: int
    k: int
    lower: int
    upper: int
    exact: bool
    witness: VertexSet | None
    seed: int | None = None
    budget_exhausted: bool = False

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "witness": self.witness.to_hex() if self.witness is not None else None,
            "witness_size": self.witness.cardinality() if self.witness is not None else 0,
            "seed": self.seed,
            "budget_exhausted": self.budget_exhausted,
        }


@functools.lru_cache(maxsize=None)
def _largest_bounded_set(n, limit):
    """Largest vertex set of ``Q^n`` with induced max degree ``<= limit``, exactly.

    Branch and bound over vertices in index order. The bound caps every
    aligned subcube block of size ``2**j`` at the (recursively computed)
    optimum for ``Q^j``. Vertex 0 is included without loss of generality
    since ``Q^n`` is vertex-transitive.
    """
    total = 1 << n
    if limit >= n:
        return tuple(range(total))
    if n == 0:
        return (0,)
    caps = [len(_largest_bounded_set(j, limit)) for j in range(n)] + [total]
    nbrs = [neighbors(n, v) for v in range(total)]
    deg = [0] * total
    inside = [False] * total
    # prefix[v] = number of included vertices among 0..v-1
    prefix = [0] * (total + 1)
    best = list(_greedy_bounded(n, limit))
    chosen = []

    def bound(p, count):
        top = count + (total - p)
        for j in range(1, n + 1):
            blk = 1 << j
            start = (p >> j) << j
            inside_blk = count - prefix[start]
            partial = min(caps[j], inside_blk + (start + blk - p)) - inside_blk
            top = min(top, count + partial + (total - start - blk) // blk * caps[j])
        return top

    def fits(v):
        if deg[v] > limit:
            return False
        return all(deg[u] < limit for u in nbrs[v] if inside[u])

    def go(p, count):
        nonlocal best
        prefix[p] = count
        if count > len(best):
            best = list(chosen)
        if p == total or bound(p, count) <= len(best):
            return
        if fits(p):
            chosen.append(p)
            inside[p] = True
            for u in nbrs[p]:
                deg[u] += 1
            go(p + 1, count + 1)
            for u in nbrs[p]:
                deg[u] -= 1
            inside[p] = False
            chosen.pop()
        if p > 0:
            go(p + 1, count)

    go(0, 0)
    return tuple(best)


def _greedy_bounded(n, limit, order=None):
    total = 1 << n
    deg = np.zeros(total, dtype=np.int64)
    members = np.zeros(total, dtype=bool)
    for v in (range(total) if order is None else order):
        nb = [v ^ (1 << i) for i in range(n)]
        if deg[v] <= limit and all(deg[u] < limit for u in nb if members[u]):
            members[v] = True
            for u in nb:
                deg[u] += 1
    return tuple(np.flatnonzero(members).tolist())


def _local_search(n, limit, budget, rng):
    """Grow a max-degree-``<= limit`` set by random insert-and-repair moves."""
    total = 1 << n
    evens = np.flatnonzero(1 - (popcounts(n) & 1)).tolist()
    members = np.zeros(total, dtype=bool)
    members[list(_greedy_bounded(n, limit, order=[*evens, *rng.permutation(total).tolist()]))] = True
    # included-neighbor count of every vertex
    inner = np.zeros(total, dtype=np.int64)
    for i in range(n):
        inner += members[np.arange(total) ^ (1 << i)]
    best = members.copy()
    size = int(members.sum())
    for _ in range(budget):
        outside = np.flatnonzero(~members)
        if outside.size == 0:
            break
        v = int(outside[rng.integers(outside.size)])
        nb = [v ^ (1 << i) for i in range(n)]
        members[v] = True
        for u in nb:
            inner[u] += 1
        removed = []
        # repair: evict vertices whose included degree now exceeds the limit
        for u in [v, *nb]:
            while members[u] and inner[u] > limit:
                cands = [w for w in (u, *[u ^ (1 << i) for i in range(n)]) if members[w] and w != v]
                w = int(cands[rng.integers(len(cands))])
                members[w] = False
                removed.append(w)
                for x in (w ^ (1 << i) for i in range(n)):
                    inner[x] -= 1
        new_size = size + 1 - len(removed)
        if new_size >= size or rng.random() < 0.05:
            size = new_size
            if size > int(best.sum()):
                best = members.copy()
        else:
            for w in removed:
                members[w] = True
                for x in (w ^ (1 << i) for i in range(n)):
                    inner[x] += 1
            members[v] = False
            for u in nb:
                inner[u] -= 1
    return VertexSet(n, best.astype(np.uint8))


def explore_g(n, k, budget=20000, seed=None, mode="auto"):
    """Bounds on ``g(n, k)``.

    Exact for ``n <= 5``: ``g(n, k)`` is one more than the largest vertex set
    whose induced max degree stays below ``k``. Heuristic otherwise: a seeded
    local search for a large such set gives the lower bound, and the upper
    bound is ``2**(n-1) + 1`` when ``k*k <= n`` (every set that large has max
    degree ``>= sqrt(n)``), else ``2**n``.
    """
    n = _check_dim(n, low=1)
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidParams(f"k must satisfy 1 <= k <= n, got k={k!r}")
    if mode == "auto":
        mode = "exact" if n <= MAX_EXACT_G_DIM else "heuristic"
    if mode == "exact":
        if n > MAX_EXACT_G_DIM:
            raise DimensionTooLarge(f"exact g(n, k) is capped at n={MAX_EXACT_G_DIM}")
        best = VertexSet.from_indices(n, _largest_bounded_set(n, k - 1))
        value = best.cardinality() + 1
        return GBounds(n, k, value, value, True, best)
    if mode != "heuristic":
        raise InvalidParams(f"mode must be 'auto', 'exact' or 'heuristic', got {mode!r}")
    if seed is None:
        raise InvalidParams("heuristic mode needs an explicit seed")
    best = _local_search(n, k - 1, budget, np.random.default_rng(seed))
    lower = max(best.cardinality(), 1 << (n - 1)) + 1
    upper = (1 << (n - 1)) + 1 if k * k <= n else 1 << n
    return GBounds(n, k, lower, upper, lower == upper, best, seed, budget_exhausted=lower < upper)
