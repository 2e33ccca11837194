"""From boolean functions to induced cube subgraphs and back.

A function ``f`` on ``n`` variables is paired with the vertex set
``H = {x : f(x) XOR parity(x) = 1}``. Flipping one coordinate of ``x`` flips
its parity, so a neighbor of ``x`` lies on the same side of the cut exactly
when ``f`` changes value there. Hence the degree of ``x`` inside its own
side equals the local sensitivity of ``f`` at ``x``, and ``Gamma(H) = s(f)``.
The size of ``H`` exceeds or falls short of ``2**(n-1)`` by
``sum_x (-1)^|x| f(x)``, which is nonzero exactly when ``deg(f) = n``.

The pipelines below check these facts, and the inequalities
``s(f)**2 >= deg(f)``, ``bs(f) <= s(f)**4``, ``bs(f) <= deg(f)**2``,
``bs(f) <= 2 deg(f)**2`` and ``bs(f) >= s(f)``, instance by instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import boolfn
from .boolfn import MAX_SWEEP_VARS, TruthTable, bits_to_hex, isqrt_ceil, parity_bits, popcounts
from .cube import VertexSet, side_degrees
from .errors import CounterexampleFound, DimensionTooLarge, InvalidParams

MAX_GL_RANDOM_DIM = 10
MAX_SAMPLED_DIM = 10
_MAX_LISTED = 64


@dataclass(frozen=True)
class GLInstance:
    f: TruthTable
    h_set: VertexSet

    @property
    def side_sizes(self):
        inside = self.h_set.cardinality()
        return inside, (1 << self.f.n) - inside

    def gamma(self):
        return int(side_degrees(self.h_set.members, self.f.n).max()) if self.f.n else 0


def gl_map(f):
    """Pair ``f`` with ``H = {x : f(x) XOR parity(x) = 1}`` and check the degree identity."""
    H = VertexSet(f.n, f.bits ^ parity_bits(f.n))
    degs = side_degrees(H.members, f.n)
    local = boolfn.sensitivity_profile(f)
    if not np.array_equal(degs, local):
        x = int(np.flatnonzero(degs != local)[0])
        raise CounterexampleFound(
            f"side degree {int(degs[x])} != local sensitivity {int(local[x])} at x={x} for {f!r}"
        )
    return GLInstance(f, H)


@dataclass
class PipelineReport:
    theorem: str
    n: int
    mode: str
    tested: int = 0
    seed: int | None = None
    failures: list = field(default_factory=list)
    tight_witnesses: list = field(default_factory=list)
    extremal_ratio: float | None = None
    extremal_witness: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "n": self.n,
            "mode": self.mode,
            "tested": self.tested,
            "seed": self.seed,
            "failures": self.failures,
            "tight_witnesses": self.tight_witnesses,
            "extremal_ratio": self.extremal_ratio,
            "extremal_witness": self.extremal_witness,
            **self.notes,
        }

    def merge(self, other):
        """Fold another report into this one (sums, list concatenation, max ratio)."""
        self.tested += other.tested
        self.failures.extend(other.failures)
        self.tight_witnesses.extend(w for w in other.tight_witnesses if w not in self.tight_witnesses)
        if other.extremal_ratio is not None and (
            self.extremal_ratio is None or other.extremal_ratio > self.extremal_ratio
        ):
            self.extremal_ratio = other.extremal_ratio
            self.extremal_witness = other.extremal_witness
        return self


def _finish(report, strict):
    if report.failures and strict:
        raise CounterexampleFound(f"{report.theorem} check failed: {report.failures[0]}", report)
    return report


def _hex(row, n):
    return bits_to_hex(row, n)


def _function_space(n, mode, trials, seed, dedupe):
    """Tables to test: every function (optionally one per complement pair) or a seeded sample.

    Returns ``(tables, weight)`` where ``weight`` is how many functions each
    row stands for.
    """
    if mode == "exhaustive":
        if n > MAX_SWEEP_VARS:
            raise DimensionTooLarge(f"exhaustive sweeps are capped at n={MAX_SWEEP_VARS}")
        tables = boolfn.all_tables(n)
        if dedupe:
            # f and 1 - f share every measure; keep the member with f(0) = 0
            return tables[tables[:, 0] == 0], 2
        return tables, 1
    if mode == "random":
        if seed is None:
            raise InvalidParams("random mode needs an explicit seed")
        if trials < 1:
            raise InvalidParams("trials must be positive")
        rng = np.random.default_rng(seed)
        return rng.integers(0, 2, size=(trials, 1 << n), dtype=np.uint8), 1
    raise InvalidParams(f"mode must be 'exhaustive' or 'random', got {mode!r}")


def _gl_rows(tables, n):
    """Gamma(H), |H| and the signed parity sum for each table via its GL set."""
    H = tables ^ parity_bits(n)[None, :]
    degs = side_degrees(H, n)
    gamma = degs.max(axis=1) if n else np.zeros(tables.shape[0], dtype=np.int64)
    sizes = H.sum(axis=1, dtype=np.int64)
    signs = 1 - 2 * (popcounts(n) & 1)
    parity_sum = tables.astype(np.int64) @ signs
    return degs, gamma, sizes, parity_sum


def verify_gl(n, mode="exhaustive", trials=1000, seed=None, strict=True):
    """Check the function/subgraph correspondence on every tested ``f``.

    For each ``f``: (i) ``Gamma(H) = s(f)`` with every side degree equal to
    the local sensitivity, (ii) ``|H| != 2**(n-1)`` iff the signed parity sum
    is nonzero iff ``deg(f) = n``, (iii) if ``deg(f) = n`` then
    ``Gamma(H)**2 >= n``.
    """
    if mode == "random" and n > MAX_GL_RANDOM_DIM:
        raise DimensionTooLarge(f"random GL checks are capped at n={MAX_GL_RANDOM_DIM}")
    if n < 1:
        raise InvalidParams("n must be at least 1")
    tables, _ = _function_space(n, mode, trials, seed, dedupe=False)
    report = PipelineReport("gl", n, mode, tested=int(tables.shape[0]), seed=seed)
    half = 1 << (n - 1)
    root = isqrt_ceil(n)
    full_degree = 0
    step = 4096
    for start in range(0, tables.shape[0], step):
        block = tables[start:start + step]
        degs, gamma, sizes, parity_sum = _gl_rows(block, n)
        local = boolfn.batch_local_sensitivity(block, n)
        s = local.max(axis=1)
        deg = boolfn.batch_degree(block, n)
        unbalanced = sizes != half
        full = deg == n
        full_degree += int(full.sum())
        checks = {
            "side degree != local sensitivity": (degs != local).any(axis=1),
            "Gamma(H) != s(f)": gamma != s,
            "|H| != 2^(n-1) disagrees with deg(f) = n": unbalanced != full,
            "|H| - 2^(n-1) != parity sum": (sizes - half) != parity_sum,
            "deg(f) = n but Gamma(H) < sqrt(n)": full & (gamma < root),
        }
        for reason, bad in checks.items():
            for k in np.flatnonzero(bad)[: max(0, _MAX_LISTED - len(report.failures))]:
                report.failures.append({
                    "table": _hex(block[k], n), "reason": reason, "gamma": int(gamma[k]),
                    "s": int(s[k]), "deg": int(deg[k]), "h_size": int(sizes[k]),
                })
    report.notes["full_degree_functions"] = full_degree
    return _finish(report, strict)


def _sweep(n, mode, trials, seed, with_bs):
    tables, weight = _function_space(n, mode, trials, seed, dedupe=(mode == "exhaustive"))
    return tables, weight, boolfn.batch_measures(tables, n, with_bs=with_bs)


def _sizes(n_max, trials):
    if n_max < 0:
        raise InvalidParams("n_max must be non-negative")
    if n_max > MAX_SAMPLED_DIM:
        raise DimensionTooLarge(f"sweeps are capped at n={MAX_SAMPLED_DIM}")
    return [(n, "exhaustive" if n <= MAX_SWEEP_VARS else "random") for n in range(n_max + 1)]


def verify_sensitivity_degree(n_max, trials=1000, seed=None, strict=True):
    """Check ``s(f)**2 >= deg(f)`` for all functions with ``n <= min(n_max, 4)`` and sampled ones above.

    Functions on ``n_max`` variables attaining equality with ``deg(f) >= 2``
    are listed as tight witnesses (hex tables, at most 64, AND-of-ORs always
    included when ``n_max`` is 4 or 9); ``tight_count`` counts them over all
    tested ``n``.
    """
    total = PipelineReport("sdeg", n_max, "mixed" if n_max > MAX_SWEEP_VARS else "exhaustive", seed=seed)
    tight_count = 0
    for n, mode in _sizes(n_max, trials):
        if mode == "random" and seed is None:
            raise InvalidParams(f"n={n} is sampled and needs an explicit seed")
        tables, weight, m = _sweep(n, mode, trials, None if seed is None else seed + n, with_bs=False)
        part = PipelineReport("sdeg", n, mode, tested=int(tables.shape[0]) * weight)
        bad = np.flatnonzero(m.s * m.s < m.deg)
        part.failures = [{"n": n, "table": _hex(tables[k], n), "s": int(m.s[k]), "deg": int(m.deg[k])}
                         for k in bad[:_MAX_LISTED]]
        tight = np.flatnonzero((m.s * m.s == m.deg) & (m.deg >= 2))
        tight_count += len(tight) * weight
        if n == n_max:
            for k in tight:
                rows = [tables[k]] if weight == 1 else [tables[k], 1 - tables[k]]
                for row in rows:
                    if len(part.tight_witnesses) < _MAX_LISTED:
                        part.tight_witnesses.append(_hex(row, n))
        total.merge(part)
    # AND-of-ORs(m) is tight by construction; check it at every square n covered
    for m in range(2, 4):
        f = boolfn.and_of_ors(m)
        if f.n > n_max:
            break
        s, deg = boolfn.sensitivity(f), boolfn.degree(f)
        if s * s != deg:
            total.failures.append({"n": f.n, "table": f.to_hex(), "s": s, "deg": deg,
                                   "reason": "and_of_ors not tight"})
        elif f.n == n_max and f.to_hex() not in total.tight_witnesses:
            total.tight_witnesses.append(f.to_hex())
    total.notes["tight_count"] = tight_count
    return _finish(total, strict)


def verify_bs_chain(n_max, trials=200, seed=None, strict=True):
    """Check ``s <= bs <= min(deg**2, 2 deg**2, s**4)`` on every tested function.

    A constant function has ``s = 0``, and the check requires ``bs = 0`` there.
    Also reports the largest ``bs / s**2`` seen.
    """
    total = PipelineReport("bschain", n_max, "mixed" if n_max > MAX_SWEEP_VARS else "exhaustive", seed=seed)
    for n, mode in _sizes(n_max, trials):
        if mode == "random" and seed is None:
            raise InvalidParams(f"n={n} is sampled and needs an explicit seed")
        tables, weight, m = _sweep(n, mode, trials, None if seed is None else seed + n, with_bs=True)
        part = PipelineReport("bschain", n, mode, tested=int(tables.shape[0]) * weight)
        s, bs, deg = m.s, m.bs, m.deg
        checks = {
            "bs < s": bs < s,
            "bs > deg^2": bs > deg * deg,
            "bs > 2 deg^2": bs > 2 * deg * deg,
            "bs > s^4": bs > s ** 4,
            "s = 0 but bs > 0": (s == 0) & (bs > 0),
        }
        for reason, bad in checks.items():
            for k in np.flatnonzero(bad)[: max(0, _MAX_LISTED - len(part.failures))]:
                part.failures.append({"n": n, "table": _hex(tables[k], n), "reason": reason,
                                      "s": int(s[k]), "bs": int(bs[k]), "deg": int(deg[k])})
        sensitive = np.flatnonzero(s > 0)
        if sensitive.size:
            ratio = bs[sensitive] / (s[sensitive].astype(float) ** 2)
            k = int(sensitive[np.argmax(ratio)])
            part.extremal_ratio = float(ratio.max())
            part.extremal_witness = {"n": n, "table": _hex(tables[k], n)}
        total.merge(part)
    return _finish(total, strict)
