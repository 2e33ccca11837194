"""Boolean functions as truth tables and their complexity measures.

A function ``f: {0,1}^n -> {0,1}`` is stored as a bit vector of length
``2**n``; entry ``x`` is ``f(x)`` and bit ``i`` of the index ``x`` is input
coordinate ``i``. Everything here is exact integer arithmetic.

Three measures are computed:

* sensitivity ``s(f)``: the most single-coordinate flips that change ``f``
  at one input,
* block sensitivity ``bs(f)``: the most pairwise-disjoint coordinate blocks
  whose flips each change ``f`` at one input,
* degree ``deg(f)``: the degree of the unique multilinear polynomial that
  agrees with ``f`` on the cube.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionTooLarge,
    IndexOutOfRange,
    InvalidParams,
    ParseError,
    UnknownGenerator,
)

MAX_VARS = 20
# exact block sensitivity costs ~3^n per input
MAX_BS_VARS = 14
# largest n whose full function space (2^(2^n) tables) is enumerated
MAX_SWEEP_VARS = 4

_CHUNK_ELEMENTS = 1 << 21


def _check_n(n, cap=MAX_VARS):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
        raise InvalidParams(f"variable count must be a non-negative integer, got {n!r}")
    if n > cap:
        raise DimensionTooLarge(f"n={n} exceeds the supported maximum of {cap}")
    return int(n)


def hex_width(n):
    """Number of hex digits used to render a table (or vertex set) on ``n`` variables."""
    return max(1, -(-(1 << n) // 4))


def bits_to_hex(bits, n):
    """Render a 0/1 vector of length ``2**n`` as lowercase hex, most significant nibble first."""
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    value = int.from_bytes(packed.tobytes(), "little")
    return format(value, f"0{hex_width(n)}x")


def hex_to_bits(text, n):
    """Parse the hex wire format back into a ``uint8`` vector of length ``2**n``.

    Raises :class:`ParseError` on non-hex characters, a digit count other
    than :func:`hex_width`, or set bits at positions ``>= 2**n``.
    """
    n = _check_n(n)
    if not isinstance(text, str):
        raise ParseError(f"expected a hex string, got {type(text).__name__}")
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    if not text or any(c not in "0123456789abcdef" for c in text):
        raise ParseError(f"malformed hex string {text!r}")
    if len(text) != hex_width(n):
        raise ParseError(
            f"hex string has {len(text)} digits, expected {hex_width(n)} for n={n}"
        )
    value = int(text, 16)
    size = 1 << n
    if value >> size:
        raise ParseError(f"hex string sets bits beyond position {size - 1} for n={n}")
    raw = value.to_bytes(max(1, -(-size // 8)), "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:size].copy()


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Immutable truth table of a boolean function on ``n`` variables."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n)
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or bits.shape[0] != 1 << n:
            raise InvalidParams(f"table for n={n} needs {1 << n} entries, got shape {bits.shape}")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise InvalidParams("truth table entries must be 0 or 1")
        bits = bits.astype(np.uint8, copy=True)
        bits.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_hex(cls, text, n):
        return cls(n, hex_to_bits(text, n))

    @classmethod
    def from_int(cls, value, n):
        n = _check_n(n)
        if value < 0 or value >> (1 << n):
            raise InvalidParams(f"integer {value} does not encode a table on {n} variables")
        return cls(n, hex_to_bits(format(value, f"0{hex_width(n)}x"), n))

    @classmethod
    def from_function(cls, n, func):
        """Tabulate ``func(x)`` for every input index ``x``."""
        n = _check_n(n)
        return cls(n, np.array([1 if func(x) else 0 for x in range(1 << n)], dtype=np.uint8))

    def to_hex(self):
        return bits_to_hex(self.bits, self.n)

    def to_int(self):
        return int(self.to_hex(), 16)

    def __call__(self, x):
        return int(self.bits[x])

    def __len__(self):
        return self.bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n}, hex={self.to_hex()!r})"

    def __xor__(self, other):
        if not isinstance(other, TruthTable) or other.n != self.n:
            return NotImplemented
        return TruthTable(self.n, self.bits ^ other.bits)

    def __invert__(self):
        return TruthTable(self.n, 1 - self.bits)


def parse(text, n):
    """Inverse of :func:`render`."""
    return TruthTable.from_hex(text, n)


def render(table):
    return table.to_hex()


@dataclass(frozen=True)
class MeasureReport:
    n: int
    s: int
    bs: int
    deg: int
    s_witness: int
    bs_witness: int
    local_s: np.ndarray = field(repr=False)
    local_bs: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "n": self.n,
            "s": self.s,
            "bs": self.bs,
            "deg": self.deg,
            "s_witness": self.s_witness,
            "bs_witness": self.bs_witness,
        }


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    """Integer multilinear polynomial; ``coeffs[S]`` multiplies ``prod(x_i for i in S)``."""

    n: int
    coeffs: np.ndarray

    def evaluate(self, x):
        """Value at the cube point with index ``x`` (sum of coefficients of subsets of ``x``)."""
        total = 0
        sub = x
        while True:
            total += int(self.coeffs[sub])
            if sub == 0:
                return total
            sub = (sub - 1) & x

    @property
    def degree(self):
        nonzero = np.flatnonzero(self.coeffs)
        if nonzero.size == 0:
            return 0
        return int(max(int(s).bit_count() for s in nonzero))

    def monomials(self):
        """``(coordinate tuple, coefficient)`` pairs for every nonzero term."""
        out = []
        for mask in np.flatnonzero(self.coeffs):
            mask = int(mask)
            out.append((tuple(i for i in range(self.n) if mask >> i & 1), int(self.coeffs[mask])))
        return out


def flip(x, S):
    """Return ``x`` with every coordinate in ``S`` complemented.

    ``S`` is either a bit mask or an iterable of coordinate numbers.
    """
    if not isinstance(S, (int, np.integer)):
        coords = list(S)
        if any(i < 0 for i in coords):
            raise IndexOutOfRange("coordinates must be non-negative")
        S = sum(1 << int(i) for i in set(coords))
    if x < 0 or S < 0:
        raise IndexOutOfRange("input index and coordinate mask must be non-negative")
    return x ^ S


def _check_input(f, x):
    if not 0 <= x < 1 << f.n:
        raise IndexOutOfRange(f"input {x} outside [0, {1 << f.n})")


def _flipped(bits, n, i):
    """Table composed with the flip of coordinate ``i``: out[x] = bits[x ^ 2^i]."""
    step = 1 << i
    return bits.reshape(-1, 2, step)[:, ::-1, :].reshape(bits.shape)


def local_sensitivity(f, x):
    _check_input(f, x)
    value = f.bits[x]
    return sum(int(value != f.bits[x ^ (1 << i)]) for i in range(f.n))


def sensitivity_profile(f):
    """Local sensitivity at every input, one XOR of the table per coordinate."""
    counts = np.zeros(1 << f.n, dtype=np.int16)
    for i in range(f.n):
        counts += f.bits ^ _flipped(f.bits, f.n, i)
    return counts


def sensitivity(f):
    return int(sensitivity_profile(f).max())


def _max_disjoint_blocks(sens):
    """Largest number of pairwise-disjoint sensitive blocks, column by column.

    ``sens[B, j]`` tells whether block (coordinate mask) ``B`` is sensitive for
    column ``j``. The recurrence on coordinate masks either leaves the lowest
    coordinate of the mask unused or spends it in a sensitive block that
    contains it.
    """
    size, batch = sens.shape
    sens = sens.astype(bool, copy=False)
    live = sens.any(axis=1)
    best = np.zeros((size, batch), dtype=np.int8)
    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        cur = best[rest].copy()
        sub = rest
        while True:
            block = low | sub
            if live[block]:
                cand = best[rest ^ sub] + 1
                np.maximum(cur, np.where(sens[block], cand, 0), out=cur)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = cur
    return best[size - 1].astype(np.int64)


def _sensitive_blocks(bits, xs):
    """``sens[B, j] = f(x_j) != f(x_j ^ B)`` for every mask ``B``."""
    size = bits.shape[0]
    xs = np.asarray(xs, dtype=np.int64)
    masks = np.arange(size, dtype=np.int64)
    return bits[masks[:, None] ^ xs[None, :]] != bits[xs][None, :]


def local_block_sensitivity(f, x):
    _check_input(f, x)
    if f.n > MAX_BS_VARS:
        raise DimensionTooLarge(f"exact block sensitivity is capped at n={MAX_BS_VARS}")
    return int(_max_disjoint_blocks(_sensitive_blocks(f.bits, [x]))[0])


def block_sensitivity_profile(f):
    """Local block sensitivity at every input."""
    if f.n > MAX_BS_VARS:
        raise DimensionTooLarge(f"exact block sensitivity is capped at n={MAX_BS_VARS}")
    size = 1 << f.n
    chunk = max(1, _CHUNK_ELEMENTS // size)
    out = np.empty(size, dtype=np.int64)
    for start in range(0, size, chunk):
        xs = np.arange(start, min(size, start + chunk))
        out[xs] = _max_disjoint_blocks(_sensitive_blocks(f.bits, xs))
    return out


def block_sensitivity(f):
    return int(block_sensitivity_profile(f).max())


def _mobius(values, n):
    """In-place subset Möbius transform along the last axis."""
    lead = values.shape[:-1]
    for i in range(n):
        step = 1 << i
        view = values.reshape(*lead, -1, 2, step)
        view[..., 1, :] -= view[..., 0, :]
    return values


def multilinear_expand(f):
    coeffs = _mobius(f.bits.astype(np.int64), f.n)
    return MultilinearPoly(f.n, coeffs)


def degree(f):
    return multilinear_expand(f).degree


def measures(f):
    """Compute ``s``, ``bs`` and ``deg`` with their local profiles and witnesses."""
    local_s = sensitivity_profile(f).astype(np.int64)
    local_bs = block_sensitivity_profile(f)
    s_witness = int(np.argmax(local_s))
    bs_witness = int(np.argmax(local_bs))
    return MeasureReport(
        n=f.n,
        s=int(local_s[s_witness]),
        bs=int(local_bs[bs_witness]),
        deg=degree(f),
        s_witness=s_witness,
        bs_witness=bs_witness,
        local_s=local_s,
        local_bs=local_bs,
    )


# -- symmetries --------------------------------------------------------------

def permute_variables(f, perm):
    """``g(x) = f(y)`` where coordinate ``perm[i]`` of ``y`` is coordinate ``i`` of ``x``."""
    perm = list(perm)
    if sorted(perm) != list(range(f.n)):
        raise InvalidParams(f"{perm!r} is not a permutation of range({f.n})")
    xs = np.arange(1 << f.n, dtype=np.int64)
    ys = np.zeros_like(xs)
    for i, j in enumerate(perm):
        ys |= ((xs >> i) & 1) << j
    return TruthTable(f.n, f.bits[ys])


def negate_variables(f, mask):
    """``g(x) = f(x ^ mask)``."""
    if not 0 <= mask < 1 << f.n:
        raise InvalidParams(f"mask {mask} outside [0, {1 << f.n})")
    xs = np.arange(1 << f.n, dtype=np.int64)
    return TruthTable(f.n, f.bits[xs ^ mask])


def parity_bits(n):
    """Parity of the Hamming weight of every index in ``[0, 2**n)``."""
    xs = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        out ^= ((xs >> i) & 1).astype(np.uint8)
    return out


def popcounts(n):
    xs = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        out += (xs >> i) & 1
    return out


# -- gallery -------------------------------------------------------------------

def _parity(n):
    return parity_bits(n)


def _and(n):
    bits = np.zeros(1 << n, dtype=np.uint8)
    bits[-1] = 1
    return bits


def _or(n):
    bits = np.ones(1 << n, dtype=np.uint8)
    bits[0] = 0
    return bits


def _constant0(n):
    return np.zeros(1 << n, dtype=np.uint8)


def _constant1(n):
    return np.ones(1 << n, dtype=np.uint8)


def _majority(n):
    return (2 * popcounts(n) > n).astype(np.uint8)


def _random(n, seed, p=0.5):
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    return (rng.random(1 << n) < p).astype(np.uint8)


_N_GENERATORS = {
    "parity": _parity,
    "and": _and,
    "or": _or,
    "constant0": _constant0,
    "constant1": _constant1,
    "majority": _majority,
}

GENERATORS = tuple(sorted([*_N_GENERATORS, "and_of_ors", "random"]))


def and_of_ors(m):
    """AND of ``m`` ORs over disjoint blocks of ``m`` variables (``n = m*m``).

    Block ``j`` owns coordinates ``j*m .. j*m + m - 1``. Sensitivity is ``m``
    and degree is ``m*m``.
    """
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise InvalidParams(f"and_of_ors needs an integer m >= 1, got {m!r}")
    n = _check_n(m * m)
    xs = np.arange(1 << n, dtype=np.int64)
    block = (1 << m) - 1
    value = np.ones(1 << n, dtype=bool)
    for j in range(m):
        value &= ((xs >> (j * m)) & block) != 0
    return TruthTable(n, value.astype(np.uint8))


def gallery(name, **params):
    """Build a named function.

    ``and_of_ors`` takes ``m``; ``random`` takes ``n``, ``seed`` and optional
    ``p``; every other generator takes ``n`` only.
    """
    if name == "and_of_ors":
        if set(params) != {"m"}:
            raise InvalidParams(f"and_of_ors takes exactly m, got {sorted(params)}")
        return and_of_ors(params["m"])
    if name == "random":
        if not {"n", "seed"} <= set(params) <= {"n", "seed", "p"}:
            raise InvalidParams(f"random takes n, seed and optional p, got {sorted(params)}")
        n = _check_n(params["n"])
        return TruthTable(n, _random(n, params["seed"], params.get("p", 0.5)))
    if name not in _N_GENERATORS:
        raise UnknownGenerator(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    if set(params) != {"n"}:
        raise InvalidParams(f"{name} takes exactly n, got {sorted(params)}")
    n = _check_n(params["n"])
    return TruthTable(n, _N_GENERATORS[name](n))


# -- batched measures ------------------------------------------------------------

def all_tables(n):
    """Every truth table on ``n`` variables as rows of a ``(2^(2^n), 2^n)`` uint8 matrix.

    Row ``t`` is the table whose integer encoding is ``t``.
    """
    n = _check_n(n, MAX_SWEEP_VARS)
    size = 1 << n
    codes = np.arange(1 << size, dtype=np.int64)
    return ((codes[:, None] >> np.arange(size)) & 1).astype(np.uint8)


@functools.lru_cache(maxsize=None)
def _bs_by_family(n):
    """Max disjoint sensitive blocks for every possible sensitive-block family.

    A family is a ``2**n``-bit integer whose bit ``B`` marks block ``B`` as
    sensitive; only feasible while ``2**(2**n)`` stays small.
    """
    size = 1 << n
    families = np.arange(1 << size, dtype=np.int64)
    sens = ((families[None, :] >> np.arange(size)[:, None]) & 1).astype(bool)
    table = _max_disjoint_blocks(sens).astype(np.int8)
    table.setflags(write=False)
    return table


def batch_local_sensitivity(tables, n):
    tables = np.asarray(tables, dtype=np.uint8)
    counts = np.zeros(tables.shape, dtype=np.int16)
    for i in range(n):
        step = 1 << i
        flipped = tables.reshape(tables.shape[0], -1, 2, step)[:, :, ::-1, :].reshape(tables.shape)
        counts += tables ^ flipped
    return counts


def batch_degree(tables, n):
    coeffs = _mobius(np.asarray(tables, dtype=np.int64).copy(), n)
    weights = popcounts(n)
    return np.where(coeffs != 0, weights[None, :], 0).max(axis=1)


def batch_local_block_sensitivity(tables, n):
    """Local block sensitivity for a stack of tables, shape ``(count, 2**n)``."""
    tables = np.asarray(tables, dtype=np.uint8)
    size = 1 << n
    if n > MAX_BS_VARS:
        raise DimensionTooLarge(f"exact block sensitivity is capped at n={MAX_BS_VARS}")
    xs = np.arange(size, dtype=np.int64)
    idx = xs[:, None] ^ xs[None, :]  # idx[x, B] = x ^ B
    if n <= MAX_SWEEP_VARS:
        lookup = _bs_by_family(n)
        out = np.empty(tables.shape, dtype=np.int64)
        step = max(1, _CHUNK_ELEMENTS // (size * size))
        for start in range(0, tables.shape[0], step):
            block = tables[start:start + step]
            sens = block[:, idx] != block[:, :, None]
            weights = np.left_shift(1, np.arange(size, dtype=np.int64))
            families = (sens.astype(np.int64) * weights).sum(axis=-1)
            out[start:start + step] = lookup[families]
        return out
    out = np.empty(tables.shape, dtype=np.int64)
    for row, bits in enumerate(tables):
        out[row] = block_sensitivity_profile(TruthTable(n, bits))
    return out


@dataclass
class BatchMeasures:
    """Per-table measures for a stack of truth tables."""

    n: int
    s: np.ndarray
    bs: np.ndarray
    deg: np.ndarray
    local_s: np.ndarray = field(repr=False)
    local_bs: np.ndarray = field(repr=False)


def batch_measures(tables, n, with_bs=True):
    tables = np.asarray(tables, dtype=np.uint8)
    if tables.ndim != 2 or tables.shape[1] != 1 << n:
        raise InvalidParams(f"expected tables of shape (k, {1 << n}), got {tables.shape}")
    local_s = batch_local_sensitivity(tables, n).astype(np.int64)
    local_bs = batch_local_block_sensitivity(tables, n) if with_bs else None
    return BatchMeasures(
        n=n,
        s=local_s.max(axis=1),
        bs=local_bs.max(axis=1) if with_bs else None,
        deg=batch_degree(tables, n),
        local_s=local_s,
        local_bs=local_bs,
    )


def isqrt_ceil(k):
    """Smallest integer ``r`` with ``r*r >= k``."""
    r = math.isqrt(k)
    return r if r * r == k else r + 1
