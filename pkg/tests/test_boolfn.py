import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracles as oracle
from cubesense import boolfn
from cubesense.boolfn import TruthTable
from cubesense.errors import InvalidParams, ParseError, UnknownGenerator


def tables(max_n=4):
    return st.integers(0, max_n).flatmap(
        lambda n: st.integers(0, (1 << (1 << n)) - 1).map(lambda v: TruthTable.from_int(v, n))
    )


# -- wire format --------------------------------------------------------------

@pytest.mark.parametrize("text,n,bits", [
    ("8", 2, [0, 0, 0, 1]),
    ("6", 2, [0, 1, 1, 0]),
    ("1", 0, [1]),
    ("96", 3, [0, 1, 1, 0, 1, 0, 0, 1]),
])
def test_hex_roundtrip(text, n, bits):
    f = TruthTable.from_hex(text, n)
    assert f.bits.tolist() == bits
    assert f.to_hex() == text


def test_hex_accepts_uppercase_and_prefix():
    assert TruthTable.from_hex("0xE8", 3) == TruthTable.from_hex("e8", 3)


@pytest.mark.parametrize("text,n", [("zz", 3), ("e", 3), ("e80", 3), ("2", 0), ("", 2)])
def test_hex_rejects(text, n):
    with pytest.raises(ParseError):
        TruthTable.from_hex(text, n)


@given(tables())
def test_int_hex_consistent(f):
    assert TruthTable.from_int(f.to_int(), f.n) == f
    assert TruthTable.from_hex(f.to_hex(), f.n) == f


def test_bits_are_read_only():
    f = boolfn.gallery("parity", n=3)
    with pytest.raises(ValueError):
        f.bits[0] = 1


# -- flip and sensitivity -----------------------------------------------------

@pytest.mark.parametrize("x,S,out", [(5, [], 5), (0, [0, 1, 2], 7), (0b101, [1], 0b111)])
def test_flip(x, S, out):
    assert boolfn.flip(x, S) == out


def test_local_sensitivity_examples():
    assert all(boolfn.local_sensitivity(boolfn.gallery("parity", n=3), x) == 3 for x in range(8))
    assert all(boolfn.local_sensitivity(boolfn.gallery("constant0", n=4), x) == 0 for x in range(16))
    assert boolfn.local_sensitivity(boolfn.gallery("and", n=2), 0b11) == 2


@pytest.mark.parametrize("m", [2, 3])
def test_and_of_ors_sensitivity(m):
    assert boolfn.sensitivity(boolfn.and_of_ors(m)) == m


@pytest.mark.parametrize("n", range(0, 7))
def test_parity_measures(n):
    f = boolfn.gallery("parity", n=n)
    assert boolfn.sensitivity(f) == boolfn.block_sensitivity(f) == boolfn.degree(f) == n


def test_block_sensitivity_examples():
    assert boolfn.block_sensitivity(boolfn.gallery("constant1", n=3)) == 0
    assert boolfn.local_block_sensitivity(boolfn.gallery("or", n=2), 0) == 2
    assert boolfn.block_sensitivity(boolfn.gallery("and", n=3)) == 3


@settings(max_examples=150, deadline=None)
@given(tables())
def test_measures_match_oracle(f):
    bits = f.bits.tolist()
    rep = boolfn.measures(f)
    assert rep.s == oracle.sensitivity(bits, f.n)
    assert rep.bs == oracle.block_sensitivity(bits, f.n)
    assert rep.deg == oracle.degree(bits, f.n)
    assert rep.local_s[rep.s_witness] == rep.s
    assert rep.local_bs[rep.bs_witness] == rep.bs


def test_block_sensitivity_n5_spot_check():
    rng = np.random.default_rng(11)
    for _ in range(5):
        f = TruthTable(5, rng.integers(0, 2, 32))
        bits = f.bits.tolist()
        assert [boolfn.local_block_sensitivity(f, x) for x in range(32)] == [
            oracle.local_block_sensitivity(bits, 5, x) for x in range(32)
        ]


# -- polynomial ---------------------------------------------------------------

def test_expand_examples():
    p = boolfn.multilinear_expand(boolfn.gallery("constant1", n=3))
    assert p.coeffs.tolist() == [1] + [0] * 7
    assert boolfn.multilinear_expand(boolfn.gallery("and", n=2)).monomials() == [((0, 1), 1)]
    assert sorted(boolfn.multilinear_expand(boolfn.gallery("or", n=2)).monomials()) == [
        ((0,), 1), ((0, 1), -1), ((1,), 1)
    ]


@given(tables())
def test_expansion_interpolates(f):
    p = boolfn.multilinear_expand(f)
    assert [p.evaluate(x) for x in range(1 << f.n)] == f.bits.tolist()
    assert p.coeffs.tolist() == oracle.mobius_coefficients(f.bits.tolist(), f.n)


def test_degree_examples():
    assert boolfn.degree(boolfn.and_of_ors(2)) == 4
    assert boolfn.degree(boolfn.gallery("constant0", n=4)) == 0


@pytest.mark.parametrize("n", range(1, 5))
def test_full_degree_iff_signed_sum_nonzero(n):
    tabs = boolfn.all_tables(n)
    sign = 1 - 2 * (boolfn.popcounts(n) & 1)
    signed_sum = tabs.astype(np.int64) @ sign
    assert np.array_equal(boolfn.batch_degree(tabs, n) == n, signed_sum != 0)


# -- symmetries ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(tables(), st.data())
def test_measures_invariant_under_symmetries(f, data):
    perm = data.draw(st.permutations(range(f.n)))
    mask = data.draw(st.integers(0, (1 << f.n) - 1))
    base = boolfn.measures(f).to_dict()
    for g in (~f, boolfn.permute_variables(f, perm), boolfn.negate_variables(f, mask)):
        rep = boolfn.measures(g).to_dict()
        assert (rep["s"], rep["bs"], rep["deg"]) == (base["s"], base["bs"], base["deg"])


# -- gallery ------------------------------------------------------------------

def test_gallery_examples():
    assert boolfn.gallery("parity", n=1).bits.tolist() == [0, 1]
    assert boolfn.gallery("constant0", n=3).bits.tolist() == [0] * 8
    rep = boolfn.measures(boolfn.gallery("and_of_ors", m=2))
    assert (rep.s, rep.deg) == (2, 4)


def test_and_of_ors_block_layout():
    f = boolfn.and_of_ors(2)
    # blocks {0,1} and {2,3}: x0 (block 0) and x2 (block 1) satisfy both clauses
    assert f(0b0101) == 1 and f(0b0011) == 0 and f(0b1100) == 0


def test_gallery_random_is_seeded():
    assert boolfn.gallery("random", n=5, seed=3) == boolfn.gallery("random", n=5, seed=3)
    assert boolfn.gallery("random", n=5, seed=3) != boolfn.gallery("random", n=5, seed=4)


def test_gallery_errors():
    with pytest.raises(UnknownGenerator):
        boolfn.gallery("tribes", n=3)
    with pytest.raises(InvalidParams):
        boolfn.gallery("parity")


# -- batch paths agree with the scalar ones -----------------------------------

@pytest.mark.parametrize("n", [3, 5])
def test_batch_matches_scalar(n):
    rng = np.random.default_rng(n)
    tabs = rng.integers(0, 2, (40, 1 << n)).astype(np.uint8)
    batch = boolfn.batch_measures(tabs, n)
    for row, s, bs, deg in zip(tabs, batch.s, batch.bs, batch.deg):
        rep = boolfn.measures(TruthTable(n, row))
        assert (rep.s, rep.bs, rep.deg) == (s, bs, deg)


def test_isqrt_ceil():
    assert [boolfn.isqrt_ceil(k) for k in range(11)] == [0, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4]
