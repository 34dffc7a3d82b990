from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

import oracles
from ecregen.errors import DimensionError, InsufficientHelpers, InvalidParameter, ReconstructionFailure
from ecregen.field import DEFAULT_PRIMITIVE_POLYS, gen_poly, get_field
from ecregen.gfmatrix import mat_rank, unpack_symmetric
from ecregen.mbr import MbrCode, MbrParams


@pytest.fixture(scope="module")
def code():
    return MbrCode(MbrParams(20, 10, 18, 5))


@pytest.fixture(scope="module")
def small():
    return MbrCode(MbrParams(7, 2, 3, 3))


def random_message(code, rng):
    return rng.integers(0, code.field.size, code.params.B).tolist()


def corrupt_rows(stored, node, rows, rng, q):
    sym = list(stored[node])
    for r in rows:
        sym[r] ^= int(rng.integers(1, q))
    stored[node] = sym


def test_parameters():
    p = MbrParams(20, 10, 18, 5)
    assert (p.alpha, p.B, p.beta) == (18, 135, 1)
    p = MbrParams(7, 2, 3, 3)
    assert (p.alpha, p.B) == (3, 5)


@pytest.mark.parametrize("args", [(7, 5, 4, 3), (7, 2, 7, 3), (8, 2, 3, 3), (7, 0, 3, 3), (7, 2, 3, 1)])
def test_invalid_parameters(args):
    with pytest.raises(InvalidParameter):
        MbrParams(*args)


def test_small_generator_polynomials_and_weights(small):
    f = get_field(3)
    assert small.g_poly == gen_poly(1, 5, f)
    assert small.f_poly == gen_poly(1, 4, f)
    assert [int(np.count_nonzero(r)) for r in small.g_k.data] == [6, 6]
    assert [int(np.count_nonzero(r)) for r in small.b_mat.data] == [5]
    assert mat_rank(small.g_full) == 3


def test_generator_structure(code):
    p = code.params
    assert code.g_k.data[:, p.n - p.k:].tolist() == np.eye(p.k, dtype=int).tolist()
    assert all(int(np.count_nonzero(r)) == p.n - p.k + 1 for r in code.g_k.data)
    assert all(int(np.count_nonzero(r)) == p.n - p.d + 1 for r in code.b_mat.data)
    assert code.g_full.shape == (18, 20)
    assert mat_rank(code.g_full) == 18
    # the two blocks share no nonzero combination
    assert mat_rank(code.g_k) + mat_rank(code.b_mat) == mat_rank(code.g_full)
    assert code.update_complexity() == (11, Fraction(11, 20))


def test_rank_matches_oracle(small):
    assert mat_rank(small.g_full) == oracles.rank(small.g_full.tolist(), 3, DEFAULT_PRIMITIVE_POLYS[3])


def test_zero_message(code):
    assert all(sh.symbols == [0] * 18 for sh in code.encode([0] * 135))


def test_message_layout(small):
    U = small.message_matrix([1, 2, 3, 4, 5]).tolist()
    assert U == [[1, 2, 4], [2, 3, 5], [4, 5, 0]]


def test_encoding_is_message_times_generator(code, rng):
    msg = random_message(code, rng)
    U = code.message_matrix(msg)
    assert U.tolist() == U.T.tolist()
    C = oracles.mat_mul(U.tolist(), code.g_full.tolist(), 5, DEFAULT_PRIMITIVE_POLYS[5])
    for i, sh in enumerate(code.encode(msg)):
        assert sh.symbols == [row[i] for row in C]
    A1 = unpack_symmetric(msg[:55], code.field)
    assert U.data[:10, :10].tolist() == A1.tolist()


def test_bottom_rows_vanish_without_second_block(code, rng):
    msg = random_message(code, rng)[:55] + [0] * 80
    for sh in code.encode(msg):
        assert sh.symbols[10:] == [0] * 8


def test_bottom_rows_are_k_codewords(code, rng):
    shares = code.encode(random_message(code, rng))
    for r in range(10, 18):
        assert code.k_code.is_codeword([sh.symbols[r] for sh in shares])


def test_length_checked(code):
    with pytest.raises(DimensionError):
        code.encode([0] * 134)


def test_clean_reconstruction(code, rng):
    msg = random_message(code, rng)
    stored = {sh.node_index: sh.symbols for sh in code.encode(msg)}
    res = code.reconstruct(stored.get)
    assert res.message == msg and res.nodes_accessed == 10 and res.rounds == 1


@pytest.mark.parametrize("v", range(6))
def test_whole_share_corruptions(code, rng, v):
    for _ in range(20):
        msg = random_message(code, rng)
        stored = {sh.node_index: sh.symbols for sh in code.encode(msg)}
        bad = rng.choice(20, v, replace=False).tolist()
        for i in bad:
            corrupt_rows(stored, i, range(18), rng, 32)
        res = code.reconstruct(stored.get, rng.permutation(20).tolist(), lambda c: c == msg)
        assert res.message == msg


def test_five_located_and_deleted_with_everyone_accessed(code, rng):
    msg = random_message(code, rng)
    stored = {sh.node_index: sh.symbols for sh in code.encode(msg)}
    bad = [0, 3, 6, 9, 12]
    for i in bad:
        corrupt_rows(stored, i, range(18), rng, 32)
    res = code.reconstruct(stored.get, check=lambda c: c == msg)
    assert res.message == msg
    assert res.bad_nodes == bad


def test_bottom_and_top_corruptions_beyond_half_distance(code, rng):
    """5 nodes lie only in the bottom rows, 2 more only in the top rows: 7 > 5."""
    for _ in range(10):
        msg = random_message(code, rng)
        stored = {sh.node_index: sh.symbols for sh in code.encode(msg)}
        nodes = rng.choice(20, 7, replace=False).tolist()
        for i in nodes[:5]:
            corrupt_rows(stored, i, range(10, 18), rng, 32)
        for i in nodes[5:]:
            corrupt_rows(stored, i, range(10), rng, 32)
        Y = np.array([stored[i] for i in range(20)]).T
        block, flagged = code._recover_block(Y, list(range(20)))
        assert block == msg
        assert sorted(flagged) == sorted(nodes[:5])
        res = code.reconstruct(stored.get, rng.permutation(20).tolist(), lambda c: c == msg)
        assert res.message == msg


def test_too_few_nodes(code, rng):
    stored = {sh.node_index: sh.symbols for sh in code.encode(random_message(code, rng))}
    few = {i: stored[i] for i in range(9)}
    with pytest.raises(ReconstructionFailure):
        code.reconstruct(few.get)


def test_helper_symbol_symmetry(code, rng):
    shares = code.encode(random_message(code, rng))
    assert code.helper_symbol(code.Share(1, [0] * 18), 4) == 0
    with pytest.raises(InvalidParameter):
        code.helper_symbol(shares[3], 3)
    for f, j in [(0, 1), (7, 19), (12, 4)]:
        assert code.helper_symbol(shares[j], f) == code.helper_symbol(shares[f], j)


def test_helper_symbols_form_a_codeword(code, rng):
    shares = code.encode(random_message(code, rng))
    for f in (0, 13):
        word = [code.helper_symbol(sh, f) if sh.node_index != f else 0 for sh in shares]
        word[f] = None
        cw, _ = code.full_code.decode(word)
        assert all(w is None or w == c for w, c in zip(word, cw))


def test_exhaustive_regeneration_small(small, rng):
    for _ in range(3):
        shares = small.encode(random_message(small, rng))
        for f in range(7):
            others = [j for j in range(7) if j != f]
            for subset in combinations(others, 3):
                pairs = [(j, small.helper_symbol(shares[j], f)) for j in subset]
                assert small.regenerate(f, pairs).symbols == shares[f].symbols


def test_small_code_corrects_a_lying_helper(small, rng):
    shares = small.encode(random_message(small, rng))
    for f in range(7):
        for liar in (j for j in range(7) if j != f):
            pairs = [(j, small.helper_symbol(shares[j], f) ^ (5 if j == liar else 0))
                     for j in range(7) if j != f]
            assert small.regenerate(f, pairs).symbols == shares[f].symbols


def test_zero_message_regenerates_zero(code):
    shares = code.encode([0] * 135)
    pairs = [(j, code.helper_symbol(shares[j], 4)) for j in range(20) if j != 4]
    assert code.regenerate(4, pairs).symbols == [0] * 18


def test_regeneration_needs_d_helpers(small, rng):
    shares = small.encode(random_message(small, rng))
    with pytest.raises(InsufficientHelpers):
        small.regenerate(0, [(j, small.helper_symbol(shares[j], 0)) for j in (1, 2)])


def test_node_lying_only_in_later_blocks(code, rng):
    msg = rng.integers(0, 32, 5 * 135).tolist()
    stored = {sh.node_index: list(sh.symbols) for sh in code.encode_blocks(msg)}
    for node, block in [(0, 2), (4, 4), (9, 1)]:
        for r in range(18):
            stored[node][block * 18 + r] ^= int(rng.integers(1, 32))
    res = code.reconstruct(stored.get, check=lambda c: c == msg)
    assert res.message == msg


def test_encode_blocks_matches_per_block_encode(code, rng):
    a, b = random_message(code, rng), random_message(code, rng)
    for sh, sa, sb in zip(code.encode_blocks(a + b), code.encode(a), code.encode(b)):
        assert sh.symbols == sa.symbols + sb.symbols
    assert code.encode_blocks([]) == [code.Share(i, []) for i in range(20)]
