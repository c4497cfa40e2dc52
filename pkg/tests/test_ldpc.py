import os

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_array_equal

from pas.errors import AlistFormatError, RankError
from pas.ldpc import (
    BeliefPropagationDecoder,
    LdpcCode,
    decode,
    encode,
    format_alist,
    gf2_rank,
    hamming74,
    load_alist,
    parity_matrix,
    parse_alist,
    peg_code,
    save_alist,
    systematize,
)
from pas.modes import SHIPPED_CODES, shipped_code

HAMMING_ALIST = """7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2 0
1 3 0
2 3 0
1 2 3
1 0 0
2 0 0
3 0 0
1 2 4 5
1 3 4 6
2 3 4 7
"""


def rank_oracle(h):
    """Plain dense GF(2) rank, row by row."""
    a = np.array(h, dtype=np.uint8) % 2
    rank = 0
    for col in range(a.shape[1]):
        rows = np.flatnonzero(a[rank:, col]) + rank
        if rows.size == 0:
            continue
        a[[rank, rows[0]]] = a[[rows[0], rank]]
        for r in np.flatnonzero(a[:, col]):
            if r != rank:
                a[r] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


class TestAlist:
    def test_hamming(self):
        code = parse_alist(HAMMING_ALIST)
        assert (code.n, code.k, code.rank) == (7, 4, 3)
        assert_array_equal(code.h.toarray(), hamming74().h.toarray())

    def test_round_trip(self, tmp_path):
        code = shipped_code("toy-3-9")
        path = tmp_path / "c.alist"
        save_alist(code, path)
        again = load_alist(path)
        assert (again.h != code.h).nnz == 0
        assert format_alist(again) == format_alist(code)

    def test_shipped_files_are_stable(self):
        from importlib import resources

        text = resources.files("pas.data").joinpath("toy-3-6.alist").read_text()
        assert format_alist(parse_alist(text)).split() == text.split()

    @pytest.mark.parametrize(
        "text",
        [
            "\n".join(HAMMING_ALIST.splitlines()[:8]),
            HAMMING_ALIST.replace("2 2 2 3 1 1 1", "2 2 2 3 1 1"),
            HAMMING_ALIST.replace("1 2 4 5", "1 2 4 6"),
            HAMMING_ALIST.replace("3 4\n", "2 4\n", 1),
            HAMMING_ALIST.replace("1 3 0\n", "1 x 0\n"),
            "",
        ],
        ids=["truncated", "short-degree-list", "inconsistent", "max-degree", "token", "empty"],
    )
    def test_malformed(self, text):
        with pytest.raises(AlistFormatError):
            parse_alist(text)


class TestSystematize:
    def test_hamming_parity_block(self):
        code = hamming74()
        a = code.h.toarray()[:, :4]
        assert_array_equal(parity_matrix(code), a.T)

    @given(st.integers(2, 6), st.integers(1, 6), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_identity_back_block(self, m, k, seed):
        a = np.random.default_rng(seed).integers(0, 2, (m, k), dtype=np.uint8)
        code = LdpcCode(np.hstack([a, np.eye(m, dtype=np.uint8)]))
        assert_array_equal(parity_matrix(code), a.T)

    @pytest.mark.parametrize("seed", range(5))
    def test_generator_orthogonal(self, seed):
        h = np.random.default_rng(seed).integers(0, 2, (6, 14), dtype=np.uint8)
        code = LdpcCode(h)
        if rank_oracle(h) < 6:
            with pytest.raises(RankError):
                systematize(code)
            return
        form = systematize(code)
        g = np.zeros((form.k, code.n), dtype=np.int64)
        g[:, form.info_positions] = np.eye(form.k, dtype=np.int64)
        g[:, form.parity_positions] = form.parity_part
        assert not np.any((g @ h.T) % 2)
        assert sorted(form.perm.tolist()) == list(range(code.n))

    def test_zero_columns_rank_error(self):
        h = np.array([[1, 1, 0, 0], [1, 1, 0, 0], [0, 1, 0, 0]], dtype=np.uint8)
        with pytest.raises(RankError) as info:
            systematize(LdpcCode(h))
        assert info.value.deficiency == 1

    def test_duplicate_rows(self):
        h = np.array([[1, 0, 1, 1, 0], [1, 0, 1, 1, 0]], dtype=np.uint8)
        with pytest.raises(RankError) as info:
            systematize(LdpcCode(h))
        assert info.value.deficiency == 1

    @pytest.mark.parametrize("seed", range(4))
    def test_rank_matches_oracle(self, seed):
        h = np.random.default_rng(seed).integers(0, 2, (20, 50), dtype=np.uint8)
        h[3] = h[1] ^ h[2]
        assert gf2_rank(sp.csr_matrix(h)) == rank_oracle(h) == 19

    def test_permutation_is_recorded(self):
        h = np.array([[1, 1, 0, 1, 0, 0], [0, 1, 1, 0, 1, 0], [1, 0, 0, 0, 1, 1]], dtype=np.uint8)
        code = LdpcCode(h[:, ::-1].copy())
        sys_code = code.systematic()
        assert sys_code.column_order is not None or code.systematic_form.is_identity
        data = np.array([1, 0, 1], dtype=np.uint8)
        word = encode(sys_code, data)
        assert_array_equal(word[:3], data)
        assert not sys_code.syndrome(word).any()
        if sys_code.column_order is not None:
            original = np.empty_like(word)
            original[sys_code.column_order] = word
            assert not code.syndrome(original).any()


class TestEncode:
    def test_zero(self):
        assert not encode(hamming74(), np.zeros(4, dtype=np.uint8)).any()

    def test_hamming_example(self):
        assert_array_equal(encode(hamming74(), [1, 0, 1, 1]), [1, 0, 1, 1, 0, 1, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            encode(hamming74(), [1, 0, 1])

    @pytest.mark.parametrize("name", SHIPPED_CODES)
    def test_shipped_syndrome_zero(self, name):
        code = shipped_code(name)
        data = np.random.default_rng(0).integers(0, 2, (20, code.k), dtype=np.uint8)
        words = encode(code, data)
        assert_array_equal(words[:, code.systematic_form.info_positions], data)
        assert not code.syndrome(words).any()

    def test_staircase_matches_dense(self):
        rng = np.random.default_rng(5)
        m, k = 12, 20
        a = rng.integers(0, 2, (m, k), dtype=np.uint8)
        stair = np.eye(m, dtype=np.uint8) + np.eye(m, k=-1, dtype=np.uint8)
        code = LdpcCode(np.hstack([a, stair]))
        assert code.systematic_form.triangular
        data = rng.integers(0, 2, (30, k), dtype=np.uint8)
        words = encode(code, data)
        assert not code.syndrome(words).any()
        assert_array_equal(words[:, :k], data)

    def test_general_triangular_back_block(self):
        rng = np.random.default_rng(6)
        m, k = 10, 15
        a = rng.integers(0, 2, (m, k), dtype=np.uint8)
        lower = np.tril(rng.integers(0, 2, (m, m), dtype=np.uint8), -1) | np.eye(m, dtype=np.uint8)
        code = LdpcCode(np.hstack([a, lower]))
        data = rng.integers(0, 2, (8, k), dtype=np.uint8)
        assert not code.syndrome(encode(code, data)).any()


class TestDecode:
    def test_noiseless_one_iteration(self):
        code = hamming74()
        word = encode(code, [1, 0, 1, 1])
        bits, ok, iters = decode(code, 20.0 * (1 - 2.0 * word))
        assert_array_equal(bits, word)
        assert ok and iters == 1

    @pytest.mark.parametrize("pos", range(7))
    def test_single_flip_corrected(self, pos):
        code = hamming74()
        word = encode(code, [1, 0, 1, 1])
        llr = 2.0 * (1 - 2.0 * word)
        llr[pos] = -llr[pos]
        bits, ok, _ = decode(code, llr)
        assert ok
        assert_array_equal(bits, word)

    def test_all_zero_llrs(self):
        _, ok, iters = decode(hamming74(), np.zeros(7), max_iter=25)
        assert not ok and iters == 25

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            decode(hamming74(), np.zeros(6))

    def test_batch_matches_single(self):
        code = shipped_code("toy-3-6")
        rng = np.random.default_rng(2)
        words = encode(code, rng.integers(0, 2, (6, code.k), dtype=np.uint8))
        llr = 2.0 / 0.8**2 * ((1 - 2.0 * words) + 0.8 * rng.standard_normal(words.shape))
        bits, ok, its = decode(code, llr, 50)
        for i in range(6):
            b, o, t = decode(code, llr[i], 50)
            assert_array_equal(bits[i], b)
            assert (ok[i], its[i]) == (o, t)

    @pytest.mark.parametrize("name", SHIPPED_CODES)
    def test_high_snr_identity(self, name):
        code = shipped_code(name)
        rng = np.random.default_rng(11)
        words = encode(code, rng.integers(0, 2, (100, code.k), dtype=np.uint8))
        llr = 8.0 * (1 - 2.0 * words) + rng.standard_normal(words.shape)
        res = BeliefPropagationDecoder(code).decode(llr, 100)
        assert res.converged.all()
        assert_array_equal(res.bits, words)

    def test_codeword_symmetry(self):
        # decoding (c, z) equals decoding (0, z with c's signs) up to XOR with c
        code = shipped_code("toy-3-6")
        rng = np.random.default_rng(4)
        dec = BeliefPropagationDecoder(code)
        for _ in range(10):
            c = encode(code, rng.integers(0, 2, code.k, dtype=np.uint8))
            z = 0.9 * rng.standard_normal(code.n)
            s = 1 - 2.0 * c
            a = dec.decode(2.0 / 0.81 * (s + z), 30)
            b = dec.decode(2.0 / 0.81 * (1 + s * z), 30)
            assert_array_equal(a.bits ^ c, b.bits)
            assert a.converged == b.converged and a.iterations == b.iterations


class TestCodes:
    @pytest.mark.parametrize(
        "name, n, k, dv",
        [("toy-3-6", 1000, 500, 3), ("toy-3-9", 1008, 672, 3), ("toy-3-12", 1008, 756, 3), ("toy-7-12", 1008, 588, 3)],
    )
    def test_shipped_profiles(self, name, n, k, dv):
        code = shipped_code(name)
        assert (code.n, code.k, code.rank) == (n, k, n - k)
        assert code.degree_profile["variable"] == {dv: n}

    def test_peg_seeded(self):
        a = peg_code(96, 48, 3, seed=3)
        b = peg_code(96, 48, 3, seed=3)
        assert (a.h != b.h).nnz == 0
        assert a.rank == 48
        assert set(a.variable_degrees.tolist()) == {3}
        assert a.check_degrees.max() - a.check_degrees.min() <= 1


DVBS2_23 = os.environ.get("PAS_DVBS2_R23_ALIST")


@pytest.mark.skipif(not DVBS2_23, reason="set PAS_DVBS2_R23_ALIST to a DVB-S2 rate-2/3 alist")
def test_dvbs2_degree_profile():
    code = load_alist(DVBS2_23)
    assert code.degree_profile["variable"] == {13: 4320, 3: 38880, 2: 21599, 1: 1}
