"""Minimum-storage regenerating code with d = 2*alpha.

The message fills two symmetric alpha x alpha matrices Z1, Z2.  Node i stores
``Z1 g_i + b_i Z2 g_i`` where ``g_i`` is column i of the systematic generator
of the [n, alpha] RS code with roots a^0..a^{n-alpha-1}, and
``b_i = gamma * (a^i)^alpha``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .errors import (
    DecodeFailure,
    DimensionError,
    InsufficientHelpers,
    InvalidParameter,
    ReconstructionFailure,
    RegenerationFailure,
)
from .field import get_field, poly_eval
from .gfmatrix import (
    GfMatrix,
    is_symmetric,
    mat_inv,
    mat_rank,
    pack_symmetric,
    unpack_symmetric,
    update_complexity,
)
from .progressive import Reconstruction, encode_blocks, encoding_map, fetch_more, recover_blocks
from .rs import RsCode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MsrParams:
    n: int
    k: int
    m: int
    gamma: int = 1

    def __post_init__(self):
        n, k, m = self.n, self.k, self.m
        if not 2 <= m <= 16:
            raise InvalidParameter(f"m must be in [2, 16], got {m}")
        if k < 2:
            raise InvalidParameter(f"k must be at least 2, got {k}")
        if n > (1 << m) - 1:
            raise InvalidParameter(f"n={n} exceeds the field limit 2^{m}-1")
        if self.d > n - 1:
            raise InvalidParameter(f"d=2k-2={self.d} exceeds n-1={n - 1}")
        if not 0 < self.gamma < (1 << m):
            raise InvalidParameter(f"gamma must be a nonzero element of GF(2^{m})")
        if gcd((1 << m) - 1, self.alpha) != 1:
            raise InvalidParameter(
                f"gcd(2^{m}-1, alpha={self.alpha}) != 1; (a^i)^alpha would repeat"
            )

    @property
    def d(self) -> int:
        return 2 * self.k - 2

    @property
    def alpha(self) -> int:
        return self.k - 1

    @property
    def beta(self) -> int:
        return 1

    @property
    def B(self) -> int:
        return self.k * self.alpha

    @property
    def field(self):
        return get_field(self.m)

    @property
    def max_errors(self) -> int:
        return (self.n - self.k + 1) // 2


@dataclass(frozen=True)
class MsrShare:
    node_index: int
    symbols: list


@dataclass
class GeneratorReport:
    distinct_diagonal: bool
    coset_membership: bool
    full_rank: bool
    product_rows_in_code: bool

    @property
    def ok(self) -> bool:
        return all((self.distinct_diagonal, self.coset_membership, self.full_rank, self.product_rows_in_code))


class MsrCode:
    """Generator, encoder, reconstruction and repair for one MsrParams.

    ``delta`` overrides the diagonal b_0..b_{n-1}; it exists so candidate
    diagonals can be checked with :meth:`verify_generator`.
    """

    Share = MsrShare

    def __init__(self, params: MsrParams, delta=None):
        self.params = params
        p, f = params, params.field
        self.field = f
        self.small_code = RsCode(p.n, p.alpha, 0, f)  # C_0,alpha: decodes P and Q rows
        self.full_code = RsCode(p.n, p.d, 0, f)  # C_0,d: generated by g_full
        self.gbar = self.small_code.generator_matrix()
        if delta is None:
            delta = [f.mul(p.gamma, f.pow(f.exp(i), p.alpha)) for i in range(p.n)]
        elif len(delta) != p.n:
            raise DimensionError(f"delta needs {p.n} entries")
        self.delta = list(delta)
        self.g_full = self.gbar.vstack(self.gbar_delta)

    @cached_property
    def gbar_delta(self) -> GfMatrix:
        return GfMatrix(self.field, self.field.mul_arr(self.gbar.data, np.array(self.delta)[None, :]))

    def update_complexity(self):
        return update_complexity(self.g_full)

    # -- generator checks ----------------------------------------------------

    def verify_generator(self) -> GeneratorReport:
        p, f = self.params, self.field
        n, alpha, d = p.n, p.alpha, p.d
        distinct = len(set(self.delta)) == n and 0 not in self.delta

        # b must be an evaluation vector (beta(a^j))_j of a polynomial of degree
        # exactly alpha; for n = 2^m - 1 this is the root test on sum b_j x^j.
        def vand(rows):
            return GfMatrix(f, [[f.pow(f.exp(j), e) for j in range(n)] for e in range(rows)])

        b_row = GfMatrix(f, [self.delta])
        in_upper = mat_rank(vand(alpha + 1).vstack(b_row)) == alpha + 1
        in_lower = mat_rank(vand(alpha).vstack(b_row)) == alpha
        coset = in_upper and not in_lower

        full_rank = mat_rank(self.g_full) == d
        zero_roots = [f.exp(i) for i in range(n - d)]
        rows_ok = all(
            poly_eval(row, x, f) == 0 for row in self.gbar_delta.tolist() for x in zero_roots
        )
        return GeneratorReport(distinct, coset, full_rank, rows_ok)

    # -- encoding ------------------------------------------------------------

    def message_matrices(self, message):
        p = self.params
        if len(message) != p.B:
            raise DimensionError(f"MSR message needs {p.B} symbols, got {len(message)}")
        half = p.B // 2
        return (unpack_symmetric(message[:half], self.field),
                unpack_symmetric(message[half:], self.field))

    def encode(self, message):
        """Shares for one block of B symbols."""
        Z1, Z2 = self.message_matrices(message)
        U = GfMatrix(self.field, np.hstack([Z1.data, Z2.data]))
        C = U @ self.g_full
        return [MsrShare(i, C.data[:, i].tolist()) for i in range(self.params.n)]

    @cached_property
    def encoding_map(self):
        return encoding_map(self)

    def encode_blocks(self, symbols):
        """Encode consecutive B-symbol blocks; each share concatenates its per-block columns."""
        return [MsrShare(i, c) for i, c in enumerate(encode_blocks(self, symbols))]

    # -- reconstruction ------------------------------------------------------

    def extract_pq(self, Y: GfMatrix, accessed):
        """Solve the symmetric pairs of Gbar_J^T Y for the P and Q entries.

        Returns two j x j matrices indexed by accessed position; the diagonal
        holds zeros and must be treated as unknown.
        """
        if len(set(accessed)) != len(accessed):
            raise InvalidParameter("accessed node indices must be distinct")
        if Y.shape != (self.params.alpha, len(accessed)):
            raise DimensionError(f"Y must be alpha x {len(accessed)}, got {Y.shape}")
        f = self.field
        M = (self.gbar.select_cols(accessed).T @ Y).data
        b = np.array([self.delta[i] for i in accessed], dtype=np.int64)
        denom = b[None, :] ^ b[:, None]
        np.fill_diagonal(denom, 1)
        Q = f.div_arr(M ^ M.T, denom)
        P = M ^ f.mul_arr(Q, b[None, :])
        np.fill_diagonal(Q, 0)
        np.fill_diagonal(P, 0)
        return GfMatrix(f, P), GfMatrix(f, Q)

    def _decode_rows(self, T, accessed):
        """Decode each row of P~ (or Q~) as a received word of the [n, alpha] code."""
        n = self.params.n
        out = []
        for i in range(len(accessed)):
            word = [None] * n
            for l, node in enumerate(accessed):
                if l != i:
                    word[node] = int(T[i, l])
            try:
                out.append(self.small_code.decode(word)[0])
            except DecodeFailure:
                out.append(None)
        return out

    def _choose_columns(self, good):
        tail = list(range(self.params.n - self.params.alpha, self.params.n))
        if set(tail) <= set(good):
            return tail
        return sorted(good)[: self.params.alpha]

    def _recover_block(self, Y, accessed, v):
        """One block of one round; returns B symbols or None if the round fails here."""
        p, f = self.params, self.field
        Pt, Qt = self.extract_pq(Y, accessed)
        p_rows = self._decode_rows(Pt.data, accessed)
        bad, good, ambiguous = locate_bad_columns(_error_pattern(Pt.data, p_rows, accessed), v, accessed)
        if ambiguous or len(bad) > v or len(good) < p.k + len(bad):
            return None, bad
        bad_set = set(bad)
        if any(row is None and accessed[i] not in bad_set for i, row in enumerate(p_rows)):
            return None, bad
        q_rows = self._decode_rows(Qt.data, accessed)
        if any(row is None and accessed[i] not in bad_set for i, row in enumerate(q_rows)):
            return None, bad

        cols = self._choose_columns(good)
        pos = {node: i for i, node in enumerate(accessed)}
        gbar_S = self.gbar.select_cols(cols)
        gbar_S_inv = mat_inv(gbar_S)
        gbar_S_T_inv = mat_inv(gbar_S.T)
        Z = []
        for rows in (p_rows, q_rows):
            hat = _symmetrize(rows, accessed, bad_set, p.n)
            GtZ = GfMatrix(f, hat[:, cols]) @ gbar_S_inv  # Gbar_J^T Z
            Zm = gbar_S_T_inv @ GtZ.select_rows([pos[c] for c in cols])
            if not is_symmetric(Zm):
                return None, bad
            Z.append(Zm)
        return pack_symmetric(Z[0]) + pack_symmetric(Z[1]), bad

    def reconstruct(self, fetch, order=None, check=None) -> Reconstruction:
        """Progressive error-correcting data reconstruction.

        ``fetch(node)`` returns that node's stored symbols (all blocks) or None
        when the node is unavailable; it is called at most once per node.
        ``order`` is the node access order (default ascending).  ``check``
        receives the candidate message and returns True when its integrity
        check passes.
        """
        p = self.params
        alpha = p.alpha
        order = list(range(p.n)) if order is None else list(order)
        state = {"order": order, "next": 0, "accessed": [], "shares": {}}
        fetch_more(state, fetch, p.k)
        v = 0
        while v <= p.max_errors:
            accessed = state["accessed"]
            if len(accessed) >= p.k:
                shares = state["shares"]

                def block_decoder(b, accessed=accessed, v=v):
                    Y = GfMatrix(self.field, [shares[node][b * alpha:(b + 1) * alpha] for node in accessed]).T
                    return self._recover_block(Y, accessed, v)

                message, bad_nodes = recover_blocks(self, shares, accessed, block_decoder)
                if message is not None and (check is None or check(message)):
                    return Reconstruction(message, list(accessed), sorted(bad_nodes), v + 1)
                log.debug("MSR round v=%d with %d nodes failed", v, len(accessed))
            if not fetch_more(state, fetch, 2):
                break
            v += 1
        raise ReconstructionFailure("MSR reconstruction failed", state["accessed"])

    # -- regeneration --------------------------------------------------------

    def helper_symbol(self, share: MsrShare, failed_index: int) -> int:
        if failed_index == share.node_index:
            raise InvalidParameter("a node cannot help regenerate itself")
        g_f = self.gbar.data[:, failed_index]
        terms = self.field.mul_arr(g_f, np.asarray(share.symbols, dtype=np.int64))
        return int(np.bitwise_xor.reduce(terms))

    def regenerate(self, failed_index: int, helpers) -> MsrShare:
        """Rebuild node ``failed_index`` from (node_index, helper_symbol) pairs."""
        p, f = self.params, self.field
        helpers = dict(helpers)
        helpers.pop(failed_index, None)
        if len(helpers) < p.d:
            raise InsufficientHelpers(f"need {p.d} helpers, got {len(helpers)}")
        word = [helpers.get(j) for j in range(p.n)]
        try:
            codeword, _ = self.full_code.decode(word)
        except DecodeFailure as exc:
            raise RegenerationFailure(str(exc)) from exc
        cols = sorted(helpers)[: p.d]
        x = GfMatrix(f, [[codeword[j] for j in cols]]) @ mat_inv(self.g_full.select_cols(cols))
        u, w = x.data[0, :p.alpha], x.data[0, p.alpha:]
        share = u ^ f.mul_arr(w, self.delta[failed_index])
        return MsrShare(failed_index, share.tolist())


def _error_pattern(T, rows, accessed):
    """E_P: j x j 0/1 matrix of mismatches between decoded rows and P~.

    Rows that failed to decode contribute no entries.
    """
    j = len(accessed)
    E = np.zeros((j, j), dtype=np.int64)
    for i, row in enumerate(rows):
        if row is None:
            continue
        for l, node in enumerate(accessed):
            if l != i and row[node] != T[i, l]:
                E[i, l] = 1
    return E


def locate_bad_columns(E, v: int, accessed):
    """Classify accessed columns of the error pattern E_P.

    Columns with at least v+2 nonzeros are bad, at most v are good, anything
    in between is ambiguous.  Returns ``(bad, good, ambiguous)`` as node
    index lists.
    """
    counts = np.count_nonzero(np.asarray(E), axis=0)
    bad, good, ambiguous = [], [], []
    for node, c in zip(accessed, counts):
        if c >= v + 2:
            bad.append(node)
        elif c <= v:
            good.append(node)
        else:
            ambiguous.append(node)
    return bad, good, ambiguous


def _symmetrize(rows, accessed, bad_set, n):
    """Decoded rows as a j x n array; bad rows take their accessed entries from the bad columns."""
    hat = np.zeros((len(accessed), n), dtype=np.int64)
    for i, row in enumerate(rows):
        if row is not None:
            hat[i] = row
    for i, node in enumerate(accessed):
        if node in bad_set:
            for l, other in enumerate(accessed):
                if other not in bad_set:
                    hat[i, other] = hat[l, node]
    return hat
