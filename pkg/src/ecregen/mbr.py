"""Minimum-bandwidth regenerating code (alpha = d).

The d x d message matrix is ``U = [[A1, A2^T], [A2, 0]]`` with A1 symmetric
k x k and A2 (d-k) x k.  The generator stacks the systematic [n, k] RS
generator (polynomial g with roots a^1..a^{n-k}) over the d-k shifts
``x^i f(x)`` of the [n, d] generator polynomial f (roots a^1..a^{n-d}).
Every row then has the minimum weight its code allows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DecodeFailure,
    DimensionError,
    InsufficientHelpers,
    InvalidParameter,
    ReconstructionFailure,
    RegenerationFailure,
)
from .field import get_field
from .gfmatrix import GfMatrix, is_symmetric, mat_inv, pack_symmetric, unpack_symmetric, update_complexity
from .progressive import Reconstruction, encode_blocks, encoding_map, fetch_more, recover_blocks
from .rs import RsCode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MbrParams:
    n: int
    k: int
    d: int
    m: int

    def __post_init__(self):
        n, k, d, m = self.n, self.k, self.d, self.m
        if not 2 <= m <= 16:
            raise InvalidParameter(f"m must be in [2, 16], got {m}")
        if k < 1:
            raise InvalidParameter(f"k must be positive, got {k}")
        if not k <= d <= n - 1:
            raise InvalidParameter(f"need k <= d <= n-1, got k={k}, d={d}, n={n}")
        if n > (1 << m) - 1:
            raise InvalidParameter(f"n={n} exceeds the field limit 2^{m}-1")

    @property
    def alpha(self) -> int:
        return self.d

    @property
    def beta(self) -> int:
        return 1

    @property
    def B(self) -> int:
        return self.k * self.d - self.k * (self.k - 1) // 2

    @property
    def field(self):
        return get_field(self.m)


@dataclass(frozen=True)
class MbrShare:
    node_index: int
    symbols: list


class MbrCode:
    Share = MbrShare

    def __init__(self, params: MbrParams):
        self.params = params
        p, f = params, params.field
        self.field = f
        self.k_code = RsCode(p.n, p.k, 1, f)
        self.full_code = RsCode(p.n, p.d, 1, f)
        self.g_k = self.k_code.generator_matrix()
        self.f_poly = self.full_code.generator_poly
        shifts = []
        for i in range(p.d - p.k):
            row = [0] * p.n
            row[i:i + len(self.f_poly)] = self.f_poly
            shifts.append(row)
        self.b_mat = GfMatrix(f, np.array(shifts, dtype=np.int64).reshape(p.d - p.k, p.n))
        self.g_full = self.g_k.vstack(self.b_mat)

    @property
    def g_poly(self):
        return self.k_code.generator_poly

    def update_complexity(self):
        return update_complexity(self.g_full)

    # -- encoding ------------------------------------------------------------

    def message_matrix(self, message) -> GfMatrix:
        p, f = self.params, self.field
        if len(message) != p.B:
            raise DimensionError(f"MBR message needs {p.B} symbols, got {len(message)}")
        t = p.k * (p.k + 1) // 2
        A1 = unpack_symmetric(message[:t], f).data
        A2 = np.array(message[t:], dtype=np.int64).reshape(p.d - p.k, p.k)
        zero = np.zeros((p.d - p.k, p.d - p.k), dtype=np.int64)
        return GfMatrix(f, np.block([[A1, A2.T], [A2, zero]]))

    def encode(self, message):
        C = self.message_matrix(message) @ self.g_full
        return [MbrShare(i, C.data[:, i].tolist()) for i in range(self.params.n)]

    @cached_property
    def encoding_map(self):
        return encoding_map(self)

    def encode_blocks(self, symbols):
        return [MbrShare(i, c) for i, c in enumerate(encode_blocks(self, symbols))]

    # -- reconstruction ------------------------------------------------------

    def _recover_block(self, Y, accessed):
        """Y is d x len(accessed).  Returns (B symbols or None, flagged nodes)."""
        p, f = self.params, self.field
        n, k, d = p.n, p.k, p.d
        bottom = []
        for r in range(k, d):
            word = [None] * n
            for l, node in enumerate(accessed):
                word[node] = int(Y[r, l])
            try:
                bottom.append(self.k_code.decode(word)[0])
            except DecodeFailure:
                return None, []
        flagged = [node for l, node in enumerate(accessed)
                   if any(cw[node] != Y[k + r, l] for r, cw in enumerate(bottom))]
        A2 = np.array([cw[n - k:] for cw in bottom], dtype=np.int64).reshape(d - k, k)
        surviving = [(l, node) for l, node in enumerate(accessed) if node not in flagged]
        if len(surviving) < k:
            return None, flagged

        E = (GfMatrix(f, A2.T) @ self.b_mat).data  # k x n
        A1 = []
        for r in range(k):
            word = [None] * n
            for l, node in surviving:
                word[node] = int(Y[r, l] ^ E[r, node])
            try:
                A1.append(self.k_code.decode(word)[0][n - k:])
            except DecodeFailure:
                return None, flagged
        A1 = GfMatrix(f, A1)
        if not is_symmetric(A1):
            return None, flagged
        return pack_symmetric(A1) + A2.reshape(-1).tolist(), flagged

    def reconstruct(self, fetch, order=None, check=None) -> Reconstruction:
        """Progressive reconstruction deleting columns located by the bottom rows.

        Same ``fetch``/``order``/``check`` contract as MsrCode.reconstruct.
        Rounds continue, two nodes at a time, until every node has been tried.
        """
        p = self.params
        d = p.d
        order = list(range(p.n)) if order is None else list(order)
        state = {"order": order, "next": 0, "accessed": [], "shares": {}}
        fetch_more(state, fetch, p.k)
        rounds = 0
        while True:
            rounds += 1
            accessed = state["accessed"]
            if len(accessed) >= p.k:
                shares = state["shares"]

                def block_decoder(b, accessed=accessed):
                    Y = np.array([shares[node][b * d:(b + 1) * d] for node in accessed], dtype=np.int64).T
                    return self._recover_block(Y, accessed)

                message, flagged_all = recover_blocks(self, shares, accessed, block_decoder)
                if message is not None and (check is None or check(message)):
                    return Reconstruction(message, list(accessed), sorted(flagged_all), rounds)
                log.debug("MBR round with %d nodes failed", len(accessed))
            if not fetch_more(state, fetch, 2):
                break
        raise ReconstructionFailure("MBR reconstruction failed", state["accessed"])

    # -- regeneration --------------------------------------------------------

    def helper_symbol(self, share: MbrShare, failed_index: int) -> int:
        if failed_index == share.node_index:
            raise InvalidParameter("a node cannot help regenerate itself")
        g_f = self.g_full.data[:, failed_index]
        terms = self.field.mul_arr(g_f, np.asarray(share.symbols, dtype=np.int64))
        return int(np.bitwise_xor.reduce(terms))

    def regenerate(self, failed_index: int, helpers) -> MbrShare:
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
        return MbrShare(failed_index, x.data[0].tolist())
