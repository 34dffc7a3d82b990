"""Reed-Solomon codes over GF(2^m) in polynomial (cyclic) form.

Codeword position ``j`` is the coefficient of ``x^j`` and has error locator
``a^j``.  A code with ``first_root_exp = s`` and redundancy ``r = n - dim`` is
the set of polynomials of degree < n divisible by
``(x - a^s)(x - a^{s+1})...(x - a^{s+r-1})``; for n < 2^m - 1 this is the
shortened cyclic code.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import DecodeFailure, DimensionError, InvalidParameter
from .field import GF2m, gen_poly, poly_divmod, poly_eval
from .gfmatrix import GfMatrix, vec_mat

SYSTEMATIC = "systematic"
VANDERMONDE = "vandermonde"


@dataclass(frozen=True)
class RsCode:
    n: int
    dim: int
    first_root_exp: int
    field: GF2m = dc_field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= self.field.order:
            raise InvalidParameter(f"RS length n={self.n} must be in [1, {self.field.order}]")
        if not 1 <= self.dim <= self.n:
            raise InvalidParameter(f"RS dimension {self.dim} must be in [1, n={self.n}]")

    @property
    def redundancy(self) -> int:
        return self.n - self.dim

    @property
    def d_min(self) -> int:
        return self.n - self.dim + 1

    @cached_property
    def generator_poly(self):
        return gen_poly(self.first_root_exp, self.redundancy, self.field)

    @cached_property
    def roots(self):
        return [self.field.exp(self.first_root_exp + i) for i in range(self.redundancy)]

    def generator_matrix(self, kind: str = SYSTEMATIC) -> GfMatrix:
        if kind == SYSTEMATIC:
            return self._systematic
        if kind == VANDERMONDE:
            return self._vandermonde
        raise InvalidParameter(f"unknown generator kind {kind!r}")

    @cached_property
    def _systematic(self) -> GfMatrix:
        # row i: remainder of x^{r+i} mod g(x), then the unit vector at position r+i
        f, r = self.field, self.redundancy
        rows = []
        for i in range(self.dim):
            _, rem = poly_divmod([0] * (r + i) + [1], self.generator_poly, f)
            row = rem + [0] * (self.n - len(rem))
            row[r + i] = 1
            rows.append(row)
        return GfMatrix(f, rows)

    @cached_property
    def _vandermonde(self) -> GfMatrix:
        # Evaluation form: entry (e, j) = w_j * (a^j)^e for e < dim.  The column
        # multipliers w_j make the row space equal the polynomial code for any n;
        # for n = 2^m - 1 they reduce to w_j = (a^j)^(1 - s), i.e. the plain
        # Vandermonde rows shifted by 1 - s.
        f, s, n = self.field, self.first_root_exp, self.n
        pts = [f.exp(j) for j in range(n)]
        w = []
        for j, xj in enumerate(pts):
            prod = f.exp(j * s)
            for l, xl in enumerate(pts):
                if l != j:
                    prod = f.mul(prod, xj ^ xl)
            w.append(f.inv(prod))
        rows = [[f.mul(w[j], f.pow(pts[j], e)) for j in range(n)] for e in range(self.dim)]
        return GfMatrix(f, rows)

    def syndromes(self, word):
        f = self.field
        return [poly_eval(word, x, f) for x in self.roots]

    def is_codeword(self, word) -> bool:
        return len(word) == self.n and not any(self.syndromes(word))

    def encode(self, msg, kind: str = SYSTEMATIC):
        if len(msg) != self.dim:
            raise DimensionError(f"message length {len(msg)} != dim {self.dim}")
        if kind == SYSTEMATIC:
            r = self.redundancy
            _, rem = poly_divmod([0] * r + list(msg), self.generator_poly, self.field)
            return rem + [0] * (r - len(rem)) + list(msg)
        return vec_mat(msg, self.generator_matrix(kind))

    def decode(self, received):
        """Error-and-erasure decoding.

        ``received`` has length n; ``None`` marks an erased position.  Returns
        ``(codeword, message)`` where the message is the systematic tail.
        Raises DecodeFailure when erasures + 2*errors exceed n - dim or the
        error locator is inconsistent.
        """
        n, r, f = self.n, self.redundancy, self.field
        if len(received) != n:
            raise DimensionError(f"received word length {len(received)} != n {n}")
        erasures = [j for j, v in enumerate(received) if v is None]
        rho = len(erasures)
        if rho > r:
            raise DecodeFailure(f"{rho} erasures exceed redundancy {r}")
        word = [0 if v is None else v for v in received]
        synd = self.syndromes(word)
        if not any(synd):
            return word, word[r:]

        mul, exp = f.mul, f.exp
        # erasure locator prod(1 - a^j x)
        lam = [1]
        for j in erasures:
            xj = exp(j)
            lam = [c ^ (mul(xj, lam[i - 1]) if i else 0) for i, c in enumerate(lam + [0])]
        B = list(lam)
        L = rho
        for step in range(rho + 1, r + 1):
            delta = 0
            for i, c in enumerate(lam):
                if i >= step:
                    break
                if c:
                    delta ^= mul(c, synd[step - 1 - i])
            xB = [0] + B
            if delta == 0:
                B = xB
                continue
            new = lam + [0] * (len(xB) - len(lam))
            for i, c in enumerate(xB):
                if c:
                    new[i] ^= mul(delta, c)
            if 2 * L <= step + rho - 1:
                dinv = f.inv(delta)
                B = [mul(dinv, c) for c in lam]
                L = step + rho - L
            else:
                B = xB
            lam = new
        while lam and lam[-1] == 0:
            lam.pop()
        deg = len(lam) - 1
        if deg != L or rho + 2 * (deg - rho) > r:
            raise DecodeFailure("error locator degree outside the decoding radius")

        # Chien search over the n valid positions
        positions = [j for j in range(n) if poly_eval(lam, exp(-j), f) == 0]
        if len(positions) != deg:
            raise DecodeFailure("error locator roots do not match its degree")

        # Forney: e_j = X^{1-s} * Omega(X^-1) / Lambda'(X^-1)
        omega = [0] * r
        for i, si in enumerate(synd):
            if si:
                for t, c in enumerate(lam):
                    if i + t >= r:
                        break
                    if c:
                        omega[i + t] ^= mul(si, c)
        dlam = [c if i % 2 == 1 else 0 for i, c in enumerate(lam)][1:]
        s = self.first_root_exp
        out = list(word)
        for j in positions:
            xinv = exp(-j)
            denom = poly_eval(dlam, xinv, f)
            if denom == 0:
                raise DecodeFailure("repeated error locator root")
            mag = mul(exp(j * (1 - s)), f.div(poly_eval(omega, xinv, f), denom))
            out[j] ^= mag
        if any(self.syndromes(out)):
            raise DecodeFailure("corrected word is not a codeword")
        return out, out[r:]


def hamming_weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))
