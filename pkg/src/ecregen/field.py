"""Arithmetic in GF(2^m) and univariate polynomials over it.

Field elements are plain ints in ``[0, 2^m)``; addition is XOR.  Polynomials
are lists of coefficients, index ``i`` holding the coefficient of ``x^i``,
trimmed so the last entry is nonzero (the zero polynomial is ``[]``).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InvalidParameter

# x^m + ... bitmasks; m=3,4,5,8 are the usual table entries.
DEFAULT_PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def _slow_mul(x, y, m, poly):
    # shift-and-add; used only to validate the modulus before tables exist
    r = 0
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x >> m:
            x ^= poly
    return r


def _prime_factors(v):
    out, p = [], 2
    while p * p <= v:
        if v % p == 0:
            out.append(p)
            while v % p == 0:
                v //= p
        p += 1
    if v > 1:
        out.append(v)
    return out


class GF2m:
    """The field GF(2^m) built from a primitive polynomial.

    ``a`` is the element represented by the polynomial ``x``; it generates the
    multiplicative group, and ``exp(i)`` returns ``a**i``.
    """

    def __init__(self, m: int, primitive_poly: int | None = None):
        if not 2 <= m <= 16:
            raise InvalidParameter(f"m must be in [2, 16], got {m}")
        poly = DEFAULT_PRIMITIVE_POLYS[m] if primitive_poly is None else int(primitive_poly)
        if poly.bit_length() != m + 1:
            raise InvalidParameter(f"polynomial {poly:#x} does not have degree {m}")
        self.m = m
        self.primitive_poly = poly
        self.size = 1 << m
        self.order = self.size - 1  # multiplicative group order
        self.a = 2
        if not self._generator_is_primitive():
            raise InvalidParameter(f"polynomial {poly:#x} is not primitive over GF(2)")

        N = self.order
        exp = [0] * (2 * N)
        log = [0] * self.size
        x = 1
        for i in range(N):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.size:
                x ^= poly
        for i in range(N, 2 * N):
            exp[i] = exp[i - N]
        self._exp = exp
        self._log = log
        self.exp_np = np.array(exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)

    def _generator_is_primitive(self):
        N = self.order

        def power(e):
            r, b = 1, self.a
            while e:
                if e & 1:
                    r = _slow_mul(r, b, self.m, self.primitive_poly)
                b = _slow_mul(b, b, self.m, self.primitive_poly)
                e >>= 1
            return r

        if power(N) != 1:
            return False
        return all(power(N // p) != 1 for p in _prime_factors(N))

    def __repr__(self):
        return f"GF2m(m={self.m}, primitive_poly={self.primitive_poly:#x})"

    def __eq__(self, other):
        return isinstance(other, GF2m) and (self.m, self.primitive_poly) == (other.m, other.primitive_poly)

    def __hash__(self):
        return hash((self.m, self.primitive_poly))

    # -- scalar arithmetic -------------------------------------------------

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self._exp[self._log[x] + self._log[y]]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return self._exp[self.order - self._log[x]]

    def div(self, x: int, y: int) -> int:
        if y == 0:
            raise ZeroDivisionError("division by 0 in GF(2^m)")
        if x == 0:
            return 0
        return self._exp[self._log[x] - self._log[y] + self.order]

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no negative powers")
            return 0
        return self._exp[(self._log[x] * e) % self.order]

    def exp(self, i: int) -> int:
        """Return a**i (any integer i)."""
        return self._exp[i % self.order]

    def log(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("log of 0")
        return self._log[x]

    # -- elementwise numpy arithmetic --------------------------------------

    def mul_arr(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        out = self.exp_np[self.log_np[x] + self.log_np[y]]
        return np.where((x == 0) | (y == 0), 0, out)

    def div_arr(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if np.any(y == 0):
            raise ZeroDivisionError("division by 0 in GF(2^m)")
        out = self.exp_np[self.log_np[x] - self.log_np[y] + self.order]
        return np.where(x == 0, 0, out)


@lru_cache(maxsize=None)
def get_field(m: int, primitive_poly: int | None = None) -> GF2m:
    """Shared, cached field instance (fields are immutable)."""
    return GF2m(m, primitive_poly)


# -- polynomials ------------------------------------------------------------

def poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] ^= c
    return poly_trim(out)


def poly_scale(p, c, field):
    if c == 0:
        return []
    return [field.mul(x, c) for x in p]


def poly_mul(p, q, field):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x == 0:
            continue
        for j, y in enumerate(q):
            if y:
                out[i + j] ^= field.mul(x, y)
    return poly_trim(out)


def poly_divmod(p, q, field):
    """Quotient and remainder of p / q."""
    q = poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = poly_trim(p)
    if len(rem) < len(q):
        return [], rem
    quot = [0] * (len(rem) - len(q) + 1)
    lead_inv = field.inv(q[-1])
    for shift in range(len(rem) - len(q), -1, -1):
        c = rem[shift + len(q) - 1]
        if c == 0:
            continue
        c = field.mul(c, lead_inv)
        quot[shift] = c
        for j, y in enumerate(q):
            if y:
                rem[shift + j] ^= field.mul(c, y)
    return poly_trim(quot), poly_trim(rem[: len(q) - 1])


def poly_eval(p, x: int, field) -> int:
    """Horner evaluation of p at x."""
    acc = 0
    for c in reversed(p):
        acc = field.mul(acc, x) ^ c
    return acc


def gen_poly(first_root_exp: int, num_roots: int, field: GF2m):
    """Monic product of (x - a^i) for i in [first_root_exp, first_root_exp + num_roots)."""
    if not 0 <= num_roots <= field.order:
        raise InvalidParameter(f"num_roots must be in [0, {field.order}], got {num_roots}")
    g = [1]
    for i in range(first_root_exp, first_root_exp + num_roots):
        g = poly_mul(g, [field.exp(i), 1], field)
    return g
