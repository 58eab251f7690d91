"""Polynomial arithmetic over GF(2) and finite-field arithmetic over GF(2^m).

Polynomials over GF(2) are held as Python integers whose binary digits are
the coefficients: bit j is the coefficient of x^j, so addition is XOR and
multiplication is a carry-less product.  ``BinPoly`` is a thin immutable
wrapper that adds degree bookkeeping and operator support.

Field elements of GF(2^m) are plain ints in [0, 2^m): the m bits are the
coefficients of the residue polynomial in the polynomial basis.  All field
operations go through a ``FieldContext``, which owns the log/antilog tables
for a verified primitive polynomial.  Contexts are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from functools import lru_cache

__all__ = [
    "BinPoly",
    "FieldContext",
    "FieldElem",
    "build_field",
    "poly_mul",
    "poly_divmod",
    "poly_mod",
    "minimal_polynomial",
]

# A field element is an m-bit integer (polynomial-basis representation).
FieldElem = int


def _bits_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials held as ints."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _bits_divmod(a: int, mod: int) -> tuple[int, int]:
    if mod == 0:
        raise ZeroDivisionError("polynomial division by zero polynomial")
    dm = mod.bit_length() - 1
    q = 0
    while a.bit_length() - 1 >= dm and a:
        shift = a.bit_length() - 1 - dm
        a ^= mod << shift
        q |= 1 << shift
    return q, a


class BinPoly:
    """Immutable polynomial over GF(2); ``bits`` holds coefficient j at bit j."""

    __slots__ = ("bits",)

    def __init__(self, bits: int):
        if bits < 0:
            raise ValueError("coefficient bits must be nonnegative")
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("BinPoly is immutable")

    def __reduce__(self):
        return (BinPoly, (self.bits,))

    @classmethod
    def from_exponents(cls, *exponents: int) -> "BinPoly":
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def zero(cls) -> "BinPoly":
        return cls(0)

    @classmethod
    def one(cls) -> "BinPoly":
        return cls(1)

    @property
    def degree(self) -> int:
        """Degree of the polynomial; the zero polynomial has degree -1."""
        return self.bits.bit_length() - 1

    def exponents(self) -> list[int]:
        return [j for j in range(self.bits.bit_length()) if (self.bits >> j) & 1]

    def __bool__(self):
        return self.bits != 0

    def __eq__(self, other):
        return isinstance(other, BinPoly) and self.bits == other.bits

    def __hash__(self):
        return hash(("BinPoly", self.bits))

    def __add__(self, other: "BinPoly") -> "BinPoly":
        return BinPoly(self.bits ^ other.bits)

    __sub__ = __add__
    __xor__ = __add__

    def __mul__(self, other: "BinPoly") -> "BinPoly":
        return BinPoly(_bits_mul(self.bits, other.bits))

    def __divmod__(self, other: "BinPoly") -> tuple["BinPoly", "BinPoly"]:
        q, r = _bits_divmod(self.bits, other.bits)
        return BinPoly(q), BinPoly(r)

    def __mod__(self, other: "BinPoly") -> "BinPoly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "BinPoly") -> "BinPoly":
        return divmod(self, other)[0]

    def __repr__(self):
        if not self.bits:
            return "BinPoly(0)"
        terms = []
        for j in reversed(self.exponents()):
            if j == 0:
                terms.append("1")
            elif j == 1:
                terms.append("x")
            else:
                terms.append(f"x^{j}")
        return f"BinPoly({' + '.join(terms)})"


def poly_mul(a: BinPoly, b: BinPoly) -> BinPoly:
    """Carry-less product in GF(2)[x]."""
    return a * b


def poly_divmod(a: BinPoly, mod: BinPoly) -> tuple[BinPoly, BinPoly]:
    """Quotient and remainder of polynomial long division in GF(2)[x]."""
    return divmod(a, mod)


def poly_mod(a: BinPoly, mod: BinPoly) -> BinPoly:
    """Remainder of ``a`` modulo ``mod``; raises on the zero modulus."""
    return a % mod


class FieldContext:
    """GF(2^m) with log/antilog tables over a verified primitive polynomial.

    ``antilog[i]`` is alpha^i for i in [0, 2^m - 1); ``log[a]`` inverts it for
    nonzero a.  The antilog table is doubled so that ``antilog[i + j]`` is
    valid for any pair of logs without an explicit modular reduction.
    """

    __slots__ = ("m", "primitive_poly", "order", "size", "log", "antilog")

    def __init__(self, m: int, primitive_poly: BinPoly):
        if not 2 <= m <= 16:
            raise ValueError(f"extension degree m={m} out of supported range [2, 16]")
        if primitive_poly.degree != m:
            raise ValueError(
                f"primitive polynomial degree {primitive_poly.degree} != m={m}"
            )
        size = 1 << m
        order = size - 1
        prim = primitive_poly.bits
        if not prim & 1:
            raise ValueError("primitive polynomial must have nonzero constant term")

        # Build the tables by repeated multiplication by x.  The polynomial is
        # primitive iff x generates a cycle of 2^m - 1 distinct nonzero values;
        # anything reducible or non-primitive fails this constructive check.
        antilog = [0] * (2 * order)
        log = [0] * size
        seen = 0
        v = 1
        for i in range(order):
            if v == 0 or (i > 0 and v == 1):
                raise ValueError(
                    f"{primitive_poly!r} is not primitive over GF(2) "
                    f"(x has multiplicative order {i})"
                )
            antilog[i] = v
            log[v] = i
            seen += 1
            v <<= 1
            if v & size:
                v ^= prim
        if v != 1 or seen != order:
            raise ValueError(
                f"{primitive_poly!r} is not primitive over GF(2) "
                f"(powers of x do not form a cycle of order {order})"
            )
        antilog[order:] = antilog[:order]

        object.__setattr__(self, "m", m)
        object.__setattr__(self, "primitive_poly", primitive_poly)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "log", log)
        object.__setattr__(self, "antilog", antilog)

    def __setattr__(self, name, value):
        raise AttributeError("FieldContext is immutable")

    def __reduce__(self):
        return (FieldContext, (self.m, self.primitive_poly))

    def __repr__(self):
        return f"FieldContext(m={self.m}, primitive_poly={self.primitive_poly!r})"

    @property
    def alpha(self) -> FieldElem:
        return 2

    def add(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return a ^ b

    def mul(self, a: FieldElem, b: FieldElem) -> FieldElem:
        if a == 0 or b == 0:
            return 0
        return self.antilog[self.log[a] + self.log[b]]

    def inv(self, a: FieldElem) -> FieldElem:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return self.antilog[self.order - self.log[a]]

    def div(self, a: FieldElem, b: FieldElem) -> FieldElem:
        if b == 0:
            raise ZeroDivisionError("division by 0 in GF(2^m)")
        if a == 0:
            return 0
        return self.antilog[self.log[a] - self.log[b] + self.order]

    def pow(self, a: FieldElem, k: int) -> FieldElem:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of 0 in GF(2^m)")
            return 0 if k else 1
        return self.antilog[(self.log[a] * k) % self.order]

    def sqrt(self, a: FieldElem) -> FieldElem:
        # Squaring is the Frobenius bijection, so sqrt(a) = a^(2^(m-1)).
        if a == 0:
            return 0
        return self.antilog[(self.log[a] << (self.m - 1)) % self.order]

    def alpha_pow(self, k: int) -> FieldElem:
        return self.antilog[k % self.order]

    def trace(self, a: FieldElem) -> int:
        t = 0
        v = a
        for _ in range(self.m):
            t ^= v
            v = self.mul(v, v)
        return t & 1  # trace lands in GF(2)

    def eval_poly(self, poly: BinPoly, a: FieldElem) -> FieldElem:
        """Evaluate a GF(2)[x] polynomial at a field element."""
        acc = 0
        for j in reversed(range(poly.bits.bit_length())):
            acc = self.mul(acc, a)
            if (poly.bits >> j) & 1:
                acc ^= 1
        return acc


def build_field(m: int, primitive_poly: BinPoly) -> FieldContext:
    """Construct GF(2^m), verifying that ``primitive_poly`` is primitive."""
    return FieldContext(m, primitive_poly)


# First primitive polynomial per degree (coefficients as bit masks).
_DEFAULT_PRIMITIVE = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


@lru_cache(maxsize=None)
def default_field(m: int) -> FieldContext:
    """Shared GF(2^m) over the default primitive polynomial for this degree."""
    try:
        prim = _DEFAULT_PRIMITIVE[m]
    except KeyError:
        raise ValueError(f"no default primitive polynomial for m={m}") from None
    return FieldContext(m, BinPoly(prim))


def minimal_polynomial(ctx: FieldContext, exponent: int) -> BinPoly:
    """Minimal polynomial over GF(2) of alpha^exponent.

    Product of (x + c) over the conjugacy class c = alpha^(e*2^i); the result
    has coefficients in GF(2) by construction.
    """
    e = exponent % ctx.order
    conjugates = []
    c = e
    while True:
        conjugates.append(ctx.antilog[c])
        c = (c * 2) % ctx.order
        if c == e:
            break
    # poly coefficients live in GF(2^m) during the product; list index = degree
    coeffs = [1]
    for root in conjugates:
        nxt = [0] * (len(coeffs) + 1)
        for d, cf in enumerate(coeffs):
            nxt[d + 1] ^= cf
            nxt[d] ^= ctx.mul(cf, root)
        coeffs = nxt
    bits = 0
    for d, cf in enumerate(coeffs):
        if cf not in (0, 1):
            raise AssertionError("minimal polynomial has a coefficient outside GF(2)")
        bits |= cf << d
    return BinPoly(bits)
