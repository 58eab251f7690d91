"""Shortened, doubly-extended binary BCH component codes with syndrome decoding.

The component code protecting each row/column of a staircase or product code
is a t-error-correcting binary BCH code whose generator may be multiplied by
(x^2 + 1), appending a two-bit error-detecting residue, and which may be
shortened from its mother length 2^m - 1.

Codewords are bit arrays indexed by exponent: position j holds the
coefficient of x^j, so positions [0, r) are the parity bits of a systematic
encoding and the information occupies the high positions.  Shortening removes
the highest positions, which therefore must never appear as error locations.

Decoding is algebraic and table-driven: the up-to-three error locations come
from the syndrome via quadratic/cubic root lookup tables of 2^m entries, and
a candidate correction is accepted only if it maps the complete syndrome
(including the extension residue) to zero.  For the hot path the full
syndrome is packed into a single integer: m-bit lanes for each odd power sum
s1, s3, s5 followed by the two extension parity bits, so that the syndrome
update for one flipped position is a single XOR with a precomputed mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import BinPoly, FieldContext, default_field, minimal_polynomial

__all__ = [
    "Syndrome",
    "DecodeOutcome",
    "RootTables",
    "ComponentCodeSpec",
    "bch_generator",
    "G709_GENERATOR_FACTORS",
    "solve_quadratic",
    "solve_suppressed_quadratic",
    "solve_cubic",
    "solve_suppressed_cubic",
    "cube_roots",
]

# Factors of the generator used by the G.709-compatible code: the three
# degree-10 minimal polynomials of alpha, alpha^3, alpha^5 over
# x^10 + x^3 + 1, and the (x^2 + 1) extension.
G709_GENERATOR_FACTORS = (
    BinPoly.from_exponents(10, 3, 0),
    BinPoly.from_exponents(10, 3, 2, 1, 0),
    BinPoly.from_exponents(10, 8, 3, 2, 0),
    BinPoly.from_exponents(2, 0),
)


def bch_generator(ctx: FieldContext, t: int, extend: bool = True) -> BinPoly:
    """Generator polynomial: lcm of minimal polynomials of alpha^(2i+1),
    i < t, optionally multiplied by (x^2 + 1)."""
    g = BinPoly.one()
    seen = set()
    for i in range(t):
        mp = minimal_polynomial(ctx, 2 * i + 1)
        if mp not in seen:
            seen.add(mp)
            g = g * mp
    if extend:
        g = g * BinPoly.from_exponents(2, 0)
    return g


@dataclass(frozen=True)
class Syndrome:
    """Power sums s_i = sum over set positions j of alpha^(i*j), plus the
    (x^2 + 1) residue: e0/e1 are the parities of the even/odd positions."""

    s1: int
    s3: int
    s5: int
    e0: int
    e1: int

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        return Syndrome(
            self.s1 ^ other.s1,
            self.s3 ^ other.s3,
            self.s5 ^ other.s5,
            self.e0 ^ other.e0,
            self.e1 ^ other.e1,
        )


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of decoding one syndrome.

    kind is "no_error", "corrected" or "failure"; positions holds the
    distinct error locations (< n_c) when corrected.  miscorrection_guard
    records that a locator-consistent candidate was vetoed purely by the
    extension residue check.
    """

    kind: str
    positions: tuple[int, ...] = ()
    miscorrection_guard: bool = False

    @property
    def corrected(self) -> bool:
        return self.kind == "corrected"


class RootTables:
    """Lookup tables for root-finding in GF(2^m), verified at build time.

    quad[c]      one root y of y^2 + y + c (partner is y ^ 1), -1 if none
    cube[c]      one cube root of c, -1 if c is not a cube
    supp[c]      pair (r1, r2) of roots of z^3 + z + c when it has three
                 distinct nonzero roots {r1, r2, r1 ^ r2}, else None
    """

    __slots__ = ("ctx", "quad", "cube", "supp", "omega")

    def __init__(self, ctx: FieldContext):
        size = ctx.size
        quad = [-1] * size
        for y in range(size):
            c = ctx.mul(y, y) ^ y
            if quad[c] == -1:
                quad[c] = y
        cube = [-1] * size
        buckets: dict[int, list[int]] = {}
        for z in range(size):
            c = ctx.mul(ctx.mul(z, z), z)
            if cube[c] == -1:
                cube[c] = z
            c2 = c ^ z
            buckets.setdefault(c2, []).append(z)
        supp: list[tuple[int, int] | None] = [None] * size
        for c, roots in buckets.items():
            if len(roots) == 3 and 0 not in roots:
                supp[c] = (roots[0], roots[1])
        # cube roots come in triples only when 3 divides 2^m - 1 (even m);
        # omega is then a primitive cube root of unity.
        omega = ctx.antilog[ctx.order // 3] if ctx.order % 3 == 0 else None

        for c in range(size):
            y = quad[c]
            if y >= 0:
                assert ctx.mul(y, y) ^ y == c
            z = cube[c]
            if z >= 0:
                assert ctx.mul(ctx.mul(z, z), z) == c
            pr = supp[c]
            if pr is not None:
                for rr in (pr[0], pr[1], pr[0] ^ pr[1]):
                    assert ctx.mul(ctx.mul(rr, rr), rr) ^ rr == c

        self.ctx = ctx
        self.quad = quad
        self.cube = cube
        self.supp = supp
        self.omega = omega


@lru_cache(maxsize=None)
def _root_tables(ctx: FieldContext) -> RootTables:
    return RootTables(ctx)


def solve_suppressed_quadratic(tables: RootTables, c: int) -> tuple[int, ...]:
    """Roots of y^2 + y + c; empty tuple when trace(c) = 1 (no roots)."""
    y = tables.quad[c]
    if y < 0:
        return ()
    return (y, y ^ 1)


def solve_quadratic(ctx: FieldContext, a: int, b: int) -> tuple[int, ...]:
    """Roots of x^2 + a*x + b with a != 0, via the substitution x = a*y."""
    if a == 0:
        raise ValueError("degenerate quadratic: a = 0 (x^2 = b has the double root sqrt(b))")
    tables = _root_tables(ctx)
    c = ctx.div(b, ctx.mul(a, a))
    return tuple(ctx.mul(a, y) for y in solve_suppressed_quadratic(tables, c))


def cube_roots(tables: RootTables, c: int) -> tuple[int, ...]:
    """All cube roots of c (zero, one, or three of them)."""
    z = tables.cube[c]
    if z < 0:
        return ()
    if c == 0 or tables.omega is None:
        return (z,)
    ctx = tables.ctx
    z2 = ctx.mul(z, tables.omega)
    return (z, z2, ctx.mul(z2, tables.omega))


def solve_suppressed_cubic(tables: RootTables, c: int) -> tuple[int, ...]:
    """The three distinct nonzero roots of z^3 + z + c, or empty."""
    pr = tables.supp[c]
    if pr is None:
        return ()
    return (pr[0], pr[1], pr[0] ^ pr[1])


def solve_cubic(ctx: FieldContext, a: int, b: int, c: int) -> tuple[int, ...]:
    """Roots of x^3 + a*x^2 + b*x + c when it has three distinct roots.

    Substituting x = y + a suppresses the square term: y^3 + (a^2+b)y + (ab+c).
    If a^2 + b = 0 the roots are the cube roots of ab + c; otherwise
    y = sqrt(a^2+b) * z reduces to z^3 + z + (ab+c)/(a^2+b)^(3/2), solved by
    table lookup.  Returns () unless exactly three distinct roots exist.
    """
    tables = _root_tables(ctx)
    u = ctx.mul(a, a) ^ b           # a^2 + b
    w = ctx.mul(a, b) ^ c           # ab + c
    if u == 0:
        ys = cube_roots(tables, w)
        if len(ys) != 3:
            return ()
    else:
        su = ctx.sqrt(u)
        cc = ctx.div(w, ctx.mul(ctx.mul(su, su), su))  # w / u^(3/2)
        zs = solve_suppressed_cubic(tables, cc)
        if not zs:
            return ()
        ys = tuple(ctx.mul(su, z) for z in zs)
    roots = tuple(y ^ a for y in ys)
    return roots if len(set(roots)) == 3 else ()


class ComponentCodeSpec:
    """A t-error-correcting (optionally doubly-extended, shortened) BCH code.

    Parameters come from the field context, the correction radius t in
    {1, 2, 3}, the transmitted length n_c <= 2^m - 1, and the extension flag.
    r = deg(generator) parity bits; k_c = n_c - r information bits.
    Immutable after construction; encoding and decoding are pure.
    """

    def __init__(self, ctx: FieldContext, t: int, n_c: int | None = None,
                 extended: bool = True, generator: BinPoly | None = None):
        if t not in (1, 2, 3):
            raise ValueError("supported correction radii: t in {1, 2, 3}")
        self.ctx = ctx
        self.t = t
        self.extended = extended
        self.mother_length = ctx.order
        self.bch_factor_roots = tuple(2 * i + 1 for i in range(t))
        self.generator = generator if generator is not None else bch_generator(ctx, t, extended)
        self.extension_poly = BinPoly.from_exponents(2, 0) if extended else None
        self.r = self.generator.degree
        self.n_c = self.mother_length if n_c is None else n_c
        self.shorten = self.mother_length - self.n_c
        if not 0 <= self.shorten < self.mother_length - self.r:
            raise ValueError(
                f"n_c={self.n_c} incompatible with mother length {self.mother_length} "
                f"and r={self.r}"
            )
        self.k_c = self.n_c - self.r

        for e in self.bch_factor_roots:
            if ctx.eval_poly(self.generator, ctx.alpha_pow(e)) != 0:
                raise AssertionError(f"generator does not vanish at alpha^{e}")

        m = ctx.m
        # packed syndrome layout: t lanes of m bits (s1, s3, s5), then e0, e1
        self._ext_shift = t * m
        self._bch_mask = (1 << self._ext_shift) - 1
        antilog = ctx.antilog
        order = ctx.order
        masks = []
        for j in range(self.n_c):
            v = 0
            for i, e in enumerate(self.bch_factor_roots):
                v |= antilog[(e * j) % order] << (i * m)
            if extended:
                v |= (1 ^ (j & 1)) << self._ext_shift
                v |= (j & 1) << (self._ext_shift + 1)
            masks.append(v)
        self.packed_masks = masks
        self.packed_masks_np = np.array(masks, dtype=np.int64)

        # x^e mod generator, for systematic parity computation
        gbits = self.generator.bits
        rem = [0] * self.n_c
        v = 1
        for e in range(self.n_c):
            rem[e] = v
            v <<= 1
            if (v >> self.r) & 1:
                v ^= gbits
        self._rem = rem

        self.tables = _root_tables(ctx)
        self._half = (order + 1) // 2  # multiplicative inverse of 2 mod order

    @classmethod
    def g709(cls) -> "ComponentCodeSpec":
        """The (1022, 990) triple-error-correcting doubly-extended code used
        by the G.709-compatible staircase construction."""
        ctx = default_field(10)
        g = BinPoly.one()
        for f in G709_GENERATOR_FACTORS:
            g = g * f
        return cls(ctx, t=3, n_c=1022, extended=True, generator=g)

    @classmethod
    def from_field_degree(cls, m: int, t: int, n_c: int | None = None,
                          extended: bool = True) -> "ComponentCodeSpec":
        return cls(default_field(m), t, n_c=n_c, extended=extended)

    def __repr__(self):
        return (f"ComponentCodeSpec(m={self.ctx.m}, t={self.t}, n_c={self.n_c}, "
                f"k_c={self.k_c}, r={self.r}, extended={self.extended})")

    # ---------------- encoding ----------------

    def encode_systematic(self, info) -> np.ndarray:
        """Systematic codeword for k_c information bits.

        ``info[i]`` is placed at position r + i; the returned length-n_c
        array holds the parity remainder in positions [0, r).
        """
        info = np.asarray(info, dtype=np.uint8)
        if info.shape != (self.k_c,):
            raise ValueError(f"expected {self.k_c} information bits, got {info.shape}")
        word = np.zeros(self.n_c, dtype=np.uint8)
        word[self.r:] = info
        par = 0
        rem = self._rem
        for i in np.nonzero(info)[0]:
            par ^= rem[self.r + int(i)]
        for b in range(self.r):
            word[b] = (par >> b) & 1
        return word

    def parity_bits_matrix(self, exponents: np.ndarray) -> np.ndarray:
        """(len(exponents), r) 0/1 float32 matrix; row i holds the parity
        remainder of x^exponents[i].  Float dtype so that batched parity is a
        single BLAS matmul followed by a mod-2 reduction."""
        rem = self._rem
        out = np.zeros((len(exponents), self.r), dtype=np.float32)
        for i, e in enumerate(exponents):
            v = rem[int(e)]
            for b in range(self.r):
                out[i, b] = (v >> b) & 1
        return out

    # ---------------- syndromes ----------------

    def pack(self, syn: Syndrome) -> int:
        m = self.ctx.m
        v = syn.s1
        if self.t >= 2:
            v |= syn.s3 << m
        if self.t >= 3:
            v |= syn.s5 << (2 * m)
        if self.extended:
            v |= syn.e0 << self._ext_shift
            v |= syn.e1 << (self._ext_shift + 1)
        return v

    def unpack(self, packed: int) -> Syndrome:
        m = self.ctx.m
        lane = (1 << m) - 1
        s1 = packed & lane
        s3 = (packed >> m) & lane if self.t >= 2 else 0
        s5 = (packed >> (2 * m)) & lane if self.t >= 3 else 0
        e0 = (packed >> self._ext_shift) & 1 if self.extended else 0
        e1 = (packed >> (self._ext_shift + 1)) & 1 if self.extended else 0
        return Syndrome(s1, s3, s5, e0, e1)

    def packed_syndrome(self, word) -> int:
        word = np.asarray(word)
        if word.shape != (self.n_c,):
            raise ValueError(f"expected word of length {self.n_c}")
        acc = 0
        masks = self.packed_masks
        for j in np.nonzero(word)[0]:
            acc ^= masks[int(j)]
        return acc

    def compute_syndrome(self, word) -> Syndrome:
        """Full syndrome (s1, s3, s5, e0, e1) of a received word.

        All five components are computed regardless of t; decoding only
        consults the ones the code constrains.
        """
        word = np.asarray(word)
        if word.shape != (self.n_c,):
            raise ValueError(f"expected word of length {self.n_c}")
        ctx = self.ctx
        antilog, order = ctx.antilog, ctx.order
        s1 = s3 = s5 = 0
        e0 = e1 = 0
        for j in np.nonzero(word)[0]:
            j = int(j)
            s1 ^= antilog[j % order]
            s3 ^= antilog[3 * j % order]
            s5 ^= antilog[5 * j % order]
            if j & 1:
                e1 ^= 1
            else:
                e0 ^= 1
        return Syndrome(s1, s3, s5, e0, e1)

    def syndrome_mask(self, position: int) -> Syndrome:
        """Syndrome of the weight-1 word with the given position set."""
        if not 0 <= position < self.n_c:
            raise ValueError(f"position {position} out of range [0, {self.n_c})")
        ctx = self.ctx
        return Syndrome(
            ctx.alpha_pow(position),
            ctx.alpha_pow(3 * position),
            ctx.alpha_pow(5 * position),
            1 ^ (position & 1),
            position & 1,
        )

    def is_codeword(self, word) -> bool:
        return self.packed_syndrome(word) == 0

    # ---------------- decoding ----------------

    def decode_packed(self, syn: int, check_extension: bool = True):
        """Fast path: error positions for a packed syndrome, or None.

        Returns () for the zero syndrome, a tuple of 1..t distinct positions
        when a correction is accepted, and None on decode failure.  A
        candidate is accepted only if XORing the masks of its positions into
        the syndrome clears it entirely (the extension lanes too, unless
        check_extension is False).
        """
        if syn == 0:
            return ()
        ctx = self.ctx
        m = ctx.m
        lane = (1 << m) - 1
        log, antilog, order = ctx.log, ctx.antilog, ctx.order
        s1 = syn & lane
        t = self.t

        if t == 1:
            roots = (s1,) if s1 else None
        elif t == 2:
            s3 = (syn >> m) & lane
            if s1:
                ls1 = log[s1]
                d3 = antilog[3 * ls1 % order] ^ s3
                if d3 == 0:
                    roots = (s1,)
                else:
                    c = antilog[(log[d3] - 3 * ls1) % order]
                    y = self.tables.quad[c]
                    roots = None if y < 0 else (
                        antilog[ls1 + log[y]], antilog[ls1 + log[y ^ 1]])
            else:
                roots = None
        else:
            s3 = (syn >> m) & lane
            s5 = (syn >> (2 * m)) & lane
            if s1:
                ls1 = log[s1]
                d3 = antilog[3 * ls1 % order] ^ s3
                d5 = antilog[5 * ls1 % order] ^ s5
            else:
                d3, d5 = s3, s5
            if s1 and d3 == 0 and d5 == 0:
                roots = (s1,)
            elif s1 and d3 and (
                antilog[ls1 + log[d5]] if d5 else 0
            ) == (antilog[log[s3] + log[d3]] if s3 else 0):
                # two inversions: x^2 + s1*x + d3/s1, suppressed by x = s1*y
                c = antilog[(log[d3] - 3 * ls1) % order]
                y = self.tables.quad[c]
                roots = None if y < 0 else (
                    antilog[ls1 + log[y]], antilog[ls1 + log[y ^ 1]])
            elif d3:
                # three inversions: x = y + s1 suppresses the square term,
                # leaving y^3 + (d5/d3) y + d3
                ld3 = log[d3]
                if d5 == 0:
                    y = self.tables.cube[d3]
                    om = self.tables.omega
                    if y < 0 or om is None:
                        roots = None
                    else:
                        y2 = antilog[log[y] + log[om]] if y else 0
                        y3 = antilog[log[y2] + log[om]] if y2 else 0
                        roots = (y ^ s1, y2 ^ s1, y3 ^ s1)
                else:
                    ld5 = log[d5]
                    cc = antilog[(5 * ld3 - 3 * ld5) % order * self._half % order]
                    pr = self.tables.supp[cc]
                    if pr is None:
                        roots = None
                    else:
                        lsq = (ld5 - ld3) % order * self._half % order
                        z1, z2 = pr
                        y1 = antilog[lsq + log[z1]]
                        y2 = antilog[lsq + log[z2]]
                        roots = (y1 ^ s1, y2 ^ s1, y1 ^ y2 ^ s1)
            else:
                roots = None

        if roots is None:
            return None
        n_c = self.n_c
        masks = self.packed_masks
        acc = syn
        out = []
        for x in roots:
            if x == 0:
                return None
            j = log[x]
            if j >= n_c:
                return None  # correction would land in the shortened region
            acc ^= masks[j]
            out.append(j)
        if not check_extension:
            acc &= self._bch_mask
        if acc:
            return None
        if len(out) > 1 and len(set(out)) != len(out):
            return None
        return tuple(out)

    def decode_syndrome(self, syn: Syndrome | int,
                        check_extension: bool = True) -> DecodeOutcome:
        """Decode one syndrome into a DecodeOutcome.

        Pure function of the syndrome: words with equal syndromes get
        identical outcomes.  Failures signal more than t errors or a vetoed
        miscorrection; they never raise.
        """
        packed = self.pack(syn) if isinstance(syn, Syndrome) else syn
        res = self.decode_packed(packed, check_extension=check_extension)
        if res is not None:
            if res == ():
                return DecodeOutcome("no_error")
            return DecodeOutcome("corrected", tuple(sorted(res)))
        guard = False
        if check_extension and self.extended:
            # distinguish candidates killed purely by the extension residue
            relaxed = self.decode_packed(packed, check_extension=False)
            guard = relaxed is not None and relaxed != ()
        return DecodeOutcome("failure", miscorrection_guard=guard)
