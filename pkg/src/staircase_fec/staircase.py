"""Staircase encoder and sliding-window syndrome-domain decoder.

A staircase code is an unterminated product-like code over a sequence of
blocks B_0, B_1, ...: every row of [T(B_{i-1}) | B_i] is a codeword of the
component code, where T is the transpose (padded with all-zero rows on top
when blocks are rectangular).  B_0 is the all-zero reference block shared by
encoder and decoder.

Geometry and bit order
----------------------
A block has ``rows`` x ``cols`` stored bits.  The component codeword
terminating in block i with index j consists of

* a prefix of ``rows`` bits: row j of the padded transpose of block i-1
  (all-virtual-zero for j < pad_rows, else column j - pad_rows of block i-1),
* a suffix of ``cols`` bits: row j of block i.

Reading a codeword left to right gives visual positions 0..n_c-1; visual
position v corresponds to polynomial exponent n_c-1-v, so the r parity bits
occupy the rightmost columns of each block.  Every stored bit lies in exactly
two codewords: one terminating in its own block and one in the next.

Serialized form: bits row-major, MSB first within each byte, blocks
concatenated in index order.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .component_code import ComponentCodeSpec

__all__ = [
    "StaircaseParams",
    "Block",
    "EncoderState",
    "StaircaseEncoder",
    "SlidingWindowDecoder",
    "WindowStats",
    "Coord",
    "codeword_geometry",
    "staircase_rate",
    "related_product_rate",
    "rate_staircase",
    "rate_related_product",
    "pack_block_bits",
    "unpack_block_bits",
    "block_byte_size",
]

Coord = namedtuple("Coord", "block row col")  # block=None marks a virtual zero


def rate_staircase(m: int, r: int) -> Fraction:
    """Rate of a staircase code with m new columns and r parity columns."""
    return 1 - Fraction(r, m)


def rate_related_product(m: int, r: int) -> Fraction:
    """Rate of the square product code built from the same component code:
    ((2m - r) / 2m)^2 = 1 - r/m + r^2/(4 m^2)."""
    return Fraction(2 * m - r, 2 * m) ** 2


@dataclass(frozen=True)
class StaircaseParams:
    """Geometry, component code and decoding configuration of one staircase.

    rows_per_block = cols_per_block + pad_rows, and the component codeword
    length must equal rows_per_block + cols_per_block.
    """

    rows_per_block: int
    cols_per_block: int
    component: ComponentCodeSpec
    window_len: int = 7
    max_iters: int = 7

    def __post_init__(self):
        if self.rows_per_block < self.cols_per_block:
            raise ValueError("rows_per_block must be >= cols_per_block")
        if self.component.n_c != self.rows_per_block + self.cols_per_block:
            raise ValueError(
                f"component length {self.component.n_c} != rows+cols = "
                f"{self.rows_per_block + self.cols_per_block}"
            )
        if self.component.r >= self.cols_per_block:
            raise ValueError("parity does not fit in a block row")
        if self.window_len < 2:
            raise ValueError("window_len must be at least 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    @property
    def pad_rows(self) -> int:
        return self.rows_per_block - self.cols_per_block

    @property
    def info_cols(self) -> int:
        return self.cols_per_block - self.component.r

    @property
    def payload_bits_per_block(self) -> int:
        return self.rows_per_block * self.info_cols

    @classmethod
    def g709(cls, window_len: int = 7, max_iters: int = 7) -> "StaircaseParams":
        """512 x 510 blocks over the (1022, 990) component code; one block
        carries exactly two 130560-bit optical-frame payloads."""
        return cls(512, 510, ComponentCodeSpec.g709(), window_len, max_iters)

    @classmethod
    def square(cls, m: int, t: int, extended: bool = True,
               window_len: int = 4, max_iters: int = 4) -> "StaircaseParams":
        """Square m x m staircase over the smallest field that fits 2m bits."""
        f = 2
        while (1 << f) - 1 < 2 * m:
            f += 1
        comp = ComponentCodeSpec.from_field_degree(f, t, n_c=2 * m, extended=extended)
        return cls(m, m, comp, window_len, max_iters)


def staircase_rate(params: StaircaseParams) -> Fraction:
    return rate_staircase(params.cols_per_block, params.component.r)


def related_product_rate(params: StaircaseParams) -> Fraction:
    if params.pad_rows:
        raise ValueError("related product rate is defined for square blocks")
    return rate_related_product(params.cols_per_block, params.component.r)


@dataclass
class Block:
    index: int
    bits: np.ndarray  # rows x cols uint8


@dataclass
class EncoderState:
    prev_block: np.ndarray
    next_index: int = 1


def codeword_geometry(params: StaircaseParams, block_idx: int, row_idx: int) -> list[Coord]:
    """Coordinates covered by the codeword with index ``row_idx`` terminating
    in block ``block_idx``, in visual order (prefix first)."""
    if not 0 <= row_idx < params.rows_per_block:
        raise ValueError(f"row index {row_idx} out of range")
    if block_idx < 1:
        raise ValueError("codewords terminate in blocks with index >= 1")
    pad = params.pad_rows
    coords = []
    for p in range(params.rows_per_block):
        if row_idx < pad:
            coords.append(Coord(None, None, None))
        else:
            coords.append(Coord(block_idx - 1, p, row_idx - pad))
    for c in range(params.cols_per_block):
        coords.append(Coord(block_idx, row_idx, c))
    return coords


def _padded_transpose(params: StaircaseParams, prev_bits: np.ndarray) -> np.ndarray:
    pref = np.zeros((params.rows_per_block, params.rows_per_block), dtype=np.uint8)
    pref[params.pad_rows:, :] = prev_bits.T
    return pref


class StaircaseEncoder:
    """Recursive systematic encoder; feeds rows x info_cols payload blocks."""

    def __init__(self, params: StaircaseParams):
        self.params = params
        self.state = EncoderState(
            prev_block=np.zeros((params.rows_per_block, params.cols_per_block), dtype=np.uint8)
        )
        n_c = params.component.n_c
        k_c = params.component.k_c
        # parity generator rows for visual info positions 0..k_c-1
        exps = np.array([n_c - 1 - i for i in range(k_c)])
        self._pmat = params.component.parity_bits_matrix(exps)

    def encode(self, info) -> Block:
        p = self.params
        info = np.asarray(info, dtype=np.uint8)
        if info.shape != (p.rows_per_block, p.info_cols):
            raise ValueError(
                f"expected payload of shape {(p.rows_per_block, p.info_cols)}, got {info.shape}"
            )
        pref = _padded_transpose(p, self.state.prev_block)
        a = np.concatenate([pref, info], axis=1).astype(np.float32)
        par = (a @ self._pmat).astype(np.int64) & 1
        bits = np.zeros((p.rows_per_block, p.cols_per_block), dtype=np.uint8)
        bits[:, : p.info_cols] = info
        # parity bit of exponent e lands in column cols-1-e
        bits[:, p.info_cols:] = par[:, ::-1]
        blk = Block(self.state.next_index, bits)
        self.state.prev_block = bits
        self.state.next_index += 1
        return blk

    def flush(self) -> list[Block]:
        """Terminate the stream: window_len - 1 all-zero-payload blocks so
        the last data block gets two-sided protection."""
        p = self.params
        zero = np.zeros((p.rows_per_block, p.info_cols), dtype=np.uint8)
        return [self.encode(zero) for _ in range(p.window_len - 1)]


@dataclass
class WindowStats:
    attempts: int = 0
    corrections: int = 0
    failures: int = 0
    refusals: int = 0          # corrections vetoed for touching frozen/virtual bits
    passes: int = 0
    converged: bool = False
    stalled: bool = False      # converged with at least one nonzero syndrome
    corrective_flips: int = 0  # only tracked when truth blocks are attached
    erroneous_flips: int = 0
    miscorrections: int = 0    # corrections that applied >= 1 erroneous flip

    def add(self, other: "WindowStats"):
        self.attempts += other.attempts
        self.corrections += other.corrections
        self.failures += other.failures
        self.refusals += other.refusals
        self.passes += other.passes
        self.corrective_flips += other.corrective_flips
        self.erroneous_flips += other.erroneous_flips
        self.miscorrections += other.miscorrections


class SlidingWindowDecoder:
    """Iterative decoder over the ``window_len`` most recent blocks.

    The syndrome bank holds one packed syndrome per codeword terminating in
    each in-window block, updated incrementally on every applied bit flip, so
    a bank entry always equals the syndrome of its codeword's current bits.
    Decoding sweeps blocks newest-to-oldest, retrying a codeword only when
    its syndrome has changed since its last decode; corrections are applied
    immediately.  Bits of emitted blocks are frozen: a correction that would
    touch them (or a virtual pad zero) is refused.
    """

    def __init__(self, params: StaircaseParams, check_extension: bool = True):
        self.params = params
        self.check_extension = check_extension
        p = params
        self.history = np.zeros((p.rows_per_block, p.cols_per_block), dtype=np.uint8)
        self.history_index = 0
        self.blocks: list[np.ndarray] = []
        self.indices: list[int] = []
        self.banks: list[list[int]] = []
        self.dirty: list[list[bool]] = []
        self.truths: list[np.ndarray] | None = None
        self.on_flip = None  # callable(global_block_index, row, col, new_bit)
        self.emitted_with_nonzero_bank = 0
        # packed syndrome masks by visual position / by suffix column / by prefix row
        comp = p.component
        self._vis_masks_np = comp.packed_masks_np[::-1].copy()
        masks = comp.packed_masks
        n_c = comp.n_c
        self._suffix_mask = [masks[p.cols_per_block - 1 - c] for c in range(p.cols_per_block)]
        self._prefix_mask = [masks[n_c - 1 - rr] for rr in range(p.rows_per_block)]

    def __len__(self):
        return len(self.blocks)

    @property
    def full(self) -> bool:
        return len(self.blocks) == self.params.window_len

    def push(self, block: Block, truth: np.ndarray | None = None):
        p = self.params
        if self.full:
            raise ValueError("window is full; slide before pushing")
        bits = np.ascontiguousarray(block.bits, dtype=np.uint8)
        if bits.shape != (p.rows_per_block, p.cols_per_block):
            raise ValueError(f"bad block shape {bits.shape}")
        prev = self.blocks[-1] if self.blocks else self.history
        w = np.concatenate([_padded_transpose(p, prev), bits], axis=1)
        contrib = np.where(w.astype(bool), self._vis_masks_np[None, :], np.int64(0))
        bank = np.bitwise_xor.reduce(contrib, axis=1).tolist()
        self.blocks.append(bits.copy())
        self.indices.append(block.index)
        self.banks.append(bank)
        self.dirty.append([True] * p.rows_per_block)
        if truth is not None:
            if self.truths is None:
                self.truths = []
            self.truths.append(np.asarray(truth, dtype=np.uint8))

    def recomputed_bank(self, k: int) -> list[int]:
        """From-scratch packed syndromes for window slot k (testing oracle)."""
        p = self.params
        prev = self.blocks[k - 1] if k > 0 else self.history
        w = np.concatenate([_padded_transpose(p, prev), self.blocks[k]], axis=1)
        contrib = np.where(w.astype(bool), self._vis_masks_np[None, :], np.int64(0))
        return np.bitwise_xor.reduce(contrib, axis=1).tolist()

    def decode(self, max_iters: int | None = None) -> WindowStats:
        if not self.full:
            raise ValueError("window must hold window_len blocks before decoding")
        p = self.params
        comp = p.component
        decode_packed = comp.decode_packed
        check_ext = self.check_extension
        n_c = comp.n_c
        rows = p.rows_per_block
        pad = p.pad_rows
        cols = p.cols_per_block
        suffix_mask = self._suffix_mask
        prefix_mask = self._prefix_mask
        masks_by_exp = comp.packed_masks
        nb = len(self.blocks)
        blocks = self.blocks
        banks = self.banks
        dirty = self.dirty
        truths = self.truths
        on_flip = self.on_flip
        iters = p.max_iters if max_iters is None else max_iters

        stats = WindowStats()
        for _ in range(iters):
            stats.passes += 1
            changed = False
            for b in range(nb - 1, -1, -1):
                bank = banks[b]
                drt = dirty[b]
                for j in range(rows):
                    if not drt[j]:
                        continue
                    drt[j] = False
                    syn = bank[j]
                    if syn == 0:
                        continue
                    stats.attempts += 1
                    out = decode_packed(syn, check_ext)
                    if not out:
                        stats.failures += 1
                        continue
                    flips = []
                    ok = True
                    for e in out:
                        v = n_c - 1 - e  # visual position
                        if v < rows:
                            # prefix bit: block b-1, row v, column j-pad
                            if b == 0 or j < pad:
                                ok = False
                                break
                            flips.append((b - 1, v, j - pad, True))
                        else:
                            flips.append((b, j, v - rows, False))
                    if not ok:
                        stats.refusals += 1
                        continue
                    stats.corrections += 1
                    changed = True
                    # bank stays coherent with the corrected bits; with the
                    # extension check off a nonzero extension residue may remain
                    residual = syn
                    for e in out:
                        residual ^= masks_by_exp[e]
                    bank[j] = residual
                    erroneous_here = False
                    for fb, fr, fc, is_prefix in flips:
                        blk = blocks[fb]
                        new = blk[fr, fc] ^ 1
                        blk[fr, fc] = new
                        if truths is not None:
                            if new == truths[fb][fr, fc]:
                                stats.corrective_flips += 1
                            else:
                                stats.erroneous_flips += 1
                                erroneous_here = True
                        if is_prefix:
                            # crossing codeword: row fr terminating in block fb
                            banks[fb][fr] ^= suffix_mask[fc]
                            dirty[fb][fr] = True
                        elif fb + 1 < nb:
                            # crossing codeword: index fc+pad terminating in fb+1
                            banks[fb + 1][fc + pad] ^= prefix_mask[fr]
                            dirty[fb + 1][fc + pad] = True
                        if on_flip is not None:
                            on_flip(self.indices[fb], fr, fc, new)
                    if erroneous_here:
                        stats.miscorrections += 1
            if not changed:
                stats.converged = True
                break
        stats.stalled = stats.converged and any(
            s for bank in banks for s in bank
        )
        return stats

    def slide(self) -> Block:
        if not self.blocks:
            raise ValueError("window is empty")
        bits = self.blocks.pop(0)
        idx = self.indices.pop(0)
        bank = self.banks.pop(0)
        self.dirty.pop(0)
        if self.truths is not None and self.truths:
            self.truths.pop(0)
        if any(bank):
            self.emitted_with_nonzero_bank += 1
        self.history = bits
        self.history_index = idx
        return Block(idx, bits)


def block_byte_size(params: StaircaseParams) -> int:
    return (params.rows_per_block * params.cols_per_block + 7) // 8


def pack_block_bits(bits: np.ndarray) -> bytes:
    """Row-major, MSB-first bit packing of one block."""
    return np.packbits(bits, axis=None).tobytes()


def unpack_block_bits(data: bytes, params: StaircaseParams) -> np.ndarray:
    p = params
    n = p.rows_per_block * p.cols_per_block
    if len(data) != block_byte_size(p):
        raise ValueError(f"expected {block_byte_size(p)} bytes, got {len(data)}")
    flat = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:n]
    return flat.reshape(p.rows_per_block, p.cols_per_block).astype(np.uint8)
