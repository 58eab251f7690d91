"""Square/rectangular product codes with syndrome-domain iterative decoding.

The array has n2 rows by n1 columns; rows are codewords of the row code,
columns of the column code, including the checks-on-checks corner.  Bit order
within a row follows the component convention read right-to-left: the bit in
column c has exponent n1-1-c, so parity occupies the rightmost columns;
columns are analogous with the parity rows at the bottom.

Decoding alternates row and column passes over a bank of packed syndromes,
exactly mirroring the staircase machinery: only syndromes that changed since
their last decode are retried, and every applied flip updates the one
crossing syndrome by an XOR mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .component_code import ComponentCodeSpec

__all__ = ["ProductParams", "ProductStats", "product_encode", "ProductDecoder", "product_decode"]


@dataclass(frozen=True)
class ProductParams:
    row_code: ComponentCodeSpec
    col_code: ComponentCodeSpec
    max_iters: int = 8

    @property
    def n1(self) -> int:
        return self.row_code.n_c

    @property
    def n2(self) -> int:
        return self.col_code.n_c

    @property
    def k1(self) -> int:
        return self.row_code.k_c

    @property
    def k2(self) -> int:
        return self.col_code.k_c

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k1, self.n1) * Fraction(self.k2, self.n2)


@dataclass
class ProductStats:
    attempts: int = 0
    corrections: int = 0
    failures: int = 0
    passes: int = 0
    converged: bool = False
    stalled: bool = False


def _parity_cols(code: ComponentCodeSpec, info: np.ndarray) -> np.ndarray:
    """Append parity to each row of ``info`` (k_c columns in, n_c out)."""
    n_c, r = code.n_c, code.r
    exps = np.array([n_c - 1 - i for i in range(code.k_c)])
    pmat = code.parity_bits_matrix(exps)
    par = (info.astype(np.float32) @ pmat).astype(np.int64) & 1
    out = np.zeros((info.shape[0], n_c), dtype=np.uint8)
    out[:, : code.k_c] = info
    out[:, code.k_c:] = par[:, ::-1]
    return out


def product_encode(params: ProductParams, info) -> np.ndarray:
    """Encode a k2 x k1 payload into an n2 x n1 array.

    Rows are encoded first, then every full column; the checks-on-checks
    corner is consistent both ways by linearity.
    """
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (params.k2, params.k1):
        raise ValueError(f"expected payload {(params.k2, params.k1)}, got {info.shape}")
    top = _parity_cols(params.row_code, info)              # k2 x n1
    full_t = _parity_cols(params.col_code, top.T)          # n1 x n2
    return np.ascontiguousarray(full_t.T)


class ProductDecoder:
    """Stateful decoder for one received array; reusable across calls."""

    def __init__(self, params: ProductParams, check_extension: bool = True):
        self.params = params
        self.check_extension = check_extension
        rc, cc = params.row_code, params.col_code
        self._row_vis_masks = rc.packed_masks_np[::-1].copy()
        self._col_vis_masks = cc.packed_masks_np[::-1].copy()
        # mask applied to the crossing syndrome when a bit flips
        self._cross_col = [cc.packed_masks[params.n2 - 1 - r] for r in range(params.n2)]
        self._cross_row = [rc.packed_masks[params.n1 - 1 - c] for c in range(params.n1)]

    def _banks(self, arr: np.ndarray) -> tuple[list[int], list[int]]:
        rb = np.bitwise_xor.reduce(
            np.where(arr.astype(bool), self._row_vis_masks[None, :], np.int64(0)), axis=1
        ).tolist()
        cb = np.bitwise_xor.reduce(
            np.where(arr.T.astype(bool), self._col_vis_masks[None, :], np.int64(0)), axis=1
        ).tolist()
        return rb, cb

    def decode(self, received: np.ndarray, max_iters: int | None = None
               ) -> tuple[np.ndarray, ProductStats]:
        p = self.params
        arr = np.array(received, dtype=np.uint8)
        if arr.shape != (p.n2, p.n1):
            raise ValueError(f"expected array {(p.n2, p.n1)}, got {arr.shape}")
        row_bank, col_bank = self._banks(arr)
        row_dirty = [True] * p.n2
        col_dirty = [True] * p.n1
        check_ext = self.check_extension
        iters = p.max_iters if max_iters is None else max_iters
        stats = ProductStats()

        row_decode = p.row_code.decode_packed
        col_decode = p.col_code.decode_packed
        row_masks = p.row_code.packed_masks
        col_masks = p.col_code.packed_masks
        cross_col = self._cross_col
        cross_row = self._cross_row
        n1, n2 = p.n1, p.n2

        for _ in range(iters):
            stats.passes += 1
            changed = False
            for i in range(n2):
                if not row_dirty[i]:
                    continue
                row_dirty[i] = False
                syn = row_bank[i]
                if syn == 0:
                    continue
                stats.attempts += 1
                out = row_decode(syn, check_ext)
                if not out:
                    stats.failures += 1
                    continue
                changed = True
                stats.corrections += 1
                residual = syn
                for e in out:
                    residual ^= row_masks[e]
                    c = n1 - 1 - e
                    arr[i, c] ^= 1
                    col_bank[c] ^= cross_col[i]
                    col_dirty[c] = True
                row_bank[i] = residual
            for c in range(n1):
                if not col_dirty[c]:
                    continue
                col_dirty[c] = False
                syn = col_bank[c]
                if syn == 0:
                    continue
                stats.attempts += 1
                out = col_decode(syn, check_ext)
                if not out:
                    stats.failures += 1
                    continue
                changed = True
                stats.corrections += 1
                residual = syn
                for e in out:
                    residual ^= col_masks[e]
                    r = n2 - 1 - e
                    arr[r, c] ^= 1
                    row_bank[r] ^= cross_row[c]
                    row_dirty[r] = True
                col_bank[c] = residual
            if not changed:
                stats.converged = True
                break
        stats.stalled = stats.converged and (any(row_bank) or any(col_bank))
        self.last_row_bank = row_bank
        self.last_col_bank = col_bank
        return arr, stats


def product_decode(params: ProductParams, received, max_iters: int | None = None,
                   check_extension: bool = True) -> tuple[np.ndarray, ProductStats]:
    """One-shot row/column iterative decode; best effort, never raises on
    uncorrectable input."""
    return ProductDecoder(params, check_extension).decode(received, max_iters)
