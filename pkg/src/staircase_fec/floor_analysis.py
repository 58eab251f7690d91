"""Combinatorial error-floor estimation for staircase codes.

A stall pattern is a set of positions in which every involved component
codeword holds at least t+1 of them, so the iterative syndrome decoder makes
no progress.  For the triple-error-correcting component code a stall spans K
codewords of one orientation and L of the other (K, L >= 4); the error floor
is bounded by summing, over all such classes, the number of patterns times
the probability that every pattern position is in error, with channel errors
at rate p and decoder-induced erroneous flips at rate zeta.

Class multiplicities are exact big integers.  Floor contributions are
evaluated in exact rational arithmetic (converted to float only at the end),
with an independent log-domain evaluation used for cross-validation, since
the magnitudes involved (1e-21 down to 1e-32 and far below) make naive
floating-point accumulation untrustworthy.

The module also measures stall persistence empirically: a minimal stall
(4 rows x 4 columns of one block) is injected on top of a random background
channel and full sliding-window decoding is run to see whether the pattern
survives (or, when injected incomplete, whether erroneous flips complete it).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import wilson_interval
from .staircase import Block, SlidingWindowDecoder, StaircaseParams

__all__ = [
    "StallClass",
    "FloorEstimate",
    "PersistenceResult",
    "minimal_stall_multiplicity",
    "stall_class_count",
    "stall_pattern_count",
    "class_contribution",
    "class_contribution_log",
    "total_floor",
    "reference_table_rows",
    "REFERENCE_CONTRIBUTIONS",
    "REFERENCE_TOTAL",
    "REFERENCE_OPERATING_POINT",
    "minimal_stall_positions",
    "inject_stall",
    "persistence_probability",
]


def _split_selection_count(m_code: int, k: int) -> int:
    """Ways to pick k codewords of the orientation whose members may lie in
    either of two adjacent blocks, at least one in the anchor block:
    sum_{i=1..k} C(m_code, i) * C(m_code, k-i)."""
    return sum(math.comb(m_code, i) * math.comb(m_code, k - i) for i in range(1, k + 1))


def minimal_stall_multiplicity(m_code: int) -> int:
    """Number of minimal (4 rows x 4 columns) stall patterns anchored to one
    block: C(m_code, 4) * sum_{i=1..4} C(m_code, i) C(m_code, 4-i)."""
    if m_code < 4:
        raise ValueError("m_code must be at least 4")
    return math.comb(m_code, 4) * _split_selection_count(m_code, 4)


def stall_class_count(K: int, L: int, m_code: int = 510) -> int:
    """Ways to select the involved codewords of a (K, L) stall class:
    C(m_code, L) for the single-block orientation times the split-selection
    count for the K codewords of the spanning orientation."""
    if K < 4 or L < 4:
        raise ValueError("stall classes require K >= 4 and L >= 4")
    return math.comb(m_code, L) * _split_selection_count(m_code, K)


def stall_pattern_count(K: int, L: int, l: int, m_code: int = 510) -> int:
    """Upper bound on the number of (K, L) stalls with exactly l positions.

    Every involved codeword holds at least 4 positions, so
    4*max(K,L) <= l <= K*L; out-of-range l is rejected.
    """
    mx, mn = max(K, L), min(K, L)
    if not 4 * mx <= l <= K * L:
        raise ValueError(f"l={l} outside [{4 * mx}, {K * L}] for (K, L)=({K}, {L})")
    return (stall_class_count(K, L, m_code)
            * math.comb(mn, 4) ** mx
            * math.comb(K * L - 4 * mx, l - 4 * mx))


@dataclass(frozen=True)
class StallClass:
    """One (K, L, l) stall-pattern family and its multiplicity."""

    K: int
    L: int
    l: int
    multiplicity: int
    m_code: int = 510


def class_contribution(K: int, L: int, p: float, zeta: float,
                       m_code: int = 510) -> float:
    """Error-floor contribution of the (K, L) stall class:
    sum over l of (l / m_code^2) * M_{K,L}^l * (p + zeta)^l.

    Orientation convention: the split-across-blocks selection applies to the
    second index L, matching the labeling of the reference contribution
    table; the transposed class is counted separately as (L, K).  Evaluated
    in exact rational arithmetic.
    """
    if not (0 <= p <= 1 and 0 <= zeta <= 1):
        raise ValueError("p and zeta must lie in [0, 1]")
    q = Fraction(p) + Fraction(zeta)
    mx = max(K, L)
    total = Fraction(0)
    for l in range(4 * mx, K * L + 1):
        m_l = stall_pattern_count(L, K, l, m_code)
        total += Fraction(l, m_code * m_code) * m_l * q**l
    return float(total)


def _log_comb(n: int, k: int) -> float:
    if k < 0 or k > n:
        return float("-inf")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _logsumexp(terms) -> float:
    terms = [t for t in terms if t != float("-inf")]
    if not terms:
        return float("-inf")
    mx = max(terms)
    return mx + math.log(sum(math.exp(t - mx) for t in terms))


def class_contribution_log(K: int, L: int, p: float, zeta: float,
                           m_code: int = 510) -> float:
    """Log-domain evaluation of class_contribution; independent
    cross-validation path for the exact-rational computation."""
    lq = math.log(p + zeta)
    mx, mn = max(K, L), min(K, L)
    # split-selection count for L in the log domain
    lsplit = _logsumexp([_log_comb(m_code, i) + _log_comb(m_code, L - i)
                         for i in range(1, L + 1)])
    la = _log_comb(m_code, K) + lsplit
    lgrid = mx * math.log(math.comb(mn, 4))
    terms = []
    for l in range(4 * mx, K * L + 1):
        terms.append(math.log(l) - 2 * math.log(m_code) + la + lgrid
                     + _log_comb(K * L - 4 * mx, l - 4 * mx) + l * lq)
    return math.exp(_logsumexp(terms))


@dataclass
class FloorEstimate:
    """Union-bound floor estimate: per-class contributions over all ordered
    (K, L) pairs within the bounds, their sum, and a truncation-tail proxy
    (the summed contribution of the outermost included diagonal)."""

    p: float
    zeta: float
    m_code: int
    K_max: int
    L_max: int
    contributions: dict
    total: float
    tail: float


def total_floor(p: float, zeta: float, K_max: int = 8, L_max: int = 8,
                m_code: int = 510) -> FloorEstimate:
    if K_max < 4 or L_max < 4:
        raise ValueError("bounds must be at least 4")
    contributions = {}
    for K in range(4, K_max + 1):
        for L in range(4, L_max + 1):
            contributions[(K, L)] = class_contribution(K, L, p, zeta, m_code)
    total = math.fsum(contributions.values())
    tail = math.fsum(v for (K, L), v in contributions.items()
                     if K == K_max or L == L_max)
    return FloorEstimate(p, zeta, m_code, K_max, L_max, contributions, total, tail)


# Reference contribution table at the default operating point.  Two entries
# are not reproduced by the counting convention that matches the others:
# the computed (6,7) value equals the reference's transposed orientation, and
# (7,8) additionally differs by two orders of magnitude (consistent with an
# exponent slip in the reference: computed 1.83e-30 vs printed 1.83e-32).
REFERENCE_OPERATING_POINT = {"p": 4.8e-3, "zeta": 5.8e-4, "m_code": 510}
REFERENCE_CONTRIBUTIONS = {
    (4, 4): 3.55e-21,
    (4, 5): 7.81e-28,
    (5, 5): 2.54e-22,
    (5, 6): 2.21e-28,
    (6, 6): 1.40e-23,
    (6, 7): 1.49e-29,
    (7, 7): 8.53e-25,
    (7, 8): 1.83e-32,
}
REFERENCE_TOTAL = 3.8e-21
REFERENCE_DISCREPANT_ROWS = ((6, 7), (7, 8))


def reference_table_rows(p: float, zeta: float, m_code: int = 510) -> list[dict]:
    """Computed contribution for each row of the reference table, with the
    reference value and relative deviation."""
    rows = []
    for (K, L), ref in REFERENCE_CONTRIBUTIONS.items():
        got = class_contribution(K, L, p, zeta, m_code)
        rows.append({
            "K": K,
            "L": L,
            "contribution": got,
            "reference": ref,
            "rel_dev": got / ref - 1.0,
            "known_discrepancy": (K, L) in REFERENCE_DISCREPANT_ROWS,
        })
    return rows


# ---------------------------------------------------------------------------
# empirical stall persistence
# ---------------------------------------------------------------------------


def minimal_stall_positions(params: StaircaseParams, rng: np.random.Generator
                            ) -> list[tuple[int, int]]:
    """Random minimal stall geometry inside one block: (t+1) rows x (t+1)
    columns of intersections, as (row, col) pairs."""
    t1 = params.component.t + 1
    rows = rng.choice(params.rows_per_block, size=t1, replace=False)
    cols = rng.choice(params.cols_per_block, size=t1, replace=False)
    return [(int(r), int(c)) for r in sorted(rows) for c in sorted(cols)]


def inject_stall(bits: np.ndarray, positions) -> None:
    """Force the given (row, col) positions of a block into error in place."""
    for r, c in positions:
        bits[r, c] ^= 1


@dataclass
class PersistenceResult:
    l: int
    p: float
    trials: int
    events: int
    estimate: float
    ci_low: float
    ci_high: float
    definition: str


def _persistence_chunk(args) -> tuple[int, int]:
    (params, l, p, trials, entropy, spawn_key, check_extension) = args
    rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=spawn_key))
    events = 0
    for _ in range(trials):
        if _persistence_trial(params, l, p, rng, check_extension):
            events += 1
    return events, trials


def _persistence_trial(params: StaircaseParams, l: int, p: float,
                       rng: np.random.Generator, check_extension: bool) -> bool:
    """One injected-stall trial over an all-zero codeword stream.

    The decoder operates purely on syndromes, so the all-zero stream with the
    noise pattern applied is an exact stand-in for random payload; a bit is
    in error iff it reads 1.  16 - l pattern positions are forced in error
    and the remaining l are forced correct at reception.

    Event, l = 0: the complete pattern survives to the decoder output.
    Event, l > 0: all pattern positions are simultaneously in error at some
    point during decoding (erroneous flips completed the stall).
    """
    window = params.window_len
    inject_at = window  # 0-based push counter
    n_blocks = 2 * window + 2
    shape = (params.rows_per_block, params.cols_per_block)

    positions = minimal_stall_positions(params, rng)
    size = len(positions)
    keep = set(rng.choice(size, size=size - l, replace=False).tolist())
    pattern_rc = set(positions)
    inject_index = inject_at + 1  # Block.index is 1-based

    in_error = {rc: False for rc in positions}
    state = {"count": 0, "latched": False}

    win = SlidingWindowDecoder(params, check_extension=check_extension)

    if l > 0:
        def monitor(bidx, r, c, new_bit):
            if bidx != inject_index or (r, c) not in pattern_rc:
                return
            now = new_bit == 1
            if now != in_error[(r, c)]:
                in_error[(r, c)] = now
                state["count"] += 1 if now else -1
                if state["count"] == size:
                    state["latched"] = True

        win.on_flip = monitor

    emitted = {}
    for i in range(n_blocks):
        noise = (rng.random(shape) < p).astype(np.uint8)
        if i == inject_at:
            for idx, rc in enumerate(positions):
                noise[rc] = 1 if idx in keep else 0
            for idx, rc in enumerate(positions):
                in_error[rc] = idx in keep
            state["count"] = size - l
        if win.full:
            win.decode()
            blk = win.slide()
            emitted[blk.index] = blk.bits
        win.push(Block(i + 1, noise))
    while win.blocks:
        if win.full:
            win.decode()
        blk = win.slide()
        emitted[blk.index] = blk.bits

    if l == 0:
        out = emitted[inject_index]
        return all(out[rc] == 1 for rc in positions)
    return state["latched"]


def persistence_probability(params: StaircaseParams, l: int, trials: int, p: float,
                            base_seed: int = 0, workers: int = 1,
                            check_extension: bool = True,
                            chunk_trials: int = 25) -> PersistenceResult:
    """Monte-Carlo estimate of the stall-persistence probability.

    Trials are partitioned into fixed-size chunks with per-chunk derived
    seeds, so results depend only on (trials, base_seed, chunk_trials) and
    not on the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    chunks = []
    remaining = trials
    idx = 0
    while remaining > 0:
        n = min(chunk_trials, remaining)
        chunks.append((params, l, p, n, base_seed, (idx,), check_extension))
        remaining -= n
        idx += 1
    if workers <= 1:
        outs = [_persistence_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outs = list(ex.map(_persistence_chunk, chunks))
    events = sum(e for e, _ in outs)
    lo, hi = wilson_interval(events, trials)
    definition = ("complete pattern survives in decoder output" if l == 0
                  else "pattern simultaneously complete at some point during decoding")
    return PersistenceResult(l, p, trials, events, events / trials, lo, hi, definition)
