"""Closed-form decoder data-flow, channel conversion, and coding-gain math.

Data-flow — aggregate bits per second moved inside a decoder — serves as an
implementation-complexity surrogate.  Three calculators are provided: a
message-passing LDPC decoder with a parallel flooding schedule, a
syndrome-domain product-code decoder, and the lookup-table component decoder.
All are pure closed-form evaluations in bits/s.

Channel conversions relate a binary symmetric channel's crossover
probability p to the equivalent binary-input Gaussian quality factor Q (dB)
via p = erfc(Q / sqrt(2)) / 2, and net coding gain at a target output BER
includes the 10*log10(R) rate penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfc, erfcinv

__all__ = [
    "DataflowParams",
    "DataflowResult",
    "ChannelPoint",
    "ldpc_dataflow",
    "product_dataflow",
    "lookup_decoder_dataflow",
    "binary_entropy",
    "bsc_capacity_threshold",
    "q_from_p",
    "p_from_q",
    "net_coding_gain",
    "shannon_limit_ncg",
    "wilson_interval",
    "REFERENCE_NCG_DB",
]

# Published net-coding-gain figures (dB at output BER 1e-15, except I.9 at
# 2e-14) for the standardized OTN codes; reference constants only.
REFERENCE_NCG_DB = {
    "G.975 RS(255,239)": 6.2,
    "G.975.1 I.3": 8.99,
    "G.975.1 I.4": 8.67,
    "G.975.1 I.5": 8.5,
    "G.975.1 I.9": 8.67,
}


@dataclass(frozen=True)
class DataflowParams:
    """Decoder data-flow inputs.

    D: information rate (bits/s); R: code rate; f_c: decoder clock (Hz);
    q: internal message width (bits); N: iterations; d_av: average variable
    degree; n1/n2, r1/r2, t1/t2: component code parameters; v: average
    decodes per component codeword.
    """

    D: float = 100e9
    R: float = 239 / 255
    f_c: float = 400e6
    q: int = 4
    N: int = 20
    d_av: float = 3.0
    n1: int = 1000
    n2: int = 1000
    r1: int = 32
    r2: int = 32
    t1: int = 3
    t2: int = 3
    v: float = 4.0

    def __post_init__(self):
        if not 0 < self.R <= 1:
            raise ValueError("code rate must lie in (0, 1]")
        if self.D <= 0:
            raise ValueError("information rate must be positive")


@dataclass(frozen=True)
class DataflowResult:
    total: float                 # bits/s
    terms: dict                  # named constituent terms, bits/s
    approx: float | None = None  # dominant-term approximation, when meaningful


def ldpc_dataflow(params: DataflowParams) -> DataflowResult:
    """Message-passing data-flow: channel loading D/R plus 2*N*q*d_av
    broadcast bits per channel bit, i.e. D/R + 2*N*D*q*d_av/R."""
    loading = params.D / params.R
    iterative = 2 * params.N * params.D * params.q * params.d_av / params.R
    return DataflowResult(loading + iterative,
                          {"loading": loading, "iterative": iterative},
                          approx=iterative)


def product_dataflow(params: DataflowParams) -> DataflowResult:
    """Syndrome-domain product decoder data-flow.

    Terms: channel loading D/R, initial syndrome computation (r1 + r2) * f_c,
    and per-orientation iterative terms covering syndrome reads, corrected
    position reports of ceil(log2 n1) + ceil(log2 n2) bits each, and the
    crossing-syndrome update masks.
    """
    p = params
    lg = math.ceil(math.log2(p.n1)) + math.ceil(math.log2(p.n2))
    loading = p.D / p.R
    syndrome = (p.r1 + p.r2) * p.f_c
    row_side = (p.D * p.v / (p.R * p.n1)) * (p.t1 * lg + p.r1 + p.t1 * p.r2)
    col_side = (p.D * p.v / (p.R * p.n2)) * (p.t2 * lg + p.r2 + p.t2 * p.r1)
    total = loading + syndrome + row_side + col_side
    return DataflowResult(total, {
        "loading": loading,
        "syndrome_compute": syndrome,
        "row_side": row_side,
        "col_side": col_side,
    })


def lookup_decoder_dataflow(m: int, v: float, D: float, n: int, R: float) -> float:
    """Data-flow of the table-lookup component decoder: 4*m*v*D/(n*R) bits/s
    (two m-bit table entries read per decoding, 2m bits each way)."""
    return 4.0 * m * v * D / (n * R)


def binary_entropy(p: float) -> float:
    if not 0 < p < 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc_capacity_threshold(R: float, rel_tol: float = 1e-12) -> float:
    """Largest crossover probability p* with 1 - H2(p*) >= R, by bisection."""
    if not 0 < R < 1:
        raise ValueError("rate must lie in (0, 1)")
    lo, hi = 0.0, 0.5
    # f(p) = 1 - H2(p) - R is decreasing on (0, 1/2)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if 1 - binary_entropy(mid) >= R:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def q_from_p(p: float) -> float:
    """Equivalent Gaussian quality factor, in dB, for BER p = erfc(Q/sqrt2)/2."""
    if not 0 < p <= 0.5:
        raise ValueError("p must lie in (0, 1/2]")
    q = math.sqrt(2.0) * float(erfcinv(2.0 * p))
    if q <= 0:
        raise ValueError("p = 1/2 has no positive quality factor")
    return 20.0 * math.log10(q)


def p_from_q(q_db: float) -> float:
    """Inverse of q_from_p."""
    q = 10.0 ** (q_db / 20.0)
    return 0.5 * float(erfc(q / math.sqrt(2.0)))


@dataclass(frozen=True)
class ChannelPoint:
    """A BSC operating point and its equivalent Gaussian Q in dB."""

    p: float
    q_db: float

    @classmethod
    def from_p(cls, p: float) -> "ChannelPoint":
        return cls(p, q_from_p(p))

    @classmethod
    def from_q(cls, q_db: float) -> "ChannelPoint":
        return cls(p_from_q(q_db), q_db)


def net_coding_gain(ber_out_target: float, p_threshold: float, R: float) -> float:
    """NCG in dB: Q(ber_out_target) - Q(p_threshold) + 10*log10(R)."""
    if not 0 < ber_out_target < 0.5 or not 0 < p_threshold < 0.5:
        raise ValueError("BER operating points must lie in (0, 1/2)")
    return q_from_p(ber_out_target) - q_from_p(p_threshold) + 10.0 * math.log10(R)


def shannon_limit_ncg(ber_out_target: float, R: float) -> float:
    """NCG of a capacity-achieving code on the BSC at the given rate."""
    return net_coding_gain(ber_out_target, bsc_capacity_threshold(R), R)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """Wilson score interval (default 95%) for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)
