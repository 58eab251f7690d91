"""Staircase and product forward-error-correction codes.

Library layout:

* ``gf`` — GF(2)[x] polynomials and GF(2^m) log/antilog arithmetic
* ``component_code`` — shortened doubly-extended BCH codes, table-driven
  syndrome decoding
* ``staircase`` — staircase encoder and sliding-window decoder
* ``product`` — baseline product codec on the same component machinery
* ``floor_analysis`` — stall-pattern counting, union-bound error floor,
  empirical stall persistence
* ``analysis`` — decoder data-flow, BSC capacity, Q/NCG conversions
* ``harness`` — reproducible parallel Monte-Carlo BER simulation
* ``cli`` — command-line front end (``staircase-fec``)
"""

from .gf import BinPoly, FieldContext, build_field, default_field
from .component_code import ComponentCodeSpec, DecodeOutcome, RootTables, Syndrome
from .staircase import (
    Block,
    SlidingWindowDecoder,
    StaircaseEncoder,
    StaircaseParams,
    codeword_geometry,
    related_product_rate,
    staircase_rate,
)
from .product import ProductParams, product_decode, product_encode
from .floor_analysis import (
    FloorEstimate,
    StallClass,
    class_contribution,
    minimal_stall_multiplicity,
    persistence_probability,
    stall_class_count,
    stall_pattern_count,
    total_floor,
)
from .analysis import (
    ChannelPoint,
    DataflowParams,
    bsc_capacity_threshold,
    ldpc_dataflow,
    lookup_decoder_dataflow,
    net_coding_gain,
    p_from_q,
    product_dataflow,
    q_from_p,
    shannon_limit_ncg,
)
from .harness import SimConfig, SimResult, bsc_sample, estimate_zeta, run_point, run_sweep

__version__ = "0.1.0"
