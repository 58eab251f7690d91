"""Monte-Carlo channel simulation: BSC sweeps over staircase/product codes.

Reproducibility model
---------------------
Each sweep point is split into ``n_streams`` independent streams.  Stream s
of point i draws all randomness from a counter-based Philox generator seeded
by SeedSequence(base_seed, spawn_key=(i, s)), and stops on its own share of
the bit budget or of the output-error target.  Workers only schedule whole
streams and results merge by summation in stream order, so every output
number is a function of (config, base_seed) alone — the worker count never
changes the result, only the wall time.

BER confidence intervals are 95% Wilson scores.  The stopping rule per point
is min(bits budget, output-error target), both split evenly across streams.
"""

from __future__ import annotations

import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .analysis import q_from_p, wilson_interval
from .component_code import ComponentCodeSpec
from .product import ProductDecoder, ProductParams, product_encode
from .staircase import Block, SlidingWindowDecoder, StaircaseEncoder, StaircaseParams

__all__ = [
    "SimConfig",
    "SimResult",
    "ZetaEstimate",
    "bsc_sample",
    "run_point",
    "run_sweep",
    "estimate_zeta",
    "results_to_csv",
    "write_csv",
    "read_csv",
    "results_to_json",
    "WORKERS_ENV_VAR",
    "CSV_COLUMNS",
]

WORKERS_ENV_VAR = "STAIRCASE_FEC_WORKERS"

SCHEMES = ("staircase-g709", "staircase-square", "product", "uncoded")


@dataclass(frozen=True)
class SimConfig:
    """Channel-simulation configuration.

    ``size`` is the block dimension for the square staircase and the
    component/array length for the product scheme; it is ignored for the
    G.709 staircase and the uncoded passthrough.
    """

    scheme: str = "staircase-g709"
    p_values: tuple[float, ...] = (4.8e-3,)
    bits_budget: int = 10_000_000
    target_errors: int = 100
    n_streams: int = 8
    base_seed: int = 0
    workers: int | None = None
    window_len: int = 7
    max_iters: int = 7
    check_extension: bool = True
    size: int = 32
    t: int = 3

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        for p in self.p_values:
            if not 0 <= p <= 0.5:
                raise ValueError(f"crossover probability {p} outside [0, 1/2]")
        if self.bits_budget <= 0 or self.n_streams <= 0:
            raise ValueError("bits_budget and n_streams must be positive")


@dataclass
class SimResult:
    p: float
    q_db: float
    bits_simulated: int
    coded_bits: int
    bit_errors_in: int
    bit_errors_out: int
    frames: int
    stalls_observed: int
    decode_attempts: int
    decode_failures: int
    decode_corrections: int
    miscorrected_flips: int
    ber_out: float
    ci_low: float
    ci_high: float
    elapsed_s: float
    n_streams: int


@dataclass
class _Counters:
    bits: int = 0
    coded_bits: int = 0
    errors_in: int = 0
    errors_out: int = 0
    frames: int = 0
    stalls: int = 0
    attempts: int = 0
    failures: int = 0
    corrections: int = 0
    miscorrected_flips: int = 0
    miscorrections: int = 0

    def add(self, o: "_Counters"):
        self.bits += o.bits
        self.coded_bits += o.coded_bits
        self.errors_in += o.errors_in
        self.errors_out += o.errors_out
        self.frames += o.frames
        self.stalls += o.stalls
        self.attempts += o.attempts
        self.failures += o.failures
        self.corrections += o.corrections
        self.miscorrected_flips += o.miscorrected_flips
        self.miscorrections += o.miscorrections


def bsc_sample(rng, p: float, word) -> tuple[np.ndarray, int]:
    """Pass a word through a BSC(p): each bit flips independently.

    ``rng`` is a numpy Generator or an integer seed; the corruption is a
    deterministic function of the generator state.
    """
    if not 0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 1/2]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    word = np.asarray(word, dtype=np.uint8)
    flips = (rng.random(word.shape) < p).astype(np.uint8)
    return word ^ flips, int(flips.sum())


@lru_cache(maxsize=None)
def _staircase_params(scheme: str, size: int, t: int, window_len: int,
                      max_iters: int) -> StaircaseParams:
    if scheme == "staircase-g709":
        return StaircaseParams.g709(window_len, max_iters)
    return StaircaseParams.square(size, t, window_len=window_len, max_iters=max_iters)


@lru_cache(maxsize=None)
def _product_params(size: int, t: int, max_iters: int) -> ProductParams:
    f = 2
    while (1 << f) - 1 < size:
        f += 1
    comp = ComponentCodeSpec.from_field_degree(f, t, n_c=size)
    return ProductParams(comp, comp, max_iters)


def _stream_rng(config: SimConfig, point_idx: int, stream_idx: int) -> np.random.Generator:
    seq = np.random.SeedSequence(config.base_seed, spawn_key=(point_idx, stream_idx))
    return np.random.Generator(np.random.Philox(seq))


def _run_stream(task) -> _Counters:
    config, p, point_idx, stream_idx = task
    rng = _stream_rng(config, point_idx, stream_idx)
    bits_share = -(-config.bits_budget // config.n_streams)
    err_share = (-(-config.target_errors // config.n_streams)
                 if config.target_errors > 0 else 0)
    if config.scheme == "uncoded":
        return _uncoded_stream(rng, p, bits_share)
    if config.scheme == "product":
        return _product_stream(config, rng, p, bits_share, err_share)
    return _staircase_stream(config, rng, p, bits_share, err_share)


def _uncoded_stream(rng, p: float, bits_share: int) -> _Counters:
    c = _Counters()
    remaining = bits_share
    while remaining > 0:
        n = min(remaining, 10_000_000)
        flips = int(np.count_nonzero(rng.random(n) < p))
        c.bits += n
        c.coded_bits += n
        c.errors_in += flips
        c.errors_out += flips
        c.frames += 1
        remaining -= n
    return c


def _product_stream(config: SimConfig, rng, p: float, bits_share: int,
                    err_share: int) -> _Counters:
    params = _product_params(config.size, config.t, config.max_iters)
    dec = ProductDecoder(params, check_extension=config.check_extension)
    k1, k2 = params.k1, params.k2
    shape = (params.n2, params.n1)
    c = _Counters()
    n_frames = -(-bits_share // (k1 * k2))
    for _ in range(n_frames):
        info = rng.integers(0, 2, size=(k2, k1), dtype=np.uint8)
        arr = product_encode(params, info)
        noise = (rng.random(shape) < p).astype(np.uint8)
        out, st = dec.decode(arr ^ noise)
        c.bits += k1 * k2
        c.coded_bits += shape[0] * shape[1]
        c.errors_in += int(noise.sum())
        c.errors_out += int(np.count_nonzero(out[:k2, :k1] != info))
        c.frames += 1
        c.stalls += int(st.stalled)
        c.attempts += st.attempts
        c.failures += st.failures
        c.corrections += st.corrections
        if err_share and c.errors_out >= err_share:
            break
    return c


def _staircase_stream(config: SimConfig, rng, p: float, bits_share: int,
                      err_share: int) -> _Counters:
    params = _staircase_params(config.scheme, config.size, config.t,
                               config.window_len, config.max_iters)
    enc = StaircaseEncoder(params)
    win = SlidingWindowDecoder(params, check_extension=config.check_extension)
    rows, cols = params.rows_per_block, params.cols_per_block
    info_cols = params.info_cols
    payload = params.payload_bits_per_block
    c = _Counters()
    pending: deque[tuple[np.ndarray, bool]] = deque()

    def transmit(blk: Block, is_payload: bool):
        noise = (rng.random((rows, cols)) < p).astype(np.uint8)
        c.coded_bits += rows * cols
        c.errors_in += int(noise.sum())
        win.push(Block(blk.index, blk.bits ^ noise), truth=blk.bits)
        pending.append((blk.bits, is_payload))

    def emit():
        st = win.decode()
        c.attempts += st.attempts
        c.failures += st.failures
        c.corrections += st.corrections
        c.miscorrected_flips += st.erroneous_flips
        c.miscorrections += st.miscorrections
        out = win.slide()
        ref, is_payload = pending.popleft()
        if is_payload:
            c.bits += payload
            c.frames += 1
            c.errors_out += int(np.count_nonzero(
                out.bits[:, :info_cols] != ref[:, :info_cols]))

    n_blocks = -(-bits_share // payload)
    for _ in range(n_blocks):
        transmit(enc.encode(rng.integers(0, 2, size=(rows, info_cols), dtype=np.uint8)), True)
        if win.full:
            emit()
        if err_share and c.errors_out >= err_share:
            break
    for blk in enc.flush():
        transmit(blk, False)
        if win.full:
            emit()
    while win.blocks:
        out = win.slide()
        ref, is_payload = pending.popleft()
        if is_payload:
            c.bits += payload
            c.frames += 1
            c.errors_out += int(np.count_nonzero(
                out.bits[:, :info_cols] != ref[:, :info_cols]))
    c.stalls += win.emitted_with_nonzero_bank
    return c


def resolve_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        return max(1, int(env))
    return 1


def run_point(config: SimConfig, p: float, point_idx: int = 0) -> SimResult:
    """Simulate one sweep point; deterministic given (config, base_seed)."""
    t0 = time.perf_counter()
    tasks = [(config, p, point_idx, s) for s in range(config.n_streams)]
    workers = resolve_workers(config.workers)
    if workers <= 1 or config.n_streams == 1:
        outs = [_run_stream(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, config.n_streams)) as ex:
            outs = list(ex.map(_run_stream, tasks))
    total = _Counters()
    for o in outs:
        total.add(o)
    ci_low, ci_high = wilson_interval(total.errors_out, max(total.bits, 1))
    return SimResult(
        p=p,
        q_db=q_from_p(p) if p > 0 else float("inf"),
        bits_simulated=total.bits,
        coded_bits=total.coded_bits,
        bit_errors_in=total.errors_in,
        bit_errors_out=total.errors_out,
        frames=total.frames,
        stalls_observed=total.stalls,
        decode_attempts=total.attempts,
        decode_failures=total.failures,
        decode_corrections=total.corrections,
        miscorrected_flips=total.miscorrected_flips,
        ber_out=total.errors_out / max(total.bits, 1),
        ci_low=ci_low,
        ci_high=ci_high,
        elapsed_s=time.perf_counter() - t0,
        n_streams=config.n_streams,
    )


def run_sweep(config: SimConfig) -> list[SimResult]:
    """Simulate every point of the sweep; partial results are returned if
    interrupted."""
    results = []
    try:
        for idx, p in enumerate(config.p_values):
            results.append(run_point(config, p, idx))
    except KeyboardInterrupt:
        pass
    return results


# ---------------------------------------------------------------------------
# erroneous-flip probability
# ---------------------------------------------------------------------------

ZETA_DEFINITION = (
    "decodings applying at least one flip to a previously-correct position, "
    "divided by position-flip opportunities (decode attempts times t)"
)


@dataclass
class ZetaEstimate:
    zeta: float
    ci_low: float
    ci_high: float
    p: float
    attempts: int
    opportunities: int
    miscorrections: int
    erroneous_flips: int
    definition: str = ZETA_DEFINITION


def estimate_zeta(config: SimConfig, p: float, blocks: int = 200,
                  point_idx: int = 0) -> ZetaEstimate:
    """Measure the erroneous-flip probability during full staircase decoding.

    Streams ``blocks`` payload blocks at crossover p with truth tracking and
    counts decodings that flipped a correct bit, normalized per position-flip
    opportunity (attempts times t).  The definition travels with the result.
    """
    params = _staircase_params(config.scheme, config.size, config.t,
                               config.window_len, config.max_iters)
    stream_cfg = SimConfig(
        scheme=config.scheme,
        p_values=(p,),
        bits_budget=blocks * params.payload_bits_per_block,
        target_errors=0,
        n_streams=1,
        base_seed=config.base_seed,
        window_len=config.window_len,
        max_iters=config.max_iters,
        check_extension=config.check_extension,
        size=config.size,
        t=config.t,
    )
    rng = _stream_rng(stream_cfg, point_idx, 0)
    counters = _staircase_stream(stream_cfg, rng, p, stream_cfg.bits_budget, 0)
    opportunities = counters.attempts * params.component.t
    zeta = counters.miscorrections / opportunities if opportunities else 0.0
    lo, hi = wilson_interval(counters.miscorrections, max(opportunities, 1))
    return ZetaEstimate(zeta, lo, hi, p, counters.attempts, opportunities,
                        counters.miscorrections, counters.miscorrected_flips)


# ---------------------------------------------------------------------------
# result emission
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("p", "q_db", "bits", "errors_out", "ber_out",
               "ci_low", "ci_high", "stalls", "elapsed_s")


def _csv_row(r: SimResult, include_timing: bool) -> str:
    vals = (r.p, r.q_db, r.bits_simulated, r.bit_errors_out, r.ber_out,
            r.ci_low, r.ci_high, r.stalls_observed,
            r.elapsed_s if include_timing else 0.0)
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in vals)


def results_to_csv(results: list[SimResult], include_timing: bool = True) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(_csv_row(r, include_timing) for r in results)
    return "\n".join(lines) + "\n"


def write_csv(results: list[SimResult], path, include_timing: bool = True):
    with open(path, "w") as fh:
        fh.write(results_to_csv(results, include_timing))


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        row = {}
        for key, val in zip(header, ln.split(",")):
            row[key] = int(val) if key in ("bits", "errors_out", "stalls") else float(val)
        out.append(row)
    return out


def results_to_json(config: SimConfig, results: list[SimResult],
                    include_timing: bool = True) -> dict:
    res = []
    for r in results:
        d = asdict(r)
        if not include_timing:
            d["elapsed_s"] = 0.0
        res.append(d)
    return {
        "config": asdict(config),
        "metadata": {
            "ci_method": "wilson-95",
            "stopping_rule": "min(bits budget, output-error target), split evenly over streams",
            "rng": "numpy Philox; SeedSequence(base_seed, spawn_key=(point, stream))",
            "worker_independence": "results depend only on (config, base_seed)",
        },
        "results": res,
    }
