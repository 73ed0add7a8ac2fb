"""Monte Carlo FER/BER harness.

Every decoder in a plan sees the *identical* observation for every frame:
frame f of parameter cell p draws its data word and channel noise from
split(master_seed, p, f), so results are reproducible and independent of the
worker count or batching, and decoder comparisons are paired.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import ChannelSpec, frame_rng, transmit_array
from .core import ParameterError, PolarCode, construct, encode_array
from .decoders import BitDecoder, DecoderConfig, ML_ENUMERATION_GUARD, SymbolDecoder
from .stats import paired_delta, wilson_interval

__all__ = [
    "DecoderSetting",
    "SimPlan",
    "SimRecord",
    "SimResult",
    "OrderingVerdict",
    "run",
    "paired_ordering_report",
    "write_csv",
    "CSV_HEADER",
]

CSV_HEADER = (
    "channel,param,decoder_M,f_rule,tie_break,frames,bit_errors,frame_errors,"
    "ber,fer,fer_ci_low,fer_ci_high,tie_frames,obs_checksum"
)


@dataclass(frozen=True)
class DecoderSetting:
    """One decoder column of the sweep: symbol size plus rule options."""

    symbol_size: int
    f_rule: str = "exact"
    tie_break: str = "lexicographic-min"

    def config(self) -> DecoderConfig:
        return DecoderConfig(self.symbol_size, self.f_rule, self.tie_break)


@dataclass(frozen=True)
class SimPlan:
    """A full sweep: code, channel grid, decoder list, stop rule, seed."""

    n: int
    k: int
    params: tuple[float, ...]
    decoders: tuple[DecoderSetting, ...]
    max_frames: int
    channel_kind: str = "bec"
    construction_kind: str = "bec"
    construction_param: float = 0.5
    min_frame_errors: int = 0
    master_seed: int = 0
    workers: int = 1
    batch: int = 4096

    def __post_init__(self):
        if not self.params:
            raise ParameterError("parameter grid must be nonempty")
        if self.max_frames < 1:
            raise ParameterError("max_frames must be >= 1")
        if not self.decoders:
            raise ParameterError("decoder list must be nonempty")
        if self.workers < 1 or self.batch < 1:
            raise ParameterError("workers and batch must be >= 1")

    def build_code(self) -> PolarCode:
        return construct(self.n, self.k, self.construction_kind, self.construction_param)


@dataclass(frozen=True)
class SimRecord:
    """One (channel parameter, decoder) cell of the sweep."""

    channel: str
    param: float
    decoder_m: int
    f_rule: str
    tie_break: str
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    fer_ci_low: float
    fer_ci_high: float
    tie_frames: int
    obs_checksum: str


@dataclass(frozen=True)
class CellData:
    """Per-frame indicators of one parameter cell (all decoders paired)."""

    param: float
    frames: int
    obs_checksum: str
    frame_errors: tuple[np.ndarray, ...]   # per decoder, bool (frames,)


@dataclass(frozen=True)
class SimResult:
    plan: SimPlan
    records: tuple[SimRecord, ...]
    cells: tuple[CellData, ...]


@dataclass(frozen=True)
class OrderingVerdict:
    """Paired comparison of two symbol sizes on identical noise.

    ``delta`` is the mean of (small-M frame error - big-M frame error); the
    nesting propositions predict it to be nonnegative, so the verdict is
    "consistent" when delta >= -4 sigma and "violation" otherwise.
    """

    param: float
    m_small: int
    m_big: int
    frames: int
    delta: float
    sigma: float
    n_small_only: int
    n_big_only: int
    verdict: str


def _make_decoder(code: PolarCode, setting: DecoderSetting, batch: int):
    cfg = setting.config()
    if setting.symbol_size == 1:
        return BitDecoder(code, cfg, batch=batch)
    return SymbolDecoder(code, cfg, batch=batch, track_metrics=False)


def _decode_errors(decoder, llr: np.ndarray, u_true: np.ndarray):
    """(frame-error bools, info-bit error count, tied-frame bools)."""
    if isinstance(decoder, BitDecoder):
        u_hat, _, ties = decoder.decode_batch(llr)
    else:
        u_hat, _, _, ties = decoder.decode_batch(llr)
    wrong = u_hat != u_true
    frame_err = wrong.any(axis=1)
    bit_err = int(np.count_nonzero(wrong[:, decoder.code.info_indices]))
    return frame_err, bit_err, ties.any(axis=1)


def _run_cell(plan: SimPlan, code: PolarCode, param_index: int):
    param = plan.params[param_index]
    spec = ChannelSpec(plan.channel_kind, param, rate=code.K / code.N if code.K else 1.0)
    digest = hashlib.blake2b(digest_size=16)
    n_dec = len(plan.decoders)
    err_chunks: list[list[np.ndarray]] = [[] for _ in range(n_dec)]
    bit_errors = [0] * n_dec
    tie_frames = [0] * n_dec
    frame_errors = [0] * n_dec
    done = 0
    while done < plan.max_frames:
        B = min(plan.batch, plan.max_frames - done)
        u_true = np.zeros((B, code.N), dtype=np.uint8)
        llr = np.empty((B, code.N))
        for t in range(B):
            rng = frame_rng(plan.master_seed, param_index, done + t)
            if code.K:
                u_true[t, code.info_indices] = rng.integers(0, 2, code.K, dtype=np.uint8)
            llr[t] = transmit_array(spec, encode_array(code, u_true[t]), rng)
        digest.update(llr.tobytes())
        for d, setting in enumerate(plan.decoders):
            dec = _make_decoder(code, setting, B)
            fe, be, tied = _decode_errors(dec, llr, u_true)
            err_chunks[d].append(fe)
            frame_errors[d] += int(np.count_nonzero(fe))
            bit_errors[d] += be
            tie_frames[d] += int(np.count_nonzero(tied))
        done += B
        if plan.min_frame_errors > 0 and min(frame_errors) >= plan.min_frame_errors:
            break
    checksum = digest.hexdigest()
    records = []
    indicators = []
    for d, setting in enumerate(plan.decoders):
        errs = np.concatenate(err_chunks[d]) if err_chunks[d] else np.zeros(0, dtype=bool)
        indicators.append(errs)
        lo, hi = wilson_interval(frame_errors[d], done)
        ber = bit_errors[d] / (code.K * done) if code.K and done else 0.0
        records.append(SimRecord(
            channel=plan.channel_kind,
            param=param,
            decoder_m=setting.symbol_size,
            f_rule=setting.f_rule,
            tie_break=setting.tie_break,
            frames=done,
            bit_errors=bit_errors[d],
            frame_errors=frame_errors[d],
            ber=ber,
            fer=frame_errors[d] / done if done else 0.0,
            fer_ci_low=lo,
            fer_ci_high=hi,
            tie_frames=tie_frames[d],
            obs_checksum=checksum,
        ))
    cell = CellData(param=param, frames=done, obs_checksum=checksum,
                    frame_errors=tuple(indicators))
    return records, cell


def run(plan: SimPlan) -> SimResult:
    """Run the sweep.  Deterministic for a fixed plan, whatever the worker count.

    Every decoder must be enumerable on the chosen code: a symbol size M = N
    doubles as exhaustive ML and requires K within the enumeration guard
    (checked up front).
    """
    code = plan.build_code()
    for setting in plan.decoders:
        setting.config().validate_for(code)
        if setting.symbol_size == code.N and code.K > ML_ENUMERATION_GUARD:
            raise ParameterError(
                f"symbol size N={code.N} is exhaustive ML and needs K <= {ML_ENUMERATION_GUARD}, got K={code.K}"
            )
    order = range(len(plan.params))
    if plan.workers == 1 or len(plan.params) == 1:
        outs = [_run_cell(plan, code, p) for p in order]
    else:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            outs = list(pool.map(lambda p: _run_cell(plan, code, p), order))
    records: list[SimRecord] = []
    cells: list[CellData] = []
    for recs, cell in outs:
        records.extend(recs)
        cells.append(cell)
    return SimResult(plan=plan, records=tuple(records), cells=tuple(cells))


def paired_ordering_report(result: SimResult) -> list[OrderingVerdict]:
    """Paired frame-error comparisons for every (M, 2M) and (1, M) pair.

    Decoders ran on identical noise per frame (guaranteed by :func:`run`), so
    the comparison is a matched-pairs test on the error indicators.
    """
    plan = result.plan
    ms = [d.symbol_size for d in plan.decoders]
    pos = {m: i for i, m in enumerate(ms)}
    pairs = [(m, 2 * m) for m in sorted(set(ms)) if 2 * m in pos]
    if 1 in pos:
        pairs += [(1, m) for m in sorted(set(ms)) if m > 2 and (1, m) not in pairs]
    out = []
    for cell in result.cells:
        for m_small, m_big in pairs:
            ea = cell.frame_errors[pos[m_small]]
            eb = cell.frame_errors[pos[m_big]]
            delta, sigma, n01, n10 = paired_delta(ea, eb)
            verdict = "consistent" if delta >= -4.0 * sigma else "violation"
            out.append(OrderingVerdict(
                param=cell.param, m_small=m_small, m_big=m_big, frames=cell.frames,
                delta=delta, sigma=sigma, n_small_only=n01, n_big_only=n10,
                verdict=verdict,
            ))
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(records, path_or_buf) -> None:
    """Write records in the fixed column order (byte-stable for equal inputs)."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            r.channel, _fmt(r.param), str(r.decoder_m), r.f_rule, r.tie_break,
            str(r.frames), str(r.bit_errors), str(r.frame_errors),
            _fmt(r.ber), _fmt(r.fer), _fmt(r.fer_ci_low), _fmt(r.fer_ci_high),
            str(r.tie_frames), r.obs_checksum,
        ]))
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_buf, (str, Path)):
        Path(path_or_buf).write_text(text)
    else:
        path_or_buf.write(text)
