"""HTTP service wrapping the codec and simulator.

All numeric payloads stay JSON-clean: LLR inputs accept numbers or the
strings "inf" / "-inf", and metric outputs that may be infinite are encoded
as strings (parse with ``float``).
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import sim as simmod
from .channels import ChannelObservation
from .core import InputError, PolarCode, construct, encode_array, make_code
from .decoders import DecoderConfig, sc_bit_decode, sc_symbol_decode
from .patterns import classify_patterns, count_dp2

app = FastAPI(
    title="sdsc-polar",
    description="Polar-code construction, encoding, SC / symbol-decision / ML decoding, "
                "and Monte Carlo FER simulation.",
    version="0.1.0",
)


def _bad(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


class CodeLayout(BaseModel):
    """Explicit code layout, the JSON twin of the two-line code file."""

    N: int = Field(ge=1)
    info_set: list[int]

    def to_code(self) -> PolarCode:
        return make_code(self.N, self.info_set)

    @classmethod
    def of(cls, code: PolarCode) -> "CodeLayout":
        return cls(N=code.N, info_set=list(code.info_set))


class ConstructRequest(BaseModel):
    n: int = Field(ge=0, le=20)
    k: int = Field(ge=0)
    channel_kind: str = "bec"
    design_param: float = 0.5


class ConstructResponse(BaseModel):
    code: CodeLayout
    frozen_set: list[int]
    reliabilities: list[float]
    channel_kind: str
    design_param: float


class EncodeRequest(BaseModel):
    code: CodeLayout
    u: list[int]


class EncodeResponse(BaseModel):
    x: list[int]


class DecodeRequest(BaseModel):
    code: CodeLayout
    llr: list[float | str]
    symbol_size: int = 1
    f_rule: str = "exact"
    tie_break: str = "lexicographic-min"


class SymbolMetricModel(BaseModel):
    log_likelihood: str
    runner_up_gap: str


class DecodeResponse(BaseModel):
    u_hat: list[int]
    bitstring: str
    tie_flags: list[bool]
    symbols: list[SymbolMetricModel]


class PatternsRequest(BaseModel):
    code: CodeLayout
    symbol_size: int


class PatternEntry(BaseModel):
    index: int
    pattern: str
    dp_class: str


class PatternsResponse(BaseModel):
    symbols: list[PatternEntry]
    dp2_count: int
    total: int


class DecoderSettingModel(BaseModel):
    symbol_size: int = Field(ge=1)
    f_rule: str = "exact"
    tie_break: str = "lexicographic-min"


class SimulateRequest(BaseModel):
    n: int = Field(ge=0, le=20)
    k: int = Field(ge=0)
    construction_kind: str = "bec"
    construction_param: float = 0.5
    channel: str = "bec"
    params: list[float]
    decoders: list[DecoderSettingModel]
    frames: int = Field(ge=1)
    min_frame_errors: int = 0
    seed: int = 0
    workers: int = 1
    include_orderings: bool = True


class SimRecordModel(BaseModel):
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


class OrderingModel(BaseModel):
    param: float
    m_small: int
    m_big: int
    frames: int
    delta: float
    sigma: float
    n_small_only: int
    n_big_only: int
    verdict: str


class SimulateResponse(BaseModel):
    records: list[SimRecordModel]
    orderings: list[OrderingModel]


def _parse_llr(values: list[float | str]) -> np.ndarray:
    out = np.empty(len(values))
    for i, v in enumerate(values):
        try:
            out[i] = float(v)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad LLR value at position {i + 1}: {v!r}") from exc
        if math.isnan(out[i]):
            raise InputError(f"LLR at position {i + 1} is NaN")
    return out


def _inf_str(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else ("inf" if v > 0 else "-inf")


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/construct", response_model=ConstructResponse)
def construct_endpoint(req: ConstructRequest) -> ConstructResponse:
    try:
        code = construct(req.n, req.k, req.channel_kind, req.design_param)
    except ValueError as exc:
        raise _bad(exc)
    return ConstructResponse(
        code=CodeLayout.of(code),
        frozen_set=list(code.frozen_set),
        reliabilities=[float(z) for z in code.reliabilities],
        channel_kind=code.channel_kind,
        design_param=code.design_param,
    )


@app.post("/encode", response_model=EncodeResponse)
def encode_endpoint(req: EncodeRequest) -> EncodeResponse:
    try:
        code = req.code.to_code()
        x = encode_array(code, np.asarray(req.u, dtype=np.uint8))
    except ValueError as exc:
        raise _bad(exc)
    return EncodeResponse(x=[int(b) for b in x])


@app.post("/decode", response_model=DecodeResponse)
def decode_endpoint(req: DecodeRequest) -> DecodeResponse:
    try:
        code = req.code.to_code()
        obs = ChannelObservation(_parse_llr(req.llr))
        cfg = DecoderConfig(req.symbol_size, req.f_rule, req.tie_break)
        cfg.validate_for(code)
        result = sc_bit_decode(code, obs, cfg) if req.symbol_size == 1 else sc_symbol_decode(code, obs, cfg)
    except ValueError as exc:
        raise _bad(exc)
    bits = [int(b) for b in result.u_hat.bits]
    return DecodeResponse(
        u_hat=bits,
        bitstring="".join(str(b) for b in bits),
        tie_flags=list(result.tie_flags),
        symbols=[
            SymbolMetricModel(
                log_likelihood=_inf_str(m.log_likelihood),
                runner_up_gap=_inf_str(m.runner_up_gap),
            )
            for m in result.per_symbol_metrics
        ],
    )


@app.post("/patterns", response_model=PatternsResponse)
def patterns_endpoint(req: PatternsRequest) -> PatternsResponse:
    try:
        code = req.code.to_code()
        pats = classify_patterns(code, req.symbol_size)
        dp2, total = count_dp2(code, req.symbol_size)
    except ValueError as exc:
        raise _bad(exc)
    return PatternsResponse(
        symbols=[PatternEntry(index=p.symbol_index, pattern=p.pattern, dp_class=p.dp_class) for p in pats],
        dp2_count=dp2,
        total=total,
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
    try:
        plan = simmod.SimPlan(
            n=req.n,
            k=req.k,
            params=tuple(req.params),
            decoders=tuple(
                simmod.DecoderSetting(d.symbol_size, d.f_rule, d.tie_break) for d in req.decoders
            ),
            max_frames=req.frames,
            channel_kind=req.channel,
            construction_kind=req.construction_kind,
            construction_param=req.construction_param,
            min_frame_errors=req.min_frame_errors,
            master_seed=req.seed,
            workers=req.workers,
        )
        result = simmod.run(plan)
        orderings = simmod.paired_ordering_report(result) if req.include_orderings else []
    except ValueError as exc:
        raise _bad(exc)
    return SimulateResponse(
        records=[SimRecordModel(**r.__dict__) for r in result.records],
        orderings=[OrderingModel(**o.__dict__) for o in orderings],
    )
