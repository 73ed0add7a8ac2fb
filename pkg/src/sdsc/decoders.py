"""Successive-cancellation decoders: bit-decision, M-bit symbol-decision, ML.

The bit-decision decoder commits one hard decision per position, maximizing
Pr(y, u_hat_prefix | u_j).  The M-bit symbol decoder commits M positions at a
time, maximizing the joint Pr(y, u_hat_prefix | u_{jM+1}^{jM+M}) over all
assignments of the symbol's free bits (frozen bits pinned to zero); with M = N
this is exact ML sequence decoding.

Implementation notes
--------------------
* All decoders run on a shared batched engine: one LLR / partial-sum buffer
  per tree level, a frame axis in front, and the standard trailing-zeros
  recompute schedule.  A batch of one gives the single-frame API.
* Because M | N and N is a power of two, every symbol is an aligned subtree.
  The joint likelihood of a candidate differs from a per-candidate correlation
  of the symbol's sub-codeword with the subtree-root LLR block only by a
  candidate-independent constant, so each symbol decision is an argmax over
  the enumerated sub-codewords.  Candidates are enumerated in lexicographic
  order of the free bits, which makes first-argmax the lexicographic-minimum
  tie-break.
* BEC certainties are exact +-inf LLRs.  Combining a certainty with an
  erasure keeps the exact result; opposing certainties in the g-step (which
  occur after the decoder has committed to a prefix of zero posterior, e.g.
  a forced frozen zero against a certain one) carry no information and
  collapse to LLR 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ChannelObservation, ChannelSpec, frame_rng, transmit_array
from .core import BitBlock, InputError, PolarCode, _bitrev_indices, encode_array, polar_transform

__all__ = [
    "ConfigError",
    "DecoderConfig",
    "DecodeResult",
    "SegmentErrorStats",
    "BitDecoder",
    "SymbolDecoder",
    "sc_bit_decode",
    "sc_symbol_decode",
    "ml_decode",
    "ml_score",
    "genie_segment_rates",
    "ML_ENUMERATION_GUARD",
]

ML_ENUMERATION_GUARD = 24

class ConfigError(ValueError):
    """Invalid decoder configuration (M does not divide N, guard exceeded, ...)."""


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder settings: symbol size, f-rule, tie-break.

    ``symbol_size`` 1 is bit-decision SC; it must divide N; equal to N it is
    ML sequence decoding.  ``f_rule`` "exact" uses the hyperbolic-tangent
    check-node rule (realizes the decision probabilities exactly), "minsum"
    the usual approximation.  Ties are always flagged; both tie-break names
    resolve a tied comparison toward the zero bit, i.e. the lexicographically
    smallest candidate.
    """

    symbol_size: int = 1
    f_rule: str = "exact"
    tie_break: str = "lexicographic-min"

    def __post_init__(self):
        if self.symbol_size < 1:
            raise ConfigError(f"symbol size must be >= 1, got {self.symbol_size}")
        if self.f_rule not in ("exact", "minsum"):
            raise ConfigError(f"unknown f rule {self.f_rule!r}")
        if self.tie_break not in ("zero", "lexicographic-min"):
            raise ConfigError(f"unknown tie break {self.tie_break!r}")

    def validate_for(self, code: PolarCode) -> None:
        if code.N % self.symbol_size:
            raise ConfigError(f"symbol size {self.symbol_size} does not divide N={code.N}")


@dataclass(frozen=True)
class SymbolMetric:
    """Winning candidate's joint log-likelihood and its gap to the runner-up."""

    log_likelihood: float
    runner_up_gap: float


@dataclass(frozen=True)
class DecodeResult:
    """Decoder output: estimate, per-symbol decision metadata, tie flags."""

    u_hat: BitBlock
    per_symbol_metrics: tuple[SymbolMetric, ...]
    tie_flags: tuple[bool, ...]

    @property
    def tied(self) -> bool:
        return any(self.tie_flags)


@dataclass(frozen=True)
class SegmentErrorStats:
    """Per-segment genie-aided error counts (prefix forced to the true bits)."""

    trials: np.ndarray
    errors: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.trials, dtype=np.int64)
        e = np.asarray(self.errors, dtype=np.int64)
        if t.shape != e.shape or np.any(e > t):
            raise InputError("segment errors must not exceed trials")
        object.__setattr__(self, "trials", t)
        object.__setattr__(self, "errors", e)

    @property
    def rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self.trials > 0, self.errors / np.maximum(self.trials, 1), 0.0)


# ---------------------------------------------------------------------------
# check-node / variable-node primitives
# ---------------------------------------------------------------------------

def _f_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """2 atanh(tanh(a/2) tanh(b/2)), in the numerically exact decomposition."""
    with np.errstate(invalid="ignore", over="ignore"):
        s = np.sign(a) * np.sign(b)
        m = np.minimum(np.abs(a), np.abs(b))
        out = s * m + np.logaddexp(0.0, -np.abs(a + b)) - np.logaddexp(0.0, -np.abs(a - b))
    both = np.isinf(a) & np.isinf(b)
    if both.any():
        out[both] = (s * m)[both]
    return out


def _f_minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _g_combine(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """b + (1 - 2c) a.  Opposing certainties collapse to 0 (dead prefix)."""
    with np.errstate(invalid="ignore"):
        out = np.where(c.astype(bool), b - a, b + a)
    nan = np.isnan(out)
    if nan.any():
        out[nan] = 0.0
    return out


_F_RULES = {"exact": _f_exact, "minsum": _f_minsum}


class _Engine:
    """Batched SC recursion state: one active node per level.

    ``L[s]`` holds the LLR block of the active node at level s (width N >> s,
    level 0 = channel).  ``SB[s]`` holds the codeword bits of the completed
    left sibling at level s.  Leaves must be visited in order; ``descend``
    recomputes exactly the levels invalidated by the previous decision.
    """

    def __init__(self, code: PolarCode, batch: int, f_rule: str = "exact"):
        self.code = code
        self.n = code.n
        self.B = batch
        self.f = _F_RULES[f_rule]
        self.L = [np.empty((batch, code.N >> s)) for s in range(code.n + 1)]
        self.SB: list[np.ndarray | None] = [None] * (code.n + 1)
        self.x_hat: np.ndarray | None = None

    def reset(self, llr: np.ndarray) -> None:
        if llr.shape != (self.B, self.code.N):
            raise InputError(f"llr batch must have shape {(self.B, self.code.N)}, got {llr.shape}")
        self.L[0][...] = llr
        self.SB = [None] * (self.n + 1)
        self.x_hat = None

    def descend(self, leaf: int, upto: int) -> None:
        """Recompute LLR levels for ``leaf`` down to level ``upto``."""
        if leaf == 0:
            lo = 1
        else:
            t = (leaf & -leaf).bit_length() - 1
            lo = self.n - t
            parent = self.L[lo - 1]
            self.L[lo][...] = _g_combine(parent[:, 0::2], parent[:, 1::2], self.SB[lo])
            lo += 1
        for s in range(lo, upto + 1):
            parent = self.L[s - 1]
            self.L[s][...] = self.f(parent[:, 0::2], parent[:, 1::2])

    def feed(self, level: int, node: int, bits: np.ndarray, record: list | None = None) -> None:
        """Commit the codeword ``bits`` of the completed subtree (level, node).

        Walks up while the node is a right child, combining with stored left
        siblings.  Overwrites exactly one ``SB`` entry (recorded for undo) or,
        at the root, the re-encoded codeword estimate.
        """
        cur = bits
        s, j = level, node
        while j & 1:
            left = self.SB[s]
            w = cur.shape[1]
            parent = np.empty((self.B, 2 * w), dtype=np.uint8)
            np.bitwise_xor(left, cur, out=parent[:, 0::2])
            parent[:, 1::2] = cur
            cur = parent
            j >>= 1
            s -= 1
        if s == 0:
            self.x_hat = cur if cur is not bits else cur.copy()
        else:
            if record is not None:
                record.append((s, self.SB[s]))
            self.SB[s] = cur if cur is not bits else cur.copy()

    def feed_leaf(self, leaf: int, bits: np.ndarray, record: list | None = None) -> None:
        self.feed(self.n, leaf, bits.reshape(self.B, 1), record)

    def undo(self, record: list) -> None:
        for s, old in reversed(record):
            self.SB[s] = old
        record.clear()


# ---------------------------------------------------------------------------
# per-symbol candidate enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SymbolTable:
    """Free-bit layout of one M-bit symbol plus (optionally cached) codewords."""

    M: int
    free: tuple[int, ...]          # 0-based offsets of free bits inside the symbol
    cw: np.ndarray | None          # (2**|free|, M) sub-codewords, or None if generated per chunk
    cwT32: np.ndarray | None       # (M, 2**|free|) float32 transpose for the violation matmul

    @property
    def count(self) -> int:
        return 1 << len(self.free)

    @property
    def rate_one(self) -> bool:
        return len(self.free) == self.M


_TABLE_CACHE_LIMIT = 1 << 16


def _sub_codewords(free: tuple[int, ...], M: int, lo: int, hi: int) -> np.ndarray:
    """Sub-codewords of candidates [lo, hi); candidate index bits fill the
    free positions MSB-first so ascending index is ascending lexicographic."""
    nf = len(free)
    idx = np.arange(lo, hi, dtype=np.uint64)
    useg = np.zeros((hi - lo, M), dtype=np.uint8)
    for t, pos in enumerate(free):
        useg[:, pos] = (idx >> np.uint64(nf - 1 - t)) & np.uint64(1)
    if M == 1:
        return useg
    return polar_transform(useg[:, _bitrev_indices(M.bit_length() - 1)])


def _candidate_bits(free: tuple[int, ...], M: int, idx: np.ndarray) -> np.ndarray:
    """Data bits (``(B, M)``) of the candidates selected per frame."""
    nf = len(free)
    out = np.zeros((idx.size, M), dtype=np.uint8)
    sel = idx.astype(np.uint64)
    for t, pos in enumerate(free):
        out[:, pos] = ((sel >> np.uint64(nf - 1 - t)) & np.uint64(1)).astype(np.uint8)
    return out


@lru_cache(maxsize=None)
def _symbol_tables(code: PolarCode, M: int) -> tuple[_SymbolTable, ...]:
    if code.N % M:
        raise ConfigError(f"symbol size {M} does not divide N={code.N}")
    mask = code.info_mask
    tables = []
    shared: dict[bytes, _SymbolTable] = {}
    for j in range(code.N // M):
        seg = mask[j * M:(j + 1) * M]
        key = seg.tobytes()
        if key not in shared:
            free = tuple(int(p) for p in np.flatnonzero(seg))
            if len(free) > ML_ENUMERATION_GUARD:
                raise ConfigError(
                    f"symbol with {len(free)} free bits exceeds the enumeration guard "
                    f"({ML_ENUMERATION_GUARD}); choose a smaller symbol size"
                )
            if 1 << len(free) <= _TABLE_CACHE_LIMIT:
                cw = _sub_codewords(free, M, 0, 1 << len(free))
                cwT32 = np.ascontiguousarray(cw.T, dtype=np.float32)
            else:
                cw = cwT32 = None
            shared[key] = _SymbolTable(M=M, free=free, cw=cw, cwT32=cwT32)
        tables.append(shared[key])
    return tuple(tables)


class _ArgmaxScan:
    """Running argmax over candidate chunks, per frame.

    Tracks the best score, the first index achieving it (lexicographic-min
    tie-break, since candidates arrive in ascending order), whether the
    maximum is attained more than once, and optionally the second order
    statistic of all scores (for runner-up gaps).
    """

    def __init__(self, B: int, track_second: bool = True):
        self.best = np.full(B, -np.inf)
        self.second = np.full(B, -np.inf) if track_second else None
        self.best_idx = np.zeros(B, dtype=np.int64)
        self.n_best = np.zeros(B, dtype=np.int64)

    def update(self, scores: np.ndarray, lo: int) -> None:
        width = scores.shape[1]
        ci = np.argmax(scores, axis=1)
        cb = np.take_along_axis(scores, ci[:, None], axis=1)[:, 0].astype(np.float64)
        ccnt = np.count_nonzero(scores == cb[:, None], axis=1)
        better = cb > self.best
        equal = cb == self.best
        if self.second is not None:
            if width >= 2:
                cs = np.partition(scores, width - 2, axis=1)[:, width - 2].astype(np.float64)
            else:
                cs = np.full(scores.shape[0], -np.inf)
            self.second = np.where(better, np.maximum(self.best, cs), np.maximum(self.second, cb))
        self.best_idx = np.where(better, lo + ci, self.best_idx)
        self.n_best = np.where(better, ccnt, np.where(equal, self.n_best + ccnt, self.n_best))
        self.best = np.maximum(self.best, cb)


def _chunks(count: int, B: int):
    step = max(1, (1 << 22) // max(B, 1))
    for lo in range(0, count, step):
        yield lo, min(count, lo + step)


def _table_cw(table: _SymbolTable, lo: int, hi: int) -> np.ndarray:
    if table.cw is not None:
        return table.cw[lo:hi]
    return _sub_codewords(table.free, table.M, lo, hi)


def _table_cwT32(table: _SymbolTable, lo: int, hi: int) -> np.ndarray:
    if table.cwT32 is not None:
        return table.cwT32[:, lo:hi]
    return np.ascontiguousarray(_sub_codewords(table.free, table.M, lo, hi).T, dtype=np.float32)


def _pack_candidate_index(ubits: np.ndarray, free: tuple[int, ...]) -> np.ndarray:
    """Inverse of _candidate_bits: candidate index of each frame's data bits."""
    weights = np.zeros(ubits.shape[1], dtype=np.int64)
    nf = len(free)
    for t, pos in enumerate(free):
        weights[pos] = 1 << (nf - 1 - t)
    return ubits.astype(np.int64) @ weights


def _rate_one_fast(lam: np.ndarray, table: _SymbolTable):
    """Positionwise hard decision for a fully-free (rate-1) symbol.

    Every M-bit word is a sub-codeword, so the correlation argmax decomposes
    per position.  Only valid for frames with no zero LLR in the block (a
    zero makes the argmax non-unique and the lexicographic tie-break then
    lives in data-bit space, which needs the enumeration path).
    """
    # the encoding map is an involution (B_N and F^{kron n} commute), so the
    # data bits of a sub-codeword are recovered by encoding it again
    w = (lam < 0).astype(np.uint8)
    ubits = _sub_codewords_of(w, table.M)
    idx = _pack_candidate_index(ubits, table.free)
    gap = np.abs(lam).min(axis=1)
    return idx, gap


def _scan_candidates(lam: np.ndarray, table: _SymbolTable, need_gap: bool = True):
    """Per-symbol local-ML candidate selection.

    The joint log-likelihood of a candidate equals a candidate-independent
    constant minus the correlation of its sub-codeword with the root LLR
    block, with each violated channel certainty driving it to -inf.  The scan
    therefore ranks by (violation count, finite correlation): an exact
    integer count first, the finite part among the minimal-violation
    candidates second.  If even the best candidate violates a certainty, all
    joint probabilities are zero and the argmax is undefined; the scan then
    resolves to the lexicographic minimum (index 0) with a tie flag.

    Returns ``(best_idx, gap, tie)``: the winner, its log-likelihood gap to
    the runner-up (+inf when the runner-up is impossible or absent, 0 on a
    tie, NaN when not requested), and the tie flag.
    """
    B, M = lam.shape
    if table.rate_one:
        tied_rows = (lam == 0.0).any(axis=1)
        idx, gap = _rate_one_fast(lam, table)
        tie = np.zeros(B, dtype=bool)
        if tied_rows.any():
            sub_idx, sub_gap, sub_tie = _scan_candidates_enum(lam[tied_rows], table, need_gap)
            idx[tied_rows] = sub_idx
            gap[tied_rows] = sub_gap
            tie[tied_rows] = sub_tie
        return idx, (gap if need_gap else np.full(B, np.nan)), tie
    return _scan_candidates_enum(lam, table, need_gap)


def _scan_candidates_enum(lam: np.ndarray, table: _SymbolTable, need_gap: bool = True):
    B, M = lam.shape
    C = table.count
    inf_mask = np.isinf(lam)
    dead = None
    if not inf_mask.any():
        scan = _ArgmaxScan(B, track_second=need_gap)
        for lo, hi in _chunks(C, B):
            cw = _table_cw(table, lo, hi).astype(np.float64)
            scan.update(-(lam @ cw.T), lo)
    else:
        # signed certainty indicator: -(sgn @ cw) = -(violations) + const(frame),
        # exact small integers in float32
        sgn = np.zeros(lam.shape, dtype=np.float32)
        sgn[lam == np.inf] = 1.0
        sgn[lam == -np.inf] = -1.0
        neg_tot = np.count_nonzero(lam == -np.inf, axis=1).astype(np.float64)
        pure = bool(np.all(inf_mask | (lam == 0.0)))
        vio_scan = _ArgmaxScan(B, track_second=need_gap and pure)
        for lo, hi in _chunks(C, B):
            vio_scan.update(-(sgn @ _table_cwT32(table, lo, hi)), lo)
        # best = -(min violations) + neg_tot: dead iff min violations >= 1
        dead = vio_scan.best < neg_tot - 0.5
        if pure:
            scan = vio_scan
            if scan.second is not None:
                # consistent candidates tie at finite part 0: any separation in
                # violation count is an infinite log-likelihood gap
                scan.second = np.where(scan.second == scan.best, scan.best, -np.inf)
        else:
            # finite correlation among the minimal-violation candidates only
            lam_fin = np.where(inf_mask, 0.0, lam)
            vbest = vio_scan.best.astype(np.float32)
            scan = _ArgmaxScan(B, track_second=need_gap)
            for lo, hi in _chunks(C, B):
                vio = -(sgn @ _table_cwT32(table, lo, hi))
                fin = -(lam_fin @ _table_cw(table, lo, hi).astype(np.float64).T)
                scan.update(np.where(vio == vbest[:, None], fin, -np.inf), lo)
    best_idx, tie = scan.best_idx, scan.n_best > 1
    gap = scan.best - scan.second if scan.second is not None else np.full(B, np.nan)
    if dead is not None and dead.any():
        best_idx = np.where(dead, 0, best_idx)
        gap = np.where(dead, 0.0, gap)
        if C > 1:
            tie = tie | dead
    return best_idx, gap, tie


def _symbol_loglik(lam: np.ndarray, wbits: np.ndarray) -> np.ndarray:
    """Joint log-likelihood contribution sum_k log sigma((1-2w_k) lam_k)."""
    signed = np.where(wbits.astype(bool), lam, -lam)
    return -np.logaddexp(0.0, signed).sum(axis=1)


# ---------------------------------------------------------------------------
# decoders
# ---------------------------------------------------------------------------

class BitDecoder:
    """Bit-decision SC decoder (one hard decision per position), batched."""

    def __init__(self, code: PolarCode, cfg: DecoderConfig | None = None, batch: int = 1):
        self.code = code
        self.cfg = cfg or DecoderConfig(symbol_size=1)
        if self.cfg.symbol_size != 1:
            raise ConfigError("BitDecoder requires symbol_size=1")
        self.engine = _Engine(code, batch, self.cfg.f_rule)

    def decode_batch(self, llr: np.ndarray):
        """Decode a (B, N) LLR batch.

        Returns ``(u_hat, decision_llrs, ties)``, each with a leading frame
        axis; ties marks information positions whose decision LLR was 0.
        """
        eng = self.engine
        code = self.code
        eng.reset(llr)
        B, N = eng.B, code.N
        u = np.zeros((B, N), dtype=np.uint8)
        dec = np.empty((B, N))
        ties = np.zeros((B, N), dtype=bool)
        info = code.info_mask
        for i in range(N):
            eng.descend(i, code.n)
            lam = eng.L[code.n][:, 0]
            dec[:, i] = lam
            if info[i]:
                u[:, i] = lam < 0
                ties[:, i] = lam == 0.0
            eng.feed_leaf(i, u[:, i])
        return u, dec, ties


class SymbolDecoder:
    """M-bit symbol-decision SC decoder (local ML per symbol), batched.

    ``track_metrics=False`` skips the runner-up bookkeeping (gaps come back
    NaN), which matters in Monte Carlo hot loops.
    """

    def __init__(self, code: PolarCode, cfg: DecoderConfig, batch: int = 1,
                 track_metrics: bool = True):
        cfg.validate_for(code)
        self.code = code
        self.cfg = cfg
        self.M = cfg.symbol_size
        self.level = code.n - (self.M.bit_length() - 1)
        self.tables = _symbol_tables(code, self.M)
        self.track_metrics = track_metrics
        self.engine = _Engine(code, batch, cfg.f_rule)

    def decode_batch(self, llr: np.ndarray):
        """Decode a (B, N) LLR batch symbol by symbol.

        Returns ``(u_hat, logliks, gaps, ties)`` where the last three have
        shape (B, N/M): the winning candidate's joint log-likelihood
        contribution, its score gap to the runner-up (+inf if the symbol has
        a single candidate), and the tie flag.
        """
        eng = self.engine
        code, M = self.code, self.M
        eng.reset(llr)
        B = eng.B
        S = code.N // M
        u = np.zeros((B, code.N), dtype=np.uint8)
        logliks = np.empty((B, S)) if self.track_metrics else np.full((B, S), np.nan)
        gaps = np.empty((B, S))
        ties = np.zeros((B, S), dtype=bool)
        for j in range(S):
            eng.descend(j * M, self.level)
            lam = eng.L[self.level].copy()
            table = self.tables[j]
            if table.count == 1:
                wbits = np.zeros((B, M), dtype=np.uint8)
                gaps[:, j] = np.inf
            else:
                idx, gap, tie = _scan_candidates(lam, table, need_gap=self.track_metrics)
                ubits = _candidate_bits(table.free, M, idx)
                u[:, j * M:(j + 1) * M] = ubits
                wbits = table.cw[idx] if table.cw is not None else _sub_codewords_of(ubits, M)
                gaps[:, j] = gap
                ties[:, j] = tie
            if self.track_metrics:
                logliks[:, j] = _symbol_loglik(lam, wbits)
            eng.feed(self.level, j, np.ascontiguousarray(wbits))
        return u, logliks, gaps, ties


def _sub_codewords_of(ubits: np.ndarray, M: int) -> np.ndarray:
    if M == 1:
        return ubits
    return polar_transform(ubits[:, _bitrev_indices(M.bit_length() - 1)])


def _as_llr_batch(code: PolarCode, obs: ChannelObservation) -> np.ndarray:
    llr = np.asarray(obs.llr, dtype=np.float64)
    if llr.shape != (code.N,):
        raise InputError(f"observation length must be {code.N}, got {llr.shape}")
    return llr[None, :]


def sc_bit_decode(code: PolarCode, obs: ChannelObservation, cfg: DecoderConfig | None = None) -> DecodeResult:
    """Bit-decision SC decoding of one observation (Eq.-2 rule per position).

    Frozen positions decode to 0.  A zero decision LLR at an information
    position is a tie, resolved to 0 and flagged.
    """
    cfg = cfg or DecoderConfig(symbol_size=1)
    dec = BitDecoder(code, cfg, batch=1)
    u, lam, ties = dec.decode_batch(_as_llr_batch(code, obs))
    metrics = tuple(
        SymbolMetric(
            log_likelihood=float(-np.logaddexp(0.0, -abs(lam[0, i])) if code.info_mask[i]
                                 else -np.logaddexp(0.0, -lam[0, i])),
            runner_up_gap=float(abs(lam[0, i])) if code.info_mask[i] else np.inf,
        )
        for i in range(code.N)
    )
    return DecodeResult(
        u_hat=BitBlock(u[0], role="estimate-u"),
        per_symbol_metrics=metrics,
        tie_flags=tuple(bool(t) for t in ties[0]),
    )


def sc_symbol_decode(code: PolarCode, obs: ChannelObservation, cfg: DecoderConfig) -> DecodeResult:
    """M-bit symbol-decision SC decoding of one observation (local ML per symbol)."""
    dec = SymbolDecoder(code, cfg, batch=1)
    u, logliks, gaps, ties = dec.decode_batch(_as_llr_batch(code, obs))
    metrics = tuple(SymbolMetric(float(l), float(g)) for l, g in zip(logliks[0], gaps[0]))
    return DecodeResult(
        u_hat=BitBlock(u[0], role="estimate-u"),
        per_symbol_metrics=metrics,
        tie_flags=tuple(bool(t) for t in ties[0]),
    )


# ---------------------------------------------------------------------------
# exhaustive ML
# ---------------------------------------------------------------------------

def _ml_data_words(code: PolarCode, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.uint64)
    u = np.zeros((hi - lo, code.N), dtype=np.uint8)
    for t, pos in enumerate(code.info_indices):
        u[:, pos] = ((idx >> np.uint64(code.K - 1 - t)) & np.uint64(1)).astype(np.uint8)
    return u


def _ml_scan(code: PolarCode, llr: np.ndarray):
    """Exhaustive ML over a (B, N) batch: returns (best index, gap, tie).

    Enumerates data words in lexicographic order, encodes each, and ranks
    codewords by the exact two-part likelihood key (violated certainties
    ascending, finite-position correlation descending).  Frames whose best
    codeword still violates a certainty have likelihood zero everywhere; they
    resolve to data word 0 with a tie flag.
    """
    if code.K > ML_ENUMERATION_GUARD:
        raise ConfigError(
            f"exhaustive ML is an enumeration oracle; K={code.K} exceeds guard {ML_ENUMERATION_GUARD}"
        )
    B = llr.shape[0]
    C = 1 << code.K
    pos_cert = (llr == np.inf).astype(np.float32)
    neg_cert = (llr == -np.inf).astype(np.float32)
    neg_tot = neg_cert.sum(axis=1).astype(np.float64)
    lam_fin = np.where(np.isfinite(llr), llr, 0.0)
    best_vio = np.full(B, np.inf)
    best_corr = np.full(B, -np.inf)
    sec_vio = np.full(B, np.inf)
    sec_corr = np.full(B, -np.inf)
    best_idx = np.zeros(B, dtype=np.int64)
    n_best = np.zeros(B, dtype=np.int64)
    rows = np.arange(B)
    step = max(1, (1 << 22) // max(B, 1))

    def key_less(v1, c1, v2, c2):
        # strictly better likelihood: fewer violations, or equal with more correlation
        return (v1 < v2) | ((v1 == v2) & (c1 > c2))

    for lo in range(0, C, step):
        hi = min(C, lo + step)
        x = encode_array(code, _ml_data_words(code, lo, hi)).astype(np.float32).T
        vio = (pos_cert @ x).astype(np.float64) + (neg_tot[:, None] - (neg_cert @ x).astype(np.float64))
        corr = -(lam_fin @ x.astype(np.float64))
        cvio = vio.min(axis=1)
        masked = np.where(vio == cvio[:, None], corr, -np.inf)
        ci = np.argmax(masked, axis=1)
        ccorr = masked[rows, ci]
        ccnt = np.count_nonzero(masked == ccorr[:, None], axis=1)
        # chunk runner-up: next correlation at the minimal violation count,
        # else the next violation count (correlation then immaterial: -inf)
        masked[rows, ci] = -np.inf
        c2corr = masked.max(axis=1)
        with np.errstate(invalid="ignore"):
            vio_rest = np.where(vio > cvio[:, None], vio, np.inf).min(axis=1)
        have2 = np.isfinite(c2corr)
        r_vio = np.where(have2, cvio, vio_rest)
        r_corr = np.where(have2, c2corr, -np.inf)
        # merge chunk best
        better = key_less(cvio, ccorr, best_vio, best_corr)
        equal = (cvio == best_vio) & (ccorr == best_corr)
        new_sec_v = np.where(better, best_vio, sec_vio)
        new_sec_c = np.where(better, best_corr, sec_corr)
        best_idx = np.where(better, lo + ci, best_idx)
        n_best = np.where(better, ccnt, np.where(equal, n_best + ccnt, n_best))
        best_vio = np.where(better, cvio, best_vio)
        best_corr = np.where(better, ccorr, best_corr)
        # merge chunk runner-up into the second slot
        for v, c in ((r_vio, r_corr), (np.where(better, np.inf, cvio), np.where(better, -np.inf, ccorr))):
            promote = key_less(v, c, new_sec_v, new_sec_c) & ~key_less(v, c, best_vio, best_corr)
            new_sec_v = np.where(promote, v, new_sec_v)
            new_sec_c = np.where(promote, c, new_sec_c)
        sec_vio, sec_corr = new_sec_v, new_sec_c
    tie = n_best > 1
    sec_vio = np.where(tie, best_vio, sec_vio)
    sec_corr = np.where(tie, best_corr, sec_corr)
    gap = np.where(tie, 0.0, np.where(sec_vio > best_vio, np.inf, best_corr - sec_corr))
    dead = best_vio >= 1.0
    if dead.any():
        best_idx = np.where(dead, 0, best_idx)
        gap = np.where(dead, 0.0, gap)
        if C > 1:
            tie = tie | dead
    return best_idx, gap, tie


def ml_score(code: PolarCode, llr: np.ndarray, u: np.ndarray) -> tuple[int, float]:
    """Exactly comparable codeword likelihood key: (violated certainties,
    finite-position correlation).  Codeword A is more likely than B iff it
    violates fewer certainties, or equally many with a larger correlation;
    equal keys mean exactly equal channel likelihood."""
    llr = np.asarray(llr, dtype=np.float64)
    x = encode_array(code, np.asarray(u, dtype=np.uint8))
    ones = x.astype(bool)
    vio = int(np.count_nonzero(ones & (llr == np.inf)) +
              np.count_nonzero(~ones & (llr == -np.inf)))
    corr = -float(llr[np.isfinite(llr) & ones].sum())
    return vio, corr


def ml_decode(code: PolarCode, obs: ChannelObservation) -> DecodeResult:
    """Exhaustive ML sequence decoding over all 2**K data words.

    Encodes every data word and scores its codeword by channel likelihood;
    ties resolve to the lexicographically smallest data word and are flagged.
    Refuses K beyond the enumeration guard.
    """
    llr = _as_llr_batch(code, obs)
    idx, gap, tie = _ml_scan(code, llr)
    u = _ml_data_words(code, int(idx[0]), int(idx[0]) + 1)
    loglik = _symbol_loglik(llr, encode_array(code, u))
    return DecodeResult(
        u_hat=BitBlock(u[0], role="estimate-u"),
        per_symbol_metrics=(SymbolMetric(float(loglik[0]), float(gap[0])),),
        tie_flags=(bool(tie[0]),),
    )


def ml_decode_batch(code: PolarCode, llr: np.ndarray):
    """Batched exhaustive ML; returns ``(u_hat, tie)`` for a (B, N) batch."""
    idx, _, tie = _ml_scan(code, llr)
    u = np.zeros((llr.shape[0], code.N), dtype=np.uint8)
    sel = idx.astype(np.uint64)
    for t, pos in enumerate(code.info_indices):
        u[:, pos] = ((sel >> np.uint64(code.K - 1 - t)) & np.uint64(1)).astype(np.uint8)
    return u, tie


# ---------------------------------------------------------------------------
# genie-aided segment error rates
# ---------------------------------------------------------------------------

def genie_segment_rates(
    code: PolarCode,
    spec: ChannelSpec,
    cfg: DecoderConfig,
    frames: int,
    seed: int,
    batch: int = 4096,
) -> tuple[SegmentErrorStats, SegmentErrorStats]:
    """Measure per-segment error rates under the genie condition.

    For every frame and every segment i, the decoder state is built from the
    *true* bits u_1^{iM}; the segment is then decoded once with bit-decision
    SC and once with the within-segment ML rule (the symbol decision), on the
    identical observation.  Each decoder's segment-i counts are conditioned
    on that decoder having decoded all earlier segments correctly (the same
    frames on which a real run would still carry a correct prefix), which is
    what makes 1 - prod(1 - p_i) reproduce its end-to-end FER in expectation.

    Returns (bit-decision stats, symbol-ML stats): the Monte Carlo estimates
    of p_i and p_i'.  Frame f draws its data and noise from split(seed, f).
    """
    cfg.validate_for(code)
    M = cfg.symbol_size
    S = code.N // M
    level = code.n - (M.bit_length() - 1)
    tables = _symbol_tables(code, M)
    info = code.info_mask
    err_sc = np.zeros(S, dtype=np.int64)
    err_ml = np.zeros(S, dtype=np.int64)
    trials_sc = np.zeros(S, dtype=np.int64)
    trials_ml = np.zeros(S, dtype=np.int64)
    done = 0
    while done < frames:
        B = min(batch, frames - done)
        u_true = np.zeros((B, code.N), dtype=np.uint8)
        llr = np.empty((B, code.N))
        for t in range(B):
            rng = frame_rng(seed, done + t)
            u_true[t, code.info_indices] = rng.integers(0, 2, code.K, dtype=np.uint8)
            llr[t] = transmit_array(spec, encode_array(code, u_true[t]), rng)
        eng = _Engine(code, B, cfg.f_rule)
        eng.reset(llr)
        ok_sc = np.ones(B, dtype=bool)   # all earlier segments correct, per decoder
        ok_ml = np.ones(B, dtype=bool)
        for j in range(S):
            seg = slice(j * M, (j + 1) * M)
            eng.descend(j * M, level)
            lam = eng.L[level].copy()
            table = tables[j]
            if table.count > 1:
                idx, _, _ = _scan_candidates(lam, table, need_gap=False)
                ml_bits = _candidate_bits(table.free, M, idx)
                ml_wrong = np.any(ml_bits != u_true[:, seg], axis=1)
            else:
                ml_wrong = np.zeros(B, dtype=bool)
            sc_wrong = np.zeros(B, dtype=bool)
            rec: list = []
            for t in range(M):
                i = j * M + t
                eng.descend(i, code.n)
                lam_i = eng.L[code.n][:, 0]
                b = (lam_i < 0).astype(np.uint8) if info[i] else np.zeros(B, dtype=np.uint8)
                sc_wrong |= b != u_true[:, i]
                eng.feed_leaf(i, b, record=rec)
            eng.undo(rec)
            for t in range(M):
                i = j * M + t
                eng.feed_leaf(i, u_true[:, i])
            trials_sc[j] += int(np.count_nonzero(ok_sc))
            trials_ml[j] += int(np.count_nonzero(ok_ml))
            err_sc[j] += int(np.count_nonzero(sc_wrong & ok_sc))
            err_ml[j] += int(np.count_nonzero(ml_wrong & ok_ml))
            ok_sc &= ~sc_wrong
            ok_ml &= ~ml_wrong
        done += B
    return SegmentErrorStats(trials_sc, err_sc), SegmentErrorStats(trials_ml, err_ml)
