"""Channel models (BEC, BPSK-AWGN) producing per-position LLR observations.

LLR convention, fixed project-wide: llr_i = log Pr(y_i | x_i = 0) / Pr(y_i | x_i = 1),
so positive means "0 more likely".  BEC outputs live in {+inf, -inf, 0} with 0
encoding an erasure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InputError, ParameterError

__all__ = ["ChannelSpec", "ChannelObservation", "transmit", "frame_rng"]


@dataclass(frozen=True)
class ChannelSpec:
    """Channel kind plus its single parameter.

    ``param`` is the erasure probability for ``bec`` and Eb/N0 in dB for
    ``awgn``; ``rate`` (K/N) converts Eb/N0 to the BPSK noise variance
    sigma^2 = 1 / (2 R 10^(EbN0/10)).
    """

    kind: str
    param: float
    rate: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind == "bec":
            if not (0.0 <= self.param <= 1.0):
                raise ParameterError(f"erasure probability must be in [0, 1], got {self.param}")
        elif kind == "awgn":
            if self.rate is None or not (0.0 < self.rate <= 1.0):
                raise ParameterError("awgn channel needs a code rate in (0, 1] to scale Eb/N0")
        else:
            raise ParameterError(f"unknown channel kind {self.kind!r}")

    @property
    def noise_variance(self) -> float:
        if self.kind != "awgn":
            raise ParameterError("noise variance only defined for the awgn channel")
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.param / 10.0))


@dataclass(frozen=True)
class ChannelObservation:
    """Length-N soft observation; +-inf allowed (BEC certainty), 0 = erasure."""

    llr: np.ndarray

    def __post_init__(self):
        llr = np.asarray(self.llr, dtype=np.float64)
        if llr.ndim != 1:
            raise InputError("observation must be a 1-D LLR vector")
        llr.setflags(write=False)
        object.__setattr__(self, "llr", llr)

    def __len__(self) -> int:
        return self.llr.size


def frame_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Deterministic per-frame generator: split(master_seed, *path).

    The same (seed, path) yields the same stream regardless of how frames are
    batched across workers, which is what keeps paired-decoder comparisons on
    identical noise realizations.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(path)))


def transmit_array(spec: ChannelSpec, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Pass codeword bits (..., N) through the channel; returns LLRs (..., N).

    Draw order is fixed (one uniform or one normal per position, in position
    order) so a given generator state maps to exactly one observation.
    """
    x = np.asarray(x, dtype=np.uint8)
    if spec.kind == "bec":
        llr = np.where(x == 0, np.inf, -np.inf)
        erased = rng.random(x.shape) < spec.param
        return np.where(erased, 0.0, llr)
    sigma2 = spec.noise_variance
    s = 1.0 - 2.0 * x.astype(np.float64)
    y = s + rng.standard_normal(x.shape) * np.sqrt(sigma2)
    return 2.0 * y / sigma2


def transmit(spec: ChannelSpec, x, rng_seed: int | np.random.Generator) -> ChannelObservation:
    """Transmit one codeword; deterministic for a fixed seed.

    ``x`` may be a codeword-role :class:`~sdsc.core.BitBlock` or a plain
    0/1 array.  ``rng_seed`` is a 64-bit integer (or an existing Generator).
    """
    bits = getattr(x, "bits", x)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return ChannelObservation(transmit_array(spec, np.asarray(bits), rng))
