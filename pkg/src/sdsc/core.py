"""Polar code representation, frozen-set construction, and encoding.

Block length is N = 2**n.  The encoder maps a data word u (length N, frozen
positions zero) to the codeword x = u B_N F^{kron n} over GF(2), where B_N is
the bit-reversal permutation and F = [[1, 0], [1, 1]].  Public interfaces are
1-based (u_1 .. u_N); internal arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "ParameterError",
    "InputError",
    "PolarCode",
    "BitBlock",
    "bit_reversal_permutation",
    "construct",
    "encode",
    "polar_transform",
    "make_code",
    "save_code",
    "load_code",
]


class ParameterError(ValueError):
    """Invalid code or construction parameters."""


class InputError(ValueError):
    """Malformed operation input (wrong length, nonzero frozen bits, ...)."""


def _bitrev_indices(n: int) -> np.ndarray:
    """0-based bit-reversal index map for block length 2**n."""
    N = 1 << n
    idx = np.zeros(N, dtype=np.int64)
    for i in range(N):
        b = 0
        for k in range(n):
            b = (b << 1) | ((i >> k) & 1)
        idx[i] = b
    idx.setflags(write=False)
    return idx


def bit_reversal_permutation(n: int) -> tuple[int, ...]:
    """Return the bit-reversal permutation of 1..2**n (1-based, an involution).

    Index i maps to the index whose n-bit binary representation is reversed,
    e.g. n=2 gives (1, 3, 2, 4).
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    return tuple(int(v) + 1 for v in _bitrev_indices(n))


def polar_transform(v: np.ndarray) -> np.ndarray:
    """Apply F^{kron n} over GF(2) to the last axis of ``v`` (butterfly form).

    ``v`` must have a power-of-two last dimension.  Does not include the
    bit-reversal permutation; see :func:`encode` for the full Eq.-1 map.
    """
    v = np.asarray(v)
    x = v.astype(np.uint8, copy=True)
    L = x.shape[-1]
    if L & (L - 1):
        raise InputError(f"length must be a power of two, got {L}")
    lead = x.shape[:-1]
    size = L
    while size > 1:
        half = size // 2
        x3 = x.reshape(*lead, L // size, size)
        x3[..., :half] ^= x3[..., half:]
        size = half
    return x


@dataclass(frozen=True, eq=False)
class BitBlock:
    """A binary vector with a role tag.

    Roles: ``data-u`` (length N, zero on frozen positions), ``codeword-x``
    (length N), ``estimate-u`` (decoder output, length N).
    """

    bits: np.ndarray
    role: str = "data-u"

    _ROLES = ("data-u", "codeword-x", "estimate-u")

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise InputError("BitBlock expects a 1-D bit vector")
        if bits.size and bits.max() > 1:
            raise InputError("BitBlock entries must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        if self.role not in self._ROLES:
            raise InputError(f"unknown role {self.role!r}")

    def __len__(self) -> int:
        return self.bits.size


@dataclass(frozen=True, eq=False)
class PolarCode:
    """An (N, K) polar code: frozen layout plus construction reliabilities.

    Instances are immutable and compared by identity; enumeration tables are
    cached per instance, so reuse one object across decoders and workers.

    Attributes
    ----------
    n : int
        Block-length exponent, N = 2**n.
    N, K : int
        Block length and information length in bits.
    info_set : tuple of int
        Sorted 1-based information indices (the K most reliable positions).
    frozen_set : tuple of int
        Sorted 1-based frozen indices, the complement of ``info_set``.
    reliabilities : ndarray
        Per-position Bhattacharyya parameter z_i in [0, 1]; lower is better.
        Entry ``reliabilities[i - 1]`` belongs to u_i.
    channel_kind, design_param :
        Construction design point, recorded for reproducibility.
    """

    n: int
    N: int
    K: int
    info_set: tuple[int, ...]
    frozen_set: tuple[int, ...]
    reliabilities: np.ndarray
    channel_kind: str = "bec"
    design_param: float = 0.5

    def __post_init__(self):
        z = np.asarray(self.reliabilities, dtype=np.float64)
        z.setflags(write=False)
        object.__setattr__(self, "reliabilities", z)
        if self.N != 1 << self.n:
            raise ParameterError("N must equal 2**n")
        if not (0 <= self.K <= self.N):
            raise ParameterError("K must satisfy 0 <= K <= N")
        info = set(self.info_set)
        froz = set(self.frozen_set)
        if len(info) != self.K or info | froz != set(range(1, self.N + 1)) or info & froz:
            raise ParameterError("info_set/frozen_set must partition 1..N with |A| = K")

    @cached_property
    def info_mask(self) -> np.ndarray:
        """0-based boolean mask, True at information positions."""
        m = np.zeros(self.N, dtype=bool)
        m[[i - 1 for i in self.info_set]] = True
        m.setflags(write=False)
        return m

    @cached_property
    def info_indices(self) -> np.ndarray:
        """0-based information indices, ascending."""
        idx = np.flatnonzero(self.info_mask)
        idx.setflags(write=False)
        return idx

    @property
    def rate(self) -> float:
        return self.K / self.N


def _bhattacharyya(n: int, z0: float) -> np.ndarray:
    """n steps of the Bhattacharyya recursion z- = 2z - z^2, z+ = z^2.

    The interleaved layout (z-, z+ at even/odd children) yields z_i for u_i
    under the Eq.-1 encoder with its bit-reversal permutation.
    """
    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def construct(n: int, K: int, channel_kind: str = "bec", design_param: float = 0.5) -> PolarCode:
    """Construct an (2**n, K) polar code by the Bhattacharyya recursion.

    Parameters
    ----------
    n : int
        Block-length exponent (N = 2**n).
    K : int
        Number of information bits, 0 <= K <= N.
    channel_kind : {"bec", "awgn"}
        Design channel.  BEC uses the exact recursion from z = eps; AWGN
        seeds the same recursion with z = exp(-Es/N0) as a heuristic.
    design_param : float
        Design erasure probability eps in (0, 1) for BEC, or design Es/N0
        (linear, > 0) for AWGN.

    Returns
    -------
    PolarCode
        The information set holds the K indices with smallest z, ties broken
        by smaller index.  Deterministic for fixed inputs.
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    N = 1 << n
    if not (0 <= K <= N):
        raise ParameterError(f"K must satisfy 0 <= K <= {N}, got {K}")
    kind = channel_kind.lower()
    if kind == "bec":
        if not (0.0 < design_param < 1.0):
            raise ParameterError(f"BEC design erasure probability must be in (0, 1), got {design_param}")
        z0 = float(design_param)
    elif kind == "awgn":
        if design_param <= 0.0:
            raise ParameterError(f"AWGN design Es/N0 must be positive, got {design_param}")
        z0 = float(np.exp(-design_param))
    else:
        raise ParameterError(f"unknown channel kind {channel_kind!r}")

    z = _bhattacharyya(n, z0)
    # K smallest z; lexsort's secondary key (position) breaks ties low-index-first
    order = np.lexsort((np.arange(N), z))
    chosen = np.sort(order[:K])
    info = tuple(int(i) + 1 for i in chosen)
    info_as_set = set(info)
    frozen = tuple(i for i in range(1, N + 1) if i not in info_as_set)
    return PolarCode(
        n=n, N=N, K=K, info_set=info, frozen_set=frozen,
        reliabilities=z, channel_kind=kind, design_param=float(design_param),
    )


def encode_array(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Encode data bits (..., N) -> codewords (..., N), frozen-zero enforced."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != code.N:
        raise InputError(f"data word length must be {code.N}, got {u.shape[-1]}")
    if u.size and u.max() > 1:
        raise InputError("data word entries must be 0 or 1")
    if np.any(u[..., ~code.info_mask]):
        raise InputError("frozen positions must be zero in the data word")
    return polar_transform(u[..., _bitrev_indices(code.n)])


def encode(code: PolarCode, u: BitBlock) -> BitBlock:
    """Encode a data-u block to its codeword per x = u B_N F^{kron n}.

    O(N log N) butterfly; bit-exact equal to the explicit matrix product.
    """
    if u.role != "data-u":
        raise InputError(f"encode expects a data-u block, got role {u.role!r}")
    return BitBlock(encode_array(code, u.bits), role="codeword-x")


def make_code(N: int, info_set) -> PolarCode:
    """Build a code from an explicit layout (N plus sorted 1-based info set).

    No reliability scores are attached (the vector is NaN); the result is
    fully usable for encoding, decoding, and pattern analysis.
    """
    if N <= 0 or N & (N - 1):
        raise InputError(f"N must be a power of two, got {N}")
    info = tuple(int(i) for i in info_set)
    if any(not (1 <= i <= N) for i in info) or sorted(set(info)) != list(info):
        raise InputError("info set must be sorted, distinct, 1-based indices within 1..N")
    info_as_set = set(info)
    frozen = tuple(i for i in range(1, N + 1) if i not in info_as_set)
    return PolarCode(n=N.bit_length() - 1, N=N, K=len(info), info_set=info,
                     frozen_set=frozen, reliabilities=np.full(N, np.nan))


def save_code(code: PolarCode, path: str | Path) -> None:
    """Write the two-line text description: ``N K`` then the sorted info set."""
    lines = [f"{code.N} {code.K}", " ".join(str(i) for i in code.info_set)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_code(path: str | Path) -> PolarCode:
    """Read a code description written by :func:`save_code`."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise InputError(f"{path}: empty code file")
    head = text[0].split()
    if len(head) != 2:
        raise InputError(f"{path}: first line must be 'N K'")
    try:
        N, K = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InputError(f"{path}: first line must be 'N K'") from exc
    info = tuple(int(t) for t in text[1].split()) if len(text) > 1 else ()
    if len(info) != K:
        raise InputError(f"{path}: expected {K} info indices, found {len(info)}")
    try:
        return make_code(N, info)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc
