"""Independent reference implementations used only as test oracles.

Nothing here shares code with the package's decoders: encoding goes through
an explicit generator matrix, decision likelihoods through exhaustive suffix
sums, and the reference SC decoder through a recursive probability-pair
formulation.
"""

from __future__ import annotations

import itertools

import numpy as np


def bitrev_indices(n: int) -> np.ndarray:
    N = 1 << n
    out = np.zeros(N, dtype=np.int64)
    for i in range(N):
        b = 0
        for k in range(n):
            b = (b << 1) | ((i >> k) & 1)
        out[i] = b
    return out


def generator_matrix(n: int) -> np.ndarray:
    """Explicit B_N F^{kron n} over GF(2), built from the Kronecker definition."""
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    G = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        G = np.kron(G, F)
    N = 1 << n
    B = np.zeros((N, N), dtype=np.uint8)
    for i, j in enumerate(bitrev_indices(n)):
        B[i, j] = 1
    return (B @ G) % 2


def encode_ref(u: np.ndarray, n: int) -> np.ndarray:
    return (np.asarray(u, dtype=np.uint8) @ generator_matrix(n)) % 2


def _position_probs(llr: np.ndarray) -> np.ndarray:
    """p[b, i] proportional to Pr(y_i | x_i = b); exact dyadics on the BEC."""
    with np.errstate(over="ignore"):
        p0 = 1.0 / (1.0 + np.exp(-np.asarray(llr, dtype=np.float64)))
    return np.stack([p0, 1.0 - p0])


def brute_decision_llr(llr: np.ndarray, prefix) -> float:
    """Eq.-2 decision LLR by summing Pr(y, prefix, u_j) over all suffixes.

    Future bits (including future frozen bits) are marginalized uniformly.
    Returns log(P0 / P1); 0/0 (an impossible prefix) comes back as NaN.
    """
    llr = np.asarray(llr, dtype=np.float64)
    N = llr.size
    n = N.bit_length() - 1
    G = generator_matrix(n)
    p = _position_probs(llr)
    j = len(prefix)
    tot = [0.0, 0.0]
    cols = np.arange(N)
    for b in (0, 1):
        for suf in itertools.product((0, 1), repeat=N - j - 1):
            u = np.array(list(prefix) + [b] + list(suf), dtype=np.uint8)
            x = (u @ G) % 2
            tot[b] += float(np.prod(p[x, cols]))
    if tot[0] == 0.0 and tot[1] == 0.0:
        return float("nan")
    with np.errstate(divide="ignore"):
        return float(np.log(tot[0]) - np.log(tot[1]))


def brute_symbol_argmax(code, llr: np.ndarray, prefix, M: int):
    """Eq.-3 argmax set for the symbol starting at len(prefix).

    Enumerates every candidate assignment of the symbol's free bits (frozen
    pinned to 0) and sums Pr(y, prefix, candidate, suffix) over all uniform
    suffixes.  Returns (list of candidate M-bit tuples attaining the maximum,
    max probability).
    """
    llr = np.asarray(llr, dtype=np.float64)
    N = llr.size
    n = N.bit_length() - 1
    G = generator_matrix(n)
    p = _position_probs(llr)
    cols = np.arange(N)
    lo = len(prefix)
    free = [i for i in range(lo, lo + M) if code.info_mask[i]]
    best = -1.0
    arg: list[tuple[int, ...]] = []
    for bits in itertools.product((0, 1), repeat=len(free)):
        cand = np.zeros(M, dtype=np.uint8)
        for pos, b in zip(free, bits):
            cand[pos - lo] = b
        tot = 0.0
        for suf in itertools.product((0, 1), repeat=N - lo - M):
            u = np.array(list(prefix) + list(cand) + list(suf), dtype=np.uint8)
            x = (u @ G) % 2
            tot += float(np.prod(p[x, cols]))
        if tot > best:
            best, arg = tot, [tuple(int(v) for v in cand)]
        elif tot == best:
            arg.append(tuple(int(v) for v in cand))
    return arg, best


def brute_symbol_trajectory(code, llr: np.ndarray, M: int):
    """Full Eq.-3 decode trajectory with lexicographic-min tie-break.

    Returns (u_hat, argmax sets per symbol).  Candidates enumerate in
    lexicographic order, so the committed candidate is min(argmax set).
    """
    N = code.N
    u_hat: list[int] = []
    sets = []
    for j in range(N // M):
        arg, _ = brute_symbol_argmax(code, llr, u_hat, M)
        sets.append(arg)
        u_hat.extend(min(arg))
    return np.array(u_hat, dtype=np.uint8), sets


def ml_argmax_set(code, llr: np.ndarray):
    """All data words maximizing the channel likelihood of their codeword."""
    llr = np.asarray(llr, dtype=np.float64)
    N, K = code.N, code.K
    G = generator_matrix(code.n)
    p = _position_probs(llr)
    cols = np.arange(N)
    info = [i - 1 for i in code.info_set]
    best = -1.0
    arg: list[tuple[int, ...]] = []
    for bits in itertools.product((0, 1), repeat=K):
        u = np.zeros(N, dtype=np.uint8)
        u[info] = bits
        x = (u @ G) % 2
        pr = float(np.prod(p[x, cols]))
        if pr > best:
            best, arg = pr, [tuple(int(v) for v in u)]
        elif pr == best:
            arg.append(tuple(int(v) for v in u))
    return arg, best


class ProbDomainSC:
    """Recursive probability-pair SC decoder (independent of the package).

    Works on unnormalized pair vectors P[i] = (P(x_i = 0), P(x_i = 1)); a
    (0, 0) pair (a prefix of zero posterior) is replaced by the uninformative
    (1, 1), mirroring the package's choice of LLR 0 for opposing certainties.
    On the BEC all quantities are exact dyadic floats, so decisions and tie
    flags are exact.
    """

    def __init__(self, code):
        self.code = code

    def decode(self, llr: np.ndarray):
        p = _position_probs(llr).T.copy()  # (N, 2)
        self._bits: list[int] = []
        self._ties: list[bool] = []
        self._next = 0
        self._rec(p)
        return np.array(self._bits, dtype=np.uint8), np.array(self._ties)

    def _rec(self, p: np.ndarray) -> np.ndarray:
        L = p.shape[0]
        if L == 1:
            i = self._next
            q = p[0]
            if self.code.info_mask[i]:
                if q[0] == q[1]:
                    bit, tie = 0, True
                else:
                    bit, tie = int(q[1] > q[0]), False
            else:
                bit, tie = 0, False
            self._bits.append(bit)
            self._ties.append(tie)
            self._next += 1
            return np.array([bit], dtype=np.uint8)
        a, b = p[0::2], p[1::2]
        upper = np.empty((L // 2, 2))
        upper[:, 0] = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
        upper[:, 1] = a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0]
        upper = self._norm(upper)
        cw_left = self._rec(upper)
        lower = np.empty((L // 2, 2))
        c = cw_left.astype(np.int64)
        lower[:, 0] = a[np.arange(L // 2), c] * b[:, 0]
        lower[:, 1] = a[np.arange(L // 2), 1 - c] * b[:, 1]
        lower = self._norm(lower)
        cw_right = self._rec(lower)
        out = np.empty(L, dtype=np.uint8)
        out[0::2] = cw_left ^ cw_right
        out[1::2] = cw_right
        return out

    @staticmethod
    def _norm(p: np.ndarray) -> np.ndarray:
        dead = (p[:, 0] == 0.0) & (p[:, 1] == 0.0)
        if dead.any():
            p[dead] = 1.0
        m = p.max(axis=1, keepdims=True)
        np.divide(p, m, out=p, where=m > 0)
        return p
