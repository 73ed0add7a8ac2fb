"""Frozen/data pattern taxonomy: per-symbol D/F strings and tree-node rates.

Each M-bit symbol of a code gets a pattern string over {D, F} (D = data /
information bit, F = frozen bit) in transmission order.  A pattern is DP-I
when it has no D at all, or no F after the first D; only M+1 such strings
exist per length M.  The remaining patterns are DP-II: their symbol decoder
can exploit frozen bits that come after data bits inside the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PolarCode
from .decoders import ConfigError

__all__ = [
    "SymbolPattern",
    "TreeNodeClass",
    "pattern_class",
    "classify_patterns",
    "count_dp2",
    "classify_tree",
]


@dataclass(frozen=True)
class SymbolPattern:
    """One symbol's D/F string and its class ("DP-I" or "DP-II")."""

    symbol_index: int
    pattern: str
    dp_class: str


@dataclass(frozen=True)
class TreeNodeClass:
    """Rate class of one node of the code's full binary tree.

    ``level`` 0 is the root, ``n`` the leaves (position j at level l covers
    leaves [j * 2**(n-l), (j+1) * 2**(n-l))).  Classes: "rate-0" (all
    descendant leaves frozen), "rate-1" (all information), "rate-R" (mixed).
    """

    level: int
    position: int
    rate_class: str


def pattern_class(pattern: str) -> str:
    """Classify a D/F string: DP-I iff no 'D', or no 'F' after the first 'D'."""
    if any(c not in "DF" for c in pattern):
        raise ValueError(f"pattern must be over {{D, F}}, got {pattern!r}")
    first_d = pattern.find("D")
    if first_d < 0 or "F" not in pattern[first_d:]:
        return "DP-I"
    return "DP-II"


def classify_patterns(code: PolarCode, M: int) -> list[SymbolPattern]:
    """Patterns of all N/M symbols, in transmission order u_{jM+1}..u_{jM+M}."""
    if M < 1 or code.N % M:
        raise ConfigError(f"symbol size {M} does not divide N={code.N}")
    mask = code.info_mask
    out = []
    for j in range(code.N // M):
        seg = mask[j * M:(j + 1) * M]
        pat = "".join("D" if b else "F" for b in seg)
        out.append(SymbolPattern(symbol_index=j, pattern=pat, dp_class=pattern_class(pat)))
    return out


def count_dp2(code: PolarCode, M: int) -> tuple[int, int]:
    """(number of DP-II symbols, total symbols) for symbol size M."""
    pats = classify_patterns(code, M)
    return sum(p.dp_class == "DP-II" for p in pats), len(pats)


def classify_tree(code: PolarCode) -> list[TreeNodeClass]:
    """Rate classes for all 2N-1 nodes of the code's full binary tree.

    Leaves are the data positions in transmission order; a parent is rate-0 /
    rate-1 iff both children are, otherwise rate-R.
    """
    by_level: list[np.ndarray] = [None] * (code.n + 1)  # type: ignore[list-item]
    # leaf classes: 1 = rate-1, 0 = rate-0, 2 = rate-R
    cls = code.info_mask.astype(np.int8)
    by_level[code.n] = cls
    for level in range(code.n - 1, -1, -1):
        left, right = cls[0::2], cls[1::2]
        cls = np.where((left == right) & (left != 2), left, 2).astype(np.int8)
        by_level[level] = cls
    names = {0: "rate-0", 1: "rate-1", 2: "rate-R"}
    out = []
    for level in range(code.n + 1):
        for pos, c in enumerate(by_level[level]):
            out.append(TreeNodeClass(level=level, position=pos, rate_class=names[int(c)]))
    return out
