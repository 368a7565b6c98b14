"""Exact one-dimensional machinery for unit-step walks in a band.

Given a sign string and an integer band radius T, the greedy reflected walk
keeps exactly the steps it can take without leaving [-T, T].  Its kept index
set is the longest valid subsequence, and the lexicographically smallest
one at that.  Both claims are checked here by brute force on small inputs,
and the walk's discard count is computed in closed form via its Markov chain
(exact rational arithmetic while the state space is small).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

__all__ = [
    "ValidSubsequence",
    "signs_from_string",
    "reflected_walk",
    "dp_longest_valid",
    "verify_lex_optimality",
    "verify_start_shift",
    "reflected_kernel_matrix",
    "exact_chain_expectation",
    "exact_chain_expectation_fraction",
]

_DP_LIMIT = 30
_ENUM_LIMIT = 14
_RATIONAL_STATE_LIMIT = 65  # states 2T+1 beyond which the chain runs in floats

StartDistribution = Union[str, int, Sequence]


@dataclass(frozen=True)
class ValidSubsequence:
    """Kept step indices (1-based, increasing) for a given start height."""

    indices: tuple[int, ...]
    start: int

    def __len__(self) -> int:
        return len(self.indices)

    def is_valid_for(self, signs: Sequence[int], half_width: int) -> bool:
        s = self.start
        for i in self.indices:
            s += signs[i - 1]
            if abs(s) > half_width:
                return False
        return True


def signs_from_string(text: str) -> tuple[int, ...]:
    """Parse a +- string like '+-++' into a sign tuple."""
    table = {"+": 1, "-": -1}
    try:
        return tuple(table[c] for c in text)
    except KeyError:
        raise ValueError(f"sign string may only contain + and -: {text!r}") from None


def _check_band(half_width: int, start: int) -> tuple[int, int]:
    t = int(half_width)
    s = int(start)
    if t < 0:
        raise ValueError("half_width must be a nonnegative integer")
    if abs(s) > t:
        raise ValueError(f"start {s} outside band [-{t}, {t}]")
    return t, s


def _check_signs(signs: Sequence[int]) -> tuple[int, ...]:
    eps = tuple(int(e) for e in signs)
    if any(e not in (-1, 1) for e in eps):
        raise ValueError("signs must be +1 or -1")
    return eps


def reflected_walk(signs: Sequence[int], half_width: int, start: int = 0) -> ValidSubsequence:
    """Greedily keep each step that stays in the band (ties kept)."""
    t, s = _check_band(half_width, start)
    eps = _check_signs(signs)
    kept = []
    height = s
    for k, e in enumerate(eps, start=1):
        if abs(height + e) <= t:
            height += e
            kept.append(k)
    return ValidSubsequence(tuple(kept), s)


def dp_longest_valid(signs: Sequence[int], half_width: int, start: int = 0) -> int:
    """Length of the longest band-valid subsequence, by DP over heights."""
    t, s = _check_band(half_width, start)
    eps = _check_signs(signs)
    if len(eps) > _DP_LIMIT:
        raise ValueError(f"dp_longest_valid is limited to n <= {_DP_LIMIT}")
    width = 2 * t + 1
    best = [-1] * width
    best[s + t] = 0
    for e in eps:
        nxt = best.copy()
        for h in range(width):
            if best[h] < 0:
                continue
            h2 = h + e
            if 0 <= h2 < width and best[h] + 1 > nxt[h2]:
                nxt[h2] = best[h] + 1
        best = nxt
    return max(best)


def _subsequence_valid(eps: tuple[int, ...], combo: tuple[int, ...], t: int, s: int) -> bool:
    height = s
    for i in combo:
        height += eps[i]
        if height > t or height < -t:
            return False
    return True


def _enumerate_longest_lexmin(
    eps: tuple[int, ...], t: int, s: int
) -> tuple[int, tuple[int, ...]]:
    """Longest length and lex-smallest witness, by scanning every subset.

    combinations() yields index tuples in lexicographic order, so within a
    length the first valid one is the lex-minimum.
    """
    n = len(eps)
    for m in range(n, 0, -1):
        for combo in itertools.combinations(range(n), m):
            if _subsequence_valid(eps, combo, t, s):
                return m, tuple(i + 1 for i in combo)
    return 0, ()


def verify_lex_optimality(signs: Sequence[int], half_width: int, start: int = 0) -> bool:
    """True iff the reflected walk is a longest valid subsequence and the
    lexicographically smallest one, against exhaustive enumeration."""
    t, s = _check_band(half_width, start)
    eps = _check_signs(signs)
    if len(eps) > _ENUM_LIMIT:
        raise ValueError(f"verify_lex_optimality is limited to n <= {_ENUM_LIMIT}")
    walk = reflected_walk(eps, t, s)
    length, lexmin = _enumerate_longest_lexmin(eps, t, s)
    return len(walk.indices) == length and walk.indices == lexmin


def verify_start_shift(signs: Sequence[int], half_width: int, start: int) -> bool:
    """True iff longest-from-0 <= longest-from-start + |start| (via DP)."""
    t, s = _check_band(half_width, start)
    eps = _check_signs(signs)
    if len(eps) > _ENUM_LIMIT:
        raise ValueError(f"verify_start_shift is limited to n <= {_ENUM_LIMIT}")
    return dp_longest_valid(eps, t, 0) <= dp_longest_valid(eps, t, s) + abs(s)


def reflected_kernel_matrix(half_width: int) -> list[list[Fraction]]:
    """Row-stochastic transition matrix of the reflected walk on [-T, T].

    Row i is the state i - T; a blocked half-step keeps the walk in place,
    so the uniform distribution is exactly stationary.
    """
    t, _ = _check_band(half_width, 0)
    width = 2 * t + 1
    half = Fraction(1, 2)
    kernel = [[Fraction(0)] * width for _ in range(width)]
    for i in range(width):
        for move in (-1, 1):
            j = i + move
            if 0 <= j < width:
                kernel[i][j] += half
            else:
                kernel[i][i] += half
    return kernel


def _start_weights(start: StartDistribution, width: int, t: int) -> tuple[list[int], int]:
    """Integer weights and their common denominator for the start law."""
    if isinstance(start, str):
        if start != "uniform":
            raise ValueError(f"unknown start distribution {start!r}")
        return [1] * width, width
    if isinstance(start, (int, np.integer)):
        s = int(start)
        if abs(s) > t:
            raise ValueError(f"start {s} outside band [-{t}, {t}]")
        weights = [0] * width
        weights[s + t] = 1
        return weights, 1
    probs = [Fraction(p) for p in start]
    if len(probs) != width:
        raise ValueError(f"start vector must have {width} entries")
    if any(p < 0 for p in probs) or sum(probs) != 1:
        raise ValueError("start vector must be a probability distribution")
    denom = 1
    for p in probs:
        denom = denom * p.denominator // math.gcd(denom, p.denominator)
    return [int(p * denom) for p in probs], denom


def exact_chain_expectation_fraction(
    half_width: int, n_steps: int, start: StartDistribution = "uniform"
) -> Fraction:
    """Exact expected discard count over n steps of the reflected walk.

    Evolves integer state weights over an implicit denominator 2^k, so no
    per-step rational normalization is needed.  Limited to 2T+1 <= 65
    states; beyond that use exact_chain_expectation.
    """
    t, _ = _check_band(half_width, 0)
    n = int(n_steps)
    if n < 0:
        raise ValueError("n_steps must be nonnegative")
    width = 2 * t + 1
    if width > _RATIONAL_STATE_LIMIT:
        raise ValueError(f"rational arithmetic is limited to {_RATIONAL_STATE_LIMIT} states")
    weights, denom = _start_weights(start, width, t)
    # expected discards at step k: (w_top + w_bottom) / (2 * denom * 2^k);
    # acc accumulates sum_k c_k * 2^(n-1-k) so one division happens at the end
    acc = 0
    for _ in range(n):
        acc = (acc << 1) + weights[0] + weights[-1]
        nxt = [0] * width
        for j in range(width):
            wj = weights[j]
            if j > 0:
                nxt[j - 1] += wj
            else:
                nxt[j] += wj
            if j < width - 1:
                nxt[j + 1] += wj
            else:
                nxt[j] += wj
        weights = nxt
    if n == 0:
        return Fraction(0)
    return Fraction(acc, denom << n)


def exact_chain_expectation(
    half_width: int, n_steps: int, start: StartDistribution = "uniform"
) -> float:
    """Expected discard count; exact rationals while 2T+1 <= 65, else float64."""
    t, _ = _check_band(half_width, 0)
    width = 2 * t + 1
    if width <= _RATIONAL_STATE_LIMIT:
        return float(exact_chain_expectation_fraction(t, n_steps, start))
    n = int(n_steps)
    if n < 0:
        raise ValueError("n_steps must be nonnegative")
    if isinstance(start, str):
        if start != "uniform":
            raise ValueError(f"unknown start distribution {start!r}")
        probs = np.full(width, 1.0 / width)
    elif isinstance(start, (int, np.integer)):
        s = int(start)
        if abs(s) > t:
            raise ValueError(f"start {s} outside band [-{t}, {t}]")
        probs = np.zeros(width)
        probs[s + t] = 1.0
    else:
        probs = np.asarray(start, dtype=float)
        if probs.shape != (width,) or np.any(probs < 0.0):
            raise ValueError("start vector must be a probability distribution")
    expected = 0.0
    for _ in range(n):
        expected += 0.5 * (probs[0] + probs[-1])
        nxt = np.zeros(width)
        nxt[:-1] += 0.5 * probs[1:]
        nxt[1:] += 0.5 * probs[:-1]
        nxt[0] += 0.5 * probs[0]
        nxt[-1] += 0.5 * probs[-1]
        probs = nxt
    return float(expected)
