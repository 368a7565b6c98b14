"""Independent oracles used by the test suite.

Everything here is deliberately written against the definitions, not against
the library code paths it checks: subset enumeration for longest valid
subsequences, a closed-form 1-d rejection rate, direct Gauss-Legendre
integration, and a plain Monte Carlo reflected walk.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def enumerate_longest(eps, t, start):
    """(max length, lex-min witness) by scanning every index subset.

    Scans lengths from n down; combinations() yields index tuples in lex
    order, so the first valid subset at the winning length is the lex-min.
    Witness indices are 1-based.
    """
    n = len(eps)
    for m in range(n, 0, -1):
        for combo in itertools.combinations(range(n), m):
            s = start
            ok = True
            for i in combo:
                s += eps[i]
                if s > t or s < -t:
                    ok = False
                    break
            if ok:
                return m, tuple(i + 1 for i in combo)
    return 0, ()


def exhaustive_longest_table(n, t, start):
    """enumerate_longest for all 2**n sign strings at once.

    String b has sign +1 at position i+1 iff bit i of b is set.  Returns
    (lengths, witnesses): an int array of shape (2**n,) and a list of
    1-based lex-min index tuples.  Subsets are still enumerated one by one;
    only the per-string validity check is vectorized.
    """
    count = 1 << n
    bits = (np.arange(count)[:, None] >> np.arange(n)) & 1
    signs = np.where(bits == 1, 1, -1).astype(np.int64)
    lengths = np.zeros(count, dtype=np.int64)
    witnesses = [()] * count
    unresolved = np.ones(count, dtype=bool)
    for m in range(n, 0, -1):
        if not unresolved.any():
            break
        for combo in itertools.combinations(range(n), m):
            prefix = start + np.cumsum(signs[:, combo], axis=1)
            valid = np.all(np.abs(prefix) <= t, axis=1)
            newly = valid & unresolved
            if newly.any():
                witness = tuple(i + 1 for i in combo)
                for b in np.nonzero(newly)[0]:
                    lengths[b] = m
                    witnesses[b] = witness
                unresolved &= ~valid
    return lengths, witnesses


def signs_of_bits(b, n):
    """Sign tuple encoded by integer b (bit i set -> +1 at position i+1)."""
    return tuple(1 if b & (1 << i) else -1 for i in range(n))


def closed_rejection_1d(t, v):
    """Closed-form stationary discard probability for the 1-d cube density.

    For the even unimodal density with CDF F, half the L1 distance between
    the density and its shift is F(|v|/2) - F(-|v|/2), which for this
    density is |v|/(2T) + sin(pi |v| / (2T)) / pi, capped at 1.
    """
    v = abs(float(v))
    if v >= 2.0 * t:
        return 1.0
    return v / (2.0 * t) + math.sin(math.pi * v / (2.0 * t)) / math.pi


def leggauss_integrate(fn, half_widths, nodes):
    """Tensor Gauss-Legendre integral of fn over the box, built from scratch."""
    half_widths = np.asarray(half_widths, dtype=float)
    base_x, base_w = np.polynomial.legendre.leggauss(nodes)
    grids = np.meshgrid(*[base_x * t for t in half_widths], indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=-1)
    weight = base_w * half_widths[0]
    for t in half_widths[1:]:
        weight = np.multiply.outer(weight, base_w * t)
    return float(np.sum(weight.reshape(-1) * fn(points)))


def mc_reflected_discards(t, n, trials, start, seed):
    """Monte Carlo discard count of the reflected +-1 walk, (mean, se)."""
    rng = np.random.default_rng(seed)
    pos = np.full(trials, int(start), dtype=np.int64)
    discards = np.zeros(trials, dtype=np.int64)
    for _ in range(n):
        move = rng.integers(0, 2, size=trials) * 2 - 1
        nxt = pos + move
        blocked = np.abs(nxt) > t
        discards += blocked
        pos = np.where(blocked, pos, nxt)
    mean = float(np.mean(discards))
    se = float(np.std(discards, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, se


def finite_difference_score(log_density, points, step):
    """Central finite differences of log_density, one row per point."""
    points = np.asarray(points, dtype=float)
    out = np.empty_like(points)
    for j in range(points.shape[1]):
        hi = points.copy()
        lo = points.copy()
        hi[:, j] += step
        lo[:, j] -= step
        out[:, j] = (np.asarray(log_density(hi)) - np.asarray(log_density(lo))) / (2.0 * step)
    return out
