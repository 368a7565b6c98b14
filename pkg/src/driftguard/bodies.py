"""Axis-aligned boxes, stationary densities on them, and Fisher information.

The central density here is the squared ground-state eigenfunction of the
Dirichlet Laplacian on a box, which factorizes per coordinate as

    x -> T**-1 * cos(pi * x / (2 T))**2       on (-T, T).

Its Fisher information matrix (the covariance of the log-density gradient)
is available three ways: in closed form for cubes, by tensor-product
Gauss-Legendre quadrature for d <= 3, and by Monte Carlo in any dimension.
The trace of that matrix equals four times the principal Dirichlet
eigenvalue of the box, which is what ties step budgets to the geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "Box",
    "Density",
    "FisherMatrix",
    "cube_eigen_density",
    "dirichlet_lambda1_box",
    "fisher_closed_form_cube",
    "fisher_quadrature",
    "fisher_monte_carlo",
    "direction_information",
    "fisher_operator_norm",
    "gauss_legendre_grid",
]

# Sampler bisection width and the tolerance for declaring a matrix symmetric.
_CDF_BISECTION_WIDTH = 1e-12
_SYMMETRY_TOL = 1e-12
_PSD_FLOOR = -1e-9

ArrayLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box prod_i [-T_i, T_i] centered at the origin."""

    half_widths: np.ndarray

    def __post_init__(self) -> None:
        hw = np.asarray(self.half_widths, dtype=float)
        if hw.ndim != 1 or hw.size < 1:
            raise ValueError("half_widths must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(hw)) or np.any(hw <= 0.0):
            raise ValueError("half_widths must be finite and strictly positive")
        hw = hw.copy()
        hw.setflags(write=False)
        object.__setattr__(self, "half_widths", hw)

    @classmethod
    def cube(cls, dimension: int, half_width: float) -> "Box":
        if dimension < 1:
            raise ValueError("dimension must be at least 1")
        return cls(np.full(int(dimension), float(half_width)))

    @property
    def dimension(self) -> int:
        return int(self.half_widths.size)

    @property
    def is_cube(self) -> bool:
        return bool(np.all(self.half_widths == self.half_widths[0]))

    def contains_interior(self, points: ArrayLike) -> np.ndarray:
        """Strict interior test, vectorized over leading axes of ``points``."""
        x = np.asarray(points, dtype=float)
        return np.all(np.abs(x) < self.half_widths, axis=-1)

    def contains_scaled(self, points: ArrayLike, scale: float, tol: float = 0.0) -> np.ndarray:
        """Non-strict membership in the scaled box, slack ``tol`` per axis unit."""
        x = np.asarray(points, dtype=float)
        limit = scale * self.half_widths + tol * self.half_widths
        return np.all(np.abs(x) <= limit, axis=-1)


@dataclass(frozen=True)
class Density:
    """Probability density supported in the open interior of a box.

    ``log_density`` accepts arrays of shape (..., d) and returns (...,)
    log-values, -inf outside the open support.  ``log_gradient`` is only
    defined on interior points.  ``coordinate_cdf`` is present for
    product-form densities and maps (axis, x) to the marginal CDF.
    """

    dimension: int
    support: Box
    log_density: Callable[[ArrayLike], Union[float, np.ndarray]]
    log_gradient: Callable[[ArrayLike], np.ndarray]
    sampler: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    coordinate_cdf: Optional[Callable[[int, ArrayLike], np.ndarray]] = None

    def sample(self, rng: np.random.Generator, n: Optional[int] = None) -> np.ndarray:
        """Draw one point (shape (d,)) or ``n`` points (shape (n, d))."""
        pts = self.sampler(rng, 1 if n is None else int(n))
        return pts[0] if n is None else pts


def cube_eigen_density(box: Box) -> Density:
    """Squared Dirichlet ground-state density on ``box``.

    pi(x) = prod_i T_i**-1 * cos(pi x_i / (2 T_i))**2, with log-gradient
    component -(pi / T_i) * tan(pi x_i / (2 T_i)).  Sampling inverts the
    per-coordinate CDF

        F_i(x) = x / (2 T_i) + 1/2 + sin(pi x / T_i) / (2 pi)

    by bisection to width 1e-12, so samples are strictly interior.
    """
    hw = box.half_widths
    d = box.dimension
    half_freq = np.pi / (2.0 * hw)  # pi / (2 T_i) per axis
    log_norm = float(-np.sum(np.log(hw)))
    # enough halvings to shrink (-T, T) below the target width on every axis
    bisect_iters = int(np.max(np.ceil(np.log2(2.0 * hw / _CDF_BISECTION_WIDTH))))

    def log_density(points: ArrayLike) -> Union[float, np.ndarray]:
        x = np.asarray(points, dtype=float)
        with np.errstate(divide="ignore"):
            vals = log_norm + 2.0 * np.sum(np.log(np.abs(np.cos(half_freq * x))), axis=-1)
        out = np.where(np.all(np.abs(x) < hw, axis=-1), vals, -np.inf)
        return float(out) if x.ndim == 1 else out

    def log_gradient(points: ArrayLike) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        return -(np.pi / hw) * np.tan(half_freq * x)

    def coordinate_cdf(axis: int, values: ArrayLike) -> np.ndarray:
        t = hw[axis]
        x = np.clip(np.asarray(values, dtype=float), -t, t)
        return x / (2.0 * t) + 0.5 + np.sin(np.pi * x / t) / (2.0 * np.pi)

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.uniform(size=(n, d))
        lo = np.broadcast_to(-hw, (n, d)).copy()
        hi = np.broadcast_to(hw, (n, d)).copy()
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            f = mid / (2.0 * hw) + 0.5 + np.sin(np.pi * mid / hw) / (2.0 * np.pi)
            below = f < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    return Density(
        dimension=d,
        support=box,
        log_density=log_density,
        log_gradient=log_gradient,
        sampler=sampler,
        coordinate_cdf=coordinate_cdf,
    )


def dirichlet_lambda1_box(box: Box) -> float:
    """Principal Dirichlet eigenvalue of the box: sum_i pi**2 / (4 T_i**2)."""
    return float(np.sum(np.pi**2 / (4.0 * box.half_widths**2)))


@dataclass(frozen=True)
class FisherMatrix:
    """Fisher information matrix E[(grad log pi)(grad log pi)^T].

    ``estimator_kind`` is one of closed_form, quadrature, monte_carlo.
    Monte Carlo matrices carry an entrywise standard error.
    """

    entries: np.ndarray
    estimator_kind: str
    std_error: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        if self.estimator_kind not in ("closed_form", "quadrature", "monte_carlo"):
            raise ValueError(f"unknown estimator_kind {self.estimator_kind!r}")
        asym = np.abs(m - m.T)
        if self.estimator_kind == "monte_carlo":
            se = np.asarray(self.std_error, dtype=float) if self.std_error is not None else 0.0
            allowed = _SYMMETRY_TOL + se + np.transpose(se) if np.ndim(se) == 2 else _SYMMETRY_TOL
            if np.any(asym > allowed):
                raise ValueError("matrix asymmetry exceeds reported standard error")
        elif np.max(asym) > _SYMMETRY_TOL:
            raise ValueError("matrix is not symmetric to within 1e-12")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.T))) < _PSD_FLOOR * scale:
            raise ValueError("matrix is not positive semidefinite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dimension(self) -> int:
        return int(self.entries.shape[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


def fisher_closed_form_cube(box: Box) -> FisherMatrix:
    """(pi**2 / T**2) * I for a cube of half-width T."""
    if not box.is_cube:
        raise ValueError("closed form requires a cube (equal half-widths)")
    t = float(box.half_widths[0])
    return FisherMatrix(np.eye(box.dimension) * (np.pi**2 / t**2), "closed_form")


def gauss_legendre_grid(box: Box, nodes_per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product Gauss-Legendre nodes and weights over the box.

    Returns (points, weights) with points of shape (nodes**d, d).  Nodes are
    strictly interior, so integrands defined only on the open box are safe.
    """
    if nodes_per_axis < 1:
        raise ValueError("nodes_per_axis must be positive")
    base_x, base_w = np.polynomial.legendre.leggauss(int(nodes_per_axis))
    axis_x = [base_x * t for t in box.half_widths]
    axis_w = [base_w * t for t in box.half_widths]
    mesh = np.meshgrid(*axis_x, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    weights = axis_w[0]
    for w in axis_w[1:]:
        weights = np.multiply.outer(weights, w)
    return points, np.asarray(weights, dtype=float).reshape(-1)


def fisher_quadrature(density: Density, grid_points_per_axis: int = 128) -> FisherMatrix:
    """Fisher matrix by tensor quadrature of (score)(score)^T pi.

    Only for d <= 3; the grid is nodes**d points.  Raises if the score is
    non-finite at any interior node.
    """
    if density.dimension > 3:
        raise ValueError("quadrature supports dimension at most 3")
    if grid_points_per_axis < 16:
        raise ValueError("grid_points_per_axis must be at least 16")
    points, weights = gauss_legendre_grid(density.support, grid_points_per_axis)
    scores = np.asarray(density.log_gradient(points), dtype=float)
    if not np.all(np.isfinite(scores)):
        raise ValueError("log_gradient returned non-finite values at interior nodes")
    pi_vals = np.exp(np.asarray(density.log_density(points), dtype=float))
    entries = np.einsum("k,ki,kj->ij", weights * pi_vals, scores, scores)
    return FisherMatrix(entries, "quadrature")


_MC_CHUNK = 1 << 17


def fisher_monte_carlo(density: Density, samples: int, rng_seed: int) -> FisherMatrix:
    """Fisher matrix as a sample mean of score outer products.

    Samples are drawn in fixed-size chunks, each from its own substream
    SeedSequence((rng_seed, chunk_index)), so the result does not depend on
    how the chunks are scheduled.  Requires at least 1000 samples.
    """
    samples = int(samples)
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    d = density.dimension
    total = np.zeros((d, d))
    total_sq = np.zeros((d, d))
    done = 0
    chunk_index = 0
    while done < samples:
        m = min(_MC_CHUNK, samples - done)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((rng_seed, chunk_index))))
        pts = density.sample(rng, m)
        scores = np.asarray(density.log_gradient(pts), dtype=float)
        outer = scores[:, :, None] * scores[:, None, :]
        total += outer.sum(axis=0)
        total_sq += np.square(outer).sum(axis=0)
        done += m
        chunk_index += 1
    mean = total / samples
    var = np.maximum(total_sq - samples * np.square(mean), 0.0) / (samples - 1)
    se = np.sqrt(var / samples)
    return FisherMatrix(mean, "monte_carlo", std_error=se)


def direction_information(fisher: FisherMatrix, step: ArrayLike) -> float:
    """sqrt(v^T I v): the information length of a step direction."""
    v = np.asarray(step, dtype=float)
    if v.shape != (fisher.dimension,):
        raise ValueError(
            f"step has shape {v.shape}, expected ({fisher.dimension},)"
        )
    quad = float(v @ fisher.entries @ v)
    return math.sqrt(max(quad, 0.0))


def fisher_operator_norm(fisher: FisherMatrix, tol: float = 1e-10) -> float:
    """Largest eigenvalue, by cyclic Jacobi rotations."""
    return _jacobi_largest_eigenvalue(fisher.entries, tol)


def _jacobi_largest_eigenvalue(matrix: np.ndarray, tol: float) -> float:
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    scale = max(1.0, float(np.max(np.abs(a))))
    for _ in range(60):
        off = a - np.diag(np.diag(a))
        if math.sqrt(float(np.sum(off * off))) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    else:
        raise RuntimeError("Jacobi iteration failed to converge")
    return float(np.max(np.diag(a)))
