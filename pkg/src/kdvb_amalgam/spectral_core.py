"""Frequency-line primitives: grids, spectrum representations, interval algebra,
and composite Gauss-Legendre quadrature.

Two spectrum representations are kept deliberately separate.
``PiecewiseConstSpectrum`` stores a compactly supported, piecewise-constant
Fourier transform exactly, so norms and support arithmetic on it carry no
discretization error.  ``SampledSpectrum`` holds complex samples on a uniform
grid and interpolates linearly in between; it is the working format for
general inputs and iterate outputs.

All types are immutable after construction and all operations are pure
functions, so everything here is safe for parallel read-only use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

# Panels per unit length for composite quadrature; each panel carries an
# 8-point Gauss-Legendre rule.
DEFAULT_QUAD_DENSITY = 64

_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid xi_min + k*spacing, k = 0..num_points-1."""

    xi_min: float
    xi_max: float
    num_points: int

    def __post_init__(self) -> None:
        if not self.xi_min < self.xi_max:
            raise ValueError(f"xi_min={self.xi_min} must be < xi_max={self.xi_max}")
        if self.num_points < 2:
            raise ValueError(f"num_points={self.num_points} must be >= 2")

    @property
    def spacing(self) -> float:
        return (self.xi_max - self.xi_min) / (self.num_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.num_points)

    def contains(self, xi: float) -> bool:
        return self.xi_min <= xi <= self.xi_max


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint closed intervals [a, b], sorted by left endpoint.

    Degenerate intervals (a == b) are legal and carry zero measure.
    """

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        prev_hi = -math.inf
        for a, b in self.intervals:
            if a > b:
                raise ValueError(f"interval [{a}, {b}] has a > b")
            if a < prev_hi:
                raise ValueError("intervals overlap or are unsorted")
            prev_hi = b

    @staticmethod
    def from_pairs(pairs) -> "IntervalSet":
        """Normalize arbitrary [a, b] pairs: sort and merge overlapping or touching."""
        cleaned = []
        for a, b in pairs:
            a, b = float(a), float(b)
            if a > b:
                raise ValueError(f"interval [{a}, {b}] has a > b")
            cleaned.append((a, b))
        cleaned.sort()
        merged: list[tuple[float, float]] = []
        for a, b in cleaned:
            if merged and a <= merged[-1][1]:
                lo, hi = merged[-1]
                merged[-1] = (lo, max(hi, b))
            else:
                merged.append((a, b))
        return IntervalSet(tuple(merged))

    @staticmethod
    def single(a: float, b: float) -> "IntervalSet":
        return IntervalSet.from_pairs([(a, b)])

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def bounds(self) -> tuple[float, float] | None:
        if not self.intervals:
            return None
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        """Exact set intersection (two-pointer sweep)."""
        out = []
        a_iv, b_iv = self.intervals, other.intervals
        i = j = 0
        while i < len(a_iv) and j < len(b_iv):
            lo = max(a_iv[i][0], b_iv[j][0])
            hi = min(a_iv[i][1], b_iv[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a_iv[i][1] < b_iv[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet.from_pairs(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_pairs(list(self.intervals) + list(other.intervals))

    def translate(self, shift: float) -> "IntervalSet":
        return IntervalSet(tuple((a + shift, b + shift) for a, b in self.intervals))

    def reflect(self) -> "IntervalSet":
        """The set {-x : x in S}."""
        return IntervalSet(tuple((-b, -a) for a, b in reversed(self.intervals)))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Module-level alias for :meth:`IntervalSet.intersect`."""
    return a.intersect(b)


@dataclass(frozen=True)
class PiecewiseConstSpectrum:
    """Compactly supported piecewise-constant Fourier transform.

    ``pieces`` is a sorted tuple of ((a, b), amplitude) with a < b and
    pairwise-disjoint intervals (shared endpoints allowed).  Evaluation
    outside every piece is exactly 0.  When ``real_valued_field`` is set the
    spectrum must be Hermitian: each piece ([a, b], c) has a mirror
    ([-b, -a], conj(c)).
    """

    pieces: tuple[tuple[tuple[float, float], complex], ...] = ()
    real_valued_field: bool = False

    def __post_init__(self) -> None:
        prev_b = -math.inf
        for (a, b), _ in self.pieces:
            if not a < b:
                raise ValueError(f"piece [{a}, {b}] must have a < b")
            if a < prev_b:
                raise ValueError("pieces overlap beyond shared endpoints")
            prev_b = b
        if self.real_valued_field:
            table = {iv: c for iv, c in self.pieces}
            for (a, b), c in self.pieces:
                mirror = table.get((-b, -a))
                if mirror is None or mirror != complex(c).conjugate():
                    raise ValueError(
                        "real_valued_field spectrum lacks mirrored piece "
                        f"([{-b}, {-a}], conj) for ([{a}, {b}], {c})"
                    )

    @staticmethod
    def from_pieces(pieces, real_valued_field: bool = False) -> "PiecewiseConstSpectrum":
        norm = tuple(
            ((float(a), float(b)), complex(c)) for (a, b), c in sorted(pieces, key=lambda p: p[0])
        )
        return PiecewiseConstSpectrum(norm, real_valued_field)

    def support(self) -> IntervalSet:
        return IntervalSet.from_pairs([iv for iv, _ in self.pieces])

    def support_bounds(self) -> tuple[float, float] | None:
        if not self.pieces:
            return None
        return self.pieces[0][0][0], max(b for (_, b), _ in self.pieces)

    def evaluate(self, xi: float) -> complex:
        """Amplitude of the containing piece; at a shared endpoint the piece
        with the larger left endpoint wins; 0 if no piece contains xi."""
        hit = None
        for (a, b), c in self.pieces:  # ascending a: later match wins
            if a <= xi <= b:
                hit = c
        return hit if hit is not None else 0j

    def evaluate_many(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape, dtype=complex)
        for (a, b), c in self.pieces:  # ascending a: later pieces win shared points
            out[(xi >= a) & (xi <= b)] = c
        return out

    def scaled(self, factor: complex) -> "PiecewiseConstSpectrum":
        pieces = tuple((iv, c * factor) for iv, c in self.pieces)
        hermitian = self.real_valued_field and complex(factor).imag == 0.0
        return PiecewiseConstSpectrum(pieces, hermitian)


@dataclass(frozen=True)
class SampledSpectrum:
    """Complex samples of a Fourier transform on a uniform frequency grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.num_points,):
            raise ValueError(
                f"values length {vals.shape} does not match grid num_points={self.grid.num_points}"
            )
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise ValueError("values must be finite (no NaN/Inf)")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def evaluate(self, xi: float) -> complex:
        if not self.grid.contains(xi):
            raise DomainError(
                f"xi={xi} outside sampled grid [{self.grid.xi_min}, {self.grid.xi_max}]"
            )
        return complex(np.interp(xi, self.grid.points(), self.values))

    def evaluate_many(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < self.grid.xi_min) or np.any(xi > self.grid.xi_max):
            raise DomainError("sample point outside sampled grid")
        return np.interp(xi, self.grid.points(), self.values)


Spectrum = PiecewiseConstSpectrum | SampledSpectrum


def evaluate(spectrum: Spectrum, xi: float) -> complex:
    """Evaluate either spectrum representation at a single frequency."""
    return spectrum.evaluate(xi)


def sample_on_grid(
    spectrum: PiecewiseConstSpectrum, grid: FrequencyGrid, jump_average: bool = True
) -> SampledSpectrum:
    """Sample a piecewise-constant spectrum onto a uniform grid.

    With ``jump_average`` (the default), nodes that coincide with a piece
    boundary receive the mean of the left and right limits.  Trapezoid sums of
    such samples reproduce the exact integral of the underlying step function
    when its jumps sit on grid nodes.
    """
    pts = grid.points()
    vals = spectrum.evaluate_many(pts)
    if jump_average and spectrum.pieces:
        tol = 1e-9 * grid.spacing
        starts: dict[float, complex] = {}
        ends: dict[float, complex] = {}
        for (a, b), c in spectrum.pieces:
            starts[a] = c
            ends[b] = c
        for edge in sorted(set(starts) | set(ends)):
            left = ends.get(edge, 0j)
            right = starts.get(edge, 0j)
            if left == right:
                continue
            idx = np.nonzero(np.abs(pts - edge) <= tol)[0]
            if idx.size:
                vals = vals.copy()
                vals[idx] = 0.5 * (left + right)
    return SampledSpectrum(grid, vals)


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule: ``density`` panels per unit length,
    8 nodes per panel (order-16 local accuracy)."""

    density: int = DEFAULT_QUAD_DENSITY

    def __post_init__(self) -> None:
        if self.density < 2:
            raise ValueError(f"quadrature density must be >= 2, got {self.density}")


def _panel_nodes(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for a composite 8-point rule on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (b - a) / panels
    nodes = mids[:, None] + half * _GL8_NODES[None, :]
    weights = np.broadcast_to(half * _GL8_WEIGHTS[None, :], nodes.shape)
    return nodes.ravel(), weights.ravel()


def integrate_interval(f, a: float, b: float, density: int) -> complex:
    if b <= a:
        return 0j
    panels = max(1, math.ceil(density * (b - a)))
    nodes, weights = _panel_nodes(a, b, panels)
    return complex(np.sum(weights * np.asarray(f(nodes))))


def integrate_on(f, interval_set: IntervalSet, rule: QuadratureRule | None = None) -> complex:
    """Integrate a vectorized integrand over a finite union of intervals.

    Each interval gets ceil(density * length) panels.  Node and summation
    order is fixed, so results are bit-reproducible for fixed inputs.
    Returns 0 on an empty set.
    """
    rule = rule or QuadratureRule()
    total = 0j
    for a, b in interval_set.intervals:
        total += integrate_interval(f, a, b, rule.density)
    return total
