"""Fourier amalgam norms and their special cases.

The amalgam norm takes L^p norms of the Fourier transform over the unit boxes
n + Q with Q = (-1/2, 1/2], weights them by the Japanese bracket <n>^s, and
reduces over box indices n in l^q.  Setting p = q gives the Fourier-Lebesgue
norm, p = q = 2 the Sobolev norm, and replacing the sharp box cutoffs by a
smooth partition of unity gives the modulation norm (implemented for p = 2
on the frequency side via Plancherel).

Piecewise-constant spectra are handled exactly: box overlaps are interval
lengths and no quadrature enters.  Sampled spectra are integrated with
panels aligned to the sample points of the linear interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DomainError,
    InvalidProfileError,
    UnsupportedInputError,
    UnsupportedParameterError,
)
from .spectral_core import (
    DEFAULT_QUAD_DENSITY,
    PiecewiseConstSpectrum,
    SampledSpectrum,
    Spectrum,
    _panel_nodes,
)

BOX_HALF = 0.5  # Q = (-1/2, 1/2]
_MAX_BOXES = 10**7


@dataclass(frozen=True)
class AmalgamParams:
    """Exponent triple (p, q, s) plus quadrature resolution.

    p and q live in [1, inf] with math.inf as the distinguished endpoint;
    s is the regularity index.
    """

    p: float
    q: float
    s: float
    quad_density: int = DEFAULT_QUAD_DENSITY

    def __post_init__(self) -> None:
        for name, value in (("p", self.p), ("q", self.q)):
            if not (value >= 1.0):
                raise ValueError(f"{name}={value} must be >= 1 (inf allowed)")
        if self.quad_density < 2:
            raise ValueError(f"quad_density={self.quad_density} must be >= 2")


def japanese_bracket(x):
    """<x> = (1 + x^2)^(1/2)."""
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def _lq_reduce(terms: np.ndarray, q: float) -> float:
    """l^q reduction with max-factoring for scale robustness."""
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0
    peak = float(np.max(terms))
    if peak == 0.0:
        return 0.0
    if math.isinf(q):
        return peak
    return peak * float(np.sum((terms / peak) ** q)) ** (1.0 / q)


def _box_indices(lo: float, hi: float) -> range:
    """Integers n whose box (n - 1/2, n + 1/2] meets [lo, hi] as a set."""
    n_min = math.ceil(lo - BOX_HALF)
    n_max = math.ceil(hi + BOX_HALF) - 1
    return range(n_min, n_max + 1)


def _sampled_box_integral(f: SampledSpectrum, lo: float, hi: float, power: float, density: int) -> float:
    """Integral of |f|^power over [lo, hi], split at the interpolant's sample points."""
    pts = f.grid.points()
    inner = pts[(pts > lo) & (pts < hi)]
    edges = np.concatenate(([lo], inner, [hi]))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        panels = max(1, math.ceil(density * (b - a)))
        nodes, weights = _panel_nodes(a, b, panels)
        total += float(np.sum(weights * np.abs(f.evaluate_many(nodes)) ** power))
    return total


def box_lp_norm(f: Spectrum, n: int, p: float, quad_density: int = DEFAULT_QUAD_DENSITY) -> float:
    """L^p norm of the spectrum over the box (n - 1/2, n + 1/2].

    Exact for piecewise-constant spectra: sum of |amplitude|^p times overlap
    length (for p = inf, the max of |amplitude| over pieces with positive
    overlap, i.e. the essential sup).  Sampled spectra are integrated over the
    part of the box the grid covers; a box entirely outside the grid is a
    domain error.
    """
    lo, hi = n - BOX_HALF, n + BOX_HALF
    if isinstance(f, PiecewiseConstSpectrum):
        if math.isinf(p):
            best = 0.0
            for (a, b), c in f.pieces:
                if min(b, hi) - max(a, lo) > 0.0:
                    best = max(best, abs(c))
            return best
        amps = []
        lens = []
        for (a, b), c in f.pieces:
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0.0:
                amps.append(abs(c))
                lens.append(overlap)
        if not amps:
            return 0.0
        amps_arr = np.asarray(amps)
        peak = float(np.max(amps_arr))
        if peak == 0.0:
            return 0.0
        return peak * float(np.sum((amps_arr / peak) ** p * np.asarray(lens))) ** (1.0 / p)

    clip_lo = max(lo, f.grid.xi_min)
    clip_hi = min(hi, f.grid.xi_max)
    if hi < f.grid.xi_min or lo >= f.grid.xi_max:
        raise DomainError(f"box ({lo}, {hi}] lies outside sampled grid")
    if math.isinf(p):
        # |linear interpolant| attains its sup at breakpoints, so sampling the
        # grid nodes in the box plus the clipped box edges is exact.
        pts = f.grid.points()
        mask = (pts > clip_lo) & (pts <= clip_hi)
        candidates = [np.abs(np.asarray(f.values))[mask]]
        candidates.append(np.abs(f.evaluate_many(np.array([clip_lo, clip_hi]))))
        return float(max(np.max(c) if c.size else 0.0 for c in candidates))
    total = _sampled_box_integral(f, clip_lo, clip_hi, p, quad_density)
    return total ** (1.0 / p)


def _spectrum_box_range(f: Spectrum) -> range:
    if isinstance(f, PiecewiseConstSpectrum):
        bounds = f.support_bounds()
        if bounds is None:
            return range(0)
        lo, hi = bounds
    else:
        lo, hi = f.grid.xi_min, f.grid.xi_max
    boxes = _box_indices(lo, hi)
    if len(boxes) > _MAX_BOXES:
        raise UnsupportedInputError("effective support spans too many boxes")
    return boxes


def amalgam_norm(f: Spectrum, params: AmalgamParams) -> float:
    """Weighted l^q-over-boxes reduction of per-box L^p norms.

    The sum runs over the finitely many boxes meeting the support (piecewise
    spectra) or the grid (sampled spectra); boxes are visited in ascending n,
    so the reduction order is deterministic.
    """
    terms = []
    for n in _spectrum_box_range(f):
        bn = box_lp_norm(f, n, params.p, params.quad_density)
        if bn != 0.0:
            terms.append(bn * float(japanese_bracket(n)) ** params.s)
    return _lq_reduce(np.asarray(terms), params.q)


def _bracket_power_max(a: float, b: float, s: float) -> float:
    """max over [a, b] of <xi>^s (monotone in |xi| on either side of 0)."""
    if s >= 0:
        return float(japanese_bracket(max(abs(a), abs(b)))) ** s
    closest = 0.0 if a <= 0.0 <= b else min(abs(a), abs(b))
    return float(japanese_bracket(closest)) ** s


def fourier_lebesgue_norm(
    f: Spectrum, q: float, s: float, quad_density: int = DEFAULT_QUAD_DENSITY
) -> float:
    """(integral of <xi>^(sq) |Ff|^q dxi)^(1/q); sup of <xi>^s |Ff| for q = inf."""
    if not (q >= 1.0):
        raise ValueError(f"q={q} must be >= 1 (inf allowed)")
    if isinstance(f, PiecewiseConstSpectrum):
        if not f.pieces:
            return 0.0
        if math.isinf(q):
            return max(abs(c) * _bracket_power_max(a, b, s) for (a, b), c in f.pieces)
        amps = np.asarray([abs(c) for _, c in f.pieces])
        peak = float(np.max(amps))
        if peak == 0.0:
            return 0.0
        total = 0.0
        for ((a, b), c) in f.pieces:
            if abs(c) == 0.0:
                continue
            panels = max(1, math.ceil(quad_density * (b - a)))
            nodes, weights = _panel_nodes(a, b, panels)
            weight_fn = japanese_bracket(nodes) ** (s * q)
            total += (abs(c) / peak) ** q * float(np.sum(weights * weight_fn))
        return peak * total ** (1.0 / q)

    pts = f.grid.points()
    if math.isinf(q):
        # grid nodes plus a dense refinement guard against <xi>^s peaking
        # strictly inside a sample cell
        dense = np.linspace(f.grid.xi_min, f.grid.xi_max, quad_density * max(2, len(pts)))
        vals = np.abs(f.evaluate_many(dense)) * japanese_bracket(dense) ** s
        node_vals = np.abs(np.asarray(f.values)) * japanese_bracket(pts) ** s
        return float(max(np.max(vals), np.max(node_vals)))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        panels = max(1, math.ceil(quad_density * (b - a)))
        nodes, weights = _panel_nodes(a, b, panels)
        total += float(
            np.sum(weights * np.abs(f.evaluate_many(nodes)) ** q * japanese_bracket(nodes) ** (s * q))
        )
    return total ** (1.0 / q)


def sobolev_norm(f: Spectrum, s: float, quad_density: int = DEFAULT_QUAD_DENSITY) -> float:
    """H^s norm: the Fourier-Lebesgue norm with q = 2."""
    return fourier_lebesgue_norm(f, 2.0, s, quad_density)


@dataclass(frozen=True)
class BumpProfile:
    """C-infinity bump: 1 on |u| <= plateau_radius, 0 for |u| >= support_radius,
    exp(1 - 1/(1 - v^2)) in between with v the normalized transition variable.

    The default (plateau 1/2, support 1) is the standard transition; narrower
    supports are legal as long as the plateau still covers |u| <= 1/2.
    """

    plateau_radius: float = 0.5
    support_radius: float = 1.0

    def __post_init__(self) -> None:
        if not 0.5 <= self.plateau_radius < self.support_radius <= 1.0:
            raise InvalidProfileError(
                "bump must satisfy 0.5 <= plateau_radius < support_radius <= 1.0, got "
                f"({self.plateau_radius}, {self.support_radius})"
            )

    def __call__(self, u) -> np.ndarray:
        u = np.abs(np.asarray(u, dtype=float))
        out = np.zeros(u.shape)
        out[u <= self.plateau_radius] = 1.0
        trans = (u > self.plateau_radius) & (u < self.support_radius)
        if np.any(trans):
            v = (u[trans] - self.plateau_radius) / (self.support_radius - self.plateau_radius)
            out[trans] = np.exp(1.0 - 1.0 / (1.0 - v**2))
        return out


@dataclass(frozen=True)
class CallableProfile:
    """Adapter giving a user-supplied bump callable the radius metadata the
    window family needs."""

    func: object
    plateau_radius: float = 0.5
    support_radius: float = 1.0

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)


@dataclass(frozen=True)
class SmoothWindowFamily:
    """Frequency-uniform partition of unity sigma_n = rho(. - n) / sum_l rho(. - l).

    Windows have support width 2 * support_radius <= 2 and spacing 1, so at
    most two are nonzero at any point and the family sums to 1 everywhere.
    """

    profile: BumpProfile | CallableProfile

    def rho(self, u) -> np.ndarray:
        return self.profile(u)

    def denominator(self, xi) -> np.ndarray:
        # support_radius <= 1 means only l in {floor(xi), floor(xi) + 1} can
        # contribute at xi
        xi = np.asarray(xi, dtype=float)
        base = np.floor(xi)
        return self.profile(xi - base) + self.profile(xi - base - 1.0)

    def sigma(self, n: int, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.profile(xi - n) / self.denominator(xi)

    def partition_sum(self, xi) -> np.ndarray:
        """Honest sum of sigma_l over a generous window of l (should be 1)."""
        xi = np.asarray(xi, dtype=float)
        base = np.floor(xi).astype(int)
        total = np.zeros(xi.shape)
        for off in (-2, -1, 0, 1, 2):
            num = self.profile(xi - (base + off))
            total += num
        return total / self.denominator(xi)

    def window_interval(self, n: int) -> tuple[float, float]:
        r = self.profile.support_radius
        return (n - r, n + r)

    def breakpoints(self, n: int) -> list[float]:
        """Points where sigma_n changes analytic piece inside its support."""
        r = self.profile.support_radius
        pr = self.profile.plateau_radius
        pts = set()
        for m in (n - 1, n, n + 1):
            for d in (-r, -pr, pr, r):
                pts.add(m + d)
        lo, hi = self.window_interval(n)
        return sorted(p for p in pts if lo < p < hi)


def build_partition(profile=None) -> SmoothWindowFamily:
    """Validate a bump profile and wrap it as a window family.

    Accepts the default profile (None), a :class:`BumpProfile`, or any
    vectorized callable u -> rho(u) (wrapped with default radius metadata).
    The profile must equal 1 on |u| <= 1/2, vanish for |u| >= 1, and stay in
    [0, 1]; violations raise InvalidProfileError.
    """
    if profile is None:
        profile = BumpProfile()
    elif not isinstance(profile, (BumpProfile, CallableProfile)):
        if not callable(profile):
            raise InvalidProfileError("profile must be a BumpProfile or a callable")
        profile = CallableProfile(profile)
    probe_plateau = np.linspace(-0.5, 0.5, 201)
    if np.max(np.abs(profile(probe_plateau) - 1.0)) > 1e-12:
        raise InvalidProfileError("profile must equal 1 on |u| <= 1/2")
    probe_outside = np.concatenate([np.linspace(1.0, 3.0, 101), -np.linspace(1.0, 3.0, 101)])
    if np.max(np.abs(profile(probe_outside))) > 0.0:
        raise InvalidProfileError("profile must vanish for |u| >= 1")
    probe_all = np.linspace(-1.5, 1.5, 601)
    vals = profile(probe_all)
    if np.any(vals < 0.0) or np.any(vals > 1.0):
        raise InvalidProfileError("profile must take values in [0, 1]")
    return SmoothWindowFamily(profile)


def _window_l2_sq(
    f: Spectrum, windows: SmoothWindowFamily, n: int, quad_density: int
) -> float:
    """integral of sigma_n(xi)^2 |Ff(xi)|^2 over the window support."""
    lo, hi = windows.window_interval(n)
    if isinstance(f, PiecewiseConstSpectrum):
        segments = []
        for (a, b), c in f.pieces:
            seg_lo, seg_hi = max(a, lo), min(b, hi)
            if seg_hi > seg_lo:
                segments.append((seg_lo, seg_hi, abs(c) ** 2))
    else:
        seg_lo, seg_hi = max(lo, f.grid.xi_min), min(hi, f.grid.xi_max)
        if seg_hi <= seg_lo:
            return 0.0
        segments = [(seg_lo, seg_hi, None)]

    cuts = windows.breakpoints(n)
    if isinstance(f, SampledSpectrum):
        pts = f.grid.points()
        cuts = sorted(set(cuts) | set(pts[(pts > lo) & (pts < hi)]))

    total = 0.0
    for seg_lo, seg_hi, amp_sq in segments:
        edges = [seg_lo] + [c for c in cuts if seg_lo < c < seg_hi] + [seg_hi]
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            panels = max(1, math.ceil(quad_density * (b - a)))
            nodes, weights = _panel_nodes(a, b, panels)
            sig_sq = windows.sigma(n, nodes) ** 2
            if amp_sq is None:
                mag_sq = np.abs(f.evaluate_many(nodes)) ** 2
            else:
                mag_sq = amp_sq
            total += float(np.sum(weights * sig_sq * mag_sq))
    return total


def modulation_norm(
    f: Spectrum, params: AmalgamParams, windows: SmoothWindowFamily | None = None
) -> float:
    """Smooth-window counterpart of the amalgam norm, restricted to p = 2.

    For p = 2 Plancherel turns the physical-space window norms into
    frequency-side integrals ||sigma_n Ff||_{L^2}; other p would need
    physical-space quadrature and is rejected.
    """
    if params.p != 2:
        raise UnsupportedParameterError("modulation norm requires p=2")
    windows = windows if windows is not None else build_partition()
    if isinstance(f, PiecewiseConstSpectrum):
        bounds = f.support_bounds()
        if bounds is None:
            return 0.0
        lo, hi = bounds
    else:
        lo, hi = f.grid.xi_min, f.grid.xi_max
    r = windows.profile.support_radius
    n_lo = math.floor(lo - r)
    n_hi = math.ceil(hi + r)
    terms = []
    for n in range(n_lo, n_hi + 1):
        val_sq = _window_l2_sq(f, windows, n, params.quad_density)
        if val_sq > 0.0:
            terms.append(math.sqrt(val_sq) * float(japanese_bracket(n)) ** params.s)
    return _lq_reduce(np.asarray(terms), params.q)
