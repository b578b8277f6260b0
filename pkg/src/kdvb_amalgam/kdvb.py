"""KdV-Burgers dynamics on the Fourier side.

The linear flow is the multiplier exp(-t xi^2 + i t xi^3) (Gaussian damping
plus cubic dispersion).  The quadratic Duhamel term is driven, after the time
integral is done analytically, by the removable-singularity kernel
G(z, t) = (exp(z t) - 1) / z evaluated at the interaction rate

    z = -quadratic_gap + i * cubic_gap,
    quadratic_gap = xi1^2 + (xi - xi1)^2 - xi^2 = -2 xi1 (xi - xi1),
    cubic_gap     = xi1^3 + (xi - xi1)^3 - xi^3 = -3 xi xi1 (xi - xi1).

The second Picard iterate is available in two independent forms: the closed
form above (exact interval-set support, Gauss-Legendre in xi1) and a
time-quadrature oracle (composite Simpson in tau, doubled until converged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SupportOverflowError
from .spectral_core import (
    DEFAULT_QUAD_DENSITY,
    FrequencyGrid,
    IntervalSet,
    PiecewiseConstSpectrum,
    QuadratureRule,
    SampledSpectrum,
    Spectrum,
    _panel_nodes,
    integrate_on,
    sample_on_grid,
)

# |z| t below this switches G(z, t) to its Taylor series; (e^{zt}-1)/z loses
# digits to cancellation as zt -> 0 and the denominator vanishes on the lines
# xi1 = 0 and xi1 = xi.
SERIES_THRESHOLD = 1e-4

_SIMPSON_START_PANELS = 16
_SIMPSON_MAX_PANELS = 2**14
_SIMPSON_REL_TOL = 1e-8


@dataclass(frozen=True)
class ExponentGaps:
    """Quadratic and cubic phase gaps at an interaction (xi, xi1), their
    factored/expanded cross-check mismatches, and the complex rate z."""

    quadratic_gap: float
    cubic_gap: float
    z: complex
    quadratic_mismatch: float
    cubic_mismatch: float


def exponent_gaps(xi: float, xi1: float) -> ExponentGaps:
    """Compute both exponent gaps two ways (factored and expanded polynomial).

    The factored values are returned as the gaps; the mismatch fields report
    |expanded - factored| so callers can assert the identities numerically.
    """
    prod = xi1 * (xi - xi1)
    quad_f = -2.0 * prod
    cubic_f = -3.0 * xi * prod
    quad_e = xi1**2 + (xi - xi1) ** 2 - xi**2
    cubic_e = xi1**3 + (xi - xi1) ** 3 - xi**3
    return ExponentGaps(
        quadratic_gap=quad_f,
        cubic_gap=cubic_f,
        z=complex(-quad_f, cubic_f),
        quadratic_mismatch=abs(quad_e - quad_f),
        cubic_mismatch=abs(cubic_e - cubic_f),
    )


def _expm1_complex(w: np.ndarray) -> np.ndarray:
    """exp(w) - 1 for complex w without cancellation in the real part."""
    wr = np.asarray(w).real
    wi = np.asarray(w).imag
    real = np.expm1(wr) * np.cos(wi) - 2.0 * np.sin(0.5 * wi) ** 2
    imag = np.exp(wr) * np.sin(wi)
    return real + 1j * imag


def _g_series(w: np.ndarray) -> np.ndarray:
    """sum_{k>=0} w^k / (k+1)!, truncated when a term's relative size < 1e-16."""
    w = np.asarray(w, dtype=complex)
    total = np.ones_like(w)
    term = np.ones_like(w)
    for k in range(1, 40):
        term = term * w / (k + 1)
        total = total + term
        if not np.any(np.abs(term) > 1e-16 * np.abs(total)):
            break
    return total


def g_ratio(z, t: float, series_threshold: float = SERIES_THRESHOLD):
    """G(z, t) = (exp(z t) - 1) / z, finite at z = 0 with value t."""
    scalar = np.isscalar(z)
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    w = z_arr * t
    out = np.empty_like(w)
    small = np.abs(w) < series_threshold
    if np.any(small):
        out[small] = t * _g_series(w[small])
    big = ~small
    if np.any(big):
        out[big] = _expm1_complex(w[big]) / z_arr[big]
    return complex(out[0]) if scalar else out


def semigroup_multiplier(xi, t: float) -> np.ndarray:
    """exp(-t xi^2 + i t xi^3); modulus exp(-t xi^2) <= 1 for t >= 0."""
    xi = np.asarray(xi, dtype=float)
    return np.exp(-t * xi**2 + 1j * t * xi**3)


def semigroup_apply(f: Spectrum, t: float, grid: FrequencyGrid | None = None) -> SampledSpectrum:
    """Apply the forward linear flow to a spectrum.

    Piecewise-constant inputs are promoted to samples on the caller-supplied
    grid, since the multiplier is not piecewise constant.
    """
    if t < 0:
        raise DomainError(f"semigroup is forward-only, got t={t}")
    if isinstance(f, PiecewiseConstSpectrum):
        if grid is None:
            raise DomainError("piecewise-constant input needs a target grid")
        f = sample_on_grid(f, grid)
    mult = semigroup_multiplier(f.grid.points(), t)
    return SampledSpectrum(f.grid, np.asarray(f.values) * mult)


def _aligned_offset(grid: FrequencyGrid) -> int:
    """Offset xi_min / spacing as an integer; needed so xi_k - xi_j lands on the grid."""
    ratio = grid.xi_min / grid.spacing
    nearest = round(ratio)
    if abs(ratio - nearest) > 1e-6:
        raise DomainError(
            "grid is not convolution-aligned (xi_min must be an integer multiple of the spacing)"
        )
    return int(nearest)


def _trapezoid_self_convolve(u: SampledSpectrum) -> np.ndarray:
    """(Fu * Fu)(xi_k) by trapezoid quadrature on the grid, with an overflow
    check that the convolution support does not spill past the grid."""
    values = np.asarray(u.values)
    n = values.size
    spacing = u.grid.spacing
    weights = np.ones(n)
    weights[0] = weights[-1] = 0.5
    full = np.convolve(values * weights, values) * spacing

    offset = _aligned_offset(u.grid)
    peak = float(np.max(np.abs(full))) if full.size else 0.0
    if peak > 0.0:
        significant = np.abs(full) > 1e-12 * peak
        idx = np.nonzero(significant)[0]
        # full[m] sits at frequency 2 xi_min + m spacing = grid index m + offset
        if idx.size and (idx[0] + offset < 0 or idx[-1] + offset > n - 1):
            raise SupportOverflowError(
                "convolution support spills outside the grid; enlarge [xi_min, xi_max]"
            )
    # out[k] holds frequency xi_min + k spacing = full index k - offset
    out = np.zeros(n, dtype=complex)
    src_lo = max(0, offset)
    src_hi = min(n, full.size + offset)
    if src_hi > src_lo:
        out[src_lo:src_hi] = full[src_lo - offset : src_hi - offset]
    return out


def duhamel_rhs(u: SampledSpectrum, t: float, tau: float) -> SampledSpectrum:
    """Frequency side of S(t - tau) d_x [u]^2 at intermediate time tau.

    The convolution uses direct trapezoid quadrature over the grid; the
    derivative contributes the factor (i xi), which vanishes at xi = 0.
    """
    if not 0.0 <= tau <= t:
        raise DomainError(f"tau={tau} outside [0, t={t}]")
    conv = _trapezoid_self_convolve(u)
    xi = u.grid.points()
    values = semigroup_multiplier(xi, t - tau) * (1j * xi) * conv
    return SampledSpectrum(u.grid, values)


@dataclass(frozen=True)
class PicardConfig:
    """Grid, time resolution, and singularity threshold for the iteration."""

    t: float
    grid: FrequencyGrid
    time_steps: int = 256
    singularity_threshold: float = SERIES_THRESHOLD

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"t={self.t} must be >= 0")
        if self.time_steps < 1:
            raise ValueError(f"time_steps={self.time_steps} must be >= 1")
        if self.singularity_threshold <= 0:
            raise ValueError("singularity_threshold must be > 0")


def picard_iterate(u0: Spectrum, t: float, iterations: int, config: PicardConfig) -> SampledSpectrum:
    """Run the Picard scheme u^(k+1)(t) = S(t) u0 - 1/2 int_0^t S(t - tau) d_x [u^(k)(tau)]^2 dtau.

    The time integral is a composite trapezoid over ``config.time_steps``
    panels; intermediate levels are evaluated on the shared tau nodes, so the
    cost grows like O(K * steps^2) vector operations for K > 2 and
    O(steps) convolutions for K = 2.  Returns u^(K) at time t; the explicit
    ``t`` argument governs (``config.t`` is carried for run descriptions).
    """
    if iterations < 1:
        raise ValueError(f"iterations={iterations} must be >= 1")
    if t < 0:
        raise DomainError(f"t={t} must be >= 0")
    if isinstance(u0, PiecewiseConstSpectrum):
        u0 = sample_on_grid(u0, config.grid)
    grid = u0.grid
    xi = grid.points()
    u0_vals = np.asarray(u0.values)

    if iterations == 1 or t == 0.0:
        return SampledSpectrum(grid, semigroup_multiplier(xi, t) * u0_vals)

    n = config.time_steps
    taus = np.linspace(0.0, t, n + 1)
    h = t / n
    free = [semigroup_multiplier(xi, tau) * u0_vals for tau in taus]

    level_vals = free
    for level in range(2, iterations + 1):
        rhs = [
            (1j * xi) * _trapezoid_self_convolve(SampledSpectrum(grid, v)) for v in level_vals
        ]
        targets = range(n + 1) if level < iterations else (n,)
        new_vals: dict[int, np.ndarray] = {}
        for j in targets:
            acc = np.zeros_like(u0_vals)
            for i in range(j + 1):
                w = 0.5 if i in (0, j) else 1.0
                acc = acc + w * semigroup_multiplier(xi, taus[j] - taus[i]) * rhs[i]
            new_vals[j] = free[j] - 0.5 * h * acc
        if level < iterations:
            level_vals = [new_vals[j] for j in range(n + 1)]
        else:
            return SampledSpectrum(grid, new_vals[n])
    raise AssertionError("unreachable")


def _product_fragments(h: PiecewiseConstSpectrum, xi: float) -> list[tuple[float, float, complex]]:
    """Decompose {xi1 : xi1 in supp Fh, xi - xi1 in supp Fh} into intervals on
    which Fh(xi1) Fh(xi - xi1) is a constant; returns (lo, hi, product)."""
    frags = []
    for (a1, b1), c1 in h.pieces:
        for (a2, b2), c2 in h.pieces:
            lo = max(a1, xi - b2)
            hi = min(b1, xi - a2)
            if hi > lo:
                frags.append((lo, hi, c1 * c2))
    frags.sort(key=lambda f: (f[0], f[1]))
    return frags


def _a2_time_kernel(xi: float, xi1: np.ndarray, t: float, series_threshold: float) -> np.ndarray:
    """exp(-t xi^2 + i t xi^3) * G(z, t) in a fused, overflow-safe form.

    Away from the removable singularity the product is evaluated as
    (exp(-t (xi1^2 + xi2^2) + i t (xi1^3 + xi2^3)) - exp(-t xi^2 + i t xi^3)) / z
    with xi2 = xi - xi1; both exponentials have nonpositive real part for
    t >= 0, so nothing overflows even when Re(z t) is large and positive.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = xi - xi1
    prod = xi1 * xi2
    z = 2.0 * prod - 3j * xi * prod  # -quadratic_gap + i cubic_gap
    w = z * t
    free = np.exp(complex(-t * xi**2, t * xi**3))
    out = np.empty(xi1.shape, dtype=complex)
    small = np.abs(w) < series_threshold
    if np.any(small):
        out[small] = free * t * _g_series(w[small])
    big = ~small
    if np.any(big):
        x1 = xi1[big]
        x2 = xi2[big]
        out[big] = (np.exp(-t * (x1**2 + x2**2) + 1j * t * (x1**3 + x2**3)) - free) / z[big]
    return out


def second_iterate_closed_form(
    h: PiecewiseConstSpectrum,
    t: float,
    xi: float,
    series_threshold: float = SERIES_THRESHOLD,
    quad_density: int = DEFAULT_QUAD_DENSITY,
) -> complex:
    """Fourier transform of the second Picard iterate's quadratic part at xi.

    Returns exp(-t xi^2 + i t xi^3) (i xi) * integral over the exact support
    set of Fh(xi1) Fh(xi - xi1) G(z, t) dxi1, with the support set built by
    interval algebra so the piecewise-constant data contributes no grid error.
    """
    if t < 0:
        raise DomainError(f"t={t} must be >= 0")
    if t == 0.0 or xi == 0.0:
        return 0j
    rule = QuadratureRule(quad_density)
    total = 0j
    for lo, hi, amp in _product_fragments(h, xi):
        part = integrate_on(
            lambda x1: _a2_time_kernel(xi, x1, t, series_threshold),
            IntervalSet.single(lo, hi),
            rule,
        )
        total += amp * part
    return 1j * xi * total


def _simpson(values: np.ndarray, h: float) -> complex:
    return complex(
        h / 3.0 * (values[0] + values[-1] + 4.0 * np.sum(values[1:-1:2]) + 2.0 * np.sum(values[2:-1:2]))
    )


def second_iterate_oracle(
    h: PiecewiseConstSpectrum,
    t: float,
    xi: float,
    quad_density: int = 24,
    rel_tol: float = _SIMPSON_REL_TOL,
    max_panels: int = _SIMPSON_MAX_PANELS,
) -> tuple[complex, bool]:
    """Independent time-quadrature evaluation of the second-iterate transform.

    Integrates exp(-(t - tau) xi^2 + i (t - tau) xi^3) (i xi)
    (F S(tau) h * F S(tau) h)(xi) over tau with composite Simpson, doubling
    the panel count until successive results differ by less than ``rel_tol``
    relative (capped at ``max_panels``).  Returns (value, converged).
    """
    if t < 0:
        raise DomainError(f"t={t} must be >= 0")
    frags = _product_fragments(h, xi)
    if t == 0.0 or xi == 0.0 or not frags:
        return 0j, True

    nodes_list = []
    cweights_list = []
    for lo, hi, amp in frags:
        panels = max(1, math.ceil(quad_density * (hi - lo)))
        nodes, weights = _panel_nodes(lo, hi, panels)
        nodes_list.append(nodes)
        cweights_list.append(weights * amp)
    nodes = np.concatenate(nodes_list)
    cweights = np.concatenate(cweights_list)
    decay = nodes**2 + (xi - nodes) ** 2
    phase = nodes**3 + (xi - nodes) ** 3
    rate = -decay + 1j * phase

    def integrand(taus: np.ndarray) -> np.ndarray:
        out = np.empty(taus.shape, dtype=complex)
        chunk = 2048
        for start in range(0, taus.size, chunk):
            ts = taus[start : start + chunk]
            inner = np.exp(np.multiply.outer(ts, rate)) @ cweights
            pref = np.exp(-(t - ts) * xi**2 + 1j * (t - ts) * xi**3) * (1j * xi)
            out[start : start + chunk] = pref * inner
        return out

    n = _SIMPSON_START_PANELS
    values = integrand(np.linspace(0.0, t, n + 1))
    estimate = _simpson(values, t / n)
    converged = False
    while n < max_panels:
        mid_taus = np.linspace(0.0, t, 2 * n + 1)[1::2]
        mids = integrand(mid_taus)
        merged = np.empty(2 * n + 1, dtype=complex)
        merged[0::2] = values
        merged[1::2] = mids
        values = merged
        n *= 2
        refined = _simpson(values, t / n)
        if abs(refined - estimate) <= rel_tol * max(abs(refined), 1e-300):
            estimate = refined
            converged = True
            break
        estimate = refined
    return estimate, converged
