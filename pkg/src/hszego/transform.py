"""Partial Fourier transform along the vertical axis, the frequency-sliced
scalar projector pipeline, wave-packet synthesis, the frequency-domain
pairing, and the direct dense-kernel oracle the pipeline is checked against.

Transform conventions (fixed here, asserted by tests):

* forward:  slice_t(z) = integral e^{+i t x} u(z, x) dx      (no prefactor)
* inverse:  u(z, x)    = (1/(2*pi)) integral e^{-i t x} slice_t(z) dt

With the analysis transform u_hat(z, eta) = integral e^{-i x eta} u dx this
means slice_t = u_hat(., -t): positive-t slices carry the holomorphic (Hardy)
content for all-positive signatures, and the Gaussian-weight projector is
supported on t > 0.  On the periodic vertical grid both directions are exact
inverses of each other and Parseval holds to roundoff:
sum_t dt |slice_t|^2 = 2*pi * sum_x dx |u|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as _sfft

from . import _kernels
from .bergman import gaussian_budget_window
from .core import (
    BudgetError,
    FrequencySlice,
    GridSpec,
    LambdaSignature,
    ScalarField,
    UsageError,
    composite_gauss_legendre,
)

__all__ = [
    "FrequencyField",
    "WavePacketSpec",
    "partial_ft",
    "partial_ift",
    "scalar_pipeline_project",
    "make_wave_packet",
    "frequency_pairing",
    "szego_apply_direct",
    "envelope_values",
    "packet_boundary_share",
    "OCCUPANCY_EPS",
]

#: a frequency slice counts as occupied when it carries more than this
#: fraction of the field's total spectral energy (amplitude ~1e-10); slices
#: below it are mapped to zero without projecting
OCCUPANCY_EPS = 1e-20

#: budgets are enforced only on slices above this energy share (amplitude
#: ~1e-3 of the field): window leakage of synthesized packets sits orders of
#: magnitude below this, while broadband content (white noise, ~1/N per bin)
#: is firmly gated
BUDGET_OCCUPANCY = 1e-6


@dataclass(frozen=True, eq=False)
class FrequencyField:
    """All frequency slices of a field; frequency is the trailing axis."""

    grid: GridSpec
    values: np.ndarray  # (*spatial_shape, T)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.ndim % 2 == 0:
            raise UsageError("frequency field needs 2n+1 axes")
        n = (v.ndim - 1) // 2
        want = self.grid.spatial_shape(n) + (self.grid.freq_points,)
        if v.shape != want:
            raise UsageError(f"frequency field shape {v.shape} != {want}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return (self.values.ndim - 1) // 2

    @property
    def t_nodes(self) -> np.ndarray:
        return self.grid.freq_nodes()

    def slice_at(self, index: int) -> FrequencySlice:
        return FrequencySlice(
            grid=self.grid,
            t=float(self.t_nodes[index]),
            values=self.values[..., index],
        )

    def slices(self):
        return [self.slice_at(i) for i in range(self.grid.freq_points)]

    def spectral_energy(self) -> np.ndarray:
        axes = tuple(range(self.values.ndim - 1))
        return np.sum(np.abs(self.values) ** 2, axis=axes)

    def occupied_mask(self) -> np.ndarray:
        e = self.spectral_energy()
        return e > OCCUPANCY_EPS * float(e.sum())


def _fft_phase(grid: GridSpec) -> np.ndarray:
    js = grid.freq_bins()
    N = grid.vertical_points
    return np.exp(-2j * np.pi * js * (N // 2) / N)


def partial_ft(field: ScalarField) -> FrequencyField:
    """Forward vertical transform onto the grid's frequency bins."""
    grid = field.grid
    N = grid.vertical_points
    js = grid.freq_bins()
    F = _sfft.ifft(field.values, axis=-1, workers=-1)
    out = F.take(js % N, axis=-1)
    out *= (N * grid.vertical_step) * _fft_phase(grid)
    return FrequencyField(grid=grid, values=out)


def partial_ift(freq: FrequencyField) -> ScalarField:
    """Inverse vertical transform; exact inverse of :func:`partial_ft`."""
    grid = freq.grid
    N = grid.vertical_points
    js = grid.freq_bins()
    arr = np.zeros(freq.values.shape[:-1] + (N,), dtype=complex)
    arr[..., js % N] = freq.values * np.conj(_fft_phase(grid))
    u = _sfft.fft(arr, axis=-1, workers=-1)
    u *= grid.freq_step / (2.0 * math.pi)
    return ScalarField(grid=grid, values=u)


# ---------------------------------------------------------------------------
# the scalar pipeline
# ---------------------------------------------------------------------------


def _check_budget(grid: GridSpec, sig: LambdaSignature, ts, energy) -> None:
    t_floor, t_ceiling = gaussian_budget_window(grid, sig)
    total = float(energy.sum())
    for t, e in zip(ts, energy):
        if t <= 0 or e <= BUDGET_OCCUPANCY * total:
            continue
        if t < t_floor:
            raise BudgetError(
                "gaussian-truncation",
                f"occupied slice t={t:.6g} below truncation floor {t_floor:.6g} "
                f"(spatial_radius={grid.spatial_radius} too small for this frequency)",
            )
        if t > t_ceiling:
            raise BudgetError(
                "kernel-resolution",
                f"occupied slice t={t:.6g} above resolution ceiling {t_ceiling:.6g} "
                f"(spatial step too coarse for this frequency)",
            )


def _project_freq_values(
    freq: FrequencyField, sig: LambdaSignature, enforce_budget: bool
) -> np.ndarray:
    grid = freq.grid
    n = freq.n
    m = grid.spatial_points
    ts = freq.t_nodes
    occ = freq.occupied_mask()
    if enforce_budget:
        _check_budget(grid, sig, ts, freq.spectral_energy())
    keep = [i for i in range(ts.size) if ts[i] > 0 and occ[i]]
    out = np.zeros_like(freq.values)
    if not keep:
        return out
    K = len(keep)
    slabs = np.ascontiguousarray(
        np.moveaxis(freq.values.take(keep, axis=-1), -1, 0).reshape((K,) + (m * m,) * n)
    )
    proj = _kernels.project_slices(
        slabs,
        ts[keep],
        grid.freq_step,
        grid.spatial_nodes(),
        grid.spatial_axis_weights(),
        tuple(sig.lambdas),
    )
    proj = proj.reshape((K,) + grid.spatial_shape(n))
    for k, i in enumerate(keep):
        out[..., i] = proj[k]
    return out


def scalar_pipeline_project(
    field: ScalarField, sig: LambdaSignature, enforce_budget: bool = True
) -> ScalarField:
    """Scalar projector via the frequency pipeline.

    Forward transform, Gaussian-weight projection of every occupied positive
    slice (slices at t <= 0 are annihilated by the weight's indicator), then
    the inverse transform.  Occupied slices outside the grid's budget window
    raise :class:`BudgetError` naming the violated budget, unless
    ``enforce_budget`` is off.
    """
    if sig.degenerate or not sig.all_positive():
        raise UsageError(
            "scalar pipeline needs an all-positive signature; mixed or degenerate "
            "signatures are handled by the form-level projector"
        )
    if sig.n != field.n:
        raise UsageError(f"field dimension {field.n} != signature dimension {sig.n}")
    freq = partial_ft(field)
    proj = _project_freq_values(freq, sig, enforce_budget)
    return partial_ift(FrequencyField(grid=field.grid, values=proj))


# ---------------------------------------------------------------------------
# wave packets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WavePacketSpec:
    """Synthesis recipe for a frequency-band-limited coherent packet.

    The spatial profile at frequency t is zeta^alpha * e^{-t sum|lam_j||zeta_j|^2}
    where zeta_j is conjugated for j in ``conjugated_axes``; the envelope is
    the bump (1-s^2)**order rescaled to [t_low, t_high]; ``vertical_sign``
    picks e^{-i t x} (+1, content on positive bins) or e^{+i t x} (-1).
    """

    alpha: tuple[int, ...]
    t_low: float
    t_high: float
    conjugated_axes: tuple[int, ...] = ()
    order: int = 4
    vertical_sign: int = 1

    def __post_init__(self):
        if not (0 < self.t_low < self.t_high):
            raise UsageError("envelope needs 0 < t_low < t_high")
        if self.order < 1:
            raise UsageError("envelope order must be >= 1")
        if self.vertical_sign not in (1, -1):
            raise UsageError("vertical_sign must be +1 or -1")
        axes = tuple(sorted(set(int(a) for a in self.conjugated_axes)))
        object.__setattr__(self, "conjugated_axes", axes)
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))


def envelope_values(spec: WavePacketSpec, t: np.ndarray) -> np.ndarray:
    s = (2.0 * t - (spec.t_low + spec.t_high)) / (spec.t_high - spec.t_low)
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(s) < 1
    out[inside] = (1.0 - s[inside] ** 2) ** spec.order
    return out


def _required_conjugation(sig: LambdaSignature, vertical_sign: int) -> tuple[int, ...]:
    return sig.negative_axes if vertical_sign > 0 else sig.positive_axes


def make_wave_packet(
    spec: WavePacketSpec,
    sig: LambdaSignature,
    grid: GridSpec,
    t_points: int = 64,
    bin_quadrature: bool = False,
) -> ScalarField:
    """Synthesize u(zeta, x) = integral g(t) zeta~^alpha e^{-t |lam|-Gaussian}
    e^{-i sign t x} dt on the grid (composite Gauss-Legendre in t).

    Every quadrature node contributes an exact solution of the tangential CR
    system, so the synthesized field solves it regardless of the t-rule.  The
    conjugation pattern must match the signature: square-integrable solutions
    exist only when the conjugated axes are exactly the negative ones (for
    vertical_sign +1) or exactly the positive ones (for vertical_sign -1).

    ``bin_quadrature`` collocates the envelope on the grid's frequency bins
    instead of Gauss-Legendre nodes; the packet is then exactly periodic in
    the vertical coordinate (no wrap-around seam), which refinement studies
    need.
    """
    n = sig.n
    if len(spec.alpha) != n:
        raise UsageError(f"alpha length {len(spec.alpha)} != n={n}")
    if any(a < 1 or a > n for a in spec.conjugated_axes):
        raise UsageError("conjugated_axes out of range")
    if spec.t_high >= grid.freq_max:
        raise UsageError(
            f"envelope [{spec.t_low}, {spec.t_high}] exceeds the grid frequency "
            f"range (freq_max={grid.freq_max:.6g})"
        )
    if sig.degenerate:
        raise UsageError("degenerate signature admits no square-integrable packet")
    need = _required_conjugation(sig, spec.vertical_sign)
    if spec.conjugated_axes != need:
        raise UsageError(
            f"conjugation pattern {spec.conjugated_axes} with vertical_sign="
            f"{spec.vertical_sign:+d} has a non-decaying axis; required pattern {need}"
        )
    if bin_quadrature:
        ts = grid.freq_nodes()
        sel = (ts >= spec.t_low) & (ts <= spec.t_high)
        if np.count_nonzero(sel) < 2:
            raise UsageError("envelope covers fewer than two frequency bins")
        tq = ts[sel]
        wq = np.full(tq.size, grid.freq_step)
    else:
        tq, wq = composite_gauss_legendre(spec.t_low, spec.t_high, t_points)
    g = envelope_values(spec, tq)
    x = grid.spatial_nodes()
    axes = np.meshgrid(*([x] * (2 * n)), indexing="ij")
    S = grid.spatial_points ** (2 * n)
    zeta = np.empty((S, n), dtype=complex)
    for j in range(n):
        zj = (axes[2 * j] + 1j * axes[2 * j + 1]).reshape(-1)
        zeta[:, j] = np.conj(zj) if (j + 1) in spec.conjugated_axes else zj
    gabs = np.abs(zeta) ** 2 @ np.abs(np.asarray(sig.lambdas))
    mono = np.ones(S, dtype=complex)
    for j, a in enumerate(spec.alpha):
        if a:
            mono *= zeta[:, j] ** a
    prof = np.exp(-np.outer(tq, gabs)).astype(complex)  # (T, S)
    prof *= mono[None, :]
    prof *= (wq * g)[:, None]
    tones = np.exp(-1j * spec.vertical_sign * np.outer(tq, grid.vertical_nodes()))
    u = prof.T @ tones
    return ScalarField(grid=grid, values=u.reshape(grid.field_shape(n)))


def packet_boundary_share(field: ScalarField) -> float:
    """Fraction of the field's energy sitting on the vertical boundary plane.

    Proxy for periodic wrap-around contamination of synthesized packets.
    """
    total = float(np.sum(np.abs(field.values) ** 2))
    if total == 0.0:
        return 0.0
    plane = float(np.sum(np.abs(field.values[..., 0]) ** 2))
    return plane / total


# ---------------------------------------------------------------------------
# frequency-domain pairing
# ---------------------------------------------------------------------------


def _flat_spatial(grid: GridSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    x = grid.spatial_nodes()
    axes = np.meshgrid(*([x] * (2 * n)), indexing="ij")
    S = grid.spatial_points ** (2 * n)
    zc = np.empty((S, n), dtype=complex)
    for j in range(n):
        zc[:, j] = (axes[2 * j] + 1j * axes[2 * j + 1]).reshape(-1)
    wspat = grid.spatial_weight_array(n).reshape(-1)
    return zc, wspat


def frequency_pairing(u: ScalarField, g: ScalarField, sig: LambdaSignature) -> complex:
    """(projected u | g) evaluated entirely in the frequency domain.

    c0 * integral_0^inf t^n slice_u_t(w) conj(slice_g_t(z))
    e^{-t(|lam||z-w|^2 + lam(zbar w - z wbar))} dmu(z) dmu(w) dt, computed as a
    dense double spatial sum per positive bin.  Must agree with the inner
    product of ``scalar_pipeline_project(u)`` against g.
    """
    if u.grid != g.grid or u.n != g.n:
        raise UsageError("pairing needs two fields on one grid")
    if sig.degenerate or not sig.all_positive():
        raise UsageError("pairing needs an all-positive signature")
    n = sig.n
    grid = u.grid
    fu = partial_ft(u)
    fg = partial_ft(g)
    ts = fu.t_nodes
    eu = fu.spectral_energy().sum()
    eg = fg.spectral_energy().sum()
    occ = np.logical_and(
        fu.spectral_energy() > OCCUPANCY_EPS * eu,
        fg.spectral_energy() > OCCUPANCY_EPS * eg,
    )
    keep = [i for i, t in enumerate(ts) if t > 0 and occ[i]]
    if not keep:
        return 0.0 + 0.0j
    zc, wspat = _flat_spatial(grid, n)
    S = zc.shape[0]
    if S * S > 4_000_000:
        raise UsageError("dense pairing oracle is meant for micro-grids (S^2 too large)")
    Q = _kernels.phase_quadratic(zc, sig.lambdas)
    c0 = sig.product_abs() / (2.0 * math.pi ** (n + 1))
    su = np.stack([fu.values[..., i].reshape(-1) for i in keep])
    sg = np.stack([fg.values[..., i].reshape(-1) for i in keep])
    tk = ts[keep]
    coeffs = c0 * grid.freq_step * tk**n
    return complex(_kernels.pairing_sum(Q, su, sg, tk, coeffs, wspat))


# ---------------------------------------------------------------------------
# direct dense-kernel route (cross-check oracle)
# ---------------------------------------------------------------------------


def _plateau_cutoff(t: np.ndarray, epsilon: float, order: int = 4) -> np.ndarray:
    """Smooth cutoff: 1 on [0, 1/eps], bump taper to 0 at 2/eps."""
    th = epsilon * np.asarray(t, dtype=float)
    out = np.zeros_like(th)
    out[th <= 1.0] = 1.0
    mid = (th > 1.0) & (th < 2.0)
    out[mid] = (1.0 - (th[mid] - 1.0) ** 2) ** order
    return out


def szego_apply_direct(
    field: ScalarField,
    sig: LambdaSignature,
    epsilon: float,
    t_points: int = 512,
) -> ScalarField:
    """Apply the projector by direct dense quadrature of the oscillatory kernel.

    K(x, y) = c0 * integral_0^inf t^n chi(eps*t) e^{i t phi_minus(x, y)} dt with
    the smooth plateau cutoff chi, evaluated node-by-node over the full grid
    (vertical differences wrapped to the periodic cell).  For band-limited
    inputs whose occupied bins lie inside the plateau [0, 1/eps] this equals
    the un-damped projector; it is the independent oracle for the pipeline.
    """
    if epsilon <= 0:
        raise UsageError("epsilon must be > 0")
    if sig.degenerate or not sig.all_positive():
        raise UsageError("direct route needs an all-positive signature")
    n = sig.n
    if n != field.n:
        raise UsageError("field dimension does not match signature")
    grid = field.grid
    zc, wspat = _flat_spatial(grid, n)
    S = zc.shape[0]
    if S * S > 4_000_000:
        raise UsageError("direct kernel route is a micro-grid oracle (S^2 too large)")
    Q = _kernels.phase_quadratic(zc, sig.lambdas)
    t_max = 2.0 / epsilon
    nyquist = math.pi / grid.vertical_step
    if t_max > nyquist:
        raise UsageError(
            f"cutoff support 2/eps={t_max:.4g} exceeds the vertical Nyquist "
            f"frequency {nyquist:.4g}; increase eps or refine the vertical axis"
        )
    tn, tw = composite_gauss_legendre(0.0, t_max, t_points)
    c0 = sig.product_abs() / (2.0 * math.pi ** (n + 1))
    cq = c0 * tw * tn**n * _plateau_cutoff(tn, epsilon)
    xk = grid.vertical_nodes()
    Rv = grid.vertical_radius
    d = xk[None, :] - xk[:, None]
    dwrap = (d + Rv) % (2.0 * Rv) - Rv
    N = grid.vertical_points
    uw = (field.values.reshape(S, N) * wspat[:, None]) * grid.vertical_step
    out = _kernels.direct_kernel_apply(Q, uw, dwrap, tn, cq)
    return ScalarField(grid=grid, values=out.reshape(grid.field_shape(n)))
