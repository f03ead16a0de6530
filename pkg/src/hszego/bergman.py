"""Weighted Bergman kernel on C^n with diagonal Gaussian weight, slice-wise
projection, the Gaussian reproducing identity, and the monomial-integral
finiteness classifier with its numerical divergence witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    FrequencySlice,
    GridSpec,
    LambdaSignature,
    MultiIndex,
    TRAPEZOID,
    UsageError,
    composite_gauss_legendre,
)

__all__ = [
    "WeightSpec",
    "SignedWeightPattern",
    "bergman_kernel",
    "bergman_project",
    "project_slice_values",
    "gaussian_reproducing_check",
    "monomial_integral",
    "truncated_monomial_integral",
    "divergence_witness",
    "default_radius_sweep",
    "gaussian_budget_window",
    "BUDGET_TOL",
]

#: pointwise tolerance defining the truncation/resolution budgets
BUDGET_TOL = 1e-10
_LOG_TOL = -math.log(BUDGET_TOL)


@dataclass(frozen=True)
class WeightSpec:
    """Gaussian weight t * sum(lam_j |w_j|^2) at a fixed frequency t.

    The kernel with this weight is identically zero for t <= 0.
    """

    sig: LambdaSignature
    t: float

    def require_positive_sig(self) -> None:
        if not self.sig.all_positive():
            raise UsageError("Bergman weight needs an all-positive signature")


@dataclass(frozen=True)
class SignedWeightPattern:
    """Signed quadratic form sum_{k in J} lam_k|z_k|^2 - sum_{k not in J} lam_k|z_k|^2."""

    sig: LambdaSignature
    J: MultiIndex

    def __post_init__(self):
        self.J.validate_bound(self.sig.n)

    def signs(self) -> np.ndarray:
        """Per-axis sign s_j: +1 for j in J, -1 otherwise."""
        return np.array(
            [1.0 if self.J.contains(j) else -1.0 for j in range(1, self.sig.n + 1)]
        )


# ---------------------------------------------------------------------------
# kernel and slice projection
# ---------------------------------------------------------------------------


def bergman_kernel(z, w, weight: WeightSpec) -> complex:
    """Pointwise weighted Bergman kernel; zero for t <= 0.

    K(z, w) = 1_(t>0) * (t^n/pi^n) * prod(lam) *
              exp(-t*sum lam_j|w_j-z_j|^2 - t*sum lam_j*(w_j zbar_j - wbar_j z_j)).
    """
    weight.require_positive_sig()
    t = weight.t
    if t <= 0:
        return 0.0 + 0.0j
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    lam = np.asarray(weight.sig.lambdas)
    if z.shape != w.shape or z.shape != (weight.sig.n,):
        raise UsageError("z, w must both have the signature's dimension")
    expo = -t * np.sum(lam * np.abs(w - z) ** 2) - t * np.sum(
        lam * (w * np.conj(z) - np.conj(w) * z)
    )
    pref = (t**weight.sig.n / math.pi**weight.sig.n) * float(np.prod(lam))
    return complex(pref * np.exp(expo))


def project_slice_values(
    values: np.ndarray, t: float, lams: tuple[float, ...], grid: GridSpec
) -> np.ndarray:
    """Project one spatial array at frequency t; zero array for t <= 0."""
    n = len(lams)
    if t <= 0:
        return np.zeros_like(np.asarray(values, dtype=complex))
    m = grid.spatial_points
    slab = np.asarray(values, dtype=complex).reshape((1,) + (m * m,) * n)
    out = _kernels.project_slices(
        slab,
        np.array([float(t)]),
        float(t),
        grid.spatial_nodes(),
        grid.spatial_axis_weights(),
        tuple(lams),
    )
    return out.reshape(grid.spatial_shape(n))


def bergman_project(slice: FrequencySlice, weight: WeightSpec, grid: GridSpec) -> FrequencySlice:
    """Slice-level projection v(z) = integral K(z, w) u(w) dmu(w) by quadrature."""
    weight.require_positive_sig()
    if slice.grid != grid:
        raise UsageError("slice grid does not match the supplied grid")
    if slice.n != weight.sig.n:
        raise UsageError("slice dimension does not match the signature")
    out = project_slice_values(slice.values, weight.t, weight.sig.lambdas, grid)
    return FrequencySlice(grid=grid, t=slice.t, values=out)


# ---------------------------------------------------------------------------
# Gaussian reproducing identity
# ---------------------------------------------------------------------------


def _spatial_mesh(grid: GridSpec, n: int) -> np.ndarray:
    """Complex coordinates of the spatial tensor grid, shape (*spatial, n)."""
    x = grid.spatial_nodes()
    axes = np.meshgrid(*([x] * (2 * n)), indexing="ij")
    return np.stack([axes[2 * j] + 1j * axes[2 * j + 1] for j in range(n)], axis=-1)


def _eval_poly(coeffs, pts: np.ndarray) -> np.ndarray:
    """Evaluate sum c_alpha z^alpha on points of shape (..., n)."""
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for alpha, c in coeffs.items():
        term = np.full(pts.shape[:-1], complex(c))
        for ax, a in enumerate(alpha):
            if a:
                term = term * pts[..., ax] ** a
        out += term
    return out


def gaussian_reproducing_check(
    g_coeffs, z, t: float, sig: LambdaSignature, grid: GridSpec
) -> tuple[complex, complex]:
    """Both sides of the Gaussian reproducing identity at the point z.

    lhs = e^{-t*sum|lam||z|^2} g(z);
    rhs = (prod|lam|/pi^n) * t^n * integral e^{-t|lam||z-w|^2 - t lam(zbar w - z wbar)}
          e^{-t|lam||w|^2} g(w) dmu(w), evaluated by the grid quadrature.
    Holomorphic g with finite weighted norm must give lhs == rhs.
    """
    if t <= 0:
        raise UsageError(f"t must be > 0, got {t}")
    if not sig.all_positive():
        raise UsageError("reproducing identity check needs an all-positive signature")
    n = sig.n
    z = np.asarray(z, dtype=complex)
    if z.shape != (n,):
        raise UsageError("z must have the signature's dimension")
    lam = np.asarray(sig.lambdas)
    lhs = complex(np.exp(-t * np.sum(lam * np.abs(z) ** 2)) * _eval_poly(g_coeffs, z[None, :])[0])
    W = _spatial_mesh(grid, n)
    wts = grid.spatial_weight_array(n)
    expo = (
        -t * np.einsum("j,...j->...", lam, np.abs(W - z) ** 2)
        - t * np.einsum("j,...j->...", lam, np.conj(z) * W - z * np.conj(W))
        - t * np.einsum("j,...j->...", lam, np.abs(W) ** 2)
    )
    integ = np.sum(np.exp(expo) * _eval_poly(g_coeffs, W) * wts)
    rhs = complex((sig.product_abs() / math.pi**n) * t**n * integ)
    return lhs, rhs


# ---------------------------------------------------------------------------
# monomial integrals: classifier, closed form, divergence witness
# ---------------------------------------------------------------------------


def _axis_coefficients(eta: float, pattern: SignedWeightPattern) -> np.ndarray:
    lam = np.asarray(pattern.sig.lambdas)
    return 2.0 * eta * pattern.signs() * lam


def monomial_integral(alpha, eta: float, pattern: SignedWeightPattern) -> float:
    """Classify/evaluate integral |z^alpha|^2 e^{-2 eta ltilde|z|^2} dmu(z).

    Returns ``math.inf`` when the integral diverges (some lambda_j == 0, or
    some per-axis exponent coefficient 2*eta*s_j*lam_j <= 0); otherwise the
    closed-form value prod_j 2*pi*alpha_j! / c_j^(alpha_j+1), which carries
    the 2^n measure factor (2*pi per axis).
    """
    n = pattern.sig.n
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise UsageError("alpha must be a length-n tuple of nonnegative integers")
    if pattern.sig.degenerate:
        return math.inf
    c = _axis_coefficients(eta, pattern)
    if np.any(c <= 0):
        return math.inf
    val = 1.0
    for a, cj in zip(alpha, c):
        val *= 2.0 * math.pi * math.factorial(a) / cj ** (a + 1)
    return val


def truncated_monomial_integral(
    alpha, eta: float, pattern: SignedWeightPattern, radius: float, points: int = 64
) -> float:
    """The same integral restricted to the ball |z| <= radius.

    Per-axis polar reduction gives (2*pi)^n times an integral of
    prod rho_j^alpha_j e^{-c_j rho_j} over the simplex sum rho_j <= radius^2,
    evaluated by nested Gauss-Legendre quadrature (vectorized across levels).
    Decaying axes are integrated only out to ~48 e-folds, which keeps the
    nodes where the integrand lives even on very large simplexes.
    """
    n = pattern.sig.n
    alpha = tuple(int(a) for a in alpha)
    c = _axis_coefficients(eta, pattern)
    if pattern.sig.degenerate:
        c = np.where(np.asarray(pattern.sig.lambdas) == 0, 0.0, c)
    S = radius * radius
    x01, w01 = np.polynomial.legendre.leggauss(points)
    x01 = 0.5 * (x01 + 1.0)
    w01 = 0.5 * w01

    def level_val(level: int, budget: np.ndarray) -> np.ndarray:
        cap = budget if c[level] <= 0 else np.minimum(budget, 48.0 / c[level])
        nodes = cap[..., None] * x01
        wts = cap[..., None] * w01
        f = nodes ** alpha[level] * np.exp(-c[level] * nodes)
        if level == n - 1:
            return np.sum(wts * f, axis=-1)
        inner = level_val(level + 1, budget[..., None] - nodes)
        return np.sum(wts * f * inner, axis=-1)

    val = level_val(0, np.array(S))
    return float((2.0 * math.pi) ** n * val)


def default_radius_sweep(alpha, eta: float, pattern: SignedWeightPattern):
    """Radius sweep for the divergence witness.

    Exponentially divergent cases (some axis coefficient < 0) grow past any
    threshold on (1..5); cases that diverge only polynomially (a zero
    coefficient from eta == 0 or a zero lambda) need the sweep extended.
    """
    c = _axis_coefficients(eta, pattern)
    if pattern.sig.degenerate:
        c = np.where(np.asarray(pattern.sig.lambdas) == 0, 0.0, c)
    if np.any(c < 0):
        return (1.0, 2.0, 3.0, 4.0, 5.0)
    return (1.0, 2.0, 5.0, 10.0, 50.0)


def divergence_witness(alpha, eta: float, pattern: SignedWeightPattern, radii) -> np.ndarray:
    """Truncated integrals over balls of the given radii for a divergent case.

    Only valid when :func:`monomial_integral` classified the case Infinite;
    calling it on a finite case is a usage error.  The returned sequence is
    strictly increasing, and grows without bound as the radii do.
    """
    if not math.isinf(monomial_integral(alpha, eta, pattern)):
        raise UsageError("divergence_witness requires an Infinite classification")
    radii = tuple(float(r) for r in radii)
    if any(b <= a for a, b in zip(radii, radii[1:])) or any(r <= 0 for r in radii):
        raise UsageError("radii must be positive and strictly increasing")
    return np.array([truncated_monomial_integral(alpha, eta, pattern, r) for r in radii])


def witness_is_increasing(values) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# discretization budgets
# ---------------------------------------------------------------------------


def gaussian_budget_window(grid: GridSpec, sig: LambdaSignature) -> tuple[float, float]:
    """Frequency window [t_floor, t_ceiling] the grid can handle at BUDGET_TOL.

    Below t_floor the Gaussian e^{-2 t lam_min R^2} truncates above the
    budget; above t_ceiling the kernel is undersampled (trapezoid error
    e^{-pi^2/(t lam_max h^2)} exceeds it).  Uses |lam|; signature signs do
    not matter for the widths.
    """
    lam = np.abs(np.asarray(sig.lambdas))
    lam_min, lam_max = float(np.min(lam)), float(np.max(lam))
    if lam_min == 0.0:
        return math.inf, 0.0
    R = grid.spatial_radius
    t_floor = _LOG_TOL / (2.0 * lam_min * R * R)
    nodes = grid.spatial_nodes()
    h = float(np.max(np.diff(nodes)))
    t_ceiling = math.pi**2 / (_LOG_TOL * lam_max * h * h)
    return t_floor, t_ceiling
