"""Shared domain types, measure conventions, and grid/quadrature descriptors.

Conventions used throughout the package
---------------------------------------
* A point of H = C^n x R is x = (z, x_last) with z_j = x_{2j-1} + i*x_{2j}.
* The volume form carries a factor 2^n:  dmu_H = 2^n dx_1 ... dx_{2n+1}, and the
  spatial measure on C^n is dmu(z) = 2^n dx_1 ... dx_{2n}.  That factor lives in
  the quadrature weights produced here and nowhere else.
* Grids are axis-uniform tensor products.  Spatial axes are closed symmetric
  intervals [-R, R]; the vertical axis is periodic with nodes -R_v + k*h_v,
  k = 0..N-1, so the fast transform applies.
* The frequency axis consists of the discrete Fourier bins of the vertical
  axis.  Its orientation: the slice at frequency t stores the vertical
  transform integral(e^{+i t x} u(z, x) dx); equivalently, with the analysis
  transform u_hat(z, eta) = integral(e^{-i x eta} u dx), the slice at t is
  u_hat(z, -t).  Positive-t slices are where holomorphic (Hardy) content
  lives when all structure constants are positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

__all__ = [
    "UsageError",
    "DomainError",
    "BudgetError",
    "LambdaSignature",
    "HeisenbergPoint",
    "MultiIndex",
    "GridSpec",
    "ScalarField",
    "FormField",
    "FrequencySlice",
    "volume_weight",
    "multiindex_complement",
    "inner",
    "norm",
    "composite_gauss_legendre",
]

TRAPEZOID = "uniform-trapezoid"
GAUSS_LEGENDRE = "gauss-legendre"


class UsageError(ValueError):
    """Caller violated a precondition (bad arguments, mismatched grids)."""


class DomainError(ValueError):
    """Mathematically undefined request (e.g. kernel of a degenerate structure)."""


class BudgetError(RuntimeError):
    """A quantitative discretization budget is violated.

    ``budget_name`` identifies which budget; the message carries the numbers.
    """

    def __init__(self, budget_name: str, message: str):
        super().__init__(message)
        self.budget_name = budget_name


# ---------------------------------------------------------------------------
# signature / points / multi-indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaSignature:
    """The vector of structure constants (lambda_1, ..., lambda_n).

    Signature counts are derived on construction: ``n_minus``/``n_plus`` count
    strictly negative/positive entries and ``degenerate`` flags a zero entry.
    """

    lambdas: tuple[float, ...]
    n_minus: int = field(init=False)
    n_plus: int = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        if len(lams) == 0:
            raise UsageError("signature needs at least one entry")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "n_minus", sum(1 for v in lams if v < 0))
        object.__setattr__(self, "n_plus", sum(1 for v in lams if v > 0))
        object.__setattr__(self, "degenerate", any(v == 0 for v in lams))

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def negative_axes(self) -> tuple[int, ...]:
        """1-based axes with negative entries, ascending."""
        return tuple(j + 1 for j, v in enumerate(self.lambdas) if v < 0)

    @property
    def positive_axes(self) -> tuple[int, ...]:
        return tuple(j + 1 for j, v in enumerate(self.lambdas) if v > 0)

    def abs(self) -> "LambdaSignature":
        """The auxiliary all-positive signature |lambda_j| (the hat structure)."""
        return LambdaSignature(tuple(abs(v) for v in self.lambdas))

    def all_positive(self) -> bool:
        return self.n_plus == self.n

    def product_abs(self) -> float:
        return float(np.prod([abs(v) for v in self.lambdas]))


@dataclass(frozen=True)
class HeisenbergPoint:
    """A point x = (z, x_last) of C^n x R."""

    z: tuple[complex, ...]
    x_last: float

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "x_last", float(self.x_last))

    @property
    def n(self) -> int:
        return len(self.z)


@dataclass(frozen=True, order=True)
class MultiIndex:
    """A strictly increasing multi-index with 1-based entries.

    The empty index (q = 0, scalar component) is allowed.
    """

    entries: tuple[int, ...] = ()

    def __post_init__(self):
        ent = tuple(int(v) for v in self.entries)
        if any(v < 1 for v in ent):
            raise UsageError(f"multi-index entries must be >= 1, got {ent}")
        if any(a >= b for a, b in zip(ent, ent[1:])):
            raise UsageError(f"multi-index must be strictly increasing, got {ent}")
        object.__setattr__(self, "entries", ent)

    @property
    def q(self) -> int:
        return len(self.entries)

    def contains(self, axis: int) -> bool:
        return axis in self.entries

    def validate_bound(self, n: int) -> None:
        if any(v > n for v in self.entries):
            raise UsageError(f"multi-index {self.entries} exceeds dimension n={n}")

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.entries) + ")"


def multiindex_complement(J: MultiIndex, n: int) -> MultiIndex:
    """Strictly increasing complement of J inside {1, ..., n}."""
    J.validate_bound(n)
    present = set(J.entries)
    return MultiIndex(tuple(j for j in range(1, n + 1) if j not in present))


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def _derived_freq(vertical_radius: float, vertical_points: int) -> tuple[float, int]:
    delta = math.pi / vertical_radius
    return (vertical_points // 2) * delta, vertical_points


@dataclass(frozen=True)
class GridSpec:
    """Axis-uniform tensor grid and quadrature descriptor.

    ``spatial_points`` counts nodes per real spatial axis on the closed box
    [-spatial_radius, spatial_radius].  The vertical axis is periodic with
    ``vertical_points`` nodes of spacing 2*vertical_radius/vertical_points.
    The frequency axis is the vertical axis' Fourier-bin axis; ``freq_max``
    and ``freq_points`` are derived from it and validated on construction
    (use :meth:`make` to fill them in).
    """

    spatial_radius: float
    spatial_points: int
    vertical_radius: float
    vertical_points: int
    freq_max: float
    freq_points: int
    quadrature_rule: str = TRAPEZOID

    def __post_init__(self):
        if self.spatial_points < 2 or self.vertical_points < 2 or self.freq_points < 2:
            raise UsageError("all point counts must be >= 2")
        if self.spatial_radius <= 0 or self.vertical_radius <= 0 or self.freq_max <= 0:
            raise UsageError("all radii and freq_max must be > 0")
        if self.quadrature_rule not in (TRAPEZOID, GAUSS_LEGENDRE):
            raise UsageError(f"unknown quadrature rule {self.quadrature_rule!r}")
        fmax, fpts = _derived_freq(self.vertical_radius, self.vertical_points)
        if self.freq_points != fpts or abs(self.freq_max - fmax) > 1e-9 * max(1.0, fmax):
            raise UsageError(
                "frequency axis must match the vertical axis' Fourier bins: "
                f"expected freq_points={fpts}, freq_max={fmax:.12g}"
            )

    @classmethod
    def make(
        cls,
        spatial_radius: float,
        spatial_points: int,
        vertical_radius: float,
        vertical_points: int,
        quadrature_rule: str = TRAPEZOID,
    ) -> "GridSpec":
        fmax, fpts = _derived_freq(vertical_radius, vertical_points)
        return cls(
            spatial_radius=spatial_radius,
            spatial_points=spatial_points,
            vertical_radius=vertical_radius,
            vertical_points=vertical_points,
            freq_max=fmax,
            freq_points=fpts,
            quadrature_rule=quadrature_rule,
        )

    # -- nodes ---------------------------------------------------------------

    def spatial_nodes(self) -> np.ndarray:
        """Per-axis spatial nodes, exactly antisymmetric about 0."""
        m, R = self.spatial_points, self.spatial_radius
        if self.quadrature_rule == TRAPEZOID:
            h = 2.0 * R / (m - 1)
            return (np.arange(m) - (m - 1) / 2.0) * h
        x, _ = np.polynomial.legendre.leggauss(m)
        x = 0.5 * (x - x[::-1]) * R  # enforce exact antisymmetry
        return x

    def spatial_axis_weights(self) -> np.ndarray:
        """Per-axis 1-D quadrature weights (no 2^n factor)."""
        m, R = self.spatial_points, self.spatial_radius
        if self.quadrature_rule == TRAPEZOID:
            h = 2.0 * R / (m - 1)
            w = np.full(m, h)
            w[0] = w[-1] = h / 2.0
            return w
        _, w = np.polynomial.legendre.leggauss(m)
        return 0.5 * (w + w[::-1]) * R

    def vertical_nodes(self) -> np.ndarray:
        N = self.vertical_points
        h = self.vertical_step
        return (np.arange(N) - N // 2) * h

    @property
    def vertical_step(self) -> float:
        return 2.0 * self.vertical_radius / self.vertical_points

    # -- frequency axis --------------------------------------------------------

    @property
    def freq_step(self) -> float:
        return math.pi / self.vertical_radius

    def freq_bins(self) -> np.ndarray:
        """Integer bin labels j, ascending; frequencies are j * freq_step."""
        N = self.vertical_points
        return np.arange(-(N // 2), N - N // 2)

    def freq_nodes(self) -> np.ndarray:
        return self.freq_bins() * self.freq_step

    # -- assembled weights ------------------------------------------------------

    def spatial_weight_array(self, n: int) -> np.ndarray:
        """Tensor weights over the 2n spatial axes, including the 2^n factor."""
        w1 = self.spatial_axis_weights()
        out = np.array(2.0**n)
        for _ in range(2 * n):
            out = np.multiply.outer(out, w1)
        return out

    def full_weight_array(self, n: int) -> np.ndarray:
        """Weights over all 2n+1 axes: spatial (with 2^n) times vertical step."""
        return self.spatial_weight_array(n)[..., None] * self.vertical_step

    def spatial_shape(self, n: int) -> tuple[int, ...]:
        return (self.spatial_points,) * (2 * n)

    def field_shape(self, n: int) -> tuple[int, ...]:
        return self.spatial_shape(n) + (self.vertical_points,)


def volume_weight(grid: GridSpec, index: tuple[int, ...]) -> float:
    """Quadrature weight at a grid node, including the 2^n measure factor.

    An index of length 2n+1 addresses a node of the full grid (spatial axes
    then vertical); length 2n addresses the spatial-only measure on C^n.
    """
    k = len(index)
    if k % 2 == 1:
        n = (k - 1) // 2
        vertical = True
    else:
        n = k // 2
        vertical = False
    if n < 1:
        raise UsageError("index must address at least one complex axis")
    w1 = grid.spatial_axis_weights()
    m = grid.spatial_points
    total = 2.0**n
    for i in range(2 * n):
        ix = index[i]
        if not 0 <= ix < m:
            raise UsageError(f"spatial index {ix} out of range [0, {m})")
        total *= w1[ix]
    if vertical:
        iv = index[-1]
        if not 0 <= iv < grid.vertical_points:
            raise UsageError(f"vertical index {iv} out of range [0, {grid.vertical_points})")
        total *= grid.vertical_step
    return float(total)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


def _lock(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A sampled scalar function on the full grid (spatial axes, then vertical)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = _lock(self.values)
        ndim = v.ndim
        if ndim < 3 or ndim % 2 == 0:
            raise UsageError(f"scalar field needs 2n+1 axes, got shape {v.shape}")
        n = (ndim - 1) // 2
        if v.shape != self.grid.field_shape(n):
            raise UsageError(
                f"field shape {v.shape} does not match grid shape {self.grid.field_shape(n)}"
            )
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return (self.values.ndim - 1) // 2


@dataclass(frozen=True, eq=False)
class FrequencySlice:
    """Spatial data at one fixed frequency t."""

    grid: GridSpec
    t: float
    values: np.ndarray

    def __post_init__(self):
        v = _lock(self.values)
        if v.ndim % 2 == 1:
            raise UsageError(f"frequency slice needs 2n axes, got shape {v.shape}")
        n = v.ndim // 2
        if v.shape != self.grid.spatial_shape(n):
            raise UsageError(
                f"slice shape {v.shape} does not match grid spatial shape "
                f"{self.grid.spatial_shape(n)}"
            )
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.ndim // 2


@dataclass(frozen=True, eq=False)
class FormField:
    """A (0,q)-form: strictly increasing multi-indices -> scalar component fields."""

    grid: GridSpec
    q: int
    components: Mapping[MultiIndex, ScalarField]

    def __post_init__(self):
        comps = dict(self.components)
        for J, f in comps.items():
            if J.q != self.q:
                raise UsageError(f"component {J} has length {J.q}, expected q={self.q}")
            if f.grid != self.grid:
                raise UsageError(f"component {J} lives on a different grid")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        for f in self.components.values():
            return f.n
        raise UsageError("empty form has no intrinsic dimension; keep a zero component")

    def component(self, J: MultiIndex) -> ScalarField | None:
        return self.components.get(J)

    def iter_components(self) -> Iterator[tuple[MultiIndex, ScalarField]]:
        return iter(sorted(self.components.items()))


# ---------------------------------------------------------------------------
# inner products and generic quadrature
# ---------------------------------------------------------------------------


def inner(u: ScalarField, v: ScalarField) -> complex:
    """Discrete L^2 pairing (u | v) = sum u * conj(v) * weights."""
    if u.grid != v.grid or u.n != v.n:
        raise UsageError("inner product needs fields on one grid")
    w = u.grid.full_weight_array(u.n)
    return complex(np.sum(u.values * np.conj(v.values) * w))


def norm(u: ScalarField) -> float:
    w = u.grid.full_weight_array(u.n)
    return float(np.sqrt(np.sum(np.abs(u.values) ** 2 * w).real))


def slice_inner(a: FrequencySlice, b: FrequencySlice) -> complex:
    if a.grid != b.grid or a.n != b.n:
        raise UsageError("slice inner product needs slices on one grid")
    w = a.grid.spatial_weight_array(a.n)
    return complex(np.sum(a.values * np.conj(b.values) * w))


def slice_norm(a: FrequencySlice) -> float:
    w = a.grid.spatial_weight_array(a.n)
    return float(np.sqrt(np.sum(np.abs(a.values) ** 2 * w).real))


def form_inner(u: FormField, v: FormField) -> complex:
    if u.grid != v.grid or u.q != v.q:
        raise UsageError("form inner product needs forms of one degree on one grid")
    keys = set(u.components) & set(v.components)
    total = 0.0 + 0.0j
    for J in sorted(keys):
        total += inner(u.components[J], v.components[J])
    return total


def form_norm(u: FormField) -> float:
    return math.sqrt(sum(norm(f) ** 2 for f in u.components.values()))


def composite_gauss_legendre(
    a: float, b: float, total_points: int, points_per_panel: int = 16
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [a, b] with >= total_points nodes."""
    panels = max(1, -(-int(total_points) // points_per_panel))
    xg, wg = np.polynomial.legendre.leggauss(points_per_panel)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (half[:, None] * xg[None, :] + mid[:, None]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights
