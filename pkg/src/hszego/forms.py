"""(0,q)-form machinery: tangential CR operators and residual systems,
component extraction, the conjugation/reflection reduction to the auxiliary
all-positive structure, assembly of the general projector, and the
vanishing-evidence classifier report.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bergman import SignedWeightPattern, monomial_integral
from .core import (
    FormField,
    GridSpec,
    LambdaSignature,
    MultiIndex,
    ScalarField,
    TRAPEZOID,
    UsageError,
)
from .transform import FrequencyField, scalar_pipeline_project

__all__ = [
    "CrOperatorChoice",
    "apply_cr",
    "interior_mask",
    "interior_norm",
    "cr_system_residual",
    "frequency_cr_residual",
    "tau_minus",
    "tau_plus",
    "reflect_to_hat",
    "szego_project_form",
    "vanishing_reason",
    "VanishingEntry",
    "VanishingReport",
    "vanishing_evidence",
    "multi_exponents",
]

_BOUNDARY_BAND = 2  # nodes excluded per spatial side by the 4th-order stencil


@dataclass(frozen=True)
class CrOperatorChoice:
    """One of the frame fields Z_j / Zbar_j, in the standard or hat structure.

    Z_j = d/dz_j - i*lam_j*zbar_j*d/dx_last; the hat structure replaces lam_j
    by |lam_j|.
    """

    kind: str  # "Z" or "Zbar"
    axis: int  # 1-based
    structure: str = "standard"

    def __post_init__(self):
        if self.kind not in ("Z", "Zbar"):
            raise UsageError("kind must be 'Z' or 'Zbar'")
        if self.structure not in ("standard", "hat"):
            raise UsageError("structure must be 'standard' or 'hat'")
        if self.axis < 1:
            raise UsageError("axis is 1-based")


def _d4(vals: np.ndarray, axis: int, h: float, periodic: bool) -> np.ndarray:
    """4th-order centered first derivative along one axis."""
    if periodic:
        return (
            -np.roll(vals, -2, axis)
            + 8.0 * np.roll(vals, -1, axis)
            - 8.0 * np.roll(vals, 1, axis)
            + np.roll(vals, 2, axis)
        ) / (12.0 * h)
    out = np.zeros_like(vals)
    L = vals.shape[axis]

    def sh(k):
        s = [slice(None)] * vals.ndim
        s[axis] = slice(2 + k, L - 2 + k)
        return vals[tuple(s)]

    core = [slice(None)] * vals.ndim
    core[axis] = slice(2, -2)
    out[tuple(core)] = (-sh(2) + 8.0 * sh(1) - 8.0 * sh(-1) + sh(-2)) / (12.0 * h)
    return out


def _require_fd_grid(grid: GridSpec) -> None:
    if grid.quadrature_rule != TRAPEZOID:
        raise UsageError("finite differences need the uniform-trapezoid rule")
    if grid.spatial_points < 5 or grid.vertical_points < 5:
        raise UsageError("4th-order centered differences need >= 5 nodes per axis")


def _axis_coordinate(grid: GridSpec, n: int, axis: int) -> np.ndarray:
    """Broadcastable coordinate array of one real spatial axis (0-based)."""
    x = grid.spatial_nodes()
    shape = [1] * (2 * n + 1)
    shape[axis] = x.size
    return x.reshape(shape)


def apply_cr(field: ScalarField, op: CrOperatorChoice, sig: LambdaSignature) -> ScalarField:
    """Apply Z_j or Zbar_j by 4th-order centered differences.

    Spatial derivatives are formed on interior nodes only (a 2-node boundary
    band is zeroed and excluded from residual norms); the vertical derivative
    uses the periodic stencil.
    """
    _require_fd_grid(field.grid)
    n = field.n
    j = op.axis
    if j > n:
        raise UsageError(f"axis {j} exceeds field dimension n={n}")
    if sig.n != n:
        raise UsageError("signature dimension mismatch")
    lam = sig.lambdas[j - 1]
    if op.structure == "hat":
        lam = abs(lam)
    grid = field.grid
    hs = float(np.diff(grid.spatial_nodes())[0])
    hv = grid.vertical_step
    v = field.values
    ax_re, ax_im = 2 * (j - 1), 2 * (j - 1) + 1
    d_re = _d4(v, ax_re, hs, periodic=False)
    d_im = _d4(v, ax_im, hs, periodic=False)
    d_v = _d4(v, 2 * n, hv, periodic=True)
    xre = _axis_coordinate(grid, n, ax_re)
    xim = _axis_coordinate(grid, n, ax_im)
    zj = xre + 1j * xim
    if op.kind == "Z":
        out = 0.5 * (d_re - 1j * d_im) - 1j * lam * np.conj(zj) * d_v
    else:
        out = 0.5 * (d_re + 1j * d_im) + 1j * lam * zj * d_v
    mask = interior_mask(grid, n)
    out = out * mask[..., None]
    return ScalarField(grid=grid, values=out)


def interior_mask(grid: GridSpec, n: int) -> np.ndarray:
    """Boolean mask over the spatial grid, False on the 2-node boundary band."""
    m = grid.spatial_points
    one = np.zeros(m, dtype=bool)
    one[_BOUNDARY_BAND : m - _BOUNDARY_BAND] = True
    mask = np.array(True)
    for _ in range(2 * n):
        mask = np.logical_and.outer(mask, one)
    return mask


def interior_norm(field: ScalarField) -> float:
    """Weighted L^2 norm restricted to interior spatial nodes."""
    n = field.n
    w = field.grid.full_weight_array(n) * interior_mask(field.grid, n)[..., None]
    return float(np.sqrt(np.sum(np.abs(field.values) ** 2 * w).real))


def cr_system_residual(u: FormField, sig: LambdaSignature) -> dict[MultiIndex, float]:
    """Per-component interior residual of the tangential CR membership system.

    For component u_J: Z_j u_J must vanish for j in J and Zbar_j u_J for j
    not in J; the returned number is the root-sum-square of the interior
    norms of all these fields.
    """
    out: dict[MultiIndex, float] = {}
    n = sig.n
    for J, comp in u.iter_components():
        J.validate_bound(n)
        acc = 0.0
        for j in range(1, n + 1):
            kind = "Z" if J.contains(j) else "Zbar"
            r = apply_cr(comp, CrOperatorChoice(kind=kind, axis=j), sig)
            acc += interior_norm(r) ** 2
        out[J] = math.sqrt(acc)
    return out


def frequency_cr_residual(
    freq: FrequencyField, J: MultiIndex, sig: LambdaSignature
) -> float:
    """Aggregated slice-wise residual of the frequency-domain system.

    With the slice orientation used here (slice t stores the transform at
    e^{+i t x}), membership requires per slice t:
    (d/dz_j - lam_j zbar_j t) slice = 0 for j in J and
    (d/dzbar_j + lam_j z_j t) slice = 0 for j not in J.
    Spatial derivatives only; slices are aggregated with the frequency-axis
    weight.
    """
    grid = freq.grid
    _require_fd_grid(grid)
    n = freq.n
    J.validate_bound(n)
    if sig.n != n:
        raise UsageError("signature dimension mismatch")
    hs = float(np.diff(grid.spatial_nodes())[0])
    wspat = grid.spatial_weight_array(n) * interior_mask(grid, n)
    ts = freq.t_nodes
    total = 0.0
    x = grid.spatial_nodes()
    for j in range(1, n + 1):
        ax_re, ax_im = 2 * (j - 1), 2 * (j - 1) + 1
        shape = [1] * (2 * n + 1)
        shape[ax_re] = x.size
        xre = x.reshape(shape)
        shape = [1] * (2 * n + 1)
        shape[ax_im] = x.size
        xim = x.reshape(shape)
        zj = xre + 1j * xim
        lam = sig.lambdas[j - 1]
        d_re = _d4(freq.values, ax_re, hs, periodic=False)
        d_im = _d4(freq.values, ax_im, hs, periodic=False)
        tman = ts.reshape([1] * (2 * n) + [-1])
        if J.contains(j):
            r = 0.5 * (d_re - 1j * d_im) - lam * np.conj(zj) * tman * freq.values
        else:
            r = 0.5 * (d_re + 1j * d_im) + lam * zj * tman * freq.values
        total += float(
            np.sum(np.abs(r) ** 2 * wspat[..., None] * grid.freq_step).real
        )
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# component extraction and reflections
# ---------------------------------------------------------------------------


def _as_form_list(u) -> list[FormField]:
    if isinstance(u, FormField):
        return [u]
    return list(u)


def _extract(u, J: MultiIndex, grid: GridSpec) -> FormField:
    comps = {}
    for form in _as_form_list(u):
        if form.grid != grid:
            raise UsageError("mixed grids in component extraction")
        if form.q == J.q and form.component(J) is not None:
            comps[J] = form.component(J)
    return FormField(grid=grid, q=J.q, components=comps)


def tau_minus(u, sig: LambdaSignature) -> FormField:
    """Extract the distinguished negative-axes component as a degree-n_minus form.

    Accepts a FormField or a sequence of FormFields (a direct-sum element).
    """
    if sig.degenerate:
        raise UsageError("component extraction needs a non-degenerate signature")
    if sig.n_minus == 0:
        raise UsageError("tau_minus needs n_minus > 0")
    forms = _as_form_list(u)
    if not forms:
        raise UsageError("empty input")
    return _extract(forms, MultiIndex(sig.negative_axes), forms[0].grid)


def tau_plus(u, sig: LambdaSignature) -> FormField:
    """Extract the positive-axes component (the scalar part when n_minus == n)."""
    if sig.degenerate:
        raise UsageError("component extraction needs a non-degenerate signature")
    forms = _as_form_list(u)
    if not forms:
        raise UsageError("empty input")
    return _extract(forms, MultiIndex(sig.positive_axes), forms[0].grid)


def _flip_axes(values: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    out = values
    for ax in axes:
        out = np.flip(out, axis=ax)
    return out


def _negate_vertical(values: np.ndarray) -> np.ndarray:
    # index map k -> (N - k) mod N, exact on the periodic vertical grid
    return np.roll(np.flip(values, axis=-1), 1, axis=-1)


def reflect_to_hat(field: ScalarField, which: str, sig: LambdaSignature) -> ScalarField:
    """Coordinate substitution mapping a structure block to the hat structure.

    ``minus_block`` conjugates the negative axes (z_j -> zbar_j); ``plus_block``
    conjugates the positive axes and negates the vertical coordinate.  Both
    are involutions realized as exact index permutations of the value array
    (the grids are symmetric axis-wise), so applying twice is bit-exact
    identity.
    """
    if sig.degenerate:
        raise UsageError("reflection needs a non-degenerate signature")
    if which not in ("minus_block", "plus_block"):
        raise UsageError("which must be 'minus_block' or 'plus_block'")
    n = field.n
    if sig.n != n:
        raise UsageError("signature dimension mismatch")
    if which == "minus_block":
        axes = tuple(2 * (j - 1) + 1 for j in sig.negative_axes)
        return ScalarField(grid=field.grid, values=_flip_axes(field.values, axes))
    axes = tuple(2 * (j - 1) + 1 for j in sig.positive_axes)
    return ScalarField(
        grid=field.grid, values=_negate_vertical(_flip_axes(field.values, axes))
    )


# ---------------------------------------------------------------------------
# the (0,q) projector
# ---------------------------------------------------------------------------


def vanishing_reason(q: int, sig: LambdaSignature) -> str | None:
    """Why the degree-q projector is the zero operator, or None if it is not."""
    if sig.degenerate:
        return (
            "structure constant lambda_j = 0 for some j: the harmonic space is "
            "trivial and the projector is the zero operator"
        )
    if q not in (sig.n_minus, sig.n_plus):
        return (
            f"degree q={q} outside {{n_minus, n_plus}} = "
            f"{{{sig.n_minus}, {sig.n_plus}}}: the harmonic space is trivial and "
            "the projector is the zero operator"
        )
    return None


def szego_project_form(
    u: FormField, sig: LambdaSignature, enforce_budget: bool = True
) -> FormField:
    """Orthogonal projector onto the degree-q harmonic space.

    Structural zero whenever the signature is degenerate or q differs from
    both signature counts.  Otherwise each active branch extracts its
    distinguished component, transports it to the all-positive hat structure
    by the block reflection, runs the scalar frequency pipeline there, and
    transports back.  Components with other labels are annihilated.
    """
    if u.components and sig.n != u.n:
        raise UsageError("signature dimension mismatch")
    q = u.q
    if vanishing_reason(q, sig) is not None:
        return FormField(grid=u.grid, q=q, components={})
    hat = sig.abs()
    out: dict[MultiIndex, ScalarField] = {}
    branches = []
    if q == sig.n_minus:
        branches.append((MultiIndex(sig.negative_axes), "minus_block"))
    if q == sig.n_plus:
        branches.append((MultiIndex(sig.positive_axes), "plus_block"))
    for J, block in branches:
        comp = u.component(J)
        if comp is None:
            continue
        v = reflect_to_hat(comp, block, sig)
        w = scalar_pipeline_project(v, hat, enforce_budget=enforce_budget)
        out[J] = reflect_to_hat(w, block, sig)
    return FormField(grid=u.grid, q=q, components=out)


# ---------------------------------------------------------------------------
# vanishing evidence
# ---------------------------------------------------------------------------


def multi_exponents(n: int, max_total: int) -> list[tuple[int, ...]]:
    """All exponent tuples alpha with |alpha| <= max_total, lexicographic."""
    out = []
    for total in range(max_total + 1):
        for cuts in itertools.combinations(range(total + n - 1), n - 1):
            alpha = []
            prev = -1
            for c in cuts:
                alpha.append(c - prev - 1)
                prev = c
            alpha.append(total + n - 2 - prev)
            out.append(tuple(alpha))
    return sorted(set(out))


@dataclass(frozen=True)
class VanishingEntry:
    J: MultiIndex
    eta: float
    alpha: tuple[int, ...]
    value: float  # math.inf for divergent cases

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass(frozen=True)
class VanishingReport:
    q: int
    sig: LambdaSignature
    entries: tuple[VanishingEntry, ...]

    def finite_exists_per_J(self) -> dict[MultiIndex, bool]:
        out: dict[MultiIndex, bool] = {}
        for e in self.entries:
            out[e.J] = out.get(e.J, False) or e.finite
        return out

    @property
    def all_infinite(self) -> bool:
        return not any(e.finite for e in self.entries)


def vanishing_evidence(
    q: int, sig: LambdaSignature, max_alpha: int = 2, eta0: float = 1.0
) -> VanishingReport:
    """Classifier sweep behind the vanishing theorem.

    For each strictly increasing J of length q, both signs of the dual
    frequency, and every |alpha| <= max_alpha, classifies the weighted
    monomial integral.  When the signature is degenerate or q differs from
    both signature counts, every entry must come back Infinite.
    """
    n = sig.n
    if not 0 <= q <= n:
        raise UsageError(f"degree q={q} out of range 0..{n}")
    entries = []
    for combo in itertools.combinations(range(1, n + 1), q):
        J = MultiIndex(combo)
        pattern = SignedWeightPattern(sig=sig, J=J)
        for eta in (eta0, -eta0):
            for alpha in multi_exponents(n, max_alpha):
                val = monomial_integral(alpha, eta, pattern)
                entries.append(VanishingEntry(J=J, eta=eta, alpha=alpha, value=val))
    return VanishingReport(q=q, sig=sig, entries=tuple(entries))
