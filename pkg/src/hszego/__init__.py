"""Szego projections for (0,q)-forms on the Heisenberg group C^n x R.

Closed-form phase-function kernels, the weighted-Bergman / partial-Fourier
factorization of the projector, wave-packet synthesis, CR residual checks,
the monomial-integral vanishing classifier, and a verification CLI.
"""

from ._kernels import active_backend, set_backend
from .bergman import (
    SignedWeightPattern,
    WeightSpec,
    bergman_kernel,
    bergman_project,
    default_radius_sweep,
    divergence_witness,
    gaussian_budget_window,
    gaussian_reproducing_check,
    monomial_integral,
    truncated_monomial_integral,
)
from .core import (
    BudgetError,
    DomainError,
    FormField,
    FrequencySlice,
    GridSpec,
    HeisenbergPoint,
    LambdaSignature,
    MultiIndex,
    ScalarField,
    UsageError,
    form_inner,
    form_norm,
    inner,
    multiindex_complement,
    norm,
    slice_inner,
    slice_norm,
    volume_weight,
)
from .forms import (
    CrOperatorChoice,
    apply_cr,
    cr_system_residual,
    frequency_cr_residual,
    interior_mask,
    interior_norm,
    reflect_to_hat,
    szego_project_form,
    tau_minus,
    tau_plus,
    vanishing_evidence,
    vanishing_reason,
)
from .phase import (
    PhaseChoice,
    TailTruncationWarning,
    fio_quadrature,
    gamma_moment,
    phase,
    szego_kernel_scalar,
)
from .transform import (
    FrequencyField,
    WavePacketSpec,
    frequency_pairing,
    make_wave_packet,
    packet_boundary_share,
    partial_ft,
    partial_ift,
    scalar_pipeline_project,
    szego_apply_direct,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
