import math

import numpy as np
import pytest

from hszego import (
    CrOperatorChoice,
    FormField,
    GridSpec,
    LambdaSignature,
    MultiIndex,
    ScalarField,
    UsageError,
    WavePacketSpec,
    apply_cr,
    cr_system_residual,
    frequency_cr_residual,
    interior_norm,
    make_wave_packet,
    monomial_integral,
    norm,
    partial_ft,
    reflect_to_hat,
    scalar_pipeline_project,
    szego_project_form,
    tau_minus,
    tau_plus,
    vanishing_evidence,
    vanishing_reason,
)
from hszego.bergman import SignedWeightPattern

SIG1 = LambdaSignature((1.0,))
J0 = MultiIndex(())


@pytest.fixture(scope="module")
def grid():
    return GridSpec.make(4.0, 21, 16.0, 128)


def _coords(grid):
    x = grid.spatial_nodes()
    return x[:, None] + 1j * x[None, :]


def test_apply_cr_constant_is_zero(grid):
    u = ScalarField(grid=grid, values=np.ones(grid.field_shape(1), dtype=complex))
    for kind in ("Z", "Zbar"):
        out = apply_cr(u, CrOperatorChoice(kind=kind, axis=1), SIG1)
        assert np.max(np.abs(out.values)) < 1e-14


def test_apply_cr_z_is_annihilated_by_zbar(grid):
    Z = _coords(grid)
    u = ScalarField(grid=grid, values=np.repeat(Z[..., None], 128, axis=-1).astype(complex))
    out = apply_cr(u, CrOperatorChoice(kind="Zbar", axis=1), SIG1)
    assert interior_norm(out) < 1e-12
    out2 = apply_cr(u, CrOperatorChoice(kind="Z", axis=1), SIG1)
    assert interior_norm(out2) > 0.1  # d/dz of z is 1, not zero


def test_apply_cr_grid_requirements():
    coarse = GridSpec.make(4.0, 4, 8.0, 8)
    u = ScalarField(grid=coarse, values=np.ones(coarse.field_shape(1), dtype=complex))
    with pytest.raises(UsageError):
        apply_cr(u, CrOperatorChoice(kind="Z", axis=1), SIG1)
    gl = GridSpec.make(4.0, 9, 8.0, 16, quadrature_rule="gauss-legendre")
    v = ScalarField(grid=gl, values=np.ones(gl.field_shape(1), dtype=complex))
    with pytest.raises(UsageError):
        apply_cr(v, CrOperatorChoice(kind="Z", axis=1), SIG1)


def test_cr_residual_packet_vs_noise(grid):
    u = make_wave_packet(
        WavePacketSpec(alpha=(1,), t_low=0.9, t_high=2.6), SIG1, grid, bin_quadrature=True
    )
    res = cr_system_residual(FormField(grid=grid, q=0, components={J0: u}), SIG1)[J0]
    rng = np.random.default_rng(0)
    shape = grid.field_shape(1)
    noise = ScalarField(grid=grid, values=rng.normal(size=shape) + 1j * rng.normal(size=shape))
    res_noise = cr_system_residual(FormField(grid=grid, q=0, components={J0: noise}), SIG1)[J0]
    assert res / norm(u) < 0.15
    assert (res_noise / norm(noise)) / (res / norm(u)) > 20


def test_frequency_residual_consistent_with_spatial(grid):
    u = make_wave_packet(
        WavePacketSpec(alpha=(0,), t_low=0.9, t_high=2.6), SIG1, grid, bin_quadrature=True
    )
    fres = frequency_cr_residual(partial_ft(u), J0, SIG1)
    # scale by the Parseval factor to compare with the spatial residual
    assert fres / (math.sqrt(2 * math.pi) * norm(u)) < 0.15
    rng = np.random.default_rng(1)
    shape = grid.field_shape(1)
    noise = ScalarField(grid=grid, values=rng.normal(size=shape) + 1j * rng.normal(size=shape))
    fres_noise = frequency_cr_residual(partial_ft(noise), J0, SIG1)
    assert fres_noise / (math.sqrt(2 * math.pi) * norm(noise)) > 10 * fres / (
        math.sqrt(2 * math.pi) * norm(u)
    )


def test_sign_map_between_slices_and_classifier(grid):
    """Documents the frequency orientation: a packet occupying slices t > 0
    has finite weighted monomial integrals at eta = -t and infinite at +t."""
    u = make_wave_packet(WavePacketSpec(alpha=(0,), t_low=0.9, t_high=2.6), SIG1, grid)
    freq = partial_ft(u)
    energy = freq.spectral_energy()
    k = int(np.argmax(energy))
    t_star = freq.t_nodes[k]
    assert t_star > 0
    pattern = SignedWeightPattern(sig=SIG1, J=MultiIndex(()))
    assert math.isfinite(monomial_integral((0,), -t_star, pattern))
    assert math.isinf(monomial_integral((0,), +t_star, pattern))


# ---------------------------------------------------------------------------
# component extraction and reflections
# ---------------------------------------------------------------------------


def _const_field(grid, value=1.0):
    return ScalarField(grid=grid, values=np.full(grid.field_shape(1), value, dtype=complex))


def test_tau_examples_mixed_signature(grid):
    sig = LambdaSignature((-1.0, 1.0))
    g2 = GridSpec.make(3.0, 5, 4.0, 8)
    shape = g2.field_shape(2)
    a = ScalarField(grid=g2, values=np.full(shape, 2.0, dtype=complex))
    b = ScalarField(grid=g2, values=np.full(shape, 3.0, dtype=complex))
    u = FormField(grid=g2, q=1, components={MultiIndex((1,)): a, MultiIndex((2,)): b})
    minus = tau_minus(u, sig)
    assert set(minus.components) == {MultiIndex((1,))}
    assert np.array_equal(minus.components[MultiIndex((1,))].values, a.values)
    plus = tau_plus(u, sig)
    assert set(plus.components) == {MultiIndex((2,))}
    assert np.array_equal(plus.components[MultiIndex((2,))].values, b.values)


def test_tau_plus_scalar_when_all_negative(grid):
    sig = LambdaSignature((-1.0,))
    u0 = _const_field(grid, 5.0)
    u1 = _const_field(grid, 7.0)
    mixed = [
        FormField(grid=grid, q=0, components={J0: u0}),
        FormField(grid=grid, q=1, components={MultiIndex((1,)): u1}),
    ]
    out = tau_plus(mixed, sig)
    assert out.q == 0
    assert np.array_equal(out.components[J0].values, u0.values)
    minus = tau_minus(mixed, sig)
    assert minus.q == 1
    assert np.array_equal(minus.components[MultiIndex((1,))].values, u1.values)


def test_tau_missing_component_gives_zero_form(grid):
    sig = LambdaSignature((-1.0, 1.0))
    g2 = GridSpec.make(3.0, 5, 4.0, 8)
    b = ScalarField(grid=g2, values=np.ones(g2.field_shape(2), dtype=complex))
    u = FormField(grid=g2, q=1, components={MultiIndex((2,)): b})
    assert tau_minus(u, sig).components == {}


def test_tau_errors(grid):
    with pytest.raises(UsageError):
        tau_minus(FormField(grid=grid, q=0, components={J0: _const_field(grid)}), SIG1)
    with pytest.raises(UsageError):
        tau_plus(
            FormField(grid=grid, q=0, components={J0: _const_field(grid)}),
            LambdaSignature((0.0,)),
        )


def test_reflection_involution_bit_exact(grid):
    rng = np.random.default_rng(2)
    shape = grid.field_shape(1)
    u = ScalarField(grid=grid, values=rng.normal(size=shape) + 1j * rng.normal(size=shape))
    sig = LambdaSignature((-1.0,))
    for which in ("minus_block", "plus_block"):
        once = reflect_to_hat(u, which, sig)
        twice = reflect_to_hat(once, which, sig)
        assert np.array_equal(twice.values, u.values)


def test_reflection_identity_when_no_negative_axes(grid):
    u = _const_field(grid, 1.5)
    out = reflect_to_hat(u, "minus_block", SIG1)
    assert np.array_equal(out.values, u.values)


def test_reflection_transports_cr_solutions(grid):
    sig = LambdaSignature((-1.0,))
    u = make_wave_packet(
        WavePacketSpec(alpha=(1,), t_low=0.9, t_high=2.6, conjugated_axes=(1,)),
        sig,
        grid,
        bin_quadrature=True,
    )
    # u solves Z_1 u = 0 for the standard structure (axis 1 is in J)
    res_std = interior_norm(apply_cr(u, CrOperatorChoice(kind="Z", axis=1), sig))
    v = reflect_to_hat(u, "minus_block", sig)
    res_hat = interior_norm(
        apply_cr(v, CrOperatorChoice(kind="Zbar", axis=1, structure="hat"), sig)
    )
    assert res_std / norm(u) < 0.15
    assert res_hat / norm(v) < 0.15


# ---------------------------------------------------------------------------
# the (0,q) projector
# ---------------------------------------------------------------------------


def test_all_positive_q0_equals_scalar_pipeline(grid):
    u = make_wave_packet(WavePacketSpec(alpha=(1,), t_low=0.9, t_high=2.6), SIG1, grid)
    form = FormField(grid=grid, q=0, components={J0: u})
    out = szego_project_form(form, SIG1)
    ref = scalar_pipeline_project(u, SIG1)
    assert np.array_equal(out.components[J0].values, ref.values)


def test_vanishing_degrees_give_zero(grid):
    sig = LambdaSignature((1.0, 1.0))
    g2 = GridSpec.make(3.0, 5, 4.0, 8)
    b = ScalarField(grid=g2, values=np.ones(g2.field_shape(2), dtype=complex))
    u = FormField(grid=g2, q=1, components={MultiIndex((1,)): b})
    out = szego_project_form(u, sig)
    assert out.components == {}
    assert "trivial" in vanishing_reason(1, sig)
    assert "lambda" in vanishing_reason(0, LambdaSignature((0.0, 1.0)))
    assert vanishing_reason(0, sig) is None


def test_project_form_output_keys_subset(grid):
    sig = LambdaSignature((-1.0,))
    J1 = MultiIndex((1,))
    u = make_wave_packet(
        WavePacketSpec(alpha=(0,), t_low=0.9, t_high=2.6, conjugated_axes=(1,)), sig, grid
    )
    form = FormField(grid=grid, q=1, components={J1: u})
    out = szego_project_form(form, sig)
    assert set(out.components) == {J1}
    rel = norm(
        ScalarField(grid=grid, values=out.components[J1].values - u.values)
    ) / norm(u)
    assert rel < 1e-3


def test_vanishing_evidence_reports():
    rep = vanishing_evidence(1, LambdaSignature((1.0, 1.0)))
    assert rep.all_infinite
    rep2 = vanishing_evidence(1, LambdaSignature((-1.0, 1.0)))
    per_J = rep2.finite_exists_per_J()
    assert per_J[MultiIndex((1,))]
    assert per_J[MultiIndex((2,))]
    rep3 = vanishing_evidence(0, LambdaSignature((0.0, 1.0)))
    assert rep3.all_infinite
