"""Phase functions, the closed-form projector kernel, and its oscillatory
integral counterpart.

The scalar kernel is K_eps(x, y) = c0 * n! * (-i*(phi(x,y) + i*eps))**-(n+1)
with c0 = |lam_1|...|lam_n| / (2*pi^(n+1)).  The same value arises as the
Laplace-type integral c0 * integral_0^inf t^n e^{i t phi} e^{-eps t} dt, which
``fio_quadrature`` evaluates numerically; the two must agree, and
``gamma_moment`` supplies the underlying moment identity
integral_0^inf e^{-t s} t^m dt = m! * s^-(m+1).
"""

from __future__ import annotations

import math
import warnings
from enum import Enum

import numpy as np

from .core import (
    DomainError,
    HeisenbergPoint,
    LambdaSignature,
    UsageError,
    composite_gauss_legendre,
)

__all__ = [
    "PhaseChoice",
    "TailTruncationWarning",
    "phase",
    "szego_kernel_scalar",
    "fio_quadrature",
    "gamma_moment",
]


class PhaseChoice(Enum):
    """Which phase function: the two conjugate variants, or the all-|lam| one."""

    MINUS = "minus"
    PLUS = "plus"
    HAT = "hat"


class TailTruncationWarning(UserWarning):
    """The damped t-integral was cut before its tail became negligible."""


def _check_dims(x: HeisenbergPoint, y: HeisenbergPoint, sig: LambdaSignature) -> None:
    if not (x.n == y.n == sig.n):
        raise UsageError(f"dimension mismatch: x.n={x.n}, y.n={y.n}, sig.n={sig.n}")


def phase(
    choice: PhaseChoice, x: HeisenbergPoint, y: HeisenbergPoint, sig: LambdaSignature
) -> complex:
    """Evaluate the chosen phase function at (x, y).

    MINUS: -x_last + y_last + i*sum|lam_j||z_j-w_j|^2 + i*sum lam_j*(zbar_j w_j - z_j wbar_j).
    PLUS is its swap/negated-conjugate partner; HAT replaces lam_j by |lam_j|
    in the antisymmetric term (and flips nothing else, since the quadratic
    term already carries |lam_j|).  The imaginary part is always >= 0.
    """
    _check_dims(x, y, sig)
    z = np.asarray(x.z)
    w = np.asarray(y.z)
    lam = np.asarray(sig.lambdas)
    a, b = z.real, z.imag
    c, d = w.real, w.imag
    quad = float(np.sum(np.abs(lam) * ((a - c) ** 2 + (b - d) ** 2)))
    # i*(zbar w - z wbar) = -2*Im(zbar w); computing the imaginary part in
    # real arithmetic keeps the diagonal exactly zero and the conjugate/swap
    # identities exact to the bit
    im_zbar_w = a * d - b * c
    if choice is PhaseChoice.MINUS:
        return complex(-x.x_last + y.x_last - 2.0 * float(np.sum(lam * im_zbar_w)), quad)
    if choice is PhaseChoice.PLUS:
        return complex(x.x_last - y.x_last + 2.0 * float(np.sum(lam * im_zbar_w)), quad)
    if choice is PhaseChoice.HAT:
        return complex(
            -x.x_last + y.x_last - 2.0 * float(np.sum(np.abs(lam) * im_zbar_w)), quad
        )
    raise UsageError(f"unknown phase choice {choice!r}")


def _c0(sig: LambdaSignature) -> float:
    return sig.product_abs() / (2.0 * math.pi ** (sig.n + 1))


def szego_kernel_scalar(
    x: HeisenbergPoint,
    y: HeisenbergPoint,
    sig: LambdaSignature,
    choice: PhaseChoice = PhaseChoice.MINUS,
    epsilon: float = 1.0,
) -> complex:
    """Regularized closed-form kernel c0 * n! * (-i*(phi+i*eps))**-(n+1).

    The base -i*(phi+i*eps) has positive real part (Im phi >= 0, eps > 0), so
    the principal branch of the complex power is the analytic choice and no
    branch cut can be crossed.
    """
    if epsilon <= 0:
        raise UsageError(f"epsilon must be > 0, got {epsilon}")
    if sig.degenerate:
        raise DomainError(
            "degenerate signature: the projector vanishes identically; "
            "see the form-level projector for the structured zero"
        )
    _check_dims(x, y, sig)
    n = sig.n
    ph = phase(choice, x, y, sig)
    base = -1j * (ph + 1j * epsilon)
    return complex(_c0(sig) * math.factorial(n) * base ** (-(n + 1)))


def fio_quadrature(
    x: HeisenbergPoint,
    y: HeisenbergPoint,
    sig: LambdaSignature,
    choice: PhaseChoice = PhaseChoice.MINUS,
    epsilon: float = 1.0,
    t_max: float = 50.0,
    t_points: int = 800,
) -> complex:
    """Evaluate c0 * integral_0^t_max t^n e^{i t phi(x,y)} e^{-eps t} dt.

    Composite Gauss-Legendre in t; the panel count adapts to the oscillation
    rate |Re phi| so the requested ``t_points`` is a floor, not a cap.  Warns
    with :class:`TailTruncationWarning` when t_max*(Im phi + eps) < 20, i.e.
    when the discarded tail is not negligible.
    """
    if epsilon <= 0:
        raise UsageError(f"epsilon must be > 0, got {epsilon}")
    if t_max <= 0 or t_points < 2:
        raise UsageError("t_max must be > 0 and t_points >= 2")
    _check_dims(x, y, sig)
    n = sig.n
    ph = phase(choice, x, y, sig)
    decay = ph.imag + epsilon
    if t_max * decay < 20.0:
        warnings.warn(
            f"t_max*(Im phi + eps) = {t_max * decay:.3g} < 20: tail not negligible",
            TailTruncationWarning,
            stacklevel=2,
        )
    # ensure ~10 nodes per oscillation period on top of the requested budget
    periods = abs(ph.real) * t_max / (2.0 * math.pi)
    npts = max(int(t_points), int(10 * periods) + 16)
    tn, tw = composite_gauss_legendre(0.0, t_max, npts)
    vals = tn**n * np.exp((1j * ph - epsilon) * tn)
    return complex(_c0(sig) * np.sum(tw * vals))


def gamma_moment(m: int, s: complex) -> complex:
    """Closed form m! * s**-(m+1) of integral_0^inf e^{-t s} t^m dt (Re s > 0)."""
    if m < 0 or int(m) != m:
        raise UsageError(f"m must be a nonnegative integer, got {m}")
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"gamma_moment needs Re s > 0, got {s}")
    return math.factorial(int(m)) * s ** (-(int(m) + 1))
