"""Continuous spectral functions and dissipative memory kernels.

Natural units are used throughout: hbar = k_B = 1 and the system frequency
sets the scale, so frequencies are in units of Omega, times in 1/Omega.
"""

from __future__ import annotations

import csv
import enum
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np
from scipy import integrate

from .exceptions import DomainError, QuadratureError

if TYPE_CHECKING:
    from .bath import DiscretizedBath

__all__ = [
    "SpectralKind",
    "SpectralFunction",
    "KernelSample",
    "QuadratureSpec",
    "evaluate",
    "analytic_kernel",
    "discrete_kernel",
    "kernel_table",
    "write_kernel_csv",
]

KERNEL_CSV_HEADER = ("t", "K_re_discrete", "K_im_discrete", "K_re_analytic", "K_im_analytic")


class SpectralKind(str, enum.Enum):
    LORENTZ_DRUDE = "lorentz_drude"


@dataclass(frozen=True)
class SpectralFunction:
    """Bath spectral function J(omega) = rho(omega) g(omega)^2.

    Only the product is represented; the density of states and the coupling
    are never split apart.

    Parameters
    ----------
    g0 : float
        Dimensionless coupling strength.
    gamma : float
        Cutoff frequency of the Lorentz-Drude form.
    kind : SpectralKind
        Functional form. Only Lorentz-Drude is available.
    """

    g0: float
    gamma: float
    kind: SpectralKind = SpectralKind.LORENTZ_DRUDE

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectralKind(self.kind))
        # g0 = 0 is allowed as the uncoupled reference case
        if not (np.isfinite(self.g0) and self.g0 >= 0):
            raise DomainError(f"g0 must be >= 0, got {self.g0}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    def __call__(self, omega):
        return evaluate(self, omega)


@dataclass(frozen=True)
class KernelSample:
    t: float
    value: complex

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the oscillatory integral in the imaginary kernel part."""

    abs_tol: float = 1e-8
    limlst: int = 200
    limit: int = 200


def evaluate(sf: SpectralFunction, omega):
    """Evaluate J(omega) for scalar or array ``omega`` >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(~np.isfinite(w)):
        raise DomainError("spectral function is defined for omega >= 0 only")
    g2 = sf.gamma * sf.gamma
    out = (sf.g0 / np.pi) * w * g2 / (g2 + w * w)
    return float(out) if out.ndim == 0 else out


def _sine_transform(gamma: float, t: float, quad: QuadratureSpec) -> float:
    # int_0^inf sin(w t) / (gamma^2 + w^2) dw, Fourier-weighted QUADPACK (QAWF)
    if t == 0.0:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, abserr = integrate.quad(
                lambda w: 1.0 / (gamma * gamma + w * w),
                0.0,
                np.inf,
                weight="sin",
                wvar=t,
                epsabs=quad.abs_tol,
                limlst=quad.limlst,
                limit=quad.limit,
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"sine transform failed at t={t}: {exc}", abserr=np.nan) from exc
    if abserr > quad.abs_tol:
        raise QuadratureError(
            f"sine transform at t={t} reached abserr={abserr:.3g} > {quad.abs_tol:.3g}",
            abserr=abserr,
        )
    return val


def analytic_kernel(sf: SpectralFunction, t: float, quadrature: QuadratureSpec | None = None) -> KernelSample:
    """Continuum dissipative kernel of a Lorentz-Drude bath.

    The real part is the closed form ``(g0/2) gamma exp(-gamma t)``; the
    imaginary part is a one-sided sine transform done numerically. The sign
    follows the ``exp(-i omega t)`` convention of :func:`discrete_kernel`, so
    the two agree in the continuum limit (Im K <= 0 for t > 0).
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    quadrature = quadrature or QuadratureSpec()
    re = 0.5 * sf.g0 * sf.gamma * np.exp(-sf.gamma * t)
    im = 0.0 - (sf.g0 / np.pi) * sf.gamma**2 * _sine_transform(sf.gamma, float(t), quadrature)
    return KernelSample(float(t), complex(re, im))


def discrete_kernel(bath: DiscretizedBath, t: float) -> KernelSample:
    """Kernel of a finite bath: sum over modes of g^2/omega exp(-i omega t)."""
    if bath.n_modes == 0:
        raise DomainError("bath has no modes")
    w = bath.frequencies
    weights = bath.couplings**2 / w
    re = float(np.dot(weights, np.cos(w * t)))
    im = 0.0 - float(np.dot(weights, np.sin(w * t)))
    return KernelSample(float(t), complex(re, im))


def kernel_table(sf: SpectralFunction, bath: DiscretizedBath, times: Iterable[float],
                 quadrature: QuadratureSpec | None = None) -> np.ndarray:
    """Rows of (t, Re K_disc, Im K_disc, Re K_an, Im K_an) over ``times``."""
    rows = []
    for t in times:
        kd = discrete_kernel(bath, t)
        ka = analytic_kernel(sf, t, quadrature)
        rows.append((t, kd.real, kd.imag, ka.real, ka.imag))
    return np.array(rows, dtype=float).reshape(-1, 5)


def write_kernel_csv(path, table: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(KERNEL_CSV_HEADER)
        for row in table:
            writer.writerow([f"{x:.15e}" for x in row])
