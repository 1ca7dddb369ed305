"""Discretization of a continuous bath onto a uniform frequency grid."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .spectral import SpectralFunction, evaluate

__all__ = [
    "Statistics",
    "BathSpec",
    "DiscretizedBath",
    "Resolution",
    "discretize",
    "flat_bath",
    "thermal_occupation",
    "counterterm",
    "resolution_report",
    "write_bath_csv",
]


class Statistics(str, enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def epsilon(self) -> int:
        return -1 if self is Statistics.BOSON else 1


@dataclass(frozen=True)
class BathSpec:
    """Grid and thermal parameters of the discretized bath.

    Modes sit at ``delta_omega * (n + 1/2)`` for ``n = 0..n_max`` with
    ``delta_omega = omega_max / (n_max + 1/2)``, so there are ``n_max + 1``
    of them and the highest one lies exactly at ``omega_max``.
    """

    n_max: int = 250
    omega_max: float = 10.0
    temperature: float = 1.0
    statistics: Statistics = Statistics.BOSON

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise DomainError(f"n_max must be a non-negative integer, got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))
        if not (np.isfinite(self.omega_max) and self.omega_max > 0):
            raise DomainError(f"omega_max must be positive, got {self.omega_max}")
        if not (np.isfinite(self.temperature) and self.temperature >= 0):
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def delta_omega(self) -> float:
        return self.omega_max / (self.n_max + 0.5)


@dataclass(frozen=True, eq=False)
class DiscretizedBath:
    frequencies: np.ndarray
    couplings: np.ndarray
    occupations: np.ndarray
    statistics: Statistics
    delta_omega: float
    temperature: float = field(default=0.0)

    def __post_init__(self):
        for name in ("frequencies", "couplings", "occupations"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.frequencies.shape[0]
        if self.couplings.shape != (n,) or self.occupations.shape != (n,):
            raise DomainError("frequencies, couplings and occupations must have equal length")
        if np.any(self.frequencies <= 0):
            raise DomainError("bath frequencies must be positive")
        if np.any(self.occupations < 0):
            raise DomainError("bath occupations must be non-negative")

    @property
    def n_modes(self) -> int:
        return self.frequencies.shape[0]

    @property
    def omega_max(self) -> float:
        return float(self.frequencies[-1])


@dataclass(frozen=True)
class Resolution:
    delta_tau: float
    tau_max: float


def thermal_occupation(omega, temperature: float, statistics=Statistics.BOSON):
    """Bose-Einstein or Fermi-Dirac occupation ``1/(exp(omega/T) + eps)``.

    ``T = 0`` gives exact zeros for either statistics.
    """
    statistics = Statistics(statistics)
    w = np.asarray(omega, dtype=float)
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        out = np.zeros_like(w)
    else:
        if statistics is Statistics.BOSON and np.any(w <= 0):
            raise DomainError("Bose occupation diverges for omega <= 0")
        x = w / temperature
        # exp overflow -> inf -> 0, which is the right limit
        with np.errstate(over="ignore"):
            if statistics is Statistics.BOSON:
                out = 1.0 / np.expm1(x)
            else:
                out = 1.0 / (np.exp(x) + 1.0)
    return float(out) if out.ndim == 0 else out


def discretize(sf: SpectralFunction, spec: BathSpec) -> DiscretizedBath:
    """Map ``sf`` onto ``spec.n_max + 1`` equidistant modes with g = sqrt(dw J(w))."""
    dw = spec.delta_omega
    freqs = dw * (np.arange(spec.n_max + 1) + 0.5)
    couplings = np.sqrt(dw * evaluate(sf, freqs))
    occ = thermal_occupation(freqs, spec.temperature, spec.statistics)
    return DiscretizedBath(
        frequencies=freqs,
        couplings=np.atleast_1d(couplings),
        occupations=np.atleast_1d(occ),
        statistics=spec.statistics,
        delta_omega=dw,
        temperature=spec.temperature,
    )


def flat_bath(coupling: float, spec: BathSpec) -> DiscretizedBath:
    """Uniform grid with the same coupling on every mode.

    This is the textbook golden-rule setting, where a resonant level decays at
    ``2 pi g^2 / delta_omega``.
    """
    if coupling < 0:
        raise DomainError("coupling must be non-negative")
    dw = spec.delta_omega
    freqs = dw * (np.arange(spec.n_max + 1) + 0.5)
    return DiscretizedBath(
        frequencies=freqs,
        couplings=np.full_like(freqs, coupling),
        occupations=thermal_occupation(freqs, spec.temperature, spec.statistics),
        statistics=spec.statistics,
        delta_omega=dw,
        temperature=spec.temperature,
    )


def counterterm(bath: DiscretizedBath) -> float:
    """Static level shift sum_nu g_nu^2 / omega_nu."""
    return float(np.sum(bath.couplings**2 / bath.frequencies))


def resolution_report(bath: DiscretizedBath) -> Resolution:
    """Time resolution ``2 pi / omega_max`` and validity horizon ``2 pi / delta_omega``."""
    return Resolution(delta_tau=2 * np.pi / bath.omega_max, tau_max=2 * np.pi / bath.delta_omega)


def write_bath_csv(path, bath: DiscretizedBath) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("nu", "omega", "g", "n0"))
        for nu, (w, g, n0) in enumerate(zip(bath.frequencies, bath.couplings, bath.occupations)):
            writer.writerow([nu, f"{w:.15e}", f"{g:.15e}", f"{n0:.15e}"])
