"""System levels and the reduced single-excitation Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bath import DiscretizedBath, counterterm
from .exceptions import DomainError

__all__ = [
    "Level",
    "SystemSpec",
    "ReducedHamiltonian",
    "build_hamiltonian",
    "two_level_preset",
    "three_level_preset",
    "dump_matrix",
]


@dataclass(frozen=True)
class Level:
    frequency: float
    initial_occupation: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.frequency):
            raise DomainError("level frequency must be finite")
        if not 0.0 <= self.initial_occupation <= 1.0:
            raise DomainError(f"initial occupation must lie in [0, 1], got {self.initial_occupation}")


@dataclass(frozen=True)
class SystemSpec:
    """Levels coupled to the bath, each through the same couplings g_nu.

    Frequencies may be negative (a level below the system ground state).
    When ``apply_counterterm`` is set, every level is shifted up by
    ``sum g^2/omega`` before the Hamiltonian is assembled.
    """

    levels: tuple[Level, ...]
    apply_counterterm: bool = False
    label: str = ""

    def __post_init__(self):
        levels = tuple(lv if isinstance(lv, Level) else Level(*lv) for lv in self.levels)
        if not levels:
            raise DomainError("a system needs at least one level")
        object.__setattr__(self, "levels", levels)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([lv.frequency for lv in self.levels])

    @property
    def initial_occupations(self) -> np.ndarray:
        return np.array([lv.initial_occupation for lv in self.levels])


@dataclass(frozen=True, eq=False)
class ReducedHamiltonian:
    """Symmetric matrix on the basis {system levels, then bath modes}."""

    matrix: np.ndarray
    n_system: int
    n_bath: int
    shift: float = field(default=0.0)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.n_system + self.n_bath,) * 2:
            raise DomainError(f"matrix shape {m.shape} does not match {self.n_system}+{self.n_bath}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.n_system + self.n_bath


def build_hamiltonian(system: SystemSpec, bath: DiscretizedBath) -> ReducedHamiltonian:
    ns, nb = system.n_levels, bath.n_modes
    shift = counterterm(bath) if system.apply_counterterm else 0.0
    h = np.zeros((ns + nb, ns + nb))
    diag = np.concatenate([system.frequencies + shift, bath.frequencies])
    h[np.diag_indices_from(h)] = diag
    h[:ns, ns:] = bath.couplings[None, :]
    h[ns:, :ns] = bath.couplings[:, None]
    return ReducedHamiltonian(h, ns, nb, shift)


def two_level_preset(Omega: float = 1.0, n0: float = 0.0) -> SystemSpec:
    """Single excited state at ``Omega`` with the counter-term switched on."""
    return SystemSpec((Level(Omega, n0),), apply_counterterm=True, label="two_level")


def three_level_preset(Omega: float = 1.0, nU0: float = 0.0, nL0: float = 0.0,
                       apply_counterterm: bool = False) -> SystemSpec:
    """Upper level at ``+Omega`` (index 0) and lower level at ``-Omega`` (index 1).

    Both transitions couple to the bath with identical g_nu. The counter-term
    is off by default.
    """
    return SystemSpec(
        (Level(Omega, nU0), Level(-Omega, nL0)),
        apply_counterterm=apply_counterterm,
        label="three_level",
    )


def dump_matrix(path, h: ReducedHamiltonian) -> None:
    """Whitespace-separated, row-major text dump; for debugging only."""
    np.savetxt(path, h.matrix, fmt="%.17g")
