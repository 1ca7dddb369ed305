"""Heisenberg-picture propagation through the normal-mode basis.

A creation operator evolves as ``S_i^dag(t) = sum_b M_ib(t) c_b^dag(0)`` with
``M(t) = U exp(i Lambda t) U^T``. Every observable below is a bilinear in
``M`` weighted by the initial occupations, which are diagonal in the
uncoupled basis (factorized thermal initial state).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bath import DiscretizedBath, resolution_report
from .eigen import EigenDecomposition, diagonalize
from .exceptions import DomainError, ValidityWarning
from .model import ReducedHamiltonian, SystemSpec, build_hamiltonian

__all__ = [
    "Propagator",
    "TimeGrid",
    "Trajectory",
    "m_matrix",
    "occupations",
    "two_time_correlation",
    "run",
    "write_trajectory_csv",
]


@dataclass(frozen=True, eq=False)
class Propagator:
    eig: EigenDecomposition
    n_system: int
    n_bath: int
    initial_occupations: np.ndarray
    tau_max: float = np.inf

    def __post_init__(self):
        occ = np.array(self.initial_occupations, dtype=float)
        if occ.shape != (self.eig.dim,):
            raise DomainError(f"expected {self.eig.dim} initial occupations, got {occ.shape}")
        if self.n_system + self.n_bath != self.eig.dim:
            raise DomainError("n_system + n_bath must equal the eigen dimension")
        if np.any(occ < 0):
            raise DomainError("initial occupations must be non-negative")
        occ.setflags(write=False)
        object.__setattr__(self, "initial_occupations", occ)

    @classmethod
    def from_parts(cls, system: SystemSpec, bath: DiscretizedBath, method: str = "lapack",
                   **eigen_kw) -> "Propagator":
        h = build_hamiltonian(system, bath)
        return cls.from_hamiltonian(h, system.initial_occupations, bath.occupations,
                                    tau_max=resolution_report(bath).tau_max, method=method, **eigen_kw)

    @classmethod
    def from_hamiltonian(cls, h: ReducedHamiltonian, system_occupations, bath_occupations,
                         tau_max: float = np.inf, method: str = "lapack", **eigen_kw) -> "Propagator":
        eig = diagonalize(h, method=method, **eigen_kw)
        occ = np.concatenate([np.asarray(system_occupations, float), np.asarray(bath_occupations, float)])
        return cls(eig, h.n_system, h.n_bath, occ, tau_max)

    @property
    def dim(self) -> int:
        return self.eig.dim

    def rows(self, t: float, rows: slice | np.ndarray = slice(None)) -> np.ndarray:
        """Selected rows of M(t) without forming the full matrix."""
        u = self.eig.transform
        ur = u[rows]
        wt = self.eig.frequencies * t
        # two real products are cheaper than one complex-by-real product
        out = np.empty((ur.shape[0], u.shape[0]), dtype=complex)
        out.real = (ur * np.cos(wt)) @ u.T
        out.imag = (ur * np.sin(wt)) @ u.T
        return out


@dataclass(frozen=True)
class TimeGrid:
    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        if t.size == 0:
            raise DomainError("time grid is empty")
        if not np.all(np.isfinite(t)):
            raise DomainError("time grid must be finite")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise DomainError("time grid must be strictly increasing")
        object.__setattr__(self, "times", t)

    @classmethod
    def linspace(cls, t_start: float, t_end: float, n_points: int) -> "TimeGrid":
        return cls(np.linspace(t_start, t_end, n_points))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    system_occupations: np.ndarray
    total_excitation: np.ndarray
    system_coherences: Optional[np.ndarray] = None
    bath_occupations: Optional[np.ndarray] = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def n_system(self) -> int:
        return self.system_occupations.shape[1]

    def conservation_residual(self) -> float:
        n = self.total_excitation
        return float(np.max(np.abs(n - n[0])) / (abs(n[0]) + 1.0))


def m_matrix(prop: Propagator, t: float) -> np.ndarray:
    """Full propagator ``M_ab(t) = sum_alpha U_a,alpha U_b,alpha exp(i Omega_alpha t)``."""
    return prop.rows(t)


def occupations(prop: Propagator, t: float, include_bath: bool = False) -> np.ndarray:
    """Occupations ``n_a(t) = sum_b |M_ab(t)|^2 n0_b`` of the system (and optionally bath)."""
    rows = slice(None) if include_bath else slice(0, prop.n_system)
    m = prop.rows(t, rows)
    return (m.real**2 + m.imag**2) @ prop.initial_occupations


def two_time_correlation(prop: Propagator, i: int, j: int, t: float, t2: float) -> complex:
    """``<S_i^dag(t) S_j(t2)> = sum_b M_ib(t) n0_b conj(M_jb(t2))``."""
    for k in (i, j):
        if not 0 <= k < prop.n_system:
            raise IndexError(f"system index {k} out of range for {prop.n_system} levels")
    mi = prop.rows(t, [i])[0]
    mj = prop.rows(t2, [j])[0]
    return complex(np.sum(mi * prop.initial_occupations * mj.conj()))


def _coherence_pairs(n_system: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n_system) for j in range(i + 1, n_system)]


def run(prop: Propagator, grid: TimeGrid, coherences: bool = False,
        bath_occupations: bool = False) -> Trajectory:
    """Evaluate occupations and the total excitation number on every grid time.

    Times beyond the validity horizon ``tau_max`` of the bath are computed
    anyway; a :class:`ValidityWarning` is emitted and recorded on the result.
    """
    times = grid.times
    notes = []
    if times[-1] > prop.tau_max:
        msg = f"t_end={times[-1]:.6g} exceeds tau_max={prop.tau_max:.6g}; finite-bath recurrences expected"
        warnings.warn(msg, ValidityWarning, stacklevel=2)
        notes.append(msg)
    ns = prop.n_system
    n0 = prop.initial_occupations
    sys_occ = np.empty((times.size, ns))
    total = np.empty(times.size)
    bath_occ = np.empty((times.size, prop.n_bath)) if bath_occupations else None
    coh = np.empty((times.size, ns, ns), dtype=complex) if coherences else None
    for k, t in enumerate(times):
        m = prop.rows(t)
        occ = (m.real**2 + m.imag**2) @ n0
        sys_occ[k] = occ[:ns]
        total[k] = occ.sum()
        if bath_occ is not None:
            bath_occ[k] = occ[ns:]
        if coh is not None:
            ms = m[:ns]
            coh[k] = (ms * n0) @ ms.conj().T
    return Trajectory(times, sys_occ, total, coh, bath_occ, tuple(notes))


def trajectory_header(n_system: int, coherences: bool) -> list[str]:
    cols = ["t"] + [f"n_{i}" for i in range(n_system)]
    if coherences:
        for i, j in _coherence_pairs(n_system):
            cols += [f"re_c_{i}{j}", f"im_c_{i}{j}"]
    cols.append("N_total")
    return cols


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write ``t, n_0..n_{NS-1}[, re_c_ij, im_c_ij ...], N_total``.

    Coherence columns cover pairs ``i < j`` in row-major order and appear
    only when the trajectory carries coherences.
    """
    ns = traj.n_system
    pairs = _coherence_pairs(ns)
    has_coh = traj.system_coherences is not None
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_header(ns, has_coh))
        for k, t in enumerate(traj.times):
            row = [t, *traj.system_occupations[k]]
            if has_coh:
                for i, j in pairs:
                    c = traj.system_coherences[k, i, j]
                    row += [c.real, c.imag]
            row.append(traj.total_excitation[k])
            writer.writerow([f"{x:.15e}" for x in row])
