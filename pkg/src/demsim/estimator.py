"""Scikit-learn style front end.

``fit`` does the expensive part once (discretize, assemble, diagonalize);
``predict`` evaluates occupations at arbitrary times from the eigenbasis.
Hyperparameters live in ``__init__`` so ``get_params``/``set_params``/
``clone`` work and sweeps are a loop over ``set_params``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .bath import BathSpec, Statistics, counterterm, discretize, resolution_report
from .dynamics import Propagator, TimeGrid, Trajectory, occupations, run, two_time_correlation
from .model import Level, SystemSpec, build_hamiltonian, three_level_preset, two_level_preset
from .spectral import SpectralFunction

__all__ = ["DiscretizedEnvironment", "check_times"]


def check_times(times, *, strictly_increasing: bool = False) -> np.ndarray:
    """Validate a 1-D array of finite times and return it as float64."""
    t = column_or_1d(np.asarray(times, dtype=float).reshape(-1), warn=False)
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if strictly_increasing and t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    return t


class DiscretizedEnvironment(BaseEstimator):
    """Few-level system coupled to a discretized Lorentz-Drude bath.

    Parameters
    ----------
    g0, gamma : float
        Lorentz-Drude coupling strength and cutoff.
    omega_max : float
        Top of the bath band.
    n_max : int
        Largest grid index; the bath has ``n_max + 1`` modes.
    temperature : float
        Bath temperature (k_B T in units of the system frequency).
    statistics : {"boson", "fermion"}
        Sets the initial bath occupations only.
    level_frequencies : sequence of float
        System level energies. ``(1.0,)`` is the two-level case,
        ``(1.0, -1.0)`` the three-level case (upper, lower).
    initial_occupations : sequence of float or None
        Per-level initial occupations in [0, 1]; zeros when None.
    counterterm : bool
        Shift every level by ``sum g^2/omega`` before diagonalizing.
    eigen_method : {"lapack", "householder_ql"}
        Eigensolver back end.
    eigen_tol : float or None
        Deflation tolerance for ``"householder_ql"`` (machine epsilon when
        None). Loosening it is useful only to exercise the checks.

    Attributes
    ----------
    bath_ : DiscretizedBath
    hamiltonian_ : ReducedHamiltonian
    propagator_ : Propagator
    counterterm_ : float
        Shift actually applied (0 when ``counterterm`` is False).
    delta_tau_, tau_max_ : float
        Time resolution and validity horizon of the discretized bath.
    """

    def __init__(self, g0=0.1, gamma=12.0, omega_max=10.0, n_max=250, temperature=1.0,
                 statistics="boson", level_frequencies=(1.0,), initial_occupations=None,
                 counterterm=True, eigen_method="lapack", eigen_tol=None):
        self.g0 = g0
        self.gamma = gamma
        self.omega_max = omega_max
        self.n_max = n_max
        self.temperature = temperature
        self.statistics = statistics
        self.level_frequencies = level_frequencies
        self.initial_occupations = initial_occupations
        self.counterterm = counterterm
        self.eigen_method = eigen_method
        self.eigen_tol = eigen_tol

    @classmethod
    def two_level(cls, Omega=1.0, n0=0.0, **params):
        spec = two_level_preset(Omega, n0)
        return cls(level_frequencies=tuple(map(float, spec.frequencies)),
                   initial_occupations=tuple(map(float, spec.initial_occupations)),
                   counterterm=spec.apply_counterterm, **params)

    @classmethod
    def three_level(cls, Omega=1.0, nU0=0.0, nL0=0.0, **params):
        params.setdefault("counterterm", False)
        spec = three_level_preset(Omega, nU0, nL0, apply_counterterm=params.pop("counterterm"))
        return cls(level_frequencies=tuple(map(float, spec.frequencies)),
                   initial_occupations=tuple(map(float, spec.initial_occupations)),
                   counterterm=spec.apply_counterterm, **params)

    def _system_spec(self) -> SystemSpec:
        freqs = [float(w) for w in np.atleast_1d(self.level_frequencies)]
        occ = self.initial_occupations
        occ = [0.0] * len(freqs) if occ is None else [float(x) for x in np.atleast_1d(occ)]
        if len(occ) != len(freqs):
            raise ValueError(f"{len(freqs)} levels but {len(occ)} initial occupations")
        return SystemSpec(tuple(Level(w, n) for w, n in zip(freqs, occ)), apply_counterterm=bool(self.counterterm))

    def fit(self, X=None, y=None):
        """Build the bath and Hamiltonian and diagonalize. ``X`` and ``y`` are ignored."""
        self.spectral_ = SpectralFunction(float(self.g0), float(self.gamma))
        self.bath_spec_ = BathSpec(int(self.n_max), float(self.omega_max), float(self.temperature),
                                   Statistics(self.statistics))
        self.system_ = self._system_spec()
        self.bath_ = discretize(self.spectral_, self.bath_spec_)
        self.hamiltonian_ = build_hamiltonian(self.system_, self.bath_)
        res = resolution_report(self.bath_)
        self.delta_tau_, self.tau_max_ = res.delta_tau, res.tau_max
        self.counterterm_ = counterterm(self.bath_) if self.system_.apply_counterterm else 0.0
        self.propagator_ = Propagator.from_hamiltonian(
            self.hamiltonian_, self.system_.initial_occupations, self.bath_.occupations,
            tau_max=self.tau_max_, method=self.eigen_method,
            **({} if self.eigen_tol is None else {"tol": float(self.eigen_tol)}),
        )
        self.n_levels_ = self.system_.n_levels
        return self

    def predict(self, X):
        """System occupations at times ``X``, shape ``(n_times, n_levels)``."""
        check_is_fitted(self, "propagator_")
        t = check_times(X)
        return np.array([occupations(self.propagator_, tk) for tk in t]).reshape(t.size, self.n_levels_)

    def trajectory(self, times, coherences=False, bath_occupations=False) -> Trajectory:
        check_is_fitted(self, "propagator_")
        return run(self.propagator_, TimeGrid(check_times(times, strictly_increasing=True)),
                   coherences=coherences, bath_occupations=bath_occupations)

    def correlation(self, i, j, t, t2) -> complex:
        """Two-time correlation ``<S_i^dag(t) S_j(t2)>``."""
        check_is_fitted(self, "propagator_")
        return two_time_correlation(self.propagator_, i, j, t, t2)
