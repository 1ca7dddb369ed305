"""Scenario-level tasks shared by the CLI and the acceptance tests."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, m_matrix
from .estimator import DiscretizedEnvironment
from .exceptions import OracleStepError, ValidityWarning
from .oracle import OdeSpec, propagate_ode
from .scenario import Scenario
from .spectral import kernel_table

__all__ = [
    "SimulationResult", "simulate", "structural_checks", "oracle_deviation",
    "verify", "converge", "kernel", "THRESHOLDS",
]

THRESHOLDS = {
    "reconstruction": 1e-10,
    "unitarity": 1e-9,
    "conservation": 1e-9,
    "oracle": 1e-6,
}
MAX_ORACLE_SAMPLES = 200


@dataclass
class SimulationResult:
    scenario: Scenario
    model: DiscretizedEnvironment
    trajectory: Trajectory
    wall_time: float
    warnings: list[str] = field(default_factory=list)

    def manifest(self) -> dict:
        m = self.model
        return {
            "scenario": self.scenario.model_dump(mode="json"),
            "delta_tau": m.delta_tau_,
            "tau_max": m.tau_max_,
            "counterterm": m.counterterm_,
            "n_modes": m.bath_.n_modes,
            "delta_omega": m.bath_.delta_omega,
            "conservation_residual": self.trajectory.conservation_residual(),
            "wall_time_s": self.wall_time,
            "warnings": list(self.warnings),
        }


def simulate(scenario: Scenario, **overrides) -> SimulationResult:
    start = time.perf_counter()
    model = scenario.estimator(**overrides).fit()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        traj = model.trajectory(scenario.times(), coherences=scenario.outputs.coherences,
                                bath_occupations=scenario.outputs.bath_occupations)
    notes = [str(w.message) for w in caught if issubclass(w.category, ValidityWarning)]
    return SimulationResult(scenario, model, traj, time.perf_counter() - start, notes)


def _subsample(times: np.ndarray, n: int) -> np.ndarray:
    if times.size <= n:
        return times
    return times[np.unique(np.linspace(0, times.size - 1, n).round().astype(int))]


def structural_checks(model: DiscretizedEnvironment, times: np.ndarray) -> dict:
    """Reconstruction, unitarity and conservation residuals of a fitted model."""
    prop = model.propagator_
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        traj = model.trajectory(times)
    values = {
        "reconstruction": prop.eig.reconstruction_error(model.hamiltonian_),
        "unitarity": max(
            float(np.max(np.abs(m @ m.conj().T - np.eye(prop.dim))))
            for m in (m_matrix(prop, t) for t in _subsample(times, MAX_ORACLE_SAMPLES))
        ),
        "conservation": traj.conservation_residual(),
    }
    return {k: {"value": v, "threshold": THRESHOLDS[k], "passed": bool(v <= THRESHOLDS[k])} for k, v in values.items()}


def oracle_deviation(model: DiscretizedEnvironment, times: np.ndarray, step: float = 1e-3,
                     max_halvings: int = 4):
    """Max-abs gap between RK-propagated and spectral ``M(t)`` on ``times``."""
    prop = model.propagator_
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        spec = OdeSpec(step=step, t_end=float(times[-1]), max_halvings=max_halvings)
        ode = propagate_ode(model.hamiltonian_, spec, times)
    dev = max(float(np.max(np.abs(m - m_matrix(prop, t)))) for t, m in zip(ode.times, ode.matrices))
    return dev, ode


def verify(scenario: Scenario, eigen_method: str = "lapack", eigen_tol: float | None = None,
           ode_step: float = 1e-3) -> dict:
    """Run every structural and oracle check; ``report["passed"]`` is the verdict."""
    model = scenario.estimator(eigen_method=eigen_method, eigen_tol=eigen_tol).fit()
    times = scenario.times()
    report = {"checks": structural_checks(model, times), "oracle_status": "ok"}
    try:
        dev, ode = oracle_deviation(model, _subsample(times, MAX_ORACLE_SAMPLES), ode_step)
        report["checks"]["oracle"] = {
            "value": dev, "threshold": THRESHOLDS["oracle"], "passed": bool(dev <= THRESHOLDS["oracle"]),
            "step": ode.step, "ode_unitarity_drift": ode.unitarity_drift,
        }
    except OracleStepError as exc:
        report["oracle_status"] = f"step_control_failure: {exc}"
        report["checks"]["oracle"] = {"value": None, "threshold": THRESHOLDS["oracle"], "passed": False}
    report["passed"] = all(c["passed"] for c in report["checks"].values())
    return report


def converge(scenario: Scenario, n_max_list=None, omega_max_list=None) -> dict:
    """Successive max-abs occupation differences across bath grids.

    Differences are taken on the scenario time grid restricted to the window
    valid for every grid (``t <= min tau_max``).
    """
    if (n_max_list is None) == (omega_max_list is None):
        raise ValueError("give exactly one of n_max_list or omega_max_list")
    key, values = ("n_max", n_max_list) if n_max_list is not None else ("omega_max", omega_max_list)
    values = list(values)
    if len(values) < 2:
        raise ValueError("convergence needs at least two grid settings")
    runs = []
    for v in values:
        sc = scenario.replace("bath", **{key: v})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            res = simulate(sc)
        runs.append(res)
    t_valid = min(r.model.tau_max_ for r in runs)
    times = scenario.times()
    mask = times <= t_valid
    diffs = []
    for a, b, va, vb in zip(runs, runs[1:], values, values[1:]):
        d = np.abs(a.trajectory.system_occupations[mask] - b.trajectory.system_occupations[mask])
        diffs.append({"from": va, "to": vb, "max_abs_diff": float(d.max()) if d.size else 0.0})
    return {
        "axis": key,
        "values": values,
        "valid_window": [float(times[0]), float(min(t_valid, times[-1]))],
        "runs": [{key: v, "tau_max": r.model.tau_max_, "n_modes": r.model.bath_.n_modes, "wall_time_s": r.wall_time}
                 for v, r in zip(values, runs)],
        "diffs": diffs,
    }


def kernel(scenario: Scenario, n_points: int = 501) -> np.ndarray:
    """Discrete vs continuum kernel table over ``[0, tau_max/2]``."""
    model = scenario.estimator()
    model.fit()
    times = np.linspace(0.0, 0.5 * model.tau_max_, n_points)
    return kernel_table(model.spectral_, model.bath_, times)
