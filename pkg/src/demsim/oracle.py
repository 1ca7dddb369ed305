"""Checks on the spectral pipeline that do not go through the eigensolver.

``propagate_ode`` integrates ``dM/dt = i M H_R`` with an explicit Runge-Kutta
scheme acting on ``H_R`` directly. The other two helpers read physics off a
trajectory: an exponential decay rate and a late-time average.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import Propagator, TimeGrid, Trajectory, run
from .exceptions import DomainError, FitError, OracleStepError
from .model import ReducedHamiltonian

__all__ = [
    "RKMethod",
    "OdeSpec",
    "OdeResult",
    "propagate_ode",
    "fit_decay_rate",
    "thermal_asymptote",
]

DRIFT_TARGET = 1e-8
DRIFT_LIMIT = 1e-6


class RKMethod(str, enum.Enum):
    RK4 = "RK4"
    RK8 = "RK8"


def _tableau(method: RKMethod) -> tuple[np.ndarray, np.ndarray]:
    if method is RKMethod.RK4:
        a = np.array([[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]], dtype=float)
        b = np.array([1, 2, 2, 1], dtype=float) / 6.0
        return a, b
    # Dormand-Prince 8th-order propagating stages, as shipped with SciPy's DOP853
    from scipy.integrate._ivp import dop853_coefficients as dop

    n = dop.N_STAGES
    return np.array(dop.A[:n, :n], dtype=float), np.array(dop.B, dtype=float)


@dataclass(frozen=True)
class OdeSpec:
    """Fixed-step integration settings.

    ``max_halvings`` bounds the automatic step refinement triggered when the
    unitarity drift at ``t_end`` exceeds 1e-8; set it to 0 to pin the step.
    """

    step: float = 1e-3
    method: RKMethod = RKMethod.RK4
    t_end: float = 20.0
    max_halvings: int = 4

    def __post_init__(self):
        object.__setattr__(self, "method", RKMethod(self.method))
        if not self.step > 0:
            raise DomainError("step must be positive")
        if not self.t_end >= 0:
            raise DomainError("t_end must be non-negative")


@dataclass(frozen=True, eq=False)
class OdeResult:
    times: np.ndarray
    matrices: np.ndarray
    step: float
    unitarity_drift: float


def rk_step(y: np.ndarray, gen: np.ndarray, h: float, method=RKMethod.RK4) -> np.ndarray:
    """One explicit RK step for ``dY/dt = Y @ gen``."""
    a, b = _tableau(RKMethod(method))
    ks = []
    for s in range(len(b)):
        ys = y
        for j in range(s):
            if a[s, j] != 0.0:
                ys = ys + (h * a[s, j]) * ks[j]
        ks.append(ys @ gen)
    out = y
    for s, bs in enumerate(b):
        if bs != 0.0:
            out = out + (h * bs) * ks[s]
    return out


def _unitarity_drift(m: np.ndarray) -> float:
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def _snap(sample_times: np.ndarray, step: float, t_end: float) -> np.ndarray:
    t = np.asarray(sample_times, dtype=float)
    if np.any(t < 0) or np.any(t > t_end * (1 + 1e-12)):
        raise DomainError(f"sample times must lie in [0, {t_end}]")
    # nearest grid point, ties rounded half to even
    return np.rint(t / step).astype(np.int64)


def propagate_ode(h: ReducedHamiltonian, spec: OdeSpec, sample_times, stepping: str = "power") -> OdeResult:
    """Integrate ``dM/dt = i M H_R`` from ``M(0) = I``.

    Each sample time is snapped to the nearest multiple of the step; the
    snapped times are returned on the result.

    For this linear, time-independent equation one RK step is a fixed matrix
    ``P`` (obtained by stepping the identity), so ``stepping="power"``
    evaluates ``M(k h) = P**k`` by repeated squaring. ``stepping="loop"``
    applies the step ``k`` times; both give the same iterates up to rounding.
    """
    hmat = np.asarray(h.matrix, dtype=float)
    n = hmat.shape[0]
    gen = 1j * hmat
    # Gershgorin bound on the spectral radius keeps the eigensolver out of this path
    radius = float(np.max(np.sum(np.abs(hmat), axis=1))) if n else 0.0
    step = spec.step
    for attempt in range(spec.max_halvings + 1):
        n_end = int(round(spec.t_end / step))
        p = rk_step(np.eye(n, dtype=complex), gen, step, spec.method)
        drift = _unitarity_drift(np.linalg.matrix_power(p, n_end)) if n_end else 0.0
        if drift <= DRIFT_TARGET or attempt == spec.max_halvings:
            break
        step *= 0.5
    if step * radius >= 0.1:
        warnings.warn(f"step*spectral_radius = {step * radius:.3g} >= 0.1", RuntimeWarning, stacklevel=2)
    if drift > DRIFT_LIMIT:
        raise OracleStepError(f"unitarity drift {drift:.3g} exceeds {DRIFT_LIMIT:g} at step {step:g}")
    if drift > DRIFT_TARGET:
        warnings.warn(f"unitarity drift {drift:.3g} above target {DRIFT_TARGET:g}", RuntimeWarning, stacklevel=2)

    idx = _snap(sample_times, step, spec.t_end)
    order = np.argsort(idx, kind="stable")
    out = np.empty((idx.size, n, n), dtype=complex)
    m = np.eye(n, dtype=complex)
    k_now = 0
    powers: dict[int, np.ndarray] = {}
    for pos in order:
        gap = int(idx[pos]) - k_now
        if gap:
            if stepping == "loop":
                for _ in range(gap):
                    m = rk_step(m, gen, step, spec.method)
            elif stepping == "power":
                if gap not in powers:
                    powers[gap] = np.linalg.matrix_power(p, gap)
                m = m @ powers[gap]
            else:
                raise ValueError(f"unknown stepping {stepping!r}")
            k_now = int(idx[pos])
        out[pos] = m
    return OdeResult(idx * step, out, step, drift)


def fit_decay_rate(traj: Trajectory, level: int, window: tuple[float, float]) -> float:
    """Least-squares rate ``-d ln n / dt`` of one level over ``window``."""
    t0, t1 = window
    sel = (traj.times >= t0) & (traj.times <= t1)
    t = traj.times[sel]
    n = traj.system_occupations[sel, level]
    if t.size < 2:
        raise FitError(f"fewer than two samples in window {window}")
    if np.any(n <= 0):
        bad = t[np.argmax(n <= 0)]
        raise FitError(f"occupation not strictly positive in window (first at t={bad:.6g})")
    dn = np.diff(n)
    if not (np.all(dn < 0) or np.all(dn > 0)):
        sgn = np.sign(dn)
        k = int(np.argmax(sgn != sgn[0]))
        raise FitError(f"occupation is not monotone in window: direction changes near t={t[k + 1]:.6g}")
    slope = np.polyfit(t, np.log(n), 1)[0]
    return float(-slope)


def thermal_asymptote(prop: Propagator, level: int, window: tuple[float, float],
                      n_points: int = 301) -> float:
    """Average occupation of ``level`` over a late-time window inside ``tau_max``."""
    t0, t1 = window
    if not 0 <= t0 < t1:
        raise DomainError(f"invalid window {window}")
    if t1 > prop.tau_max:
        raise DomainError(f"window end {t1} exceeds tau_max={prop.tau_max:.6g}")
    traj = run(prop, TimeGrid.linspace(t0, t1, n_points))
    return float(np.mean(traj.system_occupations[:, level]))
