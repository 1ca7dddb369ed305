"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``. Tolerances are the stated ones
and are not relaxed when a criterion fails.
"""

import warnings

import numpy as np
import pytest

from demsim import (
    BathSpec,
    DiscretizedEnvironment,
    Level,
    Propagator,
    SpectralFunction,
    SystemSpec,
    TimeGrid,
    discretize,
    discrete_kernel,
    fit_decay_rate,
    flat_bath,
    run,
    thermal_asymptote,
)
from demsim.exceptions import ValidityWarning
from demsim.runner import oracle_deviation, structural_checks
from demsim.scenario import bundled_scenarios, load_scenario

pytestmark = pytest.mark.acceptance

DEFAULT = dict(g0=0.1, gamma=12.0, omega_max=10.0, n_max=250, temperature=1.0, statistics="boson")
WINDOW = (30.0, 60.0)


@pytest.fixture
def report(capsys):
    def _report(number, title, passed, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        return passed

    return _report


@pytest.fixture(scope="module")
def default_model():
    return DiscretizedEnvironment.two_level(1.0, 0.0, **DEFAULT).fit()


def oracle_times():
    return np.linspace(0.0, 20.0, 200)


def test_c01_exactness_cross_check(report, default_model):
    dev, ode = oracle_deviation(default_model, oracle_times(), step=1e-3)
    ok = report(1, "spectral vs RK4 oracle", dev <= 1e-6, f"max|dM| = {dev:.3e} (<= 1e-6, step {ode.step:g})")
    assert ok


def test_c02_structural_invariants(report):
    failures, worst = [], {"reconstruction": 0.0, "unitarity": 0.0, "conservation": 0.0}
    for name, path in bundled_scenarios().items():
        sc = load_scenario(path)
        model = sc.estimator().fit()
        checks = structural_checks(model, sc.times())
        for key, c in checks.items():
            worst[key] = max(worst[key], c["value"])
            if not c["passed"]:
                failures.append(f"{name}:{key}")
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    ok = report(2, "structural invariants on bundled scenarios", not failures, detail + (f"; failed {failures}" if failures else ""))
    assert ok


def test_c03_kernel_fidelity(report):
    sf = SpectralFunction(0.1, 2.0)
    bath = discretize(sf, BathSpec(n_max=250, omega_max=10.0))
    tau_max = 2 * np.pi / bath.delta_omega
    times = np.linspace(0.0, tau_max / 4, 2001)
    re = np.array([discrete_kernel(bath, t).real for t in times])
    target = 0.5 * sf.g0 * sf.gamma * np.exp(-sf.gamma * times)
    err = np.abs(re - target).max() / (0.5 * sf.g0 * sf.gamma)
    t_worst = times[np.argmax(np.abs(re - target))]
    ok = report(3, "kernel fidelity", err <= 0.02, f"max rel err {err:.4f} at t = {t_worst:.3g} (<= 0.02)")
    assert ok


def test_c04_thermalization(report):
    lines = []
    passed = True
    for statistics, eps in (("boson", -1.0), ("fermion", 1.0)):
        for temperature in (0.5, 1.0):
            model = DiscretizedEnvironment.two_level(
                1.0, 0.0, **{**DEFAULT, "temperature": temperature, "statistics": statistics}).fit()
            omega_shifted = 1.0 + model.counterterm_
            target = 1.0 / (np.exp(omega_shifted / temperature) + eps)
            avg = thermal_asymptote(model.propagator_, 0, WINDOW)
            rel = abs(avg - target) / target
            passed &= rel <= 0.10
            lines.append(f"{statistics} T={temperature}: <n>={avg:.4f} vs {target:.4f} ({rel:+.1%})")
    ok = report(4, "thermalization at Omega'", passed, "; ".join(lines) + " (within 10%)")
    assert ok


def test_c05_markovian_decay_rate(report):
    spec = BathSpec(n_max=250, omega_max=10.0, temperature=0.0)
    dw = spec.delta_omega
    g = np.sqrt(0.2 * dw / (2 * np.pi))
    bath = flat_bath(g, spec)
    omega = float(bath.frequencies[125])
    prop = Propagator.from_parts(SystemSpec((Level(omega, 1.0),)), bath)
    traj = run(prop, TimeGrid.linspace(0.0, 12.0, 241))
    rate = fit_decay_rate(traj, 0, (2.0, 10.0))
    rel = abs(rate - 0.2) / 0.2
    ok = report(5, "golden-rule decay rate", rel <= 0.05, f"Gamma = {rate:.4f} vs 0.2 ({rel:.2%}, <= 5%)")
    assert ok


def test_c06_weak_coupling_coincidence(report):
    params = {**DEFAULT, "g0": 0.001}
    t = np.linspace(0.0, 20.0, 401)
    two = DiscretizedEnvironment.two_level(1.0, 0.0, **params).fit().predict(t)[:, 0]
    three = DiscretizedEnvironment.three_level(1.0, 0.0, 0.0, **params).fit().predict(t)[:, 0]
    diff = np.abs(three - two).max()
    ok = report(6, "2- vs 3-level upper level at g0=0.001", diff <= 1e-3, f"max|dn| = {diff:.2e} (<= 1e-3)")
    assert ok


def sign_changes(values):
    s = np.sign(np.diff(values))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def test_c07_three_level_signatures(report):
    # "coincide then separate" pinned as |n_U - n_L| <= 0.01 on [0, 1] and window means >= 0.1 apart
    model = DiscretizedEnvironment.three_level(1.0, 0.0, 0.0, **DEFAULT).fit()
    early = model.predict(np.linspace(0.0, 1.0, 51))
    coincide = np.abs(early[:, 0] - early[:, 1]).max()
    late = model.predict(np.linspace(*WINDOW, 301)).mean(axis=0)
    n_u, n_l = late
    separate = abs(n_u - n_l)
    t = np.linspace(0.0, 10.0, 1001)
    osc = {g0: sign_changes(DiscretizedEnvironment.three_level(1.0, 0.0, 0.0, **{**DEFAULT, "g0": g0})
                            .fit().predict(t)[:, 0]) for g0 in (0.5, 0.001)}
    parts = {
        "coincide": coincide <= 0.01,
        "separate": separate >= 0.1,
        "n_L > n_U": n_l > n_u,
        "oscillations": osc[0.5] >= 2 and osc[0.001] < 2,
    }
    detail = (f"max|n_U-n_L| on [0,1] = {coincide:.4f}; <n_U> = {n_u:.4f}, <n_L> = {n_l:.4f}; "
              f"sign changes g0=0.5: {osc[0.5]}, g0=0.001: {osc[0.001]}; "
              + ", ".join(f"{k} {'ok' if v else 'FAIL'}" for k, v in parts.items()))
    ok = report(7, "three-level signatures", all(parts.values()), detail)
    assert ok


def time_to_fraction(model, fraction=0.9):
    t = np.linspace(0.0, WINDOW[1], 6001)
    n_u = model.predict(t)[:, 0]
    asym = n_u[t >= WINDOW[0]].mean()
    hit = np.nonzero(n_u >= fraction * asym)[0]
    return float(t[hit[0]]) if hit.size else np.inf, asym


def test_c08_non_markovian_slowdown(report):
    # asymptote taken as the [30, 60] window mean
    res = {gamma: time_to_fraction(DiscretizedEnvironment.three_level(1.0, 0.0, 0.0, **{**DEFAULT, "gamma": gamma}).fit())
           for gamma in (0.5, 2.0)}
    slow, fast = res[0.5][0], res[2.0][0]
    ok = report(8, "non-Markovian slowdown", slow > fast,
                f"t_90% = {slow:.2f} at gamma=0.5 vs {fast:.2f} at gamma=2")
    assert ok


def test_c09_grid_convergence(report):
    t = np.linspace(0.0, 60.0, 601)
    runs = {}
    for n_max in (250, 500):
        model = DiscretizedEnvironment.two_level(1.0, 0.0, **{**DEFAULT, "n_max": n_max}).fit()
        with warnings.catch_warnings():
            warnings.simplefilter("error", ValidityWarning)
            runs[n_max] = model.predict(t[t <= model.tau_max_])
    common = min(len(r) for r in runs.values())
    diff = np.abs(runs[250][:common] - runs[500][:common]).max()
    ok = report(9, "N_max 250 vs 500", diff <= 1e-3, f"max|dn| = {diff:.2e} over [0, {t[common - 1]:g}] (<= 1e-3)")
    assert ok


def test_c10_rk4_order(report, default_model):
    devs = [oracle_deviation(default_model, oracle_times(), step=h, max_halvings=0)[0] for h in (1e-3, 5e-4)]
    ratio = devs[0] / devs[1]
    ok = report(10, "RK4 step halving", ratio >= 12,
                f"dev {devs[0]:.3e} -> {devs[1]:.3e}, ratio {ratio:.1f} (>= 12)")
    assert ok
