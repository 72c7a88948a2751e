"""Acceptance criteria 1-10, each checked at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line (shown in the session
summary) before asserting, so a red criterion still reports its measured
value.
"""
import json
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from evocoef import (Field, KernelQuery, SpaceGrid, TimeGrid, Trace, bump_datum,
                     eval_kernel, gaussian_datum, poisson_solve, recover, solve_heat,
                     solve_wave, trace_at)
from evocoef.cli import main
from evocoef.green import kernel_radial
from evocoef.harness import (convergence_study, generate_traces, run_experiment,
                             truth_coefficient)
from evocoef.spectral import mode_energy

from configs import (CROSSING, CROSSING_COMPONENTS, GENERAL_FIRST, GENERAL_SECOND, HEAT,
                     WAVE, cfg, spatial, variant)
from conftest import ACCEPTANCE, closed
from oracles import gaussian_kernel, gaussian_pair_h2, tensor_kernel

pytestmark = pytest.mark.filterwarnings("ignore:recovered coefficient drops")


def record(num, ok, detail, elapsed=None, budget=None):
    if budget is not None:
        ok = ok and elapsed <= budget
        detail += f"; {elapsed:.1f} s of {budget:.0f} s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def orders_ok(rows, lo=1.7, hi=2.3):
    orders = [r.order for r in rows[1:]]
    return all(o is not None and lo <= o <= hi for o in orders), orders


def test_01_kernel_matches_gaussian():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3):
        for _ in range(100):
            a1 = rng.uniform(0.05, 3.0)
            x = rng.normal(size=n)
            x *= rng.uniform(0, 5) * np.sqrt(a1) / np.linalg.norm(x)  # rho <= 5
            got = eval_kernel(KernelQuery(t=1.0, x=tuple(x), alpha1=a1, m=1, n=n))
            exact = gaussian_kernel(np.linalg.norm(x), a1, n)
            worst = max(worst, abs(got / exact - 1))
    record(1, worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)",
           time.perf_counter() - start, 10)


def test_02_kernel_matches_tensor_quadrature():
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst = 0.0
    for m, n in ((2, 1), (2, 2), (2, 3), (3, 1)):
        for _ in range(20):
            a1 = rng.uniform(0.3, 2.0)
            x = rng.normal(size=n)
            x *= rng.uniform(0, 5) * a1 ** (1 / (2 * m)) / np.linalg.norm(x)
            got = eval_kernel(KernelQuery(t=1.0, x=tuple(x), alpha1=a1, m=m, n=n))
            worst = max(worst, abs(got - tensor_kernel(x, a1, m)))
    record(2, worst <= 1e-6, f"max abs err {worst:.2e} (tol 1e-6)",
           time.perf_counter() - start, 120)


def test_03_poisson_matches_spectral():
    start = time.perf_counter()
    g = SpaceGrid(1, 16.0, 512)
    tg = TimeGrid(1.0, 64)
    u0 = bump_datum(g, [0.0], 2.0)
    q = g.observation_point([0.0])
    a = closed("sinusoidal", tg, a=2, b=1, omega=1)
    late = tg.nodes >= 0.05
    gaps = {}
    for m in (1, 2):
        spec = trace_at(solve_heat(u0, a, m, tg), q).values
        pois = poisson_solve(u0, q, a, m, tg).values
        gaps[m] = float(np.max(np.abs(spec - pois)[late]))
    worst = max(gaps.values())
    record(3, worst <= 1e-4, f"max gap m=1 {gaps[1]:.1e}, m=2 {gaps[2]:.1e} (tol 1e-4)",
           time.perf_counter() - start, 60)


def test_04_heat_recovery():
    start = time.perf_counter()
    details, ok = [], True
    for m in (1, 2):
        for dim in (1, 2):
            rows = convergence_study(cfg(HEAT, problem={"m": m}, grids=spatial(dim)),
                                     [512, 1024, 2048])
            err = rows[-1].error
            good, orders = orders_ok(rows)
            ok = ok and good and err <= 1e-4
            details.append(f"m={m} n={dim}: {err:.1e} orders "
                           + "/".join(f"{o:.2f}" for o in orders))
    record(4, ok, "; ".join(details) + " (tol 1e-4, order 2+-0.3)",
           time.perf_counter() - start, 120)


def test_05_wave_recovery():
    start = time.perf_counter()
    details, ok = [], True
    for dim in (1, 2):
        grid = {"dim": dim, "points_per_dim": 256 if dim == 1 else 64}
        rows = convergence_study(cfg(WAVE, grids=grid), [1024, 2048, 4096])
        err = rows[-1].error
        good, orders = orders_ok(rows)
        ok = ok and good and err <= 1e-3
        details.append(f"n={dim}: {err:.1e} orders " + "/".join(f"{o:.2f}" for o in orders))
    record(5, ok, "; ".join(details) + " (tol 1e-3, order 2+-0.3)",
           time.perf_counter() - start, 180)


def test_06_general_recovery():
    start = time.perf_counter()
    first = run_experiment(cfg(GENERAL_FIRST)).max_rel
    second = run_experiment(cfg(GENERAL_SECOND)).max_rel
    record(6, max(first, second) <= 1e-3,
           f"Psi {first:.1e}, Lambda {second:.1e} (tol 1e-3)",
           time.perf_counter() - start, 120)


def _residual(base, n_steps, order):
    c = cfg(base, grids={"n_steps": n_steps})
    h1, h2 = generate_traces(c)
    coef = truth_coefficient(c).samples
    dt = c.grids.time.dt
    y = h1.values
    if order == 1:
        d = (y[2:] - y[:-2]) / (2 * dt)
    else:
        d = (y[2:] - 2 * y[1:-1] + y[:-2]) / dt ** 2
    return float(np.max(np.abs(d - coef[1:-1] * h2.values[1:-1])))


def test_07_semi_discrete_identities():
    # past ~2000 steps the second difference sits on the roundoff floor eps/dt^2
    start = time.perf_counter()
    details, ok = [], True
    for name, base, order, levels in (("heat", HEAT, 1, (256, 512, 1024)),
                                      ("wave", WAVE, 2, (256, 512, 1024))):
        res = [_residual(base, n, order) for n in levels]
        orders = [np.log2(a / b) for a, b in zip(res, res[1:])]
        ok = ok and all(1.7 <= o <= 2.3 for o in orders)
        details.append(f"{name} residual {res[-1]:.1e} orders "
                       + "/".join(f"{o:.2f}" for o in orders))
    record(7, ok, "; ".join(details) + " (order 2+-0.3)", time.perf_counter() - start)


def test_08_invariants():
    checks = {}
    # ratio scale invariance on real traces: bitwise for a power of two
    c = cfg(HEAT, grids={"n_steps": 256})
    h1, h2 = generate_traces(c)
    base = recover(h1, h2, 1)
    scaled = recover(Trace(-8.0 * h1.values, h1.grid, "h1"),
                     Trace(-8.0 * h2.values, h2.grid, "h2"), 1)
    checks["scale"] = np.array_equal(base.coefficient.samples, scaled.coefficient.samples)

    # kernel evenness
    even = True
    for m, n in ((1, 1), (2, 1), (2, 2), (3, 3)):
        x = tuple(np.linspace(0.3, 1.7, n))
        k_pos = eval_kernel(KernelQuery(t=1.0, x=x, alpha1=0.9, m=m, n=n))
        k_neg = eval_kernel(KernelQuery(t=1.0, x=tuple(-v for v in x), alpha1=0.9, m=m, n=n))
        even = even and k_pos == k_neg
    checks["evenness"] = even

    # heat zero mode
    g = SpaceGrid(2, 8.0, 32)
    tg = TimeGrid(1.0, 32)
    sol = solve_heat(bump_datum(g, [0.0, 0.0], 2.0),
                     closed("sinusoidal", tg, a=2, b=1, omega=1), 2, tg)
    checks["zero mode"] = all(sol.spectral(k)[0, 0] == sol.position_hat[0, 0]
                              for k in range(len(tg)))

    # kernel sign structure
    r = np.linspace(0, 10, 400)
    low = min(float(np.min(kernel_radial(r, a1, 1, n))) for a1 in (0.1, 1.0, 3.0)
              for n in (1, 2, 3))
    checks["m=1 positivity"] = low >= -1e-12
    checks["m=2 sign change"] = bool(np.any(kernel_radial(r, 1.0, 2, 1) < 0))

    # wave energy under constant Phi
    g = SpaceGrid(1, 16.0, 256)
    tg = TimeGrid(1.0, 4096)
    sol = solve_wave(Field(np.zeros(g.shape), g), gaussian_datum(g, [0.0], 1.0),
                     closed("constant", tg, "phi", c=1.3), tg)
    e0 = mode_energy(sol, 0, 1.3)
    drift = max(abs(mode_energy(sol, k, 1.3) - e0) for k in range(len(tg))) / e0
    checks["energy"] = drift <= 1e-8

    failed = [k for k, v in checks.items() if not v]
    record(8, not failed, f"{len(checks) - len(failed)}/{len(checks)} invariants hold, "
           f"energy drift {drift:.1e}" + (f", failed: {failed}" if failed else ""))


def test_09_sign_change_detected(tmp_path, capsys):
    path = tmp_path / "crossing.json"
    path.write_text(json.dumps(variant(CROSSING, output={"dir": str(tmp_path / "out")})))
    code = main(["experiment", "--config", str(path), "--quiet"])
    err = capsys.readouterr().err
    flagged = json.loads(err.split("flagged nodes:")[1]) if "flagged nodes:" in err else []
    c = cfg(CROSSING)
    # alpha = 1, so the antiderivative is t itself
    root = brentq(lambda t: gaussian_pair_h2(t, CROSSING_COMPONENTS), 1e-6, c.grids.t_end)
    cell = root / c.grids.time.dt
    near = bool(flagged) and all(abs(k - cell) <= 1 for k in flagged)
    written = (tmp_path / "out").exists()
    record(9, code == 3 and near and not written,
           f"exit {code}, flagged {flagged}, analytic crossing at node {cell:.2f}")


SIGMAS = (0.0, 1e-4, 1e-3, 1e-2)
SEEDS = range(20)
# local_poly with w = 17 needs n_steps >= 4 w; 68 is the smallest such grid
NOISY = variant(HEAT, grids={"n_steps": 68},
                recovery={"method": "local_poly", "window": 17, "degree": 3})


@pytest.fixture(scope="module")
def noise_medians():
    med = {}
    for s in SIGMAS:
        errs = [run_experiment(cfg(NOISY, noise={"sigma_rel": s, "seed": seed})).max_rel
                for seed in SEEDS]
        med[s] = float(np.median(errs))
    return med


def test_10a_noise_median(noise_medians):
    med = noise_medians
    record("10a", med[1e-3] <= 5e-2,
           f"median max rel err at sigma 1e-3 is {med[1e-3]:.3f} (tol 5e-2)")


def test_10b_noise_monotone(noise_medians):
    med = noise_medians
    values = [med[s] for s in SIGMAS]
    record("10b", all(a <= b for a, b in zip(values, values[1:])),
           "medians " + ", ".join(f"{s:g}: {v:.2e}" for s, v in zip(SIGMAS, values)))
