"""The fundamental solution and the Poisson integral.

For m = 1 the kernel is the Gaussian heat kernel.  For m = 2 it dips
below zero, so the biharmonic flow is not positivity preserving.  The
Poisson integral of a bump then reproduces the spectral trace.
"""
import numpy as np

from evocoef import (ClosedForm, CoefficientFn, KernelQuery, SpaceGrid, TimeGrid,
                     bump_datum, eval_kernel, poisson_solve, solve_heat, trace_at)
from evocoef.green import kernel_radial

for x in (0.0, 1.0, 2.0):
    k = eval_kernel(KernelQuery(t=1.0, x=(x,), alpha1=1.0, m=1, n=1))
    g = np.exp(-x * x / 4) / np.sqrt(4 * np.pi)
    print(f"m=1, x={x}: kernel {k:.12f}  gaussian {g:.12f}")

r = np.linspace(0, 8, 801)
k2 = kernel_radial(r, 1.0, 2, 1)
print(f"m=2 kernel minimum {k2.min():.4e} at r = {r[k2.argmin()]:.2f}")

space = SpaceGrid(1, 16.0, 512)
time = TimeGrid(1.0, 64)
alpha = CoefficientFn.from_closed_form(
    ClosedForm("sinusoidal", {"a": 2.0, "b": 1.0, "omega": 1.0}), time)
u0 = bump_datum(space, [0.0], 2.0)
q = space.observation_point([0.0])
for m in (1, 2):
    spec = trace_at(solve_heat(u0, alpha, m, time), q).values
    pois = poisson_solve(u0, q, alpha, m, time).values
    print(f"m={m}: max |spectral - Poisson| = {np.max(np.abs(spec - pois)[4:]):.1e}")
