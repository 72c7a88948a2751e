"""Any Fourier multiplier p(xi) can replace the Laplacian.

First order:  u_t = Psi(t) p(D) u with p = -|xi|^2 - |xi|^4, Psi = 1 + t/2.
Second order: u_tt = Lambda(t) p(D) u with p = -|xi|^2, Lambda = 2 + cos t.
"""
from evocoef import load_config, run_experiment
from evocoef.config import config_from_dict

base = {
    "grids": {"dim": 1, "half_width": 16.0, "points_per_dim": 512, "t_end": 1.0,
              "n_steps": 2048},
    "datum": {"kind": "gaussian", "width": 1.0},
}
first = config_from_dict({
    **base,
    "problem": {"kind": "general_first", "symbol": "laplacian-bilaplacian"},
    "coefficient": {"family": "affine", "a": 1.0, "b": 0.5},
})
second = config_from_dict({
    **base,
    "problem": {"kind": "general_second", "symbol": "laplacian"},
    "grids": {**base["grids"], "points_per_dim": 256, "n_steps": 4096},
    "coefficient": {"family": "cosine", "a": 2.0, "b": 1.0, "omega": 1.0},
    "recovery": {"h2_floor_rel": 1e-2},
})
for name, cfg in (("Psi", first), ("Lambda", second)):
    print(f"{name}: max rel error {run_experiment(cfg).max_rel:.2e}")
