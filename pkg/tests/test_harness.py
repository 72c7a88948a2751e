import numpy as np
import pytest

from evocoef import ConfigError, TimeGrid, Trace, apply_polyharmonic
from evocoef.harness import (add_noise, build_pair, convergence_study, error_metrics,
                             generate_traces, make_datum, run_experiment, truth_coefficient)

from configs import GENERAL_FIRST, GENERAL_SECOND, HEAT, WAVE, cfg

BUMP = {"kind": "bump", "radius": 2.0}


class TestBuildPair:
    def test_heat_sign(self):
        c = cfg(HEAT, datum=BUMP, grids={"n_steps": 16})
        first, second = build_pair(c)
        lap = -apply_polyharmonic(first.position, 1)
        assert np.allclose(second.position.values, lap.values, rtol=0, atol=1e-15)
        h1, h2 = generate_traces(c)
        assert h2.values[0] < 0 and h2.label == "h2"

    def test_heat_m2_datum(self):
        c = cfg(HEAT, problem={"m": 2}, grids={"n_steps": 16})
        first, second = build_pair(c)
        bi = apply_polyharmonic(first.position, 2)
        assert np.allclose(second.position.values, -bi.values, rtol=0, atol=1e-12)

    def test_wave_starts_from_rest(self):
        first, second = build_pair(cfg(WAVE, grids={"n_steps": 64}))
        assert first.position is None and second.position is None
        lap = -apply_polyharmonic(first.velocity, 1)
        assert np.allclose(second.velocity.values, lap.values, rtol=0, atol=1e-15)

    def test_general_laplacian_matches_heat(self):
        heat = build_pair(cfg(HEAT, grids={"n_steps": 16}))[1].position.values
        gen = build_pair(cfg(GENERAL_FIRST, problem={"symbol": "laplacian"},
                             grids={"n_steps": 16}))[1].position.values
        assert np.array_equal(heat, gen)

    def test_general_second_symbol_sign(self):
        _, second = build_pair(cfg(GENERAL_SECOND, grids={"n_steps": 512}))
        assert second.symbol.stability == "oscillatory"

    def test_q_must_hit_support(self):
        c = cfg(HEAT, datum=BUMP, problem={"q": [4.0]}, grids={"n_steps": 16})
        with pytest.raises(ConfigError, match="outside the datum support"):
            generate_traces(c)

    def test_sum_datum(self):
        c = cfg(HEAT, grids={"half_width": 24.0, "points_per_dim": 768},
                datum={"kind": "sum", "components": [{"kind": "gaussian", "width": 1.0},
                                                     {"kind": "bump", "radius": 1.0}]})
        x = c.grids.space.axis
        expect = np.exp(-x * x / 4)
        inside = np.abs(x) < 1
        expect[inside] += np.exp(-x[inside] ** 2 / (1 - x[inside] ** 2))
        assert np.allclose(make_datum(c).values, expect, rtol=0, atol=1e-15)


class TestNoise:
    def setup_method(self):
        self.tg = TimeGrid(1.0, 9999)
        self.h = Trace(np.cos(3 * self.tg.nodes), self.tg, "h1")

    def test_zero_sigma_identity(self):
        assert add_noise(self.h, 0.0, 5) is self.h

    def test_deterministic(self):
        a = add_noise(self.h, 1e-3, 11).values
        b = add_noise(self.h, 1e-3, 11).values
        assert np.array_equal(a, b)
        assert not np.array_equal(a, add_noise(self.h, 1e-3, 12).values)
        assert not np.array_equal(a, add_noise(self.h, 1e-3, 11, stream=2).values)

    def test_counter_based(self):
        # node k depends on (seed, k) only, not on the trace length
        short = TimeGrid(1.0, 99)
        a = add_noise(Trace(np.r_[1.0, np.zeros(99)], short, "h1"), 0.01, 3).values[1:]
        b = add_noise(Trace(np.r_[1.0, np.zeros(9999)], self.tg, "h1"), 0.01, 3).values[1:100]
        assert np.array_equal(a, b)

    def test_empirical_std(self):
        sigma = 1e-2
        noisy = add_noise(self.h, sigma, 1).values
        std = np.std((noisy - self.h.values) / np.max(np.abs(self.h.values)))
        assert abs(std / sigma - 1) <= 0.05

    def test_negative_sigma(self):
        with pytest.raises(ConfigError):
            add_noise(self.h, -1.0, 0)


class TestMetrics:
    def test_values(self):
        c = cfg(HEAT, grids={"n_steps": 8})
        truth = truth_coefficient(c)
        rec = type(truth)(truth.samples * 1.01, truth.grid, truth.kind)
        m = error_metrics(rec, truth, np.ones(9, bool))
        assert m["max_rel"] == pytest.approx(0.01)
        assert m["l2_rel"] == pytest.approx(0.01)

    def test_empty_valid_set(self):
        c = cfg(HEAT, grids={"n_steps": 8})
        truth = truth_coefficient(c)
        with pytest.raises(ConfigError):
            error_metrics(truth, truth, np.zeros(9, bool))


class TestExperiments:
    def test_heat_example(self):
        rep = run_experiment(cfg(HEAT))
        assert rep.max_rel <= 1e-4
        assert rep.diagnostics.passed
        assert 0 <= rep.metrics["l2_rel"] <= 1e-4

    def test_heat_bump_2d_example(self):
        rep = run_experiment(cfg(HEAT, datum=BUMP, grids={"dim": 2, "points_per_dim": 64}))
        assert rep.max_rel <= 1e-4

    def test_wave_example(self):
        rep = run_experiment(cfg(WAVE, recovery={"h2_floor_rel": 1e-8}))
        assert rep.max_rel <= 1e-3
        assert not rep.valid[0]

    def test_reproducible(self):
        c = cfg(HEAT, grids={"n_steps": 256}, noise={"sigma_rel": 1e-3, "seed": 4},
                recovery={"method": "local_poly", "window": 17})
        a, b = run_experiment(c), run_experiment(c)
        assert np.array_equal(a.recovered, b.recovered, equal_nan=True)
        assert a.to_dict() == b.to_dict()

    def test_convergence_table(self):
        rows = convergence_study(cfg(HEAT), [256, 512, 1024])
        assert rows[0].order is None
        assert all(abs(r.order - 2) <= 0.3 for r in rows[1:])
        assert rows[1].dt == pytest.approx(1 / 512)

    @pytest.mark.parametrize("levels", [[64, 128], [64, 100, 200]])
    def test_levels_must_double(self, levels):
        with pytest.raises(ConfigError):
            convergence_study(cfg(HEAT), levels)
