import math

import numpy as np
import pytest

from epkit.core import principal_sqrt
from epkit.epfind import grid_ep_search, toy_ep_roots
from epkit.toymodel import ToyParams, eigenpair_sampler

DOUBLE_EP = ToyParams(g_c=0.05, beta=1.0, gamma1=1.05, gamma2=1.05)
EP1_ALPHA = 0.4541453828492342
EP2_ALPHA = 0.6214307910107969

# microcavity EP coordinates used as oracle branch points
Z1 = 2.6257 + 0.601j
Z2 = 2.9036 + 0.53j


def oracle_sampler(z1, z2):
    def sample(p1, p2):
        s = principal_sqrt((complex(p1, p2) - z1) * (complex(p1, p2) - z2))
        return s, -s
    return sample


def brute_force_gap_minima(p, lo, hi, resolution=1e-6):
    """Independent scan of the splitting magnitude at fixed resolution."""
    alphas = np.arange(lo, hi, resolution)
    xi1 = (1.0 - 0.5 * alphas) + 1j * p.gamma1
    xi2 = np.sqrt(alphas) + 1j * p.gamma2
    g = p.g_c * ((1.0 - p.beta) + 1j * p.beta) * np.exp(-((xi1 - xi2) ** 2))
    eta_abs = np.abs(np.sqrt(0.25 * (xi1 - xi2) ** 2 + g * g))
    k = np.where((eta_abs[1:-1] <= eta_abs[:-2]) & (eta_abs[1:-1] < eta_abs[2:]))[0] + 1
    return [(float(alphas[i]), float(eta_abs[i])) for i in k]


class TestToyEpRoots:
    def test_published_double_ep(self):
        roots = toy_ep_roots(DOUBLE_EP, (0.3, 0.8))
        assert len(roots) == 2
        assert roots[0].p1 == pytest.approx(0.454, abs=1e-3)
        assert roots[1].p1 == pytest.approx(0.621, abs=1e-3)
        for r in roots:
            assert r.order == 2
            assert r.p2 == 1.0
            assert r.residual < 2e-5

    def test_matches_transcendental_relation(self):
        # abar^2 exp(2 abar^2) = 4 g_c^2 at a root
        roots = toy_ep_roots(DOUBLE_EP, (0.3, 0.8))
        for r in roots:
            abar = 1.0 - 0.5 * r.p1 - math.sqrt(r.p1)
            assert abs(abar) == pytest.approx(0.09902421253765573, abs=1e-6)
            residual = abar**2 * math.exp(2 * abar**2) - 4 * 0.05**2
            assert abs(residual) < 1e-9

    def test_matches_brute_force_scan(self):
        minima = brute_force_gap_minima(DOUBLE_EP, 0.3, 0.8)
        deep = [a for a, v in minima if v < 1e-3]
        roots = toy_ep_roots(DOUBLE_EP, (0.3, 0.8))
        assert len(deep) == len(roots) == 2
        for got, expected in zip(roots, sorted(deep)):
            assert got.p1 == pytest.approx(expected, abs=1e-4)

    def test_real_coupling_has_no_roots(self):
        p = ToyParams(g_c=0.05, beta=0.0, gamma1=1.05, gamma2=1.05)
        assert toy_ep_roots(p, (0.3, 0.8)) == []

    def test_interior_beta_has_no_roots(self):
        p = ToyParams(g_c=0.05, beta=0.5, gamma1=1.05, gamma2=1.05)
        assert toy_ep_roots(p, (0.01, 2.0)) == []

    def test_empty_bracket_far_from_roots(self):
        assert toy_ep_roots(DOUBLE_EP, (1.0, 2.0)) == []

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            toy_ep_roots(DOUBLE_EP, (0.8, 0.3))

    def test_exact_alpha_values(self):
        roots = toy_ep_roots(DOUBLE_EP, (0.3, 0.8))
        assert roots[0].p1 == pytest.approx(EP1_ALPHA, abs=1e-9)
        assert roots[1].p1 == pytest.approx(EP2_ALPHA, abs=1e-9)


class TestGridEpSearch:
    def test_recovers_oracle_branch_points(self):
        res = grid_ep_search(oracle_sampler(Z1, Z2), ((2.5, 3.0), (0.45, 0.7)),
                             coarse_n=48)
        assert len(res) == 2
        assert abs(complex(res[0].p1, res[0].p2) - Z1) < 1e-4
        assert abs(complex(res[1].p1, res[1].p2) - Z2) < 1e-4

    def test_agrees_with_toy_roots(self):
        res = grid_ep_search(eigenpair_sampler(DOUBLE_EP),
                             ((0.3, 0.8), (0.9, 1.0)), coarse_n=48)
        roots = toy_ep_roots(DOUBLE_EP, (0.3, 0.8))
        assert len(res) == len(roots) == 2
        for got, expected in zip(res, roots):
            assert got.p1 == pytest.approx(expected.p1, abs=1e-4)
            assert got.p2 == pytest.approx(1.0, abs=1e-4)

    def test_constant_gap_finds_nothing(self):
        res = grid_ep_search(lambda a, b: (0.5 + 0j, -0.5 + 0j),
                             ((0.0, 1.0), (0.0, 1.0)), coarse_n=16)
        assert len(res) == 0

    def test_residuals_below_documented_tolerance(self):
        res = grid_ep_search(oracle_sampler(Z1, Z2), ((2.5, 3.0), (0.45, 0.7)),
                             coarse_n=32)
        for ep in res:
            assert ep.residual < res.tolerance
            assert ep.residual < 1e-3 * res.median_gap

    def test_seed_perturbation_invariance(self):
        # shifting the coarse grid by about one cell must not move the roots
        base = grid_ep_search(oracle_sampler(Z1, Z2), ((2.5, 3.0), (0.45, 0.7)),
                              coarse_n=48)
        shifted = grid_ep_search(oracle_sampler(Z1, Z2),
                                 ((2.5 + 0.01, 3.0 + 0.01), (0.45, 0.7)),
                                 coarse_n=47)
        assert len(base) == len(shifted) == 2
        for a, b in zip(base, shifted):
            assert math.hypot(a.p1 - b.p1, a.p2 - b.p2) < 1e-6

    def test_sampler_failures_are_counted_and_skipped(self):
        def flaky(p1, p2):
            if p1 < 2.52:
                raise RuntimeError("detector hole")
            return oracle_sampler(Z1, Z2)(p1, p2)

        res = grid_ep_search(flaky, ((2.5, 3.0), (0.45, 0.7)), coarse_n=32)
        assert res.sampler_failures > 0
        assert len(res) == 2

    def test_small_coarse_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_ep_search(oracle_sampler(Z1, Z2), ((2.5, 3.0), (0.45, 0.7)),
                           coarse_n=4)

    def test_shallow_avoided_crossing_rejected(self):
        # a gap with a smooth nonzero dip is not an EP
        def dipped(p1, p2):
            gap = 0.2 + (p1 - 0.5) ** 2 + (p2 - 0.5) ** 2
            return complex(gap, 0), 0j

        res = grid_ep_search(dipped, ((0.0, 1.0), (0.0, 1.0)), coarse_n=16)
        assert len(res) == 0
