import os
import subprocess
import sys

import numpy as np
import pytest

from symcirc.kernels import SymmetryClass, kernel
from symcirc.pauli import SiteOp, front_links, make_string
from symcirc.rng import CounterStream
from symcirc.simulate import BoundaryError, EnsembleStats, SimConfig, run_ensemble, simulate_edges, step


@pytest.mark.parametrize("cls", list(SymmetryClass))
def test_engine_matches_reference_step(cls):
    cfg = SimConfig(cls, n=64, t_max=25, ensemble=6, seed=99, initial_op="Y")
    right, left, _ = simulate_edges(cfg)
    k = kernel(cls)
    for tr in range(cfg.ensemble):
        s = make_string(cfg.n, cfg.site, SiteOp.Y)
        rng = CounterStream(cfg.seed, tr)
        for t in range(cfg.t_max + 1):
            e = front_links(s, t)
            assert (e.left_link, e.right_link) == (left[tr, t], right[tr, t])
            if t < cfg.t_max:
                s = step(s, t, k, rng)


def test_light_cone_and_unit_steps():
    cfg = SimConfig("orthogonal", n=120, t_max=50, ensemble=300, seed=3)
    right, left, _ = simulate_edges(cfg)
    assert np.all(np.abs(np.diff(right, axis=1)) == 1)
    assert np.all(np.abs(np.diff(left, axis=1)) == 1)
    t = np.arange(cfg.t_max + 1)
    assert np.all(right - right[:, :1] <= t)
    assert np.all(left[:, :1] - left <= t)
    assert np.all(right >= left)


def test_step_boundary_and_identity():
    k = kernel("unitary")
    with pytest.raises(BoundaryError):
        step(make_string(8, 0, "X"), 0, k, CounterStream(0, 0))
    with pytest.raises(ValueError):
        step(make_string(8, 3, "I"), 0, k, CounterStream(0, 0))


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=50, t_max=30), dict(n=200, t_max=30, initial_site=10), dict(n=200, t_max=0),
     dict(n=200, t_max=30, ensemble=0), dict(n=200, t_max=30, initial_op="I"), dict(n=200, t_max=30, seed=-1)],
)
def test_config_validation(kwargs):
    base = dict(cls="unitary", ensemble=10, seed=0)
    with pytest.raises(ValueError):
        SimConfig(**{**base, **kwargs})


def test_default_window():
    assert SimConfig("u", 512, 150, 10, 0).window == (50, 150)
    assert SimConfig("u", 512, 30, 10, 0).window == (20, 30)
    assert SimConfig("u", 512, 150, 10, 0, fit_window=(60, 140)).window == (60, 140)


def test_stats_moments_and_histograms():
    cfg = SimConfig("coe", n=100, t_max=40, ensemble=500, seed=1, track_occupancy=True)
    st = run_ensemble(cfg)
    assert np.allclose(st.mean_R, st.right.mean(axis=0))
    assert np.allclose(st.var_R, st.right.var(axis=0, ddof=1))
    for t in (0, 20, 40):
        assert st.rho_R_counts[t].sum() == cfg.ensemble
        assert np.isclose(np.dot(st.rho_R(t), st.links), st.mean_R[t])
        assert np.isclose(np.dot(st.rho_L(t), st.links), st.mean_L[t])
    dens = st.occupancy_density()
    assert dens.shape == (41, 100)
    assert dens[0, cfg.site] == 1.0 and dens[0].sum() == 1.0
    # the string never dies, and its support lies inside the edges
    assert np.all(dens.sum(axis=1) >= 1.0)


def test_same_seed_same_result_and_seed_matters():
    cfg = SimConfig("symplectic", n=100, t_max=40, ensemble=200, seed=12)
    a = simulate_edges(cfg)[0]
    b = simulate_edges(cfg)[0]
    c = simulate_edges(SimConfig("symplectic", n=100, t_max=40, ensemble=200, seed=13))[0]
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_thread_count_independence():
    code = (
        "import sys, numpy as np; from symcirc.simulate import SimConfig, simulate_edges; "
        "cfg = SimConfig('cse', n=120, t_max=50, ensemble=3000, seed=4); "
        "r, l, _ = simulate_edges(cfg, threads=int(sys.argv[1]), chunk=64); "
        "sys.stdout.write(str(hash((r.tobytes(), l.tobytes()))))"
    )
    env = {**os.environ, "NUMBA_NUM_THREADS": "4", "PYTHONHASHSEED": "0"}
    outs = {subprocess.run([sys.executable, "-c", code, str(th)], env=env, capture_output=True,
                           text=True, check=True).stdout for th in (1, 4)}
    assert len(outs) == 1


def test_from_edges_without_config():
    r = np.array([[5, 6, 7], [5, 4, 5]])
    st = EnsembleStats.from_edges(r, r - 4)
    assert st.t_max == 2 and st.origin_R == 5 and st.origin_L == 1
    assert np.allclose(st.mean_R, [5, 5, 6])
