from __future__ import annotations

import numpy as np
import pytest

from ogplab.core import SignVector
from ogplab.ensembles import (
    branch_paths,
    chaos_probe,
    evaluation_points,
    graph_resample_path,
    ksat_resample_path,
    make_algorithm,
    npp_resample_path,
    perceptron_resample_path,
    pspin_resample_path,
    stability_run,
)

PATHS = {
    "gnp": lambda s: graph_resample_path(12, 0.5, s, s + 100),
    "npp": lambda s: npp_resample_path(10, s, s + 100),
    "ksat": lambda s: ksat_resample_path(8, 20, 3, s, s + 100),
    "pspin": lambda s: pspin_resample_path(4, 2, s, s + 100),
    "perceptron": lambda s: perceptron_resample_path(5, 3, 1.0, s, s + 100),
}


def coords(inst) -> list:
    if hasattr(inst, "rows"):
        return inst.edge_vector().tolist()
    if hasattr(inst, "clauses"):
        return list(inst.clauses)
    for attr in ("weights", "entries", "matrix"):
        if hasattr(inst, attr):
            return np.asarray(getattr(inst, attr)).reshape(-1).tolist()


@pytest.mark.parametrize("model", sorted(PATHS))
def test_path_steps_change_one_coordinate(model):
    path = PATHS[model](3)
    prev = coords(path.instance(0))
    assert prev == coords(path.base)
    for t in range(1, path.T + 1):
        cur = coords(path.instance(t))
        diff = [i for i, (a, b) in enumerate(zip(prev, cur)) if a != b]
        assert len(diff) <= 1
        if diff:
            assert diff == [path.changed(t)]
        prev = cur
    assert sorted(path.order.tolist()) == list(range(path.T))


@pytest.mark.parametrize("model", sorted(PATHS))
def test_path_regenerates_identically(model):
    a, b = PATHS[model](5), PATHS[model](5)
    t = a.T // 3
    assert coords(b.instance(t)) == coords(a.instance(t))
    a.instance(a.T)
    assert coords(a.instance(t)) == coords(PATHS[model](5).instance(t))


def test_branches_share_start_only():
    base = npp_resample_path(10, 1, 2)
    brs = branch_paths(base, 3)
    assert [b.branch for b in brs] == [1, 2, 3]
    assert all(np.array_equal(b.instance(0).weights, base.instance(0).weights) for b in brs)
    ends = [b.instance(b.T).weights for b in brs]
    assert not np.array_equal(ends[0], ends[1])


def test_rotate_rule_endpoints():
    p = npp_resample_path(10, 1, 2, rule="rotate")
    assert np.array_equal(p.instance(0).weights, p.base.weights)
    w = [p.instance(t).weights for t in range(p.T + 1)]
    assert not np.allclose(w[-1], w[0])
    with pytest.raises(ValueError):
        graph_resample_path(5, 0.5, 0, 0).__class__("gnp", (("n", 5), ("p", 0.5)), 0, 0, 0, "rotate")


def test_evaluation_points():
    assert evaluation_points(10, 3) == [0, 3, 6, 9, 10]
    assert evaluation_points(1000, None)[:3] == [0, 5, 10]
    with pytest.raises(ValueError):
        evaluation_points(10, 0)


def test_constant_algorithm_is_perfectly_stable():
    tr = stability_run(make_algorithm("constant"), npp_resample_path(10, 0, 1), 1)
    assert tr.kappa_hat == 0 and all(o == 1.0 for o in tr.overlaps)


def test_step_distance_bounds_overlap_change():
    path = npp_resample_path(12, 4, 5)
    tr = stability_run(make_algorithm("npp-opt"), path, 1)
    o = tr.overlaps
    assert o[0] == 1.0
    for i, d in enumerate(tr.distances):
        assert abs(o[i + 1] - o[i]) * 12 <= 2 * d + 1e-9
    csv = tr.to_csv().splitlines()
    assert csv[0] == "t,d_t,o_t,objective,status" and len(csv) == path.T + 2
    s = tr.summary()
    assert s["o_start"] == 1.0 and s["points"] == path.T + 1


def test_greedy_overlap_decays():
    path = graph_resample_path(128, 0.5, 1, 2)
    tr = stability_run(make_algorithm("greedy", order_seed=3), path)
    assert tr.overlaps[0] == 1.0 and tr.overlaps[-1] < 0.6
    assert all(st == "ok" for st in tr.status)


def test_failures_recorded_in_trace():
    path = ksat_resample_path(10, 200, 3, 0, 1)
    tr = stability_run(make_algorithm("walksat", seed=0, max_flips=20, noise=0.5), path, 50)
    assert "fail" in tr.status
    assert tr.summary()["failures"] >= 1


def test_chaos_probe_extremes():
    same = chaos_probe(10, 2, 3, 0.0, 0.0)
    assert same.mean_cross_overlap == pytest.approx(1.0)
    d = same.to_dict()
    assert d["rho"] == 0.0
    means = [chaos_probe(12, 2, s, 1.0, 0.0).mean_cross_overlap for s in range(12)]
    assert np.mean(means) < 0.6
