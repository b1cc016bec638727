from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ogplab.algorithms import greedy_clique, karmarkar_karp, walksat
from ogplab.models import NppInstance, gen_gnp, gen_ksat, gen_npp, ksat_violations, npp_value
from ogplab.rng import RngStream


def test_kk_hand_example():
    tr = karmarkar_karp(NppInstance.from_weights([8, 7, 6, 5, 4]))
    # 8-7=1, 6-5=1, 4-1=3, 3-1=2
    assert tr.discrepancy == 2.0
    assert [(a, b) for _, _, a, b in tr.merges] == [(8, 7), (6, 5), (4, 1), (3, 1)]
    assert npp_value(NppInstance.from_weights([8, 7, 6, 5, 4]), tr.partition) == 2.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=30))
def test_kk_partition_realizes_discrepancy(ws):
    inst = NppInstance.from_weights(ws)
    tr = karmarkar_karp(inst)
    assert npp_value(inst, tr.partition) == pytest.approx(tr.discrepancy, abs=1e-9 * (1 + sum(map(abs, ws))))
    assert tr.partition.signs()[0] == 1


def test_kk_never_beats_exact_optimum():
    for seed in range(10):
        inst = gen_npp(12, seed)
        signs = np.array(list(itertools.product([-1, 1], repeat=12)))
        assert karmarkar_karp(inst).discrepancy >= np.abs(signs @ inst.weights).min() - 1e-12


def test_greedy_clique_is_maximal():
    g = gen_gnp(80, 0.5, 2)
    for order in (None, RngStream(1).permutation(80)):
        s = greedy_clique(g, order)
        nodes = s.nodes()
        assert all(g.adjacent(a, b) for a, b in itertools.combinations(nodes, 2))
        outside = [v for v in range(80) if v not in nodes]
        assert all(any(not g.adjacent(v, u) for u in nodes) for v in outside)
    with pytest.raises(ValueError):
        greedy_clique(g, [0, 0, 1])


def test_walksat_solves_easy_instances_reproducibly():
    f = gen_ksat(60, 150, 3, 4)
    a = walksat(f, 20_000, 0.5, RngStream(1))
    b = walksat(f, 20_000, 0.5, RngStream(1))
    assert a.success and ksat_violations(f, a.assignment) == 0
    assert a.flips == b.flips and a.assignment == b.assignment


def test_walksat_reports_failure():
    from ogplab.models import KsatInstance
    f = KsatInstance.from_clauses(1, [(1,), (-1,)])
    r = walksat(f, 50, 0.5, RngStream(0))
    assert not r.success and r.flips == 50
