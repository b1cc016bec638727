from __future__ import annotations

import itertools

import numpy as np
import pytest

from ogplab.core import DimensionError, NodeSubset, SignVector
from ogplab.models import (
    GraphInstance,
    GuardError,
    KsatInstance,
    from_manifest,
    gen_gnp,
    gen_ksat,
    gen_npp,
    gen_perceptron,
    gen_pspin,
    is_clique,
    ksat_violations,
    npp_value,
    perceptron_feasible,
    pspin_energies,
    pspin_energy,
)


@pytest.mark.parametrize("make", [
    lambda: gen_npp(20, 3),
    lambda: gen_gnp(30, 0.4, 3),
    lambda: gen_ksat(20, 80, 3, 3),
    lambda: gen_pspin(6, 3, 3),
    lambda: gen_perceptron(10, 4, 1.0, 3),
])
def test_generators_deterministic_and_manifest_roundtrip(make):
    a, b = make(), make()
    c = from_manifest(a.manifest())
    for x in (b, c):
        assert a.manifest() == x.manifest()
        for attr in ("weights", "entries", "matrix"):
            if isinstance(getattr(a, attr, None), np.ndarray):
                assert np.array_equal(getattr(a, attr), getattr(x, attr))
        for attr in ("rows", "clauses"):
            if hasattr(a, attr):
                assert getattr(a, attr) == getattr(x, attr)


def test_seeds_give_different_instances():
    assert not np.array_equal(gen_npp(10, 1).weights, gen_npp(10, 2).weights)
    assert gen_gnp(20, 0.5, 1).rows != gen_gnp(20, 0.5, 2).rows


def test_gnp_edge_density_and_symmetry():
    g = gen_gnp(200, 0.3, 0)
    A = g.matrix()
    assert np.array_equal(A, A.T) and not A.diagonal().any()
    T = 200 * 199 // 2
    assert abs(g.edge_count() - 0.3 * T) < 4 * np.sqrt(T * 0.21)
    assert g.complement().edge_count() == T - g.edge_count()
    assert GraphInstance.from_matrix(A).rows == g.rows


def test_ksat_clauses_have_distinct_variables():
    f = gen_ksat(10, 500, 4, 1)
    assert f.m == 500
    for c in f.clauses:
        assert len(c) == 4 and len({abs(l) for l in c}) == 4
        assert all(1 <= abs(l) <= 10 for l in c)
    lits = np.array(f.clauses)
    assert abs((lits > 0).mean() - 0.5) < 4 * np.sqrt(0.25 / lits.size)


def test_ksat_violations_by_hand():
    f = KsatInstance.from_clauses(3, [(1, 2, 3), (-1, 2, -3), (-2, -2, 3)])
    assert ksat_violations(f, SignVector.from_signs([-1, -1, -1])) == 1
    assert ksat_violations(f, SignVector.from_signs([1, 1, -1])) == 1
    assert ksat_violations(f, SignVector.from_signs([1, 1, 1])) == 0


def test_npp_value_and_dimension_check():
    inst = gen_npp(5, 0)
    s = SignVector.from_signs([1, -1, 1, 1, -1])
    assert npp_value(inst, s) == pytest.approx(abs(s.signs() @ inst.weights))
    with pytest.raises(DimensionError):
        npp_value(inst, SignVector.ones(4))


def test_pspin_energy_is_direct_tensor_sum():
    inst = gen_pspin(4, 3, 7)
    s = SignVector.from_signs([1, -1, -1, 1])
    x = s.signs()
    direct = sum(inst.entries[i, j, k] * x[i] * x[j] * x[k]
                 for i, j, k in itertools.product(range(4), repeat=3))
    assert pspin_energy(inst, s) == pytest.approx(direct)
    both = pspin_energies(inst, np.stack([x, -x]))
    assert both[1] == pytest.approx(-both[0])


def test_is_clique_and_perceptron_feasible():
    g = GraphInstance.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert is_clique(g, NodeSubset.from_nodes(4, [0, 1, 2]))
    assert not is_clique(g, NodeSubset.from_nodes(4, [0, 1, 3]))
    inst = gen_perceptron(8, 3, 100.0, 0)
    assert perceptron_feasible(inst, SignVector.ones(8))


def test_guards_refuse():
    with pytest.raises(GuardError):
        gen_pspin(2049, 2, 0)
    with pytest.raises(GuardError):
        gen_gnp(100, 0.5, 0).word_rows()
    with pytest.raises(GuardError):
        gen_gnp(20000, 0.5, 0)
    with pytest.raises(ValueError):
        gen_npp(5, -1)
