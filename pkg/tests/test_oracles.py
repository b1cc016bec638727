from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ogplab.core import SolutionSet
from ogplab.models import (
    GuardError,
    KsatInstance,
    gen_gnp,
    gen_ksat,
    gen_npp,
    gen_perceptron,
    gen_pspin,
    pspin_energies,
)
from ogplab.oracles import (
    cluster_decompose,
    dpll_sat,
    enumerate_cliques,
    enumerate_npp,
    enumerate_perceptron,
    enumerate_pspin,
    enumerate_sat,
    exact_max_clique,
    npp_optimum,
    npp_threshold,
    pspin_landscape,
    tuple_gap_search,
)

from conftest import all_signs, brute_cliques


def code_of(row) -> int:
    return int(sum(1 << i for i, x in enumerate(row) if x > 0))


def sat_mask(f, S):
    ok = np.ones(len(S), dtype=bool)
    for c in f.clauses:
        lit_ok = np.zeros(len(S), dtype=bool)
        for lit in c:
            lit_ok |= S[:, abs(lit) - 1] == (1 if lit > 0 else -1)
        ok &= lit_ok
    return ok


def test_enumerate_npp_against_brute_force():
    for seed in range(5):
        inst = gen_npp(12, seed)
        S = all_signs(12)
        S = S[S[:, 0] == 1]
        vals = np.abs(S @ inst.weights)
        sset = enumerate_npp(inst, alpha=0.5)
        thr = npp_threshold(12, 0.5)
        assert sset.threshold == pytest.approx(thr)
        assert sorted(sset.codes) == sorted(code_of(r) for r in S[vals <= thr])
        assert sset.params["optimum"] == pytest.approx(vals.min())
        value, s = npp_optimum(inst)
        assert value == pytest.approx(vals.min())


def test_enumerate_npp_guard_and_cap():
    with pytest.raises(GuardError):
        enumerate_npp(gen_npp(33, 0), alpha=0.5)
    sset = enumerate_npp(gen_npp(12, 0), threshold=1e9, cap=10)
    assert len(sset) == 10 and sset.truncated and sset.params["total"] == 2048


def test_exact_clique_and_enumeration():
    for seed in range(6):
        g = gen_gnp(12, 0.6, seed)
        cl = brute_cliques(g.rows, 12)
        best = max(c.bit_count() for c in cl)
        assert exact_max_clique(g).size == best
        sset = enumerate_cliques(g, best - 1)
        assert sorted(sset.codes) == sorted(c for c in cl if c.bit_count() >= best - 1)
        assert sset.kind == "subset" and sset.threshold == -(best - 1)
    with pytest.raises(GuardError):
        exact_max_clique(gen_gnp(65, 0.5, 0))


def test_enumerate_sat_and_dpll_against_brute_force():
    S = all_signs(12)
    for seed in range(8):
        f = gen_ksat(12, 55, 3, seed)
        ok = sat_mask(f, S)
        sset = enumerate_sat(f)
        assert sorted(sset.codes) == np.flatnonzero(ok).tolist()
        r = dpll_sat(f)
        assert r.satisfiable == bool(ok.any())
        if r.satisfiable:
            assert ok[r.witness.bits]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 40), st.integers(1, 3), st.integers(0, 10_000))
def test_dpll_property(n, m, k, seed):
    k = min(k, n)
    f = gen_ksat(n, m, k, seed)
    ok = sat_mask(f, all_signs(n))
    r = dpll_sat(f)
    assert r.satisfiable == bool(ok.any())
    if r.satisfiable:
        assert ok[r.witness.bits]


def test_dpll_trivial_cases():
    assert dpll_sat(KsatInstance.from_clauses(2, [])).satisfiable
    assert not dpll_sat(KsatInstance.from_clauses(1, [(1,), (-1,)])).satisfiable


def test_enumerate_perceptron_against_brute_force():
    inst = gen_perceptron(12, 5, 0.5 * np.sqrt(12), 3)
    S = all_signs(12)
    ok = np.all(np.abs(S @ inst.matrix.T) <= inst.kappa, axis=1)
    assert enumerate_perceptron(inst).codes == np.flatnonzero(ok).tolist()


@pytest.mark.parametrize("p", [2, 3])
def test_pspin_landscape_and_window(p):
    inst = gen_pspin(8, p, 5)
    S = all_signs(8)
    direct = np.array([np.einsum(inst.entries, list(range(p)), *sum(([x, [i]] for i in range(p)), []))
                       for x in S.astype(float)])
    codes, energies = pspin_landscape(inst)
    assert np.allclose(energies, direct[codes.astype(np.int64)])
    if p == 2:
        assert len(codes) == 128 and np.all(codes & np.uint64(1))
    sset = enumerate_pspin(inst, 0.5)
    ground = direct.min()
    rep = codes.astype(np.int64)
    assert sorted(sset.codes) == sorted(rep[direct[rep] <= ground + 0.5].tolist())
    assert np.allclose(pspin_energies(inst, S[:3]), direct[:3])


def naive_clusters(codes, r):
    parent = {c: c for c in codes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x
    for a, b in itertools.combinations(codes, 2):
        if (a ^ b).bit_count() <= r:
            parent[find(a)] = find(b)
    groups = {}
    for c in codes:
        groups.setdefault(find(c), []).append(c)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(0, 2**10 - 1), min_size=1, max_size=200), st.integers(1, 3))
def test_cluster_decompose_matches_naive(codes, r):
    codes = sorted(codes)
    sset = SolutionSet("x", 10, 0.0, codes, [0.0] * len(codes))
    dec = cluster_decompose(sset, r)
    assert dec.clusters == naive_clusters(codes, r)
    assert sum(dec.sizes) == len(codes)


def test_singleton_fraction():
    sset = SolutionSet("x", 8, 0.0, [0b0, 0b1, 0b11110000], [0.0] * 3)
    dec = cluster_decompose(sset, 1)
    assert dec.sizes == [2, 1] and dec.singleton_fraction == 0.5


def brute_tuple(pools, n, nu1, nu2, quotient):
    for tup in itertools.product(*pools):
        ovs = [(n - 2 * (a ^ b).bit_count()) / n for a, b in itertools.combinations(tup, 2)]
        if quotient:
            ovs = [abs(o) for o in ovs]
        if all(nu1 < o < nu2 for o in ovs):
            return True
    return False


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sets(st.integers(0, 255), min_size=0, max_size=8), min_size=2, max_size=3),
       st.floats(-1, 0.5), st.floats(0.1, 0.9), st.booleans())
def test_tuple_search_exhaustive_matches_product(pools, nu1, width, quotient):
    nu2 = nu1 + width
    sets = [SolutionSet("x", 8, 0.0, sorted(p), [0.0] * len(p)) for p in pools]
    rep = tuple_gap_search(sets, len(pools), nu1, nu2, quotient=quotient)
    assert rep.found == brute_tuple([sorted(p) for p in pools], 8, nu1, nu2, quotient)
    assert rep.status in ("found", "none")
    if rep.found:
        assert all(nu1 < o < nu2 for o in rep.overlaps)


def test_tuple_search_budget_and_random():
    pools = [list(range(0, 200, 2)), list(range(1, 200, 2)), list(range(50))]
    sets = [SolutionSet("x", 8, 0.0, p, [0.0] * len(p)) for p in pools]
    assert tuple_gap_search(sets, 3, 0.99, 1.0, budget=50).status == "inconclusive"
    assert tuple_gap_search(sets, 3, 0.99, 1.0).status == "none"
    rep = tuple_gap_search(sets, 3, -1.0, 1.0, mode="random", budget=10)
    assert rep.found
