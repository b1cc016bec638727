"""Time the compiled kernels against the numpy/Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each workload runs on both backends; outputs are compared for equality
before any timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ogplab._kernels import available_backends, backend
from ogplab._kernels._tables import clause_masks, npp_tables, row_tables
from ogplab.models import gen_gnp, gen_ksat, gen_npp, gen_perceptron


def workloads(quick: bool):
    n_npp, n_sat, n_clique = (20, 18, 40) if quick else (26, 22, 60)
    w = gen_npp(n_npp, 1).weights
    low, high, h = npp_tables(w)
    yield f"npp_scan n={n_npp}", lambda k: k.npp_scan(low, high, h, 1e-4, 1 << 20)

    inst = gen_perceptron(n_npp - 2, 8, 0.3 * np.sqrt(n_npp - 2), 1)
    plow, phigh, ph = row_tables(inst.matrix)
    yield f"perceptron_scan n={n_npp - 2} m=8", lambda k: k.perceptron_scan(plow, phigh, ph, inst.kappa, 1 << 20)

    f = gen_ksat(n_sat, int(2.0 * n_sat), 3, 1)
    masks, pats, lows = clause_masks(f.n, f.clauses)
    yield f"ksat_scan n={n_sat} m={f.m}", lambda k: k.ksat_scan(f.n, masks, pats, lows, 1 << 20)

    g = gen_gnp(n_clique, 0.5, 1)
    rows = g.word_rows()
    yield f"max_clique G({n_clique}, 1/2)", lambda k: k.max_clique(rows, n_clique)
    yield f"enumerate_cliques G({n_clique}, 1/2) k>=6", lambda k: k.enumerate_cliques(rows, n_clique, 6, 1 << 20)


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def best_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args()

    names = available_backends()
    if "cython" not in names:
        print("compiled kernels not built; only the Python backend is available")
    kerns = {name: backend(name) for name in names}
    print(f"{'workload':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, job in workloads(args.quick):
        outs = {n: job(k) for n, k in kerns.items()}
        if len(outs) > 1 and not same(outs["python"], outs["cython"]):
            raise SystemExit(f"backends disagree on {label}")
        times = {n: best_time(lambda k=k: job(k), args.repeat) for n, k in kerns.items()}
        row = f"{label:42s}" + "".join(f"{times[n]:11.4f}s" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
