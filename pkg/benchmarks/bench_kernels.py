"""Compiled vs pure-Python kernels on representative inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from fockmorph import _kernels
from fockmorph.fock_core import Statistics, build_basis


def cases(rng):
    b = build_basis(4, 8, Statistics.BOSON)
    occ = b.occupations
    offs = np.asarray(b.sector_offsets, dtype=np.int64)
    table = b._table
    mat = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    sec = occ[b.particle_numbers == 5]
    return {
        "rank_state (all states, d=4, N=8)": lambda k: [k.rank_state(r, offs, table, False) for r in occ],
        "ladder_entries (d=4, N=8)": lambda k: k.ladder_entries(occ, offs, table, False, 8),
        "permanent (10x10)": lambda k: k.permanent(mat),
        "gamma_block (d=4, 5-particle sector)": lambda k: k.gamma_block(a, sec, sec, False),
    }


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if _kernels.compiled_kernels is None:
        print("compiled kernels unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(_kernels.python_kernels), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(_kernels.compiled_kernels), number=1, repeat=args.repeat))
        print(f"{name:40s} {tp:12.3e} {tc:12.3e} {tp / tc:8.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
