#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the walk step on the built-in chains and the master-equation
right-hand side at desk scale, then prints one table.  Both implementations
are invoked directly, so the OQW_PURE_NUMPY flag does not affect this
script.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from oqwalk import _kernels
from oqwalk.circuits import basis_state, toffoli13, qft
from oqwalk.lindblad import build_dqc_lindblad
from oqwalk.walk import BlockState, ChainParams, build_dqc_chain


def time_call(fn, args, repeats):
    fn(*args)  # warm (and JIT-compile) before timing
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def step_args(circuit, bits):
    walk = build_dqc_chain(circuit, ChainParams(0.8))
    psi = basis_state(circuit.num_qubits, bits)
    state = BlockState.pure(walk.num_nodes, walk.dim, 0, psi)
    return (walk._b_ops, walk._b_dag, walk._src, walk._dst, state.blocks)


def rhs_args(circuit, bits):
    model = build_dqc_lindblad(circuit)
    psi = basis_state(circuit.num_qubits, bits)
    node0 = np.zeros(model.num_nodes)
    node0[0] = 1.0
    rho = np.ascontiguousarray(np.kron(np.outer(psi, psi.conj()), np.diag(node0)))
    return (model._l_ops, model._l_dag, model._damp, rho)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    cases = [
        ("walk step, toffoli chain (14 nodes, dim 8)",
         _kernels.step_blocks_numpy,
         getattr(_kernels, "step_blocks_numba", None),
         step_args(toffoli13(), "110"),
         args.repeats),
        ("walk step, qft4 chain (17 nodes, dim 16)",
         _kernels.step_blocks_numpy,
         getattr(_kernels, "step_blocks_numba", None),
         step_args(qft(4), "0000"),
         args.repeats),
        ("master-equation rhs, toffoli (dim 112)",
         _kernels.lindblad_rhs_numpy,
         getattr(_kernels, "lindblad_rhs_numba", None),
         rhs_args(toffoli13(), "110"),
         max(50, args.repeats // 20)),
    ]

    print(f"numba available: {_kernels.USING_NUMBA}")
    header = f"{'kernel':<45} {'numpy':>12} {'numba':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, numpy_fn, numba_fn, call_args, repeats in cases:
        t_numpy = time_call(numpy_fn, call_args, repeats)
        if numba_fn is not None:
            t_numba = time_call(numba_fn, call_args, repeats)
            ratio = f"{t_numpy / t_numba:7.2f}x"
            numba_col = f"{t_numba * 1e6:9.1f} us"
        else:
            numba_col, ratio = "n/a", "n/a"
        print(f"{label:<45} {t_numpy * 1e6:9.1f} us {numba_col:>12} {ratio:>8}")


if __name__ == "__main__":
    main()
