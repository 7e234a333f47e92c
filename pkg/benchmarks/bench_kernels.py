#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot loops (the matcher's token scan and one-vs-rest hinge
training) on synthetic inputs of corpus-like size, checks both backends
agree bit for bit, and prints a speedup table.

Usage: python3 benchmarks/bench_kernels.py [--docs N] [--tokens N] [--rows N]
"""

import argparse
import random
import sys
import time
from array import array
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from motifkit._kernels import available_backends
from motifkit.matcher import match_document

from synth import synth_document, synth_ruleset


def bench_scan(backend, cases, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = [backend.scan(*case) for case in cases]
        best = min(best, time.perf_counter() - start)
        result = out
    return best, result


def bench_svm(backend, case, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = backend.svm_train(*case)
        best = min(best, time.perf_counter() - start)
        result = out
    return best, result


def make_scan_cases(n_docs, n_tokens, rng):
    """Kernel-level inputs mimicking a ruleset scan over long articles."""
    vocab_size = 50
    cases = []
    for _ in range(n_docs):
        token_ids = array("i", [rng.randint(-1, vocab_size - 1) for _ in range(n_tokens)])
        clitic = array("B", [rng.random() < 0.05 for _ in range(n_tokens)])
        pat_offsets = array("i", [0])
        pos_offsets = array("i", [0])
        alt_ids = array("i")
        for _ in range(40):  # rules x patterns
            for _ in range(rng.randint(1, 4)):
                alt_ids.append(rng.randint(0, vocab_size - 1))
                pos_offsets.append(len(alt_ids))
            pat_offsets.append(len(pos_offsets) - 1)
        cases.append((token_ids, pat_offsets, pos_offsets, alt_ids, clitic, True))
    return cases


def make_svm_case(n_rows, dim, epochs, rng):
    x = array("d", [rng.random() for _ in range(n_rows * dim)])
    y = array("i", [rng.randint(0, 3) for _ in range(n_rows)])
    s = array("d", [1.0] * n_rows)
    orders = array("i")
    for _ in range(epochs):
        idx = list(range(n_rows))
        rng.shuffle(idx)
        orders.extend(idx)
    return (x, y, s, n_rows, dim, 4, orders, epochs, 0.01)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=50)
    parser.add_argument("--tokens", type=int, default=2000)
    parser.add_argument("--rows", type=int, default=5000)
    parser.add_argument("--dim", type=int, default=43)
    parser.add_argument("--epochs", type=int, default=50)
    args = parser.parse_args()

    backends = available_backends()
    if "cy" not in backends:
        print("compiled kernels unavailable; only the pure backend exists")

    rng = random.Random(1)
    scan_cases = make_scan_cases(args.docs, args.tokens, rng)
    svm_case = make_svm_case(args.rows, args.dim, args.epochs, rng)

    rows = []
    results = {}
    for name, backend in backends.items():
        scan_time, scan_out = bench_scan(backend, scan_cases)
        svm_time, svm_out = bench_svm(backend, svm_case)
        results[name] = (scan_out, svm_out)
        rows.append((name, scan_time, svm_time))

    if len(results) == 2:
        s_py, v_py = results["py"]
        s_cy, v_cy = results["cy"]
        assert s_py == s_cy, "scan outputs diverge between backends"
        assert list(v_py[0]) == list(v_cy[0]) and list(v_py[1]) == list(v_cy[1]), (
            "svm outputs diverge between backends"
        )
        print("bit-exact agreement between backends: OK\n")

    base_scan = next(t for n, t, _ in rows if n == "py")
    base_svm = next(t for n, _, t in rows if n == "py")
    print(f"{'backend':<8} {'scan (s)':>10} {'speedup':>8} {'svm (s)':>10} {'speedup':>8}")
    for name, scan_time, svm_time in rows:
        print(
            f"{name:<8} {scan_time:>10.3f} {base_scan / scan_time:>7.1f}x"
            f" {svm_time:>10.3f} {base_svm / svm_time:>7.1f}x"
        )

    # end-to-end sanity on the public API path
    ruleset = synth_ruleset()
    docs = [synth_document(random.Random(i), i) for i in range(20)]
    start = time.perf_counter()
    found = sum(len(match_document(d, ruleset)) for d in docs)
    elapsed = time.perf_counter() - start
    print(f"\nmatch_document over 20 synthetic docs: {found} candidates in {elapsed:.3f}s")


if __name__ == "__main__":
    main()
