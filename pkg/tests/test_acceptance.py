"""Acceptance criteria, one pass/fail line each (see the summary at the end of the run).

Expected coefficient tables are the published ones, copied verbatim.  Run the
n = 7 unicyclic scan with ``--run-n7`` or ``KERNELGF_FULL=1``.
"""

from __future__ import annotations

import io
import random
import time
from decimal import Decimal
from functools import lru_cache
from pathlib import Path

import mpmath
import numpy as np
import pytest

from kernelgf import asym, oracle
from kernelgf import series as S
from kernelgf.cli import main
from kernelgf.digraph import Digraph, dag_kernel, enumerate_kernels
from kernelgf.game import losing_positions

DATA = Path(__file__).parent / "data"

PUBLISHED = {
    "T": [1, 4, 36, 512, 10000, 248832, 7529536],
    "Tg": [0, 2, 15, 232, 4535, 114276, 3478083],
    "Tr": [1, 2, 21, 280, 5465, 134556, 4051453],
    "Tunr": [1, 2, 12, 128, 2000, 41472, 1075648],
    "Tgunr": [0, 1, 5, 58, 907, 19046, 496869],
    "Trunr": [1, 1, 7, 70, 1093, 22426, 578779],
    "L": [1, 3, 8, 42, 264, 2160, 20880],
    "U": [1, 4, 30, 452, 8840, 224832, 6909784],
    "V": [1, 4, 36, 692, 15920, 458622, 15559264],
}


# 1 ---------------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(PUBLISHED))
def test_c01_series_tables(name, criterion):
    t0 = time.perf_counter()
    f = S.named_series(name, 7)
    got = [f.count(n) for n in range(1, 8)]
    dt = time.perf_counter() - t0
    diff = [(n, e, g) for n, (e, g) in enumerate(zip(PUBLISHED[name], got), 1) if e != g]
    detail = f"{dt:.2f}s" + (f"; (n, published, computed) {diff}" if diff else "")
    criterion(f"1 series table {name}, n = 1..7", not diff and dt < 1, detail)


# 2 ---------------------------------------------------------------------------------


def test_c02_closed_form(criterion):
    t0 = time.perf_counter()
    T = S.trees(50).T
    ok = all(T.count(n) == (2 * n) ** (n - 1) for n in range(1, 51))
    dt = time.perf_counter() - t0
    criterion("2 a_n(T) = (2n)^(n-1), n <= 50", ok and dt < 1, f"{dt:.2f}s")


# 3 ---------------------------------------------------------------------------------


def test_c03_tree_oracle(criterion):
    t0 = time.perf_counter()
    ts, u = S.trees(7), S.unrooted_trees(7)
    bad = []
    for n in range(1, 8):
        tc = oracle.count_trees(n)
        pairs = {
            "T": (tc.rooted, ts.T),
            "Tg": (tc.rooted_green, ts.Tg),
            "Tr": (tc.rooted_red, ts.Tr),
            "Tunr": (tc.trees, u.T_unr),
            "Tgunr": (tc.vertex1_green, u.Tg_unr),
            "Trunr": (tc.vertex1_red, u.Tr_unr),
        }
        bad += [(k, n, f.count(n), got) for k, (got, f) in pairs.items() if got != f.count(n)]
    dt = time.perf_counter() - t0
    criterion("3 tree oracle = series, rooted and unrooted, n <= 7", not bad and dt < 120, f"{dt:.1f}s" + (f" {bad}" if bad else ""))


# 4 ---------------------------------------------------------------------------------


def _unicyclic(n_max, criterion, label):
    t0 = time.perf_counter()
    res = oracle.verify_family("unicyclic", n_max, jobs=oracle.default_jobs(), strict=False)
    dt = time.perf_counter() - t0
    D = S.two_kernel_series(n_max)
    literal = S.two_kernel_literal_sign(n_max)
    oracle_D = {c.n: c.got for c in res.checks if c.series == "D"}
    # the counting sign matches the scan; the literal sign does not
    sign_ok = all(D.count(n) == oracle_D[n] for n in oracle_D) and literal.count(2) != oracle_D[2]
    fails = [(c.series, c.n, c.expected, c.got) for c in res.failures()]
    ok = res.ok and sign_ok and oracle_D[2] == 1
    criterion(label, ok, f"{dt:.1f}s D={[oracle_D[n] for n in sorted(oracle_D)]}" + (f" {fails}" if fails else ""))


def test_c04_unicyclic_oracle(criterion):
    _unicyclic(6, criterion, "4 unicyclic oracle reproduces U, V, F, G and fixes D, n <= 6")


def test_c04_unicyclic_oracle_n7(criterion, run_n7):
    if not run_n7:
        pytest.skip("n = 7 scan is opt-in (--run-n7 or KERNELGF_FULL=1)")
    t0 = time.perf_counter()
    _unicyclic(7, criterion, "4 unicyclic oracle, n <= 7")
    assert time.perf_counter() - t0 < 30 * 60


# 5 ---------------------------------------------------------------------------------


def test_c05_lambda(criterion):
    t0 = time.perf_counter()
    lam = asym.solve_lambda()
    dt = time.perf_counter() - t0
    with mpmath.workdps(60):
        x = mpmath.mpf(str(lam.value))
        resid = abs(2 * x - mpmath.exp(-x))
    ok = resid < 1e-12 and lam.digits(6) == "0.351733" and dt < 0.1
    criterion("5 lambda root of 2x = exp(-x)", ok, f"{lam.digits(12)} residual {mpmath.nstr(resid, 3)} {dt * 1000:.0f}ms")


# 6 ---------------------------------------------------------------------------------


def test_c06_constants(criterion):
    t0 = time.perf_counter()
    c = asym.constants()
    dt = time.perf_counter() - t0
    checks = {
        "(1-l)/(1+l)": abs(float(c.green_root_limit) - 0.4795) <= 0.0005,
        "1/2 - 1/(2 sqrt 5)": abs(float(c.red_circuit_limit) - 0.2764) <= 0.0001,
        "unicircuit limit": abs(float(c.unicircuit_limit) - 0.9265) <= 0.0005,
        "unicycle coefficient": 0.04 <= float(c.unicycle_sqrt_coeff) <= 0.07,
    }
    vals = ", ".join(
        f"{getattr(c, k).digits(6)}"
        for k in ("green_root_limit", "red_circuit_limit", "unicircuit_limit", "unicycle_sqrt_coeff")
    )
    bad = [k for k, v in checks.items() if not v]
    criterion("6 asymptotic constants", not bad and dt < 0.1, f"{vals} {dt * 1000:.0f}ms" + (f" {bad}" if bad else ""))


# 7 ---------------------------------------------------------------------------------


def test_c07_convergence(criterion):
    t0 = time.perf_counter()
    t = asym.ratio_table("green_root", 200)
    r = t.row(200)
    dt = time.perf_counter() - t0
    lam = float(asym.solve_lambda())
    predicted = -(lam**2) * (lam + 4) / (1 + lam) ** 5
    close = abs(r.ratio - r.limit) < Decimal("1e-3")
    scaled = abs(float(r.scaled_residual) - predicted) <= 0.25 * abs(predicted)
    criterion(
        "7 green-root ratio at n = 200",
        close and scaled and dt < 60,
        f"ratio {float(r.ratio):.6f} limit {float(r.limit):.6f} n*residual {float(r.scaled_residual):.5f} vs {predicted:.5f} {dt:.1f}s",
    )


# 8 ---------------------------------------------------------------------------------


def test_c08_unicycle_density(criterion):
    t0 = time.perf_counter()
    t = asym.ratio_table("unicycle", 200)
    c = asym.fit_inverse_sqrt(t, 50, 200)
    dt = time.perf_counter() - t0
    criterion("8 unicycle density fit 1 - c/sqrt(n), n = 50..200", 0.04 <= c <= 0.08 and dt < 120, f"c = {c:.5f} {dt:.1f}s")


# 9 ---------------------------------------------------------------------------------


def _brute_kernel_bitsets(n):
    """Bit R-1 of entry g is set iff red set R is a kernel of digraph g."""
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    g = np.arange(1 << len(pairs), dtype=np.int64)
    out = np.zeros((g.size, n), dtype=np.int64)
    for i, (u, v) in enumerate(pairs):
        out[:, u - 1] |= ((g >> i) & 1) << (v - 1)
    R = np.arange(1, 1 << n, dtype=np.int64)
    ok = np.ones((g.size, R.size), dtype=bool)
    for v in range(n):
        inside = ((R >> v) & 1).astype(bool)
        hit = (out[:, v : v + 1] & R[None, :]) != 0
        # members have no arc into the set; others have one
        ok &= np.where(inside[None, :], ~hit, hit)
    return pairs, (ok.astype(np.int64) << np.arange(R.size, dtype=np.int64)[None, :]).sum(axis=1)


def _minimax_losing(d):
    @lru_cache(maxsize=None)
    def wins(v):
        return any(not wins(w) for w in d.children(v))

    return {v for v in d.vertices if not wins(v)}


def test_c09_kernel_properties(criterion):
    t0 = time.perf_counter()
    mismatches = 0
    for n in range(1, 6):
        pairs, brute = _brute_kernel_bitsets(n)
        for m in range(brute.size):
            d = Digraph(n, [p for i, p in enumerate(pairs) if m >> i & 1])
            bits = 0
            for k in enumerate_kernels(d):
                bits |= 1 << (sum(1 << (v - 1) for v in k) - 1)
            mismatches += bits != brute[m]
    rng = random.Random(12345)
    dag_bad = 0
    for _ in range(1000):
        n = rng.randint(1, 10)
        order = list(range(1, n + 1))
        rng.shuffle(order)
        d = Digraph(n, [(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.35])
        ks = enumerate_kernels(d)
        k = dag_kernel(d).as_set()
        dag_bad += not (len(ks) == 1 and ks[0].as_set() == k == losing_positions(d) == _minimax_losing(d))
    dt = time.perf_counter() - t0
    criterion(
        "9 kernel enumeration exhaustive n <= 5; DAG kernel = minimax on 1000 DAGs",
        mismatches == 0 and dag_bad == 0 and dt < 60,
        f"{mismatches} enumeration mismatches, {dag_bad} DAG mismatches, {dt:.1f}s",
    )


# 10 --------------------------------------------------------------------------------


def _cli(argv, stdin=""):
    out = io.StringIO()
    return main(argv, stdin=io.StringIO(stdin), stdout=out), out.getvalue()


def test_c10_game_cli(criterion):
    t0 = time.perf_counter()
    c3 = _cli(["kernel"], "3 3\n1 2\n2 3\n3 1\n")
    c4 = _cli(["kernel"], "4 4\n1 2\n2 3\n3 4\n4 1\n")
    play = _cli(["play", "--seed", "5", "--size", "6", "--hint"], (DATA / "play_script.txt").read_text())
    dt = time.perf_counter() - t0
    checks = {
        "3-circuit exit 2": c3[0] == 2 and "no kernel" in c3[1],
        "4-circuit two kernels": c4[0] == 0 and "{1, 3}" in c4[1] and "{2, 4}" in c4[1],
        "golden transcript": play[0] == 0 and play[1] == (DATA / "play_golden.txt").read_text(),
    }
    bad = [k for k, v in checks.items() if not v]
    criterion("10 game and CLI", not bad and dt < 1, f"{dt:.2f}s" + (f" {bad}" if bad else ""))
