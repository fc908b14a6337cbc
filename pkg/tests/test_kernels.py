"""The compiled kernels and their interpreted twins must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
from hypothesis import given, strategies as st

from fairmatch import _kernels


def random_rows(rng, n, n_rows):
    lists = [sorted(rng.choice(n_rows, rng.integers(0, min(n_rows, 4) + 1), replace=False).tolist())
             for _ in range(n)]
    return _kernels.csr(lists)


@given(st.integers(0, 2**32 - 1))
def test_greedy_scan_twins(seed):
    rng = np.random.default_rng(seed)
    n, n_rows = int(rng.integers(0, 30)), int(rng.integers(1, 10))
    ptr, idx = random_rows(rng, n, n_rows)
    caps = rng.integers(0, 4, n_rows).astype(np.int64)
    order = rng.permutation(n).astype(np.int64)
    a = _kernels.greedy_scan(ptr, idx, caps, order)
    b = _kernels.greedy_scan.py_func(ptr, idx, caps, order)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(st.integers(0, 2**32 - 1))
def test_row_loads_twins(seed):
    rng = np.random.default_rng(seed)
    n, n_rows = int(rng.integers(1, 30)), int(rng.integers(1, 10))
    ptr, idx = random_rows(rng, n, n_rows)
    chosen = rng.choice(n, rng.integers(0, n + 1), replace=False).astype(np.int64)
    a = _kernels.row_loads(ptr, idx, n_rows, chosen)
    b = _kernels.row_loads.py_func(ptr, idx, n_rows, chosen)
    assert np.array_equal(a, b)


@given(st.integers(0, 2**32 - 1))
def test_max_flow_twins_and_scipy(seed):
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow

    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    m = int(rng.integers(0, 40))
    tails = rng.integers(0, n, m).astype(np.int64)
    heads = rng.integers(0, n, m).astype(np.int64)
    keep = tails != heads
    tails, heads = tails[keep], heads[keep]
    caps = rng.integers(0, 5, len(tails)).astype(np.int64)
    v1, f1 = _kernels.max_flow(n, tails, heads, caps, 0, 1)
    v2, f2 = _kernels.max_flow.py_func(n, tails, heads, caps, 0, 1)
    assert v1 == v2 and np.array_equal(f1, f2)
    # independent check: scipy sums parallel arcs itself
    mat = csr_matrix((caps.astype(np.int32), (tails, heads)), shape=(n, n))
    assert maximum_flow(mat, 0, 1).flow_value == v1


def test_disable_flag_selects_interpreted_path():
    code = ("from fairmatch import _kernels, approx; import _instances as I;"
            "print(_kernels.HAS_NUMBA, sorted(approx.greedy_cmm(I.inst_a()).matched))")
    env = dict(os.environ, FAIRMATCH_DISABLE_NUMBA="1",
               PYTHONPATH=os.path.dirname(__file__) + os.pathsep + os.environ.get("PYTHONPATH", ""))
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False [('a1', 'p'), ('a3', 'p')]"


def test_csr():
    ptr, idx = _kernels.csr([[2, 0], [], [1]])
    assert ptr.tolist() == [0, 2, 2, 3] and idx.tolist() == [2, 0, 1]
