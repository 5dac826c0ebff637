#!/usr/bin/env python3
"""Benchmark the numba kernels against their numpy/scipy fallbacks.

The comparison runs both implementations in-process (the compiled
kernel and the fallback function), so one invocation covers both paths
regardless of TWOJC_NUMBA.  Usage:

    python benchmarks/bench_accel.py [--quick]
"""

import argparse
import math
import time

import numpy as np
import scipy.sparse
from scipy.special import gammaln

from twojc import ModelParams, coherent_field, reduced_field_density, spectrum_table
from twojc._accel import USE_NUMBA
from twojc.dynamics import _husimi_grid_numpy, _husimi_kernel
from twojc.model import F_BUCK_SUKUMAR
from twojc.oracle import (_rk4_csr_kernel, _rk4_scipy, build_joint_hamiltonian,
                          joint_initial_state)
from twojc.spectral import _jacobi_kernel


def timed(fn, *args, repeat=3):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_husimi(quick):
    params = ModelParams(omega0=1.0, g=1.0, f_kind=F_BUCK_SUKUMAR)
    n_max = 80
    field = coherent_field(10.0, n_max=n_max)
    spectra = spectrum_table(params, n_max)
    rho = reduced_field_density(field, spectra, math.pi / 4.0).matrix
    pts = 81 if quick else 241
    ax = np.linspace(-4.5, 4.5, pts)
    lgam = gammaln(np.arange(rho.shape[0]) + 1.0)
    rows = []
    if USE_NUMBA:
        _husimi_kernel(rho, ax[:2], ax[:2], lgam)  # compile outside the timing
        t, ref = timed(_husimi_kernel, rho, ax, ax, lgam)
        rows.append(("husimi grid", "numba", t, None))
    t2, alt = timed(_husimi_grid_numpy, rho, ax, ax, lgam)
    err = float(np.abs(ref - alt).max()) if USE_NUMBA else 0.0
    rows.append(("husimi grid", "numpy", t2, err))
    return rows


def bench_rk4(quick):
    params = ModelParams(omega0=1.0, g=1.0, kappa=0.125, f_kind=F_BUCK_SUKUMAR)
    field = coherent_field(10.0 if quick else 20.0)
    H = build_joint_hamiltonian(params, field.n_max)
    psi0 = joint_initial_state(field).amplitudes.reshape(-1)
    Hs = scipy.sparse.csr_matrix(H)
    h = 0.02 / float(np.abs(H).sum(axis=1).max())
    n_steps = 2000 if quick else 20000
    rows = []
    if USE_NUMBA:
        data = Hs.data.astype(np.complex128)
        idx = Hs.indices.astype(np.int64)
        ptr = Hs.indptr.astype(np.int64)
        _rk4_csr_kernel(data, idx, ptr, psi0.copy(), h, 2)
        t, ref = timed(_rk4_csr_kernel, data, idx, ptr, psi0.copy(), h, n_steps,
                       repeat=1)
        rows.append((f"rk4 x{n_steps} (dim {H.shape[0]})", "numba", t, None))
    t2, alt = timed(_rk4_scipy, Hs, psi0.copy(), h, n_steps, repeat=1)
    err = float(np.abs(ref - alt).max()) if USE_NUMBA else 0.0
    rows.append((f"rk4 x{n_steps} (dim {H.shape[0]})", "scipy", t2, err))
    return rows


def bench_jacobi(quick):
    rng = np.random.default_rng(0)
    count = 2000 if quick else 10000
    mats = rng.normal(size=(count, 3, 3))
    mats = mats + np.swapaxes(mats, 1, 2)

    def run(fn):
        out = 0.0
        for m in mats:
            w, _ = fn(np.ascontiguousarray(m), 540)
            out += w.sum()
        return out

    rows = []
    if USE_NUMBA:
        _jacobi_kernel(np.eye(3), 540)
        t, ref = timed(run, _jacobi_kernel, repeat=1)
        rows.append((f"jacobi 3x3 x{count}", "numba", t, None))
    pure = _jacobi_kernel.py_func if hasattr(_jacobi_kernel, "py_func") else _jacobi_kernel
    t2, alt = timed(run, pure, repeat=1)
    err = abs(ref - alt) if USE_NUMBA else 0.0
    rows.append((f"jacobi 3x3 x{count}", "python", t2, err))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    print(f"numba path available and enabled: {USE_NUMBA}")
    rows = []
    rows += bench_husimi(args.quick)
    rows += bench_rk4(args.quick)
    rows += bench_jacobi(args.quick)
    print(f"\n{'kernel':<28} {'path':<8} {'seconds':>10}  {'max |diff|'}")
    base = {}
    for name, path, t, err in rows:
        extra = "" if err is None else f"{err:.2e}"
        speed = ""
        if name in base:
            speed = f"  ({t / base[name]:.1f}x numba time)"
        else:
            base[name] = t
        print(f"{name:<28} {path:<8} {t:>10.3f}  {extra}{speed}")


if __name__ == "__main__":
    main()
