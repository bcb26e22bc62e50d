#!/usr/bin/env python3
"""Calibration run for the restricted-data reconstruction threshold.

Builds the dense linearized operator h -> 2 Re(conj(R) F(w h)) for a 1-D
plane-wave probe on critically sampled grids with a direct DFT matrix, then
solves the Tikhonov normal equations for contiguous centered data windows.

The 5% threshold used by the tests and the acceptance run comes from the
row "N=256, 25%, smooth": the error there is about 0.5%, leaving a factor
of ten for solver tolerance and iteration limits. Random perturbations
are reported for comparison; with 32 complex unknowns they are not
recoverable from a quarter window of 128 samples (32 equations for 64
real unknowns).

Usage: python3 tools/calibrate_restricted.py [--alpha 1e-8]
"""

import argparse

import numpy as np


def operator(n_data, n_unknowns):
    dx = np.sqrt(2 * np.pi / n_data)
    x = (np.arange(n_data) - n_data // 2) * dx
    xi = x.copy()  # critical sampling: the grid is its own dual
    dft = dx / np.sqrt(2 * np.pi) * np.exp(-1j * np.outer(xi, x))
    gamma = np.exp(-1j * np.pi / 4)
    R = np.exp(-0.5j * xi**2) / gamma
    w = np.exp(0.5j * x**2)
    start = n_data // 2 - n_unknowns // 2
    cols = dft[:, start:start + n_unknowns] * w[start:start + n_unknowns]
    re = 2 * np.real(np.conj(R)[:, None] * cols)
    im = 2 * np.real(np.conj(R)[:, None] * 1j * cols)
    return np.hstack([re, im])


def calibration_object(n_unknowns):
    t = np.linspace(-1.0, 1.0, n_unknowns)
    return np.exp(-t**2 / 0.2) * (0.3 + 0.1j)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", type=float, default=1e-8)
    ap.add_argument("--unknowns", type=int, default=32)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    objects = {
        "smooth": calibration_object(args.unknowns),
        "random": rng.standard_normal(args.unknowns) + 1j * rng.standard_normal(args.unknowns),
    }
    # Grid measures scale the normal equations exactly as in the library.
    print(f"{'N':>5} {'window':>7} {'object':>7} {'rank':>5} {'cond':>10} {'error':>10}")
    for n_data in (128, 256, 512):
        A = operator(n_data, args.unknowns)
        measure = np.sqrt(2 * np.pi / n_data)
        for frac in (1.0, 0.5, 0.25, 0.1):
            m = max(1, int(round(frac * n_data)))
            s0 = n_data // 2 - m // 2
            Am = A[s0:s0 + m]
            sv = np.linalg.svd(Am, compute_uv=False)
            rank = int((sv > 1e-12 * sv[0]).sum())
            cond = sv[0] / sv[-1] if len(sv) == Am.shape[1] else np.inf
            for name, h in objects.items():
                v = np.concatenate([h.real, h.imag])
                b = Am @ v
                lhs = measure * (Am.T @ Am) + args.alpha * measure * np.eye(Am.shape[1])
                sol = np.linalg.solve(lhs, measure * (Am.T @ b))
                err = np.linalg.norm(sol - v) / np.linalg.norm(v)
                print(f"{n_data:5d} {frac * 100:6.0f}% {name:>7} {rank:5d} {cond:10.3e} {err:10.3e}")


if __name__ == "__main__":
    main()
