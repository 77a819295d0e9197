#!/usr/bin/env python3
"""Simulate the null mean and variance of the ADF t-ratio used by the IPS test.

For each deterministic kind, series length T and augmentation lag p, draws
Gaussian random walks of length T, runs the ADF regression exactly as
panelecon::adf_test does (Delta y_t on deterministic terms, y_{t-1} and p
lagged differences, residual variance with divisor rows - k) and records the
mean and variance of the t-ratio on y_{t-1}.

Output is a C++ header fragment written to stdout.
"""

import argparse

import numpy as np

LENGTHS = [6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 17, 20, 25, 30, 40, 50, 60, 70,
           80, 100, 150, 250, 500]
MAX_LAG = 8
KINDS = ["none", "intercept", "trend"]


def det_columns(kind):
    return {"none": 0, "intercept": 1, "trend": 2}[kind]


def adf_taus(rng, reps, length, lags, kind):
    eps = rng.standard_normal((reps, length))
    y = np.cumsum(eps, axis=1)
    dy = np.diff(y, axis=1)  # dy[:, j] = y[j+1] - y[j]
    rows = length - 1 - lags
    cols = []
    if det_columns(kind) >= 1:
        cols.append(np.ones((reps, rows)))
    if det_columns(kind) == 2:
        trend = np.arange(lags + 2, length + 1, dtype=float)
        cols.append(np.broadcast_to(trend, (reps, rows)))
    cols.append(y[:, lags:length - 1])
    for l in range(1, lags + 1):
        cols.append(dy[:, lags - l:length - 1 - l])
    X = np.stack(cols, axis=2)
    target = dy[:, lags:]
    k = X.shape[2]
    xtx = np.einsum("rti,rtj->rij", X, X)
    xty = np.einsum("rti,rt->ri", X, target)
    beta = np.linalg.solve(xtx, xty[..., None])[..., 0]
    resid = target - np.einsum("rti,ri->rt", X, beta)
    s2 = np.sum(resid ** 2, axis=1) / (rows - k)
    inv = np.linalg.inv(xtx)
    pos = det_columns(kind)
    se = np.sqrt(s2 * inv[:, pos, pos])
    return beta[:, pos] / se


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=50000)
    parser.add_argument("--seed", type=int, default=20230917)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print("// Generated by tools/gen_ips_moments.py --reps %d --seed %d (lengths above 100 use reps/5)" % (args.reps, args.seed))
    print("// Rows: {length, lags, mean, variance}.")
    for kind in KINDS:
        print("inline constexpr IpsMoment kIpsMoments_%s[] = {" % kind)
        for length in LENGTHS:
            for lags in range(MAX_LAG + 1):
                k = det_columns(kind) + 1 + lags
                rows = length - 1 - lags
                if rows - k < 3:
                    continue
                reps = args.reps if length <= 100 else args.reps // 5
                taus = []
                done = 0
                chunk = max(1000, min(reps, 4000000 // (length * (k + 2))))
                while done < reps:
                    n = min(chunk, reps - done)
                    taus.append(adf_taus(rng, n, length, lags, kind))
                    done += n
                t = np.concatenate(taus)
                t = t[np.isfinite(t)]
                print("    {%d, %d, %.4f, %.4f}," % (length, lags, t.mean(), t.var(ddof=1)), flush=True)
        print("};", flush=True)


if __name__ == "__main__":
    main()
