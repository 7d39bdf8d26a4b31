"""Regenerates the ADF reference fixtures.

Each series is written one value per line with full round-trip precision.
Expected statistics come from statsmodels' adfuller (constant only, AIC lag
selection) run with the Schwert floor max lag used by the Rust code.
"""
import json
import math

import numpy as np
from statsmodels.tsa.stattools import adfuller

T = 180


def ar1(seed, phi, n=T):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n)
    y = np.empty(n)
    y[0] = e[0]
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y


def random_walk(seed, n=T):
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.standard_normal(n))


def white_noise(seed, n=T):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n)


FIXTURES = {
    "rw_seed42": random_walk(42),
    "ar1_seed7": ar1(7, 0.5),
    "ar1_phi03_seed11": ar1(11, 0.3),
    "ar1_phi09_seed13": ar1(13, 0.9),
    "white_noise_seed17": white_noise(17),
    "near_unit_phi099_seed19": ar1(19, 0.99),
}


def main():
    expected = {}
    for name, y in FIXTURES.items():
        with open(f"{name}.csv", "w") as fh:
            for v in y:
                fh.write(repr(float(v)) + "\n")
        # Re-read so the oracle sees exactly the committed decimal text.
        y = np.array([float(line) for line in open(f"{name}.csv")])
        max_lag = math.floor(12.0 * (len(y) / 100.0) ** 0.25)
        stat, p, lags, nobs, crit, _ = adfuller(
            y, maxlag=max_lag, regression="c", autolag="AIC"
        )
        expected[name] = {
            "t_stat": float(stat),
            "p_value": float(p),
            "lags_used": int(lags),
            "n_obs": int(nobs),
            "max_lag": max_lag,
            "critical_values": {k: float(v) for k, v in crit.items()},
        }
    with open("expected.json", "w") as fh:
        json.dump(expected, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
