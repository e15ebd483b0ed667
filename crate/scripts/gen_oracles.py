#!/usr/bin/env python3
"""Regenerate the reference fixtures used by the Rust oracle tests.

Every value here comes from scipy / statsmodels, which are independent of the
Rust implementation. Output goes to crates/core/tests/fixtures/.

    python3 scripts/gen_oracles.py
"""

import json
import os

import numpy as np
from scipy import stats
from statsmodels.stats.diagnostic import acorr_ljungbox
from statsmodels.tsa.adfvalues import mackinnoncrit
from statsmodels.tsa.stattools import adfuller

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures")


def pearson_cases(rng):
    cases = []
    for _ in range(120):
        m = int(rng.integers(1, 60))
        ps = rng.uniform(0.0, 1.0, size=m)
        # a few vectors skewed toward small p to exercise the lower tail
        if rng.uniform() < 0.3:
            ps = ps ** 4
        res = stats.combine_pvalues(ps, method="pearson")
        # scipy reports 2*sum(log(1-p)); the Rust statistic is its negation
        cases.append({"p": ps.tolist(), "statistic": float(-res.statistic), "p_value": float(res.pvalue)})
    return cases


def ks_cases(rng):
    kolmogorov = [{"lambda": float(x), "q": float(stats.kstwobign.sf(x))} for x in np.linspace(0.05, 3.0, 60)]
    two_sample = []
    for _ in range(40):
        na = int(rng.integers(5, 300))
        nb = int(rng.integers(5, 300))
        shift = float(rng.uniform(0.0, 0.6))
        a = rng.uniform(0.0, 1.0, size=na)
        b = rng.uniform(shift, 1.0 + shift, size=nb)
        d = stats.ks_2samp(a, b).statistic
        en = na * nb / (na + nb)
        two_sample.append({
            "a": a.tolist(),
            "b": b.tolist(),
            "d": float(d),
            "p_value": float(stats.kstwobign.sf(np.sqrt(en) * d)),
        })
    return {"kolmogorov_q": kolmogorov, "two_sample": two_sample}


def ljung_box_cases(rng):
    cases = []
    for i in range(30):
        n = int(rng.integers(200, 3000))
        lam = float(rng.uniform(0.1, 0.9))
        x = (rng.uniform(size=n) < lam).astype(float)
        if i % 3 == 0:
            # AR-ish dependence so the statistic is not always small
            x = np.convolve(rng.normal(size=n + 2), [1.0, 0.6, 0.3], mode="valid")[:n]
        h = int(rng.integers(1, 20))
        res = acorr_ljungbox(x, lags=[h])
        cases.append({
            "series": x.tolist(),
            "lags": h,
            "q": float(res["lb_stat"].iloc[0]),
            "p_value": float(res["lb_pvalue"].iloc[0]),
        })
    return cases


def adf_cases(rng):
    cases = []
    for i in range(30):
        n = int(rng.integers(60, 1500))
        lags = int(rng.integers(0, 4))
        if i % 2 == 0:
            x = np.cumsum(rng.choice([-1.0, 1.0], size=n))
        else:
            x = (rng.uniform(size=n) < 0.4).astype(float)
        res = adfuller(x, maxlag=lags, regression="c", autolag=None)
        cases.append({"series": x.tolist(), "lags": lags, "statistic": float(res[0]), "nobs": int(res[3])})
    crit = mackinnoncrit(1, "c", np.inf)
    return {"cases": cases, "asymptotic_constant_only": {"1%": float(crit[0]), "5%": float(crit[1]), "10%": float(crit[2])}}


def main():
    rng = np.random.default_rng(20240611)
    os.makedirs(OUT, exist_ok=True)
    for name, payload in [
        ("pearson.json", pearson_cases(rng)),
        ("ks.json", ks_cases(rng)),
        ("ljung_box.json", ljung_box_cases(rng)),
        ("adf.json", adf_cases(rng)),
    ]:
        with open(os.path.join(OUT, name), "w") as fh:
            json.dump(payload, fh)
        print("wrote", name)


if __name__ == "__main__":
    main()
