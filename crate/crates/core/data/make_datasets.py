"""Regenerates the bundled CSV files.

Requires numpy, pandas, statsmodels and scikit-learn. Run from this directory.
"""
import numpy as np
import pandas as pd
import statsmodels.api as sm
from sklearn import datasets


def fair():
    f = sm.datasets.fair.load_pandas().data.copy()
    f["affair"] = (f.affairs > 0).astype(int)
    f = f.drop(columns=["affairs"])
    for c in f.columns[:-1]:
        f[c] = f[c].astype(float)
    f.to_csv("fair.csv", index=False, float_format="%.6g")


def diabetes():
    d = datasets.load_diabetes(as_frame=True, scaled=False).frame
    d.to_csv("diabetes.csv", index=False, float_format="%.6g")


def heart():
    h = sm.datasets.heart.load_pandas().data
    h["censors"] = h.censors.astype(int)
    h.to_csv("heart.csv", index=False, float_format="%.6g")


def cardio_survival():
    rng = np.random.default_rng(20240611)
    n = 400
    age = rng.uniform(40, 80, n).round(1)
    bmi = rng.normal(27, 4, n).round(1)
    smoker = (rng.uniform(size=n) < 0.3).astype(float)
    sbp = rng.normal(130, 15, n).round(0)
    lvef = rng.normal(58, 8, n).round(0)
    lin = 0.04 * (age - 60) + 0.5 * (bmi >= 30) + 1.0 * smoker + 0.01 * (sbp - 130) + 1.5 * (lvef < 50)
    t = rng.exponential(10 * np.exp(-lin))
    c = rng.uniform(2, 25, n)
    time = np.minimum(t, c).round(3) + 0.001
    event = (t <= c).astype(int)
    pd.DataFrame(
        dict(age=age, bmi=bmi, smoker=smoker, sbp=sbp, lvef=lvef, time=time, event=event)
    ).to_csv("cardio_survival.csv", index=False, float_format="%.6g")


if __name__ == "__main__":
    fair()
    diabetes()
    heart()
    cardio_survival()
