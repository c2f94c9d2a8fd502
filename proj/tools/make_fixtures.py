#!/usr/bin/env python3
"""Regenerates the synthetic CSV fixtures under data/fixtures.

The series are correlated GBM paths on a weekday calendar. The index skips a
handful of exchange holidays that the FX series keep, so alignment has work
to do. Expected log returns for the 141-price file are computed with mpmath
at 40 digits.
"""
import datetime as dt
import math
from pathlib import Path

import mpmath
import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
rng = np.random.default_rng(20181031)


def weekdays(start, count):
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def write_series(path, dates, prices):
    with open(path, "w") as f:
        f.write("date,price\n")
        for d, p in zip(dates, prices):
            f.write(f"{d.isoformat()},{p:.6f}\n")


N_INDEX = 1841
HOLIDAYS = 12
calendar = weekdays(dt.date(2011, 8, 1), N_INDEX + HOLIDAYS)
holiday_idx = set(rng.choice(np.arange(5, len(calendar) - 5), HOLIDAYS, replace=False).tolist())
index_dates = [d for i, d in enumerate(calendar) if i not in holiday_idx]
assert len(index_dates) == N_INDEX

sx = 0.0057
fx_specs = {
    "eurusd": (1.4250, 0.0045, -0.03),
    "gbpusd": (1.6400, 0.0042, 0.08),
    "cadusd": (1.0150, 0.0038, 0.25),
}

z_x = rng.standard_normal(len(calendar))
x_ret = 0.0003 - 0.5 * sx * sx + sx * z_x
x_path = 1285.0 * np.exp(np.cumsum(x_ret))
keep = [i for i in range(len(calendar)) if i not in holiday_idx]
write_series(OUT / "spx.csv", index_dates, x_path[keep])

for name, (h0, sh, rho) in fx_specs.items():
    z_h = rho * z_x + math.sqrt(1 - rho * rho) * rng.standard_normal(len(calendar))
    h_ret = -0.00005 - 0.5 * sh * sh + sh * z_h
    h_path = h0 * np.exp(np.cumsum(h_ret))
    write_series(OUT / f"{name}.csv", calendar, h_path)

# Option chain on the last index date: calls priced by Black-Scholes at a
# per-day vol plus a little noise, and a few quotes that break the bounds.
spot = round(float(x_path[keep][-1]), 2)
quote_date = index_dates[-1]
r_d = 0.025 / 252


def ncdf(v):
    return 0.5 * math.erfc(-v / math.sqrt(2))


def bs(s, k, vol, r, t):
    tv = vol * math.sqrt(t)
    d1 = (math.log(s / k) + r * t) / tv + 0.5 * tv
    return s * ncdf(d1) - k * math.exp(-r * t) * ncdf(d1 - tv)


rows = []
maturities = [23, 51, 79, 142, 233]
strikes = np.round(np.linspace(0.90, 1.10, 10) * spot / 5) * 5
for m in maturities:
    for k in strikes:
        vol = 0.0058 + 0.002 * (k / spot - 1.0) ** 2 * 100
        lower = max(spot - k * math.exp(-r_d * m), 0.0)
        time_value = bs(spot, float(k), vol, r_d, m) - lower
        price = lower + time_value * math.exp(0.05 * rng.standard_normal())
        price = max(price, math.ceil(lower * 100 + 1) / 100)
        rows.append([quote_date.isoformat(), float(k), m, round(price, 2), spot])

# Bound violators: two under intrinsic value, one above the spot.
rows[0][3] = round(max(spot - rows[0][1] * math.exp(-r_d * rows[0][2]), 0) - 4.0, 2)
rows[20][3] = round(max(spot - rows[20][1] * math.exp(-r_d * rows[20][2]), 0) - 0.75, 2)
rows[33][3] = round(spot + 10.0, 2)
assert len(rows) == 50

with open(OUT / "options.csv", "w") as f:
    f.write("quote_date,strike,maturity_days,price,spot\n")
    for r in rows:
        f.write(f"{r[0]},{r[1]:.2f},{r[2]},{r[3]:.2f},{r[4]:.2f}\n")

# 141 prices with reference log returns.
mpmath.mp.dps = 40
short_dates = weekdays(dt.date(2018, 3, 1), 141)
p = 2600.0 * np.exp(np.cumsum(0.006 * rng.standard_normal(141)))
p_text = [f"{v:.4f}" for v in p]
write_series(OUT / "prices_141.csv", short_dates, [float(t) for t in p_text])
with open(OUT / "prices_141_logreturns.txt", "w") as f:
    for a, b in zip(p_text[:-1], p_text[1:]):
        f.write(mpmath.nstr(mpmath.log(mpmath.mpf(b) / mpmath.mpf(a)), 25) + "\n")
