"""
Stationarity and autocorrelation checks
=======================================

The augmented Dickey-Fuller test (constant plus trend) and the Ljung-Box
portmanteau test, on series whose answer is known in advance.
"""

import numpy as np

from entrovol import acf, adf_test, chi_square_sf, ljung_box
from entrovol.stats import df_critical_values, simulate_df_quantile

rng = np.random.default_rng(3)
walk = np.cumsum(rng.normal(size=2000))
noise = rng.normal(size=2000)

# %%
# A random walk should not reject the unit root; white noise rejects so
# strongly that the p-value runs off the table and is reported as 0.01.
for name, x in (("random walk", walk), ("white noise", noise)):
    res = adf_test(x)
    flag = " (clamped)" if res.clamped else ""
    print(f"{name:12s} ADF = {res.statistic:7.3f}  lags = {res.df_or_lags}  p = {res.p_value:.3f}{flag}")

# %%
# The embedded critical values can be checked by simulation.
print("table 5% at n=500:", np.round(df_critical_values(500)[2], 3))
print("simulated        :", np.round(simulate_df_quantile(n=500, reps=20000, prob=0.05), 3))

# %%
# Ljung-Box on noise and on an AR(1) series.
ar = np.zeros(2000)
for t in range(1, ar.size):
    ar[t] = 0.4 * ar[t - 1] + noise[t]
for name, x in (("white noise", noise), ("AR(1) 0.4", ar)):
    res = ljung_box(x, lags=10)
    print(f"{name:12s} Q = {res.statistic:8.2f}  p = {res.p_value:.3g}")
print("first autocorrelations of AR(1):", np.round(acf(ar, 3).values, 3))

# %%
# When the series are model residuals, the fitted ARMA parameter count is
# taken off the degrees of freedom: 10 lags with 7 parameters leave 3.
print("P(chi2_3 > 35.161) =", chi_square_sf(35.161, 3))
