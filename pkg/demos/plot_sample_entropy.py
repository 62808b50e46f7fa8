"""
Sample entropy of regular and irregular signals
================================================

Sample entropy is the negative log of the probability that two stretches of
a series that agree for ``m`` points (within a tolerance ``r``) still agree
at the next point.  Repeating patterns give values near zero, noise gives
large values.
"""

import numpy as np

from entrovol import Absolute, RelativeToStd, SampEnParams, count_matches, sample_entropy

rng = np.random.default_rng(1)

# %%
# A perfectly periodic series: every template has a partner of the same
# phase, and those partners keep matching one point later.
periodic = np.tile([1.0, 2.0], 5)
print(count_matches(periodic, m=2, r=0.5))
print("periodic:", sample_entropy(periodic, SampEnParams(2, Absolute(0.5))).value)

# %%
# A sine wave, a noisy sine wave and white noise, all with the default rule
# (m = 2, r = 0.2 times the window's sample standard deviation).
t = np.linspace(0, 20 * np.pi, 500)
signals = {
    "sine": np.sin(t),
    "noisy sine": np.sin(t) + rng.normal(0, 0.3, t.size),
    "white noise": rng.normal(size=t.size),
}
for name, x in signals.items():
    print(f"{name:12s} {sample_entropy(x).value:.3f}")

# %%
# The tolerance matters.  A wider ball admits more matches at both lengths;
# the ratio, and so the entropy, usually falls.
x = signals["noisy sine"]
for fraction in (0.1, 0.2, 0.3, 0.5):
    res = sample_entropy(x, SampEnParams(2, RelativeToStd(fraction)))
    print(f"r = {fraction:.1f} std   B = {res.counts.b_pairs:6d}   A = {res.counts.a_pairs:6d}   SampEn = {res.value:.3f}")

# %%
# With too small a tolerance no template pair matches at length m + 1 and
# the value is undefined rather than infinite.
print("tiny r:", sample_entropy(rng.normal(size=30), SampEnParams(2, Absolute(1e-6))).value)
