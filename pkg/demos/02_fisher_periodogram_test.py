# %% [markdown]
# # Testing periodogram peaks
#
# For Gaussian white noise the periodogram ordinates at the Fourier
# frequencies are independent multiples of exponentials.  Normalised by their
# sum they are distributed like uniform spacings, so the largest normalised
# ordinate g has null tail P(max spacing > g).  More generally, "at least ell
# ordinates exceed x" has p-value `tail_pvalue(n, ell, x)`.

# %%
import numpy as np

from spacings import max_gap_survival, quantile, tail_pvalue

rng = np.random.default_rng(2024)
N = 101
t = np.arange(N)


def normalised_periodogram(y):
    f = np.fft.rfft(y - y.mean())
    power = np.abs(f[1 : (N - 1) // 2 + 1]) ** 2
    return power / power.sum()


# %% [markdown]
# Noise alone, then noise plus a weak sinusoid at frequency 12/N.

# %%
noise = rng.standard_normal(N)
signal = noise + 0.6 * np.sin(2 * np.pi * 12 * t / N)

for label, y in [("noise", noise), ("signal", signal)]:
    r = normalised_periodogram(y)
    q = len(r)  # number of ordinates; spacings of n = q - 1 points
    g = r.max()
    p = max_gap_survival(q - 1, float(g))
    print(f"{label:6s} q={q} g={g:.4f} p-value={p.value:.3g}")

# %% [markdown]
# Critical value of the max-ordinate test at the 5% level, and a check of a
# multiple-peak alternative: how surprising are three ordinates above 0.08?

# %%
q = (N - 1) // 2
crit = quantile(q - 1, q, 0.05)
print(f"5% critical value for g with {q} ordinates: {crit.value:.6f}")

r = normalised_periodogram(signal)
x = 0.08
ell = int((r > x).sum())
print(f"{ell} ordinates exceed {x}")
if ell >= 1:
    print("p-value for at least that many:", f"{tail_pvalue(q - 1, ell, x).value:.3g}")
