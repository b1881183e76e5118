# %% [markdown]
# # Exact distributions of the ordered spacings
#
# Drop n uniform points on [0, 1].  They cut the interval into n+1 spacings.
# `survival(n, k, x)` is the probability that the k-th smallest spacing
# exceeds x.  Rational inputs give exact answers.

# %%
from fractions import Fraction

from spacings import band_probability, cdf, max_gap_survival, survival, tail_pvalue

# %%
print("P(largest of 3 spacings > 1/2) =", survival(2, 3, "1/2").value)
print("P(smallest of 2 spacings <= 1/4) =", cdf(1, 1, "1/4").value)

# %% [markdown]
# The distribution of every ordered spacing, on a grid, for n = 4.

# %%
n = 4
xs = [Fraction(i, 10) for i in range(0, 6)]
print("x     " + "  ".join(f"k={k:<8d}" for k in range(1, n + 2)))
for x in xs:
    row = "  ".join(f"{float(survival(n, k, x).value):<10.6f}" for k in range(1, n + 2))
    print(f"{str(x):5s} {row}")

# %% [markdown]
# Counting exceedances: "exactly m spacings exceed x" sums to one over m,
# and "at least ell exceed x" is a tail p-value.

# %%
x = Fraction(3, 20)
bands = [band_probability(n, m, x).value for m in range(n + 2)]
print("P(exactly m exceed 0.15):", [str(b) for b in bands], "sum =", sum(bands))
print("P(at least 3 exceed 0.15) =", tail_pvalue(n, 3, x).value)

# %% [markdown]
# Fisher's classical formula for the largest spacing is the k = n+1 case.

# %%
for n in (2, 5, 10):
    assert max_gap_survival(n, "0.3").value == survival(n, n + 1, "0.3").value
print("max-gap formula agrees with the general survival function")

# %% [markdown]
# Floats take a fast path with an error bound.  When the alternating sum
# cancels too badly the value is recomputed exactly and flagged.

# %%
fast = survival(10, 4, 0.05)
print(fast.value, "+/-", fast.error, "mode:", fast.mode)
hard = survival(50, 25, 0.01)
print(hard.value, "mode:", hard.mode, "condition:", f"{hard.condition:.2e}")
