# %% [markdown]
# # Means and critical values
#
# The mean of the k-th smallest spacing is a difference of harmonic numbers.
# The smallest spacing averages 1/(n+1)^2; the largest about ln(n)/n.

# %%
from spacings import expected_gap, integrate_survival, mean_asymptotics, quantile

n = 9
print("k  E[G_k]            float")
for k in range(1, n + 2):
    e = expected_gap(n, k).value
    print(f"{k:<2d} {str(e):17s} {float(e):.6f}")

# %% [markdown]
# The mean also equals the integral of the survival function, which can be
# computed exactly piece by piece between its breakpoints.

# %%
assert all(integrate_survival(n, k) == expected_gap(n, k).value for k in range(1, n + 2))
print("integrals match")

# %% [markdown]
# Asymptotic forms are only rough guides.

# %%
for n, k in [(10_000, 10), (200, 50), (200, 150)]:
    a = mean_asymptotics(n, k)
    e = float(expected_gap(n, k).value)
    print(f"n={n} k={k}: exact {e:.6g}, {a.regime} approx {a.value:.6g}, rel gap {abs(a.value - e) / e:.2%}")

# %% [markdown]
# Upper-tail critical values x with P(G_k > x) = p.

# %%
n = 20
print("k   p=0.05      p=0.01")
for k in (1, 5, 10, 15, 21):
    row = [quantile(n, k, p).value for p in (0.05, 0.01)]
    print(f"{k:<3d} {row[0]:.8f}  {row[1]:.8f}")
