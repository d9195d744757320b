# %% [markdown]
# # Scale-truncated square sums
#
# For every dyadic cube `Q` the flatness `beta(Q)` is half the width of
# the narrowest strip holding `E ∩ Q`, divided by the diameter of `Q`.
# The truncated sum discounts each term by `r/|Q|`, so cubes smaller
# than about `r` drop out entirely.

# %%
import numpy as np

from mdpcurve import classical_jones_sum, generators, truncated_square_sum

E = generators.koch(3)
rep = truncated_square_sum(E, 0.05, "3Q")
print(f"total {rep.total:.6f}, scales {rep.n_top}..{rep.n_bottom}")
for n, partial, ncubes in rep.per_scale:
    if partial > 0:
        print(f"  n={n:3d}  cubes={ncubes:4d}  contribution={partial:.6f}")

# %% [markdown]
# Coarse scales are cut where the remaining geometric tail falls below
# `eps_top`. The tail estimate is reported alongside the total.

# %%
print("upward tail bound", rep.upward_truncation_bound)

# %% [markdown]
# Shrinking `r` can only add mass. At `r → 0` the sum approaches the
# classical Jones sum, which stops at the scale where every triple holds
# at most two points.

# %%
classical = classical_jones_sum(E).total
for k in range(1, 8):
    r = 2.0 ** -k
    q = truncated_square_sum(E, r, "Q").total
    t = truncated_square_sum(E, r, "3Q").total
    print(f"r=2^-{k}:  Q {q:.5f}   3Q {t:.5f}   classical {classical:.5f}")

# %% [markdown]
# Random clouds are far from flat at every scale, so the sum is large
# next to their diameter.

# %%
for seed in range(3):
    P = generators.random_uniform(200, seed)
    print(seed, round(truncated_square_sum(P, 0.05).total, 4))
