# %% [markdown]
# # Small cases: two points and a line
#
# With two points at distance `d` and radius `r < d/2`, the shortest
# covering curve is a segment of length `d - 2r`. The lower bound
# `|E| - 2r + sum` reproduces that value exactly, because no cube
# sees anything but a line.

# %%
import numpy as np

from mdpcurve import evaluate_bounds, lower_bound, truncated_square_sum

E = np.array([[0.0, 0.0], [1.0, 0.0]])
rep = evaluate_bounds(E, 0.2)
print("lower bound ", rep.lower)
print("curve length", rep.curve_length)
print("failed checks", rep.failed())

# %% [markdown]
# The constructed curve is the full segment (length 1, not 0.6). The
# root hull is already flat, so it is kept whole and nothing is trimmed.

# %%
for r in (0.1, 0.3, 0.49, 0.6):
    print(f"r={r:<4}  lower={lower_bound(E, r):+.3f}")

# %% [markdown]
# Once `2r` exceeds the diameter the bound goes negative and a single
# point covers everything.
#
# Collinear sets behave the same way at any density. Every strip has
# width zero, so both square sums vanish identically.

# %%
t = np.linspace(0.0, 1.0, 100)
line = np.stack([0.1 + 0.6 * t, 0.2 + 0.8 * t], axis=1)
for variant in ("Q", "3Q"):
    print(variant, truncated_square_sum(line, 0.1, variant).total)
rep = evaluate_bounds(line, 0.1)
print("length", rep.curve_length, "lower", rep.lower)
