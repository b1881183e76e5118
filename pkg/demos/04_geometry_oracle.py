# %% [markdown]
# # An independent geometric oracle
#
# The first n spacings are uniform on the simplex {z > 0, sum z < 1} with
# density n!.  Requiring some spacings to be at most x, the rest above x, and
# bounding their sum carves a box out of a half-space.  Box volumes come from
# an inclusion-exclusion sum over the box's 2^n corners.

# %%
from fractions import Fraction

from spacings import (
    Box,
    HalfSpace,
    band_probability,
    box_halfspace_volume,
    joint_exceedance,
    oracle_band_probability,
    oracle_joint_exceedance,
)

print(box_halfspace_volume(Box((0, 0), (1, 1)), HalfSpace((1, 1), 1)))
print(box_halfspace_volume(Box(("1/4", "1/4"), (1, 1)), HalfSpace((1, 1), 1)))
print(box_halfspace_volume(Box([0] * 3, [1] * 3), HalfSpace((1, 2, 3), 2)))

# %% [markdown]
# Oracle values agree with the closed forms as exact rationals.

# %%
checked = 0
for n in range(1, 7):
    for i in range(1, 20):
        x = Fraction(i, 20)
        for j in range(n + 1):
            assert oracle_joint_exceedance(n, j, x, 1) == joint_exceedance(n, j, x, 1).value
            checked += 1
        for m in range(n + 2):
            assert oracle_band_probability(n, m, x) == band_probability(n, m, x).value
            checked += 1
print(f"{checked} identities verified")
