# %% [markdown]
# # Upper bounds for regions lost in the noise
#
# After an HF etch the substrate-air loss of the TiN devices drops so far
# that the extracted SA tangent is statistically indistinguishable from
# zero. Reporting "mean ± std" would be misleading. Instead the library
# reports the largest SA tangent still compatible with the SA-design data.

# %%
from surfloss.bounds import is_resolvable, upper_bound
from surfloss.core import ExtractionConfig, Region, ResolvabilityRule
from surfloss.ingest import bundled_matrix
from surfloss.pipeline import run_extraction
from surfloss.reference import DISPLAY_SCALE, published_measurements

matrix = bundled_matrix("tin_hf")
run = run_extraction(matrix, published_measurements("tin_hf"), ExtractionConfig(rng_seed=1))
sa = run.estimates[Region.SA]
print(f"SA mean {sa.mean:.3g}, std {sa.std:.3g}, resolvable: {sa.resolvable}")

# %% [markdown]
# The bound takes the pessimistic measured loss of the SA design,
# `1 / (mean Q - std err)`, removes the smallest plausible contribution
# of the other three regions (`mean - 2 std`, floored at zero) and
# attributes the remainder to SA.

# %%
design = matrix.accentuating_row(Region.SA)
stats = run.stats_for(design)
bound = upper_bound(matrix, stats, run.estimates, Region.SA)
print(f"SA < {bound / DISPLAY_SCALE[Region.SA]:.2f} x 1e-3")

loose = upper_bound(matrix, stats, run.estimates, Region.SA, clamp=False)
print(f"without the zero floor: < {loose / DISPLAY_SCALE[Region.SA]:.2f} x 1e-3")

# %% [markdown]
# The resolvability rule is a policy choice. The default calls a value
# unresolvable when its two-sigma interval touches zero or its spread
# exceeds its mean. Looser rules are available.

# %%
for mean, std in [(3.3e-3, 0.4e-3), (4.6e-4, 2.4e-4), (2.7e-4, 3.0e-4)]:
    strict = is_resolvable(mean, std)
    lax = is_resolvable(mean, std, ResolvabilityRule(k_sigma=1.0, std_exceeds_mean=False))
    print(f"{mean:.2g} ± {std:.2g}: default {strict}, one-sigma {lax}")
