# %% [markdown]
# # Checking the method on synthetic data
#
# With known tangents we can generate measurements, run the extraction
# and see whether the truth falls inside the reported uncertainty. This
# is the main sanity check on the whole pipeline.

# %%
import numpy as np

from surfloss.core import REGIONS, ExtractionConfig, Region
from surfloss.ingest import bundled_matrix
from surfloss.qtls import all_ensemble_stats
from surfloss.reference import reference_tangents
from surfloss.sle import extract
from surfloss.synth import SynthSpec, generate

matrix = bundled_matrix("tin")
truth = reference_tangents("tin")

# %% [markdown]
# Without noise the inversion is exact to rounding.

# %%
clean = generate(SynthSpec(matrix, truth, n_per_design=5, relative_noise=0.0))
res = extract(matrix, all_ensemble_stats(clean, matrix.rows), ExtractionConfig(n_samples=100))
for r in REGIONS:
    print(f"{r.value:<3} true {truth[r]:.3g}  recovered {res.estimates[r].mean:.6g}")

# %% [markdown]
# With 5 % dispersion on 30 resonators per design, the two-sigma interval
# should cover the truth about 95 % of the time.

# %%
hits = np.zeros(4, dtype=int)
runs = 40
for seed in range(runs):
    data = generate(SynthSpec(matrix, truth, 30, 0.05, rng_seed=seed))
    res = extract(matrix, all_ensemble_stats(data, matrix.rows), ExtractionConfig(rng_seed=seed),
                  keep_samples=False)
    for r in REGIONS:
        e = res.estimates[r]
        hits[r.index] += abs(e.mean - truth[r]) <= 2 * e.std
print({r.value: f"{hits[r.index]}/{runs}" for r in REGIONS})

# %% [markdown]
# Setting a tangent to zero should make it unresolvable and produce a
# finite bound.

# %%
no_sa = dict(truth)
no_sa[Region.SA] = 0.0
data = generate(SynthSpec(matrix, no_sa, 30, 0.05, rng_seed=3))
res = extract(matrix, all_ensemble_stats(data, matrix.rows), ExtractionConfig(rng_seed=3))
print(res.estimates[Region.SA])
