"""
Learning curves over sliding windows
====================================

How much history does each learner need? Three synthetic stores with
different climates are evaluated on the 10..180 day grid, six windows per
store, so every point is a mean over 18 train/test iterations.
"""

import os
import warnings

from storebaseline.evaluation import best_point, learning_curve
from storebaseline.models import ANNParams, ModelSpec, RankDeficientWarning, RFParams
from storebaseline.synth import generate, profile_config
from storebaseline.features import engineer_features
from storebaseline.ingest import resample_daily, resample_hourly


def load(name):
    cfg = profile_config(name, n_days=511, level_walk_sd_kwh=2.0, seed=0)
    days = resample_daily(resample_hourly(generate(cfg).readings))
    return engineer_features(days, name)


stores = [load(name) for name in ("aveiro", "fatima", "macedo")]

# Smaller forests and shorter training than the defaults keep this quick.
specs = [
    ModelSpec("MLR"),
    ModelSpec("RF", rf=RFParams(n_trees=30)),
    ModelSpec("ANN", ann=ANNParams(epochs=1500, learning_rate=0.05)),
]
# At 10 days the linear model has more columns than rows and falls back to
# the least-norm solution, which it announces with a warning.
warnings.simplefilter("ignore", RankDeficientWarning)
curves = learning_curve(stores, specs, range(10, 181, 10), workers=os.cpu_count() or 1)

print("days   " + "".join(f"{s.label:>8}" for s in specs))
for row in zip(*(curves[s.label] for s in specs)):
    print(f"{row[0].train_size_days:4d}   " + "".join(f"{p.mae_mean:8.3f}" for p in row))

label, point = best_point(curves)
print(f"\nbest: {label} with {point.train_size_days} days, MAE {point.mae_mean:.3f} "
      f"(standardized units) from {point.n_iterations} iterations")
