"""
Error over time after a single fit
==================================

One model trained in March is left running through the summer. Errors
climb once temperatures leave the range seen in training, and more so in
the store with the hotter summer. The second half trains on the first 180
and 360 days and tracks the error over the rest of the series.
"""

from datetime import date

import numpy as np

from storebaseline.evaluation import error_timeline, long_term_run
from storebaseline.features import engineer_features
from storebaseline.ingest import resample_daily, resample_hourly
from storebaseline.models import ModelSpec, RFParams
from storebaseline.synth import generate, profile_config


def load(name, **kw):
    days = resample_daily(resample_hourly(generate(profile_config(name, level_walk_sd_kwh=2.0, **kw)).readings))
    return engineer_features(days, name)


for name in ("aveiro", "macedo"):
    data = load(name, start_date=date(2016, 1, 1), n_days=430)
    tl = error_timeline(data, ModelSpec("MLR"), date(2016, 3, 1), 30)
    print(name, " ".join(f"{p.mae:.2f}" for p in tl[:20]))

data = load("macedo", n_days=541)
specs = [ModelSpec("MLR"), ModelSpec("RF", rf=RFParams(n_trees=50))]
for days in (180, 360):
    timelines = long_term_run(data, specs, days)
    for label, tl in timelines.items():
        tail = [p.mae for p in tl if p.block_start_date >= data.first_date.replace(year=data.first_date.year + 1)]
        print(f"{days}d {label}: {len(tl)} blocks, mean MAE over the final months {np.mean(tail):.3f}")
