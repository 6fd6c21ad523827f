"""
Savings from a retrofit
=======================

A winter retrofit removes 15% of consumption. A 30-day baseline fitted
before the work predicts what the store would have used; the gap between
that prediction and the meter is the saving.
"""

from datetime import date

from storebaseline.features import engineer_features
from storebaseline.ingest import resample_daily, resample_hourly
from storebaseline.savings import estimate_savings
from storebaseline.synth import generate, profile_config

retrofit = date(2017, 2, 1)
for reduction in (0.0, 0.15):
    cfg = profile_config("macedo", start_date=date(2016, 5, 16), n_days=366, noise_sd_kwh=30.0,
                         retrofit_date=retrofit, retrofit_reduction_pct=reduction, seed=2)
    data = engineer_features(resample_daily(resample_hourly(generate(cfg).readings)))
    report = estimate_savings(data, retrofit)
    print(f"injected {reduction:.0%}: estimated {report.savings_pct:5.2f}% "
          f"({report.savings_kwh:8.0f} kWh over {len(report.post_days)} days); "
          f"training {report.train_start}..{report.train_end}, "
          f"gap MAE {report.pre_period_mae:.1f} vs training {report.train_mae:.1f} kWh"
          + (" UNRELIABLE" if report.unreliable else ""))

for d in report.daily[15:25]:
    marker = "post" if d.post_retrofit else "    "
    print(d.date, marker, f"{d.predicted_kwh:7.1f} {d.observed_kwh:7.1f}")
