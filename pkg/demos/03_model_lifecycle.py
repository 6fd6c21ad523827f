"""
Fit, predict, save, load
========================

The three learners share one contract. Here each one is trained on two
months of a synthetic store, scored on the following month, written to
JSON and read back.
"""

import io
from datetime import date

import numpy as np

from storebaseline.evaluation import mae
from storebaseline.features import encode, engineer_features
from storebaseline.ingest import resample_daily, resample_hourly
from storebaseline.models import ModelSpec, fit, load_model, mlr_oracle, predict, save_model
from storebaseline.synth import generate, profile_config

days = resample_daily(resample_hourly(generate(profile_config("fatima", n_days=120, seed=3)).readings))
data = engineer_features(days, "fatima")
train = data.between(date(2016, 1, 8), date(2016, 3, 7))
test = data.between(date(2016, 3, 8), date(2016, 4, 7))
X, y = encode(train)
Xt, yt = encode(test)

for kind in ("MLR", "RF", "ANN"):
    model = fit(ModelSpec(kind, seed=7), X, y, period=(train.first_date, train.last_date), layout=data.layout)
    kwh, std = predict(model, Xt)
    buf = io.StringIO()
    save_model(model, buf)
    again, _ = predict(load_model(io.StringIO(buf.getvalue())), Xt)
    print(f"{kind}: test MAE {mae(kwh, yt):7.2f} kWh, {mae(std, model.scaler.transform_target(yt)):.3f} std units;"
          f" {len(buf.getvalue()) // 1024} KiB JSON; reload identical: {np.array_equal(kwh, again)}")

# The fitted linear model agrees with a plain pseudo-inverse solve on
# numeric-only data.
rng = np.random.default_rng(0)
A = rng.normal(size=(40, 5))
b = A @ [1.0, -2.0, 0.5, 0.0, 3.0] + 10 + rng.normal(scale=0.1, size=40)
print(fit(ModelSpec("MLR"), A, b).coefficients_raw().round(4))
print(mlr_oracle(A, b).round(4))
