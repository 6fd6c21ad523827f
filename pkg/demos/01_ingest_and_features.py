"""
From meter readings to a daily design matrix
============================================

A synthetic store is written to disk as 15-minute readings, knocked about a
little (a dropped afternoon, a repeated timestamp), then read back through
the ingest pipeline and turned into the 20-column feature matrix.
"""

import io
import warnings

from storebaseline import ingest, synth
from storebaseline.features import ENCODED_COLUMNS, encode, engineer_features

store = synth.generate(synth.profile_config("aveiro", n_days=21, seed=1))
print(len(store.readings), "readings for", len(store.truth), "days")

# Drop six hours on day 10 so that one day fails the coverage rules.
hole = store.readings[9 * 96 + 48 : 9 * 96 + 72]
readings = [r for r in store.readings if r not in hole]
readings.insert(5, readings[5])

buf = io.StringIO()
synth.write_readings_csv(readings, buf)

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    days = ingest.ingest(buf.getvalue())
for w in caught:
    print("warning:", w.message)

for d in days[7:12]:
    print(d.date, f"{d.energy_kwh:8.1f} kWh", f"{d.temp_min:5.1f} .. {d.temp_max:5.1f} C", "complete" if d.complete else "INCOMPLETE")

# The first day (no yesterday), the incomplete day and the day after it
# (whose lag features would come from the broken day) drop out.
data = engineer_features(days, "aveiro")
X, y = encode(data)
print(X.shape, "design matrix;", len(days) - len(data), "days dropped")
print(dict(zip(ENCODED_COLUMNS, X[0].round(2).tolist())))
