import warnings
from datetime import date, datetime, timedelta

import pytest

from storebaseline.features import engineer_features
from storebaseline.ingest import RawReading, resample_daily, resample_hourly
from storebaseline.synth import SynthConfig, generate, profile_config


def build_dataset(cfg: SynthConfig, store_id: str = "synthetic"):
    store = generate(cfg)
    return engineer_features(resample_daily(resample_hourly(store.readings)), store_id)


def quarter_hour_readings(start: datetime, n: int, energy=0.25, temp=10.0):
    return [RawReading(start + timedelta(minutes=15 * i), energy, temp) for i in range(n)]


@pytest.fixture(scope="session")
def aveiro_510():
    return build_dataset(profile_config("aveiro", seed=7), "aveiro")


@pytest.fixture(scope="session")
def short_store():
    return build_dataset(SynthConfig(n_days=120, start_date=date(2016, 3, 1), seed=3), "short")


@pytest.fixture(autouse=True)
def _quiet_numeric_warnings():
    from storebaseline.models import ConstantColumnWarning, RankDeficientWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficientWarning)
        warnings.simplefilter("ignore", ConstantColumnWarning)
        yield


def daily_dataset(n_rows: int, start: date = date(2016, 1, 1), seed: int = 0, store_id: str = "daily"):
    """Feature dataset with ``n_rows`` consecutive days built straight from daily records."""
    import numpy as np

    from storebaseline.ingest import DailyRecord

    rng = np.random.default_rng(seed)
    days = []
    for k in range(n_rows + 1):
        mean = 15 + 6 * np.sin(k / 58) + rng.normal(0, 2)
        spread = rng.uniform(2, 8)
        energy = 1500 + 40 * mean + rng.normal(0, 15)
        days.append(DailyRecord(start + timedelta(days=k), float(energy), mean + spread / 2, float(mean), mean - spread / 2, True))
    return engineer_features(days, store_id)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
