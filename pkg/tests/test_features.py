import io
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from storebaseline.features import (
    ENCODED_COLUMNS,
    FEATURE_CSV_HEADER,
    FEATURE_LAYOUT,
    Dataset,
    InsufficientDataError,
    decode_categoricals,
    encode,
    engineer_features,
    week_of_month,
    write_features_csv,
)
from storebaseline.ingest import DailyRecord


def _day(d, tmin=10.0, tmax=18.0, energy=100.0, complete=True):
    return DailyRecord(d, energy, tmax, (tmin + tmax) / 2, tmin, complete)


def test_calendar_monday_first_week():
    data = engineer_features([_day(date(2016, 3, 6)), _day(date(2016, 3, 7))])
    (row,) = data.rows
    assert row.date == date(2016, 3, 7)
    assert (row.weekday, row.week_of_month, row.workday) == (1, 1, 1)


def test_week_of_month_clamped():
    assert week_of_month(date(2016, 3, 31)) == 4
    assert week_of_month(date(2016, 3, 28)) == 4
    assert week_of_month(date(2016, 3, 8)) == 2


def test_weekend_is_not_workday():
    data = engineer_features([_day(date(2016, 3, 11) + timedelta(days=k)) for k in range(3)])
    assert [(r.weekday, r.workday) for r in data.rows] == [(6, 0), (7, 0)]


def test_amplitudes_and_lags():
    data = engineer_features([_day(date(2016, 3, 6), 5, 9), _day(date(2016, 3, 7), 10, 18, energy=321.0)])
    (row,) = data.rows
    assert row.temp_amplitude == 8 and row.temp_amplitude_y == 4
    assert (row.temp_max_y, row.temp_min_y, row.temp_mean_y) == (9, 5, 7)
    assert row.target_kwh == 321.0


def test_insufficient_data():
    with pytest.raises(InsufficientDataError, match="insufficient data for lag features"):
        engineer_features([_day(date(2016, 3, 6)), _day(date(2016, 3, 8))])
    with pytest.raises(InsufficientDataError):
        engineer_features([_day(date(2016, 3, 6)), _day(date(2016, 3, 7), complete=False)])


def test_encode_shape_and_blocks():
    days = [_day(date(2016, 3, 1) + timedelta(days=k)) for k in range(40)]
    data = engineer_features(days)
    X, y = encode(data)
    assert X.shape == (39, 20) and y.shape == (39,)
    assert tuple(data.feature_names) == ENCODED_COLUMNS
    assert np.all(X[:, :11].sum(axis=1) == 2)
    assert np.all(X[:, :7].sum(axis=1) == 1)


def test_weekday_three_position():
    # 2016-03-09 is a Wednesday
    data = engineer_features([_day(date(2016, 3, 8)), _day(date(2016, 3, 9))])
    X, _ = encode(data)
    assert list(X[0, :7]) == [0, 0, 1, 0, 0, 0, 0]


def test_layout_marks_exact_collinearities():
    assert FEATURE_LAYOUT.n_columns == 20
    names = [ENCODED_COLUMNS[i] for i in FEATURE_LAYOUT.redundant]
    assert set(names) == {"workday", "temp_amplitude", "temp_amplitude_y"}
    data = engineer_features([_day(date(2016, 3, 1) + timedelta(days=k), tmin=k % 5, tmax=10 + k % 7) for k in range(30)])
    X, _ = encode(data)
    col = {c: i for i, c in enumerate(ENCODED_COLUMNS)}
    np.testing.assert_array_equal(X[:, col["workday"]], X[:, :5].sum(axis=1))
    np.testing.assert_allclose(X[:, col["temp_amplitude"]], X[:, col["temp_max"]] - X[:, col["temp_min"]])


def test_dataset_rejects_unsorted_rows():
    data = engineer_features([_day(date(2016, 3, 1) + timedelta(days=k)) for k in range(4)])
    with pytest.raises(ValueError):
        Dataset("x", (data.rows[1], data.rows[0]))


def test_feature_csv_header():
    data = engineer_features([_day(date(2016, 3, 6)), _day(date(2016, 3, 7))])
    buf = io.StringIO()
    write_features_csv(data, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(FEATURE_CSV_HEADER)
    assert lines[1].startswith("2016-03-07,1,1,1,18.0,14.0,10.0,8.0,")


@settings(max_examples=60, deadline=None)
@given(
    start=st.dates(min_value=date(2000, 1, 1), max_value=date(2030, 1, 1)),
    flags=st.lists(st.booleans(), min_size=2, max_size=60),
    amps=st.lists(st.floats(0, 15, allow_nan=False), min_size=1, max_size=10),
)
def test_row_presence_roundtrip_and_amplitude(start, flags, amps):
    days = [
        _day(start + timedelta(days=k), tmin=0.0, tmax=amps[k % len(amps)], complete=f)
        for k, f in enumerate(flags)
    ]
    complete = {d.date for d in days if d.complete}
    try:
        data = engineer_features(days)
    except InsufficientDataError:
        assert not any(d in complete and d - timedelta(days=1) in complete for d in complete)
        return
    expected = sorted(d for d in complete if d - timedelta(days=1) in complete)
    assert data.dates == expected
    X, _ = encode(data)
    for row, x in zip(data.rows, X):
        assert decode_categoricals(x) == (row.weekday, row.week_of_month)
        assert row.temp_amplitude >= 0 and row.temp_amplitude_y >= 0
