import io
import json

import numpy as np
import pytest

from whirl_lab import io as wio
from whirl_lab.constructor import example_legendre_helix, example_non_legendre
from whirl_lab.errors import ParseError
from whirl_lab.frames import frenet_apparatus
from whirl_lab.whirl import assess


def _csv(series, frames=None):
    buf = io.StringIO()
    wio.write_csv(buf, wio.series_columns(series, frames))
    return buf.getvalue()


def test_header_and_column_order():
    text = _csv(example_legendre_helix(step=1e-2))
    header = text.splitlines()[0].split(",")
    assert header[:12] == ["s", "x", "y", "z", "a", "b", "v", "kappa", "tau",
                           "eta_T", "eta_N", "eta_B"]
    assert tuple(header) == wio.DATASET_COLUMNS


@pytest.mark.parametrize("value", [0.1, 1 / 3, np.pi, -2.5e-300, 1e300, 5e-324])
def test_17_digit_round_trip(value):
    assert float(wio.fmt(value)) == value


def test_csv_round_trip_is_bit_exact():
    series = example_non_legendre(step=1e-3)
    frames = frenet_apparatus(series)
    back = wio.read_csv_series(io.StringIO(_csv(series, frames)))
    for name in ("s", "p", "T", "dT", "u", "du"):
        np.testing.assert_array_equal(getattr(back, name), getattr(series, name))
    assert assess(back, frenet_apparatus(back)).to_dict() == assess(series, frames).to_dict()


def test_json_round_trip_uses_meta_source():
    series = example_legendre_helix(step=1e-2)
    doc = wio.dumps_json({"source": "analytic"}, wio.series_columns(series))
    assert json.loads(doc)["data"]["kappa"][0] is None
    back = wio.read_json_series(io.StringIO(doc))
    assert back.source == "analytic"
    np.testing.assert_array_equal(back.p, series.p)


def test_nan_frenet_columns_in_csv():
    text = _csv(example_legendre_helix(step=1e-2))
    row = text.splitlines()[1].split(",")
    assert row[7] == "nan"


def test_parse_error_reports_row_and_column():
    text = _csv(example_legendre_helix(step=1e-2)).splitlines()
    fields = text[3].split(",")
    fields[2] = "oops"
    text[3] = ",".join(fields)
    with pytest.raises(ParseError, match=r"row 4, column 'y'"):
        wio.read_csv_series(io.StringIO("\n".join(text)))


def test_parse_errors_misc():
    with pytest.raises(ParseError, match="empty"):
        wio.read_csv_series(io.StringIO(""))
    with pytest.raises(ParseError, match="missing required column"):
        wio.read_csv_series(io.StringIO("s,x,y\n0,0,0\n"))
    with pytest.raises(ParseError, match="row 3: expected"):
        wio.read_csv_series(io.StringIO("s,x,y,z\n0,0,0,0\n1,0,0\n"))
    with pytest.raises(ParseError, match="non-finite"):
        wio.read_csv_series(io.StringIO("s,x,y,z\n0,0,0,nan\n"))
    with pytest.raises(ParseError, match="line 1"):
        wio.read_json_series(io.StringIO("{nope"))
    with pytest.raises(ParseError):
        wio.read_csv_series(io.StringIO("s,x,y,z\n0,0,0,0\n1,0,0,0\n3,0,0,0\n"))


def test_report_csv_flattening():
    buf = io.StringIO()
    wio.write_report(buf, {"seed": 1}, {"a": [1.5, None], "b": {"c": True}}, "csv")
    lines = buf.getvalue().splitlines()
    assert lines[0] == "key,value"
    assert "data.a[0],1.5" in lines and "data.a[1]," in lines and "data.b.c,True" in lines
