import json
import math

import numpy as np
import pytest

from workfringe.dataset import SCHEMA_VERSION, Dataset, format_number


# ---------- helpers ------------------------------------------------
def sample() -> Dataset:
    return Dataset(
        "bounds",
        ["beta", "steps", "B2", "passed"],
        [(0.5, 7, 1.25, True), (2.0, None, math.inf, False)],
    )


# =================================================================
#                     Ф О Р М А Т  Ч И С Е Л
# =================================================================
@pytest.mark.parametrize(
    "value, expected",
    [
        (None, "continuous"),
        (True, "true"),
        (False, "false"),
        (7, "7"),
        (np.int64(56), "56"),
        (2.0, "2"),
        (0.5, "0.5"),
        (0.1, "0.10000000000000001"),  # 17 значащих цифр
        (2.0**-30, "9.3132257461547852e-10"),
        (np.float64(0.25), "0.25"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        ("custom", "custom"),
    ],
)
def test_format_number(value, expected):
    assert format_number(value) == expected


def test_format_number_round_trips_floats():
    rng = np.random.default_rng(3)
    for x in rng.normal(scale=1e3, size=50):
        assert float(format_number(float(x))) == float(x)


# =================================================================
#                        Т А Б Л И Ц А
# =================================================================
def test_rows_must_match_the_header():
    with pytest.raises(ValueError, match="Row 0"):
        Dataset("workdist", ["a", "b"], [(1.0,)])

    ds = Dataset("workdist", ["a", "b"])
    ds.append((1.0, 2.0))
    with pytest.raises(ValueError, match="Row 1"):
        ds.append((1.0, 2.0, 3.0))
    assert len(ds) == 1


def test_column_access():
    ds = sample()
    assert ds.column("beta") == [0.5, 2.0]
    assert ds.column("steps") == [7, None]
    with pytest.raises(ValueError):
        ds.column("missing")


# =================================================================
#                  С Е Р И А Л И З А Ц И Я
# =================================================================
def test_csv_text():
    assert sample().to_csv() == (
        "beta,steps,B2,passed\n" "0.5,7,1.25,true\n" "2,continuous,inf,false\n"
    )


def test_json_text_is_a_versioned_object():
    data = json.loads(sample().to_json())
    assert data == {
        "schema_version": SCHEMA_VERSION,
        "command": "bounds",
        "columns": ["beta", "steps", "B2", "passed"],
        "rows": [[0.5, 7, 1.25, True], [2.0, "continuous", "inf", False]],
    }


def test_json_of_an_empty_dataset():
    data = json.loads(Dataset("verify", ["check"]).to_json())
    assert data["rows"] == []
    assert data["schema_version"] == 1


def test_json_numbers_carry_csv_digits():
    ds = Dataset("workdist", ["p"], [(0.1,)])
    assert "[0.10000000000000001]" in ds.to_json()
    assert ds.to_csv().splitlines()[1] == "0.10000000000000001"


def test_render_dispatch():
    ds = sample()
    assert ds.render("csv") == ds.to_csv()
    assert ds.render("json") == ds.to_json()
    with pytest.raises(ValueError, match="xml"):
        ds.render("xml")


def test_write_creates_parent_directories(tmp_path):
    ds = sample()
    target = ds.write(tmp_path / "out" / "bounds.json", "json")
    assert target.exists()
    assert target.read_bytes() == ds.to_json().encode("utf-8")
