import json
import math

import numpy as np
import pytest

from workfringe import ConfigMaker
from workfringe.core import GridPoint, Preparation, Scheme
from workfringe.core.config import REFERENCE_TAU
from workfringe.core.errors import ConfigError


# ---------- helpers ------------------------------------------------
def base(**overrides) -> dict:
    data = {"protocol": {"omega_over_Omega": 1.5, "steps": 7}, "beta": 1.2}
    data.update(overrides)
    return data


IDENTITY_STEP = {"matrix": [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]], "dt": 0.5}


# =================================================================
#                    Б А З О В А Я  С Б О Р К А
# =================================================================
def test_defaults():
    cfg = ConfigMaker.from_mapping(base())
    assert cfg.PREPARATION is Preparation.THERMAL
    assert cfg.SCHEME is Scheme.SPLIT
    assert cfg.FORMAT == "csv"
    assert cfg.OUTPUT is None and cfg.THREADS is None
    assert cfg.PROTOCOL == {
        "mode": "discrete",
        "tau": REFERENCE_TAU,
        "dimension": 2,
        "omega_over_Omega": 1.5,
        "steps": 7,
    }
    assert cfg.grid() == [GridPoint(1.2, 1.5, 7)]


def test_continuous_mode_is_inferred_without_steps():
    cfg = ConfigMaker.from_mapping(base(protocol={"omega_over_Omega": 3.0}))
    assert cfg.is_continuous
    assert cfg.grid() == [GridPoint(1.2, 3.0, None)]


def test_inverse_velocity_is_inverted():
    cfg = ConfigMaker.from_mapping(base(protocol={"Omega_over_omega": 4.0, "steps": 2}))
    assert cfg.PROTOCOL["omega_over_Omega"] == 0.25


def test_make_matches_from_mapping():
    cfg = ConfigMaker.make(omega_over_Omega=1.5, steps=7, beta=1.2, scheme="full", threads=2)
    assert cfg.SCHEME is Scheme.FULL
    assert cfg.THREADS == 2
    assert cfg.grid() == ConfigMaker.from_mapping(base()).grid()


def test_from_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(base(format="json", output="x.json")), encoding="utf-8")
    cfg = ConfigMaker.from_file(path)
    assert cfg.FORMAT == "json"
    assert cfg.OUTPUT == "x.json"


# =================================================================
#                          С В И П Ы
# =================================================================
def test_sweep_grid_order():
    cfg = ConfigMaker.from_mapping(
        {
            "protocol": {"mode": "discrete"},
            "sweep": {"beta": [0.5, 2.0], "omega_over_Omega": [1.5, 3.0], "steps": [7, 14]},
        }
    )
    grid = cfg.grid()
    assert len(grid) == 8
    assert grid[0] == GridPoint(0.5, 1.5, 7)
    assert grid[1] == GridPoint(0.5, 1.5, 14)
    assert grid[-1] == GridPoint(2.0, 3.0, 14)


def test_swept_inverse_velocity():
    cfg = ConfigMaker.make(beta=1.0, sweep={"Omega_over_omega": [2.0, 0.5]})
    assert cfg.axis("omega_over_Omega") == [0.5, 2.0]
    assert cfg.is_continuous


@pytest.mark.parametrize(
    "data, message",
    [
        (base(sweep={"beta": []}), "empty"),
        (base(sweep={"beta": 1.0}), "must be a list"),
        ({"protocol": {"omega_over_Omega": 1.0}, "beta": 1.0, "sweep": {"beta": [1.0]}}, "both"),
        (base(sweep={"steps": [1, 2]}), "both in protocol and sweep"),
        (base(sweep={"omega_over_Omega": [1.0]}), "exactly one"),
        (base(sweep={"tau": [1.0]}), "Unknown sweep"),
    ],
)
def test_bad_sweeps(data, message):
    with pytest.raises(ConfigError, match=message):
        ConfigMaker.from_mapping(data)


# =================================================================
#              С Х Е М А  Р А С П И С А Н И Я
# =================================================================
def test_custom_schedule_nested_and_flat_matrices():
    flat = {"matrix": [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0], "dt": 0.25}
    cfg = ConfigMaker.from_mapping({"protocol": {"schedule": [IDENTITY_STEP, flat]}, "beta": 0.7})
    assert cfg.is_custom
    assert cfg.PROTOCOL["dimension"] == 3
    assert cfg.PROTOCOL["tau"] == pytest.approx(0.75)
    matrices = [m for m, _ in cfg.PROTOCOL["schedule"]]
    assert all(m.shape == (3, 3) for m in matrices)
    np.testing.assert_array_equal(matrices[1], np.array(flat["matrix"]).reshape(3, 3))
    with pytest.raises(ConfigError, match="no omega_over_Omega"):
        cfg.grid()


@pytest.mark.parametrize(
    "schedule, message",
    [
        ([], "non-empty"),
        ([{"matrix": [[1.0]]}], "exactly the keys"),
        ([{"matrix": [1.0, 2.0, 3.0], "dt": 1.0}], "not a square"),
        ([{"matrix": [["a", "b"], ["c", "d"]], "dt": 1.0}], "not real"),
        ([{"matrix": [[math.inf, 0.0], [0.0, 1.0]], "dt": 1.0}], "non-finite"),
        ([{"matrix": [[1.0, 0.0], [0.0, 1.0]], "dt": 0.0}], "> 0"),
        ([{"matrix": [[1.0, 0.0], [0.0, 1.0]], "dt": 1.0}, IDENTITY_STEP], "expected 2x2"),
    ],
)
def test_bad_custom_schedules(schedule, message):
    with pytest.raises(ConfigError, match=message):
        ConfigMaker.from_mapping({"protocol": {"schedule": schedule}, "beta": 1.0})


def test_custom_schedule_rejects_rotation_keys():
    with pytest.raises(ConfigError, match="cannot be combined"):
        ConfigMaker.from_mapping(
            {"protocol": {"schedule": [IDENTITY_STEP], "steps": 3}, "beta": 1.0}
        )


def test_custom_schedule_declared_dimension_must_match():
    with pytest.raises(ConfigError, match="expected 2x2"):
        ConfigMaker.from_mapping(
            {"protocol": {"schedule": [IDENTITY_STEP], "dimension": 2}, "beta": 1.0}
        )


# =================================================================
#                  В А Л И Д А Ц И Я  П О Л Е Й
# =================================================================
def test_pure_preparation_needs_indices():
    cfg = ConfigMaker.from_mapping(base(preparation="pure", indices=[0, 1]))
    assert cfg.INDICES == (0, 1)
    with pytest.raises(ConfigError, match="indices"):
        ConfigMaker.from_mapping(base(preparation="pure"))
    with pytest.raises(ConfigError, match="out of range"):
        ConfigMaker.from_mapping(base(preparation="pure", indices=[0, 2]))
    with pytest.raises(ConfigError, match="non-negative"):
        ConfigMaker.from_mapping(base(preparation="pure", indices=[True, 0]))
    with pytest.raises(ConfigError, match="only apply"):
        ConfigMaker.from_mapping(base(indices=[0, 1]))


@pytest.mark.parametrize(
    "data, message",
    [
        ([], "must be an object"),
        ({"beta": 1.0}, "protocol"),
        (base(colour="red"), "Unknown config"),
        (base(protocol={"omega_over_Omega": 1.0, "speed": 2}), "Unknown protocol"),
        (base(beta=0.0), "> 0"),
        (base(beta=-1.0), "> 0"),
        (base(beta=math.nan), "> 0"),
        (base(beta="hot"), "must be a number"),
        (base(beta=True), "must be a number"),
        ({"protocol": {"omega_over_Omega": 1.0}}, "needs beta"),
        (base(protocol={"steps": 7}), "exactly one"),
        (base(protocol={"omega_over_Omega": 1.0, "Omega_over_omega": 1.0}), "exactly one"),
        (base(protocol={"omega_over_Omega": 1.0, "steps": 0}), ">= 1"),
        (base(protocol={"omega_over_Omega": 1.0, "steps": 2.5}), "integer"),
        (base(protocol={"omega_over_Omega": 1.0, "mode": "continuous", "steps": 7}), "no steps"),
        (base(protocol={"omega_over_Omega": 1.0, "mode": "discrete"}), "needs steps"),
        (base(protocol={"omega_over_Omega": 1.0, "mode": "jumpy"}), "mode"),
        (base(protocol={"omega_over_Omega": 1.0, "dimension": 3}), "qubit"),
        (base(protocol={"omega_over_Omega": 1.0, "tau": -2.0}), "tau"),
        (base(scheme="sideways"), "sideways"),
        (base(preparation="mixed"), "mixed"),
        (base(format="xml"), "format"),
        (base(threads=0), ">= 1"),
        (base(output=3), "path string"),
        (base(inject_corruption="yes"), "boolean"),
    ],
)
def test_rejected_configs(data, message):
    with pytest.raises(ConfigError, match=message):
        ConfigMaker.from_mapping(data)


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read"):
        ConfigMaker.from_file(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid JSON"):
        ConfigMaker.from_file(broken)
