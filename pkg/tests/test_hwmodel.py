import json
import math

import pytest

import rcsbench as rb
from rcsbench import hwmodel

from conftest import BUNDLED_CONFIG, grid_model_doc


def test_bundled_config_loads(bundled_model):
    m = bundled_model
    assert m.rows == 15 and m.cols == 7
    assert len(m.qubits) == 105
    assert len(m.couplers) == 182
    assert not m.qubit(38).working
    assert len(m.working_qubits()) == 104


def test_error_summary_matches_raw_json(bundled_model):
    # independent recomputation straight from the JSON document
    doc = json.loads(BUNDLED_CONFIG.read_text())
    for metric, key, records in (
        ("e1", "e1", doc["qubits"]),
        ("e3", "e3", doc["qubits"]),
        ("e2", "e2", doc["couplers"]),
        ("t1", "t1_us", doc["qubits"]),
        ("t2", "t2_us", doc["qubits"]),
    ):
        raw = sorted(r[key] for r in records if r["working"] and r.get(key) is not None)
        summ = rb.error_summary(bundled_model, metric)
        assert summ.values == tuple(raw)
        assert abs(summ.mean - sum(raw) / len(raw)) < 1e-12
        mid = len(raw) // 2
        med = raw[mid] if len(raw) % 2 else (raw[mid - 1] + raw[mid]) / 2
        assert abs(summ.median - med) < 1e-12


def test_bundled_means_are_pinned(bundled_model):
    assert abs(rb.error_summary(bundled_model, "e1").mean - 1.0e-3) < 1e-15
    assert abs(rb.error_summary(bundled_model, "e2").mean - 4.4e-3) < 1e-15
    assert abs(rb.error_summary(bundled_model, "e3").mean - 1.3e-2) < 1e-15


def test_cdf_fractions():
    m = rb.model_from_dict(grid_model_doc(2, 2))
    cdf = rb.error_summary(m, "e1").cdf
    assert [f for _, f in cdf] == [0.25, 0.5, 0.75, 1.0]
    assert all(cdf[i][0] <= cdf[i + 1][0] for i in range(len(cdf) - 1))


def test_validation_catches_duplicates_and_ranges():
    doc = grid_model_doc(2, 2)
    doc["qubits"][1]["id"] = 0
    with pytest.raises(rb.ConfigValidationError) as err:
        rb.model_from_dict(doc)
    assert any("duplicate id" in v for v in err.value.violations)

    doc = grid_model_doc(2, 2)
    doc["qubits"][0]["e1"] = 1.5
    with pytest.raises(rb.ConfigValidationError):
        rb.model_from_dict(doc)

    doc = grid_model_doc(2, 2)
    doc["couplers"][0]["q1"] = 99
    with pytest.raises(rb.ConfigValidationError):
        rb.model_from_dict(doc)

    # working coupler on a dead endpoint is inconsistent
    doc = grid_model_doc(2, 2)
    doc["qubits"][0]["working"] = False
    with pytest.raises(rb.ConfigValidationError):
        rb.model_from_dict(doc)


def test_validation_catches_non_adjacent_coupler():
    doc = grid_model_doc(2, 2)
    doc["couplers"][0]["q0"] = 0
    doc["couplers"][0]["q1"] = 3  # diagonal
    with pytest.raises(rb.ConfigValidationError) as err:
        rb.model_from_dict(doc)
    assert any("adjacent" in v for v in err.value.violations)


def test_config_error_on_malformed_document(tmp_path):
    with pytest.raises(rb.ConfigError):
        rb.model_from_dict({"name": "x"})
    with pytest.raises(rb.ConfigError):
        rb.model_from_dict(grid_model_doc(2, 2) | {"qubits": "nope"})
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(rb.ConfigError):
        rb.load_config(p)


def test_round_trip_dict(bundled_model):
    doc = hwmodel.model_to_dict(bundled_model)
    again = rb.model_from_dict(doc)
    assert hwmodel.model_to_dict(again) == doc


def test_save_load_round_trip(tmp_path):
    m = rb.model_from_dict(grid_model_doc(3, 3, dead_qubits=(4,)))
    p = tmp_path / "m.json"
    hwmodel.save_config(m, p)
    again = rb.load_config(p)
    assert hwmodel.model_to_dict(again) == hwmodel.model_to_dict(m)


def test_exclude_qubits_kills_couplers():
    m = rb.model_from_dict(grid_model_doc(3, 3))
    m2 = rb.exclude_qubits(m, [4])
    assert not m2.qubit(4).working
    for c in m2.couplers:
        if 4 in (c.q0, c.q1):
            assert not c.working
    # original untouched
    assert m.qubit(4).working


def test_empty_selection():
    doc = grid_model_doc(2, 2)
    for q in doc["qubits"]:
        del q["t1_us"]
    m = rb.model_from_dict(doc)
    with pytest.raises(rb.EmptySelectionError):
        rb.error_summary(m, "t1")
    with pytest.raises(ValueError):
        rb.error_summary(m, "bogus")


def test_coupler_lookup_is_unordered():
    m = rb.model_from_dict(grid_model_doc(2, 2))
    c1 = m.coupler_between(0, 1)
    c2 = m.coupler_between(1, 0)
    assert c1 is c2 is not None
    assert m.coupler_between(0, 3) is None
