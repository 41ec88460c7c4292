#!/usr/bin/env python3
"""
Result storage tests
"""

import json
import os

import pytest

from hypchroma.errors import ParameterError
from hypchroma.storage import ResultStorage


@pytest.fixture
def storage(tmp_path):
    return ResultStorage(str(tmp_path / "saved"))


def test_save_result_writes_envelope(storage):
    filename = storage.save_result("hyp-bound", {"d": 1.5}, {"best": {"value": 8}, "d": 1.5}, slug="d1.5")
    assert filename.startswith("hyp_bound_d1.5_")
    assert filename.endswith(".json")
    with open(storage.results_dir / filename, encoding="utf-8") as f:
        data = json.load(f)
    assert data["command"] == "hyp-bound"
    assert data["params"] == {"d": 1.5}
    assert data["summary"]["best"] == 8
    assert "timestamp" in data


def test_same_second_saves_do_not_collide(storage):
    first = storage.save_result("d0", {}, {"d0": 0.56})
    second = storage.save_result("d0", {}, {"d0": 0.56})
    assert first != second
    assert len(storage.get_all_results()) == 2


def test_results_listed_newest_first(storage):
    old = storage.save_result("tree", {}, {"status": "SOLVED", "exact": 3}, slug="old")
    new = storage.save_result("tree", {}, {"passed": False, "violation_count": 4}, slug="new")
    os.utime(storage.results_dir / old, (1_000_000_000, 1_000_000_000))
    results = storage.get_all_results()
    assert [r["filename"] for r in results] == [new, old]
    assert results[1]["summary"]["exact"] == 3
    assert results[0]["summary"]["violation_count"] == 4
    assert results[0]["file_size"] > 0


def test_unreadable_results_are_skipped(storage):
    (storage.results_dir / "broken.json").write_text("{not json", encoding="utf-8")
    storage.save_result("d0", {}, {"d0": 0.56})
    assert len(storage.get_all_results()) == 1


def test_load_and_delete(storage):
    filename = storage.save_result("clique", {"d": 6, "c": 2}, {"n": 63})
    assert storage.get_result_by_filename(filename)["result"] == {"n": 63}
    assert storage.get_result_by_filename("missing.json") is None
    assert storage.delete_result(filename)
    assert not storage.delete_result(filename)


def test_paths_outside_results_dir_are_refused(storage):
    with pytest.raises(ParameterError):
        storage.get_result_by_filename("../elsewhere.json")
    with pytest.raises(ParameterError):
        storage.delete_result("../elsewhere.json")


def test_save_text_artifact(storage):
    filename = storage.save_text("tree", "p cnf 1 1\n1 0\n", slug="q3 d2", suffix=".cnf")
    assert filename.startswith("tree_q3_d2_")
    assert (storage.results_dir / filename).read_text(encoding="utf-8") == "p cnf 1 1\n1 0\n"
    assert storage.get_all_results() == []


def test_default_directory_comes_from_settings(tmp_path):
    storage = ResultStorage()
    assert storage.results_dir == tmp_path / "results"
    assert storage.results_dir.is_dir()
