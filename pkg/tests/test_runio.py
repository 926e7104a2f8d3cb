"""Run directory persistence: canonical files, manifest hashes, round trips."""

import json

import pytest

from solspace.baseline import baseline_from_point
from solspace.boxes import mu
from solspace.runio import (
    BaselineRecord,
    BoxRecord,
    RunLoadError,
    load_run,
    persist_run,
    trace_from_jsonable,
    write_manifest,
)
from solspace.sections import make_section
from solspace.solver import SolverParams, solve_box, validate_box


@pytest.fixture(scope="module")
def toy_run(toy2d):
    params = SolverParams(seed=3)
    box, trace = solve_box(toy2d, toy2d.x_baseline, params)
    record = BoxRecord(
        box=box,
        mu=mu(box, toy2d),
        purity=validate_box(toy2d, box, 500, seed=params.seed + 1),
        seed=params.seed,
        params=params,
    )
    baseline = BaselineRecord.from_result(baseline_from_point(toy2d, toy2d.x_baseline), seed=3)
    section = make_section(toy2d, box, dims=(0, 1), n=64, seed=3)
    return toy2d, record, trace, baseline, section


def _persist(tmp_path, toy_run, name="run"):
    problem, record, trace, baseline, section = toy_run
    run_dir = tmp_path / name
    persist_run(run_dir, problem, baseline=baseline, box=record,
                trace=trace, sections=[section])
    return run_dir


def test_layout(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    for rel in ("problem.json", "baseline.json", "box.json", "trace.json",
                "manifest.json", "sections/section_0_1.json",
                "sections/section_0_1.csv", "sections/section_0_1.svg"):
        assert (run_dir / rel).is_file(), rel


def test_round_trip(tmp_path, toy_run):
    problem, record, trace, baseline, section = toy_run
    run_dir = _persist(tmp_path, toy_run)
    data = load_run(run_dir)
    assert data.problem.dv_names == problem.dv_names
    assert data.box.box == record.box
    assert data.box.mu == record.mu
    assert data.box.params == record.params
    assert data.baseline.x_baseline == baseline.x_baseline
    assert [r.to_jsonable() for r in data.trace.records] == [
        r.to_jsonable() for r in trace.records
    ]
    assert data.sections[0] == section
    assert data.manifest["tool"] == "solspace"


def test_rerun_byte_identical(tmp_path, toy_run):
    a = _persist(tmp_path, toy_run, "a")
    b = _persist(tmp_path, toy_run, "b")
    for rel in ("problem.json", "baseline.json", "box.json", "trace.json",
                "manifest.json", "sections/section_0_1.svg"):
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_no_timestamps_inside_files(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert "timestamp" not in manifest
    assert set(manifest) == {"tool", "version", "seeds", "files"}


def test_manifest_seeds(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["seeds"]["box"] == 3
    assert manifest["seeds"]["baseline"] == 3
    assert manifest["seeds"]["section_0_1"] == 3


def test_load_missing_box(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    (run_dir / "box.json").unlink()
    write_manifest(run_dir)
    with pytest.raises(RunLoadError, match="box.json absent"):
        load_run(run_dir)


def test_load_detects_corruption(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    path = run_dir / "box.json"
    path.write_text(path.read_text().replace("purity", "puritY"))
    with pytest.raises(RunLoadError, match="box.json corrupt: content hash mismatch"):
        load_run(run_dir)


def test_load_detects_missing_hashed_file(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    (run_dir / "trace.json").unlink()
    with pytest.raises(RunLoadError, match="trace.json absent"):
        load_run(run_dir)


def test_load_requires_manifest(tmp_path, toy_run):
    run_dir = _persist(tmp_path, toy_run)
    (run_dir / "manifest.json").unlink()
    with pytest.raises(RunLoadError, match="manifest"):
        load_run(run_dir)


def test_baseline_optional(tmp_path, toy_run):
    problem, record, trace, _, _ = toy_run
    run_dir = tmp_path / "nobase"
    persist_run(run_dir, problem, box=record, trace=trace)
    data = load_run(run_dir)
    assert data.baseline is None
    assert data.sections == ()


def test_box_record_round_trip(toy_run):
    _, record, _, _, _ = toy_run
    again = BoxRecord.from_jsonable(record.to_jsonable())
    assert again == record


def test_baseline_record_round_trip(toy_run):
    _, _, _, baseline, _ = toy_run
    again = BaselineRecord.from_jsonable(baseline.to_jsonable())
    assert again == baseline


def test_trace_jsonable_round_trip(toy_run):
    _, _, trace, _, _ = toy_run
    again = trace_from_jsonable(trace.to_jsonable())
    assert [r.to_jsonable() for r in again.records] == [
        r.to_jsonable() for r in trace.records
    ]
