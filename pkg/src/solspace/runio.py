"""Run-directory persistence: problem, baseline, box, trace, sections, manifest.

Layout:
    problem.json
    baseline.json                      (when a baseline was computed)
    box.json                           {intervals, mu, purity, seed, params}
    trace.json                         (array of iteration records)
    sections/section_<i>_<j>.json|csv|svg
    manifest.json                      (sha256 per file, tool version, seeds)

All JSON is canonical (sorted keys, two-space indent, trailing newline), so a
rerun with the same seed reproduces every file byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .baseline import BaselineResult
from .boxes import Box, box_from_jsonable
from .errors import SolspaceError
from .jsonutil import canonical_dumps, write_canonical
from .problem import Problem, problem_from_dict, problem_to_dict
from .sections import SectionData, export_section, section_from_json
from .solver import IterationRecord, SolverParams, SolverTrace

MANIFEST_NAME = "manifest.json"
SECTION_DIR = "sections"


class RunLoadError(SolspaceError):
    """A run directory is missing a file or holds one that fails its hash."""


@dataclass(frozen=True)
class BaselineRecord:
    """The persisted slice of a baseline run (baseline.json)."""

    x_baseline: tuple[float, ...]
    qois: dict
    objective: float
    evaluations_used: int
    seed: int

    @classmethod
    def from_result(cls, result: BaselineResult, seed: int) -> "BaselineRecord":
        return cls(
            x_baseline=tuple(result.x_baseline),
            qois=dict(result.qois),
            objective=result.objective,
            evaluations_used=result.evaluations_used,
            seed=seed,
        )

    def to_jsonable(self) -> dict:
        return {
            "x_baseline": list(self.x_baseline),
            "qois": self.qois,
            "objective": self.objective,
            "evaluations_used": self.evaluations_used,
            "seed": self.seed,
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "BaselineRecord":
        return cls(
            x_baseline=tuple(float(v) for v in obj["x_baseline"]),
            qois=dict(obj["qois"]),
            objective=float(obj["objective"]),
            evaluations_used=int(obj["evaluations_used"]),
            seed=int(obj["seed"]),
        )


@dataclass(frozen=True)
class BoxRecord:
    """The persisted slice of a solve (box.json)."""

    box: Box
    mu: float
    purity: float
    seed: int
    params: SolverParams

    def to_jsonable(self) -> dict:
        return {
            "intervals": self.box.to_jsonable(),
            "mu": self.mu,
            "purity": self.purity,
            "seed": self.seed,
            "params": self.params.to_jsonable(),
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "BoxRecord":
        return cls(
            box=box_from_jsonable(obj["intervals"]),
            mu=float(obj["mu"]),
            purity=float(obj["purity"]),
            seed=int(obj["seed"]),
            params=SolverParams(**obj["params"]),
        )


@dataclass(frozen=True)
class RunData:
    problem: Problem
    box: BoxRecord
    trace: SolverTrace
    baseline: Optional[BaselineRecord]
    sections: tuple[SectionData, ...]
    manifest: dict


def trace_from_jsonable(data: list) -> SolverTrace:
    records = tuple(
        IterationRecord(
            phase=int(r["phase"]),
            mu=float(r["mu"]),
            bad_fraction=float(r["bad_fraction"]),
            box=box_from_jsonable(r["box"]),
        )
        for r in data
    )
    return SolverTrace(records)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _layout_files(run_dir: Path) -> list[Path]:
    files = [
        run_dir / name
        for name in ("problem.json", "baseline.json", "box.json", "trace.json")
        if (run_dir / name).is_file()
    ]
    sect = run_dir / SECTION_DIR
    if sect.is_dir():
        files.extend(sorted(p for p in sect.iterdir() if p.is_file()))
    return files


def write_manifest(run_dir: Path) -> dict:
    """Hash every layout file present and write manifest.json.

    Seeds are read back out of the files themselves, so the manifest stays a
    pure function of the directory contents.
    """
    run_dir = Path(run_dir)
    files: dict[str, str] = {}
    seeds: dict[str, int] = {}
    for path in _layout_files(run_dir):
        rel = path.relative_to(run_dir).as_posix()
        files[rel] = _sha256(path)
        if path.suffix == ".json":
            obj = json.loads(path.read_text())
            if isinstance(obj, dict) and isinstance(obj.get("seed"), int):
                seeds[Path(rel).stem] = obj["seed"]
    manifest = {
        "tool": "solspace",
        "version": __version__,
        "seeds": seeds,
        "files": files,
    }
    write_canonical(run_dir / MANIFEST_NAME, manifest)
    return manifest


def persist_run(
    run_dir,
    problem: Problem,
    baseline: Optional[BaselineRecord] = None,
    box: Optional[BoxRecord] = None,
    trace: Optional[SolverTrace] = None,
    sections: Sequence[SectionData] = (),
) -> dict:
    """Write the given pieces into the run directory and re-manifest it.

    Pieces left as None that already exist on disk are kept and re-hashed, so
    staged CLI invocations (baseline, then solve, then sections) accumulate
    into one consistent manifest.
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    write_canonical(run_dir / "problem.json", problem_to_dict(problem))
    if baseline is not None:
        write_canonical(run_dir / "baseline.json", baseline.to_jsonable())
    if box is not None:
        write_canonical(run_dir / "box.json", box.to_jsonable())
    if trace is not None:
        write_canonical(run_dir / "trace.json", trace.to_jsonable())
    if sections:
        sect_dir = run_dir / SECTION_DIR
        sect_dir.mkdir(exist_ok=True)
        for section in sections:
            i, j = section.dims
            stem = sect_dir / f"section_{i}_{j}"
            for fmt in ("json", "csv", "svg"):
                stem.with_suffix("." + fmt).write_bytes(export_section(section, fmt))
    return write_manifest(run_dir)


def _require(run_dir: Path, name: str) -> Path:
    path = run_dir / name
    if not path.is_file():
        raise RunLoadError(f"{name} absent")
    return path


def _read_json(run_dir: Path, name: str):
    path = _require(run_dir, name)
    try:
        return json.loads(path.read_text())
    except ValueError as exc:
        raise RunLoadError(f"{name} corrupt: {exc}") from exc


def load_run(run_dir) -> RunData:
    """Load a complete run, verifying every manifest hash first."""
    run_dir = Path(run_dir)
    manifest = _read_json(run_dir, MANIFEST_NAME)
    for rel, expect in sorted(manifest.get("files", {}).items()):
        path = run_dir / rel
        if not path.is_file():
            raise RunLoadError(f"{rel} absent")
        if _sha256(path) != expect:
            raise RunLoadError(f"{rel} corrupt: content hash mismatch")

    problem = problem_from_dict(_read_json(run_dir, "problem.json"))
    box = BoxRecord.from_jsonable(_read_json(run_dir, "box.json"))
    trace = trace_from_jsonable(_read_json(run_dir, "trace.json"))
    baseline = None
    if (run_dir / "baseline.json").is_file():
        baseline = BaselineRecord.from_jsonable(_read_json(run_dir, "baseline.json"))

    sections = []
    sect_dir = run_dir / SECTION_DIR
    if sect_dir.is_dir():
        for path in sorted(sect_dir.glob("section_*.json")):
            try:
                sections.append(section_from_json(path.read_bytes()))
            except (ValueError, KeyError) as exc:
                rel = path.relative_to(run_dir).as_posix()
                raise RunLoadError(f"{rel} corrupt: {exc}") from exc

    return RunData(
        problem=problem,
        box=box,
        trace=trace,
        baseline=baseline,
        sections=tuple(sections),
        manifest=manifest,
    )


def load_baseline_record(path) -> BaselineRecord:
    """Read one baseline.json (used by the CLI before a run is complete)."""
    path = Path(path)
    if not path.is_file():
        raise RunLoadError(f"{path.name} absent")
    try:
        return BaselineRecord.from_jsonable(json.loads(path.read_text()))
    except (ValueError, KeyError) as exc:
        raise RunLoadError(f"{path.name} corrupt: {exc}") from exc
