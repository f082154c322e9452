from __future__ import annotations

import json
import shutil

import pytest

from reqplumb.pipeline.config import load_config
from reqplumb.pipeline.stages import STAGES, StageError, run_all, run_stage
from reqplumb.pipeline.workspace import Workspace, WorkspaceError


@pytest.fixture(scope="module")
def cfg(fixtures_dir):
    return load_config(fixtures_dir / "uavmini_config.toml")


@pytest.fixture(scope="module")
def full_ws(cfg, tmp_path_factory):
    """One fully-executed workspace shared by the read-only tests."""
    ws = Workspace(tmp_path_factory.mktemp("ws-full"))
    result = run_all(cfg, ws)
    assert result["status"] == "complete"
    return ws


class TestStageOrdering:
    def test_evaluate_before_map_names_missing_stage(self, cfg, tmp_path):
        ws = Workspace(tmp_path / "ws")
        with pytest.raises(StageError, match=r"requires requirements\.jsonl \(run: ingest\)"):
            run_stage("evaluate", cfg, ws)

    def test_map_requires_synonyms(self, cfg, tmp_path):
        ws = Workspace(tmp_path / "ws")
        run_stage("ingest", cfg, ws)
        run_stage("extract", cfg, ws)
        with pytest.raises(StageError, match=r"requires synonyms\.json \(run: synonyms\)"):
            run_stage("map", cfg, ws)

    def test_unknown_stage(self, cfg, tmp_path):
        with pytest.raises(StageError, match="unknown stage"):
            run_stage("transmogrify", cfg, Workspace(tmp_path / "ws"))


class TestFullRun:
    def test_manifest_lists_nine_stage_entries(self, full_ws):
        manifest = full_ws.manifest()
        assert set(manifest["stages"]) == set(STAGES)
        assert len(manifest["stages"]) == 9

    def test_expected_artifacts_exist(self, full_ws):
        for name in [
            "requirements.jsonl", "split.json", "model.json", "hierarchy.json",
            "terms_requirements-70.json", "terms_holdout-30.json", "terms_domain-corpus.json",
            "synonyms.json", "mapping.json", "mapping_comparison.json",
            "embeddings.json", "training_log.csv",
            "completed_model.json", "completion_report.json",
            "regularities.json", "families.json",
            "recommendations_None.json", "recommendations_completed_FamilyBelonging.json",
            "evaluation_report.json", "evaluation_report.csv",
        ]:
            assert full_ws.has(name), name

    def test_report_has_run_entries_and_averages(self, full_ws, cfg):
        report = full_ws.read_json("evaluation_report.json")
        assert report["n_runs"] == cfg.n_runs
        assert len(report["runs"]) == cfg.n_runs
        assert report["failures"] == []
        assert set(report["averages"]["original"]) == {
            "None", "EntityType", "NodeType", "FamilyBelonging", "Combination"
        }

    def test_mapping_artifact_consistent(self, full_ws):
        mapping = full_ws.read_json("mapping.json")
        assert mapping["rate"] == pytest.approx(
            mapping["mapped_terms"] / mapping["rt_size"])
        comparison = full_ws.read_json("mapping_comparison.json")["rows"]
        by_method = {r["method"]: r["rate"] for r in comparison}
        assert by_method["C-Value+Synonym"] >= by_method["C-Value"]

    def test_rerun_with_same_config_rewrites_nothing(self, full_ws, cfg):
        before = full_ws.manifest()
        mtimes = {
            name: (full_ws.root / name).stat().st_mtime_ns
            for entry in before["stages"].values() for name in entry["files"]
        }
        result = run_all(cfg, full_ws)
        assert result["status"] == "complete"
        after = full_ws.manifest()
        assert after["stages"] == before["stages"]
        for name, stamp in mtimes.items():
            assert (full_ws.root / name).stat().st_mtime_ns == stamp, name


class TestProvenance:
    def test_stage_rerun_reproduces_bit_identical_artifact(self, cfg, full_ws, tmp_path):
        fresh = Workspace(tmp_path / "ws2")
        for stage in ("ingest", "extract", "synonyms", "map", "embed"):
            run_stage(stage, cfg, fresh)
        for name in ("mapping.json", "embeddings.json", "terms_requirements-70.json"):
            assert (fresh.root / name).read_bytes() == (full_ws.root / name).read_bytes(), name

    def test_tampered_artifact_refused(self, cfg, tmp_path):
        ws = Workspace(tmp_path / "ws")
        run_stage("ingest", cfg, ws)
        path = ws.root / "model.json"
        obj = json.loads(path.read_text("utf-8"))
        obj["entities"][0]["label"] = "tampered"
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8")
        run_stage("extract", cfg, ws)
        with pytest.raises(WorkspaceError, match="manifest hash"):
            run_stage("synonyms", cfg, ws)


class TestCuration:
    def test_decisions_change_terms_on_rerun(self, cfg, full_ws, tmp_path):
        ws = Workspace(tmp_path / "ws")
        shutil.copytree(full_ws.root, ws.root, dirs_exist_ok=True)
        terms = ws.read_json("terms_requirements-70.json")["terms"]
        target = " ".join(terms[0]["words"])
        n_before = len([t for t in terms if t["status"] != "Rejected"])
        ws.record_decision("terms", target, "Rejected")
        run_stage("extract", cfg, ws)
        after = ws.read_json("terms_requirements-70.json")["terms"]
        kept = [t for t in after if t["status"] != "Rejected"]
        assert len(kept) == n_before - 1
        assert target not in {" ".join(t["words"]) for t in kept}

    def test_interactive_mode_pauses(self, cfg, tmp_path):
        import dataclasses

        icfg = dataclasses.replace(cfg, curation_mode="interactive")
        ws = Workspace(tmp_path / "ws")
        result = run_all(icfg, ws)
        assert result == {"status": "awaiting-curation", "stage": "extract"}
        assert ws.status()["extract"] == "awaiting-curation"
        # record decisions (even empty) and resume past the pause
        ws.write_json("curation/terms.json", {})
        ws.write_json("curation/synonyms.json", {})
        result = run_all(icfg, ws)
        assert result["status"] == "complete"

    def test_audit_log_records_history(self, cfg, tmp_path):
        ws = Workspace(tmp_path / "ws")
        ws.record_decision("terms", "flight pattern", "Rejected", actor="a")
        ws.record_decision("terms", "flight pattern", "Accepted", actor="b")
        log = ws.audit_log()
        assert [e["decision"] for e in log] == ["Rejected", "Accepted"]
        assert ws.curation_decisions("terms")["flight pattern"] == "Accepted"
