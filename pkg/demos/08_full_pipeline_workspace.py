"""Drive the staged pipeline against a workspace, the way the CLI does."""

import tempfile
from pathlib import Path

from reqplumb.pipeline import Workspace, load_config, run_all, run_stage

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

cfg = load_config(FIXTURES / "uavmini_config.toml")

with tempfile.TemporaryDirectory() as tmp:
    ws = Workspace(tmp)
    print("running stages one by one:")
    for stage in ("ingest", "extract", "synonyms", "map"):
        files = run_stage(stage, cfg, ws)
        print(f"  {stage:9s} -> {', '.join(f.name for f in files)}")

    print("\nre-running an unchanged stage is a no-op (hash match):")
    before = ws.manifest()["stages"]["map"]["timestamp"]
    run_stage("map", cfg, ws)
    after = ws.manifest()["stages"]["map"]["timestamp"]
    print(f"  map timestamp unchanged: {before == after}")

    print("\nrun-all finishes the remaining stages and evaluates:")
    result = run_all(cfg, ws)
    print(f"  status: {result['status']}")
    fam = result["report"]["averages"]["completed"]["FamilyBelonging"]
    print(f"  FamilyBelonging on the completed model: R={fam['recall']:.2f} "
          f"P={fam['precision']:.2f} F2={fam['f2']:.2f}")
    print(f"  manifest stages: {sorted(ws.manifest()['stages'])}")
