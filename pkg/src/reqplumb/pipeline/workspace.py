"""Workspace directory with a hash-verified artifact manifest.

Every stage records the files it wrote plus the hash of everything that fed
it; an unchanged stage is skipped on re-run, and artifacts whose content no
longer matches the manifest are refused.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from pathlib import Path


class WorkspaceError(RuntimeError):
    pass


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "curation").mkdir(exist_ok=True)
        self._write_lock = threading.Lock()

    # --- manifest ---------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def manifest(self) -> dict:
        if not self.manifest_path.exists():
            return {"schema": 1, "stages": {}}
        return json.loads(self.manifest_path.read_text("utf-8"))

    def record_stage(self, stage: str, files: list[Path], input_hash: str) -> None:
        manifest = self.manifest()
        manifest["stages"][stage] = {
            "files": {str(p.relative_to(self.root)): _sha256(p) for p in files},
            "input_hash": input_hash,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        self.write_json("manifest.json", manifest)

    def stage_entry(self, stage: str) -> dict | None:
        return self.manifest()["stages"].get(stage)

    def stage_is_current(self, stage: str, input_hash: str) -> bool:
        entry = self.stage_entry(stage)
        if entry is None or entry["input_hash"] != input_hash:
            return False
        for rel, digest in entry["files"].items():
            p = self.root / rel
            if not p.exists() or _sha256(p) != digest:
                return False
        return True

    def verified_path(self, stage: str, name: str) -> Path:
        """Path of a recorded artifact, re-hashed against the manifest."""
        entry = self.stage_entry(stage)
        if entry is None or name not in entry["files"]:
            raise WorkspaceError(f"artifact {name} not recorded for stage {stage}")
        p = self.root / name
        if not p.exists():
            raise WorkspaceError(f"artifact {name} is missing on disk")
        if _sha256(p) != entry["files"][name]:
            raise WorkspaceError(f"artifact {name} does not match its manifest hash")
        return p

    # --- files -------------------------------------------------------------

    def path(self, name: str) -> Path:
        return self.root / name

    def write_json(self, name: str, obj: dict | list) -> Path:
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def write_text(self, name: str, text: str) -> Path:
        target = self.root / name
        target.parent.mkdir(parents=True, exist_ok=True)
        with self._write_lock:
            fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=".tmp-")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(text)
                os.replace(tmp, target)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return target

    def read_json(self, name: str):
        return json.loads((self.root / name).read_text("utf-8"))

    def has(self, name: str) -> bool:
        return (self.root / name).exists()

    # --- curation -----------------------------------------------------------

    def curation_decisions(self, kind: str) -> dict[str, str]:
        name = f"curation/{kind}.json"
        if not self.has(name):
            return {}
        return self.read_json(name)

    def record_decision(self, kind: str, item_id: str, decision: str, actor: str = "") -> None:
        if decision not in ("Accepted", "Rejected"):
            raise ValueError(f"invalid decision {decision!r}")
        with self._write_lock:
            name = f"curation/{kind}.json"
            decisions = {}
            if self.has(name):
                decisions = json.loads((self.root / name).read_text("utf-8"))
            decisions[item_id] = decision
            target = self.root / name
            fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=".tmp-")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(json.dumps(decisions, indent=2, sort_keys=True) + "\n")
                os.replace(tmp, target)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            audit = self.root / "curation" / "audit.jsonl"
            with open(audit, "a", encoding="utf-8") as f:
                f.write(json.dumps({
                    "ts": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                    "kind": kind, "id": item_id, "decision": decision, "actor": actor,
                }, sort_keys=True) + "\n")

    def audit_log(self) -> list[dict]:
        audit = self.root / "curation" / "audit.jsonl"
        if not audit.exists():
            return []
        return [json.loads(line) for line in audit.read_text("utf-8").splitlines() if line]

    # --- status --------------------------------------------------------------

    def set_status(self, stage: str, status: str) -> None:
        current = self.read_json("status.json") if self.has("status.json") else {}
        current[stage] = status
        self.write_json("status.json", current)

    def status(self) -> dict:
        return self.read_json("status.json") if self.has("status.json") else {}
