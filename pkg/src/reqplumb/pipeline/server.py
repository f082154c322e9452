"""HTTP review API: term/synonym curation decisions and tree/family views.

Endpoints (all JSON, every response carries the workspace config hash):

    GET  /api/status
    GET  /api/terms
    POST /api/terms/{id}/decision        {"decision": "Accepted" | "Rejected"}
    GET  /api/synonyms
    POST /api/synonyms/{id}/decision
    GET  /api/families                   409 until the analyze stage has run
    GET  /api/tree

Static assets (the review UI bundle) are served from ``static_dir``.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from ..text import slug
from .config import PipelineConfig
from .workspace import Workspace

logger = logging.getLogger(__name__)

_DECISION_RE = re.compile(r"^/api/(terms|synonyms)/([^/]+)/decision$")


def _term_items(ws: Workspace) -> list[dict]:
    decisions = ws.curation_decisions("terms")
    obj = ws.read_json("terms_requirements-70.json")
    items = []
    for t in obj["terms"]:
        label = " ".join(t["words"])
        decision = decisions.get(label) or (
            t["status"] if t["status"] in ("Accepted", "Rejected") else "Pending"
        )
        items.append({
            "id": slug(label),
            "kind": "Term",
            "payload": {"label": label, "words": t["words"], "cvalue": t["cvalue"],
                        "frequency": t["frequency"]},
            "decision": decision,
        })
    items.sort(key=lambda i: (-i["payload"]["cvalue"], i["payload"]["label"]))
    return items


def _synonym_items(ws: Workspace) -> list[dict]:
    decisions = ws.curation_decisions("synonyms")
    obj = ws.read_json("synonyms.json")
    items = []
    for p in obj["pairs"]:
        key = "||".join(sorted((p["a"], p["b"])))
        decision = decisions.get(key) or (
            p["status"] if p["status"] in ("Accepted", "Rejected") else "Pending"
        )
        items.append({
            "id": slug(key.replace("||", " -- ")),
            "kind": "SynonymPair",
            "payload": {"a": p["a"], "b": p["b"], "rule": p["rule"],
                        "similarity": p["similarity"], "key": key},
            "decision": decision,
        })
    items.sort(key=lambda i: (-i["payload"]["similarity"], i["payload"]["key"]))
    return items


def _tree_payload(ws: Workspace) -> dict:
    hierarchy = ws.read_json("hierarchy.json")
    model = ws.read_json("model.json")
    labels = {e["iri"]: e["label"] for e in model["entities"]}
    mapped: set[str] = set()
    if ws.has("mapping.json"):
        mapped = {p["entity"] for p in ws.read_json("mapping.json")["pairs"]}
    family_of: dict[str, str] = {}
    family_roots: list[dict] = []
    if ws.has("families.json"):
        fam = ws.read_json("families.json")["original"]
        family_roots = fam["roots"]
        for root in fam["roots"]:
            for node in fam["scope"]:
                family_of.setdefault(node, root["node"])
    nodes = []
    for iri, level in hierarchy["levels"].items():
        nodes.append({
            "iri": iri,
            "label": labels.get(iri, iri),
            "level": level,
            "position": hierarchy["positions"][iri],
            "parent": hierarchy["parents"].get(iri),
            "mapped": iri in mapped,
            "family": family_of.get(iri),
        })
    nodes.sort(key=lambda n: (n["level"], n["label"]))
    return {"nodes": nodes, "roots": hierarchy["roots"], "families": family_roots}


def make_handler(ws: Workspace, cfg: PipelineConfig, static_dir: Path | None):
    config_hash = cfg.config_hash()

    class ReviewHandler(BaseHTTPRequestHandler):
        server_version = "reqplumb-review/0.1"

        def log_message(self, fmt, *args):  # route through logging, not stderr
            logger.debug("%s " + fmt, self.address_string(), *args)

        def _send(self, code: int, payload: dict) -> None:
            payload = {**payload, "config_hash": config_hash}
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_static(self, rel: str) -> None:
            if static_dir is None:
                self._send(404, {"error": "no static bundle configured"})
                return
            target = (static_dir / rel.lstrip("/")).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send(404, {"error": f"not found: {rel}"})
                return
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):  # noqa: N802 - http.server API
            path = self.path.split("?", 1)[0]
            try:
                if path == "/api/status":
                    self._send(200, {"stages": ws.status(), "workspace": str(ws.root)})
                elif path == "/api/terms":
                    if not ws.has("terms_requirements-70.json"):
                        self._send(409, {"error": "terms not extracted yet",
                                         "hint": "run: extract"})
                    else:
                        self._send(200, {"items": _term_items(ws)})
                elif path == "/api/synonyms":
                    if not ws.has("synonyms.json"):
                        self._send(409, {"error": "synonyms not detected yet",
                                         "hint": "run: synonyms"})
                    else:
                        self._send(200, {"items": _synonym_items(ws)})
                elif path == "/api/families":
                    if not ws.has("families.json"):
                        self._send(409, {"error": "families not computed yet",
                                         "hint": "run: analyze"})
                    else:
                        self._send(200, ws.read_json("families.json"))
                elif path == "/api/tree":
                    if not ws.has("hierarchy.json"):
                        self._send(409, {"error": "model not ingested yet",
                                         "hint": "run: ingest"})
                    else:
                        self._send(200, _tree_payload(ws))
                elif path == "/":
                    self._send_static("index.html")
                elif not path.startswith("/api/"):
                    self._send_static(path)
                else:
                    self._send(404, {"error": f"unknown endpoint {path}"})
            except Exception as exc:  # pragma: no cover - defensive
                logger.exception("GET %s failed", path)
                self._send(500, {"error": str(exc)})

        def do_POST(self):  # noqa: N802
            path = self.path.split("?", 1)[0]
            m = _DECISION_RE.match(path)
            if m is None:
                self._send(404, {"error": f"unknown endpoint {path}"})
                return
            kind_route, item_id = m.group(1), m.group(2)
            length = int(self.headers.get("Content-Length", "0"))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                self._send(400, {"error": "body must be JSON"})
                return
            decision = body.get("decision")
            if decision not in ("Accepted", "Rejected"):
                self._send(400, {"error": "decision must be Accepted or Rejected"})
                return
            items = _term_items(ws) if kind_route == "terms" else _synonym_items(ws)
            match = next((i for i in items if i["id"] == item_id), None)
            if match is None:
                self._send(404, {"error": f"unknown item {item_id}"})
                return
            key = (match["payload"]["label"] if kind_route == "terms"
                   else match["payload"]["key"])
            ws.record_decision(kind_route, key, decision,
                               actor=body.get("actor", "reviewer"))
            self._send(200, {"ok": True, "id": item_id, "decision": decision})

    return ReviewHandler


def make_server(ws: Workspace, cfg: PipelineConfig, port: int = 0,
                static_dir: str | Path | None = None) -> ThreadingHTTPServer:
    static = Path(static_dir) if static_dir else None
    handler = make_handler(ws, cfg, static)
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve_review(ws: Workspace, cfg: PipelineConfig, port: int = 8400,
                 static_dir: str | Path | None = None) -> None:
    server = make_server(ws, cfg, port, static_dir)
    logger.info("review server on http://127.0.0.1:%d", server.server_port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
