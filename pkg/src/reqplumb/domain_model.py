"""Open domain model ingestion: RDF parsing, fact triples, and the class tree.

Two concrete syntaxes are supported, RDF/XML and a pragmatic Turtle subset
(prefixes, ``a``, ``;``/``,`` continuation, IRIs, prefixed names, literals).
OWL reasoning is out of scope: statements are taken at face value, rdf:type
populates entity categories, and every resource-to-resource statement becomes
a fact triple (h, r, t).
"""

from __future__ import annotations

import json
import logging
import re
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .text import normalize_label

logger = logging.getLogger(__name__)

CATEGORIES = (
    "Classes",
    "ObjectProperty",
    "DataProperty",
    "NamedIndividual",
    "AnnotationProperty",
    "Other",
)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

_TYPE_CATEGORY = {
    "Class": "Classes",
    "ObjectProperty": "ObjectProperty",
    "DatatypeProperty": "DataProperty",
    "DataProperty": "DataProperty",
    "NamedIndividual": "NamedIndividual",
    "AnnotationProperty": "AnnotationProperty",
}

_CATEGORY_PRIORITY = {c: i for i, c in enumerate(CATEGORIES)}

DEFAULT_HIERARCHY_PREDICATES = (("subClassOf", True), ("hasSubClasses", False))


class RdfSyntaxError(ValueError):
    """Malformed RDF input, annotated with a line/position when known."""


class HierarchyCycleError(ValueError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("hierarchy cycle: " + " -> ".join(cycle + cycle[:1]))


@dataclass(frozen=True)
class Entity:
    iri: str
    label: str
    category: str = "Other"


@dataclass(frozen=True)
class FactTriple:
    h: str
    r: str
    t: str


@dataclass(frozen=True)
class DomainModel:
    entities: dict[str, Entity]
    triples: tuple[FactTriple, ...]
    hierarchy_predicates: tuple[tuple[str, bool], ...] = DEFAULT_HIERARCHY_PREDICATES

    def classes(self) -> list[Entity]:
        return [e for e in self.entities.values() if e.category == "Classes"]

    def relation_names(self) -> list[str]:
        return sorted({t.r for t in self.triples})

    def entity_by_label(self) -> dict[str, list[Entity]]:
        out: dict[str, list[Entity]] = {}
        for e in self.entities.values():
            out.setdefault(e.label, []).append(e)
        return out

    def hierarchy_relation_name(self) -> str:
        """The hierarchy predicate actually used by this model (first match)."""
        present = {t.r for t in self.triples}
        for name, _ in self.hierarchy_predicates:
            if name in present:
                return name
        return self.hierarchy_predicates[0][0]


@dataclass(frozen=True)
class HierarchyTree:
    parent_of: dict[str, str]
    children_of: dict[str, tuple[str, ...]]
    roots: tuple[str, ...]
    level: dict[str, int]
    position: dict[str, str]

    def nodes(self) -> list[str]:
        return sorted(self.level)

    def descendants(self, node: str) -> set[str]:
        """All nodes strictly below ``node``."""
        out: set[str] = set()
        stack = list(self.children_of.get(node, ()))
        while stack:
            cur = stack.pop()
            if cur in out:
                continue
            out.add(cur)
            stack.extend(self.children_of.get(cur, ()))
        return out


def local_name(iri: str) -> str:
    for sep in ("#", "/", ":"):
        if sep in iri:
            tail = iri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return iri


def _category_for_type(type_iri: str) -> str:
    return _TYPE_CATEGORY.get(local_name(type_iri), "Other")


def _best_category(candidates: list[str]) -> str:
    if not candidates:
        return "Other"
    return min(candidates, key=lambda c: _CATEGORY_PRIORITY[c])


class _Statements:
    """Accumulates raw statements before they are shaped into a DomainModel."""

    def __init__(self) -> None:
        self.resources: dict[str, dict] = {}
        self.triples: list[tuple[str, str, str]] = []
        self._blank_count = 0

    def resource(self, iri: str) -> dict:
        return self.resources.setdefault(iri, {"types": [], "label": None, "blank": False})

    def new_blank(self) -> str:
        self._blank_count += 1
        iri = f"_:b{self._blank_count}"
        self.resource(iri)["blank"] = True
        return iri

    def add_type(self, subject: str, type_iri: str) -> None:
        self.resource(subject)["types"].append(type_iri)

    def add_label(self, subject: str, label: str) -> None:
        res = self.resource(subject)
        if res["label"] is None:
            res["label"] = label

    def add_triple(self, s: str, p: str, o: str) -> None:
        self.resource(s)
        self.resource(o)
        self.triples.append((s, p, o))

    def build(self, hierarchy_predicates) -> DomainModel:
        entities: dict[str, Entity] = {}
        for iri, res in self.resources.items():
            label_src = res["label"] if res["label"] else local_name(iri)
            category = _best_category([_category_for_type(t) for t in res["types"]])
            entities[iri] = Entity(iri=iri, label=normalize_label(label_src), category=category)
        seen: set[tuple[str, str, str]] = set()
        triples: list[FactTriple] = []
        hier_names = {name for name, _ in hierarchy_predicates}
        for s, p, o in self.triples:
            pred = local_name(p)
            if pred in hier_names and s == o:
                raise RdfSyntaxError(f"self-parenting hierarchy statement on {s}")
            key = (s, pred, o)
            if key in seen:
                continue
            seen.add(key)
            triples.append(FactTriple(h=s, r=pred, t=o))
        return DomainModel(
            entities=entities,
            triples=tuple(triples),
            hierarchy_predicates=tuple(hierarchy_predicates),
        )


def _split_tag(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        ns, local = tag[1:].split("}", 1)
        return ns + ("#" if not ns.endswith(("#", "/")) else ""), local
    return "", tag


def _xml_subject(elem: ET.Element, st: _Statements, base: str) -> str:
    about = elem.get(f"{{{RDF_NS}}}about")
    node_id = elem.get(f"{{{RDF_NS}}}ID")
    if about is not None:
        return about if ":" in about.split("/")[0] or about.startswith("#") else base + about
    if node_id is not None:
        return base + "#" + node_id
    return st.new_blank()


def _walk_xml_node(elem: ET.Element, st: _Statements, base: str) -> str:
    subject = _xml_subject(elem, st, base)
    ns, local = _split_tag(elem.tag)
    if not (ns == RDF_NS and local == "Description"):
        st.add_type(subject, ns + local)
    for prop in elem:
        pns, plocal = _split_tag(prop.tag)
        pred_iri = pns + plocal
        resource = prop.get(f"{{{RDF_NS}}}resource")
        nested = list(prop)
        if pns == RDF_NS and plocal == "type":
            if resource is None:
                raise RdfSyntaxError("rdf:type without rdf:resource")
            st.add_type(subject, resource)
        elif resource is not None:
            st.add_triple(subject, pred_iri, resource)
        elif nested:
            for child in nested:
                obj = _walk_xml_node(child, st, base)
                st.add_triple(subject, pred_iri, obj)
        else:
            text = (prop.text or "").strip()
            if pred_iri == RDFS_NS + "label" and text:
                st.add_label(subject, text)
            # other literal-valued statements carry no graph structure
    return subject


def _parse_rdf_xml(path: Path, hierarchy_predicates) -> DomainModel:
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        line, col = exc.position
        raise RdfSyntaxError(f"{path}:{line}:{col}: {exc.msg}") from exc
    root = tree.getroot()
    base = root.get("{http://www.w3.org/XML/1998/namespace}base", "")
    st = _Statements()
    rns, rlocal = _split_tag(root.tag)
    if rns == RDF_NS and rlocal == "RDF":
        for child in root:
            _walk_xml_node(child, st, base)
    else:
        _walk_xml_node(root, st, base)
    return st.build(hierarchy_predicates)


_TTL_TOKEN = re.compile(
    r"""(?P<iri><[^>]*>)|(?P<literal>"(?:[^"\\]|\\.)*"(?:\^\^\S+|@[\w-]+)?)"""
    r"""|(?P<punct>[;,.\[\]])|(?P<word>[^\s;,.\[\]]+)""",
    re.VERBOSE,
)


def _ttl_tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = []
        in_quote = False
        in_iri = False
        prev = ""
        for ch in line:
            if ch == '"' and prev != "\\" and not in_iri:
                in_quote = not in_quote
            elif ch == "<" and not in_quote:
                in_iri = True
            elif ch == ">" and not in_quote:
                in_iri = False
            if ch == "#" and not in_quote and not in_iri:
                break
            stripped.append(ch)
            prev = ch
        for m in _TTL_TOKEN.finditer("".join(stripped)):
            kind = m.lastgroup
            yield lineno, kind, m.group()


def _parse_turtle(path: Path, hierarchy_predicates) -> DomainModel:
    text = path.read_text("utf-8")
    prefixes: dict[str, str] = {}
    base = ""
    st = _Statements()

    def resolve(lineno: int, kind: str, token: str) -> str:
        if kind == "iri":
            iri = token[1:-1]
            return base + iri if base and "://" not in iri and not iri.startswith("#") else iri
        if kind == "word":
            if token == "a":
                return RDF_NS + "type"
            if token.startswith("_:"):
                return token
            if ":" in token:
                prefix, local = token.split(":", 1)
                if prefix not in prefixes:
                    raise RdfSyntaxError(f"{path}:{lineno}: unknown prefix {prefix!r}")
                return prefixes[prefix] + local
        raise RdfSyntaxError(f"{path}:{lineno}: unexpected token {token!r}")

    tokens = list(_ttl_tokens(text))
    i = 0
    while i < len(tokens):
        lineno, kind, token = tokens[i]
        if kind == "word" and token in ("@prefix", "@base", "PREFIX", "BASE"):
            directive = token.lstrip("@").upper()
            if directive == "PREFIX":
                _, _, name_tok = tokens[i + 1]
                _, iri_kind, iri_tok = tokens[i + 2]
                if not name_tok.endswith(":") or iri_kind != "iri":
                    raise RdfSyntaxError(f"{path}:{lineno}: malformed @prefix")
                prefixes[name_tok[:-1]] = iri_tok[1:-1]
                i += 3
            else:
                _, iri_kind, iri_tok = tokens[i + 1]
                if iri_kind != "iri":
                    raise RdfSyntaxError(f"{path}:{lineno}: malformed @base")
                base = iri_tok[1:-1]
                i += 2
            if i < len(tokens) and tokens[i][2] == ".":
                i += 1
            continue

        subject = resolve(lineno, kind, token)
        i += 1
        while True:
            if i >= len(tokens):
                raise RdfSyntaxError(f"{path}:{lineno}: statement not terminated with '.'")
            plineno, pkind, ptok = tokens[i]
            predicate = resolve(plineno, pkind, ptok)
            i += 1
            while True:
                if i >= len(tokens):
                    raise RdfSyntaxError(f"{path}:{plineno}: missing object")
                olineno, okind, otok = tokens[i]
                i += 1
                if okind == "literal":
                    body = re.sub(r"(\^\^\S+|@[\w-]+)$", "", otok)
                    value = body[1:-1].replace('\\"', '"')
                    if local_name(predicate) == "label":
                        st.add_label(subject, value)
                elif local_name(predicate) == "type" and predicate.startswith(RDF_NS):
                    st.add_type(subject, resolve(olineno, okind, otok))
                else:
                    st.add_triple(subject, predicate, resolve(olineno, okind, otok))
                if i < len(tokens) and tokens[i][2] == ",":
                    i += 1
                    continue
                break
            if i < len(tokens) and tokens[i][2] == ";":
                i += 1
                # tolerate trailing ';' before '.'
                if i < len(tokens) and tokens[i][2] == ".":
                    i += 1
                    break
                continue
            if i < len(tokens) and tokens[i][2] == ".":
                i += 1
                break
            raise RdfSyntaxError(f"{path}:{plineno}: expected ';', ',' or '.'")
        # next statement
    return st.build(hierarchy_predicates)


def parse_rdf(
    path: str | Path,
    syntax: str | None = None,
    hierarchy_predicates=DEFAULT_HIERARCHY_PREDICATES,
) -> DomainModel:
    """Parse an RDF file into a DomainModel.

    ``syntax`` is "rdf-xml" or "turtle"; when omitted it is inferred from the
    file extension (.ttl means Turtle, anything else RDF/XML).
    """
    path = Path(path)
    if syntax is None:
        syntax = "turtle" if path.suffix.lower() in (".ttl", ".turtle", ".n3") else "rdf-xml"
    if syntax == "rdf-xml":
        model = _parse_rdf_xml(path, hierarchy_predicates)
    elif syntax == "turtle":
        model = _parse_turtle(path, hierarchy_predicates)
    else:
        raise ValueError(f"unknown RDF syntax {syntax!r}")
    logger.info(
        "parsed %s: %d entities (%d Classes), %d triples",
        path.name,
        len(model.entities),
        len(model.classes()),
        len(model.triples),
    )
    return model


def classes_of(model: DomainModel) -> set[str]:
    """IRIs of the Classes entities (the concept vocabulary of the model)."""
    out = {e.iri for e in model.entities.values() if e.category == "Classes"}
    if not out:
        logger.warning("domain model contains no Classes entities")
    return out


def _hierarchy_edges(model: DomainModel) -> list[tuple[str, str]]:
    """(child, parent) pairs from the configured hierarchy predicates."""
    edges = []
    direction = dict(model.hierarchy_predicates)
    for t in model.triples:
        if t.r not in direction:
            continue
        child, parent = (t.h, t.t) if direction[t.r] else (t.t, t.h)
        edges.append((child, parent))
    return edges


def build_hierarchy(model: DomainModel, extra_class_nodes: set[str] | None = None) -> HierarchyTree:
    """Class tree with parent map, BFS levels, and Root/Intermediate/Leaf labels.

    Only Classes entities participate (plus ``extra_class_nodes``, used when a
    completed model adds requirement concepts). Multiple declared parents keep
    the lexicographically first IRI and log a warning; cycles raise.
    """
    class_iris = {e.iri for e in model.entities.values() if e.category == "Classes"}
    if extra_class_nodes:
        class_iris |= set(extra_class_nodes)
    candidate_parents: dict[str, list[str]] = {}
    for child, parent in _hierarchy_edges(model):
        if child in class_iris and parent in class_iris:
            candidate_parents.setdefault(child, []).append(parent)

    parent_of: dict[str, str] = {}
    for child, parents in sorted(candidate_parents.items()):
        chosen = sorted(set(parents))[0]
        if len(set(parents)) > 1:
            logger.warning(
                "entity %s has %d parents; keeping %s", child, len(set(parents)), chosen
            )
        parent_of[child] = chosen

    children_of: dict[str, list[str]] = {iri: [] for iri in class_iris}
    for child, parent in parent_of.items():
        children_of[parent].append(child)
    for parent in children_of:
        children_of[parent].sort()

    roots = tuple(sorted(iri for iri in class_iris if iri not in parent_of))

    level: dict[str, int] = {}
    queue = deque((r, 0) for r in roots)
    while queue:
        node, lv = queue.popleft()
        level[node] = lv
        for child in children_of[node]:
            queue.append((child, lv + 1))

    if len(level) != len(class_iris):
        unreached = sorted(class_iris - set(level))
        cycle = _find_cycle(parent_of, unreached)
        raise HierarchyCycleError(cycle)

    position = {}
    for iri in class_iris:
        if iri not in parent_of:
            position[iri] = "Root"
        elif children_of[iri]:
            position[iri] = "Intermediate"
        else:
            position[iri] = "Leaf"

    return HierarchyTree(
        parent_of=parent_of,
        children_of={k: tuple(v) for k, v in children_of.items()},
        roots=roots,
        level=level,
        position=position,
    )


def _find_cycle(parent_of: dict[str, str], start_nodes: list[str]) -> list[str]:
    for start in start_nodes:
        seen: list[str] = []
        node = start
        while node in parent_of and node not in seen:
            seen.append(node)
            node = parent_of[node]
        if node in seen:
            return seen[seen.index(node):]
    return start_nodes


def model_to_dict(model: DomainModel) -> dict:
    return {
        "schema": 1,
        "entities": [
            {"iri": e.iri, "label": e.label, "category": e.category}
            for e in sorted(model.entities.values(), key=lambda e: e.iri)
        ],
        "triples": sorted([t.h, t.r, t.t] for t in model.triples),
        "hierarchy_predicates": [list(p) for p in model.hierarchy_predicates],
    }


def model_from_dict(obj: dict) -> DomainModel:
    entities = {
        e["iri"]: Entity(iri=e["iri"], label=e["label"], category=e["category"])
        for e in obj["entities"]
    }
    triples = tuple(FactTriple(h, r, t) for h, r, t in obj["triples"])
    preds = tuple((name, bool(flag)) for name, flag in obj["hierarchy_predicates"])
    return DomainModel(entities=entities, triples=triples, hierarchy_predicates=preds)


def tree_to_dict(tree: HierarchyTree) -> dict:
    return {
        "schema": 1,
        "parents": dict(sorted(tree.parent_of.items())),
        "roots": list(tree.roots),
        "levels": dict(sorted(tree.level.items())),
        "positions": dict(sorted(tree.position.items())),
    }


def save_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8")
