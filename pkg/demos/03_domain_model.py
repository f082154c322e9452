"""Parse an RDF domain model and inspect its class hierarchy."""

from pathlib import Path

from reqplumb import build_hierarchy, classes_of, parse_rdf

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

model = parse_rdf(FIXTURES / "uavmini_model.rdf")
print(f"entities: {len(model.entities)}, Classes: {len(classes_of(model))}, "
      f"triples: {len(model.triples)}")
print("relations:", ", ".join(model.relation_names()))

tree = build_hierarchy(model)
print(f"\nhierarchy roots: {[model.entities[r].label for r in tree.roots]}")


def show(node: str, indent: int = 0) -> None:
    entity = model.entities[node]
    marker = {"Root": "*", "Intermediate": "+", "Leaf": "-"}[tree.position[node]]
    print("  " * indent + f"{marker} {entity.label} (level {tree.level[node]})")
    for child in tree.children_of.get(node, ()):
        show(child, indent + 1)


for root in tree.roots:
    show(root)

# the Turtle syntax works the same way, with subClassOf read child -> parent
bas = parse_rdf(FIXTURES / "basmini_model.ttl")
bas_tree = build_hierarchy(bas)
print(f"\nBAS-style model: {len(bas.entities)} Classes, "
      f"roots {[bas.entities[r].label for r in bas_tree.roots]}")
