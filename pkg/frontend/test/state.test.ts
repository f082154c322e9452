import assert from "node:assert/strict";
import { test } from "node:test";

import {
    ReviewItem,
    TreeNodeData,
    appendAudit,
    applyDecision,
    auditCount,
    buildTree,
    canTransition,
    familyByRoot,
    itemLabel,
    orderQueue,
    progress,
    trackConfigHash,
} from "../src/state.js";

function term(id: string, cvalue: number, decision: ReviewItem["decision"] = "Pending"): ReviewItem {
    return {
        id,
        kind: "Term",
        payload: { label: id.replace(/-/g, " "), words: id.split("-"), cvalue, frequency: 1 },
        decision,
    };
}

function synonym(id: string, similarity: number): ReviewItem {
    return {
        id,
        kind: "SynonymPair",
        payload: { a: "flight pattern", b: "flight phase", rule: "R2", similarity, key: id },
        decision: "Pending",
    };
}

test("decision transitions follow the review rules", () => {
    assert.equal(canTransition("Pending", "Accepted"), true);
    assert.equal(canTransition("Pending", "Rejected"), true);
    assert.equal(canTransition("Accepted", "Rejected"), true);
    assert.equal(canTransition("Rejected", "Accepted"), true);
    assert.equal(canTransition("Accepted", "Pending"), false);
    assert.equal(canTransition("Rejected", "Pending"), false);
    assert.equal(canTransition("Accepted", "Accepted"), false);
});

test("reject then re-accept ends Accepted with an audit trail of two", () => {
    let items = [term("flight-pattern", 2.0)];
    let trail = appendAudit([], "flight-pattern", "Rejected");
    items = applyDecision(items, "flight-pattern", "Rejected");
    trail = appendAudit(trail, "flight-pattern", "Accepted");
    items = applyDecision(items, "flight-pattern", "Accepted");
    assert.equal(items[0].decision, "Accepted");
    assert.equal(auditCount(trail, "flight-pattern"), 2);
});

test("invalid transition throws and leaves others untouched", () => {
    const items = [term("a", 1), term("b", 2, "Accepted")];
    assert.throws(() => applyDecision(items, "b", "Accepted"), /cannot move/);
    const updated = applyDecision(items, "a", "Accepted");
    assert.equal(updated[1], items[1]);
});

test("queue orders by score descending with stable id ties", () => {
    const items = [term("low", 0.5), synonym("pair", 0.9), term("high", 3.0), term("also-low", 0.5)];
    const ordered = orderQueue(items);
    assert.deepEqual(ordered.map((i) => i.id), ["high", "pair", "also-low", "low"]);
});

test("progress counts decided items", () => {
    const items = [term("a", 1, "Accepted"), term("b", 1, "Rejected"), term("c", 1)];
    assert.deepEqual(progress(items), { total: 3, decided: 2, accepted: 1, rejected: 1 });
});

test("item labels render both kinds", () => {
    assert.equal(itemLabel(term("flight-pattern", 1)), "flight pattern");
    assert.equal(itemLabel(synonym("p", 0.9)), "flight pattern ~ flight phase");
});

const NODES: TreeNodeData[] = [
    { iri: "e:R", label: "root", level: 0, position: "Root", parent: null, mapped: false, family: null },
    { iri: "e:M", label: "mission element", level: 1, position: "Intermediate", parent: "e:R", mapped: false, family: "e:M" },
    { iri: "e:F", label: "flight pattern", level: 2, position: "Leaf", parent: "e:M", mapped: true, family: "e:M" },
    { iri: "e:G", label: "ground station", level: 1, position: "Leaf", parent: "e:R", mapped: true, family: null },
];

test("tree building wires children and sorts by label", () => {
    const built = buildTree(NODES);
    assert.equal(built.roots.length, 1);
    const root = built.roots[0];
    assert.deepEqual(root.children.map((c) => c.label), ["ground station", "mission element"]);
    const mission = built.byIri.get("e:M")!;
    assert.deepEqual(mission.children.map((c) => c.iri), ["e:F"]);
});

test("orphaned parents become roots rather than disappearing", () => {
    const built = buildTree([
        { iri: "e:X", label: "adrift", level: 3, position: "Leaf", parent: "e:GONE", mapped: false, family: null },
    ]);
    assert.deepEqual(built.roots.map((r) => r.iri), ["e:X"]);
});

test("family metadata is passed through verbatim, never recomputed", () => {
    const roots = [
        { node: "e:M", label: "mission element", ahme: 0.26, level: 1, mapped_descendants: 6 },
    ];
    const index = familyByRoot(roots);
    assert.equal(index.get("e:M")!.ahme, 0.26);
    assert.equal(index.get("e:M")!.mapped_descendants, 6);
});

test("config hash tracking flags staleness once the hash changes", () => {
    let state = trackConfigHash({ hash: null, stale: false }, "abc");
    assert.deepEqual(state, { hash: "abc", stale: false });
    state = trackConfigHash(state, "abc");
    assert.equal(state.stale, false);
    state = trackConfigHash(state, "def");
    assert.equal(state.stale, true);
    assert.equal(state.hash, "abc");
});
