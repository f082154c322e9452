// Pure review/explorer state logic. Everything here is server-fed: the UI
// never recomputes scores, AHME values, or mapping status on its own.
export function itemScore(item) {
    const payload = item.payload;
    return payload.cvalue ?? payload.similarity ?? 0;
}
export function itemLabel(item) {
    if (item.kind === "Term") {
        return item.payload.label;
    }
    const p = item.payload;
    return `${p.a} ~ ${p.b}`;
}
export function orderQueue(items) {
    return [...items].sort((a, b) => itemScore(b) - itemScore(a) || a.id.localeCompare(b.id));
}
// Pending -> Accepted/Rejected, and flips between the two decided states.
// Nothing ever goes back to Pending.
export function canTransition(from, to) {
    return to !== "Pending" && from !== to;
}
export function applyDecision(items, id, decision) {
    return items.map((item) => {
        if (item.id !== id) {
            return item;
        }
        if (!canTransition(item.decision, decision)) {
            throw new Error(`cannot move ${item.id} from ${item.decision} to ${decision}`);
        }
        return { ...item, decision };
    });
}
export function appendAudit(trail, id, decision) {
    return [...trail, { id, decision, at: Date.now() }];
}
export function auditCount(trail, id) {
    return trail.filter((e) => e.id === id).length;
}
export function progress(items) {
    const accepted = items.filter((i) => i.decision === "Accepted").length;
    const rejected = items.filter((i) => i.decision === "Rejected").length;
    return { total: items.length, decided: accepted + rejected, accepted, rejected };
}
export function buildTree(nodes) {
    const byIri = new Map();
    for (const data of nodes) {
        byIri.set(data.iri, { ...data, children: [] });
    }
    const roots = [];
    for (const node of byIri.values()) {
        const parent = node.parent !== null ? byIri.get(node.parent) : undefined;
        if (parent) {
            parent.children.push(node);
        }
        else {
            roots.push(node);
        }
    }
    const byLabel = (a, b) => a.label.localeCompare(b.label);
    for (const node of byIri.values()) {
        node.children.sort(byLabel);
    }
    roots.sort(byLabel);
    return { roots, byIri };
}
// Family metadata is displayed exactly as served; this only indexes it.
export function familyByRoot(roots) {
    return new Map(roots.map((r) => [r.node, r]));
}
export function trackConfigHash(state, incoming) {
    if (state.hash === null) {
        return { hash: incoming, stale: false };
    }
    return { hash: state.hash, stale: state.hash !== incoming };
}
