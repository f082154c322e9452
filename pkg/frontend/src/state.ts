// Pure review/explorer state logic. Everything here is server-fed: the UI
// never recomputes scores, AHME values, or mapping status on its own.

export type Decision = "Pending" | "Accepted" | "Rejected";
export type ReviewKind = "Term" | "SynonymPair";

export interface TermPayload {
    label: string;
    words: string[];
    cvalue: number;
    frequency: number;
}

export interface SynonymPayload {
    a: string;
    b: string;
    rule: string;
    similarity: number;
    key: string;
}

export interface ReviewItem {
    id: string;
    kind: ReviewKind;
    payload: TermPayload | SynonymPayload;
    decision: Decision;
}

export interface AuditEntry {
    id: string;
    decision: Decision;
    at: number;
}

export function itemScore(item: ReviewItem): number {
    const payload = item.payload as Partial<TermPayload & SynonymPayload>;
    return payload.cvalue ?? payload.similarity ?? 0;
}

export function itemLabel(item: ReviewItem): string {
    if (item.kind === "Term") {
        return (item.payload as TermPayload).label;
    }
    const p = item.payload as SynonymPayload;
    return `${p.a} ~ ${p.b}`;
}

export function orderQueue(items: ReviewItem[]): ReviewItem[] {
    return [...items].sort((a, b) => itemScore(b) - itemScore(a) || a.id.localeCompare(b.id));
}

// Pending -> Accepted/Rejected, and flips between the two decided states.
// Nothing ever goes back to Pending.
export function canTransition(from: Decision, to: Decision): boolean {
    return to !== "Pending" && from !== to;
}

export function applyDecision(
    items: ReviewItem[],
    id: string,
    decision: Decision,
): ReviewItem[] {
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

export function appendAudit(trail: AuditEntry[], id: string, decision: Decision): AuditEntry[] {
    return [...trail, { id, decision, at: Date.now() }];
}

export function auditCount(trail: AuditEntry[], id: string): number {
    return trail.filter((e) => e.id === id).length;
}

export interface Progress {
    total: number;
    decided: number;
    accepted: number;
    rejected: number;
}

export function progress(items: ReviewItem[]): Progress {
    const accepted = items.filter((i) => i.decision === "Accepted").length;
    const rejected = items.filter((i) => i.decision === "Rejected").length;
    return { total: items.length, decided: accepted + rejected, accepted, rejected };
}

// --- tree view ---------------------------------------------------------------

export interface TreeNodeData {
    iri: string;
    label: string;
    level: number;
    position: "Root" | "Intermediate" | "Leaf";
    parent: string | null;
    mapped: boolean;
    family: string | null;
}

export interface TreeNode extends TreeNodeData {
    children: TreeNode[];
}

export interface BuiltTree {
    roots: TreeNode[];
    byIri: Map<string, TreeNode>;
}

export function buildTree(nodes: TreeNodeData[]): BuiltTree {
    const byIri = new Map<string, TreeNode>();
    for (const data of nodes) {
        byIri.set(data.iri, { ...data, children: [] });
    }
    const roots: TreeNode[] = [];
    for (const node of byIri.values()) {
        const parent = node.parent !== null ? byIri.get(node.parent) : undefined;
        if (parent) {
            parent.children.push(node);
        } else {
            roots.push(node);
        }
    }
    const byLabel = (a: TreeNode, b: TreeNode) => a.label.localeCompare(b.label);
    for (const node of byIri.values()) {
        node.children.sort(byLabel);
    }
    roots.sort(byLabel);
    return { roots, byIri };
}

export interface FamilyRoot {
    node: string;
    label: string;
    ahme: number;
    level: number;
    mapped_descendants: number;
}

// Family metadata is displayed exactly as served; this only indexes it.
export function familyByRoot(roots: FamilyRoot[]): Map<string, FamilyRoot> {
    return new Map(roots.map((r) => [r.node, r]));
}

// --- config hash staleness -----------------------------------------------------

export interface HashState {
    hash: string | null;
    stale: boolean;
}

export function trackConfigHash(state: HashState, incoming: string): HashState {
    if (state.hash === null) {
        return { hash: incoming, stale: false };
    }
    return { hash: state.hash, stale: state.hash !== incoming };
}
