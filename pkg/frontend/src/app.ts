// Review application: term/synonym curation queues and the family explorer.

import {
    ApiError,
    getFamilies,
    getStatus,
    getSynonyms,
    getTerms,
    getTree,
    postDecision,
} from "./api.js";
import {
    AuditEntry,
    Decision,
    FamilyRoot,
    HashState,
    ReviewItem,
    TreeNode,
    appendAudit,
    applyDecision,
    buildTree,
    canTransition,
    familyByRoot,
    itemLabel,
    itemScore,
    orderQueue,
    progress,
    trackConfigHash,
} from "./state.js";

type Tab = "terms" | "synonyms" | "explorer";

const state = {
    tab: "terms" as Tab,
    items: { terms: [] as ReviewItem[], synonyms: [] as ReviewItem[] },
    selected: { terms: 0, synonyms: 0 },
    audit: [] as AuditEntry[],
    hash: { hash: null, stale: false } as HashState,
};

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

function $(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
}

function noteHash(hash: string): void {
    state.hash = trackConfigHash(state.hash, hash);
    $("stale-banner").hidden = !state.hash.stale;
}

// --- review queues -------------------------------------------------------------

function renderQueue(kind: "terms" | "synonyms"): void {
    const items = state.items[kind];
    const container = $(`${kind}-list`);
    container.replaceChildren();
    const p = progress(items);
    $(`${kind}-progress`).textContent =
        `${p.decided}/${p.total} decided - ${p.accepted} accepted, ${p.rejected} rejected`;
    if (items.length === 0) {
        container.append(el("p", "empty", "Nothing to review."));
        return;
    }
    items.forEach((item, index) => {
        const row = el("div", "row" + (index === state.selected[kind] ? " selected" : ""));
        row.append(el("span", `decision ${item.decision.toLowerCase()}`, item.decision));
        row.append(el("span", "label", itemLabel(item)));
        row.append(el("span", "score", itemScore(item).toFixed(3)));
        if (item.kind === "SynonymPair") {
            const rule = (item.payload as { rule: string }).rule;
            row.append(el("span", "rule", rule));
        }
        row.addEventListener("click", () => {
            state.selected[kind] = index;
            renderQueue(kind);
        });
        container.append(row);
    });
}

async function decide(kind: "terms" | "synonyms", decision: Decision): Promise<void> {
    const items = state.items[kind];
    const item = items[state.selected[kind]];
    if (!item || !canTransition(item.decision, decision)) {
        return;
    }
    // the decision is posted before any local state changes
    await postDecision(kind, item.id, decision).then((resp) => noteHash(resp.config_hash));
    state.items[kind] = applyDecision(items, item.id, decision);
    state.audit = appendAudit(state.audit, item.id, decision);
    if (state.selected[kind] < items.length - 1) {
        state.selected[kind] += 1;
    }
    renderQueue(kind);
}

// --- explorer --------------------------------------------------------------------

function renderNode(node: TreeNode, families: Map<string, FamilyRoot>): HTMLElement {
    const details = el("details") as HTMLDetailsElement;
    details.open = node.level < 2;
    const summary = el("summary");
    const label = el(
        "span",
        "node" + (node.mapped ? " mapped" : "") + (families.has(node.iri) ? " family-root" : ""),
        node.label,
    );
    summary.append(label);
    summary.append(el("span", "meta", ` L${node.level} ${node.position}`));
    if (node.family !== null) {
        summary.append(el("span", "family-tag", "in scope"));
    }
    details.append(summary);
    if (node.children.length === 0) {
        details.classList.add("leaf");
    }
    for (const child of node.children) {
        details.append(renderNode(child, families));
    }
    return details;
}

async function renderExplorer(): Promise<void> {
    const container = $("explorer-tree");
    const panel = $("family-panel");
    container.replaceChildren();
    panel.replaceChildren();
    try {
        const [tree, families] = [await getTree(), await getFamilies()];
        noteHash(tree.config_hash);
        noteHash(families.config_hash);
        const built = buildTree(tree.nodes);
        const index = familyByRoot(families.original.roots);
        for (const root of built.roots) {
            container.append(renderNode(root, index));
        }
        panel.append(el("h3", undefined, "AHME families (original model)"));
        for (const root of families.original.roots) {
            const card = el("div", "family-card");
            card.append(el("strong", undefined, root.label));
            card.append(el("div", undefined, `AHME ${root.ahme.toFixed(2)}`));
            card.append(el("div", undefined, `level ${root.level}`));
            card.append(el("div", undefined, `${root.mapped_descendants} mapped descendants`));
            panel.append(card);
        }
        const pct = (families.original.scope_fraction * 100).toFixed(1);
        panel.append(el("p", "meta", `scope covers ${pct}% of class entities`));
    } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
            container.append(
                el("p", "empty", `Not available yet - ${err.message} (${err.hint ?? "run the pipeline"}).`),
            );
            return;
        }
        throw err;
    }
}

// --- wiring ------------------------------------------------------------------------

function showTab(tab: Tab): void {
    state.tab = tab;
    for (const t of ["terms", "synonyms", "explorer"] as Tab[]) {
        $(`tab-${t}`).classList.toggle("active", t === tab);
        $(`panel-${t}`).hidden = t !== tab;
    }
    if (tab === "explorer") {
        void renderExplorer();
    }
}

async function loadQueues(): Promise<void> {
    try {
        const terms = await getTerms();
        noteHash(terms.config_hash);
        state.items.terms = orderQueue(terms.items);
    } catch (err) {
        if (!(err instanceof ApiError && err.status === 409)) throw err;
    }
    try {
        const synonyms = await getSynonyms();
        noteHash(synonyms.config_hash);
        state.items.synonyms = orderQueue(synonyms.items);
    } catch (err) {
        if (!(err instanceof ApiError && err.status === 409)) throw err;
    }
    renderQueue("terms");
    renderQueue("synonyms");
}

async function main(): Promise<void> {
    const status = await getStatus();
    noteHash(status.config_hash);
    $("workspace-name").textContent = status.workspace;
    for (const tab of ["terms", "synonyms", "explorer"] as Tab[]) {
        $(`tab-${tab}`).addEventListener("click", () => showTab(tab));
    }
    $("accept-btn").addEventListener("click", () => {
        if (state.tab !== "explorer") void decide(state.tab, "Accepted");
    });
    $("reject-btn").addEventListener("click", () => {
        if (state.tab !== "explorer") void decide(state.tab, "Rejected");
    });
    document.addEventListener("keydown", (event) => {
        if (state.tab === "explorer") return;
        const kind = state.tab;
        if (event.key === "a") void decide(kind, "Accepted");
        else if (event.key === "r") void decide(kind, "Rejected");
        else if (event.key === "j") {
            state.selected[kind] = Math.min(state.selected[kind] + 1,
                state.items[kind].length - 1);
            renderQueue(kind);
        } else if (event.key === "k") {
            state.selected[kind] = Math.max(state.selected[kind] - 1, 0);
            renderQueue(kind);
        }
    });
    $("reload-link").addEventListener("click", () => window.location.reload());
    await loadQueues();
    showTab("terms");
}

void main();
