// Typed client for the review HTTP API. Every response carries config_hash.

import type { Decision, FamilyRoot, ReviewItem, TreeNodeData } from "./state.js";

export class ApiError extends Error {
    constructor(
        public status: number,
        message: string,
        public hint?: string,
    ) {
        super(message);
    }
}

export interface Envelope {
    config_hash: string;
}

export interface ItemsResponse extends Envelope {
    items: ReviewItem[];
}

export interface FamilySelectionPayload {
    roots: FamilyRoot[];
    scope: string[];
    scope_fraction: number;
}

export interface FamiliesResponse extends Envelope {
    original: FamilySelectionPayload;
    completed: FamilySelectionPayload;
}

export interface TreeResponse extends Envelope {
    nodes: TreeNodeData[];
    roots: string[];
    families: FamilyRoot[];
}

export interface StatusResponse extends Envelope {
    stages: Record<string, string>;
    workspace: string;
}

async function request<T extends Envelope>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(path, init);
    const body = await resp.json();
    if (!resp.ok) {
        throw new ApiError(resp.status, body.error ?? resp.statusText, body.hint);
    }
    return body as T;
}

export const getStatus = (): Promise<StatusResponse> => request("/api/status");
export const getTerms = (): Promise<ItemsResponse> => request("/api/terms");
export const getSynonyms = (): Promise<ItemsResponse> => request("/api/synonyms");
export const getFamilies = (): Promise<FamiliesResponse> => request("/api/families");
export const getTree = (): Promise<TreeResponse> => request("/api/tree");

export function postDecision(
    kind: "terms" | "synonyms",
    id: string,
    decision: Decision,
): Promise<Envelope> {
    return request(`/api/${kind}/${encodeURIComponent(id)}/decision`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ decision }),
    });
}
