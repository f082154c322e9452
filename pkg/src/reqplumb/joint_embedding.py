"""Joint embedding of domain-model entities/relations and requirement terms.

Everything scores with the translation form

    z(h, r, t) = b - 1/2 * ||h + r - t||^2

and three losses share one vector space:

* knowledge loss: for every model triple, -[log Pr(h|r,t) + log Pr(r|h,t)
  + log Pr(t|h,r)], each conditional a softmax of z over the slot's own
  candidate pool (entities for h/t, relations for r);
* requirement loss: co-occurring term pairs scored with a zero relation
  vector, softmax over the term vocabulary;
* alignment loss: mapped term/entity names generate substituted triples
  (w_h, r, t), (h, r, w_t), (w_h, r, w_t) that are scored like facts, a term
  slot normalizing over terms and an entity slot over entities.

The total loss is minimized by full-batch gradient descent. Gradients are
analytic; with softmax_mode "full" and a fixed seed training is bitwise
reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus_ingest import Requirement, RequirementSet
from .domain_model import DomainModel, FactTriple
from .mapping import MappingSet
from .term_extraction import TermSet

logger = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite; carries the last finite-loss space."""

    def __init__(self, epoch: int, checkpoint: "EmbeddingSpace"):
        self.epoch = epoch
        self.checkpoint = checkpoint
        super().__init__(f"training diverged at epoch {epoch}")


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 50
    epochs: int = 500
    learning_rate: float = 0.01
    batch_size: int = 0  # 0 = full batch
    seed: int = 0
    bias: float = 7.0
    softmax_mode: str = "full"  # full | sampled
    sample_k: int = 25
    init_mode: str = "uniform"  # uniform | integer

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class EmbeddingSpace:
    dim: int
    bias: float
    entity_index: dict[str, int]
    relation_index: dict[str, int]
    term_index: dict[str, int]
    entity_vecs: np.ndarray
    relation_vecs: np.ndarray
    term_vecs: np.ndarray

    def copy(self) -> "EmbeddingSpace":
        return EmbeddingSpace(
            dim=self.dim, bias=self.bias,
            entity_index=dict(self.entity_index),
            relation_index=dict(self.relation_index),
            term_index=dict(self.term_index),
            entity_vecs=self.entity_vecs.copy(),
            relation_vecs=self.relation_vecs.copy(),
            term_vecs=self.term_vecs.copy(),
        )

    def entity_vec(self, iri: str) -> np.ndarray:
        return self.entity_vecs[self.entity_index[iri]]

    def term_vec(self, label: str) -> np.ndarray:
        return self.term_vecs[self.term_index[label]]

    def node_vec(self, node: tuple[str, str]) -> np.ndarray:
        kind, name = node
        if kind == "entity":
            return self.entity_vec(name)
        if kind == "term":
            return self.term_vec(name)
        raise KeyError(f"unknown node kind {kind!r}")


def score_z(h: np.ndarray, r: np.ndarray, t: np.ndarray, b: float) -> float:
    """b - 1/2 * ||h + r - t||^2."""
    h, r, t = np.asarray(h, float), np.asarray(r, float), np.asarray(t, float)
    if not (h.shape == r.shape == t.shape):
        raise ValueError(f"dimension mismatch: {h.shape}, {r.shape}, {t.shape}")
    d = h + r - t
    return float(b - 0.5 * np.dot(d, d))


def _logsumexp(m: np.ndarray) -> np.ndarray:
    mx = m.max(axis=1, keepdims=True)
    return (mx + np.log(np.exp(m - mx).sum(axis=1, keepdims=True))).ravel()


def _slot_softmax(pool: np.ndarray, fixed: np.ndarray, targets: np.ndarray, bias: float,
                  cols: np.ndarray | None = None):
    """Loss and gradients for one softmax slot.

    z[i, j] = bias - 1/2 * ||pool[j] + fixed[i]||^2, normalized over j (or over
    the ``cols`` subset in sampled mode). Returns (loss, grad_pool, grad_fixed).
    """
    sub = pool if cols is None else pool[cols]
    # targets expressed in column space
    if cols is None:
        tcol = targets
    else:
        lookup = {int(c): k for k, c in enumerate(cols)}
        tcol = np.array([lookup[int(t)] for t in targets], dtype=np.int64)
    with np.errstate(over="ignore", invalid="ignore"):
        pn = np.einsum("jd,jd->j", sub, sub)
        fn = np.einsum("id,id->i", fixed, fixed)
        m = bias - 0.5 * (pn[None, :] + fn[:, None] + 2.0 * fixed @ sub.T)
    lse = _logsumexp(m)
    loss = float(np.sum(lse - m[np.arange(len(targets)), tcol]))
    p = np.exp(m - lse[:, None])
    d = p
    d[np.arange(len(targets)), tcol] -= 1.0
    colsum = d.sum(axis=0)
    grad_sub = -colsum[:, None] * sub - d.T @ fixed
    grad_fixed = -(d @ sub)
    if cols is None:
        grad_pool = grad_sub
    else:
        grad_pool = np.zeros_like(pool)
        np.add.at(grad_pool, cols, grad_sub)
    return loss, grad_pool, grad_fixed


@dataclass
class _Group:
    """A batch of triples whose slots draw on fixed candidate pools."""

    head_pool: str
    rel_pool: str | None  # None = fixed zero relation, no r softmax
    tail_pool: str
    hi: np.ndarray
    ri: np.ndarray | None
    ti: np.ndarray
    softmax_tail: bool = True


def _group_loss(group: _Group, pools: dict[str, np.ndarray], bias: float,
                grads: dict[str, np.ndarray] | None,
                rng: np.random.Generator | None = None, sample_k: int = 0) -> float:
    hp = pools[group.head_pool]
    tp = pools[group.tail_pool]
    h = hp[group.hi]
    t = tp[group.ti]
    if group.rel_pool is not None:
        rp = pools[group.rel_pool]
        r = rp[group.ri]
    else:
        r = np.zeros_like(h)

    def pick_cols(pool_len: int, targets: np.ndarray) -> np.ndarray | None:
        if sample_k <= 0 or rng is None or pool_len <= sample_k:
            return None
        sampled = rng.choice(pool_len, size=sample_k, replace=False)
        return np.unique(np.concatenate([sampled, targets]))

    total = 0.0
    # head slot
    fixed = r - t
    loss, g_pool, g_fixed = _slot_softmax(hp, fixed, group.hi, bias,
                                          pick_cols(len(hp), group.hi))
    total += loss
    if grads is not None:
        grads[group.head_pool] += g_pool
        if group.rel_pool is not None:
            np.add.at(grads[group.rel_pool], group.ri, g_fixed)
        np.add.at(grads[group.tail_pool], group.ti, -g_fixed)

    # relation slot
    if group.rel_pool is not None:
        rp = pools[group.rel_pool]
        fixed = h - t
        loss, g_pool, g_fixed = _slot_softmax(rp, fixed, group.ri, bias,
                                              pick_cols(len(rp), group.ri))
        total += loss
        if grads is not None:
            grads[group.rel_pool] += g_pool
            np.add.at(grads[group.head_pool], group.hi, g_fixed)
            np.add.at(grads[group.tail_pool], group.ti, -g_fixed)

    # tail slot: ||h + r - c|| == ||c + (-(h + r))||
    if group.softmax_tail:
        fixed = -(h + r)
        loss, g_pool, g_fixed = _slot_softmax(tp, fixed, group.ti, bias,
                                              pick_cols(len(tp), group.ti))
        total += loss
        if grads is not None:
            grads[group.tail_pool] += g_pool
            np.add.at(grads[group.head_pool], group.hi, -g_fixed)
            if group.rel_pool is not None:
                np.add.at(grads[group.rel_pool], group.ri, -g_fixed)
    return total


def conditional_probabilities(space: EmbeddingSpace, triple: FactTriple, slot: str) -> np.ndarray:
    """Pr over the slot's candidate pool for one fact triple ("h", "r" or "t")."""
    h = space.entity_vec(triple.h)
    r = space.relation_vecs[space.relation_index[triple.r]]
    t = space.entity_vec(triple.t)
    if slot == "h":
        scores = [score_z(c, r, t, space.bias) for c in space.entity_vecs]
    elif slot == "r":
        scores = [score_z(h, c, t, space.bias) for c in space.relation_vecs]
    elif slot == "t":
        scores = [score_z(h, r, c, space.bias) for c in space.entity_vecs]
    else:
        raise ValueError(f"unknown slot {slot!r}")
    arr = np.array(scores)
    arr -= arr.max()
    e = np.exp(arr)
    return e / e.sum()


def fact_likelihood(triple: FactTriple, space: EmbeddingSpace) -> float:
    """log Pr(h|r,t) + log Pr(r|h,t) + log Pr(t|h,r); always <= 0."""
    if not space.entity_index or not space.relation_index:
        raise ValueError("empty candidate set")
    group = _Group(
        head_pool="entity", rel_pool="relation", tail_pool="entity",
        hi=np.array([space.entity_index[triple.h]]),
        ri=np.array([space.relation_index[triple.r]]),
        ti=np.array([space.entity_index[triple.t]]),
    )
    pools = {"entity": space.entity_vecs, "relation": space.relation_vecs}
    return -_group_loss(group, pools, space.bias, grads=None)


def knowledge_loss(space: EmbeddingSpace, triples: Iterable[FactTriple]) -> float:
    triples = list(triples)
    if not triples:
        return 0.0
    group = _knowledge_group(space, triples)
    pools = {"entity": space.entity_vecs, "relation": space.relation_vecs}
    return _group_loss(group, pools, space.bias, grads=None)


def _knowledge_group(space: EmbeddingSpace, triples: Sequence[FactTriple]) -> _Group:
    return _Group(
        head_pool="entity", rel_pool="relation", tail_pool="entity",
        hi=np.array([space.entity_index[t.h] for t in triples], dtype=np.int64),
        ri=np.array([space.relation_index[t.r] for t in triples], dtype=np.int64),
        ti=np.array([space.entity_index[t.t] for t in triples], dtype=np.int64),
    )


def match_terms_in_requirement(
    req: Requirement, mwts: set[tuple[str, ...]], stopwords: frozenset[str]
) -> list[str]:
    """Greedy longest-first matching of known terms, then residual nouns."""
    norms = [t.norm for t in req.tokens]
    pos = [t.pos for t in req.tokens]
    by_len = sorted({len(m) for m in mwts}, reverse=True)
    found: list[str] = []
    i = 0
    while i < len(norms):
        matched = False
        for L in by_len:
            if i + L <= len(norms) and tuple(norms[i : i + L]) in mwts:
                found.append(" ".join(norms[i : i + L]))
                i += L
                matched = True
                break
        if not matched:
            if pos[i] == "NOUN" and norms[i] not in stopwords:
                found.append(norms[i])
            i += 1
    return found


def term_vocabulary(
    reqs: RequirementSet, rt: TermSet, stopwords: frozenset[str]
) -> tuple[list[str], dict[str, list[str]]]:
    """The term set V: extracted multi-word terms plus residual standalone nouns.

    Returns (sorted vocabulary, requirement id -> terms found in it).
    """
    mwts = rt.word_tuples()
    per_req: dict[str, list[str]] = {}
    vocab: set[str] = set()
    for req in reqs.requirements:
        terms = match_terms_in_requirement(req, mwts, stopwords)
        per_req[req.id] = terms
        vocab.update(terms)
    return sorted(vocab), per_req


def requirement_cooccurrence(
    reqs: RequirementSet, rt: TermSet, stopwords: frozenset[str],
    window: str = "requirement",
) -> set[tuple[str, str]]:
    """Unordered co-occurring term pairs; every two terms sharing a requirement pair up."""
    if window != "requirement":
        raise ValueError(f"unsupported co-occurrence window {window!r}")
    _, per_req = term_vocabulary(reqs, rt, stopwords)
    pairs: set[tuple[str, str]] = set()
    for terms in per_req.values():
        uniq = sorted(set(terms))
        for i in range(len(uniq)):
            for j in range(i + 1, len(uniq)):
                pairs.add((uniq[i], uniq[j]))
    return pairs


def requirement_loss(space: EmbeddingSpace, pairs: Iterable[tuple[str, str]]) -> float:
    """Co-occurrence loss; each unordered pair contributes both directions."""
    pairs = list(pairs)
    if not pairs or not space.term_index:
        return 0.0
    group = _requirement_group(space, pairs)
    return _group_loss(group, {"term": space.term_vecs}, space.bias, grads=None)


def _requirement_group(space: EmbeddingSpace, pairs: Sequence[tuple[str, str]]) -> _Group:
    ai = [space.term_index[a] for a, b in pairs]
    bi = [space.term_index[b] for a, b in pairs]
    heads = np.array(ai + bi, dtype=np.int64)
    tails = np.array(bi + ai, dtype=np.int64)
    return _Group(head_pool="term", rel_pool=None, tail_pool="term",
                  hi=heads, ri=None, ti=tails, softmax_tail=False)


Node = tuple[str, str]  # ("entity", iri) | ("term", label)


def alignment_triplets(
    triples: Iterable[FactTriple], mapping: MappingSet, vocabulary: set[str]
) -> set[tuple[Node, str, Node]]:
    """Substituted triples tying mapped terms to their entities.

    For (h, r, t): every vocabulary term mapped to h yields (w_h, r, t), every
    term mapped to t yields (h, r, w_t), and both together yield (w_h, r, w_t).
    """
    terms_of: dict[str, list[str]] = {}
    for p in mapping.pairs:
        if p.term in vocabulary:
            terms_of.setdefault(p.entity_iri, []).append(p.term)
    out: set[tuple[Node, str, Node]] = set()
    for triple in triples:
        for w_h in terms_of.get(triple.h, ()):
            out.add((("term", w_h), triple.r, ("entity", triple.t)))
        for w_t in terms_of.get(triple.t, ()):
            out.add((("entity", triple.h), triple.r, ("term", w_t)))
        for w_h in terms_of.get(triple.h, ()):
            for w_t in terms_of.get(triple.t, ()):
                out.add((("term", w_h), triple.r, ("term", w_t)))
    return out


def _alignment_groups(space: EmbeddingSpace,
                      triplets: Iterable[tuple[Node, str, Node]]) -> list[_Group]:
    buckets: dict[tuple[str, str], list] = {}
    for h, r, t in sorted(triplets):
        buckets.setdefault((h[0], t[0]), []).append((h[1], r, t[1]))
    groups = []
    for (hk, tk), items in sorted(buckets.items()):
        h_index = space.term_index if hk == "term" else space.entity_index
        t_index = space.term_index if tk == "term" else space.entity_index
        groups.append(_Group(
            head_pool=hk, rel_pool="relation", tail_pool=tk,
            hi=np.array([h_index[h] for h, _, _ in items], dtype=np.int64),
            ri=np.array([space.relation_index[r] for _, r, _ in items], dtype=np.int64),
            ti=np.array([t_index[t] for _, _, t in items], dtype=np.int64),
        ))
    return groups


def alignment_loss(space: EmbeddingSpace,
                   triplets: Iterable[tuple[Node, str, Node]]) -> float:
    triplets = list(triplets)
    if not triplets:
        return 0.0
    pools = {"entity": space.entity_vecs, "relation": space.relation_vecs,
             "term": space.term_vecs}
    return sum(_group_loss(g, pools, space.bias, grads=None)
               for g in _alignment_groups(space, triplets))


@dataclass
class TrainLogRow:
    epoch: int
    loss: float
    loss_k: float
    loss_r: float
    loss_a: float


@dataclass
class JointProblem:
    """Frozen inputs of one training run: pools, triples, pairs, alignments."""

    space: EmbeddingSpace
    knowledge: _Group | None
    requirement: _Group | None
    alignment: list[_Group] = field(default_factory=list)


def init_space(model: DomainModel, vocabulary: Sequence[str], cfg: TrainConfig) -> EmbeddingSpace:
    entity_index = {iri: i for i, iri in enumerate(sorted(model.entities))}
    relation_index = {r: i for i, r in enumerate(model.relation_names())}
    term_index = {t: i for i, t in enumerate(sorted(vocabulary))}
    rng = np.random.default_rng(cfg.seed)
    bound = 6.0 / np.sqrt(cfg.dim)

    def init(n: int) -> np.ndarray:
        if n == 0:
            return np.zeros((0, cfg.dim))
        if cfg.init_mode == "integer":
            return rng.integers(-6, 7, size=(n, cfg.dim)).astype(float)
        return rng.uniform(-bound, bound, size=(n, cfg.dim))

    return EmbeddingSpace(
        dim=cfg.dim, bias=cfg.bias,
        entity_index=entity_index, relation_index=relation_index, term_index=term_index,
        entity_vecs=init(len(entity_index)),
        relation_vecs=init(len(relation_index)),
        term_vecs=init(len(term_index)),
    )


def build_problem(
    model: DomainModel,
    reqs: RequirementSet,
    rt: TermSet,
    mapping: MappingSet,
    cfg: TrainConfig,
    stopwords: frozenset[str],
) -> JointProblem:
    vocabulary, _ = term_vocabulary(reqs, rt, stopwords)
    space = init_space(model, vocabulary, cfg)
    knowledge = _knowledge_group(space, model.triples) if model.triples else None
    pairs = sorted(requirement_cooccurrence(reqs, rt, stopwords))
    requirement = _requirement_group(space, pairs) if pairs else None
    align = alignment_triplets(model.triples, mapping, set(vocabulary))
    return JointProblem(space=space, knowledge=knowledge, requirement=requirement,
                        alignment=_alignment_groups(space, align))


def _losses_and_grads(problem: JointProblem, with_grads: bool,
                      rng: np.random.Generator | None = None, sample_k: int = 0):
    space = problem.space
    pools = {"entity": space.entity_vecs, "relation": space.relation_vecs,
             "term": space.term_vecs}
    grads = None
    if with_grads:
        grads = {name: np.zeros_like(mat) for name, mat in pools.items()}
    l_k = (_group_loss(problem.knowledge, pools, space.bias, grads, rng, sample_k)
           if problem.knowledge is not None else 0.0)
    l_r = (_group_loss(problem.requirement, pools, space.bias, grads, rng, sample_k)
           if problem.requirement is not None else 0.0)
    l_a = sum(_group_loss(g, pools, space.bias, grads, rng, sample_k)
              for g in problem.alignment)
    return l_k, l_r, l_a, grads


def train_joint(
    model: DomainModel,
    reqs: RequirementSet,
    rt: TermSet,
    mapping: MappingSet,
    cfg: TrainConfig,
    stopwords: frozenset[str],
) -> tuple[EmbeddingSpace, list[TrainLogRow]]:
    """Gradient-descent training of the combined loss; deterministic per seed."""
    problem = build_problem(model, reqs, rt, mapping, cfg, stopwords)
    space = problem.space
    rng = np.random.default_rng(cfg.seed + 1)
    sample_k = cfg.sample_k if cfg.softmax_mode == "sampled" else 0
    log: list[TrainLogRow] = []
    checkpoint = space.copy()
    for epoch in range(cfg.epochs):
        l_k, l_r, l_a, grads = _losses_and_grads(problem, True, rng, sample_k)
        total = l_k + l_r + l_a
        if not np.isfinite(total):
            raise TrainingDivergedError(epoch, checkpoint)
        checkpoint = space.copy()
        log.append(TrainLogRow(epoch=epoch, loss=total, loss_k=l_k, loss_r=l_r, loss_a=l_a))
        lr = cfg.learning_rate
        space.entity_vecs -= lr * grads["entity"]
        space.relation_vecs -= lr * grads["relation"]
        space.term_vecs -= lr * grads["term"]
    final = sum(_losses_and_grads(problem, False, rng, sample_k)[:3])
    if cfg.epochs and not np.isfinite(final):
        raise TrainingDivergedError(cfg.epochs, checkpoint)
    logger.info("trained %d epochs, final loss %.4f", cfg.epochs, final)
    return space, log


def space_to_dict(space: EmbeddingSpace) -> dict:
    def block(index: dict[str, int], mat: np.ndarray, kind: str) -> dict:
        return {f"{kind}:{name}": [float(x) for x in mat[i]] for name, i in index.items()}

    vectors = {}
    vectors.update(block(space.entity_index, space.entity_vecs, "entity"))
    vectors.update(block(space.relation_index, space.relation_vecs, "relation"))
    vectors.update(block(space.term_index, space.term_vecs, "term"))
    return {"schema": 1, "dim": space.dim, "b": space.bias, "vectors": vectors}


def space_from_dict(obj: dict) -> EmbeddingSpace:
    groups: dict[str, dict[str, list[float]]] = {"entity": {}, "relation": {}, "term": {}}
    for key, vec in obj["vectors"].items():
        kind, name = key.split(":", 1)
        groups[kind][name] = vec

    def unpack(d: dict[str, list[float]], dim: int):
        index = {name: i for i, name in enumerate(sorted(d))}
        mat = np.zeros((len(index), dim))
        for name, i in index.items():
            mat[i] = d[name]
        return index, mat

    e_idx, e_mat = unpack(groups["entity"], obj["dim"])
    r_idx, r_mat = unpack(groups["relation"], obj["dim"])
    t_idx, t_mat = unpack(groups["term"], obj["dim"])
    return EmbeddingSpace(dim=obj["dim"], bias=obj["b"],
                          entity_index=e_idx, relation_index=r_idx, term_index=t_idx,
                          entity_vecs=e_mat, relation_vecs=r_mat, term_vecs=t_mat)
