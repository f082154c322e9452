"""Synonym pairs between requirement terms and model entity labels.

Multi-word terms are decomposed into head/middle/tail slots. Two terms are
synonymous when two slots agree and the remaining slot carries a single-word
synonym attested by the lexicon (rules R1-R4). Candidate pairs are generated
by cosine similarity of averaged word vectors trained on a local domain
corpus; rule-less high-similarity pairs are kept only as curation candidates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from .term_extraction import TermSet
from .text import normalize_word

logger = logging.getLogger(__name__)

RULE_NAMES = ("R1", "R2", "R3", "R4", "Lexicon", "EmbeddingOnly")


@dataclass(frozen=True)
class MWT:
    head: str
    middle: tuple[str, ...]
    tail: str
    full: tuple[str, ...]


@dataclass(frozen=True)
class SynonymPair:
    a: str
    b: str
    rule: str
    similarity: float = 0.0
    status: str = "Auto"

    def key(self) -> str:
        return "||".join(sorted((self.a, self.b)))


@dataclass(frozen=True)
class SynonymLexicon:
    pairs: frozenset[tuple[str, str]]

    def syn(self, x: str, y: str) -> bool:
        return x != y and ((x, y) in self.pairs or (y, x) in self.pairs)


def load_synonym_lexicon(path: str | Path | None = None) -> SynonymLexicon:
    """Load ``word1<TAB>word2`` pairs; defaults to the bundled extract."""
    if path is None:
        text = resources.files("reqplumb.data").joinpath("synonyms.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    pairs = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"malformed synonym lexicon line {lineno}: {line!r}")
        a, b = (p.strip().lower() for p in parts)
        if a and b and a != b:
            pairs.add((a, b))
    return SynonymLexicon(pairs=frozenset(pairs))


def decompose_mwt(term: Iterable[str]) -> MWT:
    """Head = first word, tail = last word, middle = the interior."""
    words = tuple(term)
    if not words:
        raise ValueError("cannot decompose an empty term")
    if len(words) > 6:
        raise ValueError(f"term too long ({len(words)} words): {' '.join(words)}")
    if len(words) == 1:
        return MWT(head=words[0], middle=(), tail="", full=words)
    return MWT(head=words[0], middle=words[1:-1], tail=words[-1], full=words)


def apply_rules(a: MWT, b: MWT, lexicon: SynonymLexicon) -> SynonymPair | None:
    """First matching rule among R1-R4, or None."""
    if a.full == b.full:
        return None
    rule = None
    if (
        a.tail and a.tail == b.tail and a.middle == b.middle
        and a.head and b.head and lexicon.syn(a.head, b.head)
    ):
        rule = "R1"
    elif (
        a.head and a.head == b.head and a.middle == b.middle
        and a.tail and b.tail and lexicon.syn(a.tail, b.tail)
    ):
        rule = "R2"
    elif (
        a.head and a.head == b.tail and a.middle == b.middle
        and a.tail and b.head and lexicon.syn(a.tail, b.head)
    ):
        rule = "R3"
    elif (
        a.tail and b.head == a.tail and a.middle == b.middle
        and b.tail and a.head and lexicon.syn(b.tail, a.head)
    ):
        rule = "R4"
    if rule is None:
        return None
    return SynonymPair(a=" ".join(a.full), b=" ".join(b.full), rule=rule)


@dataclass(frozen=True)
class WordEmbeddings:
    vocabulary: dict[str, int]
    dim: int
    vectors: np.ndarray  # (len(vocabulary), dim)

    def vector(self, word: str) -> np.ndarray | None:
        idx = self.vocabulary.get(word)
        return None if idx is None else self.vectors[idx]

    def term_vector(self, words: Iterable[str]) -> np.ndarray | None:
        vecs = [self.vectors[self.vocabulary[w]] for w in words if w in self.vocabulary]
        if not vecs:
            return None
        return np.mean(vecs, axis=0)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def _corpus_sentences(corpus_dir: Path) -> list[list[str]]:
    files = sorted(p for p in corpus_dir.iterdir() if p.is_file() and p.suffix == ".txt")
    if not files:
        raise ValueError(f"empty corpus: no .txt files in {corpus_dir}")
    sentences = []
    for f in files:
        for line in f.read_text("utf-8").splitlines():
            words = [normalize_word(w) for w in line.split()]
            words = [w for w in words if w]
            if words:
                sentences.append(words)
    if not sentences:
        raise ValueError(f"empty corpus: no text in {corpus_dir}")
    return sentences


def build_corpus_embeddings(
    corpus_dir: str | Path,
    dim: int = 50,
    seed: int = 0,
    window: int = 5,
    min_count: int = 2,
    epochs: int = 5,
    negatives: int = 5,
    lr: float = 0.025,
) -> WordEmbeddings:
    """Skip-gram embeddings with negative sampling; bit-deterministic per seed."""
    sentences = _corpus_sentences(Path(corpus_dir))
    counts: dict[str, int] = {}
    for sent in sentences:
        for w in sent:
            counts[w] = counts.get(w, 0) + 1
    vocab_words = sorted((w for w, c in counts.items() if c >= min_count),
                         key=lambda w: (-counts[w], w))
    if not vocab_words:
        raise ValueError(f"empty corpus: no word reaches min_count={min_count}")
    vocabulary = {w: i for i, w in enumerate(vocab_words)}
    v = len(vocab_words)

    pairs: list[tuple[int, int]] = []
    for sent in sentences:
        idxs = [vocabulary[w] for w in sent if w in vocabulary]
        for i, center in enumerate(idxs):
            lo, hi = max(0, i - window), min(len(idxs), i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    pairs.append((center, idxs[j]))
    if not pairs:
        raise ValueError("corpus has no co-occurring in-vocabulary words")

    rng = np.random.default_rng(seed)
    vec_in = (rng.random((v, dim)) - 0.5) / dim
    vec_out = np.zeros((v, dim))
    noise = np.array([counts[w] ** 0.75 for w in vocab_words])
    noise /= noise.sum()
    pair_arr = np.array(pairs, dtype=np.int64)

    total_batches = max(1, epochs * ((len(pair_arr) + 255) // 256))
    batch_no = 0
    for _ in range(epochs):
        order = rng.permutation(len(pair_arr))
        for start in range(0, len(order), 256):
            step = lr * max(1e-4, 1.0 - batch_no / total_batches)
            batch_no += 1
            batch = pair_arr[order[start : start + 256]]
            centers, contexts = batch[:, 0], batch[:, 1]
            neg = rng.choice(v, size=(len(batch), negatives), p=noise)
            vc = vec_in[centers]
            uo = vec_out[contexts]
            un = vec_out[neg]
            g_pos = _sigmoid(np.einsum("bd,bd->b", uo, vc)) - 1.0
            g_neg = _sigmoid(np.einsum("bkd,bd->bk", un, vc))
            # mean gradient per touched row keeps frequent words stable
            g_in = np.zeros_like(vec_in)
            n_in = np.zeros(v)
            np.add.at(g_in, centers, g_pos[:, None] * uo
                      + np.einsum("bk,bkd->bd", g_neg, un))
            np.add.at(n_in, centers, 1.0)
            g_out = np.zeros_like(vec_out)
            n_out = np.zeros(v)
            np.add.at(g_out, contexts, g_pos[:, None] * vc)
            np.add.at(n_out, contexts, 1.0)
            np.add.at(g_out, neg.ravel(),
                      (g_neg[:, :, None] * vc[:, None, :]).reshape(-1, dim))
            np.add.at(n_out, neg.ravel(), 1.0)
            vec_in -= step * g_in / np.maximum(n_in, 1.0)[:, None]
            vec_out -= step * g_out / np.maximum(n_out, 1.0)[:, None]

    return WordEmbeddings(vocabulary=vocabulary, dim=dim, vectors=vec_in)


def cosine(u: np.ndarray, w: np.ndarray) -> float:
    nu, nw = float(np.linalg.norm(u)), float(np.linalg.norm(w))
    if nu == 0.0 or nw == 0.0:
        return 0.0
    return float(np.dot(u, w) / (nu * nw))


def detect_synonyms(
    rt: TermSet,
    ct_labels: Iterable[str],
    embeddings: WordEmbeddings,
    lexicon: SynonymLexicon,
    sim_threshold: float = 0.6,
) -> list[SynonymPair]:
    """Embedding-filtered candidate pairs between requirement terms and entity labels.

    Identical strings are excluded (those map directly). Pairs that clear the
    similarity bar but match no rule are tagged EmbeddingOnly for curation.
    """
    ct_tuples = sorted({tuple(label.split()) for label in ct_labels if label.strip()})
    rt_tuples = sorted(rt.word_tuples())

    rt_vecs: dict[tuple[str, ...], np.ndarray] = {}
    for words in rt_tuples:
        vec = embeddings.term_vector(words)
        if vec is None:
            logger.warning("term %r not covered by embeddings; skipped", " ".join(words))
            continue
        rt_vecs[words] = vec
    ct_vecs: dict[tuple[str, ...], np.ndarray] = {}
    for words in ct_tuples:
        vec = embeddings.term_vector(words)
        if vec is None:
            logger.warning("entity label %r not covered by embeddings; skipped", " ".join(words))
            continue
        ct_vecs[words] = vec

    out: list[SynonymPair] = []
    for a_words, a_vec in rt_vecs.items():
        for b_words, b_vec in ct_vecs.items():
            if a_words == b_words:
                continue
            sim = cosine(a_vec, b_vec)
            if sim < sim_threshold:
                continue
            pair = apply_rules(decompose_mwt(a_words), decompose_mwt(b_words), lexicon)
            if pair is not None:
                out.append(replace(pair, similarity=sim))
            elif len(a_words) == 1 and len(b_words) == 1 and lexicon.syn(a_words[0], b_words[0]):
                out.append(SynonymPair(" ".join(a_words), " ".join(b_words),
                                       rule="Lexicon", similarity=sim))
            else:
                out.append(SynonymPair(" ".join(a_words), " ".join(b_words),
                                       rule="EmbeddingOnly", similarity=sim))
    out.sort(key=lambda p: (-p.similarity, p.a, p.b))
    return out


def resolve_synonym_statuses(
    pairs: list[SynonymPair], curation: dict[str, str] | None = None
) -> list[SynonymPair]:
    """Apply curation decisions keyed by the sorted ``a||b`` pair key."""
    curation = curation or {}
    out = []
    for p in pairs:
        decision = curation.get(p.key())
        out.append(replace(p, status=decision) if decision in ("Accepted", "Rejected") else p)
    return out


def accepted_synonyms(pairs: list[SynonymPair]) -> list[SynonymPair]:
    """Pairs usable for mapping: curated accepts, plus rule-attested autos.

    EmbeddingOnly pairs need an explicit human accept; rule/lexicon pairs are
    machine-checkable and count when curation is skipped.
    """
    out = []
    for p in pairs:
        if p.status == "Rejected":
            continue
        if p.status == "Accepted" or p.rule != "EmbeddingOnly":
            out.append(p)
    return out


def synonym_closure(pairs: list[SynonymPair]) -> set[frozenset[str]]:
    return {frozenset((p.a, p.b)) for p in pairs}


def pair_to_dict(p: SynonymPair) -> dict:
    return {"a": p.a, "b": p.b, "rule": p.rule, "similarity": p.similarity, "status": p.status}


def pair_from_dict(obj: dict) -> SynonymPair:
    return SynonymPair(
        a=obj["a"], b=obj["b"], rule=obj["rule"],
        similarity=obj.get("similarity", 0.0), status=obj.get("status", "Auto"),
    )
