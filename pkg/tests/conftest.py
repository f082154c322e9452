from __future__ import annotations

from pathlib import Path

import pytest

from reqplumb.corpus_ingest import (
    annotate_set,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
)
from reqplumb.domain_model import parse_rdf
from reqplumb.synonym_detection import build_corpus_embeddings, load_synonym_lexicon

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def pos_lexicon():
    return load_pos_lexicon()


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def syn_lexicon():
    return load_synonym_lexicon()


@pytest.fixture(scope="session")
def uav_reqs(pos_lexicon):
    reqs = load_requirements(FIXTURES / "uavmini_requirements.txt", "one-per-line")
    return annotate_set(reqs, pos_lexicon)


@pytest.fixture(scope="session")
def uav_model():
    return parse_rdf(FIXTURES / "uavmini_model.rdf", "rdf-xml")


@pytest.fixture(scope="session")
def bas_model():
    return parse_rdf(FIXTURES / "basmini_model.ttl", "turtle")


@pytest.fixture(scope="session")
def corpus_embeddings():
    # the tiny fixture corpus needs more passes than the full-scale default
    return build_corpus_embeddings(FIXTURES / "corpus", dim=50, seed=7, epochs=200, lr=0.1)
