"""Pipeline configuration: one TOML file collecting every stage's knobs."""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..joint_embedding import TrainConfig


@dataclass
class PipelineConfig:
    model_path: str = ""
    model_syntax: str | None = None
    requirements_path: str = ""
    requirements_format: str = "one-per-line"
    corpus_dir: str = ""
    pos_lexicon_path: str | None = None
    synonym_lexicon_path: str | None = None
    stopwords_path: str | None = None
    gold_terms_path: str | None = None
    hierarchy_predicates: list[list] = field(
        default_factory=lambda: [["subClassOf", True], ["hasSubClasses", False]]
    )
    ratio: float = 0.7
    seed: int = 0
    n_runs: int = 30
    cvalue_threshold: float = 1.0
    sim_threshold: float = 0.6
    word_dim: int = 50
    word_epochs: int = 5
    word_lr: float = 0.025
    word_window: int = 5
    word_min_count: int = 2
    word_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    tau: float = 1.0
    family_rule: str = "relative"
    family_param: float = 0.5
    curation_mode: str = "batch"  # batch | interactive
    restrict_categories: list[str] | None = None

    def canonical_json(self) -> str:
        payload = asdict(self)
        payload["train"] = asdict(self.train)
        return json.dumps(payload, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def validate(self) -> None:
        for label, p in [("model", self.model_path), ("requirements", self.requirements_path)]:
            if not p:
                raise ValueError(f"config is missing the {label} path")
            if not Path(p).exists():
                raise ValueError(f"{label} path does not exist: {p}")
        if self.corpus_dir and not Path(self.corpus_dir).is_dir():
            raise ValueError(f"corpus_dir does not exist: {self.corpus_dir}")
        for opt in (self.pos_lexicon_path, self.synonym_lexicon_path,
                    self.stopwords_path, self.gold_terms_path):
            if opt and not Path(opt).exists():
                raise ValueError(f"configured path does not exist: {opt}")
        if self.curation_mode not in ("batch", "interactive"):
            raise ValueError(f"unknown curation mode {self.curation_mode!r}")


def load_config(path: str | Path) -> PipelineConfig:
    raw = tomllib.loads(Path(path).read_text("utf-8"))
    base = Path(path).parent

    def resolve(p: str | None) -> str | None:
        if not p:
            return p
        candidate = Path(p)
        return str(candidate if candidate.is_absolute() else base / candidate)

    paths = raw.get("paths", {})
    split = raw.get("split", {})
    terms = raw.get("terms", {})
    synonyms = raw.get("synonyms", {})
    words = raw.get("word_embeddings", {})
    train = raw.get("train", {})
    completion = raw.get("completion", {})
    families = raw.get("families", {})
    curation = raw.get("curation", {})
    model = raw.get("model", {})

    cfg = PipelineConfig(
        model_path=resolve(paths.get("model", "")) or "",
        model_syntax=paths.get("model_syntax"),
        requirements_path=resolve(paths.get("requirements", "")) or "",
        requirements_format=paths.get("requirements_format", "one-per-line"),
        corpus_dir=resolve(paths.get("corpus_dir", "")) or "",
        pos_lexicon_path=resolve(paths.get("pos_lexicon")),
        synonym_lexicon_path=resolve(paths.get("synonym_lexicon")),
        stopwords_path=resolve(paths.get("stopwords")),
        gold_terms_path=resolve(paths.get("gold_terms")),
        hierarchy_predicates=[
            [name, bool(up)] for name, up in model.get(
                "hierarchy_predicates", [["subClassOf", True], ["hasSubClasses", False]])
        ],
        ratio=float(split.get("ratio", 0.7)),
        seed=int(split.get("seed", 0)),
        n_runs=int(split.get("n_runs", 30)),
        cvalue_threshold=float(terms.get("cvalue_threshold", 1.0)),
        sim_threshold=float(synonyms.get("sim_threshold", 0.6)),
        word_dim=int(words.get("dim", 50)),
        word_epochs=int(words.get("epochs", 5)),
        word_lr=float(words.get("lr", 0.025)),
        word_window=int(words.get("window", 5)),
        word_min_count=int(words.get("min_count", 2)),
        word_seed=int(words.get("seed", 0)),
        train=TrainConfig(
            dim=int(train.get("dim", 50)),
            epochs=int(train.get("epochs", 500)),
            learning_rate=float(train.get("learning_rate", 0.01)),
            batch_size=int(train.get("batch_size", 0)),
            seed=int(train.get("seed", 0)),
            bias=float(train.get("bias", 7.0)),
            softmax_mode=str(train.get("softmax_mode", "full")),
            sample_k=int(train.get("sample_k", 25)),
            init_mode=str(train.get("init_mode", "uniform")),
        ),
        tau=float(completion.get("tau", 1.0)),
        family_rule=str(families.get("rule", "relative")),
        family_param=float(families.get("param", 0.5)),
        curation_mode=str(curation.get("mode", "batch")),
        restrict_categories=raw.get("mapping", {}).get("restrict_categories"),
    )
    cfg.validate()
    return cfg
