"""reqplumb: map requirements onto open domain models, complete the model by
joint embedding, and recommend candidate missing-requirement concepts."""

from .corpus_ingest import (
    PosLexicon,
    Requirement,
    RequirementSet,
    SplitSpec,
    annotate_set,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    split_requirements,
    tokenize_and_tag,
)
from .domain_model import (
    DomainModel,
    Entity,
    FactTriple,
    HierarchyTree,
    build_hierarchy,
    classes_of,
    parse_rdf,
)
from .joint_embedding import (
    EmbeddingSpace,
    TrainConfig,
    alignment_triplets,
    fact_likelihood,
    knowledge_loss,
    requirement_cooccurrence,
    requirement_loss,
    score_z,
    train_joint,
)
from .mapping import MappingSet, build_mapping, compare_mapping_methods
from .model_completion import (
    CompletedModel,
    ProposedLink,
    complete_model,
    completion_report,
    propose_links,
    reference_cosine_stats,
    restructure,
)
from .regularity_recommend import (
    ExperimentConfig,
    FamilySelection,
    Recommendation,
    ahme,
    entity_type_distribution,
    evaluate,
    f2_score,
    node_position_distribution,
    recommend,
    requirement_side_stats,
    run_experiment,
    select_families,
)
from .synonym_detection import (
    MWT,
    SynonymLexicon,
    SynonymPair,
    WordEmbeddings,
    apply_rules,
    build_corpus_embeddings,
    decompose_mwt,
    detect_synonyms,
    load_synonym_lexicon,
)
from .term_extraction import (
    TermCandidate,
    TermSet,
    cvalue_rank,
    extract_candidates,
    select_terms,
)

__version__ = "0.1.0"
