"""Word sense induction from LM substitute distributions."""

from .backends import FileBackend, LMBackend, NGramBackend, train_ngram_backend
from .clustering import FeatureMatrix, agglomerative_cluster, build_matrix, induce_soft, tfidf
from .corpus import (
    POS,
    Instance,
    InstanceDataset,
    Labeling,
    ParseError,
    Target,
    Tense,
    parse_instances,
    read_key_file,
    write_key_file,
)
from .evaluation import (
    RunStatistics,
    ScoreReport,
    aggregate_runs,
    avg_score,
    fuzzy_bcubed,
    fuzzy_nmi,
    nmi,
    score_labelings,
    tense_sense_nmi,
)
from .lemmatizer import RuleLemmatizer, identity_lemmatizer
from .pipeline import PipelineConfig, ablate, export_queries, induce, run_protocol, sweep_clusters
from .representatives import Representative, SamplingConfig, sample_representatives
from .substitutes import Direction, Query, SubstituteDistribution, build_queries, postprocess
from .synthetic import SyntheticData, make_synthetic

__version__ = "0.1.0"
