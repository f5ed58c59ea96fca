"""Text contours of psycholinguistic features and models trained on them."""

from .contours import (
    ContourExtractor,
    ContourMatrix,
    Standardizer,
    apply_standardizer,
    build_contours,
    fit_standardizer,
    read_contours,
    sentence_features,
    write_contours,
)
from .ingest import (
    Document,
    Sentence,
    Token,
    apply_conllu,
    load_conllu,
    load_dataset,
    segment,
)
from .registry import FeatureRegistry, RegistryConfig, build_registry, load_registry_config
from .resources import (
    FrequencyTable,
    Lexicon,
    NormTable,
    ResourceStore,
    load_store,
    lookup_ngram,
)

__version__ = "0.1.0"

__all__ = [
    "ContourExtractor",
    "ContourMatrix",
    "Document",
    "FeatureRegistry",
    "FrequencyTable",
    "Lexicon",
    "NormTable",
    "RegistryConfig",
    "ResourceStore",
    "Sentence",
    "Standardizer",
    "Token",
    "apply_conllu",
    "apply_standardizer",
    "build_contours",
    "build_registry",
    "fit_standardizer",
    "load_conllu",
    "load_dataset",
    "load_registry_config",
    "load_store",
    "lookup_ngram",
    "read_contours",
    "segment",
    "sentence_features",
    "write_contours",
]
