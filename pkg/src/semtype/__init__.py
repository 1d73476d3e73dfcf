"""Semantic column type detection with human-in-the-loop adaptation.

A staged hybrid pipeline (header matching, value lookup rules, learned
classifier) predicts ontology types for table columns, abstains when
unconfident, and adapts per tenant by turning corrections into labeling
functions, weakly labeled training data and local model updates.
"""

from .classifier import (
    ClassifierParams,
    LabeledExample,
    TrainConfig,
    make_background_examples,
    predict,
    train,
)
from .embeddings import EmbeddingStore, load_embeddings
from .errors import (
    ConfigurationError,
    ConflictError,
    DivergenceError,
    NotFoundError,
    ParseError,
    SemtypeError,
    StateError,
    TrainingError,
    ValidationError,
)
from .feedback import (
    AdaptationReport,
    FeedbackEvent,
    generate_training_data,
    infer_labeling_functions,
    process_feedback,
)
from .features import FEATURE_NAMES, extract_features
from .headers import match_header, semantic_match, syntactic_match
from .labeling import (
    CoOccurrence,
    HeaderToken,
    LabelingFunction,
    LfVote,
    NumericRange,
    TableContext,
    UniqueRatioBand,
    ValueSet,
    evaluate_lf,
)
from .lookup import (
    Dictionary,
    LabelingFunctionRef,
    LookupRule,
    Regex,
    RuleRegistry,
    ValueSample,
    apply_lookup,
    builtin_rules,
    sample_values,
)
from .ontology import UNKNOWN_TYPE_ID, Ontology, SemanticType, load_ontology
from .pipeline import (
    CalibrationResult,
    FinalPrediction,
    ModelState,
    ModelWeights,
    PipelineConfig,
    calibrate_tau,
    combine_scores,
    run_pipeline,
    update_weights,
)
from .stages import StagePrediction
from .state import GlobalState, TenantState
from .store import Store, init_global_dir, load_global_dir
from .tables import (
    Column,
    ColumnProfile,
    Table,
    infer_primitive,
    make_column,
    parse_table,
    profile_column,
)

__version__ = "0.1.0"
