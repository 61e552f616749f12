"""Joint text-image embedding: self-supervised training of a shared
vector space from captioned images, with cosine retrieval, weighted
multimodal query algebra, evaluation protocols, and space analysis.
"""

from .corpus import (
    Document,
    PairDataset,
    Vocabulary,
    build_vocabulary,
    generate_synthetic,
    inject_caption_noise,
    load_pairs,
    save_pairs,
    tfidf_weights,
    tokenize,
)
from .errors import (
    AllOOVError,
    DatasetFormatError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyVocabularyError,
    JointSpaceError,
    OOVWordError,
    UnsupportedAggregationError,
    ZeroVectorError,
)
from .evaluation import (
    EvalReport,
    ScatterAnalysis,
    average_precision,
    canvas_layout,
    distance_correlation,
    map_class_protocol,
    map_tag_protocol,
    noise_sweep,
    precision_at_k,
)
from .pipeline import run_pipeline, train_text, visual_index
from .regressor import (
    RegressorConfig,
    VisualRegressor,
    mse_loss,
    sigmoid_xent_grad,
    sigmoid_xent_loss,
    train_visual,
)
from .retrieval import (
    EmbeddingIndex,
    RankedResult,
    build_index,
    compose_query,
    cosine_similarity,
    search,
)
from .serialization import load_index, load_model, save_index, save_model
from .service import JointSpaceService, ServiceSnapshot, build_snapshot, make_server
from .textemb import (
    Doc2VecConfig,
    FastTextConfig,
    GloveConfig,
    LdaConfig,
    TextEmbeddingModel,
    Word2VecConfig,
    train_doc2vec,
    train_fasttext,
    train_glove,
    train_lda,
    train_word2vec,
)
from .tsne import calibrate_affinities, tsne_project

__version__ = "0.1.0"
