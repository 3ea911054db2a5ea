//! Document similarity toolkit: text preprocessing, tf-idf features, nearest
//! case retrieval under Euclidean, cosine and TS-SS similarity, accuracy
//! sweeps over feature dimensionality, and nearest-neighbour distance
//! formulas for the uniform unit-ball model.

pub mod cbr;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod metrics;
pub mod preprocess;
pub mod store;
pub mod synth;
pub mod theory;

pub use cbr::{classify, retrieve_nearest, Case, CaseBase, RetrievalResult};
pub use corpus::{load_corpus, split_corpus, Corpus, CorpusFormat, RawDocument};
pub use features::{
    compute_idf, normalize, select_top_features, vectorize, FeatureSpace, FeatureVector,
    NormMode, Vocabulary,
};
pub use metrics::MetricKind;
pub use preprocess::{porter_stem, preprocess_document, PreprocessConfig, TokenList};
