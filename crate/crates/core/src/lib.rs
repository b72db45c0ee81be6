//! Training-free sentence embeddings from pretrained word vectors.
//!
//! A fixed "universe matrix" (identity, PCA rotation, or cluster centroids of
//! the embedding rows) turns each word vector into a vector of fuzzy set
//! memberships; a sentence max-pools its words' membership vectors, and
//! sentence similarity is the fuzzy Jaccard index of the pooled vectors. A
//! pair-dependent variant rebuilds the universe per comparison from the two
//! sentences' own words. An evaluation harness scores gold-labelled sentence
//! pairs with Spearman rank correlation and aggregates across tasks.

pub mod embeddings;
pub mod error;
pub mod eval;
pub mod fuzzy;
pub mod matrix;
pub mod pipeline;
pub mod universe;

pub use embeddings::{
    bag_of_words, load_embeddings, read_embeddings, reduce_vocabulary, save_embeddings, tokenize,
    write_embeddings, EmbeddingFormat, LoadStats, ReducePolicy, ReduceStats, SentenceBag,
    Vocabulary, WordEmbeddingModel,
};
pub use error::{Error, Result};
pub use eval::{
    aggregate, evaluate_task, load_sts, read_sts, report, spearman_rho, EvalSummary, ReportDoc,
    ReportFormat, StsDataset, StsLoadStats, StsPair, TaskScore, TaskSummary,
};
pub use fuzzy::{
    average_embedding, cosine_similarity, crisp_jaccard, dynamax_embed_pair, dynamax_similarity,
    fuzzy_jaccard, fuzzy_word_embedding, sfbow_embed, sfbow_embed_with, FuzzySentenceEmbedding,
    Measure, SimilarityScore,
};
pub use matrix::Matrix;
pub use pipeline::{Pipeline, PipelineMeasure};
pub use universe::{
    cluster_diagnostics, dbscan, dbscan_universe, identity_universe, kmeans, kmeans_universe,
    pca_universe, pca_universe_with, spherical_kmeans, spherical_kmeans_universe,
    unit_normalize_rows, ClusterDiagnostics, ClusterModel, DistanceMetric, PcaModel, UniverseId,
    UniverseMatrix, UniverseMethod, UniverseParams,
};
