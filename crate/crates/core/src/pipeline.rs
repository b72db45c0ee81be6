//! End-to-end sentence scoring: tokenize, bag, embed, compare. This is what
//! the CLI and the evaluation harness drive.

use crate::embeddings::{bag_of_words, tokenize, SentenceBag, WordEmbeddingModel};
use crate::error::{Error, Result};
use crate::fuzzy::{
    average_embedding, cosine_similarity, dynamax_embed_pair, dynamax_similarity, fuzzy_jaccard,
    sfbow_embed_with,
};
use crate::universe::UniverseMatrix;

/// Similarity applied to a sentence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineMeasure {
    /// Fuzzy Jaccard over fuzzy sentence embeddings.
    FuzzyJaccard,
    /// Cosine over fuzzy sentence embeddings.
    Cosine,
    /// Cosine over count-weighted average word embeddings; ignores the
    /// universe entirely (the baseline).
    AvgCosine,
}

impl PipelineMeasure {
    pub fn name(&self) -> &'static str {
        match self {
            PipelineMeasure::FuzzyJaccard => "fuzzy-jaccard",
            PipelineMeasure::Cosine => "cosine",
            PipelineMeasure::AvgCosine => "avg-cosine",
        }
    }
}

#[derive(Debug)]
enum UniverseMode {
    Static(UniverseMatrix),
    /// Universe rebuilt per pair from the two sentences' words.
    Dynamax,
    /// No universe involved (average-embedding baseline).
    None,
}

/// An immutable scoring pipeline; safe to share across threads.
#[derive(Debug)]
pub struct Pipeline {
    model: WordEmbeddingModel,
    universe: UniverseMode,
    measure: PipelineMeasure,
    clip: bool,
}

impl Pipeline {
    /// Fixed-universe pipeline. The universe must match the model dimension.
    pub fn with_universe(
        model: WordEmbeddingModel,
        universe: UniverseMatrix,
        measure: PipelineMeasure,
        clip: bool,
    ) -> Result<Self> {
        if measure != PipelineMeasure::AvgCosine && universe.d() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: universe.d(),
            });
        }
        Ok(Pipeline {
            model,
            universe: UniverseMode::Static(universe),
            measure,
            clip,
        })
    }

    /// Pair-dependent universe pipeline.
    pub fn dynamax(model: WordEmbeddingModel, measure: PipelineMeasure, clip: bool) -> Self {
        Pipeline {
            model,
            universe: UniverseMode::Dynamax,
            measure,
            clip,
        }
    }

    /// Average-embedding cosine baseline.
    pub fn average_baseline(model: WordEmbeddingModel) -> Self {
        Pipeline {
            model,
            universe: UniverseMode::None,
            measure: PipelineMeasure::AvgCosine,
            clip: true,
        }
    }

    pub fn model(&self) -> &WordEmbeddingModel {
        &self.model
    }

    pub fn measure(&self) -> PipelineMeasure {
        self.measure
    }

    pub fn bag(&self, sentence: &str) -> SentenceBag {
        bag_of_words(&tokenize(sentence), self.model.vocab())
    }

    /// Scores one pair. Sentences with no in-vocabulary tokens score 0.
    pub fn score(&self, sentence_a: &str, sentence_b: &str) -> f64 {
        let bag_a = self.bag(sentence_a);
        let bag_b = self.bag(sentence_b);
        self.score_bags(&bag_a, &bag_b)
    }

    pub fn score_bags(&self, bag_a: &SentenceBag, bag_b: &SentenceBag) -> f64 {
        match (&self.universe, self.measure) {
            (_, PipelineMeasure::AvgCosine) => {
                let a = average_embedding(&self.model, bag_a);
                let b = average_embedding(&self.model, bag_b);
                cosine_similarity(&a, &b).expect("same dimension").value
            }
            (UniverseMode::Dynamax, PipelineMeasure::FuzzyJaccard) if self.clip => {
                dynamax_similarity(&self.model, bag_a, bag_b)
                    .expect("bags built from this model")
                    .value
            }
            (UniverseMode::Dynamax, measure) => {
                if bag_a.is_empty() || bag_b.is_empty() {
                    return 0.0;
                }
                let (ea, eb) = dynamax_embed_pair(&self.model, bag_a, bag_b, self.clip)
                    .expect("bags built from this model");
                match measure {
                    PipelineMeasure::FuzzyJaccard => {
                        fuzzy_jaccard(&ea, &eb).expect("same pair universe").value
                    }
                    PipelineMeasure::Cosine => {
                        cosine_similarity(ea.values(), eb.values())
                            .expect("same pair universe")
                            .value
                    }
                    PipelineMeasure::AvgCosine => unreachable!("handled above"),
                }
            }
            (UniverseMode::Static(universe), measure) => {
                let ea = sfbow_embed_with(universe, &self.model, bag_a, self.clip)
                    .expect("dimensions checked at construction");
                let eb = sfbow_embed_with(universe, &self.model, bag_b, self.clip)
                    .expect("dimensions checked at construction");
                match measure {
                    PipelineMeasure::FuzzyJaccard => {
                        fuzzy_jaccard(&ea, &eb).expect("same universe").value
                    }
                    PipelineMeasure::Cosine => {
                        cosine_similarity(ea.values(), eb.values())
                            .expect("same universe")
                            .value
                    }
                    PipelineMeasure::AvgCosine => unreachable!("handled above"),
                }
            }
            (UniverseMode::None, measure) => {
                unreachable!("no universe only built for avg-cosine, got {measure:?}")
            }
        }
    }
}
