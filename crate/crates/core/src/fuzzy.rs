//! Fuzzy sentence embeddings and similarity measures.
//!
//! A word's membership vector is its embedding projected through a universe
//! matrix, with negative memberships clipped to zero. A sentence embedding
//! max-pools its words' count-scaled membership vectors. Sentences are
//! compared with the fuzzy Jaccard index (sum of element-wise minima over sum
//! of element-wise maxima).

use std::collections::{BTreeSet, HashSet};

use crate::embeddings::{SentenceBag, WordEmbeddingModel};
use crate::error::{Error, Result};
use crate::matrix::{dot, l2_norm, Matrix};
use crate::universe::{UniverseId, UniverseMatrix};

/// Which similarity produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    FuzzyJaccard,
    Cosine,
    CrispJaccard,
    Dynamax,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::FuzzyJaccard => "fuzzy_jaccard",
            Measure::Cosine => "cosine",
            Measure::CrispJaccard => "crisp_jaccard",
            Measure::Dynamax => "dynamax",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub measure: Measure,
}

/// A non-negative membership vector over a universe's reference sets.
///
/// The diagnostic no-clip mode can produce negative values; everything else
/// keeps the non-negativity invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySentenceEmbedding {
    values: Vec<f64>,
    universe_id: UniverseId,
}

impl FuzzySentenceEmbedding {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn universe_id(&self) -> UniverseId {
        self.universe_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn clip_in_place(values: &mut [f64]) {
    for v in values {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Membership vector of a single word: `clip(U * word_vec)`.
pub fn fuzzy_word_embedding(universe: &UniverseMatrix, word_vec: &[f64]) -> Result<Vec<f64>> {
    if word_vec.len() != universe.d() {
        return Err(Error::DimensionMismatch {
            expected: universe.d(),
            found: word_vec.len(),
        });
    }
    let mut out = universe.matrix().matvec(word_vec);
    clip_in_place(&mut out);
    Ok(out)
}

/// Max-pools the count-scaled membership vectors of the bag's words over a
/// raw universe matrix. Empty bags give the zero vector.
fn embed_bag(
    matrix: &Matrix,
    model: &WordEmbeddingModel,
    bag: &SentenceBag,
    clip: bool,
) -> Vec<f64> {
    let mut pooled = vec![0.0; matrix.rows()];
    let mut first = true;
    for (index, count) in bag.entries() {
        let mut memberships = matrix.matvec(model.row(index));
        if clip {
            clip_in_place(&mut memberships);
        }
        let scale = count as f64;
        for v in &mut memberships {
            *v *= scale;
        }
        if first {
            pooled = memberships;
            first = false;
        } else {
            for (p, v) in pooled.iter_mut().zip(&memberships) {
                if *v > *p {
                    *p = *v;
                }
            }
        }
    }
    pooled
}

/// Fuzzy sentence embedding of a bag against a fixed universe.
pub fn sfbow_embed(
    universe: &UniverseMatrix,
    model: &WordEmbeddingModel,
    bag: &SentenceBag,
) -> Result<FuzzySentenceEmbedding> {
    sfbow_embed_with(universe, model, bag, true)
}

/// Same with clipping optional (diagnostic mode).
pub fn sfbow_embed_with(
    universe: &UniverseMatrix,
    model: &WordEmbeddingModel,
    bag: &SentenceBag,
    clip: bool,
) -> Result<FuzzySentenceEmbedding> {
    if model.dim() != universe.d() {
        return Err(Error::DimensionMismatch {
            expected: universe.d(),
            found: model.dim(),
        });
    }
    if let Some(bad) = bag.word_indices().find(|&i| i >= model.vocab().len()) {
        return Err(Error::InvalidParameter(format!(
            "bag references word index {bad} outside the vocabulary"
        )));
    }
    Ok(FuzzySentenceEmbedding {
        values: embed_bag(universe.matrix(), model, bag, clip),
        universe_id: universe.id(),
    })
}

fn jaccard_value(a: &[f64], b: &[f64]) -> f64 {
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        min_sum += x.min(*y);
        max_sum += x.max(*y);
    }
    if max_sum == 0.0 {
        0.0
    } else {
        min_sum / max_sum
    }
}

/// Fuzzy Jaccard index of two embeddings from the same universe. Two zero
/// vectors score 0 by convention.
pub fn fuzzy_jaccard(
    a: &FuzzySentenceEmbedding,
    b: &FuzzySentenceEmbedding,
) -> Result<SimilarityScore> {
    if a.universe_id != b.universe_id || a.len() != b.len() {
        return Err(Error::UniverseMismatch);
    }
    Ok(SimilarityScore {
        value: jaccard_value(&a.values, &b.values),
        measure: Measure::FuzzyJaccard,
    })
}

/// Plain set Jaccard over token sets. Two empty sets score 0 by convention.
pub fn crisp_jaccard<S: AsRef<str>>(tokens_a: &[S], tokens_b: &[S]) -> SimilarityScore {
    let a: HashSet<&str> = tokens_a.iter().map(AsRef::as_ref).collect();
    let b: HashSet<&str> = tokens_b.iter().map(AsRef::as_ref).collect();
    let intersection = a.intersection(&b).count();
    let union = a.union(&b).count();
    SimilarityScore {
        value: if union == 0 {
            0.0
        } else {
            intersection as f64 / union as f64
        },
        measure: Measure::CrispJaccard,
    }
}

/// Builds the pair-dependent universe (stacked embeddings of the two bags'
/// distinct words) and embeds both bags against it.
pub fn dynamax_embed_pair(
    model: &WordEmbeddingModel,
    bag_a: &SentenceBag,
    bag_b: &SentenceBag,
    clip: bool,
) -> Result<(FuzzySentenceEmbedding, FuzzySentenceEmbedding)> {
    let union: BTreeSet<usize> = bag_a.word_indices().chain(bag_b.word_indices()).collect();
    if let Some(&bad) = union.iter().find(|&&i| i >= model.vocab().len()) {
        return Err(Error::InvalidParameter(format!(
            "bag references word index {bad} outside the vocabulary"
        )));
    }
    let indices: Vec<usize> = union.into_iter().collect();
    let matrix = model.matrix().select_rows(&indices);
    let id = UniverseId::of_matrix(&matrix);
    Ok((
        FuzzySentenceEmbedding {
            values: embed_bag(&matrix, model, bag_a, clip),
            universe_id: id,
        },
        FuzzySentenceEmbedding {
            values: embed_bag(&matrix, model, bag_b, clip),
            universe_id: id,
        },
    ))
}

/// Pair-dependent fuzzy Jaccard: the universe is rebuilt per pair from the
/// union of the two sentences' words. Either bag empty scores 0.
pub fn dynamax_similarity(
    model: &WordEmbeddingModel,
    bag_a: &SentenceBag,
    bag_b: &SentenceBag,
) -> Result<SimilarityScore> {
    if bag_a.is_empty() || bag_b.is_empty() {
        return Ok(SimilarityScore {
            value: 0.0,
            measure: Measure::Dynamax,
        });
    }
    let (ea, eb) = dynamax_embed_pair(model, bag_a, bag_b, true)?;
    Ok(SimilarityScore {
        value: jaccard_value(ea.values(), eb.values()),
        measure: Measure::Dynamax,
    })
}

/// Cosine similarity; either vector zero-norm scores 0 by convention.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<SimilarityScore> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let na = l2_norm(a);
    let nb = l2_norm(b);
    let value = if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    };
    Ok(SimilarityScore {
        value,
        measure: Measure::Cosine,
    })
}

/// Count-weighted mean of a bag's word embeddings; the baseline sentence
/// vector. Empty bags give the zero vector.
pub fn average_embedding(model: &WordEmbeddingModel, bag: &SentenceBag) -> Vec<f64> {
    let mut sum = vec![0.0; model.dim()];
    let mut total = 0usize;
    for (index, count) in bag.entries() {
        total += count;
        let scale = count as f64;
        for (s, v) in sum.iter_mut().zip(model.row(index)) {
            *s += scale * v;
        }
    }
    if total > 0 {
        let inv = 1.0 / total as f64;
        for s in &mut sum {
            *s *= inv;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{bag_of_words, Vocabulary};
    use crate::universe::{identity_universe, UniverseMethod, UniverseParams};

    fn toy_model(rows: &[Vec<f64>]) -> WordEmbeddingModel {
        let words = (0..rows.len()).map(|i| format!("w{i}")).collect();
        WordEmbeddingModel::new(Vocabulary::new(words).unwrap(), Matrix::from_rows(rows)).unwrap()
    }

    fn universe_from_rows(rows: &[Vec<f64>]) -> UniverseMatrix {
        UniverseMatrix::new(
            Matrix::from_rows(rows),
            UniverseMethod::Kmeans,
            "test",
            UniverseParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn fuzzy_word_embedding_clips_negatives() {
        let u = universe_from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        // Raw projection is [0.5, -0.2, 0.3]; the negative entry clips to 0.
        let v = fuzzy_word_embedding(&u, &[0.5, -0.2]).unwrap();
        assert_eq!(v[0], 0.5);
        assert_eq!(v[1], 0.0);
        assert!((v[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn identity_universe_passes_non_negative_vectors_through() {
        let u = identity_universe(3).unwrap();
        let v = fuzzy_word_embedding(&u, &[0.1, 0.0, 2.5]).unwrap();
        assert_eq!(v, vec![0.1, 0.0, 2.5]);
        assert_eq!(fuzzy_word_embedding(&u, &[0.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let u = identity_universe(3).unwrap();
        assert!(matches!(
            fuzzy_word_embedding(&u, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sfbow_embed_max_pools_scaled_memberships() {
        // Memberships chosen so that v1 = [0.5, 0, 0.3], v2 = [0.1, 0.4, 0].
        let model = toy_model(&[vec![0.5, 0.0, 0.3], vec![0.1, 0.4, 0.0]]);
        let u = identity_universe(3).unwrap();
        let bag = bag_of_words(&["w0", "w0", "w1"], model.vocab());
        let embedded = sfbow_embed(&u, &model, &bag).unwrap();
        assert_eq!(embedded.values(), &[1.0, 0.4, 0.6]);
    }

    #[test]
    fn single_word_sentence_equals_word_embedding() {
        let model = toy_model(&[vec![0.2, 0.7]]);
        let u = identity_universe(2).unwrap();
        let bag = bag_of_words(&["w0"], model.vocab());
        let embedded = sfbow_embed(&u, &model, &bag).unwrap();
        assert_eq!(
            embedded.values(),
            fuzzy_word_embedding(&u, model.lookup("w0").unwrap())
                .unwrap()
                .as_slice()
        );
    }

    #[test]
    fn empty_bag_embeds_to_zero() {
        let model = toy_model(&[vec![1.0, 0.0]]);
        let u = identity_universe(2).unwrap();
        let bag = bag_of_words::<&str>(&[], model.vocab());
        assert_eq!(sfbow_embed(&u, &model, &bag).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn fuzzy_jaccard_hand_example() {
        let u = identity_universe(3).unwrap();
        let model = toy_model(&[vec![1.0, 2.0, 0.0], vec![2.0, 1.0, 0.0]]);
        let a = sfbow_embed(&u, &model, &bag_of_words(&["w0"], model.vocab())).unwrap();
        let b = sfbow_embed(&u, &model, &bag_of_words(&["w1"], model.vocab())).unwrap();
        let score = fuzzy_jaccard(&a, &b).unwrap();
        assert_eq!(score.value, 0.5);
        assert_eq!(score.measure, Measure::FuzzyJaccard);

        assert_eq!(fuzzy_jaccard(&a, &a).unwrap().value, 1.0);
    }

    #[test]
    fn fuzzy_jaccard_zero_conventions() {
        let u = identity_universe(2).unwrap();
        let model = toy_model(&[vec![0.0, 0.0], vec![1.0, 1.0]]);
        let zero = sfbow_embed(&u, &model, &bag_of_words(&["w0"], model.vocab())).unwrap();
        let nonzero = sfbow_embed(&u, &model, &bag_of_words(&["w1"], model.vocab())).unwrap();
        assert_eq!(fuzzy_jaccard(&zero, &nonzero).unwrap().value, 0.0);
        assert_eq!(fuzzy_jaccard(&zero, &zero).unwrap().value, 0.0);
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let u1 = identity_universe(2).unwrap();
        let u2 = universe_from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let model = toy_model(&[vec![1.0, 1.0]]);
        let bag = bag_of_words(&["w0"], model.vocab());
        let a = sfbow_embed(&u1, &model, &bag).unwrap();
        let b = sfbow_embed(&u2, &model, &bag).unwrap();
        assert!(matches!(
            fuzzy_jaccard(&a, &b),
            Err(Error::UniverseMismatch)
        ));
    }

    #[test]
    fn crisp_jaccard_set_semantics() {
        assert!((crisp_jaccard(&["a", "b"], &["b", "c"]).value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(crisp_jaccard(&["a", "b"], &["b", "a", "a"]).value, 1.0);
        assert_eq!(crisp_jaccard(&["a"], &["b"]).value, 0.0);
        assert_eq!(crisp_jaccard::<&str>(&[], &[]).value, 0.0);
    }

    #[test]
    fn dynamax_identical_sentences_score_one() {
        let model = toy_model(&[vec![0.3, 0.8], vec![-0.5, 0.4]]);
        let bag = bag_of_words(&["w0", "w1", "w0"], model.vocab());
        let score = dynamax_similarity(&model, &bag, &bag).unwrap();
        assert_eq!(score.value, 1.0);
        assert_eq!(score.measure, Measure::Dynamax);
    }

    #[test]
    fn dynamax_orthogonal_singletons_score_zero() {
        let model = toy_model(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let a = bag_of_words(&["w0"], model.vocab());
        let b = bag_of_words(&["w1"], model.vocab());
        // Pair universe is [[1,0],[0,1]]; embeddings are [1,0] and [0,1].
        let (ea, eb) = dynamax_embed_pair(&model, &a, &b, true).unwrap();
        assert_eq!(ea.values(), &[1.0, 0.0]);
        assert_eq!(eb.values(), &[0.0, 1.0]);
        assert_eq!(dynamax_similarity(&model, &a, &b).unwrap().value, 0.0);
    }

    #[test]
    fn dynamax_universe_size_is_union_cardinality() {
        let model = toy_model(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let a = bag_of_words(&["w0", "w1"], model.vocab());
        let b = bag_of_words(&["w1", "w2"], model.vocab());
        let (ea, _) = dynamax_embed_pair(&model, &a, &b, true).unwrap();
        assert_eq!(ea.len(), 3);
    }

    #[test]
    fn dynamax_empty_bag_scores_zero() {
        let model = toy_model(&[vec![1.0, 0.0]]);
        let empty = bag_of_words::<&str>(&[], model.vocab());
        let full = bag_of_words(&["w0"], model.vocab());
        assert_eq!(
            dynamax_similarity(&model, &empty, &full).unwrap().value,
            0.0
        );
    }

    #[test]
    fn cosine_conventions() {
        let same = cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap().value;
        assert!((same - 1.0).abs() < 1e-12);
        assert_eq!(
            cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap().value,
            0.0
        );
        let v = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap().value;
        assert!((v - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 1.0]).unwrap().value,
            0.0
        );
        assert!(cosine_similarity(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn average_embedding_is_count_weighted() {
        let model = toy_model(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let bag = bag_of_words(&["w0", "w1"], model.vocab());
        assert_eq!(average_embedding(&model, &bag), vec![0.5, 0.5]);

        let single = bag_of_words(&["w1"], model.vocab());
        assert_eq!(average_embedding(&model, &single), vec![0.0, 1.0]);

        let empty = bag_of_words::<&str>(&[], model.vocab());
        assert_eq!(average_embedding(&model, &empty), vec![0.0, 0.0]);

        let weighted = bag_of_words(&["w0", "w0", "w1"], model.vocab());
        let avg = average_embedding(&model, &weighted);
        assert!((avg[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((avg[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sfbow_embed_is_word_order_invariant() {
        let model = toy_model(&[vec![0.4, 0.1], vec![0.3, 0.9], vec![0.2, 0.5]]);
        let u = identity_universe(2).unwrap();
        let a = bag_of_words(&["w2", "w0", "w1", "w0"], model.vocab());
        let b = bag_of_words(&["w0", "w1", "w0", "w2"], model.vocab());
        let ea = sfbow_embed(&u, &model, &a).unwrap();
        let eb = sfbow_embed(&u, &model, &b).unwrap();
        let bits_a: Vec<u64> = ea.values().iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = eb.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }
}
