//! Synthetic fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfbow::{Matrix, Vocabulary, WordEmbeddingModel};

/// Random model with `n` words ("w0".."wN") of dimension `d`.
pub fn synthetic_model(n: usize, d: usize, seed: u64) -> WordEmbeddingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let words = (0..n).map(|i| format!("w{i}")).collect();
    WordEmbeddingModel::new(Vocabulary::new(words).unwrap(), Matrix::from_rows(&rows)).unwrap()
}

/// Random sentence of `len` tokens drawn from the model's vocabulary.
pub fn synthetic_sentence(vocab_len: usize, len: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| format!("w{}", rng.random_range(0..vocab_len)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random point matrix for clustering benchmarks.
pub fn synthetic_points(n: usize, d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Matrix::from_rows(&rows)
}
