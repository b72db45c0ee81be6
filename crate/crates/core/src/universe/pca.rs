//! PCA-derived universes: the transposed eigenvector matrix of the
//! (uncentered) Gram matrix of the embedding rows.

use rayon::prelude::*;

use crate::embeddings::WordEmbeddingModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{UniverseMatrix, UniverseMethod, UniverseParams};

const JACOBI_MAX_SWEEPS: usize = 128;
const JACOBI_TOL: f64 = 1e-10;

/// Eigendecomposition of the Gram matrix of an embedding model.
///
/// `components` holds the eigenvectors as columns, ordered by descending
/// eigenvalue; signs are fixed so each column's largest-magnitude entry is
/// positive.
#[derive(Debug, Clone)]
pub struct PcaModel {
    components: Matrix,
    eigenvalues: Vec<f64>,
    explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    /// `d x d` orthonormal matrix; column `j` is the `j`-th component.
    pub fn components(&self) -> &Matrix {
        &self.components
    }

    /// Non-negative, sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalues normalized to sum 1 (all zeros for a zero matrix).
    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }
}

/// PCA universe over the raw (uncentered) Gram matrix.
pub fn pca_universe(model: &WordEmbeddingModel) -> Result<(PcaModel, UniverseMatrix)> {
    pca_universe_with(model, false)
}

/// Same with optional mean-centering of the rows before the Gram product.
pub fn pca_universe_with(
    model: &WordEmbeddingModel,
    centered: bool,
) -> Result<(PcaModel, UniverseMatrix)> {
    if model.vocab().len() < 2 {
        return Err(Error::InvalidParameter(
            "pca requires at least two vocabulary rows".into(),
        ));
    }

    let gram = gram_matrix(model.matrix(), centered);
    let (mut eigenvalues, vectors) = jacobi_eigen(&gram);
    let d = gram.rows();

    // Gram matrices are positive semi-definite; negatives are numerical noise.
    for v in &mut eigenvalues {
        if *v < 0.0 {
            *v = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut components = Matrix::zeros(d, d);
    let mut sorted_values = Vec::with_capacity(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        sorted_values.push(eigenvalues[old_col]);

        let mut column: Vec<f64> = (0..d).map(|r| vectors.get(r, old_col)).collect();
        let mut max_idx = 0;
        for (i, v) in column.iter().enumerate() {
            if v.abs() > column[max_idx].abs() {
                max_idx = i;
            }
        }
        if column[max_idx] < 0.0 {
            for v in &mut column {
                *v = -*v;
            }
        }
        for (r, v) in column.into_iter().enumerate() {
            components.set(r, new_col, v);
        }
    }

    let total: f64 = sorted_values.iter().sum();
    let ratio: Vec<f64> = if total > 0.0 {
        sorted_values.iter().map(|v| v / total).collect()
    } else {
        vec![0.0; d]
    };

    let universe = UniverseMatrix::new(
        components.transpose(),
        UniverseMethod::Pca,
        model.source(),
        UniverseParams {
            centered: if centered { Some(true) } else { None },
            ..UniverseParams::default()
        },
    )?;

    Ok((
        PcaModel {
            components,
            eigenvalues: sorted_values,
            explained_variance_ratio: ratio,
        },
        universe,
    ))
}

/// `WᵀW` (or the centered variant), accumulated per entry in row order so the
/// result does not depend on thread scheduling.
pub(crate) fn gram_matrix(w: &Matrix, centered: bool) -> Matrix {
    let d = w.cols();
    let n = w.rows();

    let means: Vec<f64> = if centered {
        let mut m = vec![0.0; d];
        for row in w.row_iter() {
            for (acc, v) in m.iter_mut().zip(row) {
                *acc += v;
            }
        }
        m.iter().map(|s| s / n as f64).collect()
    } else {
        vec![0.0; d]
    };

    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = 0.0;
            for row in w.row_iter() {
                acc += (row[i] - means[i]) * (row[j] - means[j]);
            }
            acc
        })
        .collect();

    let mut gram = Matrix::zeros(d, d);
    for (&(i, j), &v) in pairs.iter().zip(&entries) {
        gram.set(i, j, v);
        gram.set(j, i, v);
    }
    gram
}

/// Cyclic Jacobi rotations on a symmetric matrix. Returns the eigenvalues
/// (diagonal) and the accumulated rotation matrix whose columns are the
/// eigenvectors, both unsorted.
pub(crate) fn jacobi_eigen(sym: &Matrix) -> (Vec<f64>, Matrix) {
    let d = sym.rows();
    assert_eq!(d, sym.cols(), "jacobi needs a square matrix");

    let mut a = sym.clone();
    let mut v = Matrix::identity(d);
    if d == 1 {
        return (vec![a.get(0, 0)], v);
    }

    let frob: f64 = a.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOL * (1.0 + frob);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
        }
        if off.sqrt() <= tol {
            break;
        }

        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                for i in 0..d {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    let new_ip = aip - s * (aiq + tau * aip);
                    let new_iq = aiq + s * (aip - tau * aiq);
                    a.set(i, p, new_ip);
                    a.set(p, i, new_ip);
                    a.set(i, q, new_iq);
                    a.set(q, i, new_iq);
                }
                for i in 0..d {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - s * (viq + tau * vip));
                    v.set(i, q, viq + s * (vip - tau * viq));
                }
            }
        }
    }

    let eigenvalues = (0..d).map(|i| a.get(i, i)).collect();
    (eigenvalues, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::Vocabulary;

    fn model_from_rows(rows: &[Vec<f64>]) -> WordEmbeddingModel {
        let words = (0..rows.len()).map(|i| format!("w{i}")).collect();
        WordEmbeddingModel::new(Vocabulary::new(words).unwrap(), Matrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn rank_one_rows_give_single_component() {
        let model = model_from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![3.0, 0.0]]);
        let (pca, universe) = pca_universe(&model).unwrap();

        // Gram = [[14, 0], [0, 0]] by hand.
        assert!((pca.eigenvalues()[0] - 14.0).abs() < 1e-9);
        assert!(pca.eigenvalues()[1].abs() < 1e-9);
        assert!((pca.explained_variance_ratio()[0] - 1.0).abs() < 1e-12);
        assert!(pca.explained_variance_ratio()[1].abs() < 1e-12);

        // First component is (+-1, 0), sign-fixed positive.
        assert!((pca.components().get(0, 0) - 1.0).abs() < 1e-9);
        assert!(pca.components().get(1, 0).abs() < 1e-9);
        assert_eq!(universe.u(), 2);
        assert_eq!(universe.method(), UniverseMethod::Pca);
    }

    #[test]
    fn identity_rows_give_equal_eigenvalues() {
        let model = model_from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let (pca, _) = pca_universe(&model).unwrap();
        for v in pca.eigenvalues() {
            assert!((v - 1.0).abs() < 1e-9);
        }
        assert_orthonormal(pca.components(), 1e-8);
    }

    #[test]
    fn zero_matrix_still_succeeds() {
        let model = model_from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let (pca, _) = pca_universe(&model).unwrap();
        assert_eq!(pca.eigenvalues(), &[0.0, 0.0]);
        assert_eq!(pca.explained_variance_ratio(), &[0.0, 0.0]);
    }

    #[test]
    fn single_row_rejected() {
        let model = model_from_rows(&[vec![1.0, 2.0]]);
        assert!(pca_universe(&model).is_err());
    }

    #[test]
    fn centered_option_changes_gram() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![3.0, 0.0]]);
        let raw = gram_matrix(&m, false);
        let centered = gram_matrix(&m, true);
        assert!((raw.get(0, 0) - 10.0).abs() < 1e-12);
        assert!((centered.get(0, 0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthonormality_on_random_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..20);
            let d = rng.random_range(1..8);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let model = model_from_rows(&rows);
            let (pca, _) = pca_universe(&model).unwrap();

            assert_orthonormal(pca.components(), 1e-8);
            for w in pca.eigenvalues().windows(2) {
                assert!(w[0] >= w[1]);
            }

            let gram = gram_matrix(model.matrix(), false);
            let p = pca.components();
            let scale = gram.max_abs().max(f64::MIN_POSITIVE);
            for i in 0..d {
                for j in 0..d {
                    let mut rec = 0.0;
                    for l in 0..d {
                        rec += p.get(i, l) * pca.eigenvalues()[l] * p.get(j, l);
                    }
                    assert!(
                        (rec - gram.get(i, j)).abs() <= 1e-6 * scale,
                        "reconstruction off at ({i},{j})"
                    );
                }
            }

            let total: f64 = pca.explained_variance_ratio().iter().sum();
            if pca.eigenvalues().iter().sum::<f64>() > 0.0 {
                assert!((total - 1.0).abs() <= 1e-9);
            }
        }
    }

    fn assert_orthonormal(p: &Matrix, tol: f64) {
        let d = p.rows();
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for r in 0..d {
                    acc += p.get(r, i) * p.get(r, j);
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expected).abs() <= tol, "PtP[{i},{j}]={acc}");
            }
        }
    }
}
