//! Lloyd's algorithm with k-means++ seeding, in a Euclidean and a cosine
//! (spherical) variant. Centroids of a fitted model become universe rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embeddings::WordEmbeddingModel;
use crate::error::{Error, Result};
use crate::matrix::{dot, l2_norm, squared_distance, Matrix};

use super::{UniverseMatrix, UniverseMethod, UniverseParams};

const MAX_ITERATIONS: usize = 300;

/// A fitted clustering: centroids, per-point assignment (`None` marks noise,
/// which only the density-based algorithm produces) and the per-iteration
/// objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub(crate) centroids: Matrix,
    pub(crate) assignments: Vec<Option<usize>>,
    pub(crate) objective_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn centroids(&self) -> &Matrix {
        &self.centroids
    }

    pub fn assignments(&self) -> &[Option<usize>] {
        &self.assignments
    }

    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn cluster_count(&self) -> usize {
        self.centroids.rows()
    }

    pub fn noise_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_none()).count()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Euclidean,
    Spherical,
}

impl Variant {
    /// Dissimilarity minimized by assignment: squared distance, or 1 - cos.
    fn cost(self, point: &[f64], centroid: &[f64]) -> f64 {
        match self {
            Variant::Euclidean => squared_distance(point, centroid),
            Variant::Spherical => 1.0 - dot(point, centroid),
        }
    }
}

/// Euclidean k-means over the rows of `points`.
pub fn kmeans(points: &Matrix, k: usize, seed: u64) -> Result<ClusterModel> {
    validate_k(k, points.rows())?;
    Ok(lloyd(points, k, seed, Variant::Euclidean))
}

/// Spherical k-means; rows must already be unit-norm (see
/// [`unit_normalize_rows`]). Assignment maximizes cosine similarity and
/// centroids are normalized means.
pub fn spherical_kmeans(points: &Matrix, k: usize, seed: u64) -> Result<ClusterModel> {
    validate_k(k, points.rows())?;
    for (i, row) in points.row_iter().enumerate() {
        if (l2_norm(row) - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "spherical k-means requires unit-norm rows (row {i} is not)"
            )));
        }
    }
    Ok(lloyd(points, k, seed, Variant::Spherical))
}

/// Drops zero-norm rows and scales the rest to unit length. Returns the
/// normalized matrix and the original indices of the kept rows.
pub fn unit_normalize_rows(points: &Matrix) -> (Matrix, Vec<usize>) {
    let mut kept = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in points.row_iter().enumerate() {
        let norm = l2_norm(row);
        if norm > 0.0 {
            kept.push(i);
            rows.push(row.iter().map(|v| v / norm).collect::<Vec<f64>>());
        }
    }
    (Matrix::from_rows(&rows), kept)
}

/// Clusters the model rows and uses the centroids as universe rows.
pub fn kmeans_universe(
    model: &WordEmbeddingModel,
    k: usize,
    seed: u64,
) -> Result<(ClusterModel, UniverseMatrix)> {
    let clusters = kmeans(model.matrix(), k, seed)?;
    let universe = UniverseMatrix::new(
        clusters.centroids.clone(),
        UniverseMethod::Kmeans,
        model.source(),
        UniverseParams {
            k: Some(k),
            seed: Some(seed),
            ..UniverseParams::default()
        },
    )?;
    Ok((clusters, universe))
}

/// Spherical variant over the unit-normalized nonzero rows of the model.
pub fn spherical_kmeans_universe(
    model: &WordEmbeddingModel,
    k: usize,
    seed: u64,
) -> Result<(ClusterModel, UniverseMatrix)> {
    let (normalized, kept) = unit_normalize_rows(model.matrix());
    if kept.is_empty() {
        return Err(Error::InvalidParameter(
            "all embedding rows have zero norm".into(),
        ));
    }
    let clusters = spherical_kmeans(&normalized, k, seed)?;
    let universe = UniverseMatrix::new(
        clusters.centroids.clone(),
        UniverseMethod::SphericalKmeans,
        model.source(),
        UniverseParams {
            k: Some(k),
            seed: Some(seed),
            ..UniverseParams::default()
        },
    )?;
    Ok((clusters, universe))
}

fn validate_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k ({k}) exceeds the number of points ({n})"
        )));
    }
    Ok(())
}

fn lloyd(points: &Matrix, k: usize, seed: u64, variant: Variant) -> ClusterModel {
    let n = points.rows();
    let mut centroids = plus_plus_init(points, k, seed, variant);
    let mut assignments: Vec<usize> = Vec::new();
    let mut trace = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let new_assignments = assign(points, &centroids, variant);
        if new_assignments == assignments {
            break;
        }
        assignments = new_assignments;
        update_centroids(points, &assignments, &mut centroids, variant);
        trace.push(objective(points, &centroids, &assignments, variant));
    }
    if assignments.is_empty() {
        assignments = vec![0; n];
    }

    ClusterModel {
        centroids,
        assignments: assignments.into_iter().map(Some).collect(),
        objective_trace: trace,
    }
}

/// k-means++: first centroid uniform, then points weighted by their cost to
/// the nearest chosen centroid.
fn plus_plus_init(points: &Matrix, k: usize, seed: u64, variant: Variant) -> Matrix {
    let n = points.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(k);

    let first = rng.random_range(0..n);
    chosen.push(first);
    let mut weight: Vec<f64> = (0..n)
        .map(|i| variant.cost(points.row(i), points.row(first)).max(0.0))
        .collect();

    while chosen.len() < k {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in weight.iter().enumerate() {
                r -= w;
                if r <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // All remaining mass is zero (duplicate points); fall back to uniform.
            rng.random_range(0..n)
        };
        chosen.push(pick);
        for (i, w) in weight.iter_mut().enumerate() {
            let c = variant.cost(points.row(i), points.row(pick)).max(0.0);
            if c < *w {
                *w = c;
            }
        }
    }

    points.select_rows(&chosen)
}

fn assign(points: &Matrix, centroids: &Matrix, variant: Variant) -> Vec<usize> {
    (0..points.rows())
        .into_par_iter()
        .map(|i| {
            let row = points.row(i);
            let mut best = 0;
            let mut best_cost = variant.cost(row, centroids.row(0));
            for c in 1..centroids.rows() {
                let cost = variant.cost(row, centroids.row(c));
                if cost < best_cost {
                    best = c;
                    best_cost = cost;
                }
            }
            best
        })
        .collect()
}

fn update_centroids(
    points: &Matrix,
    assignments: &[usize],
    centroids: &mut Matrix,
    variant: Variant,
) {
    let k = centroids.rows();
    let d = points.cols();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];

    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        let row = points.row(i);
        for (s, v) in sums[a * d..(a + 1) * d].iter_mut().zip(row) {
            *s += v;
        }
    }

    for c in 0..k {
        if counts[c] == 0 {
            // Empty cluster: reseed to the point farthest from its previous
            // centroid so the universe keeps exactly k rows.
            let old = centroids.row(c).to_vec();
            let mut far = 0;
            let mut far_cost = variant.cost(points.row(0), &old);
            for i in 1..points.rows() {
                let cost = variant.cost(points.row(i), &old);
                if cost > far_cost {
                    far = i;
                    far_cost = cost;
                }
            }
            centroids.row_mut(c).copy_from_slice(points.row(far));
            continue;
        }
        let inv = 1.0 / counts[c] as f64;
        let mean: Vec<f64> = sums[c * d..(c + 1) * d].iter().map(|s| s * inv).collect();
        match variant {
            Variant::Euclidean => centroids.row_mut(c).copy_from_slice(&mean),
            Variant::Spherical => {
                let norm = l2_norm(&mean);
                if norm > 0.0 {
                    for (dst, v) in centroids.row_mut(c).iter_mut().zip(&mean) {
                        *dst = v / norm;
                    }
                }
                // Zero mean (perfectly opposed members): keep the old direction.
            }
        }
    }
}

fn objective(points: &Matrix, centroids: &Matrix, assignments: &[usize], variant: Variant) -> f64 {
    assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| variant.cost(points.row(i), centroids.row(a)))
        .sum()
}
