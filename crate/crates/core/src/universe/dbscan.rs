//! Density-based clustering. Cluster centroids become universe rows; noise
//! points are discarded.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::embeddings::WordEmbeddingModel;
use crate::error::{Error, Result};
use crate::matrix::{dot, l2_norm, squared_distance, Matrix};

use super::{ClusterModel, DistanceMetric, UniverseMatrix, UniverseMethod, UniverseParams};

fn distance(a: &[f64], b: &[f64], metric: DistanceMetric) -> f64 {
    match metric {
        DistanceMetric::Euclidean => squared_distance(a, b).sqrt(),
        DistanceMetric::Cosine => {
            let na = l2_norm(a);
            let nb = l2_norm(b);
            if na == 0.0 || nb == 0.0 {
                1.0
            } else {
                1.0 - dot(a, b) / (na * nb)
            }
        }
    }
}

/// Standard density-based clustering over the rows of `points`. A point is a
/// core point when at least `min_pts` points (itself included) lie within
/// `eps`. Unreachable points stay unassigned (`None`).
pub fn dbscan(
    points: &Matrix,
    eps: f64,
    min_pts: usize,
    metric: DistanceMetric,
) -> Result<ClusterModel> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if min_pts == 0 {
        return Err(Error::InvalidParameter("min_pts must be at least 1".into()));
    }

    let n = points.rows();
    let neighborhoods: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| distance(points.row(i), points.row(j), metric) <= eps)
                .collect()
        })
        .collect();

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut clusters = 0usize;

    for p in 0..n {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        if neighborhoods[p].len() < min_pts {
            continue; // noise for now; may become a border point later
        }

        let cluster = clusters;
        clusters += 1;
        labels[p] = Some(cluster);

        let mut queue: VecDeque<usize> = neighborhoods[p].iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            if labels[q].is_none() {
                labels[q] = Some(cluster);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            if neighborhoods[q].len() >= min_pts {
                queue.extend(neighborhoods[q].iter().copied());
            }
        }
    }

    let mut centroid_rows = Vec::with_capacity(clusters);
    for c in 0..clusters {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == Some(c)).collect();
        let mut mean = vec![0.0; points.cols()];
        for &i in &members {
            for (m, v) in mean.iter_mut().zip(points.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= members.len() as f64;
        }
        if metric == DistanceMetric::Cosine {
            let norm = l2_norm(&mean);
            if norm > 0.0 {
                for m in &mut mean {
                    *m /= norm;
                }
            }
        }
        centroid_rows.push(mean);
    }

    Ok(ClusterModel {
        centroids: Matrix::from_rows(&centroid_rows),
        assignments: labels,
        objective_trace: Vec::new(),
    })
}

/// Universe rows are the cluster centroids; zero clusters is an error
/// (a degenerate universe).
pub fn dbscan_universe(
    model: &WordEmbeddingModel,
    eps: f64,
    min_pts: usize,
    metric: DistanceMetric,
) -> Result<(ClusterModel, UniverseMatrix)> {
    let clusters = dbscan(model.matrix(), eps, min_pts, metric)?;
    if clusters.cluster_count() == 0 {
        return Err(Error::DegenerateUniverse);
    }
    let universe = UniverseMatrix::new(
        clusters.centroids.clone(),
        UniverseMethod::Dbscan,
        model.source(),
        UniverseParams {
            eps: Some(eps),
            min_pts: Some(min_pts),
            metric: Some(metric.name().to_string()),
            ..UniverseParams::default()
        },
    )?;
    Ok((clusters, universe))
}
