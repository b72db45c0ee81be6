//! Within/between-cluster sum-of-squares, the elbow diagnostics for picking
//! the number of clusters.

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

use super::ClusterModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterDiagnostics {
    /// Sum over clusters of members' squared distances to their centroid.
    pub wcsos: f64,
    /// Sum over clusters of `|members| * ||centroid - global mean||^2`.
    pub bcsos: f64,
    pub k: usize,
}

/// Computes both sums against the model's centroids. Every point must be
/// assigned (noise-free clustering).
pub fn cluster_diagnostics(points: &Matrix, clusters: &ClusterModel) -> Result<ClusterDiagnostics> {
    let n = points.rows();
    let k = clusters.cluster_count();
    if clusters.assignments().len() != n {
        return Err(Error::InvalidParameter(format!(
            "assignments cover {} points, matrix has {n}",
            clusters.assignments().len()
        )));
    }

    let d = points.cols();
    let mut global_mean = vec![0.0; d];
    for row in points.row_iter() {
        for (m, v) in global_mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut global_mean {
        *m /= n as f64;
    }

    let mut wcsos = 0.0;
    let mut sizes = vec![0usize; k];
    for (i, assignment) in clusters.assignments().iter().enumerate() {
        let c = assignment.ok_or_else(|| {
            Error::InvalidParameter("diagnostics require every point to be assigned".into())
        })?;
        sizes[c] += 1;
        wcsos += squared_distance(points.row(i), clusters.centroids().row(c));
    }

    let mut bcsos = 0.0;
    for (c, &size) in sizes.iter().enumerate() {
        bcsos += size as f64 * squared_distance(clusters.centroids().row(c), &global_mean);
    }

    Ok(ClusterDiagnostics { wcsos, bcsos, k })
}
