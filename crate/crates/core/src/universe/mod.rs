//! Universe matrices: the reference fuzzy sets that word memberships are
//! computed against. Construction methods live in submodules; this module
//! owns the shared types and the on-disk format.

mod dbscan;
mod diagnostics;
mod kmeans;
mod pca;

pub use dbscan::{dbscan, dbscan_universe};
pub use diagnostics::{cluster_diagnostics, ClusterDiagnostics};
pub use kmeans::{
    kmeans, kmeans_universe, spherical_kmeans, spherical_kmeans_universe, unit_normalize_rows,
    ClusterModel,
};
pub use pca::{pca_universe, pca_universe_with, PcaModel};

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAGIC: &[u8; 4] = b"SFBW";
const FORMAT_VERSION: u16 = 1;

/// How a universe matrix was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniverseMethod {
    Identity,
    Pca,
    Kmeans,
    SphericalKmeans,
    Dbscan,
}

impl UniverseMethod {
    pub fn name(&self) -> &'static str {
        match self {
            UniverseMethod::Identity => "identity",
            UniverseMethod::Pca => "pca",
            UniverseMethod::Kmeans => "kmeans",
            UniverseMethod::SphericalKmeans => "spherical_kmeans",
            UniverseMethod::Dbscan => "dbscan",
        }
    }

    fn tag(&self) -> u8 {
        match self {
            UniverseMethod::Identity => 0,
            UniverseMethod::Pca => 1,
            UniverseMethod::Kmeans => 2,
            UniverseMethod::SphericalKmeans => 3,
            UniverseMethod::Dbscan => 4,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => UniverseMethod::Identity,
            1 => UniverseMethod::Pca,
            2 => UniverseMethod::Kmeans,
            3 => UniverseMethod::SphericalKmeans,
            4 => UniverseMethod::Dbscan,
            other => {
                return Err(Error::Format(format!(
                    "unknown universe method tag {other}"
                )))
            }
        })
    }
}

impl fmt::Display for UniverseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distance used by the density-based builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    Euclidean,
    Cosine,
}

impl DistanceMetric {
    pub fn name(&self) -> &'static str {
        match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::Cosine => "cosine",
        }
    }
}

impl std::str::FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "cosine" => Ok(DistanceMetric::Cosine),
            other => Err(Error::InvalidParameter(format!(
                "unknown distance metric {other:?} (use euclidean or cosine)"
            ))),
        }
    }
}

/// Construction hyperparameters, persisted alongside the matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UniverseParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_pts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centered: Option<bool>,
}

/// Content fingerprint of a universe; embeddings carry it so that only
/// embeddings from the same universe are ever compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniverseId(u64);

impl UniverseId {
    pub fn value(self) -> u64 {
        self.0
    }

    /// Id for a universe assembled on the fly (pair-dependent construction).
    pub(crate) fn of_matrix(matrix: &Matrix) -> UniverseId {
        let mut bytes = Vec::with_capacity(matrix.data().len() * 4 + 8);
        bytes.extend_from_slice(&(matrix.rows() as u32).to_le_bytes());
        bytes.extend_from_slice(&(matrix.cols() as u32).to_le_bytes());
        for &v in matrix.data() {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
        UniverseId(fnv1a64(&bytes))
    }
}

impl fmt::Display for UniverseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// A `u x d` universe matrix with its construction provenance.
#[derive(Debug, Clone)]
pub struct UniverseMatrix {
    matrix: Matrix,
    method: UniverseMethod,
    source: String,
    params: UniverseParams,
    id: UniverseId,
}

impl UniverseMatrix {
    pub fn new(
        matrix: Matrix,
        method: UniverseMethod,
        source: impl Into<String>,
        params: UniverseParams,
    ) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::InvalidParameter(
                "universe matrix must have at least one row and one column".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter(
                "universe matrix contains non-finite values".into(),
            ));
        }
        if method == UniverseMethod::Identity && matrix != Matrix::identity(matrix.cols()) {
            return Err(Error::InvalidParameter(
                "identity universe must be exactly the identity matrix".into(),
            ));
        }
        let source = source.into();
        let bytes = serialize_parts(&matrix, method, &source, &params);
        let id = UniverseId(fnv1a64(&bytes));
        Ok(UniverseMatrix {
            matrix,
            method,
            source,
            params,
            id,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn method(&self) -> UniverseMethod {
        self.method
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn params(&self) -> &UniverseParams {
        &self.params
    }

    pub fn id(&self) -> UniverseId {
        self.id
    }

    /// Universe size (number of reference sets).
    pub fn u(&self) -> usize {
        self.matrix.rows()
    }

    /// Word-embedding dimensionality this universe applies to.
    pub fn d(&self) -> usize {
        self.matrix.cols()
    }

    /// Little-endian binary encoding. Matrix entries are stored as `f32`.
    pub fn to_bytes(&self) -> Vec<u8> {
        serialize_parts(&self.matrix, self.method, &self.source, &self.params)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut rest = bytes;
        let magic = take(&mut rest, 4)?;
        if magic != MAGIC {
            return Err(Error::Format("bad magic, not a universe file".into()));
        }
        let version = u16::from_le_bytes(take(&mut rest, 2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported universe format version {version}"
            )));
        }
        let method = UniverseMethod::from_tag(take(&mut rest, 1)?[0])?;
        let u = u32::from_le_bytes(take(&mut rest, 4)?.try_into().unwrap()) as usize;
        let d = u32::from_le_bytes(take(&mut rest, 4)?.try_into().unwrap()) as usize;
        let meta_len = u32::from_le_bytes(take(&mut rest, 4)?.try_into().unwrap()) as usize;
        let meta_bytes = take(&mut rest, meta_len)?;
        let meta: MetaBlock = serde_json::from_slice(meta_bytes)
            .map_err(|e| Error::Format(format!("bad params block: {e}")))?;

        let want = u
            .checked_mul(d)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::Format("universe shape overflows".into()))?;
        let raw = take(&mut rest, want)?;
        if !rest.is_empty() {
            return Err(Error::Format("trailing data in universe file".into()));
        }
        let data: Vec<f64> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();

        UniverseMatrix::new(
            Matrix::from_vec(u, d, data),
            method,
            meta.source,
            UniverseParams {
                k: meta.k,
                seed: meta.seed,
                eps: meta.eps,
                min_pts: meta.min_pts,
                metric: meta.metric,
                centered: meta.centered,
            },
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

#[derive(Serialize, Deserialize)]
struct MetaBlock {
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_pts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    centered: Option<bool>,
}

fn serialize_parts(
    matrix: &Matrix,
    method: UniverseMethod,
    source: &str,
    params: &UniverseParams,
) -> Vec<u8> {
    let meta = MetaBlock {
        source: source.to_string(),
        k: params.k,
        seed: params.seed,
        eps: params.eps,
        min_pts: params.min_pts,
        metric: params.metric.clone(),
        centered: params.centered,
    };
    let meta_json = serde_json::to_vec(&meta).expect("params serialize");

    let mut bytes = Vec::with_capacity(19 + meta_json.len() + matrix.data().len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.push(method.tag());
    bytes.extend_from_slice(&(matrix.rows() as u32).to_le_bytes());
    bytes.extend_from_slice(&(matrix.cols() as u32).to_le_bytes());
    bytes.extend_from_slice(&(meta_json.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&meta_json);
    for &v in matrix.data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    bytes
}

fn take<'a>(rest: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if rest.len() < n {
        return Err(Error::Format("truncated universe file".into()));
    }
    let (head, tail) = rest.split_at(n);
    *rest = tail;
    Ok(head)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// The `d x d` identity universe: memberships are the (clipped) embedding
/// features themselves.
pub fn identity_universe(d: usize) -> Result<UniverseMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "universe dimension must be positive".into(),
        ));
    }
    UniverseMatrix::new(
        Matrix::identity(d),
        UniverseMethod::Identity,
        "identity",
        UniverseParams::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_universe_shape() {
        let u = identity_universe(3).unwrap();
        assert_eq!(u.u(), 3);
        assert_eq!(u.d(), 3);
        assert_eq!(u.method(), UniverseMethod::Identity);
        assert_eq!(*u.matrix(), Matrix::identity(3));
    }

    #[test]
    fn identity_universe_matches_embedding_dim() {
        let u = identity_universe(300).unwrap();
        assert_eq!(u.u(), 300);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(identity_universe(0).is_err());
    }

    #[test]
    fn bytes_roundtrip_preserves_metadata() {
        let u = identity_universe(4).unwrap();
        let back = UniverseMatrix::from_bytes(&u.to_bytes()).unwrap();
        assert_eq!(back.matrix(), u.matrix());
        assert_eq!(back.method(), u.method());
        assert_eq!(back.source(), u.source());
        assert_eq!(back.params(), u.params());
        assert_eq!(back.id(), u.id());
    }

    #[test]
    fn truncated_file_is_a_format_error() {
        let bytes = identity_universe(4).unwrap().to_bytes();
        for cut in [0, 3, 6, 10, 18, bytes.len() - 1] {
            let err = UniverseMatrix::from_bytes(&bytes[..cut]).unwrap_err();
            assert!(matches!(err, Error::Format(_)), "cut={cut}");
        }
    }

    #[test]
    fn bad_magic_rejected() {
        let mut bytes = identity_universe(2).unwrap().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            UniverseMatrix::from_bytes(&bytes),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("identity.sfbw");
        let u = identity_universe(4).unwrap();
        u.save(&path).unwrap();
        let back = UniverseMatrix::load(&path).unwrap();
        assert_eq!(back.matrix(), u.matrix());
        assert_eq!(back.id(), u.id());
    }

    #[test]
    fn id_is_stable_across_f32_quantization() {
        let m = Matrix::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.4]]);
        let a = UniverseMatrix::new(m, UniverseMethod::Kmeans, "full", UniverseParams::default())
            .unwrap();
        let b = UniverseMatrix::from_bytes(&a.to_bytes()).unwrap();
        assert_eq!(a.id(), b.id());
    }
}
