//! Flag parsing and config-file merging. Every run is described by a
//! `ResolvedConfig`; explicit flags win over config-file entries, which win
//! over defaults.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use sfbow::{DistanceMetric, EmbeddingFormat, PipelineMeasure, ReportFormat};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DBSCAN_MIN_PTS: usize = 5;

/// Flags shared by every subcommand. All optional so a config file can fill
/// the gaps.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Pretrained word-embedding file
    #[arg(long)]
    pub embeddings: Option<PathBuf>,

    /// Embedding file format: word2vec | glove
    #[arg(long)]
    pub format: Option<String>,

    /// Vocabulary policy: full | top:N | list:PATH
    #[arg(long)]
    pub vocab: Option<String>,

    /// Universe: identity | pca | kmeans:K | skmeans:K |
    /// dbscan:EPS[:MINPTS[:METRIC]] | dynamax | file:PATH
    #[arg(long)]
    pub universe: Option<String>,

    /// Similarity measure: fuzzy-jaccard | cosine | avg-cosine
    #[arg(long)]
    pub measure: Option<String>,

    /// Seed for clustering initialization
    #[arg(long)]
    pub seed: Option<u64>,

    /// Report format: tsv | json
    #[arg(long)]
    pub output: Option<String>,

    /// Keep negative memberships instead of clipping them (diagnostic)
    #[arg(long)]
    pub no_clip: bool,

    /// Mean-center rows before the PCA universe
    #[arg(long)]
    pub pca_center: bool,

    /// key=value defaults file; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum VocabSpec {
    Full,
    TopN(usize),
    WordList(PathBuf),
}

#[derive(Debug, Clone)]
pub enum UniverseSpec {
    Identity,
    Pca,
    Kmeans(usize),
    SphericalKmeans(usize),
    Dbscan {
        eps: f64,
        min_pts: usize,
        metric: DistanceMetric,
    },
    Dynamax,
    File(PathBuf),
}

#[derive(Debug)]
pub struct ResolvedConfig {
    pub embeddings: PathBuf,
    pub format: EmbeddingFormat,
    pub vocab: VocabSpec,
    pub universe: UniverseSpec,
    pub measure: PipelineMeasure,
    pub seed: u64,
    pub output: ReportFormat,
    pub clip: bool,
    pub pca_center: bool,
}

pub fn resolve(args: &CommonArgs) -> Result<ResolvedConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let from_file = |key: &str| file.get(key).cloned();

    let embeddings = args
        .embeddings
        .clone()
        .or_else(|| from_file("embeddings").map(PathBuf::from))
        .context("--embeddings is required (flag or config file)")?;

    let format = match args.format.clone().or_else(|| from_file("format")) {
        None => bail!("--format is required (word2vec or glove)"),
        Some(s) => parse_format(&s)?,
    };

    let vocab = match args.vocab.clone().or_else(|| from_file("vocab")) {
        None => VocabSpec::Full,
        Some(s) => parse_vocab(&s)?,
    };

    let universe = match args.universe.clone().or_else(|| from_file("universe")) {
        None => UniverseSpec::Identity,
        Some(s) => parse_universe(&s)?,
    };

    let measure = match args.measure.clone().or_else(|| from_file("measure")) {
        None => PipelineMeasure::FuzzyJaccard,
        Some(s) => parse_measure(&s)?,
    };

    let seed = match args.seed {
        Some(seed) => seed,
        None => match from_file("seed") {
            Some(s) => s.parse().with_context(|| format!("bad seed {s:?}"))?,
            None => DEFAULT_SEED,
        },
    };

    let output = match args.output.clone().or_else(|| from_file("output")) {
        None => ReportFormat::Tsv,
        Some(s) => s.parse::<ReportFormat>()?,
    };

    let no_clip =
        args.no_clip || matches!(from_file("no-clip").as_deref(), Some(s) if parse_bool(s)?);
    let pca_center =
        args.pca_center || matches!(from_file("pca-center").as_deref(), Some(s) if parse_bool(s)?);

    Ok(ResolvedConfig {
        embeddings,
        format,
        vocab,
        universe,
        measure,
        seed,
        output,
        clip: !no_clip,
        pca_center,
    })
}

fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), i + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => bail!("expected a boolean, found {other:?}"),
    }
}

fn parse_format(s: &str) -> Result<EmbeddingFormat> {
    match s {
        "word2vec" => Ok(EmbeddingFormat::Word2VecText),
        "glove" => Ok(EmbeddingFormat::GloveText),
        other => bail!("unknown embedding format {other:?} (use word2vec or glove)"),
    }
}

fn parse_vocab(s: &str) -> Result<VocabSpec> {
    if s == "full" {
        return Ok(VocabSpec::Full);
    }
    if let Some(n) = s.strip_prefix("top:") {
        let n: usize = n
            .parse()
            .with_context(|| format!("bad vocab size in {s:?}"))?;
        return Ok(VocabSpec::TopN(n));
    }
    if let Some(path) = s.strip_prefix("list:") {
        return Ok(VocabSpec::WordList(PathBuf::from(path)));
    }
    bail!("unknown vocab policy {s:?} (use full, top:N or list:PATH)")
}

fn parse_universe(s: &str) -> Result<UniverseSpec> {
    match s {
        "identity" => return Ok(UniverseSpec::Identity),
        "pca" => return Ok(UniverseSpec::Pca),
        "dynamax" => return Ok(UniverseSpec::Dynamax),
        _ => {}
    }
    if let Some(k) = s.strip_prefix("kmeans:") {
        return Ok(UniverseSpec::Kmeans(
            k.parse().with_context(|| format!("bad k in {s:?}"))?,
        ));
    }
    if let Some(k) = s.strip_prefix("skmeans:") {
        return Ok(UniverseSpec::SphericalKmeans(
            k.parse().with_context(|| format!("bad k in {s:?}"))?,
        ));
    }
    if let Some(rest) = s.strip_prefix("dbscan:") {
        let mut parts = rest.split(':');
        let eps: f64 = parts
            .next()
            .filter(|p| !p.is_empty())
            .context("dbscan needs an epsilon: dbscan:EPS[:MINPTS[:METRIC]]")?
            .parse()
            .with_context(|| format!("bad epsilon in {s:?}"))?;
        let min_pts = match parts.next() {
            None => DEFAULT_DBSCAN_MIN_PTS,
            Some(p) => p.parse().with_context(|| format!("bad min_pts in {s:?}"))?,
        };
        let metric = match parts.next() {
            None => DistanceMetric::Euclidean,
            Some(m) => m.parse::<DistanceMetric>()?,
        };
        if parts.next().is_some() {
            bail!("too many fields in {s:?}");
        }
        return Ok(UniverseSpec::Dbscan {
            eps,
            min_pts,
            metric,
        });
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(UniverseSpec::File(PathBuf::from(path)));
    }
    bail!(
        "unknown universe {s:?} (use identity, pca, kmeans:K, skmeans:K, \
         dbscan:EPS[:MINPTS[:METRIC]], dynamax or file:PATH)"
    )
}

fn parse_measure(s: &str) -> Result<PipelineMeasure> {
    match s {
        "fuzzy-jaccard" => Ok(PipelineMeasure::FuzzyJaccard),
        "cosine" => Ok(PipelineMeasure::Cosine),
        "avg-cosine" => Ok(PipelineMeasure::AvgCosine),
        other => bail!("unknown measure {other:?} (use fuzzy-jaccard, cosine or avg-cosine)"),
    }
}
