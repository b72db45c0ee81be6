//! Subcommand implementations. Timing and warnings go to stderr; stdout is
//! deterministic for a fixed config and seed.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use sfbow::{
    aggregate, cluster_diagnostics, dbscan_universe, evaluate_task, identity_universe, kmeans,
    kmeans_universe, load_embeddings, load_sts, pca_universe_with, reduce_vocabulary, report,
    spherical_kmeans, spherical_kmeans_universe, unit_normalize_rows, Pipeline, PipelineMeasure,
    ReducePolicy, UniverseMatrix, WordEmbeddingModel,
};

use crate::config::{ResolvedConfig, UniverseSpec, VocabSpec};

fn load_model(cfg: &ResolvedConfig) -> Result<WordEmbeddingModel> {
    let (model, stats) = load_embeddings(&cfg.embeddings, cfg.format)
        .with_context(|| format!("loading {}", cfg.embeddings.display()))?;
    if stats.duplicate_tokens > 0 {
        eprintln!(
            "warning: {} duplicate tokens dropped (first occurrence kept)",
            stats.duplicate_tokens
        );
    }
    match &cfg.vocab {
        VocabSpec::Full => Ok(model),
        VocabSpec::TopN(n) => {
            let (reduced, stats) = reduce_vocabulary(&model, &ReducePolicy::TopN(*n))?;
            if stats.clamped {
                eprintln!(
                    "warning: top:{n} exceeds vocabulary size {}; using the full model",
                    reduced.vocab().len()
                );
            }
            Ok(reduced)
        }
        VocabSpec::WordList(path) => {
            let (reduced, stats) =
                reduce_vocabulary(&model, &ReducePolicy::WordList(path.clone()))?;
            if stats.unmatched_list_entries > 0 {
                eprintln!(
                    "warning: {} word-list entries not found in the vocabulary",
                    stats.unmatched_list_entries
                );
            }
            Ok(reduced)
        }
    }
}

fn build_universe_matrix(
    cfg: &ResolvedConfig,
    model: &WordEmbeddingModel,
) -> Result<UniverseMatrix> {
    Ok(match &cfg.universe {
        UniverseSpec::Identity => identity_universe(model.dim())?,
        UniverseSpec::Pca => pca_universe_with(model, cfg.pca_center)?.1,
        UniverseSpec::Kmeans(k) => kmeans_universe(model, *k, cfg.seed)?.1,
        UniverseSpec::SphericalKmeans(k) => spherical_kmeans_universe(model, *k, cfg.seed)?.1,
        UniverseSpec::Dbscan {
            eps,
            min_pts,
            metric,
        } => dbscan_universe(model, *eps, *min_pts, *metric)?.1,
        UniverseSpec::File(path) => UniverseMatrix::load(path)
            .with_context(|| format!("loading universe {}", path.display()))?,
        UniverseSpec::Dynamax => bail!("dynamax has no fixed universe matrix"),
    })
}

fn build_pipeline(cfg: &ResolvedConfig) -> Result<Pipeline> {
    let model = load_model(cfg)?;
    if cfg.measure == PipelineMeasure::AvgCosine {
        // The averaging baseline never touches a universe.
        return Ok(Pipeline::average_baseline(model));
    }
    match &cfg.universe {
        UniverseSpec::Dynamax => Ok(Pipeline::dynamax(model, cfg.measure, cfg.clip)),
        _ => {
            let universe = build_universe_matrix(cfg, &model)?;
            Ok(Pipeline::with_universe(
                model,
                universe,
                cfg.measure,
                cfg.clip,
            )?)
        }
    }
}

pub fn build_universe(cfg: &ResolvedConfig, out: &Path) -> Result<()> {
    if matches!(cfg.universe, UniverseSpec::Dynamax) {
        bail!("build-universe needs a static universe; dynamax is built per pair");
    }
    let model = load_model(cfg)?;
    let start = Instant::now();
    let universe = build_universe_matrix(cfg, &model)?;
    let elapsed = start.elapsed();
    universe
        .save(out)
        .with_context(|| format!("writing {}", out.display()))?;
    println!(
        "method={} u={} d={}",
        universe.method(),
        universe.u(),
        universe.d()
    );
    eprintln!("built in {:.3}s", elapsed.as_secs_f64());
    Ok(())
}

pub fn similarity(cfg: &ResolvedConfig, sentence_a: &str, sentence_b: &str) -> Result<()> {
    let pipeline = build_pipeline(cfg)?;
    for (label, sentence) in [("first", sentence_a), ("second", sentence_b)] {
        if pipeline.bag(sentence).is_empty() {
            eprintln!("warning: {label} sentence has no in-vocabulary tokens");
        }
    }
    let score = pipeline.score(sentence_a, sentence_b);
    println!("{score:.6}\t{}", cfg.measure.name());
    Ok(())
}

pub fn eval_sts(cfg: &ResolvedConfig, datasets: &[PathBuf]) -> Result<()> {
    let pipeline = build_pipeline(cfg)?;
    let mut scores = Vec::new();
    let mut supports = HashMap::new();
    for path in datasets {
        let (dataset, stats) =
            load_sts(path).with_context(|| format!("loading {}", path.display()))?;
        if stats.skipped_lines > 0 {
            eprintln!(
                "warning: {}: skipped {} unlabelled or malformed lines",
                dataset.name, stats.skipped_lines
            );
        }
        let score = evaluate_task(&dataset, |a, b| pipeline.score(a, b))
            .with_context(|| format!("task {}", dataset.name))?;
        supports.insert(dataset.name.clone(), dataset.support());
        scores.push(score);
    }
    let summary = aggregate(&scores, &supports)?;
    print!("{}", report(&summary, cfg.output)?);
    Ok(())
}

pub enum DiagnosticsMode {
    Pca,
    Clustering { k_list: Vec<usize>, spherical: bool },
}

pub fn diagnostics(cfg: &ResolvedConfig, mode: DiagnosticsMode) -> Result<()> {
    let model = load_model(cfg)?;
    match mode {
        DiagnosticsMode::Pca => {
            let (pca, _) = pca_universe_with(&model, cfg.pca_center)?;
            println!("component\texplained_variance_ratio");
            for (i, ratio) in pca.explained_variance_ratio().iter().enumerate() {
                println!("{}\t{}", i + 1, ratio);
            }
        }
        DiagnosticsMode::Clustering { k_list, spherical } => {
            println!("k\twcsos\tbcsos");
            if spherical {
                let (points, kept) = unit_normalize_rows(model.matrix());
                if kept.is_empty() {
                    bail!("all embedding rows have zero norm");
                }
                for k in k_list {
                    let clusters = spherical_kmeans(&points, k, cfg.seed)?;
                    let diag = cluster_diagnostics(&points, &clusters)?;
                    println!("{k}\t{}\t{}", diag.wcsos, diag.bcsos);
                }
            } else {
                for k in k_list {
                    let clusters = kmeans(model.matrix(), k, cfg.seed)?;
                    let diag = cluster_diagnostics(model.matrix(), &clusters)?;
                    println!("{k}\t{}\t{}", diag.wcsos, diag.bcsos);
                }
            }
        }
    }
    Ok(())
}
