//! Gold-labelled sentence-pair datasets, Spearman rank correlation and the
//! cross-task aggregation statistics.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sentence pair with its human similarity score.
#[derive(Debug, Clone, PartialEq)]
pub struct StsPair {
    pub sentence_a: String,
    pub sentence_b: String,
    pub gold: f64,
}

/// A named collection of gold-labelled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct StsDataset {
    pub name: String,
    pub pairs: Vec<StsPair>,
}

impl StsDataset {
    pub fn support(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StsLoadStats {
    /// Unlabelled or malformed lines that were skipped.
    pub skipped_lines: usize,
}

/// Loads a `gold<TAB>sentence_a<TAB>sentence_b` file. The task name is the
/// file stem. Lines without a parsable gold score are skipped and tallied.
pub fn load_sts(path: &Path) -> Result<(StsDataset, StsLoadStats)> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let file = File::open(path)?;
    read_sts(name, BufReader::new(file))
}

pub fn read_sts<R: BufRead>(
    name: impl Into<String>,
    reader: R,
) -> Result<(StsDataset, StsLoadStats)> {
    let name = name.into();
    let mut pairs = Vec::new();
    let mut stats = StsLoadStats::default();

    for line in reader.lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [gold, a, b] = fields.as_slice() else {
            stats.skipped_lines += 1;
            continue;
        };
        let Ok(gold) = gold.trim().parse::<f64>() else {
            stats.skipped_lines += 1;
            continue;
        };
        if !gold.is_finite() {
            stats.skipped_lines += 1;
            continue;
        }
        pairs.push(StsPair {
            sentence_a: a.to_string(),
            sentence_b: b.to_string(),
            gold,
        });
    }

    if pairs.is_empty() {
        return Err(Error::EmptyDataset(name));
    }
    Ok((StsDataset { name, pairs }, stats))
}

/// Average ranks (1-based); tied values receive the mean of their rank span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));

    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the ranks i+1..=j+1; everyone gets the mean.
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let da = a - mx;
        let db = b - my;
        cov += da * db;
        vx += da * da;
        vy += db * db;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::ConstantInput(
            "rank correlation is undefined when an input has zero rank variance".into(),
        ));
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Spearman's rank correlation: Pearson correlation of the average ranks.
/// Errors on length mismatch, non-finite values or constant inputs.
pub fn spearman_rho(predicted: &[f64], gold: &[f64]) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            found: predicted.len(),
        });
    }
    if predicted.len() < 2 {
        return Err(Error::InvalidParameter(
            "rank correlation needs at least two observations".into(),
        ));
    }
    if let Some(v) = predicted.iter().chain(gold).find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite value {v} in correlation input"
        )));
    }
    pearson(&average_ranks(predicted), &average_ranks(gold))
}

/// Spearman rho of a scored task, as a percentage.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskScore {
    pub task: String,
    pub rho: f64,
}

/// Scores every pair with the given function (in parallel, order-stable) and
/// correlates against gold. The returned rho is scaled to a percentage.
pub fn evaluate_task<F>(dataset: &StsDataset, scorer: F) -> Result<TaskScore>
where
    F: Fn(&str, &str) -> f64 + Sync,
{
    let predicted: Vec<f64> = dataset
        .pairs
        .par_iter()
        .map(|p| scorer(&p.sentence_a, &p.sentence_b))
        .collect();
    let gold: Vec<f64> = dataset.pairs.iter().map(|p| p.gold).collect();
    let rho = spearman_rho(&predicted, &gold).map_err(|e| match e {
        Error::ConstantInput(msg) => Error::ConstantInput(format!("task {}: {msg}", dataset.name)),
        other => other,
    })?;
    Ok(TaskScore {
        task: dataset.name.clone(),
        rho: 100.0 * rho,
    })
}

/// Per-task row of an evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task: String,
    pub support: usize,
    pub rho: f64,
}

/// Cross-task statistics. Standard deviations use the population formula;
/// the weighted variants weight by task support.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub tasks: Vec<TaskSummary>,
    pub average: f64,
    pub std_dev: f64,
    pub weighted_average: f64,
    pub weighted_std_dev: f64,
}

/// Aggregates per-task scores. Tasks keep their input order; every task needs
/// a support entry.
pub fn aggregate(scores: &[TaskScore], supports: &HashMap<String, usize>) -> Result<EvalSummary> {
    if scores.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot aggregate an empty score list".into(),
        ));
    }
    let mut tasks = Vec::with_capacity(scores.len());
    for score in scores {
        let support = *supports
            .get(&score.task)
            .ok_or_else(|| Error::MissingSupport(score.task.clone()))?;
        tasks.push(TaskSummary {
            task: score.task.clone(),
            support,
            rho: score.rho,
        });
    }

    let n = tasks.len() as f64;
    let average = tasks.iter().map(|t| t.rho).sum::<f64>() / n;
    let variance = tasks
        .iter()
        .map(|t| {
            let d = t.rho - average;
            d * d
        })
        .sum::<f64>()
        / n;

    let total_support: f64 = tasks.iter().map(|t| t.support as f64).sum();
    let weighted_average =
        tasks.iter().map(|t| t.support as f64 * t.rho).sum::<f64>() / total_support;
    let weighted_variance = tasks
        .iter()
        .map(|t| {
            let d = t.rho - weighted_average;
            t.support as f64 * d * d
        })
        .sum::<f64>()
        / total_support;

    Ok(EvalSummary {
        tasks,
        average,
        std_dev: variance.sqrt(),
        weighted_average,
        weighted_std_dev: weighted_variance.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format {other:?} (use tsv or json)"
            ))),
        }
    }
}

/// Serializable mirror of a summary with values rounded to two decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub tasks: Vec<TaskSummary>,
    pub average: f64,
    pub std: f64,
    pub weighted_average: f64,
    pub weighted_std: f64,
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

impl ReportDoc {
    pub fn from_summary(summary: &EvalSummary) -> ReportDoc {
        ReportDoc {
            tasks: summary
                .tasks
                .iter()
                .map(|t| TaskSummary {
                    task: t.task.clone(),
                    support: t.support,
                    rho: round2(t.rho),
                })
                .collect(),
            average: round2(summary.average),
            std: round2(summary.std_dev),
            weighted_average: round2(summary.weighted_average),
            weighted_std: round2(summary.weighted_std_dev),
        }
    }
}

/// Renders a summary with rho values as two-decimal percentages. Field order
/// is deterministic.
pub fn report(summary: &EvalSummary, format: ReportFormat) -> Result<String> {
    if summary.tasks.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot report an empty summary".into(),
        ));
    }
    match format {
        ReportFormat::Tsv => {
            let mut out = String::from("task\tsupport\trho\n");
            for t in &summary.tasks {
                out.push_str(&format!("{}\t{}\t{:.2}\n", t.task, t.support, t.rho));
            }
            out.push_str(&format!("average\t\t{:.2}\n", summary.average));
            out.push_str(&format!("std\t\t{:.2}\n", summary.std_dev));
            out.push_str(&format!(
                "weighted_average\t\t{:.2}\n",
                summary.weighted_average
            ));
            out.push_str(&format!(
                "weighted_std\t\t{:.2}\n",
                summary.weighted_std_dev
            ));
            Ok(out)
        }
        ReportFormat::Json => {
            let doc = ReportDoc::from_summary(summary);
            let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
            out.push('\n');
            Ok(out)
        }
    }
}
