//! Benchmark harness: per-step index tables for an automatic sweep, the
//! distribution-similarity score against ground truth, and timing probes for
//! the cost of SepCmp.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::autoclust::{emk_means, esk_means, AutoConfig, AutoResult};
use crate::dataset::{generate_concentric, label_histogram, ConcentricSpec, Dataset};
use crate::error::{ClusterError, Result};
use crate::kmeans::{kmeans_run, KMeansConfig};
use crate::partition::HardPartition;
use crate::validity::hard_sep_cmp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Emk,
    Esk,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Emk => "EMk-means",
            Algorithm::Esk => "ESk-means",
        }
    }

    pub fn run(self, ds: &Dataset, cfg: &AutoConfig) -> Result<AutoResult> {
        match self {
            Algorithm::Emk => emk_means(ds, cfg),
            Algorithm::Esk => esk_means(ds, cfg),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "emk" => Ok(Algorithm::Emk),
            "esk" => Ok(Algorithm::Esk),
            other => Err(format!("unknown algorithm {other:?} (expected emk|esk)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub auto: AutoConfig,
    /// Attach per-step wall times to the report. Off by default because
    /// timings differ between otherwise identical runs.
    pub include_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub c: usize,
    pub mse: f64,
    pub dunn: f64,
    pub davies_bouldin: f64,
    pub sep_cmp: f64,
}

/// The c at which each index is best: smallest MSE and DB, largest Dunn and
/// SepCmp. Ties go to the smaller c.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexOptima {
    pub mse: usize,
    pub dunn: usize,
    pub davies_bouldin: usize,
    pub sep_cmp: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub c: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub rows: Vec<BenchRow>,
    pub c_opt: IndexOptima,
    /// Cluster sizes of the selected scheme, largest first.
    pub obtained_distribution: Vec<usize>,
    /// Class sizes from the labels, largest first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_distribution: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<StepTiming>>,
}

fn sorted_desc(values: &[usize]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Pairs both histograms largest to smallest (the shorter one padded with
/// zeros) and returns 100 · Σ|real − obtained| / N. Zero means identical.
pub fn distribution_similarity(real: &[usize], obtained: &[usize]) -> Result<f64> {
    let (n_real, n_obtained) = (real.iter().sum::<usize>(), obtained.iter().sum::<usize>());
    if real.is_empty() || obtained.is_empty() || n_real == 0 || n_real != n_obtained {
        return Err(ClusterError::HistogramMismatch {
            real: n_real,
            obtained: n_obtained,
        });
    }
    let (a, b) = (sorted_desc(real), sorted_desc(obtained));
    let len = a.len().max(b.len());
    let diff: usize = (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0).abs_diff(b.get(i).copied().unwrap_or(0)))
        .sum();
    Ok(100.0 * diff as f64 / n_real as f64)
}

fn best_c(rows: &[BenchRow], key: impl Fn(&BenchRow) -> f64, maximize: bool) -> usize {
    rows.iter()
        .fold(None, |best: Option<&BenchRow>, r| match best {
            Some(b) => {
                let (kb, kr) = (key(b), key(r));
                let better = if maximize { kr > kb } else { kr < kb };
                if better || (kr == kb && r.c < b.c) {
                    Some(r)
                } else {
                    Some(b)
                }
            }
            None => Some(r),
        })
        .map(|r| r.c)
        .expect("non-empty sweep")
}

/// Runs one automatic sweep and tabulates MSE, Dunn, DB and SepCmp at every
/// step, plus the similarity to the label distribution when labels exist.
pub fn run_benchmark(ds: &Dataset, algo: Algorithm, cfg: &BenchConfig) -> Result<BenchReport> {
    let result = algo.run(ds, &cfg.auto)?;
    let rows: Vec<BenchRow> = result
        .sweep
        .iter()
        .map(|r| BenchRow {
            c: r.c,
            mse: r.index_report.mse,
            dunn: r.index_report.dunn,
            davies_bouldin: r.index_report.davies_bouldin,
            sep_cmp: r.index_report.sep_cmp,
        })
        .collect();
    let c_opt = IndexOptima {
        mse: best_c(&rows, |r| r.mse, false),
        dunn: best_c(&rows, |r| r.dunn, true),
        davies_bouldin: best_c(&rows, |r| r.davies_bouldin, false),
        sep_cmp: best_c(&rows, |r| r.sep_cmp, true),
    };
    debug_assert_eq!(c_opt.sep_cmp, result.c_opt);
    let obtained_distribution = sorted_desc(&result.best_partition.cardinalities());
    let real_distribution = match label_histogram(ds) {
        Ok(hist) => Some(hist.into_iter().map(|(_, n)| n).collect::<Vec<_>>()),
        Err(ClusterError::LabelsAbsent) => None,
        Err(e) => return Err(e),
    };
    let similarity = match &real_distribution {
        Some(real) => Some(distribution_similarity(real, &obtained_distribution)?),
        None => None,
    };
    let timings = cfg.include_timings.then(|| {
        result
            .sweep
            .iter()
            .map(|r| StepTiming {
                c: r.c,
                seconds: r.wall_time.as_secs_f64(),
            })
            .collect()
    });
    Ok(BenchReport {
        dataset: ds.name().to_string(),
        algorithm: algo,
        n: ds.n(),
        rows,
        c_opt,
        obtained_distribution,
        real_distribution,
        similarity,
        timings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format {other:?} (expected json|csv|markdown)")),
        }
    }
}

/// Renders a report. JSON is lossless, CSV has one line per (c, index) and
/// markdown keeps the sweep order with two decimals.
pub fn emit_report(report: &BenchReport, format: ReportFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            out = serde_json::to_string_pretty(report)?;
            out.push('\n');
        }
        ReportFormat::Csv => {
            out.push_str("c,index,value\n");
            for r in &report.rows {
                for (name, v) in [
                    ("mse", r.mse),
                    ("dunn", r.dunn),
                    ("davies_bouldin", r.davies_bouldin),
                    ("sep_cmp", r.sep_cmp),
                ] {
                    let _ = writeln!(out, "{},{name},{v}", r.c);
                }
            }
        }
        ReportFormat::Markdown => {
            let _ = writeln!(out, "## {} ({}, N = {})\n", report.dataset, report.algorithm.name(), report.n);
            out.push_str("| c | MSE | Dunn | DB | SepCmp |\n");
            out.push_str("|---:|---:|---:|---:|---:|\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "| {} | {:.2} | {:.2} | {:.2} | {:.2} |",
                    r.c, r.mse, r.dunn, r.davies_bouldin, r.sep_cmp
                );
            }
            let o = &report.c_opt;
            let _ = writeln!(
                out,
                "\nBest c: MSE {}, Dunn {}, DB {}, SepCmp {}",
                o.mse, o.dunn, o.davies_bouldin, o.sep_cmp
            );
            let _ = writeln!(out, "Obtained distribution: {:?}", report.obtained_distribution);
            if let Some(real) = &report.real_distribution {
                let _ = writeln!(out, "Real distribution: {real:?}");
            }
            if let Some(s) = report.similarity {
                let _ = writeln!(out, "Similarity: {s:.2}%");
            }
            if let Some(t) = &report.timings {
                let total: f64 = t.iter().map(|s| s.seconds).sum();
                let _ = writeln!(out, "Sweep time: {total:.3} s");
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    /// N for a size probe, c for a cluster-count probe.
    pub size: usize,
    /// Median seconds per SepCmp evaluation.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of ln(seconds) against ln(size); absent with
    /// fewer than two rows.
    pub slope: Option<f64>,
}

const WARMUP: usize = 3;
const MEASURED: usize = 5;
const MIN_BATCH: Duration = Duration::from_millis(10);

fn batch_seconds(ds: &Dataset, hp: &HardPartition, reps: usize) -> f64 {
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(hard_sep_cmp(std::hint::black_box(ds), std::hint::black_box(hp)).ok());
    }
    t.elapsed().as_secs_f64()
}

/// Median seconds per SepCmp evaluation for each case. Every case runs in
/// batches long enough to read the clock reliably, and the rounds visit the
/// cases in turn so that drift in machine speed hits all of them alike.
fn time_sep_cmp(cases: &[(Dataset, HardPartition)]) -> Result<Vec<f64>> {
    let mut reps = Vec::with_capacity(cases.len());
    for (ds, hp) in cases {
        hard_sep_cmp(ds, hp)?;
        let mut r = 1usize;
        while batch_seconds(ds, hp, r) < MIN_BATCH.as_secs_f64() && r < 1 << 24 {
            r *= 2;
        }
        reps.push(r);
    }
    let mut samples = vec![Vec::with_capacity(MEASURED); cases.len()];
    for round in 0..WARMUP + MEASURED {
        for (k, (ds, hp)) in cases.iter().enumerate() {
            let per_call = batch_seconds(ds, hp, reps[k]) / reps[k] as f64;
            if round >= WARMUP {
                samples[k].push(per_call);
            }
        }
    }
    Ok(samples
        .into_iter()
        .map(|mut v| {
            v.sort_by(f64::total_cmp);
            v[MEASURED / 2]
        })
        .collect())
}

fn log_log_slope(rows: &[ScalingRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.size as f64).ln(), r.seconds.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn probe_partition(ds: &Dataset, c: usize, seed: u64) -> Result<HardPartition> {
    let cfg = KMeansConfig::new(c).with_seed(seed).with_restarts(1).with_max_iterations(20);
    Ok(kmeans_run(ds, &cfg)?.partition)
}

/// Times one SepCmp evaluation at fixed c on Concentric data of each size
/// (sizes ascending). The partition is a short k-means run, not timed.
pub fn scaling_probe(template: &ConcentricSpec, sizes: &[usize], c: usize) -> Result<ScalingTable> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClusterError::InvalidConfig("sizes must be strictly ascending".into()));
    }
    let mut cases = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let ds = generate_concentric(&template.resized(n))?;
        let hp = probe_partition(&ds, c, template.rng_seed)?;
        cases.push((ds, hp));
    }
    let rows = sizes
        .iter()
        .zip(time_sep_cmp(&cases)?)
        .map(|(&size, seconds)| ScalingRow { size, seconds })
        .collect::<Vec<_>>();
    let slope = log_log_slope(&rows);
    Ok(ScalingTable { rows, slope })
}

/// Times one SepCmp evaluation at fixed N for each cluster count in `cs`
/// (ascending).
pub fn c_scaling_probe(template: &ConcentricSpec, n: usize, cs: &[usize]) -> Result<ScalingTable> {
    if cs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClusterError::InvalidConfig("cluster counts must be strictly ascending".into()));
    }
    let ds = generate_concentric(&template.resized(n))?;
    let mut cases = Vec::with_capacity(cs.len());
    for &c in cs {
        let hp = probe_partition(&ds, c, template.rng_seed)?;
        cases.push((ds.clone(), hp));
    }
    let rows = cs
        .iter()
        .zip(time_sep_cmp(&cases)?)
        .map(|(&size, seconds)| ScalingRow { size, seconds })
        .collect::<Vec<_>>();
    let slope = log_log_slope(&rows);
    Ok(ScalingTable { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::blobs;

    #[test]
    fn similarity_examples() {
        let s = distribution_similarity(&[50, 50, 50], &[50, 48, 52]).unwrap();
        assert!((s - 400.0 / 150.0).abs() < 1e-12);
        assert_eq!(format!("{s:.2}"), "2.67");
        let s = distribution_similarity(&[59, 71, 48], &[62, 70, 46]).unwrap();
        assert_eq!(format!("{s:.2}"), "3.37");
        assert_eq!(distribution_similarity(&[3, 4], &[4, 3]).unwrap(), 0.0);
        assert_eq!(distribution_similarity(&[10], &[5, 5]).unwrap(), 100.0);
        assert!(distribution_similarity(&[1, 2], &[1, 1]).is_err());
        assert!(distribution_similarity(&[], &[]).is_err());
    }

    #[test]
    fn slope_fit() {
        let rows: Vec<ScalingRow> = [1.0f64, 2.0, 4.0]
            .iter()
            .map(|&x| ScalingRow {
                size: x as usize,
                seconds: 3.0 * x * x,
            })
            .collect();
        assert!((log_log_slope(&rows).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&rows[..1]), None);
    }

    #[test]
    fn single_size_probe() {
        let t = scaling_probe(&ConcentricSpec::default(), &[200], 3).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.slope.is_none());
        assert!(scaling_probe(&ConcentricSpec::default(), &[200, 100], 3).is_err());
    }

    fn blob_report(labels: bool) -> BenchReport {
        let mut ds = blobs(&[[0.0, 0.0], [20.0, 0.0], [10.0, 17.0]], 20, 1.0, 8);
        if !labels {
            ds = Dataset::new("unlabeled", ds.points().to_vec(), None).unwrap();
        }
        let cfg = BenchConfig {
            auto: AutoConfig::default().with_seed(2).with_restarts(2),
            include_timings: false,
        };
        run_benchmark(&ds, Algorithm::Emk, &cfg).unwrap()
    }

    #[test]
    fn report_contents() {
        let r = blob_report(true);
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.c_opt.sep_cmp, 3);
        assert_eq!(r.similarity, Some(0.0));
        assert!(r.timings.is_none());
        let r = blob_report(false);
        assert!(r.similarity.is_none() && r.real_distribution.is_none());
        assert!(!emit_report(&r, ReportFormat::Json).unwrap().contains("similarity"));
    }

    #[test]
    fn renderings() {
        let r = blob_report(true);
        let json = emit_report(&r, ReportFormat::Json).unwrap();
        let back: BenchReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let csv = emit_report(&r, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), r.rows.len() * 4 + 1);
        let md = emit_report(&r, ReportFormat::Markdown).unwrap();
        let data_rows = md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| c ")).count();
        assert_eq!(data_rows, r.rows.len());
        assert!(md.contains("| 7 |"));
        assert_eq!(md, emit_report(&r, ReportFormat::Markdown).unwrap());
    }
}
