//! Validity indices for hard partitions: MSE, Dunn, Davies-Bouldin and the
//! separation/compactness family (global Sep, Cmp, SepCmp and the per-cluster
//! sep_j, cmp_j, sepcmp_j used to pick merge candidates).
//!
//! Every index is computed from the partition's own centers, which need not
//! be member means. Zero denominators surface as
//! [`ClusterError::UndefinedIndex`]; no function here returns NaN.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{ClusterError, Result};
use crate::partition::{sq_dist, ClusterView, HardPartition};

/// Which local compactness formula to use for cmp_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmpVariant {
    /// 1 / var_split: tight clusters score high.
    #[default]
    InverseVariance,
    /// var_global² / Σ‖x − c_j‖², as printed in the original formulation.
    Literal,
}

impl std::str::FromStr for CmpVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inverse" | "inverse_variance" => Ok(CmpVariant::InverseVariance),
            "literal" => Ok(CmpVariant::Literal),
            other => Err(format!("unknown cmp_j variant {other:?} (expected inverse|literal)")),
        }
    }
}

/// Per-cluster member count and Σ‖x − c_j‖², in one pass over the data.
pub(crate) fn cluster_stats(ds: &Dataset, hp: &HardPartition) -> (Vec<usize>, Vec<f64>) {
    let mut counts = vec![0usize; hp.c()];
    let mut ss = vec![0.0; hp.c()];
    for (x, &j) in ds.points().iter().zip(&hp.assignment) {
        counts[j] += 1;
        ss[j] += sq_dist(x, &hp.centers[j]);
    }
    (counts, ss)
}

fn require_two_clusters(hp: &HardPartition, index: &'static str) -> Result<()> {
    if hp.c() < 2 {
        return Err(ClusterError::undefined(index, format!("needs c >= 2, got {}", hp.c())));
    }
    Ok(())
}

/// (1/N) Σ_j Σ_i δ_ji ‖x_i − c_j‖².
pub fn mse(ds: &Dataset, hp: &HardPartition) -> Result<f64> {
    hp.check_against(ds)?;
    let (_, ss) = cluster_stats(ds, hp);
    Ok(ss.iter().sum::<f64>() / ds.n() as f64)
}

/// Smallest single-linkage distance between clusters over the largest
/// cluster diameter.
pub fn dunn(ds: &Dataset, hp: &HardPartition) -> Result<f64> {
    hp.check_against(ds)?;
    require_two_clusters(hp, "Dunn")?;
    if let Some(j) = hp.cardinalities().iter().position(|&n| n == 0) {
        return Err(ClusterError::EmptyCluster { cluster: j });
    }
    let pts = ds.points();
    let mut min_between = f64::INFINITY;
    let mut max_within: f64 = 0.0;
    for i in 0..pts.len() {
        for k in (i + 1)..pts.len() {
            let d = sq_dist(&pts[i], &pts[k]);
            if hp.assignment[i] == hp.assignment[k] {
                max_within = max_within.max(d);
            } else {
                min_between = min_between.min(d);
            }
        }
    }
    if max_within == 0.0 {
        return Err(ClusterError::undefined("Dunn", "every cluster has zero diameter"));
    }
    Ok((min_between / max_within).sqrt())
}

/// (1/c) Σ_j max_{l≠j} (D_c(j) + D_c(l)) / ‖c_j − c_l‖, with D_c the mean
/// member-to-center distance of a cluster.
pub fn davies_bouldin(ds: &Dataset, hp: &HardPartition) -> Result<f64> {
    hp.check_against(ds)?;
    require_two_clusters(hp, "Davies-Bouldin")?;
    let c = hp.c();
    let mut spread = vec![0.0; c];
    let mut counts = vec![0usize; c];
    for (x, &j) in ds.points().iter().zip(&hp.assignment) {
        spread[j] += sq_dist(x, &hp.centers[j]).sqrt();
        counts[j] += 1;
    }
    for j in 0..c {
        if counts[j] == 0 {
            return Err(ClusterError::EmptyCluster { cluster: j });
        }
        spread[j] /= counts[j] as f64;
    }
    let mut total = 0.0;
    for j in 0..c {
        let mut worst = f64::NEG_INFINITY;
        for l in 0..c {
            if l == j {
                continue;
            }
            let gap = sq_dist(&hp.centers[j], &hp.centers[l]).sqrt();
            if gap == 0.0 {
                return Err(ClusterError::undefined(
                    "Davies-Bouldin",
                    format!("centers {j} and {l} coincide"),
                ));
            }
            worst = worst.max((spread[j] + spread[l]) / gap);
        }
        total += worst;
    }
    Ok(total / c as f64)
}

/// Σ‖x − c_j‖² / card(C_j)², the variance used by the global compactness.
pub fn var_global(ds: &Dataset, cluster: &ClusterView) -> Result<f64> {
    let n = nonempty(cluster)?;
    Ok(cluster.sum_sq(ds) / (n * n) as f64)
}

/// Mean squared member-to-center distance, used to pick the split candidate.
pub fn var_split(ds: &Dataset, cluster: &ClusterView) -> Result<f64> {
    let n = nonempty(cluster)?;
    Ok(cluster.sum_sq(ds) / n as f64)
}

fn nonempty(cluster: &ClusterView) -> Result<usize> {
    match cluster.cardinality() {
        0 => Err(ClusterError::InvalidConfig("cluster has no members".into())),
        n => Ok(n),
    }
}

/// Number of clusters with at least two members.
pub(crate) fn non_singleton_count(counts: &[usize]) -> usize {
    counts.iter().filter(|&&n| n >= 2).count()
}

/// k / Σ Var_j over the k non-singleton clusters.
pub fn hard_cmp(ds: &Dataset, hp: &HardPartition) -> Result<f64> {
    hp.check_against(ds)?;
    let (counts, ss) = cluster_stats(ds, hp);
    cmp_from_stats(&counts, &ss)
}

fn cmp_from_stats(counts: &[usize], ss: &[f64]) -> Result<f64> {
    let k = non_singleton_count(counts);
    if k == 0 {
        return Err(ClusterError::undefined("Cmp", "every cluster is a singleton or empty"));
    }
    let total: f64 = counts
        .iter()
        .zip(ss)
        .filter(|(&n, _)| n >= 2)
        .map(|(&n, &s)| s / (n * n) as f64)
        .sum();
    if total == 0.0 {
        return Err(ClusterError::undefined("Cmp", "total within-cluster variance is zero"));
    }
    Ok(k as f64 / total)
}

/// (Σ_j min_{l≠j} ‖c_j − c_l‖² / c)².
pub fn hard_sep(hp: &HardPartition) -> Result<f64> {
    require_two_clusters(hp, "Sep")?;
    let c = hp.c();
    let total: f64 = (0..c).map(|j| nearest_center_sq(hp, j)).sum();
    let mean = total / c as f64;
    Ok(mean * mean)
}

fn nearest_center_sq(hp: &HardPartition, j: usize) -> f64 {
    hp.centers
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, cl)| sq_dist(&hp.centers[j], cl))
        .fold(f64::INFINITY, f64::min)
}

/// (k/c) · Sep · Cmp. Larger is better.
pub fn hard_sep_cmp(ds: &Dataset, hp: &HardPartition) -> Result<f64> {
    hp.check_against(ds)?;
    let sep = hard_sep(hp)?;
    let (counts, ss) = cluster_stats(ds, hp);
    let cmp = cmp_from_stats(&counts, &ss)?;
    let k = non_singleton_count(&counts);
    Ok(k as f64 / hp.c() as f64 * sep * cmp)
}

/// min_{l≠j} ‖c_j − c_l‖².
pub fn hard_local_sep(hp: &HardPartition, j: usize) -> Result<f64> {
    require_two_clusters(hp, "sep_j")?;
    check_index(hp, j)?;
    Ok(nearest_center_sq(hp, j))
}

fn check_index(hp: &HardPartition, j: usize) -> Result<()> {
    if j >= hp.c() {
        return Err(ClusterError::InvalidConfig(format!("cluster {j} out of range for c = {}", hp.c())));
    }
    Ok(())
}

/// Local compactness of one non-singleton cluster.
pub fn hard_local_cmp(ds: &Dataset, cluster: &ClusterView, variant: CmpVariant) -> Result<f64> {
    if cluster.cardinality() == 0 {
        return Err(ClusterError::undefined("cmp_j", "cluster is empty"));
    }
    if cluster.is_singleton() {
        return Err(ClusterError::undefined("cmp_j", "cluster is a singleton"));
    }
    let ss = cluster.sum_sq(ds);
    if ss == 0.0 {
        return Err(ClusterError::undefined("cmp_j", "cluster has zero spread"));
    }
    let n = cluster.cardinality() as f64;
    Ok(match variant {
        CmpVariant::InverseVariance => n / ss,
        CmpVariant::Literal => {
            let var = ss / (n * n);
            var * var / ss
        }
    })
}

/// sep_j · cmp_j; the merge candidate is the smallest value.
pub fn hard_local_sep_cmp(ds: &Dataset, hp: &HardPartition, j: usize, variant: CmpVariant) -> Result<f64> {
    hp.check_against(ds)?;
    let sep = hard_local_sep(hp, j)?;
    let cmp = hard_local_cmp(ds, &hp.cluster(j), variant)?;
    Ok(sep * cmp)
}

/// Local measures for one cluster; `None` where the measure is undefined
/// (empty or singleton clusters, zero spread).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterIndices {
    pub cardinality: usize,
    pub sep: f64,
    pub cmp: Option<f64>,
    pub sep_cmp: Option<f64>,
    pub var_global: Option<f64>,
    pub var_split: Option<f64>,
}

/// Every hard index for one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub mse: f64,
    pub dunn: f64,
    pub davies_bouldin: f64,
    pub sep: f64,
    pub cmp: f64,
    pub sep_cmp: f64,
    pub per_cluster: Vec<ClusterIndices>,
}

pub fn index_report(ds: &Dataset, hp: &HardPartition, variant: CmpVariant) -> Result<IndexReport> {
    hp.check_against(ds)?;
    let per_cluster = hp
        .clusters()
        .iter()
        .enumerate()
        .map(|(j, view)| {
            let sep = nearest_center_sq(hp, j);
            let cmp = hard_local_cmp(ds, view, variant).ok();
            ClusterIndices {
                cardinality: view.cardinality(),
                sep,
                cmp,
                sep_cmp: cmp.map(|v| sep * v),
                var_global: var_global(ds, view).ok(),
                var_split: var_split(ds, view).ok(),
            }
        })
        .collect();
    Ok(IndexReport {
        mse: mse(ds, hp)?,
        dunn: dunn(ds, hp)?,
        davies_bouldin: davies_bouldin(ds, hp)?,
        sep: hard_sep(hp)?,
        cmp: hard_cmp(ds, hp)?,
        sep_cmp: hard_sep_cmp(ds, hp)?,
        per_cluster,
    })
}
