//! EMk-means and ESk-means: k-means sweeps over the number of clusters that
//! merge or split one cluster per step and keep the scheme with the largest
//! SepCmp.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{ClusterError, Result};
use crate::kmeans::{kmeans_from_centers, kmeans_run, EmptyClusterPolicy, KMeansConfig};
use crate::partition::{finish_means, member_sums, nearest, sq_dist, HardPartition};
use crate::validity::{hard_local_sep, hard_local_sep_cmp, index_report, var_split, CmpVariant, IndexReport};

/// How the two seeds of a split are chosen among the members E of the
/// cluster being split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSeedRule {
    /// The two members with the largest total distance to the rest of E.
    #[default]
    MemberDistance,
    /// The two members with the largest total distance to the other
    /// clusters' centers.
    CenterDistance,
}

impl std::str::FromStr for SplitSeedRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "member" | "member_distance" => Ok(SplitSeedRule::MemberDistance),
            "center" | "center_distance" => Ok(SplitSeedRule::CenterDistance),
            other => Err(format!("unknown split seed rule {other:?} (expected member|center)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoConfig {
    pub restarts: usize,
    pub rng_seed: u64,
    pub max_iterations: usize,
    pub cmp_variant: CmpVariant,
    pub split_seed_rule: SplitSeedRule,
    /// Overrides ⌊√N⌋ as the largest number of clusters tried.
    pub c_max: Option<usize>,
}

impl Default for AutoConfig {
    fn default() -> Self {
        AutoConfig {
            restarts: 10,
            rng_seed: 0,
            max_iterations: 300,
            cmp_variant: CmpVariant::default(),
            split_seed_rule: SplitSeedRule::default(),
            c_max: None,
        }
    }
}

impl AutoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_c_max(mut self, c_max: usize) -> Self {
        self.c_max = Some(c_max);
        self
    }

    fn resolve_c_max(&self, ds: &Dataset) -> Result<usize> {
        let c_max = c_max_rule(ds.n())?;
        match self.c_max {
            None => Ok(c_max),
            Some(c) if c >= 2 && c <= ds.n() => Ok(c),
            Some(c) => Err(ClusterError::InvalidConfig(format!(
                "c_max = {c} must lie in [2, N = {}]",
                ds.n()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub c: usize,
    pub index_report: IndexReport,
    pub cardinalities: Vec<usize>,
    /// Time spent producing and scoring this scheme. Not serialized, so that
    /// repeated runs give identical output.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoResult {
    pub best_partition: HardPartition,
    pub c_opt: usize,
    pub sweep: Vec<SweepRecord>,
}

/// ⌊√N⌋, at least 2.
pub fn c_max_rule(n: usize) -> Result<usize> {
    if n < 4 {
        return Err(ClusterError::InvalidDataset(format!(
            "automatic cluster search needs at least 4 points, got {n}"
        )));
    }
    Ok(n.isqrt().max(2))
}

/// The c of the record with the largest SepCmp; ties go to the smaller c.
pub fn select_c_opt(sweep: &[SweepRecord]) -> Option<usize> {
    sweep
        .iter()
        .fold(None, |best: Option<&SweepRecord>, r| match best {
            Some(b)
                if b.index_report.sep_cmp > r.index_report.sep_cmp
                    || (b.index_report.sep_cmp == r.index_report.sep_cmp && b.c < r.c) =>
            {
                Some(b)
            }
            _ => Some(r),
        })
        .map(|r| r.c)
}

fn warm_start(ds: &Dataset, centers: Vec<Vec<f64>>, cfg: &AutoConfig) -> Result<HardPartition> {
    Ok(kmeans_from_centers(ds, centers, cfg.max_iterations, EmptyClusterPolicy::ReseedFarthest)?.partition)
}

/// Deletes the cluster with the smallest sepcmp_j, hands its points to the
/// nearest surviving centers and re-runs k-means from the surviving means.
pub fn merge_step(ds: &Dataset, hp: &HardPartition, cfg: &AutoConfig) -> Result<HardPartition> {
    hp.check_against(ds)?;
    let c = hp.c();
    if c < 3 {
        return Err(ClusterError::InvalidConfig(format!("merging needs c >= 3, got {c}")));
    }
    let worst = worst_cluster(ds, hp, cfg.cmp_variant)?;
    let survivors: Vec<Vec<f64>> = (0..c).filter(|&j| j != worst).map(|j| hp.centers[j].clone()).collect();
    let assignment: Vec<usize> = hp
        .assignment
        .iter()
        .enumerate()
        .map(|(i, &a)| match a {
            a if a == worst => nearest(ds.point(i), &survivors),
            a if a > worst => a - 1,
            a => a,
        })
        .collect();
    let (sums, counts) = member_sums(ds, &assignment, c - 1)?;
    let means = finish_means(sums, &counts);
    let centers = means
        .into_iter()
        .zip(&counts)
        .zip(survivors)
        .map(|((mean, &n), old)| if n > 0 { mean } else { old })
        .collect();
    warm_start(ds, centers, cfg)
}

fn worst_cluster(ds: &Dataset, hp: &HardPartition, variant: CmpVariant) -> Result<usize> {
    let counts = hp.cardinalities();
    if let Some(j) = counts.iter().position(|&n| n == 0) {
        return Ok(j);
    }
    let scored: Vec<(usize, f64)> = (0..hp.c())
        .filter(|&j| counts[j] >= 2)
        .filter_map(|j| hard_local_sep_cmp(ds, hp, j, variant).ok().map(|v| (j, v)))
        .collect();
    if let Some(j) = argmin(scored) {
        return Ok(j);
    }
    let seps = (0..hp.c())
        .map(|j| hard_local_sep(hp, j).map(|v| (j, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmin(seps).expect("c >= 3"))
}

fn argmin(items: Vec<(usize, f64)>) -> Option<usize> {
    items
        .into_iter()
        .fold(None, |acc: Option<(usize, f64)>, (j, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((j, v)),
        })
        .map(|(j, _)| j)
}

/// Splits the cluster with the largest variance in two with a 2-means on its
/// members. The result has c + 1 clusters: the first half keeps the old
/// index, the second is appended.
pub fn split_step(ds: &Dataset, hp: &HardPartition, rule: SplitSeedRule, max_iterations: usize) -> Result<HardPartition> {
    hp.check_against(ds)?;
    let clusters = hp.clusters();
    let mut target: Option<(usize, f64)> = None;
    for (j, view) in clusters.iter().enumerate() {
        if view.cardinality() < 2 {
            continue;
        }
        let v = var_split(ds, view)?;
        if v > 0.0 && target.is_none_or(|(_, best)| v > best) {
            target = Some((j, v));
        }
    }
    let (j, _) = target.ok_or(ClusterError::NoSplittableCluster)?;
    let (members, halves) = split_members(ds, hp, j, rule, max_iterations)?;
    let c = hp.c();
    let mut assignment = hp.assignment.clone();
    for (&i, &h) in members.iter().zip(&halves.assignment) {
        assignment[i] = if h == 0 { j } else { c };
    }
    let mut centers = hp.centers.clone();
    centers[j] = halves.centers[0].clone();
    centers.push(halves.centers[1].clone());
    HardPartition::new(centers, assignment)
}

/// Centers of the two halves that a 2-means on cluster j's members produces.
pub(crate) fn split_cluster_centers(
    ds: &Dataset,
    hp: &HardPartition,
    j: usize,
    rule: SplitSeedRule,
    max_iterations: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, halves) = split_members(ds, hp, j, rule, max_iterations)?;
    let mut centers = halves.centers.into_iter();
    Ok((centers.next().expect("two halves"), centers.next().expect("two halves")))
}

fn split_members(
    ds: &Dataset,
    hp: &HardPartition,
    j: usize,
    rule: SplitSeedRule,
    max_iterations: usize,
) -> Result<(Vec<usize>, HardPartition)> {
    let members = hp.members(j);
    let points: Vec<Vec<f64>> = members.iter().map(|&i| ds.point(i).to_vec()).collect();
    let others: Vec<&Vec<f64>> = hp.centers.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, c)| c).collect();
    let scores: Vec<f64> = points
        .iter()
        .map(|p| match rule {
            SplitSeedRule::MemberDistance => points.iter().map(|q| sq_dist(p, q).sqrt()).sum(),
            SplitSeedRule::CenterDistance => others.iter().map(|q| sq_dist(p, q).sqrt()).sum(),
        })
        .collect();
    let (a, b) = split_seeds(&points, &scores).ok_or(ClusterError::NoSplittableCluster)?;
    let sub = Dataset::new("split", points.clone(), None)?;
    let halves = kmeans_from_centers(
        &sub,
        vec![points[a].clone(), points[b].clone()],
        max_iterations,
        EmptyClusterPolicy::ReseedFarthest,
    )?
    .partition;
    Ok((members, halves))
}

/// Indices of the two highest-scoring points, the second required to differ
/// from the first as a point. Ties go to the lower index.
fn split_seeds(points: &[Vec<f64>], scores: &[f64]) -> Option<(usize, usize)> {
    let best = |skip: &dyn Fn(usize) -> bool| {
        (0..points.len())
            .filter(|&i| !skip(i))
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(b) if scores[b] >= scores[i] => Some(b),
                _ => Some(i),
            })
    };
    let first = best(&|_| false)?;
    let second = best(&|i| points[i] == points[first])?;
    Some((first, second))
}

fn record(ds: &Dataset, hp: &HardPartition, cfg: &AutoConfig, started: Instant) -> Result<SweepRecord> {
    let index_report = index_report(ds, hp, cfg.cmp_variant)?;
    Ok(SweepRecord {
        c: hp.c(),
        index_report,
        cardinalities: hp.cardinalities(),
        wall_time: started.elapsed(),
    })
}

fn initial(ds: &Dataset, c: usize, cfg: &AutoConfig) -> Result<HardPartition> {
    let km = KMeansConfig::new(c)
        .with_seed(cfg.rng_seed)
        .with_restarts(cfg.restarts)
        .with_max_iterations(cfg.max_iterations);
    Ok(kmeans_run(ds, &km)?.partition)
}

fn finish(sweep: Vec<SweepRecord>, partitions: Vec<HardPartition>) -> AutoResult {
    let c_opt = select_c_opt(&sweep).expect("non-empty sweep");
    let best_partition = partitions
        .into_iter()
        .find(|p| p.c() == c_opt)
        .expect("c_opt comes from the sweep");
    AutoResult {
        best_partition,
        c_opt,
        sweep,
    }
}

/// Starts at c_max and merges down to c = 2, scoring every scheme.
pub fn emk_means(ds: &Dataset, cfg: &AutoConfig) -> Result<AutoResult> {
    let c_max = cfg.resolve_c_max(ds)?;
    let started = Instant::now();
    let mut hp = initial(ds, c_max, cfg)?;
    let mut sweep = vec![record(ds, &hp, cfg, started)?];
    let mut partitions = vec![hp.clone()];
    while hp.c() > 2 {
        let started = Instant::now();
        hp = merge_step(ds, &hp, cfg)?;
        sweep.push(record(ds, &hp, cfg, started)?);
        partitions.push(hp.clone());
    }
    Ok(finish(sweep, partitions))
}

/// Starts at c = 2 and splits up to c_max, scoring every scheme.
pub fn esk_means(ds: &Dataset, cfg: &AutoConfig) -> Result<AutoResult> {
    let c_max = cfg.resolve_c_max(ds)?;
    let started = Instant::now();
    let mut hp = initial(ds, 2, cfg)?;
    let mut sweep = vec![record(ds, &hp, cfg, started)?];
    let mut partitions = vec![hp.clone()];
    while hp.c() < c_max {
        let started = Instant::now();
        let split = split_step(ds, &hp, cfg.split_seed_rule, cfg.max_iterations)?;
        hp = warm_start(ds, split.centers, cfg)?;
        sweep.push(record(ds, &hp, cfg, started)?);
        partitions.push(hp.clone());
    }
    Ok(finish(sweep, partitions))
}
