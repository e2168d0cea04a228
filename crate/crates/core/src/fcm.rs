//! Fuzzy c-means, the fuzzy separation-compactness measures and the
//! merge/split driver that searches the number of clusters.

use serde::{Deserialize, Serialize};

use crate::autoclust::{c_max_rule, split_cluster_centers, SplitSeedRule};
use crate::dataset::Dataset;
use crate::error::{ClusterError, Result};
use crate::kmeans::{restart_rng, sample_centers};
use crate::partition::{check_centers, defuzzify, sq_dist, FuzzyPartition, HardPartition};
use crate::validity::non_singleton_count;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    pub c: usize,
    /// Fuzzifier, strictly greater than 1.
    pub m: f64,
    /// Relative center-shift tolerance.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub rng_seed: u64,
    pub restarts: usize,
}

impl FcmConfig {
    pub fn new(c: usize) -> Self {
        FcmConfig {
            c,
            m: 2.0,
            epsilon: 1e-4,
            max_iterations: 300,
            rng_seed: 0,
            restarts: 5,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate_params(&self) -> Result<()> {
        if self.m.is_nan() || self.m <= 1.0 || self.m.is_infinite() {
            return Err(ClusterError::InvalidConfig(format!("fuzzifier m = {} must exceed 1", self.m)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(ClusterError::InvalidConfig("epsilon must be positive".into()));
        }
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(ClusterError::InvalidConfig("max_iterations and restarts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn validate_for(&self, ds: &Dataset) -> Result<()> {
        self.validate_params()?;
        if self.c < 2 || self.c > ds.n() {
            return Err(ClusterError::InvalidConfig(format!(
                "c = {} must lie in [2, N = {}]",
                self.c,
                ds.n()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmResult {
    pub partition: FuzzyPartition,
    /// J_m of the returned partition.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// J_m after every membership update.
    pub trace: Vec<f64>,
}

/// Memberships of one point: proportional to d^(−2/(m−1)). A point lying on
/// one or more centers splits its membership equally among those centers.
pub fn membership_row(x: &[f64], centers: &[Vec<f64>], m: f64) -> Vec<f64> {
    let d2: Vec<f64> = centers.iter().map(|c| sq_dist(x, c)).collect();
    let zeros = d2.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return d2.iter().map(|&d| if d == 0.0 { share } else { 0.0 }).collect();
    }
    let dmin = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let p = 1.0 / (m - 1.0);
    let w: Vec<f64> = d2.iter().map(|&d| (dmin / d).powf(p)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

pub fn memberships(ds: &Dataset, centers: &[Vec<f64>], m: f64) -> Vec<Vec<f64>> {
    ds.points().iter().map(|x| membership_row(x, centers, m)).collect()
}

/// Σ_j Σ_i μ_ji^m ‖x_i − c_j‖².
pub fn fcm_objective(ds: &Dataset, fp: &FuzzyPartition, m: f64) -> f64 {
    objective(ds, &fp.centers, &fp.memberships, m)
}

fn objective(ds: &Dataset, centers: &[Vec<f64>], u: &[Vec<f64>], m: f64) -> f64 {
    ds.points()
        .iter()
        .zip(u)
        .map(|(x, row)| {
            row.iter()
                .zip(centers)
                .map(|(&mu, c)| if mu == 0.0 { 0.0 } else { mu.powf(m) * sq_dist(x, c) })
                .sum::<f64>()
        })
        .sum()
}

fn weighted_centers(ds: &Dataset, u: &[Vec<f64>], m: f64, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = previous.len();
    let mut sums = vec![vec![0.0; ds.dim()]; c];
    let mut weights = vec![0.0; c];
    for (x, row) in ds.points().iter().zip(u) {
        for j in 0..c {
            if row[j] == 0.0 {
                continue;
            }
            let w = row[j].powf(m);
            weights[j] += w;
            for (s, v) in sums[j].iter_mut().zip(x) {
                *s += w * v;
            }
        }
    }
    sums.into_iter()
        .zip(weights)
        .zip(previous)
        .map(|((s, w), prev)| {
            if w > 0.0 {
                s.into_iter().map(|v| v / w).collect()
            } else {
                prev.clone()
            }
        })
        .collect()
}

/// max_j ‖old_j − new_j‖ / ‖new_j‖; a center at the origin uses the absolute shift.
fn relative_shift(old: &[Vec<f64>], new: &[Vec<f64>]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| {
            let shift = sq_dist(a, b).sqrt();
            let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                shift / norm
            } else {
                shift
            }
        })
        .fold(0.0, f64::max)
}

/// Fuzzy c-means from c distinct data points; with several restarts the
/// lowest J_m wins, ties to the earlier restart.
pub fn fcm_run(ds: &Dataset, cfg: &FcmConfig) -> Result<FcmResult> {
    cfg.validate_for(ds)?;
    let mut best: Option<FcmResult> = None;
    for r in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.rng_seed, r);
        let init = sample_centers(ds, cfg.c, &mut rng);
        let res = fcm_from_centers(ds, init, cfg)?;
        if best.as_ref().is_none_or(|b| res.objective < b.objective) {
            best = Some(res);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// One FCM run from explicit centers, using `cfg`'s m, epsilon and
/// iteration cap (its `c` is ignored).
pub fn fcm_from_centers(ds: &Dataset, centers: Vec<Vec<f64>>, cfg: &FcmConfig) -> Result<FcmResult> {
    cfg.validate_params()?;
    check_centers(ds, &centers)?;
    let m = cfg.m;
    let mut centers = centers;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let u = memberships(ds, &centers, m);
        trace.push(objective(ds, &centers, &u, m));
        let next = weighted_centers(ds, &u, m, &centers);
        iterations += 1;
        let shift = relative_shift(&centers, &next);
        centers = next;
        if shift <= cfg.epsilon {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
    }
    let u = memberships(ds, &centers, m);
    let objective = objective(ds, &centers, &u, m);
    trace.push(objective);
    Ok(FcmResult {
        partition: FuzzyPartition {
            centers,
            memberships: u,
        },
        objective,
        iterations,
        converged,
        trace,
    })
}

fn nearest_center_sq(centers: &[Vec<f64>], j: usize) -> f64 {
    centers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, ck)| sq_dist(&centers[j], ck))
        .fold(f64::INFINITY, f64::min)
}

/// (Σ μ² ‖x − v_j‖², Σ μ²) over members of cluster j, skipping members that
/// sit exactly on the center.
fn weighted_spread(ds: &Dataset, fp: &FuzzyPartition, hp: &HardPartition, j: usize) -> (f64, f64) {
    let v = &fp.centers[j];
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &a) in hp.assignment.iter().enumerate() {
        if a != j {
            continue;
        }
        let d2 = sq_dist(ds.point(i), v);
        if d2 == 0.0 {
            continue;
        }
        let mu2 = fp.memberships[i][j] * fp.memberships[i][j];
        num += mu2 * d2;
        den += mu2;
    }
    (num, den)
}

/// Global separation-compactness of a fuzzy scheme. Larger is better.
pub fn fuzzy_sc(ds: &Dataset, fp: &FuzzyPartition) -> Result<f64> {
    fp.check_against(ds)?;
    let c = fp.c();
    if c < 2 {
        return Err(ClusterError::undefined("SC", format!("needs c >= 2, got {c}")));
    }
    let hp = defuzzify(fp);
    let counts = hp.cardinalities();
    let k = non_singleton_count(&counts);
    if k == 0 {
        return Err(ClusterError::undefined("SC", "every cluster is a singleton or empty"));
    }
    let separation: f64 = (0..c).map(|j| nearest_center_sq(&fp.centers, j)).sum();
    let compactness: f64 = (0..c)
        .filter(|&j| counts[j] >= 2)
        .map(|j| {
            let (num, den) = weighted_spread(ds, fp, &hp, j);
            // every member on the center: no spread
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .sum();
    if compactness == 0.0 {
        return Err(ClusterError::undefined("SC", "total compactness is zero"));
    }
    Ok(k as f64 / c as f64 * separation / compactness)
}

/// Local separation-compactness of cluster j; the smallest marks the merge
/// candidate.
pub fn fuzzy_local_sc(ds: &Dataset, fp: &FuzzyPartition, j: usize) -> Result<f64> {
    fp.check_against(ds)?;
    if fp.c() < 2 {
        return Err(ClusterError::undefined("sc_j", format!("needs c >= 2, got {}", fp.c())));
    }
    if j >= fp.c() {
        return Err(ClusterError::InvalidConfig(format!("cluster {j} out of range")));
    }
    let hp = defuzzify(fp);
    let n = hp.assignment.iter().filter(|&&a| a == j).count();
    if n == 0 {
        return Err(ClusterError::EmptyCluster { cluster: j });
    }
    if n == 1 {
        return Err(ClusterError::SingletonCluster { cluster: j });
    }
    let (num, den) = weighted_spread(ds, fp, &hp, j);
    if num == 0.0 {
        return Err(ClusterError::undefined("sc_j", format!("cluster {j} has zero spread")));
    }
    Ok(nearest_center_sq(&fp.centers, j) * den / num)
}

/// Column sum of memberships over the number of points whose maximum
/// membership is cluster j. The smallest marks the split candidate.
pub fn fuzzy_score(fp: &FuzzyPartition, j: usize) -> Result<f64> {
    if j >= fp.c() {
        return Err(ClusterError::InvalidConfig(format!("cluster {j} out of range")));
    }
    let hp = defuzzify(fp);
    let n = hp.assignment.iter().filter(|&&a| a == j).count();
    if n == 0 {
        return Err(ClusterError::EmptyCluster { cluster: j });
    }
    let mass: f64 = fp.memberships.iter().map(|row| row[j]).sum();
    Ok(mass / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuzzyMode {
    Merge,
    Split,
}

impl std::str::FromStr for FuzzyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "merge" => Ok(FuzzyMode::Merge),
            "split" => Ok(FuzzyMode::Split),
            other => Err(format!("unknown mode {other:?} (expected merge|split)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySweepRecord {
    pub c: usize,
    pub sc: f64,
    /// Member counts after defuzzification.
    pub cardinalities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyAutoResult {
    pub best: FuzzyPartition,
    pub c_opt: usize,
    pub sweep: Vec<FuzzySweepRecord>,
}

/// Sweeps c between 2 and ⌊√N⌋, merging the lowest-sc_j cluster (merge mode,
/// from the top) or splitting the lowest-score cluster (split mode, from 2),
/// and keeps the scheme with the largest SC. Ties go to the smaller c.
/// `cfg.c` is ignored.
pub fn fuzzy_auto(ds: &Dataset, mode: FuzzyMode, cfg: &FcmConfig) -> Result<FuzzyAutoResult> {
    let c_max = c_max_rule(ds.n())?;
    let start = match mode {
        FuzzyMode::Merge => c_max,
        FuzzyMode::Split => 2,
    };
    let mut fp = fcm_run(ds, &FcmConfig { c: start, ..cfg.clone() })?.partition;
    let mut sweep = Vec::new();
    let mut best: Option<(f64, FuzzyPartition)> = None;
    loop {
        let sc = fuzzy_sc(ds, &fp)?;
        let hp = defuzzify(&fp);
        sweep.push(FuzzySweepRecord {
            c: fp.c(),
            sc,
            cardinalities: hp.cardinalities(),
        });
        let better = match &best {
            None => true,
            Some((b, bp)) => sc > *b || (sc == *b && fp.c() < bp.c()),
        };
        if better {
            best = Some((sc, fp.clone()));
        }
        let centers = match mode {
            FuzzyMode::Merge if fp.c() > 2 => fuzzy_merge_centers(ds, &fp, &hp)?,
            FuzzyMode::Split if fp.c() < c_max => fuzzy_split_centers(ds, &fp, &hp, cfg)?,
            _ => break,
        };
        fp = fcm_from_centers(ds, centers, cfg)?.partition;
    }
    let (_, best) = best.expect("at least one evaluation");
    Ok(FuzzyAutoResult {
        c_opt: best.c(),
        best,
        sweep,
    })
}

/// Removes the worst cluster and returns starting centers for c − 1.
fn fuzzy_merge_centers(ds: &Dataset, fp: &FuzzyPartition, hp: &HardPartition) -> Result<Vec<Vec<f64>>> {
    let c = fp.c();
    let counts = hp.cardinalities();
    let worst = if let Some(j) = counts.iter().position(|&n| n == 0) {
        j
    } else {
        let scored: Vec<(usize, f64)> = (0..c)
            .filter(|&j| counts[j] >= 2)
            .filter_map(|j| fuzzy_local_sc(ds, fp, j).ok().map(|v| (j, v)))
            .collect();
        match argmin(scored) {
            Some(j) => j,
            None => argmin((0..c).map(|j| (j, nearest_center_sq(&fp.centers, j)))).expect("c >= 2"),
        }
    };

    // deleted members follow their largest surviving membership
    let mut assignment = hp.assignment.clone();
    for (i, a) in assignment.iter_mut().enumerate() {
        if *a == worst {
            let row = &fp.memberships[i];
            *a = (0..c)
                .filter(|&k| k != worst)
                .fold(None, |acc: Option<usize>, k| match acc {
                    Some(b) if row[b] >= row[k] => Some(b),
                    _ => Some(k),
                })
                .expect("c >= 2");
        }
    }
    let mut sums = vec![vec![0.0; ds.dim()]; c];
    let mut n = vec![0usize; c];
    for (x, &a) in ds.points().iter().zip(&assignment) {
        n[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    Ok((0..c)
        .filter(|&j| j != worst)
        .map(|j| {
            if n[j] > 0 {
                sums[j].iter().map(|s| s / n[j] as f64).collect()
            } else {
                fp.centers[j].clone()
            }
        })
        .collect())
}

/// Splits the lowest-score cluster and returns starting centers for c + 1.
fn fuzzy_split_centers(
    ds: &Dataset,
    fp: &FuzzyPartition,
    hp: &HardPartition,
    cfg: &FcmConfig,
) -> Result<Vec<Vec<f64>>> {
    let counts = hp.cardinalities();
    let scored: Vec<(usize, f64)> = (0..fp.c())
        .filter(|&j| counts[j] >= 2 && has_distinct_members(ds, hp, j))
        .filter_map(|j| fuzzy_score(fp, j).ok().map(|s| (j, s)))
        .collect();
    let worst = argmin(scored).ok_or(ClusterError::NoSplittableCluster)?;
    let (a, b) = split_cluster_centers(ds, hp, worst, SplitSeedRule::MemberDistance, cfg.max_iterations)?;
    let mut centers = fp.centers.clone();
    centers[worst] = a;
    centers.push(b);
    Ok(centers)
}

pub(crate) fn has_distinct_members(ds: &Dataset, hp: &HardPartition, j: usize) -> bool {
    let mut members = hp.assignment.iter().enumerate().filter(|&(_, &a)| a == j).map(|(i, _)| ds.point(i));
    match members.next() {
        Some(first) => members.any(|p| p != first),
        None => false,
    }
}

/// Index with the smallest value; ties to the first.
pub(crate) fn argmin(items: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    items
        .into_iter()
        .fold(None, |acc: Option<(usize, f64)>, (j, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((j, v)),
        })
        .map(|(j, _)| j)
}
