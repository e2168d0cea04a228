//! Lloyd-style hard k-means with seeded restarts.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{ClusterError, Result};
use crate::partition::{check_centers, finish_means, member_sums, nearest, sq_dist, HardPartition};

/// What to do when an update step leaves a cluster without members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyClusterPolicy {
    /// Move the empty center onto the point farthest from its own center.
    #[default]
    ReseedFarthest,
    /// Remove the cluster; c shrinks.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub c: usize,
    pub max_iterations: usize,
    pub rng_seed: u64,
    pub restarts: usize,
    pub empty_cluster_policy: EmptyClusterPolicy,
}

impl KMeansConfig {
    pub fn new(c: usize) -> Self {
        KMeansConfig {
            c,
            max_iterations: 300,
            rng_seed: 0,
            restarts: 10,
            empty_cluster_policy: EmptyClusterPolicy::ReseedFarthest,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate_for(&self, ds: &Dataset) -> Result<()> {
        if self.c == 0 || self.c > ds.n() {
            return Err(ClusterError::InvalidConfig(format!(
                "c = {} must lie in [1, N = {}]",
                self.c,
                ds.n()
            )));
        }
        if self.max_iterations == 0 {
            return Err(ClusterError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(ClusterError::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub partition: HardPartition,
    /// Criterion E of the returned partition.
    pub criterion: f64,
    pub iterations: usize,
    pub converged: bool,
    /// E after every center update.
    pub trace: Vec<f64>,
}

/// E = ½ Σ_j Σ_i δ_ji ‖x_i − c_j‖².
pub fn kmeans_criterion(ds: &Dataset, hp: &HardPartition) -> f64 {
    0.5 * sum_sq_error(ds, &hp.centers, &hp.assignment)
}

pub(crate) fn sum_sq_error(ds: &Dataset, centers: &[Vec<f64>], assignment: &[usize]) -> f64 {
    ds.points()
        .iter()
        .zip(assignment)
        .map(|(x, &j)| sq_dist(x, &centers[j]))
        .sum()
}

/// Independent random stream for one restart.
pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// c distinct data points drawn without replacement.
pub(crate) fn sample_centers(ds: &Dataset, c: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    sample(rng, ds.n(), c).into_iter().map(|i| ds.point(i).to_vec()).collect()
}

/// Best-of-restarts k-means. Each restart starts from c distinct data points;
/// the lowest E wins, ties going to the earlier restart.
pub fn kmeans_run(ds: &Dataset, cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate_for(ds)?;
    let mut best: Option<KMeansResult> = None;
    for r in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.rng_seed, r);
        let init = sample_centers(ds, cfg.c, &mut rng);
        let res = kmeans_from_centers(ds, init, cfg.max_iterations, cfg.empty_cluster_policy)?;
        if best.as_ref().is_none_or(|b| res.criterion < b.criterion) {
            best = Some(res);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// A single k-means run from the given centers. Stops once an assignment
/// pass changes nothing, or after `max_iterations` center updates.
pub fn kmeans_from_centers(
    ds: &Dataset,
    centers: Vec<Vec<f64>>,
    max_iterations: usize,
    policy: EmptyClusterPolicy,
) -> Result<KMeansResult> {
    check_centers(ds, &centers)?;
    if max_iterations == 0 {
        return Err(ClusterError::InvalidConfig("max_iterations must be at least 1".into()));
    }
    let mut centers = centers;
    let mut assignment: Vec<usize> = ds.points().iter().map(|x| nearest(x, &centers)).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        centers = update_centers(ds, &mut assignment, centers, policy);
        trace.push(0.5 * sum_sq_error(ds, &centers, &assignment));
        iterations += 1;
        if iterations >= max_iterations {
            break;
        }
        let next: Vec<usize> = ds.points().iter().map(|x| nearest(x, &centers)).collect();
        if next == assignment {
            converged = true;
            break;
        }
        assignment = next;
    }
    let criterion = *trace.last().expect("at least one update");
    Ok(KMeansResult {
        partition: HardPartition { centers, assignment },
        criterion,
        iterations,
        converged,
        trace,
    })
}

fn update_centers(
    ds: &Dataset,
    assignment: &mut [usize],
    old: Vec<Vec<f64>>,
    policy: EmptyClusterPolicy,
) -> Vec<Vec<f64>> {
    let c = old.len();
    let (sums, counts) = member_sums(ds, assignment, c).expect("assignment in range");
    if counts.iter().all(|&n| n > 0) {
        return finish_means(sums, &counts);
    }
    match policy {
        EmptyClusterPolicy::ReseedFarthest => {
            let mut counts = counts;
            let means = finish_means(sums, &counts);
            for j in 0..c {
                if counts[j] > 0 {
                    continue;
                }
                // farthest point from its own center, taken from a cluster that can spare it
                let donor = (0..ds.n())
                    .filter(|&i| counts[assignment[i]] >= 2)
                    .map(|i| (i, sq_dist(ds.point(i), &means[assignment[i]])))
                    .fold(None, |acc: Option<(usize, f64)>, (i, d)| match acc {
                        Some((_, bd)) if bd >= d => acc,
                        _ => Some((i, d)),
                    });
                if let Some((i, _)) = donor {
                    counts[assignment[i]] -= 1;
                    counts[j] += 1;
                    assignment[i] = j;
                }
            }
            let (sums, counts) = member_sums(ds, assignment, c).expect("assignment in range");
            let mut centers = finish_means(sums, &counts);
            for (j, n) in counts.iter().enumerate() {
                if *n == 0 {
                    centers[j] = old[j].clone();
                }
            }
            centers
        }
        EmptyClusterPolicy::Drop => {
            let mut remap = vec![usize::MAX; c];
            let mut next = 0;
            for (j, &n) in counts.iter().enumerate() {
                if n > 0 {
                    remap[j] = next;
                    next += 1;
                }
            }
            for a in assignment.iter_mut() {
                *a = remap[*a];
            }
            let kept: Vec<usize> = counts.iter().copied().filter(|&n| n > 0).collect();
            let sums = sums
                .into_iter()
                .zip(&counts)
                .filter(|(_, &n)| n > 0)
                .map(|(s, _)| s)
                .collect();
            finish_means(sums, &kept)
        }
    }
}
