//! Distances and the hard/fuzzy partition types shared by every engine.
//!
//! Cluster indices are 0-based throughout; reports add 1 where needed.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{ClusterError, Result};

/// Euclidean distance between two vectors of equal dimension.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(ClusterError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(sq_dist(a, b).sqrt())
}

/// Squared Euclidean distance; callers guarantee equal lengths.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_centers(ds: &Dataset, centers: &[Vec<f64>]) -> Result<()> {
    if centers.is_empty() {
        return Err(ClusterError::InvalidConfig("at least one center is required".into()));
    }
    for c in centers {
        if c.len() != ds.dim() {
            return Err(ClusterError::DimensionMismatch {
                expected: ds.dim(),
                found: c.len(),
            });
        }
    }
    Ok(())
}

/// Index of the nearest center; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(x: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Assigns each point to its nearest center.
pub fn hard_assign(ds: &Dataset, centers: &[Vec<f64>]) -> Result<Vec<usize>> {
    check_centers(ds, centers)?;
    Ok(ds.points().iter().map(|x| nearest(x, centers)).collect())
}

/// Member means for clusters `0..c`. An unused cluster is reported, not averaged.
pub fn recompute_centers(ds: &Dataset, assignment: &[usize], c: usize) -> Result<Vec<Vec<f64>>> {
    let (sums, counts) = member_sums(ds, assignment, c)?;
    if let Some(j) = counts.iter().position(|&n| n == 0) {
        return Err(ClusterError::EmptyCluster { cluster: j });
    }
    Ok(finish_means(sums, &counts))
}

pub(crate) fn member_sums(ds: &Dataset, assignment: &[usize], c: usize) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    if assignment.len() != ds.n() {
        return Err(ClusterError::DimensionMismatch {
            expected: ds.n(),
            found: assignment.len(),
        });
    }
    let mut sums = vec![vec![0.0; ds.dim()]; c];
    let mut counts = vec![0usize; c];
    for (x, &j) in ds.points().iter().zip(assignment) {
        if j >= c {
            return Err(ClusterError::InvalidConfig(format!("assignment {j} out of range for c = {c}")));
        }
        counts[j] += 1;
        for (s, v) in sums[j].iter_mut().zip(x) {
            *s += v;
        }
    }
    Ok((sums, counts))
}

pub(crate) fn finish_means(mut sums: Vec<Vec<f64>>, counts: &[usize]) -> Vec<Vec<f64>> {
    for (s, &n) in sums.iter_mut().zip(counts) {
        if n > 0 {
            let inv = n as f64;
            s.iter_mut().for_each(|v| *v /= inv);
        }
    }
    sums
}

/// Centers plus a crisp assignment of every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardPartition {
    pub centers: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
}

impl HardPartition {
    pub fn new(centers: Vec<Vec<f64>>, assignment: Vec<usize>) -> Result<Self> {
        let hp = HardPartition { centers, assignment };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(ClusterError::InvalidConfig("partition has no centers".into()));
        }
        let dim = self.centers[0].len();
        for c in &self.centers {
            if c.len() != dim {
                return Err(ClusterError::DimensionMismatch {
                    expected: dim,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(ClusterError::InvalidConfig("non-finite center".into()));
            }
        }
        if let Some(&j) = self.assignment.iter().find(|&&j| j >= self.centers.len()) {
            return Err(ClusterError::InvalidConfig(format!(
                "assignment {j} out of range for c = {}",
                self.centers.len()
            )));
        }
        Ok(())
    }

    /// Checks that the partition describes `ds`.
    pub fn check_against(&self, ds: &Dataset) -> Result<()> {
        if self.assignment.len() != ds.n() {
            return Err(ClusterError::DimensionMismatch {
                expected: ds.n(),
                found: self.assignment.len(),
            });
        }
        check_centers(ds, &self.centers)
    }

    pub fn c(&self) -> usize {
        self.centers.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        let mut n = vec![0; self.c()];
        for &j in &self.assignment {
            n[j] += 1;
        }
        n
    }

    pub fn members(&self, j: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| (a == j).then_some(i))
            .collect()
    }

    pub fn cluster(&self, j: usize) -> ClusterView {
        ClusterView {
            indices: self.members(j),
            center: self.centers[j].clone(),
        }
    }

    pub fn clusters(&self) -> Vec<ClusterView> {
        let mut views: Vec<ClusterView> = self
            .centers
            .iter()
            .map(|c| ClusterView {
                indices: Vec::new(),
                center: c.clone(),
            })
            .collect();
        for (i, &j) in self.assignment.iter().enumerate() {
            views[j].indices.push(i);
        }
        views
    }
}

/// Centers plus an N×c row-stochastic membership matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyPartition {
    pub centers: Vec<Vec<f64>>,
    pub memberships: Vec<Vec<f64>>,
}

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

impl FuzzyPartition {
    pub fn new(centers: Vec<Vec<f64>>, memberships: Vec<Vec<f64>>) -> Result<Self> {
        let fp = FuzzyPartition { centers, memberships };
        fp.validate()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.centers.len();
        if c == 0 {
            return Err(ClusterError::InvalidConfig("partition has no centers".into()));
        }
        for (i, row) in self.memberships.iter().enumerate() {
            if row.len() != c {
                return Err(ClusterError::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            if row.iter().any(|u| !(0.0..=1.0).contains(u)) {
                return Err(ClusterError::InvalidConfig(format!("membership outside [0,1] in row {i}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(ClusterError::InvalidConfig(format!("row {i} sums to {s}")));
            }
        }
        Ok(())
    }

    pub fn c(&self) -> usize {
        self.centers.len()
    }

    pub fn check_against(&self, ds: &Dataset) -> Result<()> {
        if self.memberships.len() != ds.n() {
            return Err(ClusterError::DimensionMismatch {
                expected: ds.n(),
                found: self.memberships.len(),
            });
        }
        check_centers(ds, &self.centers)
    }
}

/// Maximum-membership assignment; ties go to the lowest index.
pub fn defuzzify(fp: &FuzzyPartition) -> HardPartition {
    let assignment = fp
        .memberships
        .iter()
        .map(|row| {
            let mut best = 0;
            for (j, &u) in row.iter().enumerate() {
                if u > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect();
    HardPartition {
        centers: fp.centers.clone(),
        assignment,
    }
}

/// Member indices of one cluster together with its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterView {
    pub indices: Vec<usize>,
    pub center: Vec<f64>,
}

impl ClusterView {
    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.indices.len() == 1
    }

    /// Σ ‖x − center‖² over members.
    pub fn sum_sq(&self, ds: &Dataset) -> f64 {
        self.indices.iter().map(|&i| sq_dist(ds.point(i), &self.center)).sum()
    }
}
