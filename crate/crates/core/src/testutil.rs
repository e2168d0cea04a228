use crate::dataset::{generate_blobs, BlobSpec, Dataset};
use crate::partition::HardPartition;

/// {(0,0),(0,2),(10,0),(10,2)}: two vertical pairs ten apart.
pub fn d4() -> Dataset {
    Dataset::new(
        "d4",
        vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![10.0, 0.0], vec![10.0, 2.0]],
        None,
    )
    .unwrap()
}

pub fn d4_natural() -> HardPartition {
    HardPartition::new(vec![vec![0.0, 1.0], vec![10.0, 1.0]], vec![0, 0, 1, 1]).unwrap()
}

pub fn scaled(ds: &Dataset, s: f64) -> Dataset {
    Dataset::new(
        ds.name(),
        ds.points().iter().map(|p| p.iter().map(|v| v * s).collect()).collect(),
        ds.labels().map(|l| l.to_vec()),
    )
    .unwrap()
}

pub fn blobs(centers: &[[f64; 2]], per_blob: usize, std_dev: f64, seed: u64) -> Dataset {
    generate_blobs(&BlobSpec {
        centers: centers.iter().map(|c| c.to_vec()).collect(),
        per_blob,
        std_dev,
        rng_seed: seed,
    })
    .unwrap()
}
