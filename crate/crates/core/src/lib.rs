//! Hard and fuzzy partition clustering with separation-compactness validity
//! measures and automatic selection of the number of clusters.
//!
//! The hard side pairs k-means with the global SepCmp index and two sweep
//! drivers: [`emk_means`] (start at ⌊√N⌋ clusters and merge the worst cluster
//! each step) and [`esk_means`] (start at two clusters and split the most
//! dispersed one). The fuzzy side mirrors this with fuzzy c-means, the SC
//! index and [`fuzzy_auto`].

pub mod autoclust;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod fcm;
pub mod kmeans;
pub mod partition;
pub mod validity;

#[cfg(test)]
pub(crate) mod testutil;

pub use autoclust::{
    c_max_rule, emk_means, esk_means, merge_step, select_c_opt, split_step, AutoConfig, AutoResult,
    SplitSeedRule, SweepRecord,
};
pub use bench::{
    c_scaling_probe, distribution_similarity, emit_report, run_benchmark, scaling_probe, Algorithm, BenchConfig,
    BenchReport, ReportFormat, ScalingTable,
};
pub use dataset::{
    generate_blobs, generate_concentric, label_histogram, load_csv, BlobSpec, ConcentricSpec, CsvOptions,
    Dataset, LabelColumn,
};
pub use error::{ClusterError, Result};
pub use fcm::{
    fcm_from_centers, fcm_objective, fcm_run, fuzzy_auto, fuzzy_local_sc, fuzzy_sc, fuzzy_score, FcmConfig, FcmResult,
    FuzzyAutoResult, FuzzyMode,
};
pub use kmeans::{kmeans_criterion, kmeans_from_centers, kmeans_run, EmptyClusterPolicy, KMeansConfig, KMeansResult};
pub use partition::{defuzzify, euclidean, hard_assign, recompute_centers, ClusterView, FuzzyPartition, HardPartition};
pub use validity::{
    davies_bouldin, dunn, hard_cmp, hard_local_cmp, hard_local_sep, hard_local_sep_cmp, hard_sep, hard_sep_cmp,
    index_report, mse, var_global, var_split, CmpVariant, IndexReport,
};
