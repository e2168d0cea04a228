//! Datasets: CSV loading, the bundled benchmark sets and the synthetic
//! Concentric generator.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};

const IRIS_CSV: &str = include_str!("../data/iris.csv");
const WINE_CSV: &str = include_str!("../data/wine.csv");
const DIABETES_CSV: &str = include_str!("../data/diabetes.csv");

/// An N×M matrix of finite reals with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        points: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let first = points.first().ok_or(ClusterError::EmptyData)?;
        let dim = first.len();
        if dim == 0 {
            return Err(ClusterError::InvalidDataset("points have no features".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(ClusterError::RaggedRow {
                    row: i,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(col) = p.iter().position(|v| !v.is_finite()) {
                return Err(ClusterError::InvalidDataset(format!(
                    "non-finite value at point {i}, feature {col}"
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(ClusterError::InvalidDataset(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.len()
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            points,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of points N.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Number of features M.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Rescales every feature to [0, 1]. Constant features map to 0.
    pub fn min_max_rescale(&self) -> Dataset {
        let dim = self.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in &self.points {
            for (d, &v) in p.iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(d, &v)| {
                        let span = hi[d] - lo[d];
                        if span > 0.0 {
                            (v - lo[d]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Dataset {
            name: self.name.clone(),
            points,
            labels: self.labels.clone(),
        }
    }

    /// Fisher's Iris: 150 × 4, three species of 50.
    pub fn iris() -> Dataset {
        builtin("iris", IRIS_CSV)
    }

    /// UCI Wine: 178 × 13, cultivars of 59, 71 and 48.
    pub fn wine() -> Dataset {
        builtin("wine", WINE_CSV)
    }

    /// Pima Indians Diabetes: 768 × 8, outcomes of 500 and 268.
    pub fn diabetes() -> Dataset {
        builtin("diabetes", DIABETES_CSV)
    }
}

fn builtin(name: &str, text: &str) -> Dataset {
    let opts = CsvOptions {
        has_header: true,
        label_column: Some(LabelColumn::Last),
    };
    read_csv(text.as_bytes(), name, &opts).expect("bundled dataset is well-formed")
}

/// Selects which CSV column holds ground-truth labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a 0-based column index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse::<usize>() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
}

/// Loads a comma-separated file. Rows and columns in errors are 1-based.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(ClusterError::FileNotFound(path.to_path_buf()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(File::open(path)?, &name, opts)
}

pub fn read_csv<R: Read>(reader: R, name: &str, opts: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let mut line = 0usize;
    let mut header: Option<csv::StringRecord> = None;
    if opts.has_header {
        match records.next() {
            Some(rec) => {
                line += 1;
                header = Some(rec.map_err(|e| csv_error(line, e))?);
            }
            None => return Err(ClusterError::EmptyData),
        }
    }

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut arity: Option<usize> = header.as_ref().map(|h| h.len());
    let mut label_idx: Option<usize> = None;

    for rec in records {
        line += 1;
        let rec = rec.map_err(|e| csv_error(line, e))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let width = *arity.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(ClusterError::RaggedRow {
                row: line,
                expected: width,
                found: rec.len(),
            });
        }
        if label_idx.is_none() {
            label_idx = match &opts.label_column {
                None => None,
                Some(sel) => Some(resolve_label(sel, header.as_ref(), width)?),
            };
        }
        let mut p = Vec::with_capacity(width);
        for (col, cell) in rec.iter().enumerate() {
            if Some(col) == label_idx {
                labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| ClusterError::Parse {
                row: line,
                column: col + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(ClusterError::Parse {
                    row: line,
                    column: col + 1,
                    message: format!("non-finite value {cell:?}"),
                });
            }
            p.push(v);
        }
        points.push(p);
    }

    if points.is_empty() {
        return Err(ClusterError::EmptyData);
    }
    let labels = label_idx.map(|_| labels);
    Dataset::new(name, points, labels)
}

fn csv_error(line: usize, e: csv::Error) -> ClusterError {
    ClusterError::Parse {
        row: line,
        column: 0,
        message: e.to_string(),
    }
}

fn resolve_label(sel: &LabelColumn, header: Option<&csv::StringRecord>, width: usize) -> Result<usize> {
    let idx = match sel {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => header
            .ok_or_else(|| ClusterError::InvalidConfig("label column by name needs a header row".into()))?
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ClusterError::InvalidConfig(format!("no column named {name:?}")))?,
    };
    if idx >= width {
        return Err(ClusterError::InvalidConfig(format!(
            "label column {idx} out of range for {width} columns"
        )));
    }
    if width < 2 {
        return Err(ClusterError::InvalidConfig("label column leaves no features".into()));
    }
    Ok(idx)
}

/// Writes the dataset with a header row; labels, when present, go last.
/// Values use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=ds.dim()).map(|d| format!("x{d}")).collect();
    if ds.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(csv_io)?;
    for (i, p) in ds.points().iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        if let Some(l) = ds.labels() {
            row.push(l[i].clone());
        }
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> ClusterError {
    ClusterError::Io(std::io::Error::other(e.to_string()))
}

/// Counts per distinct label, largest first; equal counts ordered by label.
pub fn label_histogram(ds: &Dataset) -> Result<Vec<(String, usize)>> {
    let labels = ds.labels().ok_or(ClusterError::LabelsAbsent)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    let mut hist: Vec<(String, usize)> = counts.into_iter().map(|(l, n)| (l.to_string(), n)).collect();
    hist.sort_by_key(|h| std::cmp::Reverse(h.1));
    Ok(hist)
}

/// Geometry of the two-ring synthetic set: a disk nested inside an annulus,
/// both centered at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentricSpec {
    pub inner_count: usize,
    pub outer_count: usize,
    pub inner_radius: f64,
    pub ring_inner_radius: f64,
    pub ring_outer_radius: f64,
    pub rng_seed: u64,
}

impl Default for ConcentricSpec {
    fn default() -> Self {
        ConcentricSpec {
            inner_count: 1579,
            outer_count: 921,
            inner_radius: 1.0,
            ring_inner_radius: 2.0,
            ring_outer_radius: 3.0,
            rng_seed: 42,
        }
    }
}

impl ConcentricSpec {
    pub fn validate(&self) -> Result<()> {
        if self.inner_count == 0 || self.outer_count == 0 {
            return Err(ClusterError::InvalidConfig("concentric counts must be positive".into()));
        }
        let radii = [self.inner_radius, self.ring_inner_radius, self.ring_outer_radius];
        if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(ClusterError::InvalidConfig("concentric radii must be positive".into()));
        }
        if !(self.inner_radius < self.ring_inner_radius && self.ring_inner_radius < self.ring_outer_radius) {
            return Err(ClusterError::InvalidConfig(
                "need inner_radius < ring_inner_radius < ring_outer_radius".into(),
            ));
        }
        Ok(())
    }

    /// Same geometry and proportions, resized to `n` points in total.
    pub fn resized(&self, n: usize) -> ConcentricSpec {
        let total = (self.inner_count + self.outer_count) as f64;
        let inner = ((n as f64) * self.inner_count as f64 / total).round() as usize;
        let inner = inner.clamp(1, n.saturating_sub(1).max(1));
        ConcentricSpec {
            inner_count: inner,
            outer_count: n.saturating_sub(inner).max(1),
            ..self.clone()
        }
    }
}

/// Samples the inner disk and the outer annulus area-uniformly. Inner points
/// come first with label "1", outer points follow with label "2".
pub fn generate_concentric(spec: &ConcentricSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let n = spec.inner_count + spec.outer_count;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..spec.inner_count {
        points.push(sample_annulus(&mut rng, 0.0, spec.inner_radius));
        labels.push("1".to_string());
    }
    for _ in 0..spec.outer_count {
        points.push(sample_annulus(&mut rng, spec.ring_inner_radius, spec.ring_outer_radius));
        labels.push("2".to_string());
    }
    Dataset::new("concentric", points, Some(labels))
}

fn sample_annulus<R: Rng>(rng: &mut R, r1: f64, r2: f64) -> Vec<f64> {
    let u: f64 = rng.random();
    let theta = rng.random::<f64>() * TAU;
    let r = (u * (r2 * r2 - r1 * r1) + r1 * r1).sqrt();
    vec![r * theta.cos(), r * theta.sin()]
}

/// Isotropic Gaussian blobs around fixed centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub centers: Vec<Vec<f64>>,
    pub per_blob: usize,
    pub std_dev: f64,
    pub rng_seed: u64,
}

/// Blob g gets label `g + 1`; points are grouped by blob.
pub fn generate_blobs(spec: &BlobSpec) -> Result<Dataset> {
    if spec.centers.is_empty() || spec.per_blob == 0 {
        return Err(ClusterError::InvalidConfig("need at least one blob with one point".into()));
    }
    let normal = Normal::new(0.0, spec.std_dev)
        .map_err(|e| ClusterError::InvalidConfig(format!("blob std_dev: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut points = Vec::with_capacity(spec.centers.len() * spec.per_blob);
    let mut labels = Vec::with_capacity(points.capacity());
    for (g, center) in spec.centers.iter().enumerate() {
        for _ in 0..spec.per_blob {
            points.push(center.iter().map(|m| m + normal.sample(&mut rng)).collect());
            labels.push((g + 1).to_string());
        }
    }
    Dataset::new("blobs", points, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(p: &[f64]) -> f64 {
        p.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn opts(header: bool, label: Option<LabelColumn>) -> CsvOptions {
        CsvOptions {
            has_header: header,
            label_column: label,
        }
    }

    #[test]
    fn iris_shape_and_histogram() {
        let ds = Dataset::iris();
        assert_eq!((ds.n(), ds.dim()), (150, 4));
        let counts: Vec<usize> = label_histogram(&ds).unwrap().into_iter().map(|(_, n)| n).collect();
        assert_eq!(counts, vec![50, 50, 50]);
    }

    #[test]
    fn wine_histogram() {
        let ds = Dataset::wine();
        assert_eq!((ds.n(), ds.dim()), (178, 13));
        let hist: BTreeMap<String, usize> = label_histogram(&ds).unwrap().into_iter().collect();
        assert_eq!(hist["1"], 59);
        assert_eq!(hist["2"], 71);
        assert_eq!(hist["3"], 48);
    }

    #[test]
    fn diabetes_histogram() {
        let ds = Dataset::diabetes();
        assert_eq!((ds.n(), ds.dim()), (768, 8));
        let counts: Vec<usize> = label_histogram(&ds).unwrap().into_iter().map(|(_, n)| n).collect();
        assert_eq!(counts, vec![500, 268]);
    }

    #[test]
    fn minimal_file_without_labels() {
        let ds = read_csv("0,0\n".as_bytes(), "one", &opts(false, None)).unwrap();
        assert_eq!((ds.n(), ds.dim()), (1, 2));
        assert!(ds.labels().is_none());
        assert!(matches!(label_histogram(&ds), Err(ClusterError::LabelsAbsent)));
    }

    #[test]
    fn single_labelled_row_histogram() {
        let ds = read_csv("1.5,a\n".as_bytes(), "one", &opts(false, Some(LabelColumn::Index(1)))).unwrap();
        assert_eq!(label_histogram(&ds).unwrap(), vec![("a".to_string(), 1)]);
    }

    #[test]
    fn label_by_name_in_middle() {
        let text = "x,cls,y\n1,a,2\n3,b,4\n";
        let ds = read_csv(text.as_bytes(), "t", &opts(true, Some(LabelColumn::Name("cls".into())))).unwrap();
        assert_eq!(ds.points(), &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(ds.labels().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn parse_error_reports_location() {
        let err = read_csv("1,2\n3,oops\n".as_bytes(), "t", &opts(false, None)).unwrap_err();
        match err {
            ClusterError::Parse { row, column, .. } => assert_eq!((row, column), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = read_csv("1,2\n3\n".as_bytes(), "t", &opts(false, None)).unwrap_err();
        assert!(matches!(err, ClusterError::RaggedRow { row: 2, expected: 2, found: 1 }));
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(matches!(read_csv("".as_bytes(), "t", &opts(false, None)), Err(ClusterError::EmptyData)));
        assert!(matches!(read_csv("a,b\n".as_bytes(), "t", &opts(true, None)), Err(ClusterError::EmptyData)));
    }

    #[test]
    fn missing_file() {
        let err = load_csv("/nonexistent/data.csv", &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, ClusterError::FileNotFound(_)));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(read_csv("1,NaN\n".as_bytes(), "t", &opts(false, None)).is_err());
        assert!(Dataset::new("t", vec![vec![f64::INFINITY]], None).is_err());
    }

    #[test]
    fn concentric_default_sizes() {
        let ds = generate_concentric(&ConcentricSpec::default()).unwrap();
        assert_eq!((ds.n(), ds.dim()), (2500, 2));
        let counts: Vec<usize> = label_histogram(&ds).unwrap().into_iter().map(|(_, n)| n).collect();
        assert_eq!(counts, vec![1579, 921]);
    }

    #[test]
    fn concentric_minimal_geometry() {
        let spec = ConcentricSpec {
            inner_count: 1,
            outer_count: 1,
            rng_seed: 0,
            ..ConcentricSpec::default()
        };
        let ds = generate_concentric(&spec).unwrap();
        assert_eq!(ds.n(), 2);
        assert!(norm(ds.point(0)) <= 1.0);
        let r = norm(ds.point(1));
        assert!((2.0 - 1e-12..=3.0 + 1e-12).contains(&r), "outer norm {r}");
    }

    #[test]
    fn concentric_deterministic_and_nested() {
        let spec = ConcentricSpec::default();
        let a = generate_concentric(&spec).unwrap();
        let b = generate_concentric(&spec).unwrap();
        assert_eq!(a, b);
        let max_inner = a.points()[..spec.inner_count].iter().map(|p| norm(p)).fold(0.0, f64::max);
        let min_outer = a.points()[spec.inner_count..].iter().map(|p| norm(p)).fold(f64::INFINITY, f64::min);
        assert!(max_inner < min_outer);
    }

    #[test]
    fn concentric_rejects_bad_radii() {
        let spec = ConcentricSpec {
            ring_inner_radius: 0.5,
            ..ConcentricSpec::default()
        };
        assert!(generate_concentric(&spec).is_err());
    }

    #[test]
    fn min_max_rescale_bounds() {
        let ds = Dataset::new("t", vec![vec![1.0, 5.0], vec![3.0, 5.0], vec![2.0, 5.0]], None).unwrap();
        let r = ds.min_max_rescale();
        assert_eq!(r.points(), &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.0]]);
    }
}
