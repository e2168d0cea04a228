use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fuzzyhard::bench::c_scaling_probe;
use fuzzyhard::dataset::write_csv;
use fuzzyhard::{
    emit_report, fcm_run, fuzzy_auto, generate_concentric, index_report, kmeans_run, load_csv, run_benchmark,
    scaling_probe, Algorithm, AutoConfig, BenchConfig, ClusterError, CmpVariant, ConcentricSpec, CsvOptions,
    Dataset, FcmConfig, FuzzyMode, HardPartition, KMeansConfig, LabelColumn, ReportFormat, SplitSeedRule,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "fuzzyhard", version, about = "Hard and fuzzy clustering with automatic cluster-count search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Best-of-restarts k-means at a fixed number of clusters.
    Kmeans {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        max_iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuzzy c-means at a fixed number of clusters.
    Fcm {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        c: usize,
        #[command(flatten)]
        fcm: FcmArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuzzy merge or split sweep that picks c by the SC index.
    Autofcm {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "merge")]
        mode: FuzzyMode,
        #[command(flatten)]
        fcm: FcmArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every hard validity index for a given partition (JSON with centers and assignment).
    Indices {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value = "inverse")]
        cmpj: CmpVariant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// EMk-means or ESk-means on a CSV file.
    Auto {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "emk")]
        algo: Algorithm,
        #[command(flatten)]
        auto: AutoArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index table, per-index best c and label similarity for one sweep.
    Bench {
        /// iris, wine, diabetes, concentric, or a CSV path.
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "emk")]
        algo: Algorithm,
        #[command(flatten)]
        auto: AutoArgs,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
        /// Attach per-step wall times (makes output vary between runs).
        #[arg(long)]
        timings: bool,
        /// Rescale every feature to [0, 1] first.
        #[arg(long)]
        rescale: bool,
        /// Label column of a CSV dataset.
        #[arg(long)]
        label_column: Option<LabelColumn>,
        #[arg(long)]
        no_header: bool,
        #[command(flatten)]
        concentric: ConcentricArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time one SepCmp evaluation against N (and optionally against c).
    Scale {
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        c: usize,
        /// Cluster counts for a second probe at fixed N.
        #[arg(long, value_delimiter = ',')]
        cs: Vec<usize>,
        /// N for the cluster-count probe.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        concentric: ConcentricArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the two-ring synthetic dataset as CSV.
    Concentric {
        #[command(flatten)]
        concentric: ConcentricArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Label column: "last", a 0-based index or a header name.
    #[arg(long)]
    label_column: Option<LabelColumn>,
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        let opts = CsvOptions {
            has_header: !self.no_header,
            label_column: self.label_column.clone(),
        };
        Ok(load_csv(&self.input, &opts)?)
    }
}

#[derive(Args)]
struct FcmArgs {
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 300)]
    max_iterations: usize,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FcmArgs {
    fn config(&self, c: usize) -> FcmConfig {
        FcmConfig {
            c,
            m: self.m,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            rng_seed: self.seed,
            restarts: self.restarts,
        }
    }
}

#[derive(Args)]
struct AutoArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iterations: usize,
    #[arg(long, default_value = "inverse")]
    cmpj: CmpVariant,
    #[arg(long, default_value = "member")]
    split_seed: SplitSeedRule,
    /// Largest c tried (default ⌊√N⌋).
    #[arg(long)]
    c_max: Option<usize>,
}

impl AutoArgs {
    fn config(&self) -> AutoConfig {
        AutoConfig {
            restarts: self.restarts,
            rng_seed: self.seed,
            max_iterations: self.max_iterations,
            cmp_variant: self.cmpj,
            split_seed_rule: self.split_seed,
            c_max: self.c_max,
        }
    }
}

#[derive(Args)]
struct ConcentricArgs {
    #[arg(long, default_value_t = 1579)]
    inner_count: usize,
    #[arg(long, default_value_t = 921)]
    outer_count: usize,
    #[arg(long, default_value_t = 42)]
    concentric_seed: u64,
}

impl ConcentricArgs {
    fn spec(&self) -> ConcentricSpec {
        ConcentricSpec {
            inner_count: self.inner_count,
            outer_count: self.outer_count,
            rng_seed: self.concentric_seed,
            ..ConcentricSpec::default()
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(out, &text)
}

fn bench_dataset(name: &str, labels: Option<LabelColumn>, no_header: bool, concentric: &ConcentricArgs) -> Result<Dataset> {
    Ok(match name {
        "iris" => Dataset::iris(),
        "wine" => Dataset::wine(),
        "diabetes" => Dataset::diabetes(),
        "concentric" => generate_concentric(&concentric.spec())?,
        path => load_csv(
            path,
            &CsvOptions {
                has_header: !no_header,
                label_column: labels,
            },
        )?,
    })
}

#[derive(Serialize)]
struct ScaleOutput {
    by_n: fuzzyhard::ScalingTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    by_c: Option<fuzzyhard::ScalingTable>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Kmeans {
            input,
            c,
            seed,
            restarts,
            max_iterations,
            out,
        } => {
            let ds = input.load()?;
            let cfg = KMeansConfig::new(c)
                .with_seed(seed)
                .with_restarts(restarts)
                .with_max_iterations(max_iterations);
            write_json(out.as_deref(), &kmeans_run(&ds, &cfg)?)
        }
        Command::Fcm { input, c, fcm, out } => {
            let ds = input.load()?;
            write_json(out.as_deref(), &fcm_run(&ds, &fcm.config(c))?)
        }
        Command::Autofcm { input, mode, fcm, out } => {
            let ds = input.load()?;
            write_json(out.as_deref(), &fuzzy_auto(&ds, mode, &fcm.config(2))?)
        }
        Command::Indices {
            input,
            partition,
            cmpj,
            out,
        } => {
            let ds = input.load()?;
            let file = File::open(&partition).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => ClusterError::FileNotFound(partition.clone()),
                _ => ClusterError::Io(e),
            })?;
            let hp: HardPartition = serde_json::from_reader(io::BufReader::new(file)).map_err(ClusterError::from)?;
            hp.validate()?;
            write_json(out.as_deref(), &index_report(&ds, &hp, cmpj)?)
        }
        Command::Auto { input, algo, auto, out } => {
            let ds = input.load()?;
            write_json(out.as_deref(), &algo.run(&ds, &auto.config())?)
        }
        Command::Bench {
            dataset,
            algo,
            auto,
            format,
            timings,
            rescale,
            label_column,
            no_header,
            concentric,
            out,
        } => {
            let mut ds = bench_dataset(&dataset, label_column, no_header, &concentric)?;
            if rescale {
                ds = ds.min_max_rescale();
            }
            let cfg = BenchConfig {
                auto: auto.config(),
                include_timings: timings,
            };
            let report = run_benchmark(&ds, algo, &cfg)?;
            write_text(out.as_deref(), &emit_report(&report, format)?)
        }
        Command::Scale {
            sizes,
            c,
            cs,
            n,
            concentric,
            out,
        } => {
            let spec = concentric.spec();
            let by_n = scaling_probe(&spec, &sizes, c)?;
            let by_c = if cs.is_empty() {
                None
            } else {
                Some(c_scaling_probe(&spec, n, &cs)?)
            };
            write_json(out.as_deref(), &ScaleOutput { by_n, by_c })
        }
        Command::Concentric { concentric, out } => {
            let ds = generate_concentric(&concentric.spec())?;
            let w = sink(out.as_deref())?;
            write_csv(&ds, w)?;
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ClusterError>() {
        Some(e) if e.is_undefined_index() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
