use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use fuzzyhard::bench::c_scaling_probe;
use fuzzyhard::fcm::membership_row;
use fuzzyhard::{
    emit_report, emk_means, esk_means, fcm_run, fuzzy_auto, fuzzy_local_sc, fuzzy_sc, fuzzy_score, generate_blobs,
    generate_concentric, kmeans_run, run_benchmark, scaling_probe, Algorithm, AutoConfig,
    AutoResult, BenchConfig, BlobSpec, ConcentricSpec, Dataset, FcmConfig, FuzzyMode, FuzzyPartition,
    HardPartition, KMeansConfig, ReportFormat,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Criteria run one at a time so the timing probe is not disturbed.
static SERIAL: Mutex<()> = Mutex::new(());

fn verdict(criterion: u32, pass: bool, detail: &str) {
    let line = format!(
        "criterion {criterion:>2}: {} | {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn auto(seed: u64) -> AutoConfig {
    AutoConfig::default().with_seed(seed).with_restarts(10)
}

fn run(algo: Algorithm, ds: &Dataset, cfg: &AutoConfig) -> AutoResult {
    algo.run(ds, cfg).unwrap()
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_01_optimal_cluster_counts() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let cases = [
        (Dataset::iris(), Algorithm::Emk, 3, 8),
        (Dataset::iris(), Algorithm::Esk, 3, 8),
        (Dataset::wine(), Algorithm::Emk, 3, 8),
        (Dataset::wine(), Algorithm::Esk, 3, 8),
        (Dataset::diabetes(), Algorithm::Emk, 2, 7),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (ds, algo, target, needed) in cases {
        let mut hits = 0;
        let mut chosen = Vec::new();
        let mut slowest: f64 = 0.0;
        for seed in 1..=10 {
            let t = Instant::now();
            let res = run(algo, &ds, &auto(seed));
            slowest = slowest.max(t.elapsed().as_secs_f64());
            chosen.push(res.c_opt);
            hits += usize::from(res.c_opt == target);
        }
        let ok = hits >= needed && slowest < 30.0;
        pass &= ok;
        parts.push(format!(
            "{} {}: c_opt={target} in {hits}/10 (need {needed}), chosen {chosen:?}, slowest {slowest:.2}s",
            ds.name(),
            algo.name()
        ));
    }
    verdict(1, pass, &parts.join("; "));
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_concentric_terminates() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let ds = generate_concentric(&ConcentricSpec::default()).unwrap();
    assert_eq!(ds.n(), 2500);
    let mut pass = true;
    let mut parts = Vec::new();
    for algo in [Algorithm::Emk, Algorithm::Esk] {
        let t = Instant::now();
        let cfg = BenchConfig {
            auto: auto(42),
            include_timings: false,
        };
        let report = run_benchmark(&ds, algo, &cfg).unwrap();
        let md = emit_report(&report, ReportFormat::Markdown).unwrap();
        let json = emit_report(&report, ReportFormat::Json).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let mut cs: Vec<usize> = report.rows.iter().map(|r| r.c).collect();
        cs.sort_unstable();
        let complete = cs == (2..=50).collect::<Vec<_>>();
        let ok = complete && secs < 120.0 && !md.is_empty() && !json.is_empty();
        pass &= ok;
        parts.push(format!(
            "{}: {secs:.1}s, sweep c=2..50 complete={complete}, c_opt={} (recorded, not asserted), similarity {:.2}%",
            algo.name(),
            report.c_opt.sep_cmp,
            report.similarity.unwrap_or(f64::NAN)
        ));
    }
    verdict(2, pass, &parts.join("; "));
}

// ---------------------------------------------------------------- 3

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn criterion_03_distribution_similarity() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut pass = true;
    let mut parts = Vec::new();
    for (ds, bound) in [(Dataset::iris(), 6.0), (Dataset::wine(), 8.0)] {
        let sims: Vec<f64> = (1..=10)
            .map(|seed| {
                let cfg = BenchConfig {
                    auto: auto(seed),
                    include_timings: false,
                };
                run_benchmark(&ds, Algorithm::Emk, &cfg).unwrap().similarity.unwrap()
            })
            .collect();
        let m = median(sims.clone());
        let ok = m <= bound;
        pass &= ok;
        let shown: Vec<String> = sims.iter().map(|s| format!("{s:.2}")).collect();
        parts.push(format!("{} EMk-means median {m:.2}% (bound {bound}%), per seed [{}]", ds.name(), shown.join(", ")));
    }
    verdict(3, pass, &parts.join("; "));
}

// ---------------------------------------------------------------- 4

mod oracle {
    //! Direct transcriptions of the index formulas, written without the
    //! library's helpers.

    pub type Pts = Vec<Vec<f64>>;

    pub fn d2(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..a.len() {
            s += (a[k] - b[k]) * (a[k] - b[k]);
        }
        s
    }

    fn count(assign: &[usize], j: usize) -> usize {
        assign.iter().filter(|&&a| a == j).count()
    }

    fn ss(x: &Pts, centers: &Pts, assign: &[usize], j: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            if assign[i] == j {
                s += d2(&x[i], &centers[j]);
            }
        }
        s
    }

    pub fn mse(x: &Pts, centers: &Pts, assign: &[usize]) -> Option<f64> {
        let mut s = 0.0;
        for i in 0..x.len() {
            s += d2(&x[i], &centers[assign[i]]);
        }
        Some(s / x.len() as f64)
    }

    pub fn dunn(x: &Pts, c: usize, assign: &[usize]) -> Option<f64> {
        if (0..c).any(|j| count(assign, j) == 0) {
            return None;
        }
        let mut dmin = f64::INFINITY;
        for j in 0..c {
            for k in 0..c {
                if j == k {
                    continue;
                }
                for i in 0..x.len() {
                    for l in 0..x.len() {
                        if assign[i] == j && assign[l] == k {
                            dmin = dmin.min(d2(&x[i], &x[l]).sqrt());
                        }
                    }
                }
            }
        }
        let mut dmax: f64 = 0.0;
        for j in 0..c {
            for i in 0..x.len() {
                for l in 0..x.len() {
                    if assign[i] == j && assign[l] == j {
                        dmax = dmax.max(d2(&x[i], &x[l]).sqrt());
                    }
                }
            }
        }
        (dmax > 0.0).then(|| dmin / dmax)
    }

    pub fn davies_bouldin(x: &Pts, centers: &Pts, assign: &[usize]) -> Option<f64> {
        let c = centers.len();
        let mut dc = vec![0.0; c];
        for j in 0..c {
            let n = count(assign, j);
            if n == 0 {
                return None;
            }
            let mut s = 0.0;
            for i in 0..x.len() {
                if assign[i] == j {
                    s += d2(&x[i], &centers[j]).sqrt();
                }
            }
            dc[j] = s / n as f64;
        }
        let mut total = 0.0;
        for j in 0..c {
            let mut worst = f64::NEG_INFINITY;
            for l in 0..c {
                if l != j {
                    let dce = d2(&centers[j], &centers[l]).sqrt();
                    if dce == 0.0 {
                        return None;
                    }
                    worst = worst.max((dc[j] + dc[l]) / dce);
                }
            }
            total += worst;
        }
        Some(total / c as f64)
    }

    pub fn var_global(x: &Pts, centers: &Pts, assign: &[usize], j: usize) -> Option<f64> {
        let n = count(assign, j) as f64;
        (n > 0.0).then(|| ss(x, centers, assign, j) / (n * n))
    }

    pub fn var_split(x: &Pts, centers: &Pts, assign: &[usize], j: usize) -> Option<f64> {
        let n = count(assign, j) as f64;
        (n > 0.0).then(|| ss(x, centers, assign, j) / n)
    }

    fn k_non_singleton(c: usize, assign: &[usize]) -> usize {
        (0..c).filter(|&j| count(assign, j) >= 2).count()
    }

    pub fn cmp(x: &Pts, centers: &Pts, assign: &[usize]) -> Option<f64> {
        let c = centers.len();
        let k = k_non_singleton(c, assign);
        let mut total = 0.0;
        for j in 0..c {
            if count(assign, j) >= 2 {
                total += var_global(x, centers, assign, j)?;
            }
        }
        (k > 0 && total > 0.0).then(|| k as f64 / total)
    }

    pub fn sep_j(centers: &Pts, j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for l in 0..centers.len() {
            if l != j {
                best = best.min(d2(&centers[j], &centers[l]));
            }
        }
        best
    }

    pub fn sep(centers: &Pts) -> Option<f64> {
        let c = centers.len();
        let mut s = 0.0;
        for j in 0..c {
            s += sep_j(centers, j);
        }
        let m = s / c as f64;
        Some(m * m)
    }

    pub fn sep_cmp(x: &Pts, centers: &Pts, assign: &[usize]) -> Option<f64> {
        let c = centers.len();
        let k = k_non_singleton(c, assign) as f64;
        Some(k / c as f64 * sep(centers)? * cmp(x, centers, assign)?)
    }

    pub fn cmp_j(x: &Pts, centers: &Pts, assign: &[usize], j: usize, literal: bool) -> Option<f64> {
        let n = count(assign, j);
        if n < 2 {
            return None;
        }
        let s = ss(x, centers, assign, j);
        if s == 0.0 {
            return None;
        }
        if literal {
            let v = s / (n * n) as f64;
            Some(v * v / s)
        } else {
            Some(1.0 / (s / n as f64))
        }
    }

    pub fn defuzzify(u: &Pts) -> Vec<usize> {
        u.iter()
            .map(|row| {
                let mut best = 0;
                for j in 1..row.len() {
                    if row[j] > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }

    pub fn sc(x: &Pts, v: &Pts, u: &Pts) -> Option<f64> {
        let c = v.len();
        let hard = defuzzify(u);
        let k = k_non_singleton(c, &hard);
        if k == 0 {
            return None;
        }
        let mut num = 0.0;
        for j in 0..c {
            num += sep_j(v, j);
        }
        let mut den = 0.0;
        for j in 0..c {
            if count(&hard, j) < 2 {
                continue;
            }
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..x.len() {
                if hard[i] == j && x[i] != v[j] {
                    a += u[i][j].powi(2) * d2(&x[i], &v[j]);
                    b += u[i][j].powi(2);
                }
            }
            if b > 0.0 {
                den += a / b;
            }
        }
        (den > 0.0).then(|| k as f64 / c as f64 * num / den)
    }

    pub fn sc_j(x: &Pts, v: &Pts, u: &Pts, j: usize) -> Option<f64> {
        let hard = defuzzify(u);
        if count(&hard, j) < 2 {
            return None;
        }
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..x.len() {
            if hard[i] == j && x[i] != v[j] {
                a += u[i][j].powi(2);
                b += u[i][j].powi(2) * d2(&x[i], &v[j]);
            }
        }
        (b > 0.0).then(|| sep_j(v, j) * a / b)
    }

    pub fn s_j(u: &Pts, j: usize) -> Option<f64> {
        let n = count(&defuzzify(u), j);
        let mut mass = 0.0;
        for row in u {
            mass += row[j];
        }
        (n > 0).then(|| mass / n as f64)
    }
}

struct Mismatches {
    checked: usize,
    failures: Vec<String>,
}

impl Mismatches {
    fn check(&mut self, what: &str, case: usize, got: Option<f64>, want: Option<f64>) {
        self.checked += 1;
        let ok = match (got, want) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) || a == b,
            (None, None) => true,
            _ => false,
        };
        if !ok && self.failures.len() < 10 {
            self.failures.push(format!("case {case} {what}: got {got:?}, oracle {want:?}"));
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Dataset, HardPartition, FuzzyPartition) {
    let c = rng.random_range(2..=3);
    let n = rng.random_range(c.max(2)..=8);
    let m = rng.random_range(1..=3);
    let coarse = rng.random_bool(0.3);
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let v: f64 = rng.random_range(-5.0..5.0);
                    if coarse {
                        v.round()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    if rng.random_bool(0.2) {
        pts[n - 1] = pts[0].clone();
    }
    let mut assignment: Vec<usize> = (0..n).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
    for i in (1..n).rev() {
        let k = rng.random_range(0..=i);
        assignment.swap(i, k);
    }
    let ds = Dataset::new("random", pts.clone(), None).unwrap();
    let centers: Vec<Vec<f64>> = if rng.random_bool(0.5) {
        (0..c)
            .map(|j| {
                let members: Vec<&Vec<f64>> = pts.iter().zip(&assignment).filter(|(_, &a)| a == j).map(|(p, _)| p).collect();
                (0..m)
                    .map(|k| members.iter().map(|p| p[k]).sum::<f64>() / members.len() as f64)
                    .collect()
            })
            .collect()
    } else {
        (0..c).map(|_| (0..m).map(|_| rng.random_range(-5.0..5.0)).collect()).collect()
    };
    let hp = HardPartition::new(centers.clone(), assignment).unwrap();
    let fuzzy_centers: Vec<Vec<f64>> = if rng.random_bool(0.5) {
        centers
    } else {
        (0..c).map(|_| pts[rng.random_range(0..n)].clone()).collect()
    };
    let memberships: Vec<Vec<f64>> = if rng.random_bool(0.5) {
        pts.iter().map(|x| membership_row(x, &fuzzy_centers, 2.0)).collect()
    } else {
        (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..c).map(|_| rng.random_range(0.01..1.0)).collect();
                let t: f64 = w.iter().sum();
                w.into_iter().map(|v| v / t).collect()
            })
            .collect()
    };
    let fp = FuzzyPartition::new(fuzzy_centers, memberships).unwrap();
    (ds, hp, fp)
}

#[test]
fn criterion_04_index_oracle_equivalence() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    use fuzzyhard::validity::*;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mm = Mismatches {
        checked: 0,
        failures: Vec::new(),
    };
    for case in 0..200 {
        let (ds, hp, fp) = random_instance(&mut rng);
        let x = ds.points().to_vec();
        let (v, a) = (&hp.centers, &hp.assignment);
        let c = hp.c();
        mm.check("MSE", case, mse(&ds, &hp).ok(), oracle::mse(&x, v, a));
        mm.check("Dunn", case, dunn(&ds, &hp).ok(), oracle::dunn(&x, c, a));
        mm.check("DB", case, davies_bouldin(&ds, &hp).ok(), oracle::davies_bouldin(&x, v, a));
        mm.check("Cmp", case, hard_cmp(&ds, &hp).ok(), oracle::cmp(&x, v, a));
        mm.check("Sep", case, hard_sep(&hp).ok(), oracle::sep(v));
        mm.check("SepCmp", case, hard_sep_cmp(&ds, &hp).ok(), oracle::sep_cmp(&x, v, a));
        for j in 0..c {
            let view = hp.cluster(j);
            mm.check("var_global", case, var_global(&ds, &view).ok(), oracle::var_global(&x, v, a, j));
            mm.check("var_split", case, var_split(&ds, &view).ok(), oracle::var_split(&x, v, a, j));
            mm.check("sep_j", case, hard_local_sep(&hp, j).ok(), Some(oracle::sep_j(v, j)));
            for (variant, literal) in [(CmpVariant::InverseVariance, false), (CmpVariant::Literal, true)] {
                let want = oracle::cmp_j(&x, v, a, j, literal);
                mm.check("cmp_j", case, hard_local_cmp(&ds, &view, variant).ok(), want);
                mm.check(
                    "sepcmp_j",
                    case,
                    hard_local_sep_cmp(&ds, &hp, j, variant).ok(),
                    want.map(|w| w * oracle::sep_j(v, j)),
                );
            }
            mm.check("sc_j", case, fuzzy_local_sc(&ds, &fp, j).ok(), oracle::sc_j(&x, &fp.centers, &fp.memberships, j));
            mm.check("s(j)", case, fuzzy_score(&fp, j).ok(), oracle::s_j(&fp.memberships, j));
        }
        mm.check("SC", case, fuzzy_sc(&ds, &fp).ok(), oracle::sc(&x, &fp.centers, &fp.memberships));
    }
    let detail = format!(
        "200 random datasets (N<=8, M<=3, c in {{2,3}}), {} comparisons, {} mismatches {:?}",
        mm.checked,
        mm.failures.len(),
        mm.failures
    );
    verdict(4, mm.failures.is_empty(), &detail);
}

// ---------------------------------------------------------------- 5

fn random_cloud(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.random_range(10..=80);
    let m = rng.random_range(1..=4);
    let pts = (0..n).map(|_| (0..m).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
    Dataset::new("cloud", pts, None).unwrap()
}

#[test]
fn criterion_05_monotone_objectives() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst_km: f64 = 0.0;
    let mut worst_fcm: f64 = 0.0;
    for inst in 0..50u64 {
        let ds = random_cloud(&mut rng);
        let c = rng.random_range(2..=6.min(ds.n()));
        let km = kmeans_run(&ds, &KMeansConfig::new(c).with_seed(inst).with_restarts(1)).unwrap();
        for w in km.trace.windows(2) {
            worst_km = worst_km.max(w[1] - w[0]);
        }
        let fcm = fcm_run(&ds, &FcmConfig::new(c).with_seed(inst).with_restarts(1).with_epsilon(1e-8)).unwrap();
        for w in fcm.trace.windows(2) {
            worst_fcm = worst_fcm.max(w[1] - w[0]);
        }
    }
    let pass = worst_km <= 1e-9 && worst_fcm <= 1e-9;
    verdict(
        5,
        pass,
        &format!("50 k-means + 50 FCM instances; largest per-iteration increase E {worst_km:.3e}, J_m {worst_fcm:.3e}"),
    );
}

// ---------------------------------------------------------------- 6

fn transformed(ds: &Dataset, scale: f64, shift: &[f64]) -> Dataset {
    let pts = ds
        .points()
        .iter()
        .map(|p| p.iter().zip(shift).map(|(v, t)| v * scale + t).collect())
        .collect();
    Dataset::new("transformed", pts, None).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[test]
fn criterion_06_transform_invariance() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut failures = Vec::new();
    for inst in 0..20u64 {
        let g = rng.random_range(2..=4);
        let centers: Vec<Vec<f64>> = (0..g)
            .map(|_| vec![rng.random_range(0.0..30.0), rng.random_range(0.0..30.0)])
            .collect();
        let ds = generate_blobs(&BlobSpec {
            centers,
            per_blob: rng.random_range(15..=30),
            std_dev: rng.random_range(1.0..3.0),
            rng_seed: inst,
        })
        .unwrap();
        let cfg = AutoConfig::default().with_seed(inst).with_restarts(3);
        let algo = if inst % 2 == 0 { Algorithm::Emk } else { Algorithm::Esk };
        let base = run(algo, &ds, &cfg);
        let shift = vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        for (s, t) in [(1.0, shift.clone()), (0.1, vec![0.0, 0.0]), (10.0, vec![0.0, 0.0])] {
            let other = run(algo, &transformed(&ds, s, &t), &cfg);
            if other.c_opt != base.c_opt {
                failures.push(format!("dataset {inst} s={s}: c_opt {} vs {}", base.c_opt, other.c_opt));
                continue;
            }
            for (a, b) in base.sweep.iter().zip(&other.sweep) {
                let (ra, rb) = (&a.index_report, &b.index_report);
                let checks = [
                    ("MSE", ra.mse * s * s, rb.mse),
                    ("Sep", ra.sep * s.powi(4), rb.sep),
                    ("Cmp", ra.cmp / (s * s), rb.cmp),
                    ("SepCmp", ra.sep_cmp * s * s, rb.sep_cmp),
                ];
                for (name, want, got) in checks {
                    if !rel_close(want, got, 1e-9) {
                        failures.push(format!("dataset {inst} s={s} c={} {name}: {want} vs {got}", a.c));
                    }
                }
            }
        }
    }
    let detail = format!(
        "20 blob datasets x (translation, s=0.1, s=10): {} violations {:?}",
        failures.len(),
        &failures[..failures.len().min(5)]
    );
    verdict(6, failures.is_empty(), &detail);
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_07_conservation() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = Vec::new();
    let mut sweeps = 0;
    for ds in [Dataset::iris(), Dataset::wine(), Dataset::diabetes()] {
        for algo in [Algorithm::Emk, Algorithm::Esk] {
            for seed in [1, 42] {
                let res = run(algo, &ds, &auto(seed));
                sweeps += 1;
                let step: isize = if algo == Algorithm::Emk { -1 } else { 1 };
                for r in &res.sweep {
                    if r.cardinalities.iter().sum::<usize>() != ds.n() || r.cardinalities.len() != r.c {
                        failures.push(format!("{} {} c={}: cardinalities {:?}", ds.name(), algo.name(), r.c, r.cardinalities));
                    }
                }
                for w in res.sweep.windows(2) {
                    if w[1].c as isize - w[0].c as isize != step {
                        failures.push(format!("{} {}: c went {} -> {}", ds.name(), algo.name(), w[0].c, w[1].c));
                    }
                }
            }
        }
    }
    verdict(
        7,
        failures.is_empty(),
        &format!("{sweeps} benchmark sweeps checked, {} violations {failures:?}", failures.len()),
    );
}

// ---------------------------------------------------------------- 8

fn blob_layout(g: usize) -> Vec<Vec<f64>> {
    let h = 20.0 * 3f64.sqrt() / 2.0;
    let all = [vec![0.0, 0.0], vec![20.0, 0.0], vec![10.0, h], vec![10.0, -h]];
    all[..g].to_vec()
}

#[test]
fn criterion_08_synthetic_recovery() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut pass = true;
    let mut parts = Vec::new();
    for g in 2..=4 {
        let mut hits = [0usize; 4];
        for seed in 1..=10u64 {
            let ds = generate_blobs(&BlobSpec {
                centers: blob_layout(g),
                per_blob: 50,
                std_dev: 1.0,
                rng_seed: seed,
            })
            .unwrap();
            hits[0] += usize::from(emk_means(&ds, &auto(seed)).unwrap().c_opt == g);
            hits[1] += usize::from(esk_means(&ds, &auto(seed)).unwrap().c_opt == g);
            let fcfg = FcmConfig::new(2).with_seed(seed);
            hits[2] += usize::from(fuzzy_auto(&ds, FuzzyMode::Merge, &fcfg).unwrap().c_opt == g);
            hits[3] += usize::from(fuzzy_auto(&ds, FuzzyMode::Split, &fcfg).unwrap().c_opt == g);
        }
        pass &= hits.iter().all(|&h| h >= 8);
        parts.push(format!(
            "g={g}: EMk {}/10, ESk {}/10, fuzzy merge {}/10, fuzzy split {}/10",
            hits[0], hits[1], hits[2], hits[3]
        ));
    }
    verdict(8, pass, &parts.join("; "));
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_09_complexity_probe() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let spec = ConcentricSpec::default();
    let by_n = scaling_probe(&spec, &[1000, 2000, 4000], 5).unwrap();
    let slope = by_n.slope.unwrap();
    let by_c = c_scaling_probe(&spec, 1000, &[100, 200]).unwrap();
    let factor = by_c.rows[1].seconds / by_c.rows[0].seconds;
    let small = c_scaling_probe(&spec, 1000, &[5, 10]).unwrap();
    let small_factor = small.rows[1].seconds / small.rows[0].seconds;
    let pass = (0.8..=1.3).contains(&slope) && (3.0..=5.0).contains(&factor);
    let times: Vec<String> = by_n.rows.iter().map(|r| format!("N={} {:.2}us", r.size, r.seconds * 1e6)).collect();
    verdict(
        9,
        pass,
        &format!(
            "N-slope {slope:.3} ({}) ; c 100->200 at N=1000 factor {factor:.2} ({:.1}us -> {:.1}us); \
             c 5->10 factor {small_factor:.2} (informational)",
            times.join(", "),
            by_c.rows[0].seconds * 1e6,
            by_c.rows[1].seconds * 1e6
        ),
    );
}

// ---------------------------------------------------------------- 10

#[test]
fn criterion_10_determinism() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut pass = true;
    let mut parts = Vec::new();
    let concentric = generate_concentric(&ConcentricSpec::default().resized(400)).unwrap();
    for ds in [Dataset::iris(), Dataset::wine(), Dataset::diabetes(), concentric] {
        for algo in [Algorithm::Emk, Algorithm::Esk] {
            let cfg = BenchConfig {
                auto: auto(42),
                include_timings: false,
            };
            let a = emit_report(&run_benchmark(&ds, algo, &cfg).unwrap(), ReportFormat::Json).unwrap();
            let b = emit_report(&run_benchmark(&ds, algo, &cfg).unwrap(), ReportFormat::Json).unwrap();
            let same = a == b;
            pass &= same;
            parts.push(format!("{} {}: {}", ds.name(), algo.name(), if same { "identical" } else { "DIFFERENT" }));
        }
    }
    let ds = Dataset::iris();
    let direct = serde_json::to_string(&emk_means(&ds, &auto(7)).unwrap()).unwrap();
    let again = serde_json::to_string(&emk_means(&ds, &auto(7)).unwrap()).unwrap();
    pass &= direct == again;
    verdict(10, pass, &format!("repeated JSON reports: {}", parts.join(", ")));
}
