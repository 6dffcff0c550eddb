//! Runs one configured experiment and writes `<name>.csv` plus
//! `<name>.manifest.txt` into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gromov_core::geodesy::{family_deviation, CurveFamily, DeviationMode};
use gromov_core::io::{format_real, parse_matrix};
use gromov_core::lattice::{ratio_series, witness_report, Rational};
use gromov_core::random::{perturbed, random_space, Lcg64};
use gromov_core::{from_reals, gh_exact, truncation_lower_series, FiniteMetricSpace, IsometryCheck, SolverOptions};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, CliResult};

pub const MAX_NODES_ENV: &str = "GROMOV_LAB_MAX_NODES";

/// Solver options with the node budget taken from `GROMOV_LAB_MAX_NODES` when set.
pub fn solver_options_from_env() -> CliResult<SolverOptions> {
    let mut opts = SolverOptions::default();
    if let Ok(v) = std::env::var(MAX_NODES_ENV) {
        opts.node_budget = v
            .trim()
            .parse()
            .map_err(|_| CliError::ConfigInvalid(MAX_NODES_ENV.into(), format!("not a count: {v:?}")))?;
    }
    Ok(opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub csv: String,
    /// Some solver call ran out of budget; its numbers are upper bounds.
    pub partial: bool,
    /// One-line `key=value` summary.
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub output: ExperimentOutput,
}

impl RunOutcome {
    /// 0 on success, 3 when the output is partial.
    pub fn exit_code(&self) -> i32 {
        if self.output.partial {
            3
        } else {
            0
        }
    }
}

/// Computes the report body without touching the filesystem.
pub fn compute(config: &ExperimentConfig) -> CliResult<ExperimentOutput> {
    let mut opts = solver_options_from_env()?;
    if config.get("max_nodes").is_some() {
        opts.node_budget = config.usize_or("max_nodes", 0)? as u64;
    }
    match config.kind {
        ExperimentKind::ScalingGeodesic => scaling_geodesic(config, &opts),
        ExperimentKind::ProductUpper => product_upper(config, &opts),
        ExperimentKind::TruncationLower => truncation_lower(config, &opts),
        ExperimentKind::LatticeRatio => lattice_ratio(config),
        ExperimentKind::LatticeWitness => lattice_witness(config),
        ExperimentKind::IsometryExample => isometry_example(config, &opts),
    }
}

/// Runs the experiment and writes the CSV and manifest atomically.
pub fn run_experiment(config: &ExperimentConfig) -> CliResult<RunOutcome> {
    let started = Instant::now();
    let output = compute(config)?;
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join(format!("{}.csv", config.name));
    let manifest_path = dir.join(format!("{}.manifest.txt", config.name));
    write_atomic(&csv_path, output.csv.as_bytes())?;
    let manifest = format!(
        "{}---\ntool = {} {}\ncsv = {}\nstatus = {}\nsummary = {}\nwall_time_s = {:.3}\n",
        config.echo(),
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        csv_path.display(),
        if output.partial { "partial" } else { "ok" },
        output.summary,
        started.elapsed().as_secs_f64()
    );
    write_atomic(&manifest_path, manifest.as_bytes())?;
    Ok(RunOutcome { csv_path, manifest_path, output })
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_space(path: &Path) -> CliResult<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path).map_err(|_| CliError::FileNotFound(path.to_path_buf()))?;
    Ok(parse_matrix(&text)?)
}

/// A space from a matrix file under `file_key`, else from a list of reals
/// under `points_key`, else `default`.
fn space_param(
    config: &ExperimentConfig,
    file_key: &str,
    points_key: &str,
    default: Option<FiniteMetricSpace>,
) -> CliResult<FiniteMetricSpace> {
    if let Some(path) = config.path(file_key) {
        return read_space(&path);
    }
    if config.get(points_key).is_some() {
        let pts = config.f64_list(points_key)?;
        return from_reals(&pts).map_err(|e| CliError::ConfigInvalid(points_key.into(), e.to_string()));
    }
    default.ok_or_else(|| CliError::ConfigInvalid(file_key.into(), "missing".into()))
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn scaling_geodesic(config: &ExperimentConfig, opts: &SolverOptions) -> CliResult<ExperimentOutput> {
    let ts = config.f64_list("ts")?;
    let x = match config.path("space") {
        Some(p) => read_space(&p)?,
        None => {
            let n = config.usize_or("points", 4)?;
            if n == 0 || n > 21 {
                return Err(CliError::ConfigInvalid("points".into(), "must be in 1..=21".into()));
            }
            random_space(&mut Lcg64::new(config.seed), n)
        }
    };
    let mode = match config.get("mode").unwrap_or("exact") {
        "exact" => DeviationMode::Exact,
        "sandwich" => DeviationMode::Sandwich,
        other => return Err(CliError::ConfigInvalid("mode".into(), format!("unknown mode {other:?}"))),
    };
    let report = family_deviation(&CurveFamily::Scale(x), &ts, mode, opts)?;
    Ok(ExperimentOutput {
        csv: report.to_csv(),
        partial: report.budget_exceeded,
        summary: format!(
            "max_deviation={} rows={} fell_back={}",
            format_real(report.max_deviation()),
            report.rows.len(),
            report.fell_back_to_sandwich
        ),
    })
}

fn product_upper(config: &ExperimentConfig, opts: &SolverOptions) -> CliResult<ExperimentOutput> {
    let trials = config.usize_or("trials", 50)?;
    let max_product = config.usize_or("max_product", 8)?;
    if max_product == 0 || max_product > opts.cap.max_side {
        return Err(CliError::ConfigInvalid("max_product".into(), format!("must be in 1..={}", opts.cap.max_side)));
    }
    // draw every instance first so the stream does not depend on scheduling
    let mut rng = Lcg64::new(config.seed);
    let instances: Vec<_> = (0..trials)
        .map(|_| {
            let na = rng.range(1, 2.min(max_product as u32)) as usize;
            let nb_max = (max_product / na) as u32;
            let a1 = random_space(&mut rng, na);
            let a2 = perturbed(&mut rng, &a1);
            let nb1 = rng.range(1, nb_max) as usize;
            let nb2 = rng.range(1, nb_max) as usize;
            let b1 = random_space(&mut rng, nb1);
            let b2 = random_space(&mut rng, nb2);
            (a1, a2, b1, b2)
        })
        .collect();
    let results = instances
        .par_iter()
        .map(|(a1, a2, b1, b2)| -> CliResult<_> {
            let lhs = gh_exact(&a1.l1_product(b1)?, &a2.l1_product(b2)?, opts)?;
            let ga = gh_exact(a1, a2, opts)?;
            let gb = gh_exact(b1, b2, opts)?;
            let partial = [&lhs, &ga, &gb].iter().any(|c| !c.lower_proof.is_optimal());
            Ok((a1.len(), b1.len(), b2.len(), lhs.value, ga.value, gb.value, partial))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut violations = 0;
    let mut partial = false;
    let rows: Vec<Vec<String>> = results
        .iter()
        .enumerate()
        .map(|(k, &(na, nb1, nb2, lhs, ga, gb, p))| {
            let ok = lhs <= ga + gb + gromov_core::EPS;
            violations += usize::from(!ok);
            partial |= p;
            vec![
                k.to_string(),
                na.to_string(),
                nb1.to_string(),
                nb2.to_string(),
                format_real(lhs),
                format_real(ga),
                format_real(gb),
                format_real(ga + gb),
                ok.to_string(),
            ]
        })
        .collect();
    let csv = csv_string(&["trial", "n_a", "n_b1", "n_b2", "gh_product", "gh_a", "gh_b", "upper", "ok"], &rows)?;
    Ok(ExperimentOutput { csv, partial, summary: format!("trials={trials} violations={violations}") })
}

fn truncation_lower(config: &ExperimentConfig, opts: &SolverOptions) -> CliResult<ExperimentOutput> {
    let gap = config.f64_or("gap", 1000.0)?;
    let ks = config.usize_list("ks")?;
    let x = space_param(config, "x", "x_points", Some(from_reals(&[0.0, 1.0])?))?;
    let y = space_param(config, "y", "y_points", Some(FiniteMetricSpace::point()))?;
    let rows = truncation_lower_series(gap, &ks, &x, &y, opts)?;
    let bound = (x.diameter() - y.diameter()) / 2.0;
    let partial = rows.iter().any(|r| !r.certificate.lower_proof.is_optimal());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                format_real(r.certificate.value),
                r.certificate.lower_proof.tag().to_string(),
                r.certificate.nodes_explored.to_string(),
                format_real(bound),
                format_real(r.upper),
            ]
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].certificate.value >= w[0].certificate.value - gromov_core::EPS);
    let csv = csv_string(&["k", "value", "lower_proof", "nodes_explored", "diameter_bound", "upper"], &body)?;
    Ok(ExperimentOutput { csv, partial, summary: format!("rows={} monotone={monotone}", rows.len()) })
}

fn lattice_ratio(config: &ExperimentConfig) -> CliResult<ExperimentOutput> {
    let n = config.usize_or("n", 0)?;
    let lambda = config.rational("lambda")?;
    let c = config.rational_or("c", Rational::from_integer(0))?;
    let ts = config.rational_list("ts")?;
    let report = ratio_series(n, lambda, c, &ts)?;
    let last = report.rows.last().and_then(|r| r.ratio).map(format_real).unwrap_or_default();
    Ok(ExperimentOutput { csv: report.to_csv(), partial: false, summary: format!("last_ratio={last}") })
}

fn lattice_witness(config: &ExperimentConfig) -> CliResult<ExperimentOutput> {
    let n = config.usize_or("n", 0)?;
    let lambda = config.rational("lambda")?;
    let c = config.rational_or("c", Rational::from_integer(0))?;
    let grid = config.rational_list("grid")?;
    let report = witness_report(n, lambda, c, &grid)?;
    let w = report
        .witness_t
        .map(|t| format_real(gromov_core::lattice::to_f64(&t)))
        .unwrap_or_else(|| "none".into());
    Ok(ExperimentOutput { csv: report.to_csv(), partial: false, summary: format!("witness_t={w}") })
}

/// `P = (L + c) ×ℓ¹ I` against `Q = L ×ℓ¹ (I + c)` under the identity pairing,
/// where `L`, `I` are finite subsets of the line.
fn isometry_example(config: &ExperimentConfig, opts: &SolverOptions) -> CliResult<ExperimentOutput> {
    let c = config.f64_or("c", 1.0)?;
    let line = space_param(config, "line", "line_points", Some(from_reals(&[0.0, 1.0, 2.0])?))?;
    let interval = space_param(config, "interval", "interval_points", Some(from_reals(&[0.0, 1.0])?))?;
    let p = line.add_constant(c)?.l1_product(&interval)?;
    let q = line.l1_product(&interval.add_constant(c)?)?;
    let check = p.check_identity_isometry(&q)?;
    let gh = if opts.cap.check(p.len(), q.len()).is_ok() {
        Some(gh_exact(&p, &q, opts)?)
    } else {
        None
    };
    let (i, j, dp, dq) = match check {
        IsometryCheck::Isometric => (String::new(), String::new(), String::new(), String::new()),
        IsometryCheck::Violation { i, j, lhs, rhs } => (i.to_string(), j.to_string(), format_real(lhs), format_real(rhs)),
    };
    let row = vec![
        check.is_isometric().to_string(),
        i,
        j,
        dp,
        dq,
        gh.as_ref().map(|g| format_real(g.value)).unwrap_or_default(),
    ];
    let csv = csv_string(&["identity_isometric", "i", "j", "d_p", "d_q", "gh_exact"], &[row])?;
    let partial = gh.as_ref().is_some_and(|g| !g.lower_proof.is_optimal());
    Ok(ExperimentOutput {
        csv,
        partial,
        summary: format!("identity_isometric={} points={}", check.is_isometric(), p.len()),
    })
}
