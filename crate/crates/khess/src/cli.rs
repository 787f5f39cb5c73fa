//! Command-line driver: wires JSON/flag configs to solver runs, inequality
//! suites, estimate scans, and rigidity experiments, and emits deterministic
//! JSON reports plus plot-ready CSV tables with sidecar schemas.
//!
//! Exit codes: 0 all-pass, 1 property failure, 2 solver nonconvergence,
//! 64 config/usage error, 74 I/O error.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::{
    refinement_scan, run_quotient_ratio_suite, run_quotient_weighted_suite,
    run_restricted_newton_suite, run_shifted_dominance_suite, EstimateReport, QuantityTag,
    RefinementProblem, ScanGeometry, SuiteReport,
};
use crate::report::{fmt_f64, write_csv_with_schema, write_json, ColumnSpec, CsvTable};
use crate::rigidity::{
    growth_certificate, rigidity_experiment, CandidateConfig, EntireCandidate, ExperimentOptions,
    RigidityTrace,
};
use crate::solver::{
    solve_dirichlet_with, DirichletProblem, DomainShape, GridDomain, RadialProfile, RhsConfig,
    SolveReport, SolverOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Boundary data for `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryConfig {
    Zero,
    /// g(x) = coefficient |x|^2
    IsotropicQuadratic { coefficient: f64 },
}

impl BoundaryConfig {
    fn build(&self) -> Box<dyn Fn(&[f64]) -> f64 + Send + Sync> {
        match *self {
            BoundaryConfig::Zero => Box::new(|_| 0.0),
            BoundaryConfig::IsotropicQuadratic { coefficient } => {
                Box::new(move |x| coefficient * x.iter().map(|v| v * v).sum::<f64>())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    pub dim: usize,
    pub k: usize,
    pub low: f64,
    pub high: f64,
    pub resolution: usize,
    pub rhs: RhsConfig,
    pub boundary: BoundaryConfig,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyLemmasParams {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub samples: usize,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PogorelovParams {
    pub dim: usize,
    pub k: usize,
    pub quantity: String, // "pogorelov" | "depth-laplacian"
    pub geometry: ScanGeometry,
    pub rhs: RhsConfig,
    pub levels: Vec<usize>,
    pub betas: Vec<f64>,
    pub eps: f64,
    pub a: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityParams {
    pub candidate: CandidateConfig,
    pub n: usize,
    pub k: usize,
    pub schedule: Vec<f64>,
    pub resolution: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRadialParams {
    pub n: usize,
    pub k: usize,
    pub f: f64,
    pub radius: f64,
    pub mesh: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Solve(SolveParams),
    VerifyLemmas(VerifyLemmasParams),
    Pogorelov(PogorelovParams),
    Rigidity(RigidityParams),
    OracleRadial(OracleRadialParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::VerifyLemmas(_) => "verify-lemmas",
            Command::Pogorelov(_) => "pogorelov",
            Command::Rigidity(_) => "rigidity",
            Command::OracleRadial(_) => "oracle-radial",
        }
    }
}

/// A full run description; identical (config, seed) pairs produce
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    #[serde(flatten)]
    pub command: Command,
}

/// Validates the configuration before anything is written.
pub fn validate(config: &RunConfig) -> Result<()> {
    let usage = |msg: String| Err(Error::Domain(msg));
    match &config.command {
        Command::Solve(p) => {
            if !(2..=3).contains(&p.dim) {
                return usage(format!("dim must be 2 or 3, got {}", p.dim));
            }
            if p.k == 0 || p.k > p.dim {
                return usage(format!("k must satisfy 1 <= k <= dim, got {}", p.k));
            }
            if !(p.tol > 0.0) {
                return usage(format!("tol must be positive, got {}", p.tol));
            }
            if p.resolution < 5 {
                return usage(format!("resolution must be >= 5, got {}", p.resolution));
            }
            if !(p.high > p.low) {
                return usage("domain box must have positive extent".to_string());
            }
            p.rhs.build()?;
        }
        Command::VerifyLemmas(p) => {
            if !(2..=6).contains(&p.n) {
                return usage(format!("n must lie in 2..=6, got {}", p.n));
            }
            if p.l == 0 || p.l >= p.k || p.k > p.n {
                return usage(format!(
                    "need 1 <= l < k <= n, got k = {}, l = {}, n = {}",
                    p.k, p.l, p.n
                ));
            }
            if p.samples == 0 {
                return usage("samples must be positive".to_string());
            }
            if p.deltas.is_empty() || p.deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
                return usage(format!("deltas must lie in (0, 1), got {:?}", p.deltas));
            }
        }
        Command::Pogorelov(p) => {
            if !(2..=3).contains(&p.dim) {
                return usage(format!("dim must be 2 or 3, got {}", p.dim));
            }
            if p.k == 0 || p.k > p.dim {
                return usage(format!("k must satisfy 1 <= k <= dim, got {}", p.k));
            }
            if p.levels.len() < 2 || p.levels.windows(2).any(|w| w[0] >= w[1]) {
                return usage(format!(
                    "levels must be at least two increasing resolutions, got {:?}",
                    p.levels
                ));
            }
            match p.quantity.as_str() {
                "pogorelov" => {
                    if p.betas.is_empty() || p.betas.iter().any(|b| !(*b >= 0.0)) {
                        return usage(format!(
                            "betas must be nonnegative and nonempty, got {:?}",
                            p.betas
                        ));
                    }
                }
                "depth-laplacian" => {}
                other => return usage(format!("unknown quantity {other}")),
            }
            if !(p.tol > 0.0) {
                return usage(format!("tol must be positive, got {}", p.tol));
            }
            p.rhs.build()?;
        }
        Command::Rigidity(p) => {
            if !(2..=3).contains(&p.n) {
                return usage(format!("n must be 2 or 3, got {}", p.n));
            }
            if p.k == 0 || p.k > p.n {
                return usage(format!("k must satisfy 1 <= k <= n, got {}", p.k));
            }
            if p.schedule.len() < 2 || p.schedule.windows(2).any(|w| w[0] >= w[1]) {
                return usage(format!(
                    "schedule must be at least two increasing radii, got {:?}",
                    p.schedule
                ));
            }
            if p.resolution < 9 {
                return usage(format!("resolution must be >= 9, got {}", p.resolution));
            }
            if !(p.beta >= 0.0) {
                return usage(format!("beta must be nonnegative, got {}", p.beta));
            }
            EntireCandidate::from_config(&p.candidate)?;
        }
        Command::OracleRadial(p) => {
            if p.n < 2 || p.n > 6 || p.k == 0 || p.k > p.n {
                return usage(format!(
                    "need 2 <= n and 1 <= k <= n, got n = {}, k = {}",
                    p.n, p.k
                ));
            }
            if !(p.f > 0.0) || !(p.radius > 0.0) || p.mesh < 4 {
                return usage(format!(
                    "need positive f and radius and mesh >= 4, got f = {}, radius = {}, mesh = {}",
                    p.f, p.radius, p.mesh
                ));
            }
        }
    }
    Ok(())
}

fn stem(config: &RunConfig, suffix: Option<&str>) -> PathBuf {
    let base = match suffix {
        Some(s) => format!("{}-{}-{}", config.command.name(), config.seed, s),
        None => format!("{}-{}", config.command.name(), config.seed),
    };
    config.out_dir.join(base)
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SolveRunReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a SolveParams,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
    report: SolveReport,
    field_file: Option<String>,
    min_eigenvalue: Option<f64>,
}

fn run_solve(config: &RunConfig, params: &SolveParams) -> Result<i32> {
    let domain = GridDomain::new(
        &vec![params.low; params.dim],
        &vec![params.high; params.dim],
        params.resolution,
    )?;
    let problem = DirichletProblem {
        domain,
        shape: DomainShape::Full,
        k: params.k,
        rhs: params.rhs.build()?,
        boundary: params.boundary.build(),
    };
    let opts = SolverOptions {
        tol: params.tol,
        max_iter: params.max_iter,
        ..SolverOptions::default()
    };
    let (converged, failure, field, report) = match solve_dirichlet_with(&problem, &opts) {
        Ok((u, report)) => (true, None, Some(u), report),
        Err(Error::NonConvergence { report }) => {
            (false, Some("nonconvergence".to_string()), None, report)
        }
        Err(Error::ConeViolation { report, .. }) => {
            (false, Some("cone violation".to_string()), None, report)
        }
        Err(e) => return Err(e),
    };

    let field_file = match &field {
        Some(u) => {
            let path = stem(config, None).with_extension("field");
            u.write_path(&path)?;
            Some(path.file_name().unwrap().to_string_lossy().into_owned())
        }
        None => None,
    };
    let min_eigenvalue = match &field {
        Some(u) => Some(crate::solver::min_hessian_eigenvalue(u, &problem.shape)?),
        None => None,
    };

    let mut table = CsvTable::new(vec![
        ColumnSpec::new("iteration", "Newton iteration index (1-based)"),
        ColumnSpec::new("damping", "accepted step fraction"),
        ColumnSpec::new("cone_deficit", "worst closed-cone deficit after the step"),
    ]);
    for (i, t) in report.damping_history.iter().enumerate() {
        let deficit = report
            .cone_deficit_history
            .get(i + 1)
            .copied()
            .unwrap_or(f64::NAN);
        table.push_row(vec![
            (i + 1).to_string(),
            fmt_f64(*t),
            fmt_f64(deficit),
        ]);
    }
    write_csv_with_schema(&stem(config, None), &table)?;

    write_json(
        &stem(config, None).with_extension("json"),
        &SolveRunReport {
            command: "solve",
            seed: config.seed,
            config: params,
            converged,
            failure,
            report,
            field_file,
            min_eigenvalue,
        },
    )?;
    Ok(if converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

#[derive(Serialize)]
struct VerifyRunReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a VerifyLemmasParams,
    suites: Vec<SuiteReport>,
    pass: bool,
}

fn run_verify(config: &RunConfig, params: &VerifyLemmasParams) -> Result<i32> {
    let seed = config.seed;
    let suites = vec![
        run_quotient_ratio_suite(params.n, params.k, params.l, params.samples, seed)?,
        run_quotient_weighted_suite(
            params.n,
            params.k,
            params.l,
            params.samples,
            seed,
            &params.deltas,
        )?,
        run_shifted_dominance_suite(params.n, params.k, params.samples, seed)?,
        run_restricted_newton_suite(params.n, (params.k + 1).min(params.n), params.samples, seed)?,
    ];
    let pass = suites.iter().all(|s| s.passed);

    let mut table = CsvTable::new(vec![
        ColumnSpec::new("suite", "suite name"),
        ColumnSpec::new("samples", "number of random samples"),
        ColumnSpec::new("violations", "failing witnesses"),
        ColumnSpec::new("observations", "non-failing threshold observations"),
        ColumnSpec::new("min_scaled_gap", "smallest gap/scale seen"),
        ColumnSpec::new("passed", "true when no violations"),
    ]);
    for s in &suites {
        table.push_row(vec![
            s.name.clone(),
            s.samples.to_string(),
            s.violations.len().to_string(),
            s.observations.len().to_string(),
            fmt_f64(s.min_scaled_gap),
            s.passed.to_string(),
        ]);
    }
    write_csv_with_schema(&stem(config, None), &table)?;
    write_json(
        &stem(config, None).with_extension("json"),
        &VerifyRunReport {
            command: "verify-lemmas",
            seed,
            config: params,
            suites,
            pass,
        },
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_PROPERTY_FAILURE })
}

#[derive(Serialize)]
struct PogorelovRunReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a PogorelovParams,
    reports: Vec<EstimateReport>,
    pass: bool,
}

fn run_pogorelov(config: &RunConfig, params: &PogorelovParams) -> Result<i32> {
    let problem = RefinementProblem {
        dim: params.dim,
        k: params.k,
        low: if matches!(params.geometry, ScanGeometry::Ball { .. }) {
            -1.0
        } else {
            0.0
        },
        high: 1.0,
        geometry: params.geometry.clone(),
        rhs: params.rhs.clone(),
        tol: params.tol,
        max_iter: 80,
    };
    let quantities: Vec<QuantityTag> = match params.quantity.as_str() {
        "depth-laplacian" => vec![QuantityTag::DepthLaplacian],
        _ => params
            .betas
            .iter()
            .map(|&beta| QuantityTag::Pogorelov {
                beta,
                eps: params.eps,
                a: params.a,
            })
            .collect(),
    };
    let reports: Vec<EstimateReport> = quantities
        .iter()
        .map(|q| refinement_scan(&problem, q, &params.levels))
        .collect();
    let pass = reports.iter().all(|r| r.verdict);
    let solver_failed = reports
        .iter()
        .any(|r| r.levels.iter().any(|l| l.flag.is_some()));

    let mut table = CsvTable::new(vec![
        ColumnSpec::new("quantity", "quantity label"),
        ColumnSpec::new("resolution", "nodes per axis"),
        ColumnSpec::new("max", "grid max of the quantity (empty when failed)"),
        ColumnSpec::new("argmax", "position of the max, coordinates joined by ;"),
        ColumnSpec::new("flag", "failure description (empty when clean)"),
    ]);
    for r in &reports {
        for l in &r.levels {
            table.push_row(vec![
                r.quantity.clone(),
                l.resolution.to_string(),
                l.max.map(fmt_f64).unwrap_or_default(),
                l.argmax
                    .iter()
                    .map(|v| fmt_f64(*v))
                    .collect::<Vec<_>>()
                    .join(";"),
                l.flag.clone().unwrap_or_default(),
            ]);
        }
    }
    write_csv_with_schema(&stem(config, None), &table)?;
    write_json(
        &stem(config, None).with_extension("json"),
        &PogorelovRunReport {
            command: "pogorelov",
            seed: config.seed,
            config: params,
            reports,
            pass,
        },
    )?;
    Ok(if solver_failed {
        EXIT_NONCONVERGENCE
    } else if pass {
        EXIT_OK
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

#[derive(Serialize)]
struct RigidityRunReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a RigidityParams,
    growth_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth_witness: Option<(Vec<f64>, f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<RigidityTrace>,
    pass: bool,
}

fn run_rigidity(config: &RunConfig, params: &RigidityParams) -> Result<i32> {
    let candidate = EntireCandidate::from_config(&params.candidate)?;
    let radii: Vec<f64> = params.schedule.clone();
    let (certified, witness) = growth_certificate(
        &candidate,
        candidate.growth_c,
        candidate.growth_b,
        &radii,
        params.n,
    );
    if !certified {
        write_json(
            &stem(config, None).with_extension("json"),
            &RigidityRunReport {
                command: "rigidity",
                seed: config.seed,
                config: params,
                growth_certified: false,
                growth_witness: witness,
                trace: None,
                pass: false,
            },
        )?;
        return Ok(EXIT_PROPERTY_FAILURE);
    }

    let opts = ExperimentOptions {
        resolution: params.resolution,
        beta: params.beta,
        ..Default::default()
    };
    let trace = rigidity_experiment(&candidate, params.n, params.k, &params.schedule, &opts)?;
    let complete = trace.flags.iter().all(|f| f.is_none());

    let mut table = CsvTable::new(vec![
        ColumnSpec::new("R", "rescaling radius"),
        ColumnSpec::new("sup_lap", "sup |laplacian| over the inner region"),
        ColumnSpec::new("osc", "entrywise Hessian oscillation over the inner region"),
        ColumnSpec::new(
            "exponent_so_far",
            "least-squares decay exponent using radii up to this row (empty until two fitted points)",
        ),
        ColumnSpec::new("flag", "failure description (empty when clean)"),
    ]);
    for (i, r) in trace.r_values.iter().enumerate() {
        table.push_row(vec![
            fmt_f64(*r),
            trace.sup_lap.get(i).copied().map(fmt_f64).unwrap_or_default(),
            trace.osc.get(i).copied().map(fmt_f64).unwrap_or_default(),
            trace
                .exponent_so_far
                .get(i)
                .copied()
                .flatten()
                .map(fmt_f64)
                .unwrap_or_default(),
            trace
                .flags
                .get(i)
                .cloned()
                .flatten()
                .unwrap_or_default(),
        ]);
    }
    write_csv_with_schema(&stem(config, None), &table)?;
    write_json(
        &stem(config, None).with_extension("json"),
        &RigidityRunReport {
            command: "rigidity",
            seed: config.seed,
            config: params,
            growth_certified: true,
            growth_witness: None,
            trace: Some(trace),
            pass: complete,
        },
    )?;
    Ok(if complete { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

#[derive(Serialize)]
struct RadialRunReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a OracleRadialParams,
    fitted_coefficient: f64,
    exact_coefficient: f64,
    relative_error: f64,
    pass: bool,
}

fn run_oracle_radial(config: &RunConfig, params: &OracleRadialParams) -> Result<i32> {
    let profile = crate::solver::solve_radial(
        params.radius,
        params.n,
        params.k,
        params.f,
        params.mesh,
    )?;
    let fitted = profile.fitted_quadratic_coefficient();
    let exact = RadialProfile::exact_quadratic_coefficient(params.n, params.k, params.f);
    let relative_error = (fitted - exact).abs() / exact.abs();
    let pass = relative_error <= 1e-10;

    let mut table = CsvTable::new(vec![
        ColumnSpec::new("r", "radius sample"),
        ColumnSpec::new("u", "profile value"),
        ColumnSpec::new("du", "profile derivative"),
    ]);
    for i in 0..profile.rs.len() {
        table.push_row(vec![
            fmt_f64(profile.rs[i]),
            fmt_f64(profile.us[i]),
            fmt_f64(profile.dus[i]),
        ]);
    }
    write_csv_with_schema(&stem(config, None), &table)?;
    write_json(
        &stem(config, None).with_extension("json"),
        &RadialRunReport {
            command: "oracle-radial",
            seed: config.seed,
            config: params,
            fitted_coefficient: fitted,
            exact_coefficient: exact,
            relative_error,
            pass,
        },
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_PROPERTY_FAILURE })
}

/// Validates the config, prepares the output directory, executes the mapped
/// pipeline, and returns the exit status.
pub fn run(config: &RunConfig) -> Result<i32> {
    validate(config)?;
    std::fs::create_dir_all(&config.out_dir)?;
    probe_writable(&config.out_dir)?;
    match &config.command {
        Command::Solve(p) => run_solve(config, p),
        Command::VerifyLemmas(p) => run_verify(config, p),
        Command::Pogorelov(p) => run_pogorelov(config, p),
        Command::Rigidity(p) => run_rigidity(config, p),
        Command::OracleRadial(p) => run_oracle_radial(config, p),
    }
}

fn probe_writable(dir: &Path) -> Result<()> {
    let probe = dir.join(".khess-write-probe");
    std::fs::write(&probe, b"")?;
    std::fs::remove_file(&probe)?;
    Ok(())
}

/// Maps an error from [`run`] to the exit-code contract.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        Error::NonConvergence { .. } | Error::ConeViolation { .. } | Error::LinearSolve(_) => {
            EXIT_NONCONVERGENCE
        }
        _ => EXIT_USAGE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(command: Command, out: &Path) -> RunConfig {
        RunConfig {
            seed: 7,
            out_dir: out.to_path_buf(),
            command,
        }
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let dir = tempfile::tempdir().unwrap();
        let bad = base_config(
            Command::VerifyLemmas(VerifyLemmasParams {
                n: 3,
                k: 2,
                l: 2,
                samples: 10,
                deltas: vec![0.1],
            }),
            dir.path(),
        );
        assert!(validate(&bad).is_err());
        // No files written on validation failure.
        assert!(run(&bad).is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn oracle_radial_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let config = base_config(
            Command::OracleRadial(OracleRadialParams {
                n: 3,
                k: 2,
                f: 1.0,
                radius: 1.0,
                mesh: 64,
            }),
            dir.path(),
        );
        let code = run(&config).unwrap();
        assert_eq!(code, EXIT_OK);
        let json = std::fs::read_to_string(dir.path().join("oracle-radial-7.json")).unwrap();
        assert!(json.contains("\"pass\": true"));
        assert!(dir.path().join("oracle-radial-7.csv").exists());
        assert!(dir.path().join("oracle-radial-7.csv.schema.json").exists());
    }

    #[test]
    fn verify_lemmas_small_run_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = base_config(
            Command::VerifyLemmas(VerifyLemmasParams {
                n: 3,
                k: 2,
                l: 1,
                samples: 50,
                deltas: vec![0.1, 0.01],
            }),
            dir.path(),
        );
        assert_eq!(run(&config).unwrap(), EXIT_OK);
        let first = std::fs::read(dir.path().join("verify-lemmas-7.json")).unwrap();
        let first_csv = std::fs::read(dir.path().join("verify-lemmas-7.csv")).unwrap();
        assert_eq!(run(&config).unwrap(), EXIT_OK);
        assert_eq!(
            first,
            std::fs::read(dir.path().join("verify-lemmas-7.json")).unwrap()
        );
        assert_eq!(
            first_csv,
            std::fs::read(dir.path().join("verify-lemmas-7.csv")).unwrap()
        );
    }
}
