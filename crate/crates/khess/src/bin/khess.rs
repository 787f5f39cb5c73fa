//! khess command-line driver.
//!
//! Every run takes a seed and an output directory and writes
//! `{command}-{seed}.json` plus CSV tables with sidecar schemas. A JSON
//! config file may supply the parameters; explicitly passed flags win over
//! file values. `KHESS_THREADS` caps worker parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use khess::cli::{
    self, BoundaryConfig, Command, OracleRadialParams, PogorelovParams, RigidityParams,
    RunConfig, SolveParams, VerifyLemmasParams,
};
use khess::estimates::ScanGeometry;
use khess::rigidity::CandidateConfig;
use khess::solver::RhsConfig;

#[derive(Parser)]
#[command(name = "khess", version, about = "k-Hessian equation laboratory")]
struct CliArgs {
    /// Seed for all randomness; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for reports.
    #[arg(long, global = true, default_value = "khess-out")]
    out: PathBuf,
    /// JSON file with the command parameters; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args, Clone, Default)]
struct RhsFlags {
    /// Right-hand side kind: constant | sin-product.
    #[arg(long)]
    f_kind: Option<String>,
    /// Constant value for --f-kind constant (or the base of sin-product).
    #[arg(long)]
    f: Option<f64>,
    /// Amplitude for --f-kind sin-product.
    #[arg(long)]
    f_amplitude: Option<f64>,
}

impl RhsFlags {
    fn apply(&self, rhs: &mut RhsConfig) -> Result<(), String> {
        if let Some(kind) = &self.f_kind {
            *rhs = match kind.as_str() {
                "constant" => RhsConfig::Constant {
                    value: self.f.unwrap_or(1.0),
                },
                "sin-product" => RhsConfig::SinProduct {
                    base: self.f.unwrap_or(1.0),
                    amplitude: self.f_amplitude.unwrap_or(0.5),
                },
                other => return Err(format!("unknown rhs kind {other}")),
            };
            return Ok(());
        }
        if let Some(v) = self.f {
            match rhs {
                RhsConfig::Constant { value } => *value = v,
                RhsConfig::SinProduct { base, .. } => *base = v,
            }
        }
        if let Some(a) = self.f_amplitude {
            if let RhsConfig::SinProduct { amplitude, .. } = rhs {
                *amplitude = a;
            }
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum CliCommand {
    /// Solve one Dirichlet problem and dump the field.
    Solve {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        low: Option<f64>,
        #[arg(long)]
        high: Option<f64>,
        #[arg(long)]
        res: Option<usize>,
        #[command(flatten)]
        rhs: RhsFlags,
        /// Boundary data: zero | quadratic.
        #[arg(long)]
        boundary: Option<String>,
        /// Coefficient of g(x) = coefficient |x|^2 for --boundary quadratic.
        #[arg(long)]
        boundary_coefficient: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Run the randomized inequality suites.
    VerifyLemmas {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated weighted-form deltas.
        #[arg(long)]
        deltas: Option<String>,
    },
    /// Mesh-refinement scans of estimate quantities.
    Pogorelov {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Quantity: pogorelov | depth-laplacian.
        #[arg(long)]
        quantity: Option<String>,
        /// Geometry: box | ball.
        #[arg(long)]
        geometry: Option<String>,
        #[command(flatten)]
        rhs: RhsFlags,
        /// Comma-separated mesh levels (nodes per axis).
        #[arg(long)]
        levels: Option<String>,
        /// Comma-separated depth exponents for the pogorelov quantity.
        #[arg(long)]
        betas: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Rescaling experiment on an entire-solution candidate.
    Rigidity {
        /// Candidate: quadratic | perturbed-quadratic.
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long)]
        coefficient: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated increasing rescaling radii.
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Radial ODE oracle on a ball.
    OracleRadial {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        f: Option<f64>,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long)]
        mesh: Option<usize>,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|w| w.trim().parse::<T>().map_err(|e| format!("bad list item {w}: {e}")))
        .collect()
}

fn load_config_params<T: serde::de::DeserializeOwned>(
    path: &Option<PathBuf>,
) -> Result<Option<T>, String> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| format!("cannot parse config {}: {e}", p.display()))
        }
    }
}

fn build_command(args: &CliArgs) -> Result<Command, String> {
    match &args.command {
        CliCommand::Solve {
            dim,
            k,
            low,
            high,
            res,
            rhs,
            boundary,
            boundary_coefficient,
            tol,
            max_iter,
        } => {
            let mut p: SolveParams = load_config_params(&args.config)?.unwrap_or(SolveParams {
                dim: 2,
                k: 2,
                low: 0.0,
                high: 1.0,
                resolution: 65,
                rhs: RhsConfig::Constant { value: 1.0 },
                boundary: BoundaryConfig::Zero,
                tol: 1e-10,
                max_iter: 60,
            });
            if let Some(v) = dim {
                p.dim = *v;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if let Some(v) = low {
                p.low = *v;
            }
            if let Some(v) = high {
                p.high = *v;
            }
            if let Some(v) = res {
                p.resolution = *v;
            }
            rhs.apply(&mut p.rhs)?;
            if let Some(b) = boundary {
                p.boundary = match b.as_str() {
                    "zero" => BoundaryConfig::Zero,
                    "quadratic" => BoundaryConfig::IsotropicQuadratic {
                        coefficient: boundary_coefficient.unwrap_or(0.5),
                    },
                    other => return Err(format!("unknown boundary kind {other}")),
                };
            } else if let Some(c) = boundary_coefficient {
                p.boundary = BoundaryConfig::IsotropicQuadratic { coefficient: *c };
            }
            if let Some(v) = tol {
                p.tol = *v;
            }
            if let Some(v) = max_iter {
                p.max_iter = *v;
            }
            Ok(Command::Solve(p))
        }
        CliCommand::VerifyLemmas {
            n,
            k,
            l,
            samples,
            deltas,
        } => {
            let mut p: VerifyLemmasParams =
                load_config_params(&args.config)?.unwrap_or(VerifyLemmasParams {
                    n: 3,
                    k: 2,
                    l: 1,
                    samples: 10_000,
                    deltas: vec![0.1, 0.01],
                });
            if let Some(v) = n {
                p.n = *v;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if let Some(v) = l {
                p.l = *v;
            }
            if let Some(v) = samples {
                p.samples = *v;
            }
            if let Some(v) = deltas {
                p.deltas = parse_list(v)?;
            }
            Ok(Command::VerifyLemmas(p))
        }
        CliCommand::Pogorelov {
            dim,
            k,
            quantity,
            geometry,
            rhs,
            levels,
            betas,
            eps,
            a,
            tol,
        } => {
            let mut p: PogorelovParams =
                load_config_params(&args.config)?.unwrap_or(PogorelovParams {
                    dim: 2,
                    k: 2,
                    quantity: "pogorelov".to_string(),
                    geometry: ScanGeometry::Box,
                    rhs: RhsConfig::Constant { value: 1.0 },
                    levels: vec![33, 65, 129, 257],
                    betas: vec![1.0, 2.0, 4.0, 8.0],
                    eps: 0.05,
                    a: 0.25,
                    tol: 1e-10,
                });
            if let Some(v) = dim {
                p.dim = *v;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if let Some(v) = quantity {
                p.quantity = v.clone();
            }
            if let Some(g) = geometry {
                p.geometry = match g.as_str() {
                    "box" => ScanGeometry::Box,
                    "ball" => ScanGeometry::Ball { radius: 1.0 },
                    other => return Err(format!("unknown geometry {other}")),
                };
            }
            rhs.apply(&mut p.rhs)?;
            if let Some(v) = levels {
                p.levels = parse_list(v)?;
            }
            if let Some(v) = betas {
                p.betas = parse_list(v)?;
            }
            if let Some(v) = eps {
                p.eps = *v;
            }
            if let Some(v) = a {
                p.a = *v;
            }
            if let Some(v) = tol {
                p.tol = *v;
            }
            Ok(Command::Pogorelov(p))
        }
        CliCommand::Rigidity {
            candidate,
            coefficient,
            amplitude,
            n,
            k,
            schedule,
            res,
            beta,
        } => {
            let mut p: RigidityParams =
                load_config_params(&args.config)?.unwrap_or(RigidityParams {
                    candidate: CandidateConfig::Quadratic { coefficient: 1.0 },
                    n: 2,
                    k: 2,
                    schedule: vec![2.0, 4.0, 8.0, 16.0],
                    resolution: 97,
                    beta: 1.0,
                });
            if let Some(c) = candidate {
                let coef = coefficient.unwrap_or(1.0);
                p.candidate = match c.as_str() {
                    "quadratic" => CandidateConfig::Quadratic { coefficient: coef },
                    "perturbed-quadratic" => CandidateConfig::PerturbedQuadratic {
                        coefficient: coef,
                        amplitude: amplitude.unwrap_or(0.1),
                    },
                    other => return Err(format!("unknown candidate kind {other}")),
                };
            }
            if let Some(v) = n {
                p.n = *v;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if let Some(v) = schedule {
                p.schedule = parse_list(v)?;
            }
            if let Some(v) = res {
                p.resolution = *v;
            }
            if let Some(v) = beta {
                p.beta = *v;
            }
            Ok(Command::Rigidity(p))
        }
        CliCommand::OracleRadial {
            n,
            k,
            f,
            radius,
            mesh,
        } => {
            let mut p: OracleRadialParams =
                load_config_params(&args.config)?.unwrap_or(OracleRadialParams {
                    n: 3,
                    k: 2,
                    f: 1.0,
                    radius: 1.0,
                    mesh: 256,
                });
            if let Some(v) = n {
                p.n = *v;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if let Some(v) = f {
                p.f = *v;
            }
            if let Some(v) = radius {
                p.radius = *v;
            }
            if let Some(v) = mesh {
                p.mesh = *v;
            }
            Ok(Command::OracleRadial(p))
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("KHESS_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }

    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version requests are not usage errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
    };

    let command = match build_command(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
    };
    let config = RunConfig {
        seed: args.seed,
        out_dir: args.out.clone(),
        command,
    };
    match cli::run(&config) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code_for(&e) as u8)
        }
    }
}
