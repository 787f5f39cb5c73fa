//! Rescaling experiment for entire solutions with quadratic growth: solve
//! sigma_k(D^2 v) = 1 on sublevel domains of the rescaled candidate for
//! growing R and measure how the Hessian flattens. Quadratic candidates are
//! exact fixed points of the rescaling; perturbations of the boundary data
//! decay, which is the measurable trace of rigidity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::quantities::PogorelovConfig;
use crate::solver::field::discrete_hessian;
use crate::solver::newton::solve_dirichlet_from;
use crate::solver::{
    DirichletProblem, DomainShape, GridDomain, RhsSpec, ScalarField, SolverOptions,
};

type Evaluator = std::sync::Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Serializable candidate description (CLI config form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CandidateConfig {
    /// u = coefficient |x|^2 / 2
    Quadratic { coefficient: f64 },
    /// u = coefficient |x|^2 / 2 + amplitude sin(x_0)
    PerturbedQuadratic { coefficient: f64, amplitude: f64 },
}

/// Candidate entire solution with a quadratic-growth certificate
/// u(x) >= c |x|^2 - b.
pub struct EntireCandidate {
    pub config: Option<CandidateConfig>,
    pub growth_c: f64,
    pub growth_b: f64,
    eval: Evaluator,
}

impl std::fmt::Debug for EntireCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EntireCandidate")
            .field("config", &self.config)
            .field("growth_c", &self.growth_c)
            .field("growth_b", &self.growth_b)
            .finish()
    }
}

impl EntireCandidate {
    pub fn quadratic(coefficient: f64) -> Result<Self> {
        if !(coefficient > 0.0) {
            return Err(Error::domain(format!(
                "quadratic candidate needs a positive coefficient, got {coefficient}"
            )));
        }
        Ok(EntireCandidate {
            config: Some(CandidateConfig::Quadratic { coefficient }),
            growth_c: coefficient / 4.0,
            growth_b: 1.0,
            eval: std::sync::Arc::new(move |x: &[f64]| {
                0.5 * coefficient * x.iter().map(|v| v * v).sum::<f64>()
            }),
        })
    }

    pub fn perturbed_quadratic(coefficient: f64, amplitude: f64) -> Result<Self> {
        if !(coefficient > 0.0) {
            return Err(Error::domain(format!(
                "perturbed candidate needs a positive coefficient, got {coefficient}"
            )));
        }
        Ok(EntireCandidate {
            config: Some(CandidateConfig::PerturbedQuadratic {
                coefficient,
                amplitude,
            }),
            growth_c: coefficient / 4.0,
            // |amplitude sin| is absorbed into the offset.
            growth_b: 1.0 + amplitude.abs(),
            eval: std::sync::Arc::new(move |x: &[f64]| {
                0.5 * coefficient * x.iter().map(|v| v * v).sum::<f64>() + amplitude * x[0].sin()
            }),
        })
    }

    pub fn custom(
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        growth_c: f64,
        growth_b: f64,
    ) -> Result<Self> {
        if !(growth_c > 0.0) || !(growth_b >= 0.0) {
            return Err(Error::domain(format!(
                "growth certificate needs c > 0 and b >= 0, got c = {growth_c}, b = {growth_b}"
            )));
        }
        Ok(EntireCandidate {
            config: None,
            growth_c,
            growth_b,
            eval: std::sync::Arc::new(eval),
        })
    }

    pub fn from_config(config: &CandidateConfig) -> Result<Self> {
        match *config {
            CandidateConfig::Quadratic { coefficient } => EntireCandidate::quadratic(coefficient),
            CandidateConfig::PerturbedQuadratic {
                coefficient,
                amplitude,
            } => EntireCandidate::perturbed_quadratic(coefficient, amplitude),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

/// The rescaled candidate v(y) = (u(R y) - R^2) / R^2.
pub fn rescale(
    candidate: &EntireCandidate,
    rescale_r: f64,
) -> Result<impl Fn(&[f64]) -> f64 + Send + Sync + 'static> {
    if !(rescale_r > 0.0) {
        return Err(Error::domain(format!(
            "rescale needs R > 0, got {rescale_r}"
        )));
    }
    let eval = candidate.eval.clone();
    Ok(move |y: &[f64]| {
        let mut scaled = [0.0; 3];
        for (s, v) in scaled.iter_mut().zip(y) {
            *s = rescale_r * v;
        }
        (eval(&scaled[..y.len()]) - rescale_r * rescale_r) / (rescale_r * rescale_r)
    })
}

/// Grid mask of the sublevel set { y : u(R y) <= q R^2 } inside the bounding
/// box |y|_inf <= sqrt((1 + b) / c) that the growth certificate guarantees.
/// Errors if the mask touches the box boundary (growth violation).
pub fn sublevel_domain(
    candidate: &EntireCandidate,
    rescale_r: f64,
    level_fraction: f64,
    dim: usize,
    resolution: usize,
) -> Result<(GridDomain, DomainShape)> {
    if !(level_fraction > 0.0 && level_fraction <= 1.0) {
        return Err(Error::domain(format!(
            "level fraction must lie in (0, 1], got {level_fraction}"
        )));
    }
    if !(rescale_r > 0.0) {
        return Err(Error::domain(format!("R must be positive, got {rescale_r}")));
    }
    let half = ((1.0 + candidate.growth_b) / candidate.growth_c).sqrt();
    let domain = GridDomain::cube(dim, -half, half, resolution)?;
    let threshold = level_fraction * rescale_r * rescale_r;
    let mask: Vec<bool> = domain
        .node_indices()
        .map(|idx| {
            let p = domain.position(domain.coords(idx));
            let mut scaled = [0.0; 3];
            for a in 0..dim {
                scaled[a] = rescale_r * p[a];
            }
            candidate.eval(&scaled[..dim]) <= threshold
        })
        .collect();
    // Growth violation: sublevel set escaping the certified bounding box.
    for idx in domain.node_indices() {
        if mask[idx] && domain.is_box_boundary(domain.coords(idx)) {
            return Err(Error::UnboundedSublevel);
        }
    }
    Ok((domain, DomainShape::Masked(mask)))
}

/// Samples spheres of the given radii (deterministic lattice directions)
/// and checks u(x) >= c |x|^2 - b. Returns the first witness on failure.
pub fn growth_certificate(
    candidate: &EntireCandidate,
    c: f64,
    b: f64,
    radii: &[f64],
    dim: usize,
) -> (bool, Option<(Vec<f64>, f64, f64)>) {
    let directions = sphere_directions(dim, 256);
    for &r in radii {
        for dir in &directions {
            let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
            let value = candidate.eval(&x);
            let bound = c * r * r - b;
            if value < bound {
                return (false, Some((x, value, bound)));
            }
        }
    }
    (true, None)
}

fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere.
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                    vec![rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
    }
}

/// Per-R record of the rescaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityTrace {
    pub r_values: Vec<f64>,
    /// sup |laplacian of v| over the inner region per R.
    pub sup_lap: Vec<f64>,
    /// Entrywise Hessian oscillation (max - min per entry, worst entry)
    /// over the inner region per R.
    pub osc: Vec<f64>,
    /// max (-v)^beta * laplacian(v) over the whole domain per R.
    pub weighted_max: Vec<f64>,
    /// Least-squares slope of log osc against log R over the fitted points.
    pub exponent: Option<f64>,
    /// Cumulative fit using the points up to each R.
    pub exponent_so_far: Vec<Option<f64>>,
    /// Solver failures flag the entry; values are absent past a failure.
    pub flags: Vec<Option<String>>,
}

/// Oscillations at or below this floor are solver/rounding noise and are
/// excluded from the decay fit so numerical error is not attributed to
/// rigidity decay.
pub const OSC_FIT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub resolution: usize,
    pub beta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            resolution: 97,
            beta: 1.0,
            tol: 1e-11,
            max_iter: 80,
        }
    }
}

/// Runs the rescaling experiment: per R solve sigma_k(D^2 v) = 1 on the
/// masked sublevel domain with boundary data from the rescaled candidate,
/// then record sup |lap v| and the entrywise Hessian oscillation over the
/// inner region { u(R y) <= R^2 / 2 }, and fit log osc against log R.
pub fn rigidity_experiment(
    candidate: &EntireCandidate,
    dim: usize,
    k: usize,
    schedule: &[f64],
    opts: &ExperimentOptions,
) -> Result<RigidityTrace> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "R schedule must be strictly increasing".to_string(),
        ));
    }
    let mut trace = RigidityTrace {
        r_values: Vec::new(),
        sup_lap: Vec::new(),
        osc: Vec::new(),
        weighted_max: Vec::new(),
        exponent: None,
        exponent_so_far: Vec::new(),
        flags: Vec::new(),
    };

    for &r in schedule {
        trace.r_values.push(r);
        let step = (|| -> Result<(f64, f64, f64)> {
            let (domain, shape) = sublevel_domain(candidate, r, 1.0, dim, opts.resolution)?;
            let boundary = rescale(candidate, r)?;
            // The rescaled candidate is the conjectured solution; starting
            // from it keeps the path admissible and the experiment measures
            // how far the PDE solution moves away from it.
            let start = ScalarField::from_fn(domain.clone(), rescale(candidate, r)?);
            let problem = DirichletProblem {
                domain: domain.clone(),
                shape: shape.clone(),
                k,
                rhs: RhsSpec::constant(1.0)?,
                boundary: Box::new(move |x| boundary(x)),
            };
            let solver_opts = SolverOptions {
                tol: opts.tol,
                max_iter: opts.max_iter,
                ..SolverOptions::default()
            };
            let (v, _report) = solve_dirichlet_from(&problem, Some(&start), &solver_opts)?;

            // Inner region: nodes with u(R y) <= R^2 / 2.
            let threshold = 0.5 * r * r;
            let inner: Vec<usize> = shape
                .unknown_indices(&domain)
                .into_iter()
                .filter(|&node| {
                    let p = domain.position(domain.coords(node));
                    let mut scaled = [0.0; 3];
                    for a in 0..dim {
                        scaled[a] = r * p[a];
                    }
                    candidate.eval(&scaled[..dim]) <= threshold
                })
                .collect();
            if inner.is_empty() {
                return Err(Error::domain(
                    "inner region contains no interior nodes; raise the resolution".to_string(),
                ));
            }
            let mut sup_lap = 0.0f64;
            let mut lo = vec![f64::INFINITY; dim * dim];
            let mut hi = vec![f64::NEG_INFINITY; dim * dim];
            for &node in &inner {
                let hess = discrete_hessian(&v, domain.coords(node))?;
                sup_lap = sup_lap.max(hess.trace().abs());
                for p in 0..dim {
                    for q in 0..dim {
                        let e = hess.get(p, q);
                        lo[p * dim + q] = lo[p * dim + q].min(e);
                        hi[p * dim + q] = hi[p * dim + q].max(e);
                    }
                }
            }
            let osc = lo
                .iter()
                .zip(&hi)
                .fold(0.0f64, |m, (l, h)| m.max(h - l));
            let cfg = PogorelovConfig::new(opts.beta, 0.0, 0.0)?;
            let weighted = weighted_laplacian_max(&v, &shape, &cfg)?;
            Ok((sup_lap, osc, weighted))
        })();
        match step {
            Ok((sup_lap, osc, weighted)) => {
                trace.sup_lap.push(sup_lap);
                trace.osc.push(osc);
                trace.weighted_max.push(weighted);
                trace.flags.push(None);
            }
            Err(e) => {
                trace.flags.push(Some(e.to_string()));
                trace.exponent_so_far.push(None);
                break;
            }
        }
        trace
            .exponent_so_far
            .push(fit_decay_exponent(&trace.r_values, &trace.osc));
    }
    trace.exponent = fit_decay_exponent(&trace.r_values, &trace.osc);
    Ok(trace)
}

/// max (-v)^beta * trace(D^2 v) over the unknown nodes. The solved field can
/// overshoot zero by a boundary-clamp error near the staircase mask, so the
/// depth is clamped at zero rather than rejected as in the estimate ops.
fn weighted_laplacian_max(
    v: &crate::solver::ScalarField,
    shape: &DomainShape,
    cfg: &PogorelovConfig,
) -> Result<f64> {
    let domain = v.domain();
    let mut best = f64::NEG_INFINITY;
    for node in shape.unknown_indices(domain) {
        let c = domain.coords(node);
        let hess = discrete_hessian(v, c)?;
        let depth = (-v.values()[node]).max(0.0);
        best = best.max(depth.powf(cfg.beta) * hess.trace());
    }
    Ok(best)
}

/// Least-squares slope of log osc vs log R over the points above the noise
/// floor; None when fewer than two points qualify.
pub fn fit_decay_exponent(r_values: &[f64], osc: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = r_values
        .iter()
        .zip(osc)
        .filter(|(_, &o)| o > OSC_FIT_FLOOR)
        .map(|(&r, &o)| (r.ln(), o.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_fixed_point_for_quadratics() {
        let cand = EntireCandidate::quadratic(1.0).unwrap();
        for r in [1.0, 2.0, 8.0] {
            let v = rescale(&cand, r).unwrap();
            for y in [[0.0, 0.0], [0.5, -0.25], [1.0, 1.0]] {
                let expected = 0.5 * (y[0] * y[0] + y[1] * y[1]) - 1.0;
                assert!((v(&y) - expected).abs() < 1e-12, "R = {r}, y = {y:?}");
            }
        }
        assert!(rescale(&cand, 0.0).is_err());
    }

    #[test]
    fn rescale_perturbation_decays_quadratically() {
        let cand = EntireCandidate::perturbed_quadratic(1.0, 1.0).unwrap();
        let y = [0.3, 0.1];
        for r in [2.0, 4.0, 8.0] {
            let v = rescale(&cand, r).unwrap();
            let quad = 0.5 * (y[0] * y[0] + y[1] * y[1]) - 1.0;
            let dev = (v(&y) - quad).abs();
            let expect = ((r * y[0]).sin() / (r * r)).abs();
            assert!((dev - expect).abs() < 1e-12);
            assert!(dev <= 1.0 / (r * r));
        }
    }

    #[test]
    fn sublevel_domain_is_the_expected_ball() {
        let cand = EntireCandidate::quadratic(1.0).unwrap();
        // u = |x|^2/2 <= q R^2 iff |y| <= sqrt(2 q).
        for (q, radius) in [(1.0, 2.0f64.sqrt()), (0.5, 1.0)] {
            let (domain, shape) = sublevel_domain(&cand, 4.0, q, 2, 65).unwrap();
            let h = domain.spacing();
            for idx in domain.node_indices() {
                let p = domain.position(domain.coords(idx));
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                if shape.inside(idx) {
                    assert!(r <= radius + 1e-12, "inside node at r = {r}");
                } else {
                    assert!(r >= radius - h, "outside node at r = {r}");
                }
            }
        }
    }

    #[test]
    fn sublevel_detects_growth_violation() {
        // Linear growth: the sublevel set outgrows any certified box.
        let cand = EntireCandidate::custom(|x| x.iter().map(|v| v.abs()).sum(), 0.25, 1.0).unwrap();
        let err = sublevel_domain(&cand, 64.0, 1.0, 2, 33);
        assert!(matches!(err, Err(Error::UnboundedSublevel)));
    }

    #[test]
    fn growth_certificate_cases() {
        let quad = EntireCandidate::quadratic(1.0).unwrap();
        let (ok, _) = growth_certificate(&quad, 0.25, 0.0, &[1.0, 4.0, 16.0], 2);
        assert!(ok);

        let linear = EntireCandidate::custom(|x| x.iter().map(|v| v.abs()).sum(), 0.25, 1.0).unwrap();
        let (ok, witness) = growth_certificate(&linear, 0.25, 0.0, &[1.0, 4.0, 64.0], 2);
        assert!(!ok);
        assert!(witness.is_some());

        let pert = EntireCandidate::perturbed_quadratic(1.0, 0.1).unwrap();
        let (ok, _) = growth_certificate(&pert, 0.25, 1.0, &[1.0, 8.0, 32.0], 2);
        assert!(ok);
    }

    #[test]
    fn quadratic_candidate_trace_is_flat() {
        let cand = EntireCandidate::quadratic(1.0).unwrap();
        let opts = ExperimentOptions {
            resolution: 49,
            ..Default::default()
        };
        let trace = rigidity_experiment(&cand, 2, 2, &[2.0, 4.0], &opts).unwrap();
        assert!(trace.flags.iter().all(|f| f.is_none()));
        for (lap, osc) in trace.sup_lap.iter().zip(&trace.osc) {
            assert!((lap - 2.0).abs() < 1e-6, "sup lap {lap}");
            assert!(*osc <= 1e-6, "osc {osc}");
        }
        // Flat traces sit below the noise floor: no exponent is fitted.
        assert!(trace.exponent.is_none());
    }
}
