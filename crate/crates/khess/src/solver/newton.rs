//! Damped Newton solver for the Dirichlet problem sigma_k(D^2 u) = f with
//! nodal residual F_i(u) = sigma_k(D^2_h u(node i)) - f(x_i, u_i, grad_h u_i).
//!
//! The linearization contracts the sigma_k gradient (the Newton
//! transformation T_{k-1}) against the stencil derivatives of the discrete
//! Hessian, minus the f_u and f_{grad} terms when f depends on the state.
//! Steps are halved until the residual norm decreases and every interior
//! Hessian spectrum stays in the closed Gamma_k cone; the linearized
//! operator is elliptic there.
//!
//! Newton corrections are solved directly (banded LU) in 2D and by
//! Jacobi-preconditioned BiCGStab in 3D.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matrix_invariants, newton_transform, sigma_of_matrix};
use crate::solver::field::{discrete_hessian, gradient_at, ScalarField};
use crate::solver::grid::{Coords, DomainShape, GridDomain};
use crate::solver::linsolve::{bicgstab, BandedLu, CsrMatrix};
use crate::solver::rhs::RhsSpec;

pub type BoundaryFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One Dirichlet problem instance: sigma_k(D^2 u) = f on the shaped domain,
/// u = boundary data on pinned nodes.
pub struct DirichletProblem {
    pub domain: GridDomain,
    pub shape: DomainShape,
    pub k: usize,
    pub rhs: RhsSpec,
    pub boundary: BoundaryFn,
}

impl DirichletProblem {
    pub fn zero_boundary(domain: GridDomain, k: usize, rhs: RhsSpec) -> Self {
        DirichletProblem {
            domain,
            shape: DomainShape::Full,
            k,
            rhs,
            boundary: Box::new(|_| 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Convergence target for the max-norm of the nodal residual.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Slack for the closed Gamma_k safeguard on trial iterates.
    pub cone_tol: f64,
    /// Relative forcing tolerance for the inner BiCGStab solves (3D).
    pub linear_rel_tol: f64,
    pub linear_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 60,
            max_halvings: 30,
            cone_tol: 1e-10,
            linear_rel_tol: 1e-3,
            linear_max_iter: 4000,
        }
    }
}

/// Instrumentation of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    /// Trial steps rejected because a spectrum left the closed cone.
    pub admissibility_violations: usize,
    /// Accepted damping factor per Newton iteration.
    pub damping_history: Vec<f64>,
    /// Worst closed-cone deficit of each accepted iterate (0 = admissible).
    /// The boundary clamp can leave the start iterate slightly outside the
    /// cone near box corners; the deficit must ratchet to 0 and stay there.
    pub cone_deficit_history: Vec<f64>,
}

struct Workspace {
    unknowns: Vec<usize>,
    unknown_of_node: Vec<usize>, // usize::MAX when pinned
}

impl Workspace {
    fn new(domain: &GridDomain, shape: &DomainShape) -> Self {
        let unknowns = shape.unknown_indices(domain);
        let mut unknown_of_node = vec![usize::MAX; domain.node_count()];
        for (ui, &node) in unknowns.iter().enumerate() {
            unknown_of_node[node] = ui;
        }
        Workspace {
            unknowns,
            unknown_of_node,
        }
    }
}

/// Convex quadratic start iterate w(x) = (a/2)|x - x_c|^2 - b with
/// sigma_k(D^2 w) = 1.1^k sup_f >= sup_f and w <= 0 on the closed box,
/// clamped to the boundary data at pinned nodes.
pub fn initial_guess(
    domain: &GridDomain,
    shape: &DomainShape,
    boundary: &dyn Fn(&[f64]) -> f64,
    rhs: &RhsSpec,
    k: usize,
) -> ScalarField {
    let a_eff = 1.1 * subsolution_slope(domain.dim(), k, rhs.sup_f());
    let center = domain.center();
    let b = 0.5 * a_eff * domain.max_center_radius2();
    let dim = domain.dim();
    let mut field = ScalarField::from_fn(domain.clone(), |p| {
        let r2: f64 = (0..dim).map(|a| (p[a] - center[a]).powi(2)).sum();
        0.5 * a_eff * r2 - b
    });
    apply_boundary(&mut field, shape, boundary);
    field
}

/// Slope a with sigma_k(a I) = C(n,k) a^k = sup_f.
pub fn subsolution_slope(dim: usize, k: usize, sup_f: f64) -> f64 {
    let mut binom = 1.0;
    for i in 0..k {
        binom = binom * (dim - i) as f64 / (i + 1) as f64;
    }
    (sup_f / binom).powf(1.0 / k as f64)
}

/// Overwrites every pinned node with the boundary data.
pub fn apply_boundary(
    field: &mut ScalarField,
    shape: &DomainShape,
    boundary: &dyn Fn(&[f64]) -> f64,
) {
    let domain = field.domain().clone();
    for idx in domain.node_indices() {
        let c = domain.coords(idx);
        if !shape.is_unknown(&domain, c) {
            let p = domain.position(c);
            field.values_mut()[idx] = boundary(&p[..domain.dim()]);
        }
    }
}

/// Boolean-sum (transfinite) interpolant of the boundary values of `f` into
/// the box: matches f on every box face and reproduces sums of single-axis
/// functions exactly.
fn transfinite_blend(domain: &GridDomain, f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let dim = domain.dim();
    let mut total = 0.0;
    for mask in 1usize..(1 << dim) {
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        let axes: Vec<usize> = (0..dim).filter(|a| mask & (1 << a) != 0).collect();
        let mut term = 0.0;
        for ends in 0usize..(1 << axes.len()) {
            let mut w = 1.0;
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(&x[..dim]);
            for (j, &a) in axes.iter().enumerate() {
                let s = (x[a] - domain.lows()[a]) / (domain.highs()[a] - domain.lows()[a]);
                if ends & (1 << j) != 0 {
                    w *= s;
                    p[a] = domain.highs()[a];
                } else {
                    w *= 1.0 - s;
                    p[a] = domain.lows()[a];
                }
            }
            term += w * f(&p[..dim]);
        }
        total += sign * term;
    }
    total
}

/// Alternative start iterate: the transfinite blend of the boundary data
/// plus the blend-corrected subsolution quadratic. Matches the boundary
/// data exactly on the box faces (no clamp jump), which keeps corner
/// spectra admissible where the clamped quadratic fails.
fn blended_initial_guess(
    domain: &GridDomain,
    shape: &DomainShape,
    boundary: &dyn Fn(&[f64]) -> f64,
    rhs: &RhsSpec,
    k: usize,
) -> ScalarField {
    let a_eff = 1.1 * subsolution_slope(domain.dim(), k, rhs.sup_f());
    let center = domain.center();
    let dim = domain.dim();
    let quad = move |p: &[f64]| {
        0.5 * a_eff
            * (0..dim)
                .map(|a| (p[a] - center[a]).powi(2))
                .sum::<f64>()
    };
    let mut field = ScalarField::from_fn(domain.clone(), |p| {
        transfinite_blend(domain, boundary, p) + quad(p) - transfinite_blend(domain, &quad, p)
    });
    apply_boundary(&mut field, shape, boundary);
    field
}

fn residual_at(problem: &DirichletProblem, u: &ScalarField, c: Coords) -> Result<f64> {
    let hess = discrete_hessian(u, c)?;
    let sig = sigma_of_matrix(&hess, problem.k);
    let p = problem.domain.position(c);
    let x = &p[..problem.domain.dim()];
    let f = if problem.rhs.depends_on_state() {
        let grad = gradient_at(u, c)?;
        problem
            .rhs
            .eval(x, u.get(c), &grad[..problem.domain.dim()])?
    } else {
        problem.rhs.eval(x, 0.0, &[0.0; 3][..problem.domain.dim()])?
    };
    Ok(sig - f)
}

fn assemble_residual(
    problem: &DirichletProblem,
    ws: &Workspace,
    u: &ScalarField,
) -> Result<Vec<f64>> {
    ws.unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| residual_at(problem, u, problem.domain.coords(node)))
        .collect()
}

/// Worst violation of the closed Gamma_k cone over the unknown nodes,
/// measured through the matrix invariants sigma_1..sigma_k and normalized
/// by the Hessian scale. Zero means every spectrum is admissible within
/// `cone_tol`.
pub fn field_cone_deficit(u: &ScalarField, shape: &DomainShape, k: usize, cone_tol: f64) -> f64 {
    let domain = u.domain();
    let unknowns = shape.unknown_indices(domain);
    unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| {
            let c = domain.coords(node);
            let hess = match discrete_hessian(u, c) {
                Ok(h) => h,
                Err(_) => return f64::INFINITY,
            };
            let inv = matrix_invariants(&hess);
            let amp = hess.frobenius_norm().max(1.0);
            let mut scale = 1.0;
            let mut worst = 0.0f64;
            for m in 1..=k {
                scale *= amp;
                worst = worst.max(-(inv[m - 1] + cone_tol * scale) / scale);
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Closed Gamma_k admissibility of every unknown node's Hessian spectrum.
pub fn field_admissible(u: &ScalarField, shape: &DomainShape, k: usize, cone_tol: f64) -> bool {
    field_cone_deficit(u, shape, k, cone_tol) == 0.0
}

fn assemble_jacobian(
    problem: &DirichletProblem,
    ws: &Workspace,
    u: &ScalarField,
) -> Result<CsrMatrix> {
    let domain = &problem.domain;
    let dim = domain.dim();
    let h = domain.spacing();
    let h2 = h * h;
    let rows: Vec<Vec<(usize, f64)>> = ws
        .unknowns
        .par_iter()
        .with_min_len(256)
        .map(|&node| -> Result<Vec<(usize, f64)>> {
            let c = domain.coords(node);
            let hess = discrete_hessian(u, c)?;
            let grad_matrix = newton_transform(&hess, problem.k - 1);
            let p = domain.position(c);
            let x = &p[..dim];
            let (f_u, f_g) = if problem.rhs.depends_on_state() {
                let grad = gradient_at(u, c)?;
                let g = &grad[..dim];
                (
                    problem.rhs.d_du(x, u.get(c), g),
                    problem.rhs.d_dgrad(x, u.get(c), g),
                )
            } else {
                (0.0, [0.0; 3])
            };

            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(2 * dim * dim + 1);
            let mut push = |cc: Coords, v: f64| {
                let ui = ws.unknown_of_node[domain.index(cc)];
                if ui != usize::MAX {
                    entries.push((ui, v));
                }
            };

            let diag_sum: f64 = (0..dim).map(|a| grad_matrix.get(a, a)).sum();
            push(c, -2.0 * diag_sum / h2 - f_u);
            for a in 0..dim {
                let mut cp = c;
                cp[a] += 1;
                let mut cm = c;
                cm[a] -= 1;
                push(cp, grad_matrix.get(a, a) / h2 - f_g[a] / (2.0 * h));
                push(cm, grad_matrix.get(a, a) / h2 + f_g[a] / (2.0 * h));
            }
            for a in 0..dim {
                for b in (a + 1)..dim {
                    let w = grad_matrix.get(a, b) / (2.0 * h2);
                    if w == 0.0 {
                        continue;
                    }
                    for (sa, sb) in [(1isize, 1isize), (1, -1), (-1, 1), (-1, -1)] {
                        let mut cc = c;
                        cc[a] = (cc[a] as isize + sa) as usize;
                        cc[b] = (cc[b] as isize + sb) as usize;
                        push(cc, w * (sa * sb) as f64);
                    }
                }
            }
            // Merge duplicate columns (possible only on degenerate tiny grids).
            entries.sort_by_key(|&(col, _)| col);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (col, v) in entries {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == col => *lv += v,
                    _ => merged.push((col, v)),
                }
            }
            Ok(merged)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CsrMatrix::from_rows(rows))
}

fn step(u: &ScalarField, ws: &Workspace, delta: &[f64], t: f64) -> ScalarField {
    let mut out = u.clone();
    for (ui, &node) in ws.unknowns.iter().enumerate() {
        out.values_mut()[node] += t * delta[ui];
    }
    out
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Solves the Dirichlet problem with default options and the given residual
/// tolerance and iteration cap.
pub fn solve_dirichlet(
    problem: &DirichletProblem,
    tol: f64,
    max_iter: usize,
) -> Result<(ScalarField, SolveReport)> {
    solve_dirichlet_with(
        problem,
        &SolverOptions {
            tol,
            max_iter,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_dirichlet_with(
    problem: &DirichletProblem,
    opts: &SolverOptions,
) -> Result<(ScalarField, SolveReport)> {
    solve_dirichlet_from(problem, None, opts)
}

/// Like [`solve_dirichlet_with`], starting from `start` (interpolated coarse
/// solves warm-start refinement scans) instead of the subsolution quadratic.
/// Boundary data is re-applied to the start iterate.
pub fn solve_dirichlet_from(
    problem: &DirichletProblem,
    start: Option<&ScalarField>,
    opts: &SolverOptions,
) -> Result<(ScalarField, SolveReport)> {
    if problem.k == 0 || problem.k > problem.domain.dim() {
        return Err(Error::domain(format!(
            "solver needs 1 <= k <= dim = {}, got k = {}",
            problem.domain.dim(),
            problem.k
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let ws = Workspace::new(&problem.domain, &problem.shape);
    if ws.unknowns.is_empty() {
        return Err(Error::domain(
            "domain shape leaves no unknown nodes".to_string(),
        ));
    }

    let mut u = match start {
        Some(field) => {
            if field.domain() != &problem.domain {
                return Err(Error::domain(
                    "start iterate lives on a different grid".to_string(),
                ));
            }
            let mut field = field.clone();
            apply_boundary(&mut field, &problem.shape, &problem.boundary);
            field
        }
        None => {
            let clamped = initial_guess(
                &problem.domain,
                &problem.shape,
                &problem.boundary,
                &problem.rhs,
                problem.k,
            );
            if field_cone_deficit(&clamped, &problem.shape, problem.k, opts.cone_tol) == 0.0 {
                clamped
            } else {
                // The boundary clamp broke corner spectra; prefer the
                // jump-free blended start when it sits deeper in the cone.
                let blended = blended_initial_guess(
                    &problem.domain,
                    &problem.shape,
                    &problem.boundary,
                    &problem.rhs,
                    problem.k,
                );
                let dc = field_cone_deficit(&clamped, &problem.shape, problem.k, opts.cone_tol);
                let db = field_cone_deficit(&blended, &problem.shape, problem.k, opts.cone_tol);
                // Blending separable data can collapse to a flat field with
                // a singular linearization; require strict ellipticity.
                let min_trace = problem
                    .shape
                    .unknown_indices(&problem.domain)
                    .into_iter()
                    .map(|node| {
                        discrete_hessian(&blended, problem.domain.coords(node))
                            .map(|h| h.trace())
                            .unwrap_or(f64::NEG_INFINITY)
                    })
                    .fold(f64::INFINITY, f64::min);
                if db < dc && min_trace > 1e-8 {
                    blended
                } else {
                    clamped
                }
            }
        }
    };
    let mut report = SolveReport {
        iterations: 0,
        final_residual: f64::INFINITY,
        admissibility_violations: 0,
        damping_history: Vec::new(),
        cone_deficit_history: Vec::new(),
    };

    // The boundary clamp can push start-iterate spectra slightly out of the
    // cone next to box corners. Steps may never worsen the worst deficit;
    // once it reaches zero the strict closed-cone safeguard applies.
    let mut deficit = field_cone_deficit(&u, &problem.shape, problem.k, opts.cone_tol);
    if !deficit.is_finite() {
        return Err(Error::ConeViolation {
            k: problem.k,
            halvings: 0,
            report,
        });
    }
    report.cone_deficit_history.push(deficit);

    let mut residual = assemble_residual(problem, &ws, &u)?;
    let mut rnorm = inf_norm(&residual);
    report.final_residual = rnorm;

    // Restoration merit: while the start iterate sits outside the cone,
    // steps are damped on rnorm + penalty * deficit. The penalty makes a
    // branch flip (deficit jump of order one) unpayable by any residual
    // gain, while rounding-level deficit creep stays tradeable.
    let penalty = 1.0 + rnorm / deficit.max(1e-9);

    // Modified-Newton reuse of the 2D factorization while full steps keep
    // contracting well; the factorization dominates the 2D solve cost.
    let mut cached_lu: Option<BandedLu> = None;

    loop {
        if rnorm <= opts.tol && deficit == 0.0 {
            return Ok((u, report));
        }
        if report.iterations >= opts.max_iter {
            return Err(Error::NonConvergence { report });
        }
        report.iterations += 1;

        let neg_f: Vec<f64> = residual.iter().map(|v| -v).collect();
        let mut lu_is_fresh = false;
        let delta = if problem.domain.dim() == 2 {
            if cached_lu.is_none() {
                let jac = assemble_jacobian(problem, &ws, &u)?;
                cached_lu = Some(BandedLu::factor(&jac)?);
                lu_is_fresh = true;
            }
            cached_lu.as_ref().unwrap().solve(&neg_f)
        } else {
            let jac = assemble_jacobian(problem, &ws, &u)?;
            let abs_tol = 1e-3 * opts.tol;
            bicgstab(
                &jac,
                &neg_f,
                &vec![0.0; neg_f.len()],
                opts.linear_rel_tol,
                abs_tol,
                opts.linear_max_iter,
            )?
            .0
        };

        let mut t = 1.0;
        let mut accepted = false;
        let mut blocked_by_cone = false;
        for _ in 0..=opts.max_halvings {
            let trial = step(&u, &ws, &delta, t);
            let trial_deficit =
                field_cone_deficit(&trial, &problem.shape, problem.k, opts.cone_tol);
            // Once the path is inside the closed cone it must stay there.
            if deficit == 0.0 && trial_deficit > 0.0 {
                report.admissibility_violations += 1;
                blocked_by_cone = true;
                t *= 0.5;
                continue;
            }
            blocked_by_cone = false;
            let trial_residual = assemble_residual(problem, &ws, &trial)?;
            let trial_norm = inf_norm(&trial_residual);
            let improves = if deficit == 0.0 {
                trial_norm < rnorm
            } else {
                trial_norm + penalty * trial_deficit < rnorm + penalty * deficit
            };
            if improves {
                let contraction = trial_norm / rnorm.max(f64::MIN_POSITIVE);
                if t < 1.0 || contraction > 0.2 {
                    cached_lu = None;
                }
                u = trial;
                residual = trial_residual;
                rnorm = trial_norm;
                deficit = trial_deficit;
                report.damping_history.push(t);
                report.cone_deficit_history.push(deficit);
                report.final_residual = rnorm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if cached_lu.is_some() && !lu_is_fresh {
                // A stale factorization may be the blocker; refresh and retry.
                cached_lu = None;
                report.iterations -= 1;
                continue;
            }
            return Err(if blocked_by_cone {
                Error::ConeViolation {
                    k: problem.k,
                    halvings: opts.max_halvings,
                    report,
                }
            } else {
                Error::NonConvergence { report }
            });
        }
    }
}

/// Max over unknown nodes of |sigma_k(D^2_h u) - f|; the solver's residual
/// norm, recomputable on any field.
pub fn residual_norm(problem: &DirichletProblem, u: &ScalarField) -> Result<f64> {
    let ws = Workspace::new(&problem.domain, &problem.shape);
    Ok(inf_norm(&assemble_residual(problem, &ws, u)?))
}

/// Min eigenvalue over unknown nodes and the per-node cone levels's worst
/// margin; used by admissibility instrumentation and the shift-bound checks.
pub fn min_hessian_eigenvalue(u: &ScalarField, shape: &DomainShape) -> Result<f64> {
    let domain = u.domain();
    let unknowns = shape.unknown_indices(domain);
    if unknowns.is_empty() {
        return Err(Error::domain("no unknown nodes".to_string()));
    }
    Ok(unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| {
            let h = discrete_hessian(u, domain.coords(node))?;
            let eigs = crate::linalg::eigenvalues(&h);
            Ok(*eigs.last().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_problem_2d(res: usize) -> DirichletProblem {
        DirichletProblem {
            domain: GridDomain::cube(2, -1.0, 1.0, res).unwrap(),
            shape: DomainShape::Full,
            k: 2,
            rhs: RhsSpec::constant(1.0).unwrap(),
            boundary: Box::new(|x| 0.5 * (x[0] * x[0] + x[1] * x[1])),
        }
    }

    #[test]
    fn reproduces_quadratic_2d() {
        let problem = quadratic_problem_2d(17);
        let (u, report) = solve_dirichlet(&problem, 1e-11, 40).unwrap();
        assert!(report.final_residual <= 1e-11);
        let exact = ScalarField::from_fn(problem.domain.clone(), |x| {
            0.5 * (x[0] * x[0] + x[1] * x[1])
        });
        let err = u
            .values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-9, "max error {err}");
    }

    #[test]
    fn reproduces_quadratic_3d() {
        let coef = 1.0 / 3.0f64.sqrt();
        let problem = DirichletProblem {
            domain: GridDomain::cube(3, -1.0, 1.0, 9).unwrap(),
            shape: DomainShape::Full,
            k: 2,
            rhs: RhsSpec::constant(1.0).unwrap(),
            boundary: Box::new(move |x| {
                0.5 * coef * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
            }),
        };
        let (u, _report) = solve_dirichlet(&problem, 1e-11, 40).unwrap();
        let exact = ScalarField::from_fn(problem.domain.clone(), |x| {
            0.5 * coef * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
        });
        let err = u
            .values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-9, "max error {err}");
    }

    #[test]
    fn zero_boundary_solution_bracketed_by_subsolution() {
        let problem = DirichletProblem::zero_boundary(
            GridDomain::cube(2, 0.0, 1.0, 33).unwrap(),
            2,
            RhsSpec::constant(1.0).unwrap(),
        );
        let (u, _report) = solve_dirichlet(&problem, 1e-10, 60).unwrap();
        // w <= u <= 0 with w the start quadratic (before clamping).
        let a_eff = 1.1 * subsolution_slope(2, 2, 1.0);
        let domain = problem.domain.clone();
        let center = domain.center();
        let b = 0.5 * a_eff * domain.max_center_radius2();
        for idx in domain.node_indices() {
            let p = domain.position(domain.coords(idx));
            let w = 0.5 * a_eff * ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)) - b;
            let v = u.values()[idx];
            assert!(w <= v + 1e-9, "w = {w} > u = {v}");
            assert!(v <= 1e-9, "u = {v} > 0");
        }
    }

    #[test]
    fn initial_guess_is_subsolution_shaped() {
        let domain = GridDomain::cube(2, 0.0, 1.0, 9).unwrap();
        let rhs = RhsSpec::constant(1.0).unwrap();
        // n = 2, k = 2: sigma_2(a I) = a^2, so base slope 1 and 1.1 after scaling.
        assert!((subsolution_slope(2, 2, 1.0) - 1.0).abs() < 1e-14);
        // n = 3, k = 2: sigma_2(a I) = 3 a^2, base slope 3^{-1/2}.
        assert!((subsolution_slope(3, 2, 1.0) - 1.0 / 3.0f64.sqrt()).abs() < 1e-14);
        let guess = initial_guess(&domain, &DomainShape::Full, &|_| 0.0, &rhs, 2);
        for idx in domain.node_indices() {
            let c = domain.coords(idx);
            if domain.is_box_boundary(c) {
                assert_eq!(guess.values()[idx], 0.0);
            } else {
                assert!(guess.values()[idx] <= 0.0);
            }
        }
        assert!(field_admissible(&guess, &DomainShape::Full, 2, 1e-10));
    }

    #[test]
    fn nonconvergence_carries_report() {
        let problem = quadratic_problem_2d(9);
        let err = solve_dirichlet(&problem, 1e-14, 1).unwrap_err();
        match err {
            Error::NonConvergence { report } => assert_eq!(report.iterations, 1),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_k() {
        let mut problem = quadratic_problem_2d(9);
        problem.k = 3;
        assert!(solve_dirichlet(&problem, 1e-8, 5).is_err());
    }
}
