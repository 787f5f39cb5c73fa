//! Estimate quantities evaluated on solved fields: the weighted largest
//! eigenvalue max, the (-u) Laplacian max, and shifted power sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigenvalues;
use crate::solver::field::{discrete_hessian, gradient_at, ScalarField};
use crate::solver::grid::{DomainShape, Point};

/// Weights of the interior-estimate test functions: the depth exponent beta,
/// the gradient weight eps, the position weight a, the power-sum order m,
/// and the gradient weight of the power-sum test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PogorelovConfig {
    pub beta: f64,
    pub eps: f64,
    pub a: f64,
    pub m: usize,
    pub n_weight: f64,
}

impl PogorelovConfig {
    /// beta = 0 is the documented degenerate case (plain largest-eigenvalue
    /// max); negative weights are rejected.
    pub fn new(beta: f64, eps: f64, a: f64) -> Result<Self> {
        if !(beta >= 0.0) || !(eps >= 0.0) || !(a >= 0.0) {
            return Err(Error::domain(format!(
                "weights must be nonnegative: beta = {beta}, eps = {eps}, a = {a}"
            )));
        }
        Ok(PogorelovConfig {
            beta,
            eps,
            a,
            m: 10,
            n_weight: 0.0,
        })
    }

    pub fn with_power(mut self, m: usize, n_weight: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("power-sum order must be >= 2, got {m}")));
        }
        self.m = m;
        self.n_weight = n_weight;
        Ok(self)
    }
}

fn check_nonpositive_interior(
    u: &ScalarField,
    unknowns: &[usize],
) -> Result<()> {
    for &node in unknowns {
        let v = u.values()[node];
        if v > 1e-12 {
            return Err(Error::domain(format!(
                "quantity undefined: interior value {v} is positive beyond 1e-12 at node {node}"
            )));
        }
    }
    Ok(())
}

fn argmax_scan(values: Vec<(usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (node, v) in values {
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((node, v)),
        }
    }
    best
}

/// Grid max over interior nodes of
/// (-u)^beta exp(eps/2 |grad u|^2 + a/2 |x|^2) * lambda_max(D^2 u),
/// with the maximizing position. u must be nonpositive in the interior.
pub fn pogorelov_quantity(
    u: &ScalarField,
    shape: &DomainShape,
    cfg: &PogorelovConfig,
) -> Result<(f64, Point)> {
    let domain = u.domain();
    let unknowns = shape.unknown_indices(domain);
    if unknowns.is_empty() {
        return Err(Error::domain("no interior nodes".to_string()));
    }
    check_nonpositive_interior(u, &unknowns)?;
    let dim = domain.dim();
    let per_node = unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| -> Result<(usize, f64)> {
            let c = domain.coords(node);
            let hess = discrete_hessian(u, c)?;
            let lam_max = eigenvalues(&hess)[0];
            let grad = gradient_at(u, c)?;
            let g2: f64 = grad[..dim].iter().map(|v| v * v).sum();
            let p = domain.position(c);
            let x2: f64 = p[..dim].iter().map(|v| v * v).sum();
            let depth = (-u.values()[node]).max(0.0);
            let value =
                depth.powf(cfg.beta) * (0.5 * cfg.eps * g2 + 0.5 * cfg.a * x2).exp() * lam_max;
            Ok((node, value))
        })
        .collect::<Result<Vec<_>>>()?;
    let (node, value) = argmax_scan(per_node).expect("nonempty");
    Ok((value, domain.position(domain.coords(node))))
}

/// Grid max over interior nodes of (-u) * trace(D^2 u), with the maximizing
/// position. Scaling u by s > 0 scales the value by exactly s^2 (for
/// power-of-two s, bit-exactly).
pub fn depth_laplacian_max(u: &ScalarField, shape: &DomainShape) -> Result<(f64, Point)> {
    let domain = u.domain();
    let unknowns = shape.unknown_indices(domain);
    if unknowns.is_empty() {
        return Err(Error::domain("no interior nodes".to_string()));
    }
    check_nonpositive_interior(u, &unknowns)?;
    let per_node = unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| -> Result<(usize, f64)> {
            let c = domain.coords(node);
            let hess = discrete_hessian(u, c)?;
            Ok((node, -u.values()[node] * hess.trace()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (node, value) = argmax_scan(per_node).expect("nonempty");
    Ok((value, domain.position(domain.coords(node))))
}

/// Shifted power sum P_m = sum_j (lambda_j + k0)^m of the discrete Hessian
/// spectrum, per interior node. Errors if any shifted eigenvalue is negative
/// beyond the 1e-10 admissibility slack.
pub fn shifted_power_sum(
    u: &ScalarField,
    shape: &DomainShape,
    k0: f64,
    m: usize,
) -> Result<Vec<(usize, f64)>> {
    if m < 2 {
        return Err(Error::domain(format!("power-sum order must be >= 2, got {m}")));
    }
    let domain = u.domain();
    let unknowns = shape.unknown_indices(domain);
    unknowns
        .par_iter()
        .with_min_len(512)
        .map(|&node| -> Result<(usize, f64)> {
            let c = domain.coords(node);
            let hess = discrete_hessian(u, c)?;
            let scale = (hess.frobenius_norm() + k0.abs()).max(1.0);
            let mut p = 0.0;
            for lam in eigenvalues(&hess) {
                let kappa = lam + k0;
                if kappa < -1e-10 * scale {
                    return Err(Error::Admissibility {
                        node,
                        value: kappa,
                    });
                }
                p += kappa.powi(m as i32);
            }
            Ok((node, p))
        })
        .collect()
}
