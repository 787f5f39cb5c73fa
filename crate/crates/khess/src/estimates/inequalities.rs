//! Signed gaps of the algebraic inequalities used to absorb third-order
//! terms in interior second-derivative estimates. Each check returns the
//! gap together with the scale of the participating terms; the tested
//! property is always `gap >= -tol * scale`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symfun::{
    directional_d1, sigma, sigma_d1, sigma_d2, sigma_d2_quadratic_form, sigma_restricted,
    Spectrum, TensorSlice,
};

/// Signed inequality gap and the magnitude of the largest participating term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: f64,
    pub scale: f64,
}

impl GapResult {
    pub fn scaled_gap(&self) -> f64 {
        self.gap / self.scale.max(f64::MIN_POSITIVE)
    }
}

fn max_abs(terms: &[f64]) -> f64 {
    terms.iter().fold(0.0, |m, t| m.max(t.abs()))
}

/// Ratio form of the quotient-concavity inequality for sigma_k / sigma_l
/// (k > l, alpha = 1/(k-l)) along a diagonal third-derivative slice d:
///
/// ```text
/// -(sum sigma_k^{pp,qq} d_p d_q)/sigma_k + (sum sigma_l^{pp,qq} d_p d_q)/sigma_l
///   >= (A - B) ((alpha-1) A - (alpha+1) B),
/// ```
///
/// where A, B are the logarithmic directional derivatives
/// (sum sigma^{pp} d_p)/sigma of sigma_k and sigma_l. Requires lam in
/// Gamma_k so both sigma values are positive.
pub fn quotient_ratio_gap(
    k: usize,
    l: usize,
    lam: &Spectrum,
    slice: &TensorSlice,
) -> Result<GapResult> {
    if l >= k || l == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "quotient gap needs 1 <= l < k <= {}, got k = {k}, l = {l}",
            lam.dim()
        )));
    }
    let sig_k = sigma(k, lam)?;
    let sig_l = sigma(l, lam)?;
    if sig_l <= 0.0 || sig_k <= 0.0 {
        return Err(Error::domain(format!(
            "quotient gap needs sigma_k, sigma_l > 0 (Gamma_k); got {sig_k}, {sig_l}"
        )));
    }
    let d = slice.diag();
    let alpha = 1.0 / (k - l) as f64;
    let t_k = sigma_d2_quadratic_form(k, lam, d)? / sig_k;
    let t_l = sigma_d2_quadratic_form(l, lam, d)? / sig_l;
    let a = directional_d1(k, lam, slice)? / sig_k;
    let b = directional_d1(l, lam, slice)? / sig_l;
    let lhs = -t_k + t_l;
    let rhs = (a - b) * ((alpha - 1.0) * a - (alpha + 1.0) * b);
    Ok(GapResult {
        gap: lhs - rhs,
        scale: max_abs(&[t_k, t_l, a * a, b * b, a * b, rhs]),
    })
}

/// Weighted (small-delta) form of the quotient-concavity inequality:
///
/// ```text
/// -sum sigma_k^{pp,qq} d_p d_q + (1 - alpha + alpha/delta) S_k^2 / sigma_k
///   >= sigma_k (alpha + 1 - delta alpha) (S_l / sigma_l)^2
///      - (sigma_k / sigma_l) sum sigma_l^{pp,qq} d_p d_q,
/// ```
///
/// with S the unnormalized directional derivatives. Valid for sufficiently
/// small delta in (0, 1); suites treat larger-delta counterexamples as
/// threshold observations rather than failures.
pub fn quotient_weighted_gap(
    k: usize,
    l: usize,
    lam: &Spectrum,
    slice: &TensorSlice,
    delta: f64,
) -> Result<GapResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if l >= k || l == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "quotient gap needs 1 <= l < k <= {}, got k = {k}, l = {l}",
            lam.dim()
        )));
    }
    let sig_k = sigma(k, lam)?;
    let sig_l = sigma(l, lam)?;
    if sig_l <= 0.0 || sig_k <= 0.0 {
        return Err(Error::domain(format!(
            "quotient gap needs sigma_k, sigma_l > 0 (Gamma_k); got {sig_k}, {sig_l}"
        )));
    }
    let d = slice.diag();
    let alpha = 1.0 / (k - l) as f64;
    let t_k = sigma_d2_quadratic_form(k, lam, d)?;
    let t_l = sigma_d2_quadratic_form(l, lam, d)?;
    let s_k = directional_d1(k, lam, slice)?;
    let s_l = directional_d1(l, lam, slice)?;
    let lhs_weight = 1.0 - alpha + alpha / delta;
    let rhs_weight = sig_k * (alpha + 1.0 - delta * alpha);
    let lhs = -t_k + lhs_weight * s_k * s_k / sig_k;
    let rhs = rhs_weight * (s_l / sig_l).powi(2) - (sig_k / sig_l) * t_l;
    Ok(GapResult {
        gap: lhs - rhs,
        scale: max_abs(&[
            t_k,
            lhs_weight * s_k * s_k / sig_k,
            rhs_weight * (s_l / sig_l).powi(2),
            sig_k * t_l / sig_l,
        ]),
    })
}

/// Dominance of first partials under a nonnegative spectrum shift
/// (0-based indices i != j, kappa = lam + k0 entrywise >= 0):
///
/// ```text
/// kappa_j sigma_k^{jj,ii} + sigma_k^{jj} >= sigma_k^{ii}.
/// ```
pub fn shifted_dominance_gap(
    lam: &Spectrum,
    k0: f64,
    k: usize,
    i: usize,
    j: usize,
) -> Result<GapResult> {
    if i == j || i >= lam.dim() || j >= lam.dim() {
        return Err(Error::domain(format!(
            "shifted dominance needs distinct indices below {}, got ({i},{j})",
            lam.dim()
        )));
    }
    let shift_floor = -1e-12 * (lam.max_abs() + k0.abs()).max(1.0);
    if let Some(v) = lam.values().iter().map(|v| v + k0).find(|v| *v < shift_floor) {
        return Err(Error::domain(format!(
            "shift precondition violated: kappa entry {v} negative beyond tolerance"
        )));
    }
    let kappa_j = lam.values()[j] + k0;
    let second = sigma_d2(k, lam, i, j)?;
    let first_j = sigma_d1(k, lam, j)?;
    let first_i = sigma_d1(k, lam, i)?;
    let lhs = kappa_j * second + first_j;
    Ok(GapResult {
        gap: lhs - first_i,
        scale: max_abs(&[kappa_j * second, first_j, first_i]),
    })
}

/// Newton's inequality on the doubly restricted spectrum (0-based a != b):
///
/// ```text
/// sigma_{mu-1}(lam|ab)^2 >= sigma_mu(lam|ab) sigma_{mu-2}(lam|ab).
/// ```
///
/// Holds for every real spectrum; scale is quadratic in the terms.
pub fn restricted_newton_gap(lam: &Spectrum, mu: usize, a: usize, b: usize) -> Result<GapResult> {
    if a == b || a >= lam.dim() || b >= lam.dim() {
        return Err(Error::domain(format!(
            "restricted Newton gap needs distinct indices below {}, got ({a},{b})",
            lam.dim()
        )));
    }
    if mu == 0 {
        return Err(Error::domain("restricted Newton gap needs mu >= 1".to_string()));
    }
    let rest_len = lam.dim() - 2;
    let get = |m: isize| -> Result<f64> {
        if m < 0 || m as usize > rest_len {
            Ok(0.0)
        } else {
            sigma_restricted(m as usize, lam, &[a, b])
        }
    };
    let mid = get(mu as isize - 1)?;
    let hi = get(mu as isize)?;
    let lo = get(mu as isize - 2)?;
    Ok(GapResult {
        gap: mid * mid - hi * lo,
        scale: max_abs(&[mid * mid, hi * lo]),
    })
}

/// Verdicts for the restricted growth bounds on a sorted spectrum in
/// Gamma_{mu+2} with top entries positive (0-based a, b < mu):
///
/// - lower bound: sigma_mu^{aa} >= lam_1...lam_mu / lam_a (asserted);
/// - three upper bounds on sigma_{mu-1}(lam|ab), sigma_mu(lam|ab),
///   sigma_{mu-2}(lam|ab) against lam_1...lam_{mu+1} / (lam_a lam_b) etc.,
///   whose constants are calibrated at the isotropic spectrum and reported,
///   not assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthBoundsVerdict {
    pub lower_holds: bool,
    pub lower_margin: f64,
    /// Observed constants of the three upper bounds for this spectrum.
    pub upper_observed: [f64; 3],
    /// The same constants evaluated at (1, ..., 1).
    pub upper_calibrated: [f64; 3],
}

pub fn restricted_growth_bounds(
    lam: &Spectrum,
    mu: usize,
    a: usize,
    b: usize,
) -> Result<GrowthBoundsVerdict> {
    let n = lam.dim();
    if mu == 0 || mu + 2 > n {
        return Err(Error::domain(format!(
            "growth bounds need 1 <= mu <= n - 2 = {}, got {mu}",
            n - 2
        )));
    }
    if a == b || a >= mu || b >= mu {
        return Err(Error::domain(format!(
            "growth bounds need distinct indices a, b < mu = {mu}, got ({a},{b})"
        )));
    }
    let sorted = lam.sorted();
    let v = sorted.values();
    if v[a] <= 0.0 || v[b] <= 0.0 {
        return Err(Error::domain(format!(
            "growth bounds need lam_a, lam_b > 0, got {} and {}",
            v[a], v[b]
        )));
    }
    let product_top = |count: usize| -> f64 { v[..count].iter().product() };

    let lower_lhs = sigma_d1(mu, &sorted, a)?; // sigma_{mu-1}(lam|a)
    let lower_rhs = product_top(mu) / v[a];
    let lower_margin = lower_lhs - lower_rhs;
    let lower_scale = lower_lhs.abs().max(lower_rhs.abs()).max(1.0);

    let rest_len = n - 2;
    let restricted = |m: isize| -> Result<f64> {
        if m < 0 || m as usize > rest_len {
            Ok(0.0)
        } else {
            sigma_restricted(m as usize, &sorted, &[a, b])
        }
    };
    let denom = v[a] * v[b];
    let upper_observed = [
        restricted(mu as isize - 1)? * denom / product_top(mu + 1),
        restricted(mu as isize)? * denom / product_top(mu + 2),
        restricted(mu as isize - 2)? * denom / product_top(mu),
    ];

    let iso = Spectrum::new(vec![1.0; n])?;
    let iso_restricted = |m: isize| -> Result<f64> {
        if m < 0 || m as usize > rest_len {
            Ok(0.0)
        } else {
            sigma_restricted(m as usize, &iso, &[0, 1])
        }
    };
    let upper_calibrated = [
        iso_restricted(mu as isize - 1)?,
        iso_restricted(mu as isize)?,
        iso_restricted(mu as isize - 2)?,
    ];

    Ok(GrowthBoundsVerdict {
        lower_holds: lower_margin >= -1e-12 * lower_scale,
        lower_margin,
        upper_observed,
        upper_calibrated,
    })
}
