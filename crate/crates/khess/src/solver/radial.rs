//! Radial oracle on balls: for u = u(r) the k-Hessian operator reduces to
//!
//! ```text
//! sigma_k(D^2 u) = C(n-1, k-1) (u'/r)^{k-1} u'' + C(n-1, k) (u'/r)^k,
//! ```
//!
//! whose conserved first-order form
//!
//! ```text
//! d/dr [ r^{n-k} (u')^k ] = (k / C(n-1, k-1)) r^{n-1} f(r)
//! ```
//!
//! is integrated directly (composite Simpson), then u is recovered from
//! u(R) = 0. For constant f the profile is the exact quadratic
//! u(r) = c (r^2 - R^2)/2 with C(n,k) c^k = f.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Radial solution profile with derivative samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radius: f64,
    pub n: usize,
    pub k: usize,
    pub rs: Vec<f64>,
    pub us: Vec<f64>,
    pub dus: Vec<f64>,
}

/// Solves sigma_k(D^2 u) = f_const on the ball of radius `ball_radius` with
/// u = 0 on the sphere and u'(0) = 0, sampled on `mesh` + 1 radii.
pub fn solve_radial(
    ball_radius: f64,
    n: usize,
    k: usize,
    f_const: f64,
    mesh: usize,
) -> Result<RadialProfile> {
    if !(ball_radius > 0.0) {
        return Err(Error::domain(format!(
            "ball radius must be positive, got {ball_radius}"
        )));
    }
    if !(f_const > 0.0) {
        return Err(Error::NonpositiveRhs { value: f_const });
    }
    if k == 0 || k > n || n < 2 {
        return Err(Error::domain(format!(
            "radial oracle needs 2 <= n and 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if mesh < 4 {
        return Err(Error::domain(format!("mesh must be >= 4, got {mesh}")));
    }

    let dr = ball_radius / mesh as f64;
    let coeff = k as f64 / binomial(n - 1, k - 1);
    // u'(r) from the conserved form; integral of s^{n-1} f over [0, r] done
    // with Simpson on [0, r] split at r/2 (exact for polynomial degree <= 3).
    let du_at = |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let integrand = |s: f64| s.powi(n as i32 - 1) * f_const;
        let m = r / 2.0;
        let integral = (r / 6.0) * (integrand(0.0) + 4.0 * integrand(m) + integrand(r));
        (coeff * integral / r.powi((n - k) as i32)).powf(1.0 / k as f64)
    };

    let rs: Vec<f64> = (0..=mesh).map(|j| j as f64 * dr).collect();
    let dus: Vec<f64> = rs.iter().map(|&r| du_at(r)).collect();

    // u(r_j) = -int_{r_j}^{R} u'(s) ds, accumulated inward by Simpson with
    // the analytic midpoint samples.
    let mut us = vec![0.0; mesh + 1];
    for j in (0..mesh).rev() {
        let mid = 0.5 * (rs[j] + rs[j + 1]);
        let seg = (dr / 6.0) * (dus[j] + 4.0 * du_at(mid) + dus[j + 1]);
        us[j] = us[j + 1] - seg;
    }

    Ok(RadialProfile {
        radius: ball_radius,
        n,
        k,
        rs,
        us,
        dus,
    })
}

impl RadialProfile {
    /// Cubic Hermite interpolation of u inside the ball; the quadratic
    /// continuation u'(R) (r^2 - R^2) / (2R) outside it.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            let du_r = *self.dus.last().unwrap();
            return du_r * (r * r - self.radius * self.radius) / (2.0 * self.radius);
        }
        let r = r.max(0.0);
        let dr = self.rs[1] - self.rs[0];
        let j = ((r / dr) as usize).min(self.rs.len() - 2);
        let t = (r - self.rs[j]) / dr;
        let (u0, u1) = (self.us[j], self.us[j + 1]);
        let (m0, m1) = (self.dus[j] * dr, self.dus[j + 1] * dr);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * u0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * u1
            + (t3 - t2) * m1
    }

    /// Least-squares coefficient c of u(r) against (r^2 - R^2)/2.
    pub fn fitted_quadratic_coefficient(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (r, u) in self.rs.iter().zip(&self.us) {
            let phi = 0.5 * (r * r - self.radius * self.radius);
            num += u * phi;
            den += phi * phi;
        }
        num / den
    }

    /// Exact coefficient for constant f: c with C(n,k) c^k = f.
    pub fn exact_quadratic_coefficient(n: usize, k: usize, f_const: f64) -> f64 {
        (f_const / binomial(n, k)).powf(1.0 / k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rhs_profiles_are_quadratic() {
        // (n, k, f, expected c): c solves C(n,k) c^k = f.
        for (n, k, f, c) in [
            (2usize, 2usize, 1.0, 1.0),
            (3, 2, 1.0, 1.0 / 3.0f64.sqrt()),
            (3, 3, 1.0, 1.0),
            (3, 1, 3.0, 1.0),
        ] {
            let p = solve_radial(1.0, n, k, f, 64).unwrap();
            assert!(
                (p.fitted_quadratic_coefficient() - c).abs() < 1e-12,
                "n={n} k={k}: fitted {} vs {c}",
                p.fitted_quadratic_coefficient()
            );
            assert!((RadialProfile::exact_quadratic_coefficient(n, k, f) - c).abs() < 1e-15);
            for (r, u) in p.rs.iter().zip(&p.us) {
                let exact = 0.5 * c * (r * r - 1.0);
                assert!((u - exact).abs() < 1e-12, "u({r}) = {u} vs {exact}");
            }
        }
    }

    #[test]
    fn interpolation_and_extension() {
        let p = solve_radial(1.0, 2, 2, 1.0, 64).unwrap();
        // Inside: close to the exact quadratic at off-node radii.
        assert!((p.eval(0.333) - 0.5 * (0.333f64.powi(2) - 1.0)).abs() < 1e-10);
        // At the sphere: zero; outside: the quadratic continuation.
        assert!(p.eval(1.0).abs() < 1e-12);
        assert!((p.eval(1.25) - 0.5 * (1.25f64.powi(2) - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn input_guards() {
        assert!(solve_radial(0.0, 2, 2, 1.0, 32).is_err());
        assert!(solve_radial(-1.0, 2, 2, 1.0, 32).is_err());
        assert!(solve_radial(1.0, 2, 2, 0.0, 32).is_err());
        assert!(solve_radial(1.0, 2, 3, 1.0, 32).is_err());
        assert!(solve_radial(1.0, 2, 2, 1.0, 2).is_err());
    }
}
