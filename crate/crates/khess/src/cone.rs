//! Garding-cone geometry: Gamma_m membership, the admissibility shift
//! K0 = n * sup_f^{1/k}, and the product/tail facts used by the solver
//! safeguards.
//!
//! Gamma_k = { lam : sigma_m(lam) > 0 for m = 1..k } is open; membership is
//! strict. [`in_closed_cone`] is the tolerant variant for numerical
//! safeguards.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symfun::{sigma_all, Spectrum};

/// Default closed-cone slack used by solver safeguards.
pub const CLOSED_CONE_TOL: f64 = 1e-12;

/// Largest cone level a spectrum belongs to, with the margins sigma_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    /// Largest m with sigma_1..sigma_m all strictly positive (0 if sigma_1 <= 0).
    pub max_level: usize,
    /// margins[m-1] = sigma_m(lam) for m = 1..n.
    pub margins: Vec<f64>,
}

/// The shift K0 making D^2 u + K0 I semi positive definite for admissible
/// solutions with rhs bounded by `sup_f`: the smallest K0 with
/// (K0/n)^k >= sup_f, i.e. K0 = n * sup_f^{1/k}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftBound {
    pub k0: f64,
    pub sup_f: f64,
    pub n: usize,
    pub k: usize,
}

/// Cone classification of a spectrum; boundary (sigma_m = 0) counts as failure.
pub fn classify(lam: &Spectrum) -> ConeVerdict {
    let sig = sigma_all(lam.values());
    let margins: Vec<f64> = sig[1..].to_vec();
    let mut max_level = 0;
    for (m, &s) in margins.iter().enumerate() {
        if s > 0.0 {
            max_level = m + 1;
        } else {
            break;
        }
    }
    ConeVerdict { max_level, margins }
}

/// Strict Gamma_level membership.
pub fn in_cone(lam: &Spectrum, level: usize) -> bool {
    level >= 1 && level <= lam.dim() && classify(lam).max_level >= level
}

/// Closed-cone membership: sigma_m >= -tol * max(1, |lam|_inf^m) for m <= level.
pub fn in_closed_cone(lam: &Spectrum, level: usize, tol: f64) -> bool {
    if level == 0 || level > lam.dim() {
        return false;
    }
    let sig = sigma_all(lam.values());
    let amp = lam.max_abs().max(1.0);
    let mut scale = 1.0;
    for m in 1..=level {
        scale *= amp;
        if sig[m] < -tol * scale {
            return false;
        }
    }
    true
}

/// K0 = n * sup_f^{1/k}, the smallest solution of (K0/n)^k >= sup_f.
pub fn compute_shift(sup_f: f64, n: usize, k: usize) -> Result<ShiftBound> {
    if !(sup_f > 0.0) {
        return Err(Error::domain(format!(
            "compute_shift needs sup_f > 0, got {sup_f}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::domain(format!(
            "compute_shift needs 1 <= k <= n = {n}, got k = {k}"
        )));
    }
    Ok(ShiftBound {
        k0: n as f64 * sup_f.powf(1.0 / k as f64),
        sup_f,
        n,
        k,
    })
}

/// Entrywise shift lam_j + k0; preserves ordering.
pub fn shift_spectrum(lam: &Spectrum, k0: f64) -> Spectrum {
    lam.shifted(k0)
}

/// Whether the tail sum lam_k + ... + lam_n of the sorted spectrum is
/// positive (level `k` is 1-based). Positive for every lam in Gamma_k.
pub fn tail_positivity_check(lam: &Spectrum, k: usize) -> Result<bool> {
    if k == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "tail_positivity_check needs 1 <= k <= {}, got {k}",
            lam.dim()
        )));
    }
    let sorted = lam.sorted();
    Ok(sorted.values()[k - 1..].iter().sum::<f64>() > 0.0)
}

/// Whether sigma_k >= lam_1...lam_k >= lam_k^k on the sorted spectrum, with
/// 1e-12 relative slack. Holds for every lam in Gamma_{k+1}.
pub fn product_bound_check(lam: &Spectrum, k: usize) -> Result<bool> {
    if k == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "product_bound_check needs 1 <= k <= {}, got {k}",
            lam.dim()
        )));
    }
    let sorted = lam.sorted();
    let sig_k = sigma_all(sorted.values())[k];
    let product: f64 = sorted.values()[..k].iter().product();
    let kth_power = sorted.values()[k - 1].powi(k as i32);
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1.0);
    Ok(sig_k - product >= -slack(sig_k, product) && product - kth_power >= -slack(product, kth_power))
}

// ---------------------------------------------------------------------------
// Random spectra in Gamma_level
// ---------------------------------------------------------------------------

/// Rejection sample from the box [-box_half, box_half]^n until the spectrum
/// lies in Gamma_level.
pub fn sample_in_cone(
    rng: &mut impl Rng,
    n: usize,
    level: usize,
    box_half: f64,
    max_tries: usize,
) -> Result<Spectrum> {
    for _ in 0..max_tries {
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-box_half..box_half)).collect();
        let lam = Spectrum::new(values)?;
        if in_cone(&lam, level) {
            return Ok(lam);
        }
    }
    Err(Error::SamplingExhausted {
        tries: max_tries,
        n,
        level,
    })
}

/// Near-boundary sample: walk a random ray from a positive-definite base
/// spectrum until it exits Gamma_level, then step back just inside.
///
/// Pure box rejection under-samples the cone boundary where the verified
/// inequalities are tight; this sampler targets it.
pub fn sample_near_cone_boundary(rng: &mut impl Rng, n: usize, level: usize) -> Result<Spectrum> {
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let point_at = |t: f64| -> Result<Spectrum> {
        Spectrum::new(base.iter().zip(&dir).map(|(b, d)| b + t * d).collect())
    };

    // Expand until the ray leaves the cone (or give up and return the cap).
    let mut t_in = 0.0;
    let mut t_out = 1.0;
    let mut exited = false;
    for _ in 0..40 {
        if in_cone(&point_at(t_out)?, level) {
            t_in = t_out;
            t_out *= 2.0;
        } else {
            exited = true;
            break;
        }
    }
    if !exited {
        return point_at(t_in);
    }
    for _ in 0..60 {
        let mid = 0.5 * (t_in + t_out);
        if in_cone(&point_at(mid)?, level) {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    // Log-uniform closeness: distances to the boundary from 1e-1 to 1e-8
    // of the ray length, so suites see genuinely tight margins.
    let s = 1.0 - 10f64.powf(-rng.random_range(1.0..8.0));
    let lam = point_at(s * t_in)?;
    if in_cone(&lam, level) {
        Ok(lam)
    } else {
        // Rounding pushed us out; the base point is safely inside.
        point_at(0.0)
    }
}

/// Alternates the box sampler and the near-boundary sampler so suites see
/// both bulk and near-tight spectra.
pub fn sample_mixed(
    rng: &mut impl Rng,
    n: usize,
    level: usize,
    box_half: f64,
    index: usize,
) -> Result<Spectrum> {
    if index % 2 == 0 {
        sample_in_cone(rng, n, level, box_half, 200_000)
    } else {
        sample_near_cone_boundary(rng, n, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::symfun::sigma;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn classify_levels() {
        assert_eq!(classify(&spec(&[1.0, 1.0, 1.0])).max_level, 3);
        // sigma_2 = 1 - 0.5 - 0.5 = 0 is not strictly positive.
        let v = classify(&spec(&[1.0, 1.0, -0.5]));
        assert_eq!(v.max_level, 1);
        assert_eq!(v.margins.len(), 3);
        assert_eq!(v.margins[0], 1.5);
        assert_eq!(classify(&spec(&[-1.0, -1.0, -1.0])).max_level, 0);
    }

    #[test]
    fn closed_cone_accepts_boundary() {
        let lam = spec(&[1.0, 1.0, -0.5]);
        assert!(!in_cone(&lam, 2));
        assert!(in_closed_cone(&lam, 2, 1e-12));
        assert!(!in_closed_cone(&spec(&[-1.0, -1.0, -1.0]), 1, 1e-12));
    }

    #[test]
    fn compute_shift_values() {
        assert_eq!(compute_shift(1.0, 3, 2).unwrap().k0, 3.0);
        assert_eq!(compute_shift(1.0, 2, 2).unwrap().k0, 2.0);
        assert_eq!(compute_shift(16.0, 2, 2).unwrap().k0, 8.0);
        assert!(compute_shift(0.0, 3, 2).is_err());
        assert!(compute_shift(-1.0, 3, 2).is_err());
        assert!(compute_shift(1.0, 3, 4).is_err());
        let b = compute_shift(1.0, 3, 2).unwrap();
        assert!((b.k0 / b.n as f64).powi(b.k as i32) >= b.sup_f);
    }

    #[test]
    fn shift_spectrum_values() {
        let lam = spec(&[1.0, 0.0, -1.0]);
        assert_eq!(shift_spectrum(&lam, 1.0).values(), &[2.0, 1.0, 0.0]);
        assert_eq!(shift_spectrum(&lam, 0.0), lam);
    }

    #[test]
    fn tail_positivity_values() {
        assert!(tail_positivity_check(&spec(&[3.0, 2.0, 1.0]), 2).unwrap());
        // (5, 1, -0.5) is in Gamma_2: sigma_2 = 5 - 2.5 - 0.5 = 2 > 0.
        let lam = spec(&[5.0, 1.0, -0.5]);
        assert!(in_cone(&lam, 2));
        assert!(tail_positivity_check(&lam, 2).unwrap());
        assert!(tail_positivity_check(&spec(&[1.0, 1.0, 1.0]), 3).unwrap());
    }

    #[test]
    fn product_bound_values() {
        assert!(product_bound_check(&spec(&[1.0, 1.0, 1.0]), 2).unwrap());
        assert!(product_bound_check(&spec(&[3.0, 2.0, 1.0]), 2).unwrap());
    }

    #[test]
    fn samplers_land_in_cone() {
        let mut rng = stream_rng(11, 0);
        for n in 2..=4 {
            for level in 1..=n {
                let a = sample_in_cone(&mut rng, n, level, 5.0, 100_000).unwrap();
                assert!(in_cone(&a, level));
                let b = sample_near_cone_boundary(&mut rng, n, level).unwrap();
                assert!(in_cone(&b, level));
            }
        }
    }

    #[test]
    fn near_boundary_sampler_gets_close() {
        // At least some samples should leave a thin sigma_level margin
        // relative to bulk scale.
        let mut rng = stream_rng(3, 1);
        let mut min_rel_margin = f64::INFINITY;
        for _ in 0..200 {
            let lam = sample_near_cone_boundary(&mut rng, 3, 2).unwrap();
            let margin = sigma(2, &lam).unwrap() / lam.max_abs().powi(2).max(1.0);
            min_rel_margin = min_rel_margin.min(margin);
        }
        assert!(min_rel_margin < 1e-6, "min rel margin {min_rel_margin}");
    }
}
