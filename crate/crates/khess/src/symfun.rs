//! Calculus of elementary symmetric polynomials on spectra.
//!
//! `sigma(k, lam)` is the k-th elementary symmetric polynomial of the
//! eigenvalue vector `lam`; `sigma_d1` and `sigma_d2` are its first and
//! second partials, which equal restricted polynomials:
//!
//! ```text
//! d sigma_k / d lam_i          = sigma_{k-1}(lam | i)
//! d^2 sigma_k / d lam_p d lam_q = sigma_{k-2}(lam | pq)   (p != q, else 0)
//! ```
//!
//! `second_derivative_form` evaluates the second derivative of a symmetric
//! matrix function F (sigma_k or a quotient sigma_k/sigma_l) at a diagonal
//! matrix A in a direction B:
//!
//! ```text
//! F''(B,B) = sum_{j,k} f_{jk} B_jj B_kk
//!          + 2 sum_{j<k} (f_j - f_k)/(kappa_j - kappa_k) * B_jk^2
//! ```
//!
//! All values are f64; evaluation uses the stable incremental-product
//! recurrence (coefficients of prod(t + lam_i)), never subset enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative eigenvalue gap below which `second_derivative_form_with_ties`
/// switches the divided difference to its analytic limit.
pub const TIE_GAP_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Ordered real vector of Hessian eigenvalues.
///
/// Values are stored in construction order; [`Spectrum::sorted`] gives the
/// non-increasing view `lam_1 >= ... >= lam_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Requires n >= 2 and finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "spectrum needs dimension >= 2, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("spectrum entry {v} is not finite")));
        }
        Ok(Spectrum { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Non-increasing copy (the conventional ordering lam_1 >= ... >= lam_n).
    pub fn sorted(&self) -> Spectrum {
        let mut values = self.values.clone();
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite by construction"));
        Spectrum { values }
    }

    /// Entrywise shift lam_j + k0.
    pub fn shifted(&self, k0: f64) -> Spectrum {
        Spectrum {
            values: self.values.iter().map(|v| v + k0).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Dense symmetric n x n matrix. Constructors enforce exact symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>, // row-major
}

impl SymMatrix {
    pub fn zero(n: usize) -> Self {
        SymMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = SymMatrix::zero(n);
        for (i, &v) in diag.iter().enumerate() {
            m.entries[i * n + i] = v;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated once per unordered pair (i <= j).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zero(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.entries[i * n + j] = v;
                m.entries[j * n + i] = v;
            }
        }
        m
    }

    /// Validates exact symmetry of the given row-major entries.
    pub fn from_rows(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::domain(format!(
                        "matrix not symmetric at ({i},{j}): {} vs {}",
                        entries[i * n + j],
                        entries[j * n + i]
                    )));
                }
            }
        }
        Ok(SymMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Writes both (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let scale = self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j).abs() > tol * scale.max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    /// A * B (symmetric result not assumed; used for A * A only).
    pub(crate) fn mul(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SymMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += self.get(i, l) * other.get(l, j);
                }
                out.entries[i * n + j] = s;
            }
        }
        out
    }
}

/// Diagonal third-derivative slice (u_11h, ..., u_nnh) for one fixed index h,
/// with an optional full off-diagonal block u_pqh.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSlice {
    diag: Vec<f64>,
    offdiag: Option<SymMatrix>,
}

impl TensorSlice {
    pub fn diagonal(diag: Vec<f64>) -> Self {
        TensorSlice {
            diag,
            offdiag: None,
        }
    }

    pub fn with_offdiag(diag: Vec<f64>, offdiag: SymMatrix) -> Result<Self> {
        if offdiag.n() != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len(),
                got: offdiag.n(),
            });
        }
        Ok(TensorSlice {
            diag,
            offdiag: Some(offdiag),
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> Option<&SymMatrix> {
        self.offdiag.as_ref()
    }
}

// ---------------------------------------------------------------------------
// Elementary symmetric polynomials and partials
// ---------------------------------------------------------------------------

/// All sigma_0..sigma_m of `values` (m = values.len()), by accumulating the
/// coefficients of prod_i (t + values[i]).
pub fn sigma_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &lam) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += lam * e[j - 1];
        }
    }
    e
}

/// sigma_k(lam); sigma_0 = 1 by the empty-product convention.
pub fn sigma(k: usize, lam: &Spectrum) -> Result<f64> {
    if k > lam.dim() {
        return Err(Error::domain(format!(
            "sigma_{k} undefined for spectrum of dimension {}",
            lam.dim()
        )));
    }
    Ok(sigma_all(lam.values())[k])
}

fn restricted_values(lam: &Spectrum, excluded: &[usize]) -> Result<Vec<f64>> {
    for (a, &i) in excluded.iter().enumerate() {
        if i >= lam.dim() {
            return Err(Error::domain(format!(
                "excluded index {i} out of range for dimension {}",
                lam.dim()
            )));
        }
        if excluded[..a].contains(&i) {
            return Err(Error::domain(format!("excluded index {i} repeated")));
        }
    }
    Ok(lam
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains(i))
        .map(|(_, &v)| v)
        .collect())
}

/// sigma_k of the spectrum with `excluded` entries removed (0-based indices).
pub fn sigma_restricted(k: usize, lam: &Spectrum, excluded: &[usize]) -> Result<f64> {
    let rest = restricted_values(lam, excluded)?;
    if k > rest.len() {
        return Err(Error::domain(format!(
            "sigma_{k} undefined after removing {} of {} entries",
            excluded.len(),
            lam.dim()
        )));
    }
    Ok(sigma_all(&rest)[k])
}

/// Restricted sigma extended by zero outside its defined range; used where a
/// formula is stated for all k and the out-of-range terms vanish.
fn sigma_restricted_or_zero(k: isize, lam: &Spectrum, excluded: &[usize]) -> Result<f64> {
    let rest = restricted_values(lam, excluded)?;
    if k < 0 || k as usize > rest.len() {
        return Ok(0.0);
    }
    Ok(sigma_all(&rest)[k as usize])
}

/// First partial d sigma_k / d lam_i = sigma_{k-1}(lam | i). Index is 0-based.
pub fn sigma_d1(k: usize, lam: &Spectrum, i: usize) -> Result<f64> {
    if k == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "sigma_d1 needs 1 <= k <= {}, got {k}",
            lam.dim()
        )));
    }
    sigma_restricted(k - 1, lam, &[i])
}

/// Second partial d^2 sigma_k / d lam_p d lam_q: sigma_{k-2}(lam | pq) for
/// p != q and 0 for p = q. Indices are 0-based.
pub fn sigma_d2(k: usize, lam: &Spectrum, p: usize, q: usize) -> Result<f64> {
    if k == 0 || k > lam.dim() {
        return Err(Error::domain(format!(
            "sigma_d2 needs 1 <= k <= {}, got {k}",
            lam.dim()
        )));
    }
    if p >= lam.dim() || q >= lam.dim() {
        return Err(Error::domain(format!(
            "sigma_d2 index out of range: ({p},{q}) for dimension {}",
            lam.dim()
        )));
    }
    if p == q {
        return Ok(0.0);
    }
    sigma_restricted_or_zero(k as isize - 2, lam, &[p, q])
}

/// Directional first derivative along a diagonal slice:
/// sum_p sigma_k^{pp} * slice.diag[p].
pub fn directional_d1(k: usize, lam: &Spectrum, slice: &TensorSlice) -> Result<f64> {
    if slice.dim() != lam.dim() {
        return Err(Error::DimensionMismatch {
            expected: lam.dim(),
            got: slice.dim(),
        });
    }
    let mut s = 0.0;
    for (p, &d) in slice.diag().iter().enumerate() {
        s += sigma_d1(k, lam, p)? * d;
    }
    Ok(s)
}

/// Diagonal second-derivative contraction
/// sum_{p,q} sigma_k^{pp,qq} d_p d_q (the p = q terms vanish).
pub fn sigma_d2_quadratic_form(k: usize, lam: &Spectrum, diag: &[f64]) -> Result<f64> {
    if diag.len() != lam.dim() {
        return Err(Error::DimensionMismatch {
            expected: lam.dim(),
            got: diag.len(),
        });
    }
    let n = lam.dim();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += sigma_d2(k, lam, p, q)? * diag[p] * diag[q];
            }
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Second derivative of symmetric matrix functions
// ---------------------------------------------------------------------------

/// Which symmetric function the bilinear form is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetricFunction {
    /// F(A) = sigma_k of the eigenvalues of A.
    Sigma { k: usize },
    /// F(A) = sigma_k / sigma_l of the eigenvalues (k > l, sigma_l > 0).
    Quotient { k: usize, l: usize },
}

struct FunctionDerivatives<'a> {
    kind: SymmetricFunction,
    lam: &'a Spectrum,
    sig_k: f64,
    sig_l: f64,
}

impl<'a> FunctionDerivatives<'a> {
    fn new(kind: SymmetricFunction, lam: &'a Spectrum) -> Result<Self> {
        let (sig_k, sig_l) = match kind {
            SymmetricFunction::Sigma { k } => (sigma(k, lam)?, 1.0),
            SymmetricFunction::Quotient { k, l } => {
                if l >= k {
                    return Err(Error::domain(format!(
                        "quotient needs k > l, got k = {k}, l = {l}"
                    )));
                }
                let sl = sigma(l, lam)?;
                if sl <= 0.0 {
                    return Err(Error::domain(format!(
                        "quotient undefined: sigma_{l} = {sl} is not positive"
                    )));
                }
                (sigma(k, lam)?, sl)
            }
        };
        Ok(FunctionDerivatives {
            kind,
            lam,
            sig_k,
            sig_l,
        })
    }

    fn first(&self, j: usize) -> Result<f64> {
        match self.kind {
            SymmetricFunction::Sigma { k } => sigma_d1(k, self.lam, j),
            SymmetricFunction::Quotient { k, l } => {
                let fk = sigma_d1(k, self.lam, j)?;
                let fl = if l == 0 { 0.0 } else { sigma_d1(l, self.lam, j)? };
                Ok((fk * self.sig_l - self.sig_k * fl) / (self.sig_l * self.sig_l))
            }
        }
    }

    fn second(&self, j: usize, m: usize) -> Result<f64> {
        match self.kind {
            SymmetricFunction::Sigma { k } => sigma_d2(k, self.lam, j, m),
            SymmetricFunction::Quotient { k, l } => {
                let g = self.sig_l;
                let f = self.sig_k;
                let fj = sigma_d1(k, self.lam, j)?;
                let fm = sigma_d1(k, self.lam, m)?;
                let gj = if l == 0 { 0.0 } else { sigma_d1(l, self.lam, j)? };
                let gm = if l == 0 { 0.0 } else { sigma_d1(l, self.lam, m)? };
                let fjm = sigma_d2(k, self.lam, j, m)?;
                let gjm = if l == 0 {
                    0.0
                } else {
                    sigma_d2(l, self.lam, j, m)?
                };
                Ok(fjm / g - (fj * gm + fm * gj) / (g * g) - f * gjm / (g * g)
                    + 2.0 * f * gj * gm / (g * g * g))
            }
        }
    }

    /// Analytic limit of (f_j - f_m)/(kappa_j - kappa_m) as the gap closes.
    ///
    /// For sigma_k the divided difference is identically
    /// -sigma_{k-2}(lam | jm); for the quotient it is
    /// -(sigma_{k-2}(lam|jm) sigma_l - sigma_k sigma_{l-2}(lam|jm)) / sigma_l^2.
    fn divided_difference_limit(&self, j: usize, m: usize) -> Result<f64> {
        match self.kind {
            SymmetricFunction::Sigma { k } => {
                Ok(-sigma_restricted_or_zero(k as isize - 2, self.lam, &[j, m])?)
            }
            SymmetricFunction::Quotient { k, l } => {
                let fkr = sigma_restricted_or_zero(k as isize - 2, self.lam, &[j, m])?;
                let flr = sigma_restricted_or_zero(l as isize - 2, self.lam, &[j, m])?;
                Ok(-(fkr * self.sig_l - self.sig_k * flr) / (self.sig_l * self.sig_l))
            }
        }
    }
}

fn second_derivative_form_impl(
    f: SymmetricFunction,
    a: &SymMatrix,
    b: &SymMatrix,
    strict_gap_tol: Option<f64>,
) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    if !a.is_diagonal(1e-14) {
        return Err(Error::domain(
            "second_derivative_form expects a diagonal base matrix",
        ));
    }
    let lam = Spectrum::new(a.diag())?;
    let n = lam.dim();
    let derivs = FunctionDerivatives::new(f, &lam)?;

    let mut total = 0.0;
    for j in 0..n {
        for m in 0..n {
            let bjj = b.get(j, j);
            let bmm = b.get(m, m);
            if bjj != 0.0 && bmm != 0.0 {
                total += derivs.second(j, m)? * bjj * bmm;
            }
        }
    }
    for j in 0..n {
        for m in (j + 1)..n {
            let bjm = b.get(j, m);
            if bjm == 0.0 {
                continue;
            }
            let kj = lam.values()[j];
            let km = lam.values()[m];
            let gap = (kj - km).abs();
            let w = match strict_gap_tol {
                Some(tol) => {
                    if gap <= tol {
                        return Err(Error::DegenerateSpectrum { gap, tol });
                    }
                    (derivs.first(j)? - derivs.first(m)?) / (kj - km)
                }
                None => {
                    let tie_tol = TIE_GAP_TOL * kj.abs().max(km.abs()).max(1.0);
                    if gap < tie_tol {
                        derivs.divided_difference_limit(j, m)?
                    } else {
                        (derivs.first(j)? - derivs.first(m)?) / (kj - km)
                    }
                }
            };
            total += 2.0 * w * bjm * bjm;
        }
    }
    Ok(total)
}

/// Second derivative F''(B, B) of the symmetric function `f` at the diagonal
/// matrix `a` in direction `b`.
///
/// Errors with [`Error::DegenerateSpectrum`] when any pair of eigenvalues of
/// `a` entering a divided difference is closer than `gap_tol`; see
/// [`second_derivative_form_with_ties`] for the tie-tolerant variant.
pub fn second_derivative_form(
    f: SymmetricFunction,
    a: &SymMatrix,
    b: &SymMatrix,
    gap_tol: f64,
) -> Result<f64> {
    second_derivative_form_impl(f, a, b, Some(gap_tol))
}

/// Like [`second_derivative_form`], but replaces divided differences across
/// eigenvalue gaps below `1e-9 * max(1, |kappa_j|, |kappa_m|)` by their
/// analytic limit, which is finite.
pub fn second_derivative_form_with_ties(
    f: SymmetricFunction,
    a: &SymMatrix,
    b: &SymMatrix,
) -> Result<f64> {
    second_derivative_form_impl(f, a, b, None)
}

// ---------------------------------------------------------------------------
// Newton-Maclaurin gap
// ---------------------------------------------------------------------------

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

/// Gap of the Newton-Maclaurin bound
/// `sigma_{k-1} - c_{n,k} * sigma_1^{1/(k-1)} * sigma_k^{(k-2)/(k-1)}`,
/// with the sharp constant calibrated at the isotropic spectrum (1, ..., 1).
///
/// Nonnegative on Gamma_k (caller-checked); equality at isotropic spectra.
pub fn newton_maclaurin_gap(lam: &Spectrum, k: usize) -> Result<f64> {
    let n = lam.dim();
    if k < 2 {
        return Err(Error::domain(format!(
            "newton_maclaurin_gap needs k >= 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::domain(format!(
            "newton_maclaurin_gap needs k <= {n}, got {k}"
        )));
    }
    let s1 = sigma(1, lam)?;
    let sk = sigma(k, lam)?;
    let skm1 = sigma(k - 1, lam)?;
    if s1 <= 0.0 || sk <= 0.0 {
        return Err(Error::domain(format!(
            "newton_maclaurin_gap needs sigma_1, sigma_k > 0 (Gamma_k); got {s1}, {sk}"
        )));
    }
    let km1 = (k - 1) as f64;
    let c = binomial(n, k - 1)
        / ((n as f64).powf(1.0 / km1) * binomial(n, k).powf((k as f64 - 2.0) / km1));
    Ok(skm1 - c * s1.powf(1.0 / km1) * sk.powf((k as f64 - 2.0) / km1))
}
