//! Linear solvers for the Newton corrections: a banded LU with partial
//! pivoting for 2D grids (direct), and Jacobi-preconditioned BiCGStab for
//! 3D, where the mixed-stencil bandwidth makes direct banded factorization
//! impractical.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Compressed sparse rows; rows sorted by column.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[idx] * x[self.cols[idx]];
            }
            *yi = s;
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[idx] == i {
                    d[i] = self.vals[idx];
                }
            }
        }
        d
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[idx];
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }
}

/// Banded LU with partial pivoting (LAPACK band layout: column j holds the
/// band entries, with kl extra rows of fill space for pivoting).
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n();
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for i in 0..n {
            for idx in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.cols[idx];
                ab[j * ldab + (kl + ku + i - j)] = a.vals[idx];
            }
        }
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[j * ldab + kl + ku].abs();
            for p in 1..=km {
                let v = ab[j * ldab + kl + ku + p].abs();
                if v > best {
                    best = v;
                    jp = p;
                }
            }
            ipiv[j] = j + jp;
            let pivot = ab[j * ldab + kl + ku + jp];
            if pivot == 0.0 {
                return Err(Error::LinearSolve(format!(
                    "banded factorization hit an exactly singular pivot at column {j}"
                )));
            }
            ju = ju.max((j + ku + kl).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let r1 = c * ldab + (kl + ku + j - c);
                    let r2 = c * ldab + (kl + ku + j + jp - c);
                    ab.swap(r1, r2);
                }
            }
            if km > 0 {
                let piv = ab[j * ldab + kl + ku];
                for p in 1..=km {
                    ab[j * ldab + kl + ku + p] /= piv;
                }
                for c in (j + 1)..=ju {
                    let t = ab[c * ldab + (kl + ku + j - c)];
                    if t != 0.0 {
                        for p in 1..=km {
                            ab[c * ldab + (kl + ku + j + p - c)] -=
                                ab[j * ldab + kl + ku + p] * t;
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let mut x = b.to_vec();
        // L has unit diagonal; multipliers are stored below the diagonal.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            for i in 1..=km {
                x[j + i] -= self.ab[j * ldab + kl + ku + i] * x[j];
            }
        }
        // Back substitution with U (upper bandwidth kl + ku after pivoting).
        for j in (0..n).rev() {
            let lo = j.saturating_sub(kl + ku);
            x[j] /= self.ab[j * ldab + kl + ku];
            for i in lo..j {
                x[i] -= self.ab[j * ldab + (kl + ku + i - j)] * x[j];
            }
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Serial on purpose: reduction order must not depend on thread count.
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGStab. Returns the solution and the iteration
/// count; restarts on breakdown up to three times.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = a.n();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precond = |v: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(v.iter().zip(&inv_diag).map(|(x, d)| x * d));
    };

    let b_norm = norm2(b).max(f64::MIN_POSITIVE);
    let target = (rel_tol * b_norm).max(abs_tol);

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    a.matvec(&x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    if norm2(&r) <= target {
        return Ok((x, 0));
    }

    let mut iterations = 0usize;
    for _restart in 0..4 {
        let r_hat = r.clone();
        let mut rho = 1.0;
        let mut alpha = 1.0;
        let mut omega = 1.0;
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut phat = Vec::with_capacity(n);
        let mut shat = Vec::with_capacity(n);
        let mut t = vec![0.0; n];
        let mut broke = false;

        while iterations < max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() < 1e-300 {
                broke = true;
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            precond(&p, &mut phat);
            a.matvec(&phat, &mut v);
            let denom = dot(&r_hat, &v);
            if denom.abs() < 1e-300 {
                broke = true;
                break;
            }
            alpha = rho / denom;
            let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
            if norm2(&s) <= target {
                for i in 0..n {
                    x[i] += alpha * phat[i];
                }
                return Ok((x, iterations));
            }
            precond(&s, &mut shat);
            a.matvec(&shat, &mut t);
            let tt = dot(&t, &t);
            if tt < 1e-300 {
                broke = true;
                break;
            }
            omega = dot(&t, &s) / tt;
            for i in 0..n {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm2(&r) <= target {
                return Ok((x, iterations));
            }
            if omega.abs() < 1e-300 {
                broke = true;
                break;
            }
        }
        if !broke {
            break; // max_iter reached
        }
        // Recompute the true residual and restart.
        a.matvec(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        if norm2(&r) <= target {
            return Ok((x, iterations));
        }
    }
    Err(Error::LinearSolve(format!(
        "bicgstab stalled after {iterations} iterations (residual {:.3e}, target {:.3e})",
        norm2(&r),
        target
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
            a.swap(c, piv);
            b.swap(c, piv);
            for r in (c + 1)..n {
                let f = a[r][c] / a[c][c];
                for l in c..n {
                    a[r][l] -= f * a[c][l];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let mut s = b[r];
            for l in (r + 1)..n {
                s -= a[r][l] * x[l];
            }
            x[r] = s / a[r][r];
        }
        x
    }

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> (CsrMatrix, Vec<Vec<f64>>) {
        let mut rng = stream_rng(seed, 0);
        let mut rows = Vec::new();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut row = Vec::new();
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                let v: f64 = if i == j {
                    rng.random_range(5.0..10.0)
                } else {
                    rng.random_range(-1.0..1.0)
                };
                row.push((j, v));
                dense[i][j] = v;
            }
            rows.push(row);
        }
        (CsrMatrix::from_rows(rows), dense)
    }

    #[test]
    fn banded_lu_matches_dense() {
        for seed in 0..4 {
            let n = 60;
            let (csr, dense) = random_banded(n, 7, 5, seed);
            let mut rng = stream_rng(seed, 1);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lu = BandedLu::factor(&csr).unwrap();
            let x = lu.solve(&b);
            let xd = dense_solve(dense, b);
            for i in 0..n {
                assert!((x[i] - xd[i]).abs() < 1e-10, "entry {i}: {} vs {}", x[i], xd[i]);
            }
        }
    }

    #[test]
    fn banded_lu_needs_pivoting_case() {
        // Zero diagonal entry forces a row swap.
        let rows = vec![
            vec![(0, 0.0), (1, 2.0)],
            vec![(0, 1.0), (1, 1.0), (2, 1.0)],
            vec![(1, 3.0), (2, 1.0)],
        ];
        let csr = CsrMatrix::from_rows(rows);
        let lu = BandedLu::factor(&csr).unwrap();
        let x = lu.solve(&[2.0, 3.0, 4.0]);
        // Solve by hand: x1 = 1 from row 0; row2: 3 x1 + x2 = 4 -> x2 = 1; row1: x0 = 1.
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
        assert!((x[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bicgstab_solves_laplacian() {
        // 1D Poisson: -u'' = 1 on (0,1), u(0) = u(1) = 0, n interior nodes.
        let n = 127;
        let h = 1.0 / (n + 1) as f64;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row = vec![(i, 2.0 / (h * h))];
            if i > 0 {
                row.push((i - 1, -1.0 / (h * h)));
            }
            if i + 1 < n {
                row.push((i + 1, -1.0 / (h * h)));
            }
            rows.push(row);
        }
        let a = CsrMatrix::from_rows(rows);
        let b = vec![1.0; n];
        let (x, _iters) = bicgstab(&a, &b, &vec![0.0; n], 1e-12, 1e-14, 10_000).unwrap();
        for i in 0..n {
            let xi = (i + 1) as f64 * h;
            let exact = 0.5 * xi * (1.0 - xi);
            assert!((x[i] - exact).abs() < 1e-9, "node {i}: {} vs {exact}", x[i]);
        }
    }
}
