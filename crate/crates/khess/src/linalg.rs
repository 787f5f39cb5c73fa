//! Small symmetric eigenvalue solvers and matrix invariants.
//!
//! Nodewise work needs eigenvalues of 2x2 and 3x3 Hessians only. The 3x3
//! path uses the trigonometric closed form and falls back to Jacobi sweeps
//! near eigenvalue ties, where the closed form loses digits.

use crate::symfun::SymMatrix;

/// Frobenius-relative off-diagonal tolerance for the Jacobi fallback.
const JACOBI_TOL: f64 = 1e-12;

/// Relative eigenvalue gap below which the 3x3 closed form defers to Jacobi.
const ANALYTIC_3X3_TIE_TOL: f64 = 1e-6;

/// Eigenvalues of a symmetric 2x2, descending.
pub fn eigenvalues_2x2(m: &SymMatrix) -> [f64; 2] {
    debug_assert_eq!(m.n(), 2);
    let a = m.get(0, 0);
    let c = m.get(1, 1);
    let b = m.get(0, 1);
    let mid = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    [mid + r, mid - r]
}

/// Eigenvalues of a symmetric 3x3, descending. Trigonometric closed form;
/// Jacobi near ties.
pub fn eigenvalues_3x3(m: &SymMatrix) -> [f64; 3] {
    debug_assert_eq!(m.n(), 3);
    let p1 = m.get(0, 1).powi(2) + m.get(0, 2).powi(2) + m.get(1, 2).powi(2);
    let scale = m.frobenius_norm();
    if p1 <= (1e-30 * scale * scale).max(f64::MIN_POSITIVE) {
        let mut d = [m.get(0, 0), m.get(1, 1), m.get(2, 2)];
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return d;
    }
    let q = m.trace() / 3.0;
    let p2 = (m.get(0, 0) - q).powi(2) + (m.get(1, 1) - q).powi(2) + (m.get(2, 2) - q).powi(2)
        + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let det_b = {
        // det((M - qI)/p)
        let b = |i: usize, j: usize| (m.get(i, j) - if i == j { q } else { 0.0 }) / p;
        b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0))
    };
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e2 = 3.0 * q - e1 - e3;
    let eigs = [e1, e2, e3];

    let min_gap = (e1 - e2).abs().min((e2 - e3).abs()).min((e1 - e3).abs());
    if min_gap < ANALYTIC_3X3_TIE_TOL * scale.max(1.0) {
        let mut v = jacobi_eigenvalues(m);
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return [v[0], v[1], v[2]];
    }
    eigs
}

/// Cyclic Jacobi eigenvalue sweeps for small symmetric matrices.
/// Converges when the off-diagonal norm drops below `JACOBI_TOL`
/// relative to the Frobenius norm.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let frob = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if (2.0 * off).sqrt() <= JACOBI_TOL * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for l in 0..n {
                    let alp = a[l][p];
                    let alq = a[l][q];
                    a[l][p] = c * alp - s * alq;
                    a[l][q] = s * alp + c * alq;
                }
                for l in 0..n {
                    let apl = a[p][l];
                    let aql = a[q][l];
                    a[p][l] = c * apl - s * aql;
                    a[q][l] = s * apl + c * aql;
                }
            }
        }
    }
    let mut out: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    out.sort_by(|x, y| y.partial_cmp(x).unwrap());
    out
}

/// Eigenvalues of a symmetric matrix, descending. Closed forms for n = 2, 3,
/// Jacobi otherwise.
pub fn eigenvalues(m: &SymMatrix) -> Vec<f64> {
    match m.n() {
        2 => eigenvalues_2x2(m).to_vec(),
        3 => eigenvalues_3x3(m).to_vec(),
        _ => jacobi_eigenvalues(m),
    }
}

fn det_dense(rows: &mut [Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| rows[i][c].abs().partial_cmp(&rows[j][c].abs()).unwrap())
            .unwrap();
        if rows[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            rows.swap(piv, c);
            det = -det;
        }
        det *= rows[c][c];
        for r in (c + 1)..n {
            let f = rows[r][c] / rows[c][c];
            for l in c..n {
                rows[r][l] -= f * rows[c][l];
            }
        }
    }
    det
}

/// Sum of all k x k principal minors of `m`, which equals sigma_k of its
/// eigenvalues. Exact combinatorial route; intended for small n.
pub fn principal_minor_sum(m: &SymMatrix, k: usize) -> f64 {
    let n = m.n();
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut total = 0.0;
    loop {
        let mut sub: Vec<Vec<f64>> = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| m.get(i, j)).collect())
            .collect();
        total += det_dense(&mut sub);
        // next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if subset[i] != i + n - k {
                break;
            }
            if i == 0 {
                return total;
            }
        }
        subset[i] += 1;
        for j in (i + 1)..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Invariants [sigma_1, ..., sigma_n] of the eigenvalues of `m`, via closed
/// forms for n = 2, 3 and principal minors otherwise.
pub fn matrix_invariants(m: &SymMatrix) -> Vec<f64> {
    match m.n() {
        2 => vec![m.trace(), m.get(0, 0) * m.get(1, 1) - m.get(0, 1).powi(2)],
        3 => {
            let s1 = m.trace();
            let s2 = m.get(0, 0) * m.get(1, 1) - m.get(0, 1).powi(2)
                + m.get(0, 0) * m.get(2, 2)
                - m.get(0, 2).powi(2)
                + m.get(1, 1) * m.get(2, 2)
                - m.get(1, 2).powi(2);
            let s3 = m.get(0, 0) * (m.get(1, 1) * m.get(2, 2) - m.get(1, 2).powi(2))
                - m.get(0, 1) * (m.get(0, 1) * m.get(2, 2) - m.get(1, 2) * m.get(0, 2))
                + m.get(0, 2) * (m.get(0, 1) * m.get(1, 2) - m.get(1, 1) * m.get(0, 2));
            vec![s1, s2, s3]
        }
        n => (1..=n).map(|k| principal_minor_sum(m, k)).collect(),
    }
}

/// sigma_k of the eigenvalues of `m`.
pub fn sigma_of_matrix(m: &SymMatrix, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    matrix_invariants(m)[k - 1]
}

/// Newton transformation T_m(A): the matrix of partial derivatives
/// d sigma_{m+1}(A) / d A_{pq}. T_0 = I, T_m = sigma_m I - A T_{m-1}.
pub fn newton_transform(m: &SymMatrix, order: usize) -> SymMatrix {
    let n = m.n();
    let mut t = SymMatrix::identity(n);
    if order == 0 {
        return t;
    }
    let invariants = matrix_invariants(m);
    for step in 1..=order {
        let at = m.mul(&t);
        t = SymMatrix::from_fn(n, |i, j| {
            let id = if i == j { invariants[step - 1] } else { 0.0 };
            // A T_{m-1} is symmetric for every Newton transformation.
            id - 0.5 * (at.get(i, j) + at.get(j, i))
        });
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig2_matches_hand_values() {
        let m = SymMatrix::from_rows(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = eigenvalues_2x2(&m);
        assert!((e[0] - 3.0).abs() < 1e-14);
        assert!((e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig3_matches_invariants() {
        let m = SymMatrix::from_fn(3, |i, j| {
            [[4.0, 1.0, 0.5], [1.0, 3.0, -0.25], [0.5, -0.25, 1.0]][i][j]
        });
        let e = eigenvalues_3x3(&m);
        let s1: f64 = e.iter().sum();
        let s2 = e[0] * e[1] + e[0] * e[2] + e[1] * e[2];
        let s3 = e[0] * e[1] * e[2];
        let inv = matrix_invariants(&m);
        assert!((s1 - inv[0]).abs() < 1e-10);
        assert!((s2 - inv[1]).abs() < 1e-10);
        assert!((s3 - inv[2]).abs() < 1e-10);
        assert!(e[0] >= e[1] && e[1] >= e[2]);
    }

    #[test]
    fn eig3_handles_ties() {
        let m = SymMatrix::diagonal(&[2.0, 2.0, 1.0]);
        let e = eigenvalues_3x3(&m);
        assert!((e[0] - 2.0).abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
        assert!((e[2] - 1.0).abs() < 1e-12);
        // Near-tie with off-diagonal coupling.
        let mut m2 = SymMatrix::diagonal(&[2.0, 2.0 + 1e-9, 1.0]);
        m2.set_sym(0, 1, 1e-9);
        let e2 = eigenvalues_3x3(&m2);
        let inv = matrix_invariants(&m2);
        let s1: f64 = e2.iter().sum();
        assert!((s1 - inv[0]).abs() < 1e-12);
    }

    #[test]
    fn jacobi_matches_closed_forms() {
        let m = SymMatrix::from_fn(4, |i, j| if i == j { (i + 1) as f64 } else { 0.1 });
        let e = jacobi_eigenvalues(&m);
        let s1: f64 = e.iter().sum();
        assert!((s1 - m.trace()).abs() < 1e-10);
        let s4: f64 = e.iter().product();
        assert!((s4 - principal_minor_sum(&m, 4)).abs() < 1e-10);
    }

    #[test]
    fn minor_sums_match_eigen_sigma() {
        let m = SymMatrix::from_fn(3, |i, j| {
            [[4.0, 1.0, 0.5], [1.0, 3.0, -0.25], [0.5, -0.25, 1.0]][i][j]
        });
        let e = eigenvalues_3x3(&m);
        assert!((principal_minor_sum(&m, 1) - e.iter().sum::<f64>()).abs() < 1e-10);
        assert!(
            (principal_minor_sum(&m, 2) - (e[0] * e[1] + e[0] * e[2] + e[1] * e[2])).abs() < 1e-9
        );
        assert!((principal_minor_sum(&m, 3) - e.iter().product::<f64>()).abs() < 1e-9);
        assert_eq!(principal_minor_sum(&m, 0), 1.0);
    }

    #[test]
    fn newton_transform_is_sigma_gradient() {
        // d sigma_2 / dA = sigma_1 I - A; d sigma_3 / dA = adjugate.
        let m = SymMatrix::from_fn(3, |i, j| {
            [[4.0, 1.0, 0.5], [1.0, 3.0, -0.25], [0.5, -0.25, 1.0]][i][j]
        });
        let t1 = newton_transform(&m, 1);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { m.trace() } else { 0.0 } - m.get(i, j);
                assert!((t1.get(i, j) - expect).abs() < 1e-12);
            }
        }
        // Finite-difference check of d sigma_3 / dA_{01} (symmetric pair).
        let t2 = newton_transform(&m, 2);
        let h = 1e-6;
        let mut mp = m.clone();
        mp.set_sym(0, 1, m.get(0, 1) + h);
        let mut mm = m.clone();
        mm.set_sym(0, 1, m.get(0, 1) - h);
        let fd = (sigma_of_matrix(&mp, 3) - sigma_of_matrix(&mm, 3)) / (2.0 * h);
        // Perturbing the symmetric pair moves both A_01 and A_10.
        assert!((fd - 2.0 * t2.get(0, 1)).abs() < 1e-6, "fd {fd} vs {}", t2.get(0, 1));
    }
}
