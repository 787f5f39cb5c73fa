//! Shared test oracles, kept independent of the library's evaluation paths:
//! subset enumeration for elementary symmetric polynomials, Laplace
//! expansion for determinants, and plain finite differences.

#![allow(dead_code)]

use khess::symfun::SymMatrix;

/// sigma_k by explicit k-subset enumeration.
pub fn sigma_enum(values: &[f64], k: usize) -> f64 {
    fn rec(values: &[f64], k: usize, start: usize, acc: f64, total: &mut f64) {
        if k == 0 {
            *total += acc;
            return;
        }
        for i in start..values.len() {
            rec(values, k - 1, i + 1, acc * values[i], total);
        }
    }
    if k > values.len() {
        return 0.0;
    }
    let mut total = 0.0;
    rec(values, k, 0, 1.0, &mut total);
    total
}

/// Determinant by Laplace expansion along the first row.
pub fn det_laplace(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 1 {
        return rows[0][0];
    }
    let mut det = 0.0;
    for (j, &a) in rows[0].iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let minor: Vec<Vec<f64>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * a * det_laplace(&minor);
    }
    det
}

/// sigma_k of the eigenvalues of a symmetric matrix, as the sum of k x k
/// principal minors with Laplace determinants (eigenvalue-free).
pub fn sigma_of_matrix_enum(m: &SymMatrix, k: usize) -> f64 {
    let n = m.n();
    if k == 0 {
        return 1.0;
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), 0usize)];
        while let Some((chosen, start)) = stack.pop() {
            if chosen.len() == k {
                out.push(chosen);
                continue;
            }
            for i in start..n {
                let mut next = chosen.clone();
                next.push(i);
                stack.push((next, i + 1));
            }
        }
        out
    }
    subsets(n, k)
        .into_iter()
        .map(|idx| {
            let rows: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| m.get(i, j)).collect())
                .collect();
            det_laplace(&rows)
        })
        .sum()
}

/// Five-point central second derivative in t of `f` at t = 0.
pub fn second_derivative_fd(f: impl Fn(f64) -> f64, step: f64) -> f64 {
    (-f(2.0 * step) + 16.0 * f(step) - 30.0 * f(0.0) + 16.0 * f(-step) - f(-2.0 * step))
        / (12.0 * step * step)
}

/// Central first difference.
pub fn first_derivative_fd(f: impl Fn(f64) -> f64, step: f64) -> f64 {
    (f(step) - f(-step)) / (2.0 * step)
}
