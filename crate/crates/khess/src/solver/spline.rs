//! Tensor cubic-spline resampling between uniform grids. The interpolant is
//! C^2, so discrete Hessians of the fine samples track the coarse field's;
//! multilinear interpolation would leave flat and saddle cells that break
//! cone admissibility of warm starts.

use crate::error::{Error, Result};
use crate::solver::field::ScalarField;
use crate::solver::grid::GridDomain;
use crate::solver::linsolve::{BandedLu, CsrMatrix};

/// Second derivatives M_i of the not-a-knot cubic spline through `values`
/// on a uniform grid with spacing `h`.
fn spline_second_derivatives(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "spline needs at least 4 samples");
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut rhs = vec![0.0; n];
    // Not-a-knot: third derivative continuous at the second and
    // second-to-last knots.
    rows.push(vec![(0, 1.0), (1, -2.0), (2, 1.0)]);
    for i in 1..n - 1 {
        rows.push(vec![(i - 1, 1.0), (i, 4.0), (i + 1, 1.0)]);
        rhs[i] = 6.0 * (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (h * h);
    }
    rows.push(vec![(n - 3, 1.0), (n - 2, -2.0), (n - 1, 1.0)]);
    let lu = BandedLu::factor(&CsrMatrix::from_rows(rows)).expect("spline system is regular");
    lu.solve(&rhs)
}

/// Evaluates the spline (values, m) at offsets `ts` (in units of h from the
/// grid start).
fn spline_eval_many(values: &[f64], m: &[f64], h: f64, ts: &[f64], out: &mut [f64]) {
    let n = values.len();
    for (slot, &t) in out.iter_mut().zip(ts) {
        let t = t.clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let s = t - i as f64;
        let a = 1.0 - s;
        *slot = values[i] * a
            + values[i + 1] * s
            + h * h / 6.0 * ((a * a * a - a) * m[i] + (s * s * s - s) * m[i + 1]);
    }
}

/// Cubic-spline resampling of `field` onto `target` (target box inside the
/// source box), axis by axis.
pub fn spline_resample(field: &ScalarField, target: &GridDomain) -> Result<ScalarField> {
    let src = field.domain();
    let dim = src.dim();
    if target.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: target.dim(),
        });
    }
    let eps = 1e-9 * src.spacing();
    for a in 0..dim {
        if target.lows()[a] < src.lows()[a] - eps || target.highs()[a] > src.highs()[a] + eps {
            return Err(Error::domain(
                "spline resample target box is not contained in the source box".to_string(),
            ));
        }
    }
    let h = src.spacing();
    let rs = src.resolution();
    let rt = target.resolution();

    // Per-axis target offsets in source-grid units.
    let offsets: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            (0..rt)
                .map(|i| {
                    (target.lows()[a] + i as f64 * target.spacing() - src.lows()[a]) / h
                })
                .collect()
        })
        .collect();

    // dims[a] = current size along axis a; process axes in order.
    let mut dims = [1usize; 3];
    dims[..dim].fill(rs);
    let mut data: Vec<f64> = field.values().to_vec();

    for axis in 0..dim {
        let mut new_dims = dims;
        new_dims[axis] = rt;
        let stride = |d: &[usize; 3], a: usize| -> usize {
            // row-major with the last axis fastest
            d[(a + 1)..dim].iter().product()
        };
        let mut out = vec![0.0; new_dims[..dim].iter().product()];
        let line_len = dims[axis];
        let mut line = vec![0.0; line_len];
        let mut evals = vec![0.0; rt];

        // Iterate over all lines along `axis`.
        let outer: Vec<usize> = (0..dim).filter(|&a| a != axis).collect();
        let outer_sizes: Vec<usize> = outer.iter().map(|&a| dims[a]).collect();
        let total_lines: usize = outer_sizes.iter().product::<usize>().max(1);
        for li in 0..total_lines {
            let mut idx = [0usize; 3];
            let mut rem = li;
            for (pos, &a) in outer.iter().enumerate().rev() {
                idx[a] = rem % outer_sizes[pos];
                rem /= outer_sizes[pos];
            }
            let base_in: usize = (0..dim)
                .filter(|&a| a != axis)
                .map(|a| idx[a] * stride(&dims, a))
                .sum();
            let base_out: usize = (0..dim)
                .filter(|&a| a != axis)
                .map(|a| idx[a] * stride(&new_dims, a))
                .sum();
            let st_in = stride(&dims, axis);
            let st_out = stride(&new_dims, axis);
            for j in 0..line_len {
                line[j] = data[base_in + j * st_in];
            }
            let m = spline_second_derivatives(&line, h);
            spline_eval_many(&line, &m, h, &offsets[axis], &mut evals);
            for j in 0..rt {
                out[base_out + j * st_out] = evals[j];
            }
        }
        data = out;
        dims = new_dims;
    }

    ScalarField::from_values(target.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_1d() {
        let h = 0.25;
        let xs: Vec<f64> = (0..9).map(|i| i as f64 * h).collect();
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let m = spline_second_derivatives(&values, h);
        let ts = [0.3, 1.7, 3.14, 6.5, 7.9];
        let mut out = [0.0; 5];
        spline_eval_many(&values, &m, h, &ts, &mut out);
        for (&t, &v) in ts.iter().zip(&out) {
            let exact = f(t * h);
            assert!((v - exact).abs() < 1e-12, "t {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn spline_resample_2d_accuracy() {
        let coarse = GridDomain::cube(2, -1.0, 1.0, 17).unwrap();
        let fine = GridDomain::cube(2, -1.0, 1.0, 33).unwrap();
        let f = |p: &[f64]| (1.3 * p[0]).sin() * (0.7 * p[1]).cos() + 0.5 * p[0] * p[1];
        let u = ScalarField::from_fn(coarse, f);
        let v = spline_resample(&u, &fine).unwrap();
        let exact = ScalarField::from_fn(fine, f);
        let err = v
            .values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 2e-5, "max error {err}");
    }

    #[test]
    fn spline_resample_3d_runs() {
        let coarse = GridDomain::cube(3, 0.0, 1.0, 9).unwrap();
        let fine = GridDomain::cube(3, 0.0, 1.0, 17).unwrap();
        let f = |p: &[f64]| p[0] * p[0] + p[1] * p[2] - 0.3 * p[2] * p[2];
        let u = ScalarField::from_fn(coarse, f);
        let v = spline_resample(&u, &fine).unwrap();
        let exact = ScalarField::from_fn(fine, f);
        // Quadratics are reproduced exactly up to rounding by cubic splines.
        let err = v
            .values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "max error {err}");
    }
}
