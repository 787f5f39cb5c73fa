//! Grid samplings of scalar functions, their discrete derivatives, and the
//! `khess-field v1` file format.
//!
//! Derivatives are second-order central differences:
//!
//! ```text
//! u_aa = (u[+e_a] - 2 u + u[-e_a]) / h^2
//! u_ab = (u[+e_a+e_b] - u[+e_a-e_b] - u[-e_a+e_b] + u[-e_a-e_b]) / (4 h^2)
//! u_a  = (u[+e_a] - u[-e_a]) / (2 h)
//! ```
//!
//! exact on quadratic polynomials. On x^4 at x = 0 the pure-second stencil
//! returns 2 h^2 rather than 0: truncation is O(h^2).

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::grid::{Coords, GridDomain, Point};
use crate::symfun::SymMatrix;

/// Scalar grid function. Boundary (pinned) nodes hold Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: GridDomain,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(domain: GridDomain) -> Self {
        let n = domain.node_count();
        ScalarField {
            domain,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(domain: GridDomain, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = domain
            .node_indices()
            .map(|i| {
                let p = domain.position(domain.coords(i));
                f(&p[..domain.dim()])
            })
            .collect();
        ScalarField { domain, values }
    }

    pub fn from_values(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.node_count() {
            return Err(Error::DimensionMismatch {
                expected: domain.node_count(),
                got: values.len(),
            });
        }
        Ok(ScalarField { domain, values })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, c: Coords) -> f64 {
        self.values[self.domain.index(c)]
    }

    pub fn set(&mut self, c: Coords, v: f64) {
        let i = self.domain.index(c);
        self.values[i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    // -- khess-field v1 ------------------------------------------------------

    /// Writes the field as `khess-field v1`: one header line, then one
    /// row-major node value per line at 17 significant digits (bit-exact
    /// round-trip).
    pub fn write(&self, w: impl Write) -> Result<()> {
        let mut w = BufWriter::new(w);
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(
            w,
            "khess-field v1 dim={} res={} low={} high={}",
            self.domain.dim(),
            self.domain.resolution(),
            join(self.domain.lows()),
            join(self.domain.highs()),
        )?;
        for v in &self.values {
            writeln!(w, "{v:.16e}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(std::fs::File::create(path)?)
    }

    pub fn read(r: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::FieldParse("empty file".into()))??;
        let mut dim = None;
        let mut res = None;
        let mut low = None;
        let mut high = None;
        let mut words = header.split_whitespace();
        if words.next() != Some("khess-field") || words.next() != Some("v1") {
            return Err(Error::FieldParse(format!("bad header: {header}")));
        }
        for word in words {
            let (key, value) = word
                .split_once('=')
                .ok_or_else(|| Error::FieldParse(format!("bad header item: {word}")))?;
            let parse_list = |v: &str| -> Result<Vec<f64>> {
                v.split(',')
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|e| Error::FieldParse(format!("bad number {s}: {e}")))
                    })
                    .collect()
            };
            match key {
                "dim" => dim = Some(value.parse::<usize>().map_err(|e| Error::FieldParse(e.to_string()))?),
                "res" => res = Some(value.parse::<usize>().map_err(|e| Error::FieldParse(e.to_string()))?),
                "low" => low = Some(parse_list(value)?),
                "high" => high = Some(parse_list(value)?),
                other => return Err(Error::FieldParse(format!("unknown header key {other}"))),
            }
        }
        let (dim, res, low, high) = match (dim, res, low, high) {
            (Some(d), Some(r), Some(l), Some(h)) => (d, r, l, h),
            _ => return Err(Error::FieldParse("incomplete header".into())),
        };
        if low.len() != dim || high.len() != dim {
            return Err(Error::FieldParse("corner lists do not match dim".into()));
        }
        let domain = GridDomain::new(&low, &high, res)?;
        let mut values = Vec::with_capacity(domain.node_count());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            values.push(
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::FieldParse(format!("bad value {line}: {e}")))?,
            );
        }
        if values.len() != domain.node_count() {
            return Err(Error::FieldParse(format!(
                "expected {} values, found {}",
                domain.node_count(),
                values.len()
            )));
        }
        Ok(ScalarField { domain, values })
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        ScalarField::read(std::fs::File::open(path)?)
    }

    /// Multilinear interpolation of this field at the nodes of `target`,
    /// which must lie inside this field's box. Used to warm-start refined
    /// solves and to compare fields across mesh levels.
    pub fn resample(&self, target: &GridDomain) -> Result<ScalarField> {
        if target.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                got: target.dim(),
            });
        }
        let dim = self.domain.dim();
        let h = self.domain.spacing();
        let r = self.domain.resolution();
        let eps = 1e-9 * h;
        for a in 0..dim {
            if target.lows()[a] < self.domain.lows()[a] - eps
                || target.highs()[a] > self.domain.highs()[a] + eps
            {
                return Err(Error::domain(
                    "resample target box is not contained in the source box".to_string(),
                ));
            }
        }
        let values = target
            .node_indices()
            .map(|idx| {
                let p = target.position(target.coords(idx));
                let mut cell = [0usize; 3];
                let mut frac = [0.0f64; 3];
                for a in 0..dim {
                    let t = ((p[a] - self.domain.lows()[a]) / h).clamp(0.0, (r - 1) as f64);
                    let base = (t.floor() as usize).min(r - 2);
                    cell[a] = base;
                    frac[a] = t - base as f64;
                }
                let corners = 1usize << dim;
                let mut v = 0.0;
                for corner in 0..corners {
                    let mut c = [0usize; 3];
                    let mut w = 1.0;
                    for a in 0..dim {
                        let up = (corner >> a) & 1;
                        c[a] = cell[a] + up;
                        w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                    }
                    v += w * self.get(c);
                }
                v
            })
            .collect();
        ScalarField::from_values(target.clone(), values)
    }

}

/// Second-order central-difference Hessian at a strictly interior node.
pub fn discrete_hessian(u: &ScalarField, c: Coords) -> Result<SymMatrix> {
    let domain = u.domain();
    if domain.is_box_boundary(c) {
        return Err(Error::domain(format!(
            "discrete_hessian needs a strictly interior node, got {:?}",
            &c[..domain.dim()]
        )));
    }
    let dim = domain.dim();
    let h2 = domain.spacing() * domain.spacing();
    let center = u.get(c);
    let at = |c: Coords, da: isize, a: usize, db: isize, b: usize| -> f64 {
        let mut cc = c;
        cc[a] = (cc[a] as isize + da) as usize;
        cc[b] = (cc[b] as isize + db) as usize;
        u.get(cc)
    };
    Ok(SymMatrix::from_fn(dim, |a, b| {
        if a == b {
            (at(c, 1, a, 0, a) - 2.0 * center + at(c, -1, a, 0, a)) / h2
        } else {
            (at(c, 1, a, 1, b) - at(c, 1, a, -1, b) - at(c, -1, a, 1, b) + at(c, -1, a, -1, b))
                / (4.0 * h2)
        }
    }))
}

/// Central-difference gradient at a strictly interior node.
pub fn gradient_at(u: &ScalarField, c: Coords) -> Result<Point> {
    let domain = u.domain();
    if domain.is_box_boundary(c) {
        return Err(Error::domain(
            "gradient_at needs a strictly interior node".to_string(),
        ));
    }
    let mut g = [0.0; 3];
    let two_h = 2.0 * domain.spacing();
    for a in 0..domain.dim() {
        let mut cp = c;
        cp[a] += 1;
        let mut cm = c;
        cm[a] -= 1;
        g[a] = (u.get(cp) - u.get(cm)) / two_h;
    }
    Ok(g)
}

/// Per-node gradient: central differences in the interior, second-order
/// one-sided differences on the box boundary.
pub fn gradient_field(u: &ScalarField) -> Vec<Point> {
    let domain = u.domain();
    let two_h = 2.0 * domain.spacing();
    let r = domain.resolution();
    domain
        .node_indices()
        .map(|idx| {
            let c = domain.coords(idx);
            let mut g = [0.0; 3];
            for a in 0..domain.dim() {
                let v = |offset: isize| {
                    let mut cc = c;
                    cc[a] = (cc[a] as isize + offset) as usize;
                    u.get(cc)
                };
                g[a] = if c[a] == 0 {
                    (-3.0 * v(0) + 4.0 * v(1) - v(2)) / two_h
                } else if c[a] == r - 1 {
                    (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / two_h
                } else {
                    (v(1) - v(-1)) / two_h
                };
            }
            g
        })
        .collect()
}

/// Trace of the discrete Hessian; the estimate quantities use this rather
/// than a separate Laplacian stencil so one discretization serves per field.
pub fn laplacian_at(u: &ScalarField, c: Coords) -> Result<f64> {
    Ok(discrete_hessian(u, c)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2(res: usize) -> GridDomain {
        GridDomain::cube(2, -1.0, 1.0, res).unwrap()
    }

    #[test]
    fn hessian_exact_on_quadratics() {
        let u = ScalarField::from_fn(grid2(9), |p| 0.5 * p[0] * p[0]);
        for c in [[1usize, 1, 0], [4, 4, 0], [7, 2, 0]] {
            let h = discrete_hessian(&u, c).unwrap();
            assert!((h.get(0, 0) - 1.0).abs() < 1e-13);
            assert!(h.get(1, 1).abs() < 1e-13);
            assert!(h.get(0, 1).abs() < 1e-13);
        }
        let uxy = ScalarField::from_fn(grid2(9), |p| p[0] * p[1]);
        let h = discrete_hessian(&uxy, [4, 4, 0]).unwrap();
        assert!(h.get(0, 0).abs() < 1e-14);
        assert!((h.get(0, 1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hessian_truncation_on_quartic() {
        // On x^4 at x = 0 the stencil gives (h^4 + h^4)/h^2 = 2 h^2.
        let res = 9;
        let g = grid2(res);
        let h = g.spacing();
        let u = ScalarField::from_fn(g, |p| p[0].powi(4));
        let mid = res / 2; // x = 0
        let hess = discrete_hessian(&u, [mid, mid, 0]).unwrap();
        assert!((hess.get(0, 0) - 2.0 * h * h).abs() < 1e-13);
    }

    #[test]
    fn hessian_rejects_boundary() {
        let u = ScalarField::zeros(grid2(5));
        assert!(discrete_hessian(&u, [0, 2, 0]).is_err());
    }

    #[test]
    fn gradient_values() {
        let g = grid2(9);
        let ux = ScalarField::from_fn(g.clone(), |p| p[0]);
        let grad = gradient_at(&ux, [4, 4, 0]).unwrap();
        assert!((grad[0] - 1.0).abs() < 1e-14);
        assert!(grad[1].abs() < 1e-14);

        let uc = ScalarField::from_fn(g.clone(), |_| 3.5);
        assert_eq!(gradient_at(&uc, [4, 4, 0]).unwrap(), [0.0, 0.0, 0.0]);

        // d(x^2)/dx at x = 0.5 is exactly 1 under central differences.
        let ux2 = ScalarField::from_fn(g, |p| p[0] * p[0]);
        let c = [6, 4, 0]; // x = -1 + 6*0.25 = 0.5
        let grad = gradient_at(&ux2, c).unwrap();
        assert!((grad[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_field_boundary_one_sided() {
        let g = grid2(9);
        let ux2 = ScalarField::from_fn(g.clone(), |p| p[0] * p[0]);
        let grads = gradient_field(&ux2);
        // One-sided second-order formula is exact on quadratics too.
        let idx = g.index([0, 4, 0]);
        assert!((grads[idx][0] - (-2.0)).abs() < 1e-13);
        let idx = g.index([8, 4, 0]);
        assert!((grads[idx][0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn field_file_round_trip_exact() {
        let g = grid2(5);
        let u = ScalarField::from_fn(g, |p| (p[0] * 1.234_567_890_123).sin() * 7.0 + p[1] / 3.0);
        let mut buf = Vec::new();
        u.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("khess-field v1 dim=2 res=5"));
        let back = ScalarField::read(&buf[..]).unwrap();
        assert_eq!(back.domain(), u.domain());
        assert_eq!(back.values(), u.values());
    }

    #[test]
    fn resample_exact_on_multilinear_data() {
        let coarse = ScalarField::from_fn(grid2(5), |p| 2.0 + p[0] - 3.0 * p[1] + p[0] * p[1]);
        let fine = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let out = coarse.resample(&fine).unwrap();
        let exact = ScalarField::from_fn(fine, |p| 2.0 + p[0] - 3.0 * p[1] + p[0] * p[1]);
        for (a, b) in out.values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        // Shrinking works too; growing beyond the box does not.
        let sub = GridDomain::cube(2, -0.5, 0.5, 5).unwrap();
        assert!(coarse.resample(&sub).is_ok());
        let sup = GridDomain::cube(2, -2.0, 2.0, 5).unwrap();
        assert!(coarse.resample(&sup).is_err());
    }

    #[test]
    fn field_file_rejects_garbage() {
        assert!(ScalarField::read(&b"not a field"[..]).is_err());
        assert!(ScalarField::read(&b"khess-field v1 dim=2 res=5 low=0,0 high=1,1\n1.0\n"[..]).is_err());
    }
}
