//! Right-hand sides f, f(x), or f(x, u, grad u), with analytic or
//! finite-difference derivatives for the Newton linearization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::grid::Point;

type EvalFn = dyn Fn(&[f64], f64, &[f64]) -> f64 + Send + Sync;
type GradDerivFn = dyn Fn(&[f64], f64, &[f64]) -> Point + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    Constant,
    PositionDependent,
    Full,
}

/// Positive right-hand side with a declared upper bound `sup_f`.
/// Positivity is checked on every evaluation.
pub struct RhsSpec {
    kind: RhsKind,
    eval: Box<EvalFn>,
    d_value: Option<Box<EvalFn>>,
    d_gradient: Option<Box<GradDerivFn>>,
    sup_f: f64,
}

impl std::fmt::Debug for RhsSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RhsSpec")
            .field("kind", &self.kind)
            .field("sup_f", &self.sup_f)
            .finish()
    }
}

impl RhsSpec {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0) {
            return Err(Error::NonpositiveRhs { value });
        }
        Ok(RhsSpec {
            kind: RhsKind::Constant,
            eval: Box::new(move |_, _, _| value),
            d_value: None,
            d_gradient: None,
            sup_f: value,
        })
    }

    pub fn position(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, sup_f: f64) -> Result<Self> {
        if !(sup_f > 0.0) {
            return Err(Error::domain(format!("sup_f must be positive, got {sup_f}")));
        }
        Ok(RhsSpec {
            kind: RhsKind::PositionDependent,
            eval: Box::new(move |x, _, _| f(x)),
            d_value: None,
            d_gradient: None,
            sup_f,
        })
    }

    pub fn full(
        f: impl Fn(&[f64], f64, &[f64]) -> f64 + Send + Sync + 'static,
        sup_f: f64,
    ) -> Result<Self> {
        if !(sup_f > 0.0) {
            return Err(Error::domain(format!("sup_f must be positive, got {sup_f}")));
        }
        Ok(RhsSpec {
            kind: RhsKind::Full,
            eval: Box::new(f),
            d_value: None,
            d_gradient: None,
            sup_f,
        })
    }

    /// Supplies analytic df/du; otherwise one-sided differences are used.
    pub fn with_value_derivative(
        mut self,
        d: impl Fn(&[f64], f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d_value = Some(Box::new(d));
        self
    }

    /// Supplies analytic df/d(grad u); otherwise one-sided differences are used.
    pub fn with_gradient_derivative(
        mut self,
        d: impl Fn(&[f64], f64, &[f64]) -> Point + Send + Sync + 'static,
    ) -> Self {
        self.d_gradient = Some(Box::new(d));
        self
    }

    pub fn kind(&self) -> RhsKind {
        self.kind
    }

    pub fn sup_f(&self) -> f64 {
        self.sup_f
    }

    pub fn depends_on_state(&self) -> bool {
        self.kind == RhsKind::Full
    }

    /// Evaluates f; errors if the evaluator returns a nonpositive value.
    pub fn eval(&self, x: &[f64], u: f64, grad: &[f64]) -> Result<f64> {
        let v = (self.eval)(x, u, grad);
        if !(v > 0.0) {
            return Err(Error::NonpositiveRhs { value: v });
        }
        Ok(v)
    }

    fn raw(&self, x: &[f64], u: f64, grad: &[f64]) -> f64 {
        (self.eval)(x, u, grad)
    }

    /// df/du, analytic or one-sided difference with step 1e-6 (1 + |u|).
    pub fn d_du(&self, x: &[f64], u: f64, grad: &[f64]) -> f64 {
        if self.kind != RhsKind::Full {
            return 0.0;
        }
        if let Some(d) = &self.d_value {
            return d(x, u, grad);
        }
        let step = 1e-6 * (1.0 + u.abs());
        (self.raw(x, u + step, grad) - self.raw(x, u, grad)) / step
    }

    /// df/d(grad u)_a for each axis, analytic or one-sided differences with
    /// step 1e-6 (1 + |grad_a|).
    pub fn d_dgrad(&self, x: &[f64], u: f64, grad: &[f64]) -> Point {
        let mut out = [0.0; 3];
        if self.kind != RhsKind::Full {
            return out;
        }
        if let Some(d) = &self.d_gradient {
            return d(x, u, grad);
        }
        let base = self.raw(x, u, grad);
        let mut g = [0.0; 3];
        g[..grad.len()].copy_from_slice(grad);
        for a in 0..grad.len() {
            let step = 1e-6 * (1.0 + g[a].abs());
            let saved = g[a];
            g[a] += step;
            out[a] = (self.raw(x, u, &g[..grad.len()]) - base) / step;
            g[a] = saved;
        }
        out
    }
}

/// Serializable right-hand-side description for configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RhsConfig {
    Constant { value: f64 },
    /// base + amplitude * sin(pi x_0) sin(pi x_1)
    SinProduct { base: f64, amplitude: f64 },
}

impl RhsConfig {
    pub fn build(&self) -> Result<RhsSpec> {
        match *self {
            RhsConfig::Constant { value } => RhsSpec::constant(value),
            RhsConfig::SinProduct { base, amplitude } => {
                if !(base - amplitude.abs() > 0.0) {
                    return Err(Error::domain(format!(
                        "sin-product rhs must stay positive: base {base}, amplitude {amplitude}"
                    )));
                }
                RhsSpec::position(
                    move |x| {
                        base + amplitude
                            * (std::f64::consts::PI * x[0]).sin()
                            * (std::f64::consts::PI * x[1]).sin()
                    },
                    base + amplitude.abs(),
                )
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RhsConfig::Constant { value } => format!("f = {value}"),
            RhsConfig::SinProduct { base, amplitude } => {
                format!("f = {base} + {amplitude} sin(pi x) sin(pi y)")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positivity_enforced() {
        assert!(RhsSpec::constant(0.0).is_err());
        assert!(RhsSpec::constant(-1.0).is_err());
        let f = RhsSpec::full(|_, u, _| u, 1.0).unwrap();
        assert!(f.eval(&[0.0, 0.0], -1.0, &[0.0, 0.0]).is_err());
        assert!(f.eval(&[0.0, 0.0], 2.0, &[0.0, 0.0]).is_ok());
    }

    #[test]
    fn derivative_fallbacks() {
        // f = 1 + u^2 + |grad|^2
        let f = RhsSpec::full(
            |_, u, g| 1.0 + u * u + g.iter().map(|v| v * v).sum::<f64>(),
            10.0,
        )
        .unwrap();
        let x = [0.3, 0.4];
        let g = [0.5, -0.25];
        let du = f.d_du(&x, 0.7, &g);
        assert!((du - 1.4).abs() < 1e-4, "du {du}");
        let dg = f.d_dgrad(&x, 0.7, &g);
        assert!((dg[0] - 1.0).abs() < 1e-4);
        assert!((dg[1] + 0.5).abs() < 1e-4);

        let exact = RhsSpec::full(|_, u, _| 1.0 + u * u, 10.0)
            .unwrap()
            .with_value_derivative(|_, u, _| 2.0 * u);
        assert_eq!(exact.d_du(&x, 0.7, &g), 1.4);
    }

    #[test]
    fn constant_kind_has_zero_state_derivatives() {
        let f = RhsSpec::constant(2.0).unwrap();
        assert_eq!(f.d_du(&[0.0, 0.0], 1.0, &[1.0, 1.0]), 0.0);
        assert_eq!(f.d_dgrad(&[0.0, 0.0], 1.0, &[1.0, 1.0]), [0.0; 3]);
        assert!(!f.depends_on_state());
    }

    #[test]
    fn sin_product_config() {
        let cfg = RhsConfig::SinProduct {
            base: 1.0,
            amplitude: 0.5,
        };
        let rhs = cfg.build().unwrap();
        assert_eq!(rhs.sup_f(), 1.5);
        let v = rhs.eval(&[0.5, 0.5], 0.0, &[0.0, 0.0]).unwrap();
        assert!((v - 1.5).abs() < 1e-14);
        assert!(RhsConfig::SinProduct {
            base: 0.5,
            amplitude: 0.5
        }
        .build()
        .is_err());
    }
}
