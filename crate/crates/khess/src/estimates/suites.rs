//! Randomized verification suites for the inequality checks. Each sample
//! draws its own generator from (seed, sample index), so reports are
//! byte-reproducible regardless of worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{compute_shift, sample_mixed, shift_spectrum};
use crate::error::Result;
use crate::estimates::inequalities::{
    quotient_ratio_gap, quotient_weighted_gap, restricted_newton_gap, shifted_dominance_gap,
};
use crate::rng::stream_rng;
use crate::symfun::{sigma, Spectrum, TensorSlice};

/// Witness of a failed (or observed) inequality sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample_index: usize,
    pub lam: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<Vec<f64>>,
    pub detail: String,
    pub gap: f64,
    pub scale: f64,
}

/// Outcome of one randomized suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub samples: usize,
    pub seed: u64,
    /// Failures are gaps below -tolerance * scale.
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    /// Non-failing observations (e.g. counterexamples at the larger delta
    /// only, which the weighted inequality permits).
    pub observations: Vec<Violation>,
    pub min_scaled_gap: f64,
    pub passed: bool,
}

struct SampleOutcome {
    violations: Vec<Violation>,
    observations: Vec<Violation>,
    min_scaled_gap: f64,
}

fn run_samples(
    name: &str,
    samples: usize,
    seed: u64,
    tolerance: f64,
    eval: impl Fn(usize) -> Result<SampleOutcome> + Sync,
) -> Result<SuiteReport> {
    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|i| eval(i))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut observations = Vec::new();
    let mut min_scaled_gap = f64::INFINITY;
    for o in outcomes {
        violations.extend(o.violations);
        observations.extend(o.observations);
        min_scaled_gap = min_scaled_gap.min(o.min_scaled_gap);
    }
    let passed = violations.is_empty();
    Ok(SuiteReport {
        name: name.to_string(),
        samples,
        seed,
        tolerance,
        violations,
        observations,
        min_scaled_gap,
        passed,
    })
}

fn random_slice(rng: &mut impl Rng, n: usize) -> TensorSlice {
    // Uniform and heavy-tailed slices; uniform sampling alone misses the
    // near-tight regimes.
    let heavy = rng.random_bool(0.5);
    let diag = (0..n)
        .map(|_| {
            if heavy {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * 10f64.powf(rng.random_range(-2.0..2.0))
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    TensorSlice::diagonal(diag)
}

/// Ratio-form quotient-concavity suite on random Gamma_k spectra and random
/// diagonal slices.
pub fn run_quotient_ratio_suite(
    n: usize,
    k: usize,
    l: usize,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let tolerance = 1e-10;
    run_samples(
        &format!("quotient-ratio n{n} k{k} l{l}"),
        samples,
        seed,
        tolerance,
        |i| {
            let mut rng = stream_rng(seed, i as u64);
            let lam = sample_mixed(&mut rng, n, k, 10.0, i)?;
            let slice = random_slice(&mut rng, n);
            let g = quotient_ratio_gap(k, l, &lam, &slice)?;
            let mut out = SampleOutcome {
                violations: Vec::new(),
                observations: Vec::new(),
                min_scaled_gap: g.scaled_gap(),
            };
            if g.gap < -tolerance * g.scale {
                out.violations.push(Violation {
                    sample_index: i,
                    lam: lam.values().to_vec(),
                    slice: Some(slice.diag().to_vec()),
                    detail: "ratio form".to_string(),
                    gap: g.gap,
                    scale: g.scale,
                });
            }
            Ok(out)
        },
    )
}

/// Weighted-form quotient-concavity suite at the given deltas (descending).
/// Only a violation at the smallest delta fails the suite; violations at
/// larger deltas are recorded as threshold observations.
pub fn run_quotient_weighted_suite(
    n: usize,
    k: usize,
    l: usize,
    samples: usize,
    seed: u64,
    deltas: &[f64],
) -> Result<SuiteReport> {
    let tolerance = 1e-10;
    let mut deltas = deltas.to_vec();
    deltas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smallest = *deltas.last().expect("at least one delta");
    run_samples(
        &format!("quotient-weighted n{n} k{k} l{l}"),
        samples,
        seed,
        tolerance,
        |i| {
            let mut rng = stream_rng(seed, i as u64);
            let lam = sample_mixed(&mut rng, n, k, 10.0, i)?;
            let slice = random_slice(&mut rng, n);
            let mut out = SampleOutcome {
                violations: Vec::new(),
                observations: Vec::new(),
                min_scaled_gap: f64::INFINITY,
            };
            for &delta in &deltas {
                let g = quotient_weighted_gap(k, l, &lam, &slice, delta)?;
                if delta == smallest {
                    out.min_scaled_gap = out.min_scaled_gap.min(g.scaled_gap());
                }
                if g.gap < -tolerance * g.scale {
                    let witness = Violation {
                        sample_index: i,
                        lam: lam.values().to_vec(),
                        slice: Some(slice.diag().to_vec()),
                        detail: format!("delta = {delta}"),
                        gap: g.gap,
                        scale: g.scale,
                    };
                    if delta == smallest {
                        out.violations.push(witness);
                    } else {
                        out.observations.push(witness);
                    }
                }
            }
            Ok(out)
        },
    )
}

/// Shifted-dominance suite: Gamma_{k+1} spectra with the admissibility shift
/// K0 = n sigma_k^{1/k}, all ordered index pairs.
pub fn run_shifted_dominance_suite(
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let tolerance = 1e-12;
    let level = (k + 1).min(n);
    run_samples(
        &format!("shifted-dominance n{n} k{k}"),
        samples,
        seed,
        tolerance,
        |i| {
            let mut rng = stream_rng(seed, i as u64);
            let lam = sample_mixed(&mut rng, n, level, 10.0, i)?;
            let sup_f = sigma(k, &lam)?;
            let k0 = compute_shift(sup_f, n, k)?.k0;
            let mut out = SampleOutcome {
                violations: Vec::new(),
                observations: Vec::new(),
                min_scaled_gap: f64::INFINITY,
            };
            for i_idx in 0..n {
                for j_idx in 0..n {
                    if i_idx == j_idx {
                        continue;
                    }
                    let g = shifted_dominance_gap(&lam, k0, k, i_idx, j_idx)?;
                    out.min_scaled_gap = out.min_scaled_gap.min(g.scaled_gap());
                    if g.gap < -tolerance * g.scale {
                        out.violations.push(Violation {
                            sample_index: i,
                            lam: lam.values().to_vec(),
                            slice: None,
                            detail: format!("pair ({i_idx},{j_idx}), k0 = {k0}"),
                            gap: g.gap,
                            scale: g.scale,
                        });
                    }
                }
            }
            Ok(out)
        },
    )
}

/// Restricted Newton-inequality suite over raw, cone, and shifted spectra;
/// the slack is quadratic in the term scale.
pub fn run_restricted_newton_suite(
    n: usize,
    level: usize,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let tolerance = 1e-12;
    run_samples(
        &format!("restricted-newton n{n}"),
        samples,
        seed,
        tolerance,
        |i| {
            let mut rng = stream_rng(seed, i as u64);
            let lam = match i % 3 {
                0 => Spectrum::new((0..n).map(|_| rng.random_range(-10.0..10.0)).collect())?,
                1 => sample_mixed(&mut rng, n, level, 10.0, i)?,
                _ => {
                    let base = sample_mixed(&mut rng, n, level, 10.0, i)?;
                    let k = level.saturating_sub(1).max(1);
                    let k0 = compute_shift(sigma(k, &base)?.max(1e-6), n, k)?.k0;
                    shift_spectrum(&base, k0)
                }
            };
            let mut out = SampleOutcome {
                violations: Vec::new(),
                observations: Vec::new(),
                min_scaled_gap: f64::INFINITY,
            };
            for mu in 1..=(n - 2).max(1) {
                for a in 0..n {
                    for b in (a + 1)..n {
                        let g = restricted_newton_gap(&lam, mu, a, b)?;
                        out.min_scaled_gap = out.min_scaled_gap.min(g.scaled_gap());
                        if g.gap < -tolerance * g.scale {
                            out.violations.push(Violation {
                                sample_index: i,
                                lam: lam.values().to_vec(),
                                slice: None,
                                detail: format!("mu = {mu}, pair ({a},{b})"),
                                gap: g.gap,
                                scale: g.scale,
                            });
                        }
                    }
                }
            }
            Ok(out)
        },
    )
}
