//! Property tests for the symmetric-function calculus and cone geometry,
//! checked against independent oracles (subset enumeration, Laplace
//! determinants, finite differences).

mod common;

use common::{second_derivative_fd, sigma_enum, sigma_of_matrix_enum};
use khess::cone::{
    classify, compute_shift, in_cone, product_bound_check, sample_mixed, shift_spectrum,
    tail_positivity_check,
};
use khess::rng::stream_rng;
use khess::symfun::{
    newton_maclaurin_gap, sigma, sigma_d1, sigma_restricted, Spectrum, SymMatrix,
    SymmetricFunction, TensorSlice,
};
use proptest::prelude::*;
use rand::Rng;

fn spectrum_strategy(n: usize) -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(-10.0f64..10.0, n).prop_map(|v| Spectrum::new(v).unwrap())
}

proptest! {
    #[test]
    fn sigma_matches_enumeration(lam in (2usize..=6).prop_flat_map(spectrum_strategy)) {
        for k in 0..=lam.dim() {
            let fast = sigma(k, &lam).unwrap();
            let slow = sigma_enum(lam.values(), k);
            let scale = fast.abs().max(slow.abs()).max(1.0);
            prop_assert!((fast - slow).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sigma_recursion_holds(lam in (2usize..=6).prop_flat_map(spectrum_strategy)) {
        // sigma_k = lam_i sigma_{k-1}(lam|i) + sigma_k(lam|i) for every i, k.
        for i in 0..lam.dim() {
            for k in 1..=lam.dim() {
                let lhs = sigma(k, &lam).unwrap();
                let rest_low = sigma_restricted(k - 1, &lam, &[i]).unwrap();
                let rest_same = if k <= lam.dim() - 1 {
                    sigma_restricted(k, &lam, &[i]).unwrap()
                } else {
                    0.0
                };
                let rhs = lam.values()[i] * rest_low + rest_same;
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn euler_homogeneity(lam in (2usize..=6).prop_flat_map(spectrum_strategy)) {
        // sum_i sigma_k^{ii} lam_i = k sigma_k, relative 1e-12 on the term scale.
        for k in 1..=lam.dim() {
            let mut total = 0.0;
            let mut term_scale = 0.0f64;
            for i in 0..lam.dim() {
                let t = sigma_d1(k, &lam, i).unwrap() * lam.values()[i];
                term_scale = term_scale.max(t.abs());
                total += t;
            }
            let rhs = k as f64 * sigma(k, &lam).unwrap();
            prop_assert!((total - rhs).abs() <= 1e-12 * term_scale.max(rhs.abs()).max(1.0));
        }
    }

    #[test]
    fn shift_composes_and_preserves_order(
        lam in (2usize..=5).prop_flat_map(spectrum_strategy),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let twice = shift_spectrum(&shift_spectrum(&lam, a), b);
        let once = shift_spectrum(&lam, a + b);
        for (x, y) in twice.values().iter().zip(once.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let sorted = lam.sorted();
        let shifted = shift_spectrum(&sorted, a);
        for w in shifted.values().windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn cone_nesting(lam in (2usize..=6).prop_flat_map(spectrum_strategy)) {
        let verdict = classify(&lam);
        for level in 1..=verdict.max_level {
            prop_assert!(in_cone(&lam, level));
            prop_assert!(verdict.margins[level - 1] > 0.0);
        }
        if verdict.max_level < lam.dim() {
            prop_assert!(!in_cone(&lam, verdict.max_level + 1));
        }
    }

    #[test]
    fn field_round_trip_is_bit_exact(
        seed in 0u64..1000,
        res in 5usize..9,
    ) {
        let domain = khess::solver::GridDomain::cube(2, -1.0, 1.0, res).unwrap();
        let mut rng = stream_rng(seed, 0);
        let values: Vec<f64> = (0..domain.node_count())
            .map(|_| rng.random_range(-1.0e3..1.0e3) * rng.random_range(1e-8..1e8f64).ln())
            .collect();
        let field = khess::solver::ScalarField::from_values(domain, values).unwrap();
        let mut buf = Vec::new();
        field.write(&mut buf).unwrap();
        let back = khess::solver::ScalarField::read(&buf[..]).unwrap();
        prop_assert_eq!(field.values(), back.values());
    }
}

#[test]
fn sigma_d1_matches_finite_differences() {
    // Relative error <= 1e-8 at step 1e-5 on random spectra in [-10,10]^n.
    let mut rng = stream_rng(101, 0);
    for trial in 0..2000 {
        let n = 2 + trial % 5;
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let lam = Spectrum::new(values.clone()).unwrap();
        for k in 1..=n {
            for i in 0..n {
                let exact = sigma_d1(k, &lam, i).unwrap();
                let step = 1e-5;
                let mut lo = values.clone();
                lo[i] -= step;
                let mut hi = values.clone();
                hi[i] += step;
                let fd = (sigma_enum(&hi, k) - sigma_enum(&lo, k)) / (2.0 * step);
                let scale = exact.abs().max(sigma_enum(&values, k).abs()).max(1.0);
                assert!(
                    (exact - fd).abs() <= 1e-8 * scale,
                    "n={n} k={k} i={i}: {exact} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn second_derivative_form_matches_fd_oracle() {
    // d^2/dt^2 sigma_k(eig(A + tB)) at t = 0 via eigenvalue-free minor sums;
    // eigenvalue gaps >= 0.1, B entries in [-1,1], relative error <= 1e-5.
    let mut rng = stream_rng(7, 0);
    let mut checked = 0;
    while checked < 300 {
        let n = rng.random_range(2..=4);
        let mut diag: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
        diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if diag.windows(2).any(|w| w[0] - w[1] < 0.1) {
            continue;
        }
        checked += 1;
        let a = SymMatrix::diagonal(&diag);
        let b = {
            let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            SymMatrix::from_fn(n, |i, j| entries[i.min(j) * n + i.max(j)])
        };
        for k in 1..=n {
            let exact =
                khess::symfun::second_derivative_form(SymmetricFunction::Sigma { k }, &a, &b, 1e-8)
                    .unwrap();
            let oracle = second_derivative_fd(
                |t| {
                    let m = SymMatrix::from_fn(n, |i, j| a.get(i, j) + t * b.get(i, j));
                    sigma_of_matrix_enum(&m, k)
                },
                1e-2,
            );
            let scale = exact.abs().max(oracle.abs()).max(1.0);
            assert!(
                (exact - oracle).abs() <= 1e-5 * scale,
                "n={n} k={k}: {exact} vs {oracle}"
            );
        }
    }
}

#[test]
fn quotient_form_matches_fd_oracle() {
    // Same oracle for F = sigma_k / sigma_l on Gamma_k spectra.
    let mut rng = stream_rng(8, 0);
    let mut checked = 0;
    while checked < 150 {
        let n = rng.random_range(3..=4);
        let mut diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..4.0)).collect();
        diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if diag.windows(2).any(|w| w[0] - w[1] < 0.1) {
            continue;
        }
        checked += 1;
        let a = SymMatrix::diagonal(&diag);
        let b = {
            let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            SymMatrix::from_fn(n, |i, j| entries[i.min(j) * n + i.max(j)])
        };
        for (k, l) in [(2usize, 1usize), (3, 1), (3, 2)] {
            if k > n {
                continue;
            }
            let exact = khess::symfun::second_derivative_form(
                SymmetricFunction::Quotient { k, l },
                &a,
                &b,
                1e-8,
            )
            .unwrap();
            let oracle = second_derivative_fd(
                |t| {
                    let m = SymMatrix::from_fn(n, |i, j| a.get(i, j) + t * b.get(i, j));
                    sigma_of_matrix_enum(&m, k) / sigma_of_matrix_enum(&m, l)
                },
                1e-2,
            );
            let scale = exact.abs().max(oracle.abs()).max(1.0);
            assert!(
                (exact - oracle).abs() <= 1e-5 * scale,
                "n={n} k={k} l={l}: {exact} vs {oracle}"
            );
        }
    }
}

#[test]
fn newton_maclaurin_gap_nonnegative_on_cone_samples() {
    let mut rng = stream_rng(21, 0);
    for i in 0..4000 {
        let n = 2 + i % 5;
        for k in 2..=n {
            let lam = sample_mixed(&mut rng, n, k, 8.0, i).unwrap();
            let gap = newton_maclaurin_gap(&lam, k).unwrap();
            let scale = sigma(k - 1, &lam).unwrap().abs().max(1.0);
            assert!(gap >= -1e-10 * scale, "n={n} k={k} lam={:?}: {gap}", lam.values());
        }
    }
}

#[test]
fn tail_and_product_bounds_on_cone_samples() {
    // 10^4 rejection samples, n <= 6: the tail sum past the cone level is
    // positive on Gamma_k, and the sorted product chain holds on Gamma_{k+1}.
    let mut rng = stream_rng(31, 0);
    for i in 0..10_000 {
        let n = 2 + i % 5;
        let k = 1 + i % n;
        let lam = sample_mixed(&mut rng, n, k, 6.0, i).unwrap();
        assert!(
            tail_positivity_check(&lam, k).unwrap(),
            "n={n} k={k} lam={:?}",
            lam.values()
        );
        if k < n {
            let lam_up = sample_mixed(&mut rng, n, k + 1, 6.0, i).unwrap();
            assert!(
                product_bound_check(&lam_up, k).unwrap(),
                "n={n} k={k} lam={:?}",
                lam_up.values()
            );
        }
    }
}

#[test]
fn shift_admissibility_on_cone_samples() {
    // lam in Gamma_{k+1} with sigma_k <= sup_f: shifting by K0 = n sup_f^{1/k}
    // makes every entry >= -1e-12.
    let mut rng = stream_rng(41, 0);
    for i in 0..10_000 {
        let n = 3 + i % 4;
        let k = 1 + i % (n - 1);
        let lam = sample_mixed(&mut rng, n, k + 1, 6.0, i).unwrap();
        let sup_f = sigma(k, &lam).unwrap() * (1.0 + rng.random_range(0.0..1.0));
        let bound = compute_shift(sup_f, n, k).unwrap();
        let shifted = shift_spectrum(&lam, bound.k0);
        let floor = -1e-12 * lam.max_abs().max(bound.k0).max(1.0);
        assert!(
            shifted.values().iter().all(|v| *v >= floor),
            "n={n} k={k} lam={:?} k0={}",
            lam.values(),
            bound.k0
        );
    }
}

#[test]
fn cone_midpoint_convexity_on_samples() {
    let mut rng = stream_rng(51, 0);
    for i in 0..5000 {
        let n = 2 + i % 5;
        let level = 1 + i % n;
        let a = sample_mixed(&mut rng, n, level, 6.0, i).unwrap();
        let b = sample_mixed(&mut rng, n, level, 6.0, i + 1).unwrap();
        let mid = Spectrum::new(
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| 0.5 * (x + y))
                .collect(),
        )
        .unwrap();
        assert!(in_cone(&mid, level), "n={n} level={level}");
    }
}

#[test]
fn directional_derivative_matches_fd_along_slices() {
    // d/dt sigma_k(lam + t d) at t = 0 equals the slice contraction.
    let mut rng = stream_rng(61, 0);
    for trial in 0..500 {
        let n = 2 + trial % 5;
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lam = Spectrum::new(values.clone()).unwrap();
        let slice = TensorSlice::diagonal(d.clone());
        for k in 1..=n {
            let exact = khess::symfun::directional_d1(k, &lam, &slice).unwrap();
            let fd = common::first_derivative_fd(
                |t| {
                    let moved: Vec<f64> =
                        values.iter().zip(&d).map(|(v, dd)| v + t * dd).collect();
                    sigma_enum(&moved, k)
                },
                1e-6,
            );
            let scale = exact.abs().max(1.0);
            assert!((exact - fd).abs() <= 1e-6 * scale, "n={n} k={k}");
        }
    }
}
