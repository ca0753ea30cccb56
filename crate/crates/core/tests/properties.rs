//! Property tests for the invariants of each module.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kcurv::geometry::{AnalyticSurface, RadialGrid, RadialSurface};
use kcurv::harness::suites::{self, EigSample, GapSample, KappaK, NewtonSample, PermutedSample};
use kcurv::harness::{replay, Tolerances};
use kcurv::lemmas::{self, CascadeParams, ThirdOrderSample, Verdict};
use kcurv::perturb::{b_tensor_derivatives, build_perturbation};
use kcurv::solver::{jacobian, residual, Family, JacobianMode, PrescribedData};
use kcurv::symcalc::{brute_force_sigma, sigma, sigma_jet, CurvatureVector};

fn signed_kappa() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=8)
}

fn positive_sorted(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, min_len..=max_len).prop_map(|mut v| {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
        let m = DMatrix::from_vec(n, n, v);
        (&m + m.transpose()) * 0.5
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn recurrence_matches_enumeration(kappa in signed_kappa(), pick in 0usize..8) {
        let k = 1 + pick % kappa.len();
        let cv = CurvatureVector::new(kappa).unwrap();
        let (a, b) = (sigma(&cv, k).unwrap(), brute_force_sigma(&cv, k).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn euler_and_expansion_identities(kappa in signed_kappa(), pick in 0usize..8) {
        let s = KappaK { k: 1 + pick % kappa.len(), kappa };
        prop_assert!(suites::euler_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
        prop_assert!(suites::expansion_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn permutation_equivariance(kappa in signed_kappa(), pick in 0usize..8, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut permutation: Vec<usize> = (0..kappa.len()).collect();
        permutation.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = PermutedSample { k: 1 + pick % kappa.len(), kappa, permutation };
        prop_assert!(suites::permutation_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn jets_are_symmetric_in_value_and_gradient(kappa in positive_sorted(2, 6)) {
        let cv = CurvatureVector::new(kappa.clone()).unwrap();
        for k in 1..=kappa.len() {
            let jet = sigma_jet(&cv, k).unwrap();
            // the gradient is positive on the positive cone
            prop_assert!(jet.grad.iter().all(|g| *g > 0.0));
            // sigma_k^{pp,qq} is symmetric in p, q
            let h = &jet.hess_diag;
            prop_assert!((h - h.transpose()).amax() <= 1e-12 * (1.0 + h.amax()));
        }
    }

    #[test]
    fn newton_identity_is_polynomial(kappa in prop::collection::vec(-10.0f64..10.0, 2..=8), l in 1usize..8, p in 0usize..8, dq in 1usize..8) {
        let n = kappa.len();
        let s = NewtonSample { l: 1 + (l - 1) % (n - 1), p: p % n, q: (p % n + 1 + dq % (n - 1)) % n, kappa };
        prop_assert!(suites::newton_equality_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn newton_nonnegativity_on_positive_cone(kappa in positive_sorted(2, 8), l in 1usize..8, p in 0usize..8, dq in 1usize..8) {
        let n = kappa.len();
        let s = NewtonSample { l: 1 + (l - 1) % (n - 1), p: p % n, q: (p % n + 1 + dq % (n - 1)) % n, kappa };
        prop_assert!(suites::newton_nonnegativity_margin(&s, suites::INEQUALITY_TOL).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn third_order_inequalities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = ThirdOrderSample::random(&mut rng, 2..=8, true);
        let tol = suites::INEQUALITY_TOL;
        prop_assert!(suites::lemma1_margin(&s, tol).unwrap().unwrap() >= 0.0);
        prop_assert!(suites::quotient_first_margin(&s, tol).unwrap().unwrap() >= 0.0);
        prop_assert!(suites::quotient_second_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
        prop_assert!(suites::decomposition_margin(&s, tol).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn cascade_product_bounds_are_certified_and_covariant(kappa in positive_sorted(2, 6), pick in 0usize..6, slack in 1.0f64..3.0, t in 0.01f64..100.0) {
        let k = 2 + pick % (kappa.len() - 1);
        let cv = CurvatureVector::new(kappa.clone()).unwrap();
        let f = sigma(&cv, k).unwrap() * slack;
        let params = CascadeParams::geometric(k, f).unwrap();
        let out = lemmas::pinching_cascade(&cv, &params).unwrap();
        if let Verdict::ProductBound { bound } = out.verdict {
            prop_assert_eq!(out.certify(&cv, &params), Some(true));
            prop_assert!(bound >= kappa[0]);
        }
        let s = kcurv::harness::suites::CascadeSample { kappa, params, t };
        prop_assert!(suites::cascade_covariance_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
    }

    #[test]
    fn eigen_jets_match_differences(h in (2usize..=5).prop_flat_map(symmetric), seed in any::<u64>()) {
        let n = h.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = EigSample { h, direction: kcurv::sampling::symmetric(&mut rng, n, 1.0) };
        if let Some(m) = suites::eig_first_margin(&s, suites::JET_TOL).unwrap() {
            prop_assert!(m >= 0.0);
            prop_assert!(suites::eig_second_margin(&s, suites::JET_TOL).unwrap().unwrap() >= 0.0);
        }
    }

    #[test]
    fn perturbation_opens_the_gap(seed in any::<u64>()) {
        let s: GapSample = suites::draw_gap(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(suites::gap_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
        prop_assert!(suites::monotone_margin(&s, suites::IDENTITY_TOL).unwrap().unwrap() >= 0.0);
        let op = build_perturbation(&s.h).unwrap();
        prop_assert!(op.tilde_eigs.values()[0] > op.tilde_eigs.values()[1]);
    }

    #[test]
    fn analytic_frames_are_consistent(a in 0.5f64..2.0, b in 0.5f64..2.0, c in 0.5f64..2.0, theta in 0.3f64..2.8, phi in -3.0f64..3.0) {
        let s = AnalyticSurface::ellipsoid(a, b, c).unwrap();
        let frame = s.frame_at(theta, phi).unwrap();
        prop_assert!(frame.invariant_defect() <= 1e-10);
        prop_assert!(frame.support > 0.0);
        let exact = s.closed_form_curvatures(theta, phi).unwrap();
        for (x, y) in frame.principal.values().iter().zip(exact.values()) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn star_shaped_profiles_have_positive_support(amp in 0.0f64..0.15, mode in 1u32..4, nodes in 8usize..40) {
        let grid = RadialGrid::Axisymmetric { nodes };
        let surface = RadialSurface::from_fn(grid, |u| 1.0 + amp * (mode as f64 * u[0]).cos()).unwrap();
        prop_assert!(surface.support_values().unwrap().iter().all(|u| *u > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobian_assemblies_agree(amp in 0.0f64..0.08, mode in 1u32..4, k in 1usize..=2, a in 0.0f64..0.3) {
        let grid = RadialGrid::Axisymmetric { nodes: 16 };
        let surface = RadialSurface::from_fn(grid, |u| 1.0 + amp * (mode as f64 * u[0]).cos()).unwrap();
        let data = PrescribedData::new(Family::NormalEven { c: 1.0, a }).unwrap();
        if residual(&surface, &data, k).is_err() {
            return Ok(());
        }
        let fd = jacobian(&surface, &data, k, JacobianMode::FiniteDifference).unwrap();
        let an = jacobian(&surface, &data, k, JacobianMode::Analytic).unwrap();
        prop_assert!((&fd - &an).amax() <= 1e-6 * (1.0 + an.amax()));
    }

    #[test]
    fn worst_samples_replay_exactly(seed in any::<u64>()) {
        let tols = Tolerances::default();
        for suite in ["sigma-oracle", "newton-identity", "quotient-chain", "perturbation-gap", "cascade"] {
            let r = kcurv::harness::run_suite(suite, 20, seed, &tols).unwrap();
            prop_assert!(!r.hard_failure);
            for c in &r.checks {
                prop_assert!(c.passed <= c.admissible && c.admissible <= c.attempted);
                if let (Some(m), Some(s)) = (c.worst_margin, &c.worst_sample) {
                    let again = replay(&format!("{suite}/{}", c.name), s, c.tolerance).unwrap().unwrap();
                    prop_assert!((again - m).abs() <= 1e-14, "{suite}/{}", c.name);
                }
            }
        }
    }
}

#[test]
fn b_tensor_vanishes_in_a_normal_frame() {
    let zero = vec![DMatrix::zeros(3, 3); 3];
    let d = b_tensor_derivatives(&zero);
    assert!(d.first.iter().all(|x| *x == 0.0));
    assert!(d.second_11.iter().all(|x| *x == 0.0));
    let op = build_perturbation(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0, 1.0]))).unwrap();
    assert_eq!(op.tilde_eigs.values()[0], 3.0);
    assert_eq!(op.tilde_eigs.values()[1], 2.0);
}
