//! Verification suites: seeded sample generators and margin functions.
//!
//! Every check maps one sample to a dimensionless margin that is
//! non-negative exactly when the check passes (`None` marks a sample outside
//! the check's domain). Samples are plain serialisable structs, so the worst
//! case of a run can be replayed through [`replay`].

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CheckSummary, Tolerances};
use crate::geometry::identities::{refinement_ladder, sample_points, Identity, RESIDUAL_FLOOR, MIN_ORDER};
use crate::geometry::{AnalyticSurface, Chart, RadialGraph};
use crate::lemmas::{self, CascadeParams, ThirdOrderSample, Verdict};
use crate::perturb::{build_perturbation, fd_eig_oracle, top_eigen_jet};
use crate::symcalc::{brute_force_jet, brute_force_sigma, sigma, sigma_jet, CurvatureVector};
use crate::tolerance::relative_error;
use crate::{sampling, Error, Result};

/// Relative tolerance for value and identity checks.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative tolerance for derivative-versus-oracle checks.
pub const JET_TOL: f64 = 1e-6;
/// Scaled tolerance for inequality margins.
pub const INEQUALITY_TOL: f64 = 1e-10;
/// Oracle entries smaller than this are excluded from relative jet
/// comparisons.
pub const JET_EXCLUSION: f64 = 1e-8;
/// Smallest eigenvalue gap admitted by the eigenvalue-jet suite.
pub const EIG_GAP_FLOOR: f64 = 1e-2;
/// Eigenvalue derivatives below this fraction of their natural magnitude
/// are compared absolutely against that fraction.
pub const EIG_SCALE_FLOOR: f64 = 1e-4;

/// Accumulates one check.
pub(crate) struct Tally {
    pub summary: CheckSummary,
}

impl Tally {
    pub fn new(name: &str, tolerance: f64) -> Self {
        Tally {
            summary: CheckSummary {
                name: name.into(),
                tolerance,
                attempted: 0,
                admissible: 0,
                passed: 0,
                worst_margin: None,
                worst_sample: None,
                skipped_errors: 0,
            },
        }
    }

    pub fn record<S: Serialize>(&mut self, margin: Result<Option<f64>>, sample: &S) {
        let s = &mut self.summary;
        s.attempted += 1;
        match margin {
            Ok(Some(m)) => {
                s.admissible += 1;
                if m >= 0.0 {
                    s.passed += 1;
                }
                if s.worst_margin.map_or(true, |w| m < w || m.is_nan()) {
                    s.worst_margin = Some(m);
                    s.worst_sample = serde_json::to_value(sample).ok();
                }
            }
            Ok(None) => {}
            Err(_) => s.skipped_errors += 1,
        }
    }
}

fn cv(v: &[f64]) -> Result<CurvatureVector> {
    CurvatureVector::new(v.to_vec())
}

// ---------------------------------------------------------------- sigma

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaK {
    pub kappa: Vec<f64>,
    pub k: usize,
}

/// Signed entries, log-uniform magnitudes in `[1e-2, 1e1]`, `n <= 8`.
pub fn draw_sigma_kappa(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.gen_range(1..=8);
    sampling::signed_log_uniform(rng, n, 1e-2, 1e1)
}

pub fn sigma_value_margin(s: &KappaK, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let (a, b) = (sigma(&kappa, s.k)?, brute_force_sigma(&kappa, s.k)?);
    Ok(Some(1.0 - (a - b).abs() / (tol * (1.0 + a.abs()))))
}

pub fn sigma_jet_margin(s: &KappaK, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let (a, b) = (sigma_jet(&kappa, s.k)?, brute_force_jet(&kappa, s.k)?);
    let n = kappa.dim();
    let mut worst: f64 = 0.0;
    let mut cmp = |x: f64, oracle: f64| {
        if oracle.abs() >= JET_EXCLUSION {
            worst = worst.max(relative_error(x, oracle));
        }
    };
    for i in 0..n {
        cmp(a.grad[i], b.grad[i]);
        for j in 0..n {
            if i != j {
                cmp(a.hess_diag[(i, j)], b.hess_diag[(i, j)]);
                cmp(a.hess_offtype[(i, j)], b.hess_offtype[(i, j)]);
            }
        }
    }
    Ok(Some(1.0 - worst / tol))
}

pub fn euler_margin(s: &KappaK, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let jet = sigma_jet(&kappa, s.k)?;
    let summands: f64 = (0..kappa.dim()).map(|i| (jet.grad[i] * s.kappa[i]).abs()).sum::<f64>()
        + s.k as f64 * jet.value.abs();
    Ok(Some(1.0 - jet.euler_residual(&kappa).abs() / (tol * (1.0 + summands))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutedSample {
    pub kappa: Vec<f64>,
    pub k: usize,
    pub permutation: Vec<usize>,
}

/// Value invariance and gradient equivariance under a permutation.
pub fn permutation_margin(s: &PermutedSample, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let permuted = cv(&s.permutation.iter().map(|&i| s.kappa[i]).collect::<Vec<_>>())?;
    let (a, b) = (sigma_jet(&kappa, s.k)?, sigma_jet(&permuted, s.k)?);
    let scale = |x: f64| tol * (1.0 + x.abs());
    let mut worst = (a.value - b.value).abs() / scale(a.value);
    for (new, &old) in s.permutation.iter().enumerate() {
        worst = worst.max((a.grad[old] - b.grad[new]).abs() / scale(a.grad[old]));
    }
    Ok(Some(1.0 - worst))
}

/// `sigma_k = kappa_1 sigma_k^{11} + sigma_k(kappa|1)`.
pub fn expansion_margin(s: &KappaK, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let v = s.kappa.as_slice();
    let full = crate::symcalc::sigma_restricted(&kappa, s.k as isize, &[])?;
    let first = v[0] * crate::symcalc::sigma_restricted(&kappa, s.k as isize - 1, &[0])?;
    let rest = crate::symcalc::sigma_restricted(&kappa, s.k as isize, &[0])?;
    let scale = tol * (1.0 + full.abs() + first.abs() + rest.abs());
    Ok(Some(1.0 - (full - first - rest).abs() / scale))
}

// ---------------------------------------------------------------- lemmas

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewtonSample {
    pub kappa: Vec<f64>,
    pub l: usize,
    pub p: usize,
    pub q: usize,
}

pub fn draw_newton(rng: &mut ChaCha8Rng, positive: bool) -> NewtonSample {
    let n = rng.gen_range(2..=8);
    let kappa = if positive {
        sampling::convex_sorted(rng, n, 1e-2, 1e1)
    } else {
        sampling::signed_log_uniform(rng, n, 1e-2, 1e1)
    };
    let l = rng.gen_range(1..n);
    let p = rng.gen_range(0..n);
    let q = (p + rng.gen_range(1..n)) % n;
    NewtonSample { kappa, l, p, q }
}

pub fn newton_equality_margin(s: &NewtonSample, tol: f64) -> Result<Option<f64>> {
    let r = lemmas::check_newton_identity(&cv(&s.kappa)?, s.l, s.p, s.q)?;
    Ok(Some(1.0 - r.residual.abs() / (tol * r.scale)))
}

pub fn newton_nonnegativity_margin(s: &NewtonSample, tol: f64) -> Result<Option<f64>> {
    let r = lemmas::check_newton_identity(&cv(&s.kappa)?, s.l, s.p, s.q)?;
    if !r.positive {
        return Ok(None);
    }
    Ok(Some(r.rhs / (tol * r.scale) + 1.0))
}

fn valid_third_order(s: &ThirdOrderSample) -> bool {
    s.validate().is_ok()
}

pub fn lemma1_margin(s: &ThirdOrderSample, tol: f64) -> Result<Option<f64>> {
    if !valid_third_order(s) {
        return Ok(None);
    }
    let m = lemmas::check_lemma1(s)?;
    Ok(Some(m.relative() / tol + 1.0))
}

pub fn quotient_first_margin(s: &ThirdOrderSample, tol: f64) -> Result<Option<f64>> {
    if !valid_third_order(s) || s.l == 0 {
        return Ok(None);
    }
    let r = lemmas::check_quotient_chain(s)?;
    Ok(Some(r.first.relative() / tol + 1.0))
}

pub fn quotient_second_margin(s: &ThirdOrderSample, tol: f64) -> Result<Option<f64>> {
    if !valid_third_order(s) || s.l == 0 {
        return Ok(None);
    }
    let r = lemmas::check_quotient_chain(s)?;
    Ok(Some(1.0 - r.second.relative().abs() / tol))
}

pub fn decomposition_margin(s: &ThirdOrderSample, tol: f64) -> Result<Option<f64>> {
    if !valid_third_order(s) {
        return Ok(None);
    }
    let r = lemmas::check_decomposition_step(s)?;
    Ok(Some(r.margin.relative() / tol + 1.0))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaKL {
    pub kappa: Vec<f64>,
    pub k: usize,
    pub l: usize,
}

pub fn draw_kappa_kl(rng: &mut ChaCha8Rng) -> KappaKL {
    let n = rng.gen_range(1..=8);
    let kappa = sampling::convex_sorted(rng, n, 1e-2, 1e1);
    KappaKL {
        kappa,
        k: rng.gen_range(1..=n),
        l: rng.gen_range(1..=n),
    }
}

pub fn exact_identity_margin(s: &KappaKL, tol: f64) -> Result<Option<f64>> {
    let r = lemmas::check_exact_identities(&cv(&s.kappa)?, s.k, s.l)?;
    let worst = (r.expansion_residual.abs() / r.expansion_scale).max(r.ratio_residual.abs() / r.ratio_scale);
    Ok(Some(1.0 - worst / tol))
}

pub fn ratio_bound_margin(s: &KappaKL, tol: f64) -> Result<Option<f64>> {
    let r = lemmas::check_exact_identities(&cv(&s.kappa)?, s.k, s.l)?;
    Ok(Some((r.ratio_k - 1.0) / tol + 1.0))
}

// ---------------------------------------------------------------- perturb

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigSample {
    pub h: DMatrix<f64>,
    pub direction: DMatrix<f64>,
}

pub fn draw_eig(rng: &mut ChaCha8Rng) -> EigSample {
    let n = rng.gen_range(2..=6);
    EigSample {
        h: sampling::symmetric(rng, n, 3.0),
        direction: sampling::symmetric(rng, n, 1.0),
    }
}

fn eig_margin(s: &EigSample, tol: f64, second: bool) -> Result<Option<f64>> {
    let jet = top_eigen_jet(&s.h)?;
    if jet.gaps.len() > 1 && jet.gaps[1] < EIG_GAP_FLOOR {
        return Ok(None);
    }
    let fd = fd_eig_oracle(&s.h, &s.direction)?;
    let d = s.direction.norm();
    // natural magnitudes: |D| for the first derivative, |D|^2 / gap for the second
    let (a, b, natural) = if second {
        (jet.directional_second(&s.direction), fd.second, d * d / jet.gaps[1].min(1e300))
    } else {
        (jet.directional_first(&s.direction), fd.first, d)
    };
    let err = (a - b).abs() / a.abs().max(b.abs()).max(EIG_SCALE_FLOOR * natural).max(1e-8);
    Ok(Some(1.0 - err / tol))
}

pub fn eig_first_margin(s: &EigSample, tol: f64) -> Result<Option<f64>> {
    eig_margin(s, tol, false)
}

pub fn eig_second_margin(s: &EigSample, tol: f64) -> Result<Option<f64>> {
    eig_margin(s, tol, true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapSample {
    pub h: DMatrix<f64>,
}

/// Positive semidefinite `h = Q diag(lambda) Q^T`, with a tied top
/// eigenvalue in a third of the draws.
pub fn draw_gap(rng: &mut ChaCha8Rng) -> GapSample {
    let n = rng.gen_range(2..=6);
    let mut lambda = sampling::convex_sorted(rng, n, 1e-2, 1e1);
    if rng.gen_bool(1.0 / 3.0) {
        let ties = rng.gen_range(1..n);
        for i in 1..=ties {
            lambda[i] = lambda[0];
        }
    }
    let a = sampling::symmetric(rng, n, 1.0) + DMatrix::from_fn(n, n, |i, j| if i < j { 1.0 } else { 0.0 });
    let q = a.qr().q();
    GapSample {
        h: &q * DMatrix::from_diagonal(&DVector::from_vec(lambda)) * q.transpose(),
    }
}

/// `kappa~_1 - kappa~_2 >= min(1, kappa_1 - kappa_2 + 1)`.
pub fn gap_margin(s: &GapSample, tol: f64) -> Result<Option<f64>> {
    let op = build_perturbation(&s.h)?;
    let base = op.base_eigs.values();
    if base[1] < 0.0 {
        return Ok(None);
    }
    let required = (base[0] - base[1] + 1.0).min(1.0);
    Ok(Some((op.gap() - required) / (tol * (1.0 + s.h.amax())) + 1.0))
}

/// `lambda_max(h) >= lambda_max(h - B)`.
pub fn monotone_margin(s: &GapSample, tol: f64) -> Result<Option<f64>> {
    let op = build_perturbation(&s.h)?;
    let diff = op.base_eigs.values()[0] - op.tilde_eigs.values()[0];
    Ok(Some(diff / (tol * (1.0 + s.h.amax())) + 1.0))
}

// ---------------------------------------------------------------- cascade

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CascadeSample {
    pub kappa: Vec<f64>,
    pub params: CascadeParams,
    pub t: f64,
}

pub fn draw_cascade(rng: &mut ChaCha8Rng) -> CascadeSample {
    let n = rng.gen_range(2..=6);
    let mut kappa = sampling::convex_sorted(rng, n, 1e-3, 1e1);
    if rng.gen_bool(0.3) {
        // nearly umbilic points reach the product bound
        let top = kappa[0];
        kappa.iter_mut().for_each(|x| *x = top * rng.gen_range(0.5..=1.0));
        kappa.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    let k = rng.gen_range(2..=n);
    let sk = crate::symcalc::sigma_restricted(&CurvatureVector::new(kappa.clone()).unwrap(), k as isize, &[]).unwrap();
    let params = CascadeParams::geometric(k, sk * rng.gen_range(1.0..3.0)).unwrap();
    CascadeSample {
        kappa,
        params,
        t: sampling::log_uniform(rng, 1e-2, 1e2),
    }
}

/// For product-bound verdicts: `delta_k^k kappa_1^k < sigma_k`, margin
/// relative to `sigma_k`.
pub fn cascade_certificate_margin(s: &CascadeSample, _tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let out = lemmas::pinching_cascade(&kappa, &s.params)?;
    if !matches!(out.verdict, Verdict::ProductBound { .. }) {
        return Ok(None);
    }
    let k = s.params.delta_seq.len();
    let dk = s.params.delta_seq[k - 1];
    let sk = crate::symcalc::sigma_restricted(&kappa, k as isize, &[])?;
    let certified = out.certify(&kappa, &s.params) == Some(true);
    let m = (sk - (dk * s.kappa[0]).powi(k as i32)) / sk;
    Ok(Some(if certified { m } else { m.min(-f64::MIN_POSITIVE) }))
}

/// Scaling `kappa` by `t` and `f_bound` by `t^k` keeps the verdict and
/// scales the product bound by `t`.
pub fn cascade_covariance_margin(s: &CascadeSample, tol: f64) -> Result<Option<f64>> {
    let kappa = cv(&s.kappa)?;
    let k = s.params.delta_seq.len();
    let base = lemmas::pinching_cascade(&kappa, &s.params)?;
    let mut scaled_params = s.params.clone();
    scaled_params.f_bound *= s.t.powi(k as i32);
    let scaled = lemmas::pinching_cascade(&kappa.scaled(s.t)?, &scaled_params)?;
    Ok(Some(match (base.verdict, scaled.verdict) {
        (Verdict::ProductBound { bound: a }, Verdict::ProductBound { bound: b }) => 1.0 - relative_error(b, s.t * a) / tol,
        (x, y) if x == y => 1.0,
        _ => -1.0,
    }))
}

// ---------------------------------------------------------------- geometry

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySample {
    pub surface: String,
    pub point: [f64; 2],
    pub identity: Identity,
}

/// Ladder base step and depth for the identity suite.
pub const LADDER_BASE_STEP: f64 = 0.04;
pub const LADDER_LEVELS: usize = 3;

pub const GEOMETRY_SURFACES: [&str; 4] = ["sphere", "spheroid", "ellipsoid", "perturbed_sphere"];

pub fn surface_by_name(name: &str) -> Result<Box<dyn Chart>> {
    Ok(match name {
        "sphere" => Box::new(AnalyticSurface::sphere(1.0)?),
        "spheroid" => Box::new(AnalyticSurface::spheroid(1.0, 2.0)?),
        "ellipsoid" => Box::new(AnalyticSurface::ellipsoid(1.0, 1.2, 1.5)?),
        "perturbed_sphere" => Box::new(RadialGraph::perturbed_sphere(0.05)),
        other => return Err(Error::validation("surface", format!("unknown test surface `{other}`"))),
    })
}

/// `min observed order - 1.8`; ladders entirely below the rounding floor
/// count as converged with margin 1.
pub fn ladder_margin(s: &GeometrySample, _tol: f64) -> Result<Option<f64>> {
    let chart = surface_by_name(&s.surface)?;
    let ladder = refinement_ladder(chart.as_ref(), &s.point, s.identity, LADDER_BASE_STEP, LADDER_LEVELS)?;
    Ok(Some(match ladder.min_order() {
        Some(o) => o - MIN_ORDER,
        None if ladder.residuals.iter().all(|r| *r <= RESIDUAL_FLOOR) => 1.0,
        None => -1.0,
    }))
}

/// Richardson-extrapolated residual on the unit sphere at step `1e-3`,
/// against `1e-8`.
pub fn sphere_extrapolated_margin(s: &GeometrySample, _tol: f64) -> Result<Option<f64>> {
    if s.surface != "sphere" {
        return Ok(None);
    }
    let chart = surface_by_name(&s.surface)?;
    let ladder = refinement_ladder(chart.as_ref(), &s.point, s.identity, 2e-3, 2)?;
    Ok(Some(1.0 - ladder.extrapolated / 1e-8))
}

pub fn geometry_samples(points: usize) -> Vec<GeometrySample> {
    let mut out = Vec::new();
    for surface in GEOMETRY_SURFACES {
        for p in sample_points(points) {
            for identity in Identity::ALL {
                out.push(GeometrySample {
                    surface: surface.into(),
                    point: p,
                    identity,
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------- registry

type MarginFn<S> = fn(&S, f64) -> Result<Option<f64>>;

fn run_typed<S: DeserializeOwned>(sample: &Value, f: MarginFn<S>, tol: f64) -> Result<Option<f64>> {
    let s: S = serde_json::from_value(sample.clone())?;
    f(&s, tol)
}

/// Default tolerance of each named check (`suite/check`).
pub fn default_tolerance(check: &str) -> f64 {
    match check {
        "sigma-jet/jet" | "eig-jet/first" | "eig-jet/second" => JET_TOL,
        "lemma1/margin" | "quotient-chain/first" | "decomposition/margin" | "newton-identity/nonnegativity" => INEQUALITY_TOL,
        _ => IDENTITY_TOL,
    }
}

/// Recomputes the margin of `check` on a serialised sample.
pub fn replay(check: &str, sample: &Value, tol: f64) -> Result<Option<f64>> {
    match check {
        "sigma-oracle/value" => run_typed(sample, sigma_value_margin, tol),
        "sigma-oracle/expansion" => run_typed(sample, expansion_margin, tol),
        "sigma-oracle/permutation" => run_typed(sample, permutation_margin, tol),
        "sigma-jet/jet" => run_typed(sample, sigma_jet_margin, tol),
        "euler/euler" => run_typed(sample, euler_margin, tol),
        "newton-identity/equality" => run_typed(sample, newton_equality_margin, tol),
        "newton-identity/nonnegativity" => run_typed(sample, newton_nonnegativity_margin, tol),
        "lemma1/margin" => run_typed(sample, lemma1_margin, tol),
        "quotient-chain/first" => run_typed(sample, quotient_first_margin, tol),
        "quotient-chain/second" => run_typed(sample, quotient_second_margin, tol),
        "decomposition/margin" => run_typed(sample, decomposition_margin, tol),
        "exact-identities/identities" => run_typed(sample, exact_identity_margin, tol),
        "exact-identities/ratio" => run_typed(sample, ratio_bound_margin, tol),
        "eig-jet/first" => run_typed(sample, eig_first_margin, tol),
        "eig-jet/second" => run_typed(sample, eig_second_margin, tol),
        "perturbation-gap/gap" => run_typed(sample, gap_margin, tol),
        "perturbation-gap/monotone" => run_typed(sample, monotone_margin, tol),
        "cascade/certificate" => run_typed(sample, cascade_certificate_margin, tol),
        "cascade/covariance" => run_typed(sample, cascade_covariance_margin, tol),
        "geometry-identities/ladder" => run_typed(sample, ladder_margin, tol),
        "geometry-identities/sphere-extrapolated" => run_typed(sample, sphere_extrapolated_margin, tol),
        other => Err(Error::validation("check", format!("unknown check `{other}`"))),
    }
}

/// Runs the checks of one suite on `samples` draws.
pub(crate) fn run_suite(suite: &str, rng: &mut ChaCha8Rng, samples: usize, tols: &Tolerances) -> Result<(Vec<CheckSummary>, Option<Value>)> {
    let t = |check: &str| tols.get(&format!("{suite}/{check}"));
    let mut details = None;
    let tallies: Vec<Tally> = match suite {
        "sigma-oracle" => {
            let (tv, te, tp) = (t("value"), t("expansion"), t("permutation"));
            let mut value = Tally::new("value", tv);
            let mut expansion = Tally::new("expansion", te);
            let mut perm = Tally::new("permutation", tp);
            for _ in 0..samples {
                let kappa = draw_sigma_kappa(rng);
                let mut order: Vec<usize> = (0..kappa.len()).collect();
                order.shuffle(rng);
                for k in 1..=kappa.len() {
                    let s = KappaK { kappa: kappa.clone(), k };
                    value.record(sigma_value_margin(&s, tv), &s);
                    expansion.record(expansion_margin(&s, te), &s);
                    let ps = PermutedSample {
                        kappa: kappa.clone(),
                        k,
                        permutation: order.clone(),
                    };
                    perm.record(permutation_margin(&ps, tp), &ps);
                }
            }
            vec![value, expansion, perm]
        }
        "sigma-jet" => {
            let tj = t("jet");
            let mut jet = Tally::new("jet", tj);
            for _ in 0..samples {
                let kappa = draw_sigma_kappa(rng);
                for k in 1..=kappa.len() {
                    let s = KappaK { kappa: kappa.clone(), k };
                    jet.record(sigma_jet_margin(&s, tj), &s);
                }
            }
            vec![jet]
        }
        "euler" => {
            let te = t("euler");
            let mut euler = Tally::new("euler", te);
            for _ in 0..samples {
                let kappa = draw_sigma_kappa(rng);
                for k in 1..=kappa.len() {
                    let s = KappaK { kappa: kappa.clone(), k };
                    euler.record(euler_margin(&s, te), &s);
                }
            }
            vec![euler]
        }
        "newton-identity" => {
            let (te, tn) = (t("equality"), t("nonnegativity"));
            let mut eq = Tally::new("equality", te);
            let mut nn = Tally::new("nonnegativity", tn);
            for _ in 0..samples {
                let s = draw_newton(rng, false);
                eq.record(newton_equality_margin(&s, te), &s);
                let s = draw_newton(rng, true);
                eq.record(newton_equality_margin(&s, te), &s);
                nn.record(newton_nonnegativity_margin(&s, tn), &s);
            }
            vec![eq, nn]
        }
        "lemma1" | "decomposition" => {
            let tm = t("margin");
            let mut m = Tally::new("margin", tm);
            let f: MarginFn<ThirdOrderSample> = if suite == "lemma1" { lemma1_margin } else { decomposition_margin };
            for _ in 0..samples {
                let s = ThirdOrderSample::random(rng, 2..=8, false);
                m.record(f(&s, tm), &s);
            }
            vec![m]
        }
        "quotient-chain" => {
            let (t1, t2) = (t("first"), t("second"));
            let mut first = Tally::new("first", t1);
            let mut second = Tally::new("second", t2);
            for _ in 0..samples {
                let s = ThirdOrderSample::random(rng, 2..=8, true);
                first.record(quotient_first_margin(&s, t1), &s);
                second.record(quotient_second_margin(&s, t2), &s);
            }
            vec![first, second]
        }
        "exact-identities" => {
            let (ti, tr) = (t("identities"), t("ratio"));
            let mut id = Tally::new("identities", ti);
            let mut ratio = Tally::new("ratio", tr);
            for _ in 0..samples {
                let s = draw_kappa_kl(rng);
                id.record(exact_identity_margin(&s, ti), &s);
                ratio.record(ratio_bound_margin(&s, tr), &s);
            }
            vec![id, ratio]
        }
        "eig-jet" => {
            let (t1, t2) = (t("first"), t("second"));
            let mut first = Tally::new("first", t1);
            let mut second = Tally::new("second", t2);
            for _ in 0..samples {
                let s = draw_eig(rng);
                first.record(eig_first_margin(&s, t1), &s);
                second.record(eig_second_margin(&s, t2), &s);
            }
            vec![first, second]
        }
        "perturbation-gap" => {
            let (tg, tm) = (t("gap"), t("monotone"));
            let mut gap = Tally::new("gap", tg);
            let mut mono = Tally::new("monotone", tm);
            for _ in 0..samples {
                let s = draw_gap(rng);
                gap.record(gap_margin(&s, tg), &s);
                mono.record(monotone_margin(&s, tm), &s);
            }
            vec![gap, mono]
        }
        "cascade" => {
            let (tc, tv) = (t("certificate"), t("covariance"));
            let mut cert = Tally::new("certificate", tc);
            let mut cov = Tally::new("covariance", tv);
            for _ in 0..samples {
                let s = draw_cascade(rng);
                cert.record(cascade_certificate_margin(&s, tc), &s);
                cov.record(cascade_covariance_margin(&s, tv), &s);
            }
            vec![cert, cov]
        }
        "geometry-identities" => {
            let (tl, ts) = (t("ladder"), t("sphere-extrapolated"));
            let mut ladder = Tally::new("ladder", tl);
            let mut sphere = Tally::new("sphere-extrapolated", ts);
            for s in geometry_samples(geometry_points(samples)) {
                ladder.record(ladder_margin(&s, tl), &s);
                sphere.record(sphere_extrapolated_margin(&s, ts), &s);
            }
            vec![ladder, sphere]
        }
        "probe-constants" => {
            let mut reports = Vec::new();
            for dp in [0.1, 0.01] {
                let stream: Vec<CurvatureVector> = (0..samples)
                    .map(|_| CurvatureVector::new(sampling::pinched(rng, 5, 2, 0.3, dp)).unwrap())
                    .collect();
                reports.push(lemmas::probe_constant_bounds(&stream, 3, 2, 0.3, dp)?);
            }
            details = Some(serde_json::to_value(&reports)?);
            Vec::new()
        }
        other => return Err(Error::validation("suite", format!("unknown suite `{other}`"))),
    };
    Ok((tallies.into_iter().map(|t| t.summary).collect(), details))
}

/// Points per test surface used by the identity suite.
pub fn geometry_points(samples: usize) -> usize {
    samples.clamp(1, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn margins_on_known_samples() {
        let s = KappaK { kappa: vec![3.0, 2.0, 1.0], k: 2 };
        assert_eq!(sigma_value_margin(&s, IDENTITY_TOL).unwrap(), Some(1.0));
        assert!(sigma_jet_margin(&s, JET_TOL).unwrap().unwrap() > 0.0);
        assert!(euler_margin(&s, IDENTITY_TOL).unwrap().unwrap() > 0.0);
        let n = NewtonSample { kappa: vec![3.0, 2.0, 1.0], l: 2, p: 0, q: 1 };
        assert!(newton_nonnegativity_margin(&n, INEQUALITY_TOL).unwrap().unwrap() > 0.0);
        let n = NewtonSample { kappa: vec![3.0, -2.0, 1.0], l: 2, p: 0, q: 1 };
        assert_eq!(newton_nonnegativity_margin(&n, INEQUALITY_TOL).unwrap(), None);
    }

    #[test]
    fn replay_reproduces_margins() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = ThirdOrderSample::random(&mut rng, 2..=6, true);
        let v = serde_json::to_value(&s).unwrap();
        let direct = quotient_first_margin(&s, INEQUALITY_TOL).unwrap();
        assert_eq!(replay("quotient-chain/first", &v, INEQUALITY_TOL).unwrap(), direct);
        let e = draw_eig(&mut rng);
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(replay("eig-jet/second", &v, JET_TOL).unwrap(), eig_second_margin(&e, JET_TOL).unwrap());
        assert!(replay("bogus/check", &v, 1.0).is_err());
    }

    #[test]
    fn tally_counts() {
        let mut t = Tally::new("x", 1.0);
        t.record(Ok(Some(0.5)), &1);
        t.record(Ok(Some(-0.5)), &2);
        t.record(Ok(None), &3);
        t.record(Err(Error::Domain("x".into())), &4);
        let s = t.summary;
        assert_eq!((s.attempted, s.admissible, s.passed, s.skipped_errors), (4, 2, 1, 1));
        assert_eq!(s.worst_margin, Some(-0.5));
        assert_eq!(s.worst_sample, Some(serde_json::json!(2)));
    }
}
