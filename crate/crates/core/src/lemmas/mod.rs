//! Numerical checks of the inequality chain behind the curvature estimate.
//!
//! The third-order data at the maximum point enters only through the
//! symmetric slice `s_ab = h_{ab1}` (Codazzi makes `h` totally symmetric in
//! its three indices), so a [`ThirdOrderSample`] is a curvature vector plus
//! one symmetric matrix. Every check returns both sides of its display and
//! a signed margin; comparisons use `tol * scale` with
//! `scale = 1 + sum |summands|`.
//!
//! Indices in this module are 0-based: index 0 is the direction of the
//! largest curvature.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sampling;
use crate::symcalc::{binomial, sigma_conv, sigma_jet, CurvatureVector};
use crate::{Error, Result};

/// Tolerance for inequality margins.
pub const INEQUALITY_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderSample {
    pub kappa: CurvatureVector,
    /// `s[(a, b)] = h_{ab1}`.
    pub s: DMatrix<f64>,
    pub k: usize,
    pub l: usize,
}

impl ThirdOrderSample {
    pub fn new(kappa: CurvatureVector, s: DMatrix<f64>, k: usize, l: usize) -> Result<Self> {
        let sample = Self { kappa, s, k, l };
        sample.validate()?;
        Ok(sample)
    }

    /// Checks the sample invariants: strictly positive descending `kappa`
    /// with `kappa_1 >= 1`, symmetric `s` of matching size, `1 <= k <= n`
    /// and `l <= k - 1` (with `l = 0` allowed when `l` is unused).
    pub fn validate(&self) -> Result<()> {
        let n = self.kappa.dim();
        let v = self.kappa.values();
        if !self.kappa.is_strictly_positive() || !self.kappa.is_sorted() {
            return Err(Error::Domain("curvatures must be strictly positive and descending".into()));
        }
        if v[0] < 1.0 {
            return Err(Error::Domain(format!("kappa_1 = {} must be at least 1", v[0])));
        }
        if self.s.shape() != (n, n) {
            return Err(Error::Domain("third-order slice has the wrong shape".into()));
        }
        if (&self.s - self.s.transpose()).amax() > 1e-12 * (1.0 + self.s.amax()) {
            return Err(Error::NotSymmetric((&self.s - self.s.transpose()).amax()));
        }
        if self.k == 0 || self.k > n {
            return Err(Error::Domain(format!("k = {} outside 1..={n}", self.k)));
        }
        if self.l >= self.k && self.l != 0 {
            return Err(Error::Domain(format!("l = {} must be at most k - 1 = {}", self.l, self.k - 1)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.kappa.dim()
    }

    /// Perturbed curvatures `kappa~_p = kappa_p - 1` for `p > 1`.
    pub fn kappa_tilde(&self, p: usize) -> f64 {
        let v = self.kappa.values();
        if p == 0 {
            v[0]
        } else {
            v[p] - 1.0
        }
    }

    /// Random admissible sample: `n` in `n_range`, `kappa` positive and
    /// log-uniform over `[1e-2, 1e1]` rescaled so that `kappa_1 >= 1`, with
    /// occasional ties at the top; `s` with entries of random scale.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_range: std::ops::RangeInclusive<usize>, need_l: bool) -> Self {
        let n = rng.gen_range(n_range);
        let mut v = sampling::convex_sorted(rng, n, 1e-2, 1e1);
        if v[0] < 1.0 {
            let t = 1.0 / v[0] * rng.gen_range(1.0..4.0);
            v.iter_mut().for_each(|x| *x *= t);
        }
        if n > 1 && rng.gen_bool(0.2) {
            let ties = rng.gen_range(1..n);
            for i in 1..=ties {
                v[i] = v[0];
            }
        }
        let k = rng.gen_range(if need_l { 2.min(n) } else { 1 }..=n);
        let l = if need_l && k >= 2 { rng.gen_range(1..k) } else { 0 };
        let scale = sampling::log_uniform(rng, 1e-2, 1e2);
        let s = sampling::symmetric(rng, n, scale);
        Self {
            kappa: CurvatureVector::new(v).expect("finite"),
            s,
            k,
            l,
        }
    }
}

/// Both sides of an inequality `lhs <= rhs` (or an identity `lhs = rhs`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    /// `1 + sum |summands|`.
    pub scale: f64,
}

impl Margin {
    fn new(lhs: f64, rhs: f64, summands: &[f64]) -> Self {
        Margin {
            lhs,
            rhs,
            margin: rhs - lhs,
            scale: 1.0 + summands.iter().map(|x| x.abs()).sum::<f64>(),
        }
    }

    /// Inequality holds up to `tol * scale`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol * self.scale
    }

    /// Identity holds up to `tol * scale`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.margin.abs() <= tol * self.scale
    }

    /// Margin in units of the scale.
    pub fn relative(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Indices `p > 1` with `kappa_p = kappa_1`.
pub fn top_tie_set(kappa: &CurvatureVector) -> Vec<usize> {
    let v = kappa.values();
    (1..v.len()).filter(|&p| v[p] == v[0]).collect()
}

/// The third-order gradient inequality
/// `sum_{p>1} sigma_k^{pp} h_11p^2 / kappa_1^2 <= 2 sum_{p>1} sigma_k^{11,pp} h_11p^2 / kappa_1
///  + 2 sum_{p>1} sigma_k^{11} h_11p^2 / (kappa_1 (kappa_1 - kappa~_p))`.
pub fn check_lemma1(sample: &ThirdOrderSample) -> Result<Margin> {
    sample.validate()?;
    let jet = sigma_jet(&sample.kappa, sample.k)?;
    let k1 = sample.kappa.values()[0];
    let mut terms = Vec::new();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for p in 1..sample.dim() {
        let h2 = sample.s[(0, p)].powi(2);
        let l = jet.grad[p] * h2 / (k1 * k1);
        let r1 = 2.0 * jet.hess_diag[(0, p)] * h2 / k1;
        let r2 = 2.0 * jet.grad[0] * h2 / (k1 * (k1 - sample.kappa_tilde(p)));
        lhs += l;
        rhs += r1 + r2;
        terms.extend([l, r1, r2]);
    }
    Ok(Margin::new(lhs, rhs, &terms))
}

/// `sigma_l^{pp} sigma_l^{qq} - sigma_l sigma_l^{pp,qq}` against
/// `sigma_{l-1}^2(kappa|pq) - sigma_l(kappa|pq) sigma_{l-2}(kappa|pq)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonIdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub scale: f64,
    /// Whether every entry is strictly positive, where `rhs >= 0` must hold.
    pub positive: bool,
}

impl NewtonIdentityReport {
    pub fn identity_holds(&self, tol: f64) -> bool {
        self.residual.abs() <= tol * self.scale
    }

    pub fn nonnegative(&self, tol: f64) -> bool {
        self.rhs >= -tol * self.scale
    }
}

pub fn check_newton_identity(kappa: &CurvatureVector, l: usize, p: usize, q: usize) -> Result<NewtonIdentityReport> {
    let n = kappa.dim();
    if p == q || p >= n || q >= n {
        return Err(Error::Domain(format!("need distinct indices below n={n}, got p={p}, q={q}")));
    }
    if l == 0 || l >= n {
        return Err(Error::Domain(format!("l={l} must satisfy 1 <= l <= n-1 (n={n})")));
    }
    let v = kappa.values();
    let l = l as isize;
    let s = |order: isize, ex: &[usize]| sigma_conv(v, order, ex);
    let a = s(l - 1, &[p]) * s(l - 1, &[q]);
    let b = s(l, &[]) * s(l - 2, &[p, q]);
    let c = s(l - 1, &[p, q]).powi(2);
    let d = s(l, &[p, q]) * s(l - 2, &[p, q]);
    let (lhs, rhs) = (a - b, c - d);
    Ok(NewtonIdentityReport {
        lhs,
        rhs,
        residual: lhs - rhs,
        scale: 1.0 + a.abs() + b.abs() + c.abs() + d.abs(),
        positive: kappa.is_strictly_positive(),
    })
}

/// The two steps of the quotient-concavity chain, with `h_pp1 = s_pp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientChainReport {
    /// `[-sigma_k^{pp,qq} h h / kappa_1 + (sum sigma_k^{pp} h)^2 / (kappa_1 sigma_k)]
    ///  >= sigma_k / (kappa_1 sigma_l^2) [(sum sigma_l^{pp} h)^2 - sigma_l sigma_l^{pp,qq} h h]`.
    pub first: Margin,
    /// The bracket rewritten as squares plus paired cross terms (an identity).
    pub second: Margin,
}

pub fn check_quotient_chain(sample: &ThirdOrderSample) -> Result<QuotientChainReport> {
    sample.validate()?;
    let (k, l) = (sample.k, sample.l);
    if l == 0 {
        return Err(Error::Domain("the quotient chain needs 1 <= l <= k - 1".into()));
    }
    let n = sample.dim();
    let k1 = sample.kappa.values()[0];
    let jk = sigma_jet(&sample.kappa, k)?;
    let jl = sigma_jet(&sample.kappa, l)?;
    let h: Vec<f64> = (0..n).map(|p| sample.s[(p, p)]).collect();
    let quad = |m: &DMatrix<f64>| -> f64 {
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    acc += m[(p, q)] * h[p] * h[q];
                }
            }
        }
        acc
    };
    let lin = |g: &nalgebra::DVector<f64>| -> f64 { (0..n).map(|p| g[p] * h[p]).sum() };
    let (sk, sl) = (jk.value, jl.value);

    let t1 = -quad(&jk.hess_diag) / k1;
    let t2 = lin(&jk.grad).powi(2) / (k1 * sk);
    let factor = sk / (k1 * sl * sl);
    let bracket_a = lin(&jl.grad).powi(2);
    let bracket_b = sl * quad(&jl.hess_diag);
    let first = Margin::new(factor * (bracket_a - bracket_b), t1 + t2, &[t1, t2, factor * bracket_a, factor * bracket_b]);

    let squares: f64 = (0..n).map(|p| (jl.grad[p] * h[p]).powi(2)).sum();
    let mut cross = 0.0;
    let mut cross_abs = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                let w = (jl.grad[p] * jl.grad[q] - sl * jl.hess_diag[(p, q)]) * h[p] * h[q];
                cross += w;
                cross_abs += w.abs();
            }
        }
    }
    let second = Margin::new(squares + cross, bracket_a - bracket_b, &[bracket_a, bracket_b, squares, cross_abs]);
    Ok(QuotientChainReport { first, second })
}

/// The splitting of `-sigma_k^{ij,pq} h_ij1 h_pq1 / kappa_1 +
/// 2 sum_{p>1} sigma_k^{ii} h_1pi^2 / (kappa_1 (kappa_1 - kappa~_p))` into the
/// four retained terms; the margin is the sum of the dropped non-negative
/// terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// `lhs` is the retained right-hand side, `rhs` the full expression.
    pub margin: Margin,
    /// Independently summed dropped terms (off-type pairs `p, q > 1` and
    /// frame terms `i` outside `{1, p}`).
    pub dropped: f64,
}

pub fn check_decomposition_step(sample: &ThirdOrderSample) -> Result<DecompositionReport> {
    sample.validate()?;
    let n = sample.dim();
    let k1 = sample.kappa.values()[0];
    let jet = sigma_jet(&sample.kappa, sample.k)?;
    let s = &sample.s;
    let contraction = -jet.contract(s, s) / k1;
    let denom = |p: usize| k1 * (k1 - sample.kappa_tilde(p));
    let mut frame_sum = 0.0;
    for p in 1..n {
        for i in 0..n {
            frame_sum += 2.0 * jet.grad[i] * s[(p, i)].powi(2) / denom(p);
        }
    }
    let full = contraction + frame_sum;

    let mut diag_pair = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                diag_pair += jet.hess_diag[(p, q)] * s[(p, p)] * s[(q, q)];
            }
        }
    }
    let r1 = -diag_pair / k1;
    let (mut r2, mut r3, mut r4) = (0.0, 0.0, 0.0);
    for p in 1..n {
        r2 += 2.0 * jet.hess_diag[(0, p)] * s[(0, p)].powi(2) / k1;
        r3 += 2.0 * jet.grad[0] * s[(p, 0)].powi(2) / denom(p);
        r4 += 2.0 * jet.grad[p] * s[(p, p)].powi(2) / denom(p);
    }
    let retained = r1 + r2 + r3 + r4;

    let mut dropped = 0.0;
    for p in 1..n {
        for q in 1..n {
            if p != q {
                dropped += jet.hess_diag[(p, q)] * s[(p, q)].powi(2) / k1;
            }
        }
        for i in 1..n {
            if i != p {
                dropped += 2.0 * jet.grad[i] * s[(p, i)].powi(2) / denom(p);
            }
        }
    }
    Ok(DecompositionReport {
        margin: Margin::new(retained, full, &[contraction, frame_sum, r1, r2, r3, r4]),
        dropped,
    })
}

/// The two expansion identities of the ratio step and their ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactIdentityReport {
    /// `sigma_k - (kappa_1 sigma_k^{11} + sigma_k(kappa|1))`.
    pub expansion_residual: f64,
    pub expansion_scale: f64,
    /// `sigma_k / (kappa_1 sigma_k^{11})`, at least 1 for positive kappa.
    pub ratio_k: f64,
    /// `kappa_1 sigma_l^{11} / sigma_l - (1 - sigma_l(kappa|1) / sigma_l)`.
    pub ratio_residual: f64,
    pub ratio_scale: f64,
    /// `kappa_1 sigma_l^{11} / sigma_l`.
    pub ratio_l: f64,
}

impl ExactIdentityReport {
    pub fn identities_hold(&self, tol: f64) -> bool {
        self.expansion_residual.abs() <= tol * self.expansion_scale && self.ratio_residual.abs() <= tol * self.ratio_scale
    }
}

pub fn check_exact_identities(kappa: &CurvatureVector, k: usize, l: usize) -> Result<ExactIdentityReport> {
    let n = kappa.dim();
    if k == 0 || k > n || l == 0 || l > n {
        return Err(Error::Domain(format!("need 1 <= k, l <= n = {n}, got k={k}, l={l}")));
    }
    if !kappa.is_strictly_positive() {
        return Err(Error::Domain("ratio identities need strictly positive curvatures".into()));
    }
    let v = kappa.values();
    let k1 = v[0];
    let s = |order: usize, ex: &[usize]| sigma_conv(v, order as isize, ex);
    let (sk, sk11, sk_r) = (s(k, &[]), s(k - 1, &[0]), s(k, &[0]));
    let (sl, sl11, sl_r) = (s(l, &[]), s(l - 1, &[0]), s(l, &[0]));
    let ratio_l = k1 * sl11 / sl;
    Ok(ExactIdentityReport {
        expansion_residual: sk - (k1 * sk11 + sk_r),
        expansion_scale: 1.0 + sk.abs() + (k1 * sk11).abs() + sk_r.abs(),
        ratio_k: sk / (k1 * sk11),
        ratio_residual: ratio_l - (1.0 - sl_r / sl),
        ratio_scale: 1.0 + ratio_l.abs() + (sl_r / sl).abs(),
        ratio_l,
    })
}

/// `kappa_1 / (sigma_k^{11} kappa_1^2)`, the ratio bounded by the
/// convexity lemma for `sigma_k` equations (no normalisation applied).
pub fn cw_ratio(kappa: &CurvatureVector, k: usize) -> Result<f64> {
    let n = kappa.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k={k} outside 1..={n}")));
    }
    let v = kappa.values();
    Ok(1.0 / (sigma_conv(v, k as isize - 1, &[0]) * v[0]))
}

/// Empirical suprema of the constant-laden bounds over a sample stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantProbeReport {
    pub k: usize,
    pub l: usize,
    pub delta: f64,
    pub delta_prime: f64,
    pub attempted: usize,
    pub admissible: usize,
    /// `sup sigma_{l-1}(kappa|pq) kappa_p kappa_q / (kappa_1 ... kappa_{l+1})`
    /// over `p != q <= l`.
    pub sup_product_ratio: Option<f64>,
    /// `sup sigma_{l-1}(kappa|pq) / sigma_l^{pp}` over `p != q <= l`;
    /// shrinks in proportion to `delta'`.
    pub sup_pinch_ratio: Option<f64>,
    /// `sup kappa_1 / (sigma_k^{11} kappa_1^2)` after normalising
    /// `sigma_k = 1`.
    pub sup_cw_ratio: Option<f64>,
    /// Suprema over the full stream are within 20% of those over its first
    /// half.
    pub stable: bool,
    /// No sample fell in the regime.
    pub vacuous: bool,
}

#[derive(Default, Clone, Copy)]
struct Sups {
    product: Option<f64>,
    pinch: Option<f64>,
    cw: Option<f64>,
}

fn bump(slot: &mut Option<f64>, x: f64) {
    *slot = Some(slot.map_or(x, |m: f64| m.max(x)));
}

/// Probes the bounds on samples in the regime `kappa_l >= delta kappa_1`,
/// `kappa_{l+1} <= delta' kappa_1` (1-based `l`). Non-admissible samples
/// are counted and skipped. No pass/fail is attached.
pub fn probe_constant_bounds(
    samples: &[CurvatureVector],
    k: usize,
    l: usize,
    delta: f64,
    delta_prime: f64,
) -> Result<ConstantProbeReport> {
    if l == 0 || k <= l {
        return Err(Error::Domain(format!("need 1 <= l <= k - 1, got k={k}, l={l}")));
    }
    let half = samples.len() / 2;
    let mut at_half = Sups::default();
    let mut sups = Sups::default();
    let mut admissible = 0;
    for (idx, raw) in samples.iter().enumerate() {
        if idx == half {
            at_half = sups;
        }
        let n = raw.dim();
        if n <= l || k > n || !raw.is_strictly_positive() {
            continue;
        }
        let mut v = raw.values().to_vec();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if v[l - 1] < delta * v[0] || v[l] > delta_prime * v[0] {
            continue;
        }
        let sk = sigma_conv(&v, k as isize, &[]);
        let t = sk.powf(-1.0 / k as f64);
        v.iter_mut().for_each(|x| *x *= t);
        admissible += 1;

        let prod: f64 = v[..=l].iter().product();
        for p in 0..l {
            for q in 0..l {
                if p == q {
                    continue;
                }
                let s = sigma_conv(&v, l as isize - 1, &[p, q]);
                bump(&mut sups.product, s * v[p] * v[q] / prod);
                bump(&mut sups.pinch, s / sigma_conv(&v, l as isize - 1, &[p]));
            }
        }
        bump(&mut sups.cw, 1.0 / (sigma_conv(&v, k as isize - 1, &[0]) * v[0]));
    }
    if half == samples.len() {
        at_half = sups;
    }
    let within = |full: Option<f64>, part: Option<f64>| match (full, part) {
        (Some(f), Some(p)) => f <= 1.2 * p,
        (None, None) => true,
        _ => false,
    };
    Ok(ConstantProbeReport {
        k,
        l,
        delta,
        delta_prime,
        attempted: samples.len(),
        admissible,
        sup_product_ratio: sups.product,
        sup_pinch_ratio: sups.pinch,
        sup_cw_ratio: sups.cw,
        stable: admissible > 0
            && within(sups.product, at_half.product)
            && within(sups.pinch, at_half.pinch)
            && within(sups.cw, at_half.cw),
        vacuous: admissible == 0,
    })
}

/// Parameters of the pinching cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeParams {
    /// `delta_1 = 1/3 > delta_2 > ... > delta_k`.
    pub delta_seq: Vec<f64>,
    /// Upper bound on `f`, hence on `sigma_k`.
    pub f_bound: f64,
    pub c0: f64,
    /// `A = 2 C_0^2 + C_0`.
    pub a: f64,
    /// `epsilon = 1 / A^2`.
    pub epsilon: f64,
}

impl CascadeParams {
    /// Geometric default `delta_{i+1} = delta_i / 4` with `C_0 = 1`.
    pub fn geometric(k: usize, f_bound: f64) -> Result<Self> {
        Self::from_c0(k, f_bound, 1.0, 0.25)
    }

    /// `A` and `epsilon` derived from `C_0`; deltas shrink by `ratio`.
    pub fn from_c0(k: usize, f_bound: f64, c0: f64, ratio: f64) -> Result<Self> {
        let delta_seq = (0..k).map(|i| ratio.powi(i as i32) / 3.0).collect();
        Self::with_deltas(delta_seq, f_bound, c0)
    }

    pub fn with_deltas(delta_seq: Vec<f64>, f_bound: f64, c0: f64) -> Result<Self> {
        let a = 2.0 * c0 * c0 + c0;
        let p = Self {
            delta_seq,
            f_bound,
            c0,
            a,
            epsilon: 1.0 / (a * a),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.delta_seq;
        if d.is_empty() || (d[0] - 1.0 / 3.0).abs() > 1e-15 {
            return Err(Error::validation("delta_seq", "the sequence must start at delta_1 = 1/3"));
        }
        if d.windows(2).any(|w| !(w[1] < w[0])) || d.iter().any(|x| !(*x > 0.0 && *x < 0.5)) {
            return Err(Error::validation("delta_seq", "deltas must decrease strictly inside (0, 1/2)"));
        }
        if !(self.f_bound > 0.0 && self.f_bound.is_finite()) {
            return Err(Error::validation("f_bound", "must be positive and finite"));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::validation("c0", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// `kappa_{l+1} <= delta_{l+1} kappa_1`: the pinched regime at level `l`.
    BoundedBy { level: usize },
    /// `kappa_{l+1} > delta_{l+1} kappa_1`: move on to the next level.
    NextLevel { level: usize },
    /// All of `kappa_1, ..., kappa_k` exceed `delta_k kappa_1`, which
    /// certifies `kappa_1 < (f_bound / delta_k^k)^{1/k}`.
    ProductBound { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeOutcome {
    pub verdict: Verdict,
    /// Levels visited before the verdict (all `NextLevel`).
    pub trace: Vec<Verdict>,
}

impl CascadeOutcome {
    /// For a product bound, the re-evaluated strict inequality
    /// `delta_k^k kappa_1^k < sigma_k(kappa)`; `None` otherwise.
    pub fn certify(&self, kappa: &CurvatureVector, params: &CascadeParams) -> Option<bool> {
        match self.verdict {
            Verdict::ProductBound { .. } => {
                let k = params.delta_seq.len();
                let dk = params.delta_seq[k - 1];
                let k1 = kappa.values()[0];
                Some((dk * k1).powi(k as i32) < sigma_conv(kappa.values(), k as isize, &[]))
            }
            _ => None,
        }
    }
}

/// Walks the levels `l = 1, ..., k-1` of the cascade; `k` is the length of
/// the delta sequence.
pub fn pinching_cascade(kappa: &CurvatureVector, params: &CascadeParams) -> Result<CascadeOutcome> {
    params.validate()?;
    let k = params.delta_seq.len();
    if !kappa.is_strictly_positive() || !kappa.is_sorted() {
        return Err(Error::Domain("the cascade needs strictly positive, descending curvatures".into()));
    }
    if k > kappa.dim() {
        return Err(Error::Domain(format!("k = {k} exceeds n = {}", kappa.dim())));
    }
    let v = kappa.values();
    let mut trace = Vec::new();
    for level in 1..k {
        if v[level] <= params.delta_seq[level] * v[0] {
            return Ok(CascadeOutcome {
                verdict: Verdict::BoundedBy { level },
                trace,
            });
        }
        trace.push(Verdict::NextLevel { level });
    }
    let dk = params.delta_seq[k - 1];
    let bound = (params.f_bound / dk.powi(k as i32)).powf(1.0 / k as f64);
    Ok(CascadeOutcome {
        verdict: Verdict::ProductBound { bound },
        trace,
    })
}

/// All-ones value of `sigma_k / (kappa_1 sigma_k^{11})`, i.e. `n / k`.
pub fn all_ones_ratio(n: usize, k: usize) -> f64 {
    binomial(n, k) / binomial(n - 1, k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cv(v: &[f64]) -> CurvatureVector {
        CurvatureVector::new(v.to_vec()).unwrap()
    }

    fn sample(kappa: &[f64], s: DMatrix<f64>, k: usize, l: usize) -> ThirdOrderSample {
        ThirdOrderSample::new(cv(kappa), s, k, l).unwrap()
    }

    #[test]
    fn lemma1_worked_example() {
        let mut s = DMatrix::zeros(3, 3);
        for p in 1..3 {
            s[(0, p)] = 1.0;
            s[(p, 0)] = 1.0;
        }
        let m = check_lemma1(&sample(&[2.0, 1.0, 0.5], s, 2, 0)).unwrap();
        assert!((m.lhs - 1.375).abs() < 1e-15);
        assert!((m.rhs - 3.35).abs() < 1e-14);
        assert!((m.margin - 1.975).abs() < 1e-14);
    }

    #[test]
    fn lemma1_null_and_tied_cases() {
        let m = check_lemma1(&sample(&[2.0, 1.0, 0.5], DMatrix::zeros(3, 3), 2, 0)).unwrap();
        assert_eq!((m.lhs, m.rhs, m.margin), (0.0, 0.0, 0.0));
        let mut s = DMatrix::zeros(3, 3);
        s[(0, 1)] = 0.7;
        s[(1, 0)] = 0.7;
        s[(0, 2)] = -1.3;
        s[(2, 0)] = -1.3;
        let smp = sample(&[1.5, 1.5, 1.5], s, 2, 0);
        assert_eq!(top_tie_set(&smp.kappa), vec![1, 2]);
        // on the tie set kappa_1 - kappa~_p = 1
        assert_eq!(smp.kappa.values()[0] - smp.kappa_tilde(1), 1.0);
        assert!(check_lemma1(&smp).unwrap().holds(INEQUALITY_TOL));
    }

    #[test]
    fn newton_identity_examples() {
        let r = check_newton_identity(&cv(&[3.0, 2.0, 1.0]), 2, 0, 1).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        let r = check_newton_identity(&cv(&[1.7, -2.0, 0.3]), 1, 0, 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        let r = check_newton_identity(&cv(&[1.0; 4]), 2, 0, 1).unwrap();
        assert_eq!(r.rhs, 3.0);
        assert!(r.identity_holds(IDENTITY_TOL) && r.nonnegative(0.0));
    }

    #[test]
    fn quotient_chain_examples() {
        let smp = sample(&[3.0, 2.0, 1.0], DMatrix::zeros(3, 3), 2, 1);
        let r = check_quotient_chain(&smp).unwrap();
        assert_eq!(r.first.margin, 0.0);
        assert_eq!(r.second.margin, 0.0);
        let smp = sample(&[3.0, 2.0, 1.0], DMatrix::identity(3, 3), 2, 1);
        let r = check_quotient_chain(&smp).unwrap();
        // sigma_2^{pp} = (3, 4, 5), sum 12, 12^2/(3*11); sigma_2^{pp,qq} = 1 off the diagonal
        let t = -6.0 / 3.0 + 144.0 / 33.0;
        assert!((r.first.rhs - t).abs() < 1e-14);
        // l = 1: sigma_1^{pp} = 1, sigma_1^{pp,qq} = 0, bracket = 9
        assert!((r.first.lhs - 11.0 / (3.0 * 36.0) * 9.0).abs() < 1e-14);
        assert!(r.first.holds(INEQUALITY_TOL) && r.second.is_identity(IDENTITY_TOL));
    }

    #[test]
    fn decomposition_structure() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[0.4, -1.0, 2.0]));
        let r = check_decomposition_step(&sample(&[2.0, 1.5, 1.0], s, 2, 0)).unwrap();
        assert!(r.margin.margin.abs() < 1e-14 && r.dropped == 0.0);
        let mut s = DMatrix::from_element(2, 2, 0.3);
        s[(0, 0)] = 1.0;
        let r = check_decomposition_step(&sample(&[2.0, 1.0], s, 2, 0)).unwrap();
        assert!((r.margin.margin - r.dropped).abs() < 1e-14);
    }

    #[test]
    fn exact_identity_examples() {
        let r = check_exact_identities(&cv(&[3.0, 2.0, 1.0]), 2, 1).unwrap();
        assert_eq!(r.expansion_residual, 0.0);
        for n in 2..7 {
            for k in 1..=n {
                let r = check_exact_identities(&cv(&vec![1.0; n]), k, k).unwrap();
                assert!((r.ratio_k - n as f64 / k as f64).abs() < 1e-13);
                assert!((r.ratio_k - all_ones_ratio(n, k)).abs() < 1e-13);
                assert!((r.ratio_l - k as f64 / n as f64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cw_ratio_on_all_ones() {
        for (n, k) in [(3, 2), (5, 3), (4, 4)] {
            let r = cw_ratio(&cv(&vec![1.0; n]), k).unwrap();
            assert!((r - 1.0 / binomial(n - 1, k - 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn probe_shrinks_with_delta_prime_and_flags_vacuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let stream = |rng: &mut ChaCha8Rng, dp: f64| -> Vec<CurvatureVector> {
            (0..4000).map(|_| cv(&sampling::pinched(rng, 5, 2, 0.3, dp))).collect()
        };
        let a = probe_constant_bounds(&stream(&mut rng, 0.1), 3, 2, 0.3, 0.1).unwrap();
        let b = probe_constant_bounds(&stream(&mut rng, 0.01), 3, 2, 0.3, 0.01).unwrap();
        let (ra, rb) = (a.sup_pinch_ratio.unwrap(), b.sup_pinch_ratio.unwrap());
        assert!(rb < ra / 5.0, "{ra} vs {rb}");
        assert!(a.stable && !a.vacuous);
        let c = probe_constant_bounds(&stream(&mut rng, 0.5), 3, 2, 0.3, 0.01).unwrap();
        let all_bad: Vec<_> = (0..50).map(|_| cv(&[1.0, 0.9, 0.8, 0.7, 0.6])).collect();
        let d = probe_constant_bounds(&all_bad, 3, 2, 0.3, 0.01).unwrap();
        assert!(d.vacuous && !d.stable);
        assert!(c.admissible < c.attempted);
    }

    #[test]
    fn cascade_examples() {
        let p = CascadeParams::with_deltas(vec![1.0 / 3.0, 0.1, 0.05], 10.0, 1.0).unwrap();
        let out = pinching_cascade(&cv(&[10.0, 0.01, 0.01]), &p).unwrap();
        assert_eq!(out.verdict, Verdict::BoundedBy { level: 1 });

        let t = 2.0;
        let p3 = CascadeParams::geometric(3, 50.0).unwrap();
        let out = pinching_cascade(&cv(&[t, t, t]), &p3).unwrap();
        let d3 = p3.delta_seq[2];
        match out.verdict {
            Verdict::ProductBound { bound } => assert!((bound - (50.0 / d3.powi(3)).cbrt()).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
        assert_eq!(out.trace.len(), 2);
        assert_eq!(out.certify(&cv(&[t, t, t]), &p3), Some(true));

        let p2 = CascadeParams::with_deltas(vec![1.0 / 3.0, 0.2], 10.0, 1.0).unwrap();
        let out = pinching_cascade(&cv(&[3.0, 3.0]), &p2).unwrap();
        match out.verdict {
            Verdict::ProductBound { bound } => assert!((bound - 10f64.sqrt() / 0.2).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cascade_params_validation() {
        assert!(CascadeParams::with_deltas(vec![0.3, 0.1], 1.0, 1.0).is_err());
        assert!(CascadeParams::with_deltas(vec![1.0 / 3.0, 0.4], 1.0, 1.0).is_err());
        assert!(CascadeParams::with_deltas(vec![1.0 / 3.0], 0.0, 1.0).is_err());
        let p = CascadeParams::from_c0(2, 1.0, 2.0, 0.25).unwrap();
        assert_eq!(p.a, 10.0);
        assert_eq!(p.epsilon, 0.01);
    }

    #[test]
    fn random_samples_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let smp = ThirdOrderSample::random(&mut rng, 2..=7, true);
            smp.validate().unwrap();
            assert!(check_lemma1(&smp).unwrap().holds(INEQUALITY_TOL));
            let q = check_quotient_chain(&smp).unwrap();
            assert!(q.first.holds(INEQUALITY_TOL), "{smp:?} {q:?}");
            assert!(q.second.is_identity(IDENTITY_TOL), "{q:?}");
            let d = check_decomposition_step(&smp).unwrap();
            assert!(d.margin.holds(INEQUALITY_TOL));
        }
    }
}
