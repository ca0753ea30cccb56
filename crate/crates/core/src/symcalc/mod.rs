//! Elementary symmetric functions of principal curvatures.
//!
//! `sigma_k` is evaluated with the coefficient recurrence of
//! `prod_i (x + kappa_i)`, which costs `O(n k)` and never enumerates subsets.
//! Derivatives are taken with respect to the entries of a symmetric matrix
//! that is diagonal in the current basis, so they are expressed through
//! restricted functions `sigma_s(kappa | i_1 ... i_r)`, i.e. `sigma_s` of
//! `kappa` with the listed entries set to zero.
//!
//! Conventions: `sigma_0 = 1`, `sigma_s = 0` for `s < 0` and for `s` larger
//! than the number of entries that remain after exclusion.

mod oracle;

pub use oracle::{brute_force_jet, brute_force_sigma, BRUTE_FORCE_MAX_DIM};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Principal curvatures at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureVector {
    values: Vec<f64>,
    sorted: bool,
}

impl CurvatureVector {
    /// Wraps `values` as given, without reordering.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("curvature vector must have n >= 1".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite curvature entry {bad}")));
        }
        let sorted = values.windows(2).all(|w| w[0] >= w[1]);
        Ok(Self { values, sorted })
    }

    /// Sorts `values` into descending order `kappa_1 >= ... >= kappa_n`.
    pub fn sorted_descending(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite curvature entry".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// True when the entries are non-increasing.
    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn largest(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Multiplies every entry by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * t).collect())
    }
}

/// Coefficient `e_s` of `prod (x + v)` over the entries of `values` not in
/// `excluded`, with the out-of-range conventions applied.
pub(crate) fn sigma_conv(values: &[f64], s: isize, excluded: &[usize]) -> f64 {
    if s < 0 {
        return 0.0;
    }
    let s = s as usize;
    if s == 0 {
        return 1.0;
    }
    let mut e = vec![0.0; s + 1];
    e[0] = 1.0;
    let mut seen = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if excluded.contains(&i) {
            continue;
        }
        seen += 1;
        let top = seen.min(s);
        for j in (1..=top).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[s]
}

/// `sigma_k(kappa)`.
pub fn sigma(kappa: &CurvatureVector, k: usize) -> Result<f64> {
    let n = kappa.dim();
    if k > n {
        return Err(Error::Domain(format!("sigma order k={k} exceeds n={n}")));
    }
    Ok(sigma_conv(&kappa.values, k as isize, &[]))
}

/// `sigma_s(kappa | excluded)`, with `excluded` given as 0-based indices.
///
/// Negative `s` yields 0 so that identities involving `sigma_{l-2}` can be
/// written uniformly for `l = 1`.
pub fn sigma_restricted(kappa: &CurvatureVector, s: isize, excluded: &[usize]) -> Result<f64> {
    let n = kappa.dim();
    if s > n as isize {
        return Err(Error::Domain(format!("order s={s} exceeds n={n}")));
    }
    for (pos, &i) in excluded.iter().enumerate() {
        if i >= n {
            return Err(Error::Domain(format!("excluded index {i} out of range for n={n}")));
        }
        if excluded[..pos].contains(&i) {
            return Err(Error::Domain(format!("duplicate excluded index {i}")));
        }
    }
    Ok(sigma_conv(&kappa.values, s, excluded))
}

/// Value, gradient and second-derivative tables of `sigma_k` at a diagonal
/// matrix `diag(kappa)`.
///
/// `grad[i]` is `d sigma_k / d h_ii`. The second derivative
/// `d^2 sigma_k / d h_ij d h_pq` is non-zero in two index patterns only:
/// `i = j, p = q, i != p` (stored in `hess_diag[(i, p)]`) and
/// `i = q, p = j, i != p` (stored in `hess_offtype[(i, p)]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaJet {
    pub order: usize,
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess_diag: DMatrix<f64>,
    pub hess_offtype: DMatrix<f64>,
}

impl SigmaJet {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Full fourth-order entry `d^2 sigma_k / d h_ij d h_pq`.
    pub fn second(&self, i: usize, j: usize, p: usize, q: usize) -> f64 {
        if i == j && p == q && i != p {
            self.hess_diag[(i, p)]
        } else if i == q && p == j && i != p {
            self.hess_offtype[(i, p)]
        } else {
            0.0
        }
    }

    /// Contraction `sum sigma_k^{ij,pq} a_ij b_pq` for square matrices.
    pub fn contract(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for p in 0..n {
                if i == p {
                    continue;
                }
                acc += self.hess_diag[(i, p)] * a[(i, i)] * b[(p, p)];
                acc += self.hess_offtype[(i, p)] * a[(i, p)] * b[(p, i)];
            }
        }
        acc
    }

    /// `sum_i grad[i] kappa_i - k sigma_k`, which vanishes identically.
    pub fn euler_residual(&self, kappa: &CurvatureVector) -> f64 {
        let lhs: f64 = self.grad.iter().zip(kappa.values()).map(|(g, k)| g * k).sum();
        lhs - self.order as f64 * self.value
    }
}

/// Builds the [`SigmaJet`] of order `k` (`1 <= k <= n`).
pub fn sigma_jet(kappa: &CurvatureVector, k: usize) -> Result<SigmaJet> {
    let n = kappa.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("jet order k={k} must satisfy 1 <= k <= n={n}")));
    }
    let v = kappa.values();
    let kk = k as isize;
    let value = sigma_conv(v, kk, &[]);
    let grad = DVector::from_fn(n, |i, _| sigma_conv(v, kk - 1, &[i]));
    let mut hess_diag = DMatrix::zeros(n, n);
    for i in 0..n {
        for p in (i + 1)..n {
            let s = sigma_conv(v, kk - 2, &[i, p]);
            hess_diag[(i, p)] = s;
            hess_diag[(p, i)] = s;
        }
    }
    let hess_offtype = -&hess_diag;
    Ok(SigmaJet {
        order: k,
        value,
        grad,
        hess_diag,
        hess_offtype,
    })
}

/// Membership data for the cones `Gamma_m = {sigma_1, ..., sigma_m > 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    /// Largest `m` with `sigma_1, ..., sigma_m` all strictly positive.
    pub max_order: usize,
    /// `margins[m - 1] = sigma_m(kappa)`.
    pub margins: Vec<f64>,
}

impl ConeVerdict {
    pub fn contains(&self, m: usize) -> bool {
        self.max_order >= m
    }
}

pub fn cone_membership(kappa: &CurvatureVector) -> ConeVerdict {
    let v = kappa.values();
    let margins: Vec<f64> = (1..=v.len()).map(|m| sigma_conv(v, m as isize, &[])).collect();
    let max_order = margins.iter().take_while(|&&s| s > 0.0).count();
    ConeVerdict { max_order, margins }
}

/// Newton's inequality `E_{l-1} E_{l+1} <= E_l^2` for the normalised
/// functions `E_j = sigma_j / binom(n, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonMaclaurinReport {
    pub l: usize,
    /// `sigma_{l-1} sigma_{l+1}`.
    pub lhs: f64,
    /// `c_l sigma_l^2` with `c_l = binom(n,l-1) binom(n,l+1) / binom(n,l)^2`.
    pub rhs: f64,
    /// `E_l^2 - E_{l-1} E_{l+1}`; non-negative when the inequality holds.
    pub margin: f64,
    /// False when some entry is not strictly positive.
    pub in_scope: bool,
}

pub fn newton_maclaurin_check(mu: &CurvatureVector, l: usize) -> Result<NewtonMaclaurinReport> {
    let n = mu.dim();
    if l == 0 || l >= n {
        return Err(Error::Domain(format!("Newton index l={l} must satisfy 1 <= l <= n-1 (n={n})")));
    }
    let v = mu.values();
    let s = |j: usize| sigma_conv(v, j as isize, &[]);
    let (b_lo, b_mid, b_hi) = (binomial(n, l - 1), binomial(n, l), binomial(n, l + 1));
    let (e_lo, e_mid, e_hi) = (s(l - 1) / b_lo, s(l) / b_mid, s(l + 1) / b_hi);
    Ok(NewtonMaclaurinReport {
        l,
        lhs: s(l - 1) * s(l + 1),
        rhs: b_lo * b_hi / (b_mid * b_mid) * s(l) * s(l),
        margin: e_mid * e_mid - e_lo * e_hi,
        in_scope: mu.is_strictly_positive(),
    })
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
