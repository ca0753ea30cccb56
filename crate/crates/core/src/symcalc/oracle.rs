//! Subset-enumeration oracles for `sigma_k` and its jet.
//!
//! The value is the literal sum over `k`-subsets. The jet is obtained by
//! central finite differences of that sum (and, for the off-diagonal pattern,
//! of the sum of principal `k x k` minors of `diag(kappa) + t (E_ip + E_pi)`).
//! Sums, products and minors are accumulated in double-double arithmetic so
//! that the differences are not swamped by cancellation; the steps follow the
//! module policy `h_i = 1e-5 (1 + |kappa_i|)`.

use nalgebra::{DMatrix, DVector};

use super::{CurvatureVector, SigmaJet};
use crate::{Error, Result};

/// Largest dimension accepted by the enumeration oracles.
pub const BRUTE_FORCE_MAX_DIM: usize = 12;

const FD_REL_STEP: f64 = 1e-5;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::quick_two_sum(p, err + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        Dd::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn guard(n: usize, k: usize) -> Result<()> {
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::OracleRefusal(format!(
            "subset enumeration refused for n={n} (limit {BRUTE_FORCE_MAX_DIM})"
        )));
    }
    if k > n {
        return Err(Error::Domain(format!("sigma order k={k} exceeds n={n}")));
    }
    Ok(())
}

fn subsets(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << n)).filter(move |m| m.count_ones() as usize == k)
}

fn enumerate_dd(values: &[f64], k: usize) -> Dd {
    let mut acc = Dd::ZERO;
    for mask in subsets(values.len(), k) {
        let mut prod = Dd::ONE;
        for (i, &v) in values.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod = prod.mul(Dd::from(v));
            }
        }
        acc = acc.add(prod);
    }
    acc
}

/// `sigma_k` by explicit enumeration of all `k`-subsets.
pub fn brute_force_sigma(kappa: &CurvatureVector, k: usize) -> Result<f64> {
    guard(kappa.dim(), k)?;
    Ok(enumerate_dd(kappa.values(), k).to_f64())
}

fn step(x: f64) -> (f64, f64, Dd) {
    let h = FD_REL_STEP * (1.0 + x.abs());
    let (up, down) = (x + h, x - h);
    // exact width of the rounded stencil
    (up, down, Dd::two_sum(up, -down))
}

fn det_dd(mut a: Vec<Vec<Dd>>) -> Dd {
    let m = a.len();
    let mut det = Dd::ONE;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r, &s| a[r][col].hi.abs().partial_cmp(&a[s][col].hi.abs()).unwrap())
            .unwrap();
        if a[pivot][col].hi == 0.0 {
            return Dd::ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = det.neg();
        }
        let p = a[col][col];
        det = det.mul(p);
        for r in (col + 1)..m {
            let factor = a[r][col].div(p);
            for c in col..m {
                let delta = factor.mul(a[col][c]);
                a[r][c] = a[r][c].sub(delta);
            }
        }
    }
    det
}

/// Sum of the principal `k x k` minors of `diag(kappa) + t (E_ip + E_pi)` over
/// the index sets containing both `i` and `p`; the remaining minors do not
/// see the perturbed entries.
fn coupled_minor_sum(values: &[f64], k: usize, i: usize, p: usize, t: f64) -> Dd {
    let n = values.len();
    let both = (1u32 << i) | (1u32 << p);
    let mut acc = Dd::ZERO;
    for mask in subsets(n, k).filter(|m| m & both == both) {
        let idx: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let mat: Vec<Vec<Dd>> = idx
            .iter()
            .map(|&r| {
                idx.iter()
                    .map(|&c| {
                        if r == c {
                            Dd::from(values[r])
                        } else if (r == i && c == p) || (r == p && c == i) {
                            Dd::from(t)
                        } else {
                            Dd::ZERO
                        }
                    })
                    .collect()
            })
            .collect();
        acc = acc.add(det_dd(mat));
    }
    acc
}

/// Finite-difference jet of [`brute_force_sigma`], independent of the
/// restricted-function formulas used by [`super::sigma_jet`].
pub fn brute_force_jet(kappa: &CurvatureVector, k: usize) -> Result<SigmaJet> {
    let n = kappa.dim();
    guard(n, k)?;
    if k == 0 {
        return Err(Error::Domain("jet order must be at least 1".into()));
    }
    let base = kappa.values().to_vec();
    let eval = |v: &[f64]| enumerate_dd(v, k);

    let value = eval(&base).to_f64();
    let mut grad = DVector::zeros(n);
    for i in 0..n {
        let (up, down, width) = step(base[i]);
        let mut v = base.clone();
        v[i] = up;
        let f_up = eval(&v);
        v[i] = down;
        let f_down = eval(&v);
        grad[i] = f_up.sub(f_down).div(width).to_f64();
    }

    let mut hess_diag = DMatrix::zeros(n, n);
    let mut hess_offtype = DMatrix::zeros(n, n);
    for i in 0..n {
        for p in (i + 1)..n {
            let (ui, di, wi) = step(base[i]);
            let (up_, dp, wp) = step(base[p]);
            let corner = |a: f64, b: f64| {
                let mut v = base.clone();
                v[i] = a;
                v[p] = b;
                eval(&v)
            };
            let num = corner(ui, up_)
                .sub(corner(ui, dp))
                .sub(corner(di, up_))
                .add(corner(di, dp));
            let d = num.div(wi.mul(wp)).to_f64();
            hess_diag[(i, p)] = d;
            hess_diag[(p, i)] = d;

            if k >= 2 {
                let t = FD_REL_STEP * (1.0 + base[i].abs().max(base[p].abs()));
                let g_up = coupled_minor_sum(&base, k, i, p, t);
                let g_mid = coupled_minor_sum(&base, k, i, p, 0.0);
                let g_down = coupled_minor_sum(&base, k, i, p, -t);
                let t2 = Dd::from(t).mul(Dd::from(t));
                // d^2/dt^2 picks up both (ip,pi) and (pi,ip) orderings
                let second = g_up.sub(g_mid).sub(g_mid).add(g_down).div(t2).to_f64();
                hess_offtype[(i, p)] = 0.5 * second;
                hess_offtype[(p, i)] = 0.5 * second;
            }
        }
    }
    Ok(SigmaJet {
        order: k,
        value,
        grad,
        hess_diag,
        hess_offtype,
    })
}
