//! Finite-difference residuals of the classical hypersurface identities.
//!
//! Everything is computed in chart coordinates from a [`Chart`] and only
//! converted to the orthonormal frame at the evaluation point at the end:
//!
//! * Gauss formula `X_ab - Gamma^c_ab X_c + h_ab nu`, with `Gamma` from
//!   differences of the metric;
//! * Weingarten equation `nu_a - h_a^c X_c`;
//! * Codazzi symmetry `nabla_c h_ab - nabla_b h_ac`;
//! * Gauss equation `R_abcd - (h_ac h_bd - h_ad h_bc)`, with `R` from
//!   differences of `Gamma`;
//! * the commutation formula for second covariant derivatives of `h`;
//! * the Hessian of the support function `u = <X, nu>`.
//!
//! Derivative fields are nested central differences with a single step `s`,
//! so each residual is `O(s^2)` on a smooth chart. When the chart provides
//! an exact second-order jet it is used as the innermost level, which keeps
//! the nesting (and the roundoff amplification) shallow.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::radial::radial_jet;
use super::{AnalyticSurface, PointFrame, SurfaceJet};
use crate::{Error, Result};

/// A local parametrisation `u -> X(u)` of a hypersurface.
pub trait Chart {
    fn dim(&self) -> usize;

    fn position(&self, u: &[f64]) -> Result<DVector<f64>>;

    /// Exact second-order jet, if the chart knows it in closed form.
    fn exact_jet(&self, _u: &[f64]) -> Option<Result<SurfaceJet>> {
        None
    }
}

impl Chart for AnalyticSurface {
    fn dim(&self) -> usize {
        2
    }

    fn position(&self, u: &[f64]) -> Result<DVector<f64>> {
        Ok(AnalyticSurface::position(self, u[0], u[1]))
    }

    fn exact_jet(&self, u: &[f64]) -> Option<Result<SurfaceJet>> {
        Some(self.jet(u[0], u[1]))
    }
}

type RadialFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Star-shaped surface `X = rho(theta, phi) omega(theta, phi)` with `rho`
/// given as a smooth function rather than grid values.
#[derive(Clone)]
pub struct RadialGraph {
    rho: Arc<RadialFn>,
    label: String,
}

impl std::fmt::Debug for RadialGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialGraph").field("label", &self.label).finish()
    }
}

impl RadialGraph {
    pub fn new(label: impl Into<String>, rho: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            rho: Arc::new(rho),
            label: label.into(),
        }
    }

    /// `rho = 1 + amplitude * exp(-2 (1 - <omega, p>))` with a fixed tilted
    /// centre `p`, a smooth bump with no symmetry.
    pub fn perturbed_sphere(amplitude: f64) -> Self {
        let p = [0.48, -0.36, 0.8];
        Self::new(format!("bump({amplitude})"), move |t, f| {
            let w = [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()];
            let d = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
            1.0 + amplitude * (-2.0 * (1.0 - d)).exp()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho(&self, theta: f64, phi: f64) -> f64 {
        (self.rho)(theta, phi)
    }
}

impl Chart for RadialGraph {
    fn dim(&self) -> usize {
        2
    }

    fn position(&self, u: &[f64]) -> Result<DVector<f64>> {
        if u[0].sin().abs() < 1e-6 {
            return Err(Error::Chart(format!("polar chart is singular at theta = {}", u[0])));
        }
        let r = self.rho(u[0], u[1]);
        Ok(radial_jet(u, r, &[0.0, 0.0], &[vec![0.0; 2], vec![0.0; 2]]).position)
    }
}

/// The identities checked by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    GaussFormula,
    Weingarten,
    Codazzi,
    GaussEquation,
    Commutation,
    SupportHessian,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::GaussFormula,
        Identity::Weingarten,
        Identity::Codazzi,
        Identity::GaussEquation,
        Identity::Commutation,
        Identity::SupportHessian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::GaussFormula => "gauss-formula",
            Identity::Weingarten => "weingarten",
            Identity::Codazzi => "codazzi",
            Identity::GaussEquation => "gauss-equation",
            Identity::Commutation => "commutation",
            Identity::SupportHessian => "support-hessian",
        }
    }
}

/// Pointwise data at one parameter value.
struct Base {
    x: DVector<f64>,
    xa: Vec<DVector<f64>>,
    xab: Vec<Vec<DVector<f64>>>,
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    nu: DVector<f64>,
    h: DMatrix<f64>,
    support: f64,
    coframe: DMatrix<f64>,
}

struct Fd<'a, C: Chart + ?Sized> {
    chart: &'a C,
    s: f64,
    n: usize,
}

fn shifted(u: &[f64], a: usize, d: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[a] += d;
    v
}

fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.iter().copied().collect()
}

impl<'a, C: Chart + ?Sized> Fd<'a, C> {
    fn jet(&self, u: &[f64]) -> Result<SurfaceJet> {
        if let Some(j) = self.chart.exact_jet(u) {
            return j;
        }
        let (s, n) = (self.s, self.n);
        let p = |v: Vec<f64>| self.chart.position(&v);
        let x = p(u.to_vec())?;
        let mut xa = Vec::with_capacity(n);
        let mut xab = vec![vec![DVector::zeros(x.len()); n]; n];
        for a in 0..n {
            let (up, dn) = (p(shifted(u, a, s))?, p(shifted(u, a, -s))?);
            xa.push((&up - &dn) / (2.0 * s));
            xab[a][a] = (&up - &x * 2.0 + &dn) / (s * s);
            for b in 0..a {
                let pp = p(shifted(&shifted(u, a, s), b, s))?;
                let pm = p(shifted(&shifted(u, a, s), b, -s))?;
                let mp = p(shifted(&shifted(u, a, -s), b, s))?;
                let mm = p(shifted(&shifted(u, a, -s), b, -s))?;
                let v = (pp - pm - mp + mm) / (4.0 * s * s);
                xab[a][b] = v.clone();
                xab[b][a] = v;
            }
        }
        Ok(SurfaceJet {
            position: x,
            tangents: xa,
            second: xab,
        })
    }

    fn base(&self, u: &[f64]) -> Result<Base> {
        let jet = self.jet(u)?;
        let frame = PointFrame::from_jet(&jet)?;
        let g = jet.metric();
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Chart("singular metric".into()))?;
        let n = self.n;
        let h = DMatrix::from_fn(n, n, |a, b| -jet.second[a][b].dot(&frame.normal));
        Ok(Base {
            support: jet.position.dot(&frame.normal),
            x: jet.position,
            xa: jet.tangents,
            xab: jet.second,
            g,
            ginv,
            nu: frame.normal,
            h,
            coframe: frame.coframe,
        })
    }

    /// `d/du_a` of a vector-valued field by a central difference.
    fn diff<F: Fn(&[f64]) -> Result<Vec<f64>>>(&self, f: &F, u: &[f64], a: usize) -> Result<Vec<f64>> {
        let up = f(&shifted(u, a, self.s))?;
        let dn = f(&shifted(u, a, -self.s))?;
        Ok(up.iter().zip(&dn).map(|(p, m)| (p - m) / (2.0 * self.s)).collect())
    }

    /// `Gamma^c_ab` flattened as `c n^2 + a n + b`.
    fn christoffel(&self, u: &[f64], b0: &Base) -> Result<Vec<f64>> {
        let n = self.n;
        let metric = |v: &[f64]| Ok(flat(&self.base(v)?.g));
        let dg: Vec<Vec<f64>> = (0..n).map(|c| self.diff(&metric, u, c)).collect::<Result<_>>()?;
        // nalgebra storage is column-major: entry (i, j) sits at i + j n
        let d = |c: usize, i: usize, j: usize| dg[c][i + j * n];
        let mut gamma = vec![0.0; n * n * n];
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    gamma[c * n * n + a * n + b] = 0.5
                        * (0..n)
                            .map(|e| b0.ginv[(c, e)] * (d(a, b, e) + d(b, a, e) - d(e, a, b)))
                            .sum::<f64>();
                }
            }
        }
        Ok(gamma)
    }

    /// `nabla_c h_ab` flattened as `c n^2 + a n + b`.
    fn nabla_h(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let b0 = self.base(u)?;
        let gamma = self.christoffel(u, &b0)?;
        let hf = |v: &[f64]| Ok(flat(&self.base(v)?.h));
        let mut t = vec![0.0; n * n * n];
        for c in 0..n {
            let dh = self.diff(&hf, u, c)?;
            for a in 0..n {
                for b in 0..n {
                    let mut v = dh[a + b * n];
                    for d in 0..n {
                        v -= gamma[d * n * n + c * n + a] * b0.h[(d, b)];
                        v -= gamma[d * n * n + c * n + b] * b0.h[(a, d)];
                    }
                    t[c * n * n + a * n + b] = v;
                }
            }
        }
        Ok(t)
    }

    fn frame_map(&self, b0: &Base) -> Result<DMatrix<f64>> {
        b0.coframe
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Chart("singular coframe".into()))
    }
}

/// Converts every index of a rank-`r` coordinate tensor (row-major flat) to
/// the orthonormal frame, `T_i.. = sum E_ia .. T_a..`.
fn to_frame(t: &[f64], rank: usize, e: &DMatrix<f64>) -> Vec<f64> {
    let n = e.nrows();
    let mut cur = t.to_vec();
    for axis in 0..rank {
        let stride = n.pow((rank - 1 - axis) as u32);
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let i = (idx / stride) % n;
            let rest = idx - i * stride;
            *out = (0..n).map(|a| e[(i, a)] * cur[rest + a * stride]).sum();
        }
        cur = next;
    }
    cur
}

/// Residual components of one identity at `u`, in the orthonormal frame.
pub fn residual<C: Chart + ?Sized>(chart: &C, u: &[f64], identity: Identity, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {step}")));
    }
    let n = chart.dim();
    if u.len() != n {
        return Err(Error::Chart(format!("expected {n} coordinates, got {}", u.len())));
    }
    let fd = Fd { chart, s: step, n };
    let b0 = fd.base(u)?;
    let e = fd.frame_map(&b0)?;
    let nn = n * n;
    match identity {
        Identity::GaussFormula => {
            let gamma = fd.christoffel(u, &b0)?;
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mut v = DVector::zeros(b0.x.len());
                    for a in 0..n {
                        for b in 0..n {
                            let mut r = &b0.xab[a][b] + &b0.nu * b0.h[(a, b)];
                            for c in 0..n {
                                r -= &b0.xa[c] * gamma[c * nn + a * n + b];
                            }
                            v += r * (e[(i, a)] * e[(j, b)]);
                        }
                    }
                    out.extend(v.iter());
                }
            }
            Ok(out)
        }
        Identity::Weingarten => {
            let normal = |v: &[f64]| Ok(fd.base(v)?.nu.iter().copied().collect::<Vec<_>>());
            let mut coord = Vec::with_capacity(n);
            for a in 0..n {
                let dnu = DVector::from_vec(fd.diff(&normal, u, a)?);
                let mut r = dnu;
                for c in 0..n {
                    let hac: f64 = (0..n).map(|b| b0.h[(a, b)] * b0.ginv[(b, c)]).sum();
                    r -= &b0.xa[c] * hac;
                }
                coord.push(r);
            }
            let mut out = Vec::new();
            for i in 0..n {
                let v = (0..n).fold(DVector::zeros(b0.x.len()), |acc, a| acc + &coord[a] * e[(i, a)]);
                out.extend(v.iter());
            }
            Ok(out)
        }
        Identity::Codazzi => {
            let t = fd.nabla_h(u)?;
            let mut r = vec![0.0; n * nn];
            for c in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        r[c * nn + a * n + b] = t[c * nn + a * n + b] - t[b * nn + a * n + c];
                    }
                }
            }
            Ok(to_frame(&r, 3, &e))
        }
        Identity::GaussEquation => {
            let gamma_at = |v: &[f64]| {
                let b = fd.base(v)?;
                fd.christoffel(v, &b)
            };
            let gamma = fd.christoffel(u, &b0)?;
            let dgamma: Vec<Vec<f64>> = (0..n).map(|c| fd.diff(&gamma_at, u, c)).collect::<Result<_>>()?;
            let gm = |a: usize, b: usize, c: usize| gamma[a * nn + b * n + c];
            // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
            let mut r = vec![0.0; nn * nn];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut low = 0.0;
                            for f in 0..n {
                                let mut up = dgamma[c][f * nn + d * n + b] - dgamma[d][f * nn + c * n + b];
                                for q in 0..n {
                                    up += gm(f, c, q) * gm(q, d, b) - gm(f, d, q) * gm(q, c, b);
                                }
                                low += b0.g[(a, f)] * up;
                            }
                            let h = &b0.h;
                            r[a * n * nn + b * nn + c * n + d] = low - (h[(a, c)] * h[(b, d)] - h[(a, d)] * h[(b, c)]);
                        }
                    }
                }
            }
            Ok(to_frame(&r, 4, &e))
        }
        Identity::Commutation => {
            let gamma = fd.christoffel(u, &b0)?;
            let t = fd.nabla_h(u)?;
            let nab = |v: &[f64]| fd.nabla_h(v);
            let dt: Vec<Vec<f64>> = (0..n).map(|d| fd.diff(&nab, u, d)).collect::<Result<_>>()?;
            // S_dcab = nabla_d nabla_c h_ab
            let mut s = vec![0.0; nn * nn];
            for d in 0..n {
                for c in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let mut v = dt[d][c * nn + a * n + b];
                            for q in 0..n {
                                v -= gamma[q * nn + d * n + c] * t[q * nn + a * n + b];
                                v -= gamma[q * nn + d * n + a] * t[c * nn + q * n + b];
                                v -= gamma[q * nn + d * n + b] * t[c * nn + a * n + q];
                            }
                            s[d * n * nn + c * nn + a * n + b] = v;
                        }
                    }
                }
            }
            let s = to_frame(&s, 4, &e);
            let hf = to_frame(&flat(&b0.h), 2, &e);
            Ok(commutation_defect(&s, &hf, n))
        }
        Identity::SupportHessian => {
            let support = |v: &[f64]| Ok(vec![fd.base(v)?.support]);
            let gamma = fd.christoffel(u, &b0)?;
            let t = fd.nabla_h(u)?;
            let du: Vec<f64> = (0..n).map(|a| Ok(fd.diff(&support, u, a)?[0])).collect::<Result<_>>()?;
            let mut r = vec![0.0; nn];
            for a in 0..n {
                let dua = |v: &[f64]| fd.diff(&support, v, a);
                for b in 0..n {
                    let mut hess = fd.diff(&dua, u, b)?[0];
                    for c in 0..n {
                        hess -= gamma[c * nn + a * n + b] * du[c];
                    }
                    let mut rhs = b0.h[(a, b)];
                    for c in 0..n {
                        for d in 0..n {
                            rhs += t[c * nn + a * n + b] * b0.ginv[(c, d)] * b0.xa[d].dot(&b0.x);
                            rhs -= b0.support * b0.h[(a, c)] * b0.ginv[(c, d)] * b0.h[(d, b)];
                        }
                    }
                    r[a * n + b] = hess - rhs;
                }
            }
            Ok(to_frame(&r, 2, &e))
        }
    }
}

/// `h_{pq;ij} - h_{ij;pq} - [(h_mq h_pj - h_mj h_pq) h_mi + (h_mq h_ij - h_mj h_iq) h_mp]`
/// for all `(i, j, p, q)`, where `h_{ab;cd}` differentiates along `e_c`
/// first and `e_d` second. `s` holds `nabla_d nabla_c h_ab` at `d c a b`.
fn commutation_defect(s: &[f64], h: &[f64], n: usize) -> Vec<f64> {
    let nn = n * n;
    let hd = |a: usize, b: usize| h[a * n + b];
    let second = |a: usize, b: usize, c: usize, d: usize| s[d * n * nn + c * nn + a * n + b];
    let mut out = Vec::with_capacity(nn * nn);
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let mut rhs = 0.0;
                    for m in 0..n {
                        rhs += (hd(m, q) * hd(p, j) - hd(m, j) * hd(p, q)) * hd(m, i);
                        rhs += (hd(m, q) * hd(i, j) - hd(m, j) * hd(i, q)) * hd(m, p);
                    }
                    out.push(second(p, q, i, j) - second(i, j, p, q) - rhs);
                }
            }
        }
    }
    out
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Max-norm residuals of the first-order identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualTriple {
    pub gauss_formula: f64,
    pub weingarten: f64,
    pub codazzi: f64,
}

pub fn check_gauss_weingarten_codazzi<C: Chart + ?Sized>(chart: &C, u: &[f64], step: f64) -> Result<ResidualTriple> {
    Ok(ResidualTriple {
        gauss_formula: max_abs(&residual(chart, u, Identity::GaussFormula, step)?),
        weingarten: max_abs(&residual(chart, u, Identity::Weingarten, step)?),
        codazzi: max_abs(&residual(chart, u, Identity::Codazzi, step)?),
    })
}

pub fn check_gauss_equation<C: Chart + ?Sized>(chart: &C, u: &[f64], step: f64) -> Result<f64> {
    Ok(max_abs(&residual(chart, u, Identity::GaussEquation, step)?))
}

pub fn check_commutation<C: Chart + ?Sized>(chart: &C, u: &[f64], step: f64) -> Result<f64> {
    Ok(max_abs(&residual(chart, u, Identity::Commutation, step)?))
}

pub fn support_hessian_check<C: Chart + ?Sized>(chart: &C, u: &[f64], step: f64) -> Result<f64> {
    Ok(max_abs(&residual(chart, u, Identity::SupportHessian, step)?))
}

/// Residuals below this are treated as exact (truncation cancels and only
/// roundoff remains, e.g. Codazzi on a round sphere).
pub const RESIDUAL_FLOOR: f64 = 1e-10;

/// Observed order required between consecutive ladder levels.
pub const MIN_ORDER: f64 = 1.8;

/// A step-halving study of one identity at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub identity: Identity,
    pub point: Vec<f64>,
    pub steps: Vec<f64>,
    /// Max-norm residual per step.
    pub residuals: Vec<f64>,
    /// `log2(r_i / r_{i+1})`; `None` where both levels sit below the floor.
    pub orders: Vec<Option<f64>>,
    /// Max norm of `(4 c(s/2) - c(s)) / 3` for the two finest levels.
    pub extrapolated: f64,
    /// Second-order convergence observed (or every level below the floor).
    pub converged: bool,
}

impl Ladder {
    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().flatten().copied().reduce(f64::min)
    }
}

/// Evaluates `identity` at steps `base_step / 2^i`, `i < levels`.
pub fn refinement_ladder<C: Chart + ?Sized>(
    chart: &C,
    u: &[f64],
    identity: Identity,
    base_step: f64,
    levels: usize,
) -> Result<Ladder> {
    if levels < 2 {
        return Err(Error::Domain("a refinement ladder needs at least two levels".into()));
    }
    let steps: Vec<f64> = (0..levels).map(|i| base_step / 2f64.powi(i as i32)).collect();
    let comps: Vec<Vec<f64>> = steps.iter().map(|&s| residual(chart, u, identity, s)).collect::<Result<_>>()?;
    let residuals: Vec<f64> = comps.iter().map(|c| max_abs(c)).collect();
    let orders: Vec<Option<f64>> = residuals
        .windows(2)
        .map(|w| {
            if w[0] <= RESIDUAL_FLOOR && w[1] <= RESIDUAL_FLOOR {
                None
            } else {
                Some((w[0] / w[1]).log2())
            }
        })
        .collect();
    let (coarse, fine) = (&comps[levels - 2], &comps[levels - 1]);
    let extrap: Vec<f64> = coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let converged = orders.iter().all(|o| o.map_or(true, |v| v >= MIN_ORDER));
    Ok(Ladder {
        identity,
        point: u.to_vec(),
        steps,
        residuals,
        orders,
        extrapolated: max_abs(&extrap),
        converged,
    })
}

/// Interior sample points `(theta, phi)` away from the chart poles.
pub fn sample_points(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            [0.35 + (PI - 0.7) * t, -2.8 + 5.3 * ((i * 7 % count.max(1)) as f64 + 0.5) / count.max(1) as f64]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: [f64; 2] = [0.9, 0.4];

    #[test]
    fn frame_conversion_of_identity_is_trivial() {
        let e = DMatrix::identity(2, 2);
        let t: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert_eq!(to_frame(&t, 3, &e), t);
        let e = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert_eq!(to_frame(&[1.0, 1.0, 1.0, 1.0], 2, &e), vec![4.0, 6.0, 6.0, 9.0]);
    }

    #[test]
    fn unit_sphere_residuals_are_small() {
        let s = AnalyticSurface::sphere(1.0).unwrap();
        for id in Identity::ALL {
            let l = refinement_ladder(&s, &P, id, 1e-3, 2).unwrap();
            assert!(l.extrapolated <= 1e-8, "{id:?}: {l:?}");
        }
        // both sides of the commutation formula vanish identically
        assert!(check_commutation(&s, &P, 1e-3).unwrap() < 1e-8);
    }

    #[test]
    fn ellipsoid_identities_converge_at_second_order() {
        let s = AnalyticSurface::ellipsoid(1.0, 1.2, 1.5).unwrap();
        for id in Identity::ALL {
            let l = refinement_ladder(&s, &[1.1, 0.7], id, 0.04, 3).unwrap();
            assert!(l.converged, "{id:?}: {l:?}");
            assert!(l.residuals[2] < 1e-2);
        }
    }

    #[test]
    fn perturbed_sphere_commutation_converges() {
        let g = RadialGraph::perturbed_sphere(0.05);
        let l = refinement_ladder(&g, &[1.0, -0.6], Identity::Commutation, 0.04, 3).unwrap();
        assert!(l.converged, "{l:?}");
    }

    #[test]
    fn gauss_equation_on_sphere_space_form() {
        let s = AnalyticSurface::sphere(2.0).unwrap();
        assert!(check_gauss_equation(&s, &P, 1e-3).unwrap() < 1e-5);
    }

    #[test]
    fn oversized_step_is_flagged() {
        let s = AnalyticSurface::spheroid(1.0, 2.0).unwrap();
        let l = refinement_ladder(&s, &[0.8, 0.0], Identity::Commutation, 0.7, 3).unwrap();
        assert!(!l.converged, "{l:?}");
    }
}
