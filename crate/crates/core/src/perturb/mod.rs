//! Perturbation of the second fundamental form that makes the largest
//! principal curvature simple.
//!
//! Given `h` in an orthonormal frame and a unit vector `e_1` (by default a
//! top eigenvector), `B = I - e_1 e_1^T` and `h~ = h - B`. Along `e_1` nothing
//! changes while every other direction drops by one, so `kappa~_1 = kappa_1`
//! and `kappa~_p = kappa_p - 1`: the top eigenvalue of `h~` is separated by at
//! least one from the rest and is smooth in `h~`. Its first derivative is
//! `delta_1p delta_1q` and its second derivative has the two gap-weighted
//! patterns implemented by [`EigJet`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::geometry::{sorted_eigen, PointFrame};
use crate::symcalc::CurvatureVector;
use crate::{Error, Result};

/// Relative asymmetry accepted as roundoff.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbedOperator {
    pub base: DMatrix<f64>,
    pub base_eigs: CurvatureVector,
    /// The alignment vector `e_1` in frame coordinates.
    pub alignment: DVector<f64>,
    pub b_tensor: DMatrix<f64>,
    pub tilde: DMatrix<f64>,
    pub tilde_eigs: CurvatureVector,
    /// Eigenvectors of `h~`, column `i` for `kappa~_i`.
    pub tilde_vectors: DMatrix<f64>,
}

impl PerturbedOperator {
    pub fn gap(&self) -> f64 {
        let v = self.tilde_eigs.values();
        if v.len() < 2 {
            f64::INFINITY
        } else {
            v[0] - v[1]
        }
    }

    /// `B` written in its own aligned basis: `B_11 = 0`, `B_ii = 1` otherwise.
    pub fn b_in_aligned_basis(&self) -> DMatrix<f64> {
        let q = aligned_basis(&self.alignment);
        q.transpose() * &self.b_tensor * q
    }
}

fn check_symmetric(h: &DMatrix<f64>) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::Domain(format!("expected a non-empty square matrix, got {}x{}", h.nrows(), h.ncols())));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let asym = (h - h.transpose()).amax();
    if asym > SYMMETRY_TOL * (1.0 + h.amax()) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Orthonormal basis whose first column is `v`, completed deterministically
/// by Gram-Schmidt on the coordinate vectors.
fn aligned_basis(v: &DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    let mut cols: Vec<DVector<f64>> = vec![v.clone()];
    for axis in 0..n {
        if cols.len() == n {
            break;
        }
        let mut w = DVector::zeros(n);
        w[axis] = 1.0;
        for c in &cols {
            let d = w.dot(c);
            w -= c * d;
        }
        if w.norm() > 1e-8 {
            cols.push(w.normalize());
        }
    }
    DMatrix::from_columns(&cols)
}

/// Unit top eigenvector chosen reproducibly: the projection of the first
/// coordinate vector onto the top eigenspace that is not annihilated (tested
/// in index order), normalised.
fn top_vector(h: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let top = eig.eigenvalues.max();
    let tol = 1e-10 * (1.0 + eig.eigenvalues.amax());
    let space: Vec<DVector<f64>> = (0..n)
        .filter(|&i| top - eig.eigenvalues[i] <= tol)
        .map(|i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    for axis in 0..n {
        let mut p = DVector::zeros(n);
        for v in &space {
            p += v * v[axis];
        }
        if p.norm() > 1e-6 {
            return Ok(p.normalize());
        }
    }
    Err(Error::Domain("empty top eigenspace".into()))
}

/// Perturbs `h` along its own top eigenvector.
pub fn build_perturbation(h: &DMatrix<f64>) -> Result<PerturbedOperator> {
    check_symmetric(h)?;
    let v = top_vector(h)?;
    perturb_along(h, &v)
}

/// Perturbs `h` with `B = I - v v^T` for a given unit `v`.
pub fn perturb_along(h: &DMatrix<f64>, v: &DVector<f64>) -> Result<PerturbedOperator> {
    check_symmetric(h)?;
    let n = h.nrows();
    if v.len() != n || (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain("alignment must be a unit vector of matching dimension".into()));
    }
    let base = (h + h.transpose()) * 0.5;
    let b = DMatrix::identity(n, n) - v * v.transpose();
    let tilde = &base - &b;
    let (base_eigs, _) = sorted_eigen(&base)?;
    let (tilde_eigs, tilde_vectors) = sorted_eigen(&tilde)?;
    Ok(PerturbedOperator {
        base,
        base_eigs,
        alignment: v.clone(),
        b_tensor: b,
        tilde,
        tilde_eigs,
        tilde_vectors,
    })
}

/// First and second derivatives of `kappa~_1` with respect to the entries
/// of `h~`, expressed in the eigenbasis of `h~`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigJet {
    pub top: f64,
    /// `kappa~_1 - kappa~_p`; entry 0 is unused and set to infinity.
    pub gaps: Vec<f64>,
    /// `d kappa~_1 / d h~_pq = delta_1p delta_1q`.
    pub grad: DMatrix<f64>,
    /// Rank-4 table, flattened as `((p n + q) n + r) n + s`.
    pub hess: Vec<f64>,
    /// Eigenbasis of `h~` (columns) in which the tables are written.
    pub basis: DMatrix<f64>,
}

impl EigJet {
    pub fn dim(&self) -> usize {
        self.grad.nrows()
    }

    pub fn hess_entry(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.dim();
        self.hess[((p * n + q) * n + r) * n + s]
    }

    fn to_eigenbasis(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        self.basis.transpose() * d * &self.basis
    }

    /// `d/dt kappa~_1(h~ + t D)` at `t = 0`, with `D` in frame coordinates.
    pub fn directional_first(&self, d: &DMatrix<f64>) -> f64 {
        let e = self.to_eigenbasis(d);
        self.grad.component_mul(&e).sum()
    }

    /// `d^2/dt^2 kappa~_1(h~ + t D)` at `t = 0`, i.e. the full contraction
    /// `sum kappa~_1^{pq,rs} D_pq D_rs` in the eigenbasis.
    pub fn directional_second(&self, d: &DMatrix<f64>) -> f64 {
        let e = self.to_eigenbasis(d);
        let n = self.dim();
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let w = self.hess_entry(p, q, r, s);
                        if w != 0.0 {
                            acc += w * e[(p, q)] * e[(r, s)];
                        }
                    }
                }
            }
        }
        acc
    }
}

/// Builds the jet of the top eigenvalue of `op.tilde`.
pub fn eig_jet(op: &PerturbedOperator) -> Result<EigJet> {
    top_eigen_jet(&op.tilde)
}

/// Jet of the top eigenvalue of any symmetric matrix with a simple top
/// eigenvalue.
pub fn top_eigen_jet(h_tilde: &DMatrix<f64>) -> Result<EigJet> {
    check_symmetric(h_tilde)?;
    let (eigs, vectors) = sorted_eigen(h_tilde)?;
    let v = eigs.values();
    let n = v.len();
    let gap = if n > 1 { v[0] - v[1] } else { f64::INFINITY };
    if gap <= 1e-12 * (1.0 + v[0].abs()) {
        return Err(Error::DegenerateTop(gap));
    }
    let gaps: Vec<f64> = (0..n).map(|p| if p == 0 { f64::INFINITY } else { v[0] - v[p] }).collect();
    let mut grad = DMatrix::zeros(n, n);
    grad[(0, 0)] = 1.0;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut hess = vec![0.0; n * n * n * n];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let mut w = 0.0;
                    if p != 0 {
                        w += delta(0, q) * delta(0, r) * delta(p, s) / gaps[p];
                    }
                    if r != 0 {
                        w += delta(0, s) * delta(0, p) * delta(q, r) / gaps[r];
                    }
                    hess[((p * n + q) * n + r) * n + s] = w;
                }
            }
        }
    }
    Ok(EigJet {
        top: v[0],
        gaps,
        grad,
        hess,
        basis: vectors,
    })
}

/// Finite-difference derivatives of `t -> lambda_max(h~ + t D)` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEigDerivatives {
    pub first: f64,
    pub second: f64,
    /// Base step of the Richardson ladder.
    pub step: f64,
}

fn lambda_top_and_gap(m: &DMatrix<f64>) -> (f64, f64) {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let gap = if ev.len() > 1 { ev[0] - ev[1] } else { f64::INFINITY };
    (ev[0], gap)
}

/// Centred differences at steps `t0 / 2^i`, `i < 4`, combined by repeated
/// Richardson extrapolation. The base step is a fixed fraction of
/// `gap / |D|`, so the stencil stays well inside the analyticity radius of
/// the simple eigenvalue while the differences stay far above roundoff.
pub fn fd_eig_oracle(h_tilde: &DMatrix<f64>, direction: &DMatrix<f64>) -> Result<FdEigDerivatives> {
    check_symmetric(h_tilde)?;
    check_symmetric(direction)?;
    if direction.shape() != h_tilde.shape() {
        return Err(Error::Domain("direction shape differs from the matrix".into()));
    }
    let (lam0, gap0) = lambda_top_and_gap(h_tilde);
    let scale = 1.0 + h_tilde.norm();
    if gap0 <= 1e-10 * scale {
        return Err(Error::OracleRefusal(format!("top eigenvalue is not simple (gap {gap0:e})")));
    }
    let dnorm = direction.norm();
    if dnorm == 0.0 {
        return Ok(FdEigDerivatives {
            first: 0.0,
            second: 0.0,
            step: 0.0,
        });
    }
    const LEVELS: usize = 4;
    let t0 = ORACLE_GAP_FRACTION * gap0 / dnorm;
    let mut firsts = [0.0; LEVELS];
    let mut seconds = [0.0; LEVELS];
    for lvl in 0..LEVELS {
        let t = t0 / 2f64.powi(lvl as i32);
        let (up, gu) = lambda_top_and_gap(&(h_tilde + direction * t));
        let (dn, gd) = lambda_top_and_gap(&(h_tilde - direction * t));
        if gu < 0.5 * gap0 || gd < 0.5 * gap0 {
            return Err(Error::OracleRefusal(format!(
                "eigenvalue gap collapses inside the stencil (t = {t:e}, gaps {gu:e}/{gd:e} vs {gap0:e})"
            )));
        }
        firsts[lvl] = (up - dn) / (2.0 * t);
        seconds[lvl] = (up - 2.0 * lam0 + dn) / (t * t);
    }
    Ok(FdEigDerivatives {
        first: richardson(&firsts),
        second: richardson(&seconds),
        step: t0,
    })
}

/// Fraction of `gap / |D|` used as the oracle's base step.
pub const ORACLE_GAP_FRACTION: f64 = 0.1;

/// Eliminates the even error terms `t^2, t^4, ...` from estimates at
/// successively halved steps.
fn richardson(values: &[f64]) -> f64 {
    let mut row = values.to_vec();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    row[0]
}

/// Covariant derivatives of `B = g - theta (x) theta`, `theta = g(., e_1)`,
/// for a frame with connection coefficients `connection[p][(i, j)] =
/// <D_{e_p} e_i, e_j>`. In a normal frame every coefficient vanishes and so
/// do `B_{ij,p}` and `B_{11,pq}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BDerivatives {
    /// `B_{ij,p}` flattened as `(i n + j) n + p`.
    pub first: Vec<f64>,
    /// `B_{11,pq}`.
    pub second_11: DMatrix<f64>,
}

pub fn b_tensor_derivatives(connection: &[DMatrix<f64>]) -> BDerivatives {
    let n = connection.len();
    let d1 = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut first = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                // (nabla_p theta)_i = <e_i, D_p e_1>
                let w = connection[p][(0, i)] * d1(j, 0) + d1(i, 0) * connection[p][(0, j)];
                first[(i * n + j) * n + p] = -w;
            }
        }
    }
    let second_11 = DMatrix::from_fn(n, n, |p, q| {
        2.0 * (0..n).map(|m| connection[p][(0, m)] * connection[q][(0, m)]).sum::<f64>()
    });
    BDerivatives { first, second_11 }
}

/// `Q = log kappa_1 - A u` and `Q~ = log kappa~_1 - A u` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestQuantity {
    pub amplitude: f64,
    pub kappa1: f64,
    pub kappa1_tilde: f64,
    pub support: f64,
    pub q_value: f64,
    pub q_tilde: f64,
}

/// Evaluates both test quantities. `alignment` is an ambient vector defining
/// `e_1` (projected onto the tangent space and normalised); by default the
/// point's own top principal direction is used, so `kappa~_1 = kappa_1`.
pub fn q_quantities(frame: &PointFrame, amplitude: f64, alignment: Option<&DVector<f64>>) -> Result<TestQuantity> {
    if !(amplitude > 1.0) {
        return Err(Error::Domain(format!("the amplitude A must exceed 1, got {amplitude}")));
    }
    let kappa1 = frame.principal.largest();
    if !(kappa1 > 0.0) {
        return Err(Error::OutsideOmega(kappa1));
    }
    let op = match alignment {
        None => build_perturbation(&frame.second_form)?,
        Some(v) => {
            let local = frame.frame_components(v);
            if local.norm() < 1e-12 {
                return Err(Error::Domain("alignment vector is normal to the surface".into()));
            }
            perturb_along(&frame.second_form, &local.normalize())?
        }
    };
    let kappa1_tilde = op.tilde_eigs.values()[0];
    if !(kappa1_tilde > 0.0) {
        return Err(Error::OutsideOmega(kappa1_tilde));
    }
    let u = frame.support;
    Ok(TestQuantity {
        amplitude,
        kappa1,
        kappa1_tilde,
        support: u,
        q_value: kappa1.ln() - amplitude * u,
        q_tilde: kappa1_tilde.ln() - amplitude * u,
    })
}

/// Index of the largest `Q~` over a set of frames (exhaustive scan), with
/// each frame perturbed along its own top direction.
pub fn argmax_q_tilde(frames: &[PointFrame], amplitude: f64) -> Result<(usize, TestQuantity)> {
    let mut best: Option<(usize, TestQuantity)> = None;
    for (i, f) in frames.iter().enumerate() {
        let q = q_quantities(f, amplitude, None)?;
        if best.as_ref().map_or(true, |(_, b)| q.q_tilde > b.q_tilde) {
            best = Some((i, q));
        }
    }
    best.ok_or_else(|| Error::Domain("no frames to scan".into()))
}

/// Both sides of the first-order condition at the middle of three frames
/// sampled along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderReport {
    /// `kappa~_{1,i} / kappa_1` by a centred difference.
    pub log_derivative: f64,
    /// `A u_i`.
    pub support_term: f64,
    /// `Q~_i`, the difference of the two.
    pub residual: f64,
    /// Arc-length half spacing used.
    pub ds: f64,
}

/// `Q~_i = kappa~_{1,i}/kappa_1 - A u_i` along the curve through `frames`
/// (exactly three, equally spaced). The neighbours are perturbed with the
/// middle point's top direction, so `kappa~_1` is the smooth branch.
pub fn first_order_condition(frames: &[PointFrame], amplitude: f64) -> Result<FirstOrderReport> {
    if frames.len() != 3 {
        return Err(Error::Domain("first-order condition needs exactly three frames".into()));
    }
    let mid = &frames[1];
    let e1 = mid.principal_direction(0);
    let q: Vec<TestQuantity> = frames
        .iter()
        .map(|f| q_quantities(f, amplitude, Some(&e1)))
        .collect::<Result<_>>()?;
    let ds = 0.5 * (&frames[2].position - &frames[0].position).norm();
    if ds <= 0.0 {
        return Err(Error::Domain("frames coincide".into()));
    }
    let dk = (q[2].kappa1_tilde - q[0].kappa1_tilde) / (2.0 * ds);
    let du = (q[2].support - q[0].support) / (2.0 * ds);
    let log_derivative = dk / q[1].kappa1;
    let support_term = amplitude * du;
    Ok(FirstOrderReport {
        log_derivative,
        support_term,
        residual: log_derivative - support_term,
        ds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AnalyticSurface;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    fn sym(n: usize, i: usize, j: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] += 1.0;
        m[(j, i)] += 1.0;
        m
    }

    #[test]
    fn perturbation_examples() {
        let op = build_perturbation(&diag(&[2.0, 2.0, 1.0])).unwrap();
        assert_eq!(op.tilde_eigs.values(), &[2.0, 1.0, 0.0]);
        let op = build_perturbation(&diag(&[5.0, 1.0])).unwrap();
        assert_eq!(op.tilde_eigs.values(), &[5.0, 0.0]);
        let op = build_perturbation(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(op.tilde_eigs.values(), &[1.0, 0.0, 0.0]);
        let b = op.b_in_aligned_basis();
        assert!((b - diag(&[0.0, 1.0, 1.0])).amax() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(build_perturbation(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn tie_breaking_is_deterministic() {
        let a = build_perturbation(&diag(&[1.0, 3.0, 3.0])).unwrap();
        let b = build_perturbation(&diag(&[1.0, 3.0, 3.0])).unwrap();
        assert_eq!(a.alignment, b.alignment);
        assert!((a.alignment[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_jet_examples() {
        let op = build_perturbation(&diag(&[3.0, 2.0])).unwrap(); // h~ = diag(3, 1)
        let jet = eig_jet(&op).unwrap();
        assert_eq!(jet.grad[(0, 0)], 1.0);
        assert_eq!(jet.grad.sum(), 1.0);
        assert!((jet.hess_entry(0, 1, 1, 0) - 0.5).abs() < 1e-15);
        assert!((jet.directional_second(&sym(2, 0, 1)) - 1.0).abs() < 1e-14);

        let op = build_perturbation(&diag(&[3.0, 2.0, 1.0])).unwrap(); // h~ = diag(3, 1, 0)
        let jet = eig_jet(&op).unwrap();
        let t = 0.1;
        let resp = jet.directional_second(&(sym(3, 0, 2) * t));
        assert!((resp - 2.0 * t * t / 3.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_examples() {
        let h = diag(&[3.0, 1.0]);
        let d = diag(&[1.0, 0.0]);
        assert!((fd_eig_oracle(&h, &d).unwrap().first - 1.0).abs() < 1e-10);
        let d = diag(&[0.0, 1.0]);
        assert!(fd_eig_oracle(&h, &d).unwrap().first.abs() < 1e-10);
        let r = fd_eig_oracle(&h, &sym(2, 0, 1)).unwrap();
        assert!((r.second - 1.0).abs() < 1e-8, "{r:?}");
        assert!(matches!(fd_eig_oracle(&diag(&[1.0, 1.0]), &d), Err(Error::OracleRefusal(_))));
    }

    #[test]
    fn jet_matches_oracle_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        let mut tested = 0;
        while tested < 300 {
            let n = rng.gen_range(2..=6);
            let h = crate::sampling::symmetric(&mut rng, n, 3.0);
            let Ok(jet) = top_eigen_jet(&h) else { continue };
            if jet.gaps[1] < 1e-2 {
                continue;
            }
            let d = crate::sampling::symmetric(&mut rng, n, 1.0);
            let fd = fd_eig_oracle(&h, &d).unwrap();
            worst = worst.max(crate::tolerance::relative_error(jet.directional_first(&d), fd.first));
            worst = worst.max(crate::tolerance::relative_error(jet.directional_second(&d), fd.second));
            tested += 1;
        }
        assert!(worst < 1e-6, "worst relative error {worst:e}");
    }

    #[test]
    fn b_derivatives_vanish_in_a_normal_frame() {
        let zero = vec![DMatrix::zeros(3, 3); 3];
        let d = b_tensor_derivatives(&zero);
        assert!(d.first.iter().all(|x| *x == 0.0));
        assert!(d.second_11.iter().all(|x| *x == 0.0));
        let mut conn = zero.clone();
        conn[1][(0, 2)] = 0.5;
        conn[1][(2, 0)] = -0.5;
        let d = b_tensor_derivatives(&conn);
        assert_eq!(d.second_11[(1, 1)], 0.5);
    }

    #[test]
    fn q_quantities_on_spheres() {
        let f = AnalyticSurface::sphere(1.0).unwrap().frame_at(0.7, 0.2).unwrap();
        let q = q_quantities(&f, 2.0, None).unwrap();
        assert!((q.q_value + 2.0).abs() < 1e-14 && (q.q_tilde + 2.0).abs() < 1e-14);
        let r = 2.5;
        let f = AnalyticSurface::sphere(r).unwrap().frame_at(1.7, 0.2).unwrap();
        let q = q_quantities(&f, 3.0, None).unwrap();
        assert!((q.q_value - (-(r as f64).ln() - 3.0 * r)).abs() < 1e-13);
        assert!(matches!(q_quantities(&f, 1.0, None), Err(Error::Domain(_))));
    }

    #[test]
    fn q_tilde_below_q_with_foreign_alignment() {
        let s = AnalyticSurface::spheroid(1.0, 2.0).unwrap();
        let e = DVector::from_column_slice(&[0.3, 0.5, 0.8]);
        for i in 1..20 {
            let f = s.frame_at(0.15 * i as f64, 0.3 * i as f64).unwrap();
            let q = q_quantities(&f, 2.0, Some(&e)).unwrap();
            assert!(q.q_tilde <= q.q_value + 1e-14);
        }
    }

    #[test]
    fn first_order_on_sphere_vanishes() {
        let s = AnalyticSurface::sphere(2.0).unwrap();
        let frames: Vec<_> = [0.99, 1.0, 1.01].iter().map(|&t| s.frame_at(t, 0.5).unwrap()).collect();
        let r = first_order_condition(&frames, 2.0).unwrap();
        assert!(r.residual.abs() < 1e-10);
    }
}
