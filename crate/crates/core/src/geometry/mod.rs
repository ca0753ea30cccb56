//! Hypersurface geometry on charts.
//!
//! Every surface is handled through the second-order jet of a
//! parametrisation `u -> X(u)` in `R^{n+1}`: position, coordinate tangents
//! `X_a` and second derivatives `X_ab`. [`PointFrame::from_jet`] turns a jet
//! into an orthonormal tangent frame, the outer unit normal, the support
//! value and the second fundamental form `h_ij = -<X_ij, nu>` in that frame.
//! The sign makes round spheres positively curved with respect to the outer
//! normal.

mod analytic;
pub mod identities;
mod radial;

pub use analytic::{AnalyticSurface, SurfaceKind};
pub use identities::{Chart, RadialGraph};
pub use radial::{axisymmetric_curvatures, curve_curvature, CurveGeometry, ProfileGeometry, RadialGrid, RadialSurface};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::symcalc::CurvatureVector;
use crate::{Error, Result};

/// Second-order jet of a parametrisation at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceJet {
    pub position: DVector<f64>,
    /// `tangents[a] = dX/du_a`.
    pub tangents: Vec<DVector<f64>>,
    /// `second[a][b] = d^2X/du_a du_b`.
    pub second: Vec<Vec<DVector<f64>>>,
}

impl SurfaceJet {
    pub fn dim(&self) -> usize {
        self.tangents.len()
    }

    /// Coordinate metric `g_ab = <X_a, X_b>`.
    pub fn metric(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| self.tangents[a].dot(&self.tangents[b]))
    }
}

/// Frame data at a surface point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointFrame {
    pub position: DVector<f64>,
    pub normal: DVector<f64>,
    /// `u = <X, nu>`.
    pub support: f64,
    /// Row `i` is the ambient vector `e_i`.
    pub frame: DMatrix<f64>,
    /// `h(e_i, e_j)`.
    pub second_form: DMatrix<f64>,
    pub principal: CurvatureVector,
    /// Column `i` holds the frame coordinates of the `i`-th principal direction.
    pub principal_dirs: DMatrix<f64>,
    /// `X_a = sum_i coframe[(a, i)] e_i`; lower triangular.
    pub coframe: DMatrix<f64>,
}

impl PointFrame {
    /// Orthonormalises the coordinate tangents (Gram-Schmidt in coordinate
    /// order) and orients the normal so that `<X, nu> > 0`.
    pub fn from_jet(jet: &SurfaceJet) -> Result<Self> {
        let n = jet.dim();
        let ambient = jet.position.len();
        if ambient != n + 1 {
            return Err(Error::Chart(format!("jet of dimension {n} in R^{ambient}")));
        }
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut coframe = DMatrix::zeros(n, n);
        for (a, t) in jet.tangents.iter().enumerate() {
            let mut v = t.clone();
            for (i, e) in basis.iter().enumerate() {
                let c = t.dot(e);
                coframe[(a, i)] = c;
                v -= e * c;
            }
            let norm = v.norm();
            if norm <= 1e-12 * t.norm().max(1.0) {
                return Err(Error::Chart("coordinate tangents are degenerate".into()));
            }
            coframe[(a, a)] = norm;
            basis.push(v / norm);
        }

        // complete the basis with the standard vector farthest from the span
        let mut best: Option<DVector<f64>> = None;
        for axis in 0..ambient {
            let mut v = DVector::zeros(ambient);
            v[axis] = 1.0;
            for e in &basis {
                let c = v.dot(e);
                v -= e * c;
            }
            if best.as_ref().map_or(true, |b| v.norm() > b.norm()) {
                best = Some(v);
            }
        }
        let mut normal = best.expect("ambient dimension >= 1").normalize();
        let support = jet.position.dot(&normal);
        if support == 0.0 {
            return Err(Error::Chart("normal orientation undefined (support value is zero)".into()));
        }
        if support < 0.0 {
            normal = -normal;
        }
        let support = support.abs();

        let h_coord = DMatrix::from_fn(n, n, |a, b| -jet.second[a][b].dot(&normal));
        let inv = coframe
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Chart("singular coframe".into()))?;
        let mut second_form = &inv * h_coord * inv.transpose();
        second_form = (&second_form + second_form.transpose()) * 0.5;

        let (principal, principal_dirs) = sorted_eigen(&second_form)?;
        let frame = DMatrix::from_fn(n, ambient, |i, c| basis[i][c]);
        Ok(Self {
            position: jet.position.clone(),
            normal,
            support,
            frame,
            second_form,
            principal,
            principal_dirs,
            coframe,
        })
    }

    pub fn dim(&self) -> usize {
        self.second_form.nrows()
    }

    /// Largest violation of the frame invariants: unit normal, tangency and
    /// orthonormality of the `e_i`, symmetry of `h`.
    pub fn invariant_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = (self.normal.norm() - 1.0).abs();
        for i in 0..n {
            let ei = self.frame.row(i).transpose();
            worst = worst.max(ei.dot(&self.normal).abs());
            for j in 0..n {
                let ej = self.frame.row(j).transpose();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ei.dot(&ej) - target).abs());
                worst = worst.max((self.second_form[(i, j)] - self.second_form[(j, i)]).abs());
            }
        }
        worst
    }

    /// Ambient vector of the `i`-th principal direction.
    pub fn principal_direction(&self, i: usize) -> DVector<f64> {
        self.frame.transpose() * self.principal_dirs.column(i)
    }

    /// Frame coordinates `<e_i, v>` of an ambient vector.
    pub fn frame_components(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.frame * v
    }
}

/// Eigenvalues in descending order with matching eigenvector columns. Ties
/// keep the solver's order, and each column is signed so that its first
/// non-negligible entry is positive.
pub(crate) fn sorted_eigen(m: &DMatrix<f64>) -> Result<(CurvatureVector, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        vecs.set_column(col, &v);
    }
    Ok((CurvatureVector::new(values)?, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_jet(r: f64, theta: f64, phi: f64) -> SurfaceJet {
        AnalyticSurface::sphere(r).unwrap().jet(theta, phi).unwrap()
    }

    #[test]
    fn sphere_frame() {
        let f = PointFrame::from_jet(&sphere_jet(2.0, 0.8, 1.9)).unwrap();
        assert!(f.invariant_defect() < 1e-12);
        assert!((f.support - 2.0).abs() < 1e-14);
        for k in f.principal.values() {
            assert!((k - 0.5).abs() < 1e-14);
        }
        assert!((&f.normal - &f.position / 2.0).norm() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_tangents() {
        let mut jet = sphere_jet(1.0, 0.5, 0.5);
        jet.tangents[1] = jet.tangents[0].clone() * 2.0;
        assert!(matches!(PointFrame::from_jet(&jet), Err(Error::Chart(_))));
    }

    #[test]
    fn eigen_sorting_is_descending() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 3.0]);
        let (vals, vecs) = sorted_eigen(&m).unwrap();
        assert_eq!(vals.values(), &[5.0, 3.0, 1.0]);
        assert!((vecs[(1, 0)] - 1.0).abs() < 1e-15);
    }
}
