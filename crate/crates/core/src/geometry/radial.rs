//! Star-shaped surfaces `X = rho(omega) omega` sampled on grids over the
//! sphere.
//!
//! Three grids are supported:
//!
//! * [`RadialGrid::Periodic`] — closed curves in the plane (`n = 1`), nodes
//!   `phi_j = 2 pi j / N`.
//! * [`RadialGrid::Axisymmetric`] — surfaces of revolution about the `z` axis
//!   (`n = 2`), profile nodes at cell centres `theta_j = (j + 1/2) pi / N`.
//!   Ghost nodes mirror the profile evenly across both poles, which is exactly
//!   smoothness of a revolution surface through the axis.
//! * [`RadialGrid::LatLong`] — general surfaces (`n = 2`) on a cell-centred
//!   latitude/longitude grid. A ghost row across a pole is the interior row
//!   shifted by half a turn in longitude, since `omega(-theta, phi) =
//!   omega(theta, phi + pi)`.
//!
//! Derivatives of `rho` are centred second-order differences; the geometry of
//! a node is then exact given those derivatives.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{PointFrame, SurfaceJet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialGrid {
    Periodic { nodes: usize },
    Axisymmetric { nodes: usize },
    LatLong { n_theta: usize, n_phi: usize },
}

impl RadialGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialGrid::Periodic { nodes } => nodes >= 8,
            RadialGrid::Axisymmetric { nodes } => nodes >= 4,
            RadialGrid::LatLong { n_theta, n_phi } => n_theta >= 4 && n_phi >= 8 && n_phi % 2 == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(
                "grid",
                format!("unsupported grid {self:?} (periodic >= 8, axisymmetric >= 4, lat-long needs n_theta >= 4 and even n_phi >= 8)"),
            ))
        }
    }

    /// Intrinsic dimension `n` of the sampled hypersurface.
    pub fn dim(&self) -> usize {
        match self {
            RadialGrid::Periodic { .. } => 1,
            _ => 2,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            RadialGrid::Periodic { nodes } | RadialGrid::Axisymmetric { nodes } => nodes,
            RadialGrid::LatLong { n_theta, n_phi } => n_theta * n_phi,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid spacing in each coordinate direction.
    pub fn spacing(&self) -> Vec<f64> {
        match *self {
            RadialGrid::Periodic { nodes } => vec![2.0 * PI / nodes as f64],
            RadialGrid::Axisymmetric { nodes } => vec![PI / nodes as f64],
            RadialGrid::LatLong { n_theta, n_phi } => vec![PI / n_theta as f64, 2.0 * PI / n_phi as f64],
        }
    }

    /// Coordinates of a node: `[phi]` for curves, `[theta]` for profiles and
    /// `[theta, phi]` for lat-long grids.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let h = self.spacing();
        match *self {
            RadialGrid::Periodic { .. } => vec![idx as f64 * h[0]],
            RadialGrid::Axisymmetric { .. } => vec![(idx as f64 + 0.5) * h[0]],
            RadialGrid::LatLong { n_phi, .. } => {
                let (j, m) = (idx / n_phi, idx % n_phi);
                vec![(j as f64 + 0.5) * h[0], m as f64 * h[1]]
            }
        }
    }

    /// Same grid type at a different resolution (lat-long keeps its aspect).
    pub fn with_resolution(&self, nodes: usize) -> RadialGrid {
        match *self {
            RadialGrid::Periodic { .. } => RadialGrid::Periodic { nodes },
            RadialGrid::Axisymmetric { .. } => RadialGrid::Axisymmetric { nodes },
            RadialGrid::LatLong { .. } => RadialGrid::LatLong { n_theta: nodes, n_phi: 2 * nodes },
        }
    }

    /// Nominal resolution used for refinement ladders.
    pub fn resolution(&self) -> usize {
        match *self {
            RadialGrid::Periodic { nodes } | RadialGrid::Axisymmetric { nodes } => nodes,
            RadialGrid::LatLong { n_theta, .. } => n_theta,
        }
    }

    /// Index of the profile node holding the value at (possibly ghost) index
    /// `j` on a one-dimensional grid.
    pub(crate) fn fold(&self, j: isize) -> usize {
        match *self {
            RadialGrid::Periodic { nodes } => j.rem_euclid(nodes as isize) as usize,
            RadialGrid::Axisymmetric { nodes } => fold_even(j, nodes),
            RadialGrid::LatLong { .. } => unreachable!("lat-long grids fold in two indices"),
        }
    }
}

fn fold_even(j: isize, n: usize) -> usize {
    let n = n as isize;
    let j = if j < 0 { -1 - j } else if j >= n { 2 * n - 1 - j } else { j };
    j as usize
}

/// Meridian/parallel data of an axisymmetric profile node, in the `x-z`
/// half-plane `phi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileGeometry {
    pub kappa_meridian: f64,
    pub kappa_parallel: f64,
    pub support: f64,
    pub position: [f64; 3],
    pub normal: [f64; 3],
}

/// Curvatures of the revolution surface with profile `rho(theta)`:
/// `W = sqrt(rho^2 + rho'^2)`, `kappa_m = (rho^2 + 2 rho'^2 - rho rho'') / W^3`,
/// `kappa_p = (1 - (rho'/rho) cot theta) / W`, `u = rho^2 / W`.
pub fn axisymmetric_curvatures(rho: f64, d1: f64, d2: f64, theta: f64) -> ProfileGeometry {
    let (s, c) = theta.sin_cos();
    let w = rho.hypot(d1);
    ProfileGeometry {
        kappa_meridian: (rho * rho + 2.0 * d1 * d1 - rho * d2) / w.powi(3),
        kappa_parallel: (1.0 - d1 / rho * c / s) / w,
        support: rho * rho / w,
        position: [rho * s, 0.0, rho * c],
        normal: [(rho * s - d1 * c) / w, 0.0, (d1 * s + rho * c) / w],
    }
}

/// Curvature, support, position and normal of the plane curve `rho(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveGeometry {
    pub kappa: f64,
    pub support: f64,
    pub position: [f64; 2],
    pub normal: [f64; 2],
}

pub fn curve_curvature(rho: f64, d1: f64, d2: f64, phi: f64) -> CurveGeometry {
    let (s, c) = phi.sin_cos();
    let w = rho.hypot(d1);
    CurveGeometry {
        kappa: (rho * rho + 2.0 * d1 * d1 - rho * d2) / w.powi(3),
        support: rho * rho / w,
        position: [rho * c, rho * s],
        normal: [(rho * c + d1 * s) / w, (rho * s - d1 * c) / w],
    }
}

/// Jet of the unit sphere/circle parametrisation: `(omega, omega_a, omega_ab)`.
pub(crate) fn omega_jet(coords: &[f64]) -> (DVector<f64>, Vec<DVector<f64>>, Vec<Vec<DVector<f64>>>) {
    let v = |x: &[f64]| DVector::from_column_slice(x);
    match coords.len() {
        1 => {
            let (s, c) = coords[0].sin_cos();
            (v(&[c, s]), vec![v(&[-s, c])], vec![vec![v(&[-c, -s])]])
        }
        2 => {
            let (st, ct) = coords[0].sin_cos();
            let (sp, cp) = coords[1].sin_cos();
            let w = v(&[st * cp, st * sp, ct]);
            let w_t = v(&[ct * cp, ct * sp, -st]);
            let w_p = v(&[-st * sp, st * cp, 0.0]);
            let w_tt = v(&[-st * cp, -st * sp, -ct]);
            let w_tp = v(&[-ct * sp, ct * cp, 0.0]);
            let w_pp = v(&[-st * cp, -st * sp, 0.0]);
            (w, vec![w_t, w_p], vec![vec![w_tt, w_tp.clone()], vec![w_tp, w_pp]])
        }
        d => panic!("omega_jet supports one or two coordinates, got {d}"),
    }
}

/// Jet of `X = rho omega` from the jet of `rho` in the same coordinates.
pub(crate) fn radial_jet(coords: &[f64], rho: f64, d1: &[f64], d2: &[Vec<f64>]) -> SurfaceJet {
    let (w, w_a, w_ab) = omega_jet(coords);
    let n = coords.len();
    let tangents = (0..n).map(|a| &w * d1[a] + &w_a[a] * rho).collect();
    let second = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| &w * d2[a][b] + &w_a[b] * d1[a] + &w_a[a] * d1[b] + &w_ab[a][b] * rho)
                .collect()
        })
        .collect();
    SurfaceJet {
        position: w * rho,
        tangents,
        second,
    }
}

/// Nodal radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSurface {
    pub grid: RadialGrid,
    rho: Vec<f64>,
}

impl RadialSurface {
    pub fn new(grid: RadialGrid, rho: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if rho.len() != grid.len() {
            return Err(Error::validation(
                "radial",
                format!("expected {} nodal values, got {}", grid.len(), rho.len()),
            ));
        }
        if let Some((j, r)) = rho.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Domain(format!("radial function must be positive and finite, node {j} has {r}")));
        }
        Ok(Self { grid, rho })
    }

    pub fn constant(grid: RadialGrid, radius: f64) -> Result<Self> {
        Self::new(grid, vec![radius; grid.len()])
    }

    /// Samples `rho(coords)` at the nodes (see [`RadialGrid::coords`]).
    pub fn from_fn(grid: RadialGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let rho = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self::new(grid, rho)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_bounds(&self) -> (f64, f64) {
        self.rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)))
    }

    /// Value at a possibly-ghost index of a one-dimensional grid.
    pub fn profile_value(&self, j: isize) -> f64 {
        self.rho[self.grid.fold(j)]
    }

    /// `(rho, rho', rho'')` by centred differences at a profile node.
    pub fn profile_derivatives(&self, j: usize) -> Result<(f64, f64, f64)> {
        if matches!(self.grid, RadialGrid::LatLong { .. }) {
            return Err(Error::Chart("profile derivatives need a one-dimensional grid".into()));
        }
        self.check_index(j)?;
        let h = self.grid.spacing()[0];
        let j = j as isize;
        let (m, c, p) = (self.profile_value(j - 1), self.profile_value(j), self.profile_value(j + 1));
        Ok((c, (p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h)))
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.len() {
            return Err(Error::Chart(format!("node {idx} outside a grid of {} nodes", self.len())));
        }
        Ok(())
    }

    fn latlong_value(&self, j: isize, m: isize) -> f64 {
        let RadialGrid::LatLong { n_theta, n_phi } = self.grid else {
            unreachable!()
        };
        let (nt, np) = (n_theta as isize, n_phi as isize);
        let (j, shift) = if j < 0 {
            (-1 - j, np / 2)
        } else if j >= nt {
            (2 * nt - 1 - j, np / 2)
        } else {
            (j, 0)
        };
        self.rho[(j * np + (m + shift).rem_euclid(np)) as usize]
    }

    /// Second-order jet of `X` at a node, with `rho` derivatives by centred
    /// differences.
    pub fn jet_at(&self, idx: usize) -> Result<SurfaceJet> {
        self.check_index(idx)?;
        let coords = self.grid.coords(idx);
        match self.grid {
            RadialGrid::Periodic { .. } => {
                let (r, d1, d2) = self.profile_derivatives(idx)?;
                Ok(radial_jet(&coords, r, &[d1], &[vec![d2]]))
            }
            RadialGrid::Axisymmetric { .. } => self.axisymmetric_jet(idx, 0.0),
            RadialGrid::LatLong { n_phi, .. } => {
                let h = self.grid.spacing();
                let (j, m) = ((idx / n_phi) as isize, (idx % n_phi) as isize);
                let v = |dj: isize, dm: isize| self.latlong_value(j + dj, m + dm);
                let c = v(0, 0);
                let d_t = (v(1, 0) - v(-1, 0)) / (2.0 * h[0]);
                let d_p = (v(0, 1) - v(0, -1)) / (2.0 * h[1]);
                let d_tt = (v(1, 0) - 2.0 * c + v(-1, 0)) / (h[0] * h[0]);
                let d_pp = (v(0, 1) - 2.0 * c + v(0, -1)) / (h[1] * h[1]);
                let d_tp = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4.0 * h[0] * h[1]);
                Ok(radial_jet(&coords, c, &[d_t, d_p], &[vec![d_tt, d_tp], vec![d_tp, d_pp]]))
            }
        }
    }

    /// Jet of an axisymmetric surface at profile node `j`, rotated to
    /// longitude `phi`.
    pub fn axisymmetric_jet(&self, j: usize, phi: f64) -> Result<SurfaceJet> {
        if !matches!(self.grid, RadialGrid::Axisymmetric { .. }) {
            return Err(Error::Chart("rotated frames need an axisymmetric grid".into()));
        }
        let (r, d1, d2) = self.profile_derivatives(j)?;
        let theta = self.grid.coords(j)[0];
        Ok(radial_jet(&[theta, phi], r, &[d1, 0.0], &[vec![d2, 0.0], vec![0.0, 0.0]]))
    }

    pub fn frame_at(&self, idx: usize) -> Result<PointFrame> {
        PointFrame::from_jet(&self.jet_at(idx)?)
    }

    /// Support values `u = <X, nu>` at every node.
    pub fn support_values(&self) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| Ok(self.frame_at(i)?.support)).collect()
    }

    /// Lat-long rows adjacent to a pole; excluded from residual statistics.
    pub fn is_pole_cap(&self, idx: usize) -> bool {
        match self.grid {
            RadialGrid::LatLong { n_theta, n_phi } => {
                let j = idx / n_phi;
                j == 0 || j + 1 == n_theta
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AnalyticSurface;

    #[test]
    fn ghost_folding() {
        assert_eq!(fold_even(-1, 8), 0);
        assert_eq!(fold_even(-2, 8), 1);
        assert_eq!(fold_even(8, 8), 7);
        assert_eq!(fold_even(9, 8), 6);
        assert_eq!(RadialGrid::Periodic { nodes: 8 }.fold(-1), 7);
    }

    #[test]
    fn constant_radius_matches_sphere() {
        let sphere = AnalyticSurface::sphere(3.0).unwrap();
        for grid in [
            RadialGrid::Axisymmetric { nodes: 16 },
            RadialGrid::LatLong { n_theta: 8, n_phi: 16 },
        ] {
            let s = RadialSurface::constant(grid, 3.0).unwrap();
            for i in 0..s.len() {
                let f = s.frame_at(i).unwrap();
                let c = grid.coords(i);
                let phi = c.get(1).copied().unwrap_or(0.0);
                let g = sphere.frame_at(c[0], phi).unwrap();
                assert!((&f.normal - &g.normal).norm() < 1e-10);
                assert!((&f.second_form - &g.second_form).norm() < 1e-10);
                assert!((f.support - g.support).abs() < 1e-10);
            }
        }
        let circle = RadialSurface::constant(RadialGrid::Periodic { nodes: 16 }, 3.0).unwrap();
        let f = circle.frame_at(5).unwrap();
        assert!((f.principal.values()[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_formulas_agree_with_jet_route() {
        let grid = RadialGrid::Axisymmetric { nodes: 32 };
        let s = RadialSurface::from_fn(grid, |c| 1.0 + 0.2 * c[0].cos().powi(2)).unwrap();
        for j in 0..s.len() {
            let (r, d1, d2) = s.profile_derivatives(j).unwrap();
            let theta = grid.coords(j)[0];
            let g = axisymmetric_curvatures(r, d1, d2, theta);
            let f = s.frame_at(j).unwrap();
            let mut expect = [g.kappa_meridian, g.kappa_parallel];
            expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (x, y) in f.principal.values().iter().zip(expect) {
                assert!((x - y).abs() < 1e-10, "{x} vs {y}");
            }
            assert!((f.support - g.support).abs() < 1e-12);
            assert!((f.normal[0] - g.normal[0]).abs() < 1e-12 && (f.normal[2] - g.normal[2]).abs() < 1e-12);
        }
        let circle = RadialSurface::from_fn(RadialGrid::Periodic { nodes: 32 }, |c| 1.0 + 0.1 * c[0].cos()).unwrap();
        for j in 0..circle.len() {
            let (r, d1, d2) = circle.profile_derivatives(j).unwrap();
            let g = curve_curvature(r, d1, d2, circle.grid.coords(j)[0]);
            let f = circle.frame_at(j).unwrap();
            assert!((f.principal.values()[0] - g.kappa).abs() < 1e-10);
            assert!((f.normal[0] - g.normal[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn spheroid_profile_converges_to_closed_form() {
        // rho(theta) of the spheroid x^2 + y^2 + z^2/4 = 1
        let rho = |t: f64| 1.0 / (t.sin().powi(2) + t.cos().powi(2) / 4.0).sqrt();
        let spheroid = AnalyticSurface::spheroid(1.0, 2.0).unwrap();
        let mut errs = Vec::new();
        for nodes in [32, 64] {
            let grid = RadialGrid::Axisymmetric { nodes };
            let s = RadialSurface::from_fn(grid, |c| rho(c[0])).unwrap();
            let j = nodes / 2; // just above the equator
            let f = s.frame_at(j).unwrap();
            let theta = grid.coords(j)[0];
            // the same point in the ellipsoid's own parameter
            let x = f.position.clone();
            let t_ell = (x[0].hypot(x[1])).atan2(x[2] / 2.0);
            let exact = spheroid.closed_form_curvatures(t_ell, 0.0).unwrap();
            let _ = theta;
            errs.push((f.principal.values()[1] - exact.values()[1]).abs().max((f.principal.values()[0] - exact.values()[0]).abs()));
        }
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
    }

    #[test]
    fn latlong_pole_ghost_uses_half_turn() {
        let grid = RadialGrid::LatLong { n_theta: 8, n_phi: 16 };
        // a translated sphere is smooth through the poles but not axisymmetric about z
        let s = RadialSurface::from_fn(grid, |c| {
            let w = [c[0].sin() * c[1].cos(), c[0].sin() * c[1].sin(), c[0].cos()];
            let a = 0.1 * w[0];
            a + (a * a - 0.01 + 1.0).sqrt()
        })
        .unwrap();
        let supports = s.support_values().unwrap();
        assert!(supports.iter().all(|u| *u > 0.0));
        let f = s.frame_at(3).unwrap(); // pole row
        for k in f.principal.values() {
            assert!((k - 1.0).abs() < 0.05, "{k}");
        }
    }

    #[test]
    fn validation_errors() {
        assert!(RadialSurface::constant(RadialGrid::LatLong { n_theta: 8, n_phi: 15 }, 1.0).is_err());
        assert!(RadialSurface::new(RadialGrid::Axisymmetric { nodes: 8 }, vec![1.0; 7]).is_err());
        assert!(RadialSurface::new(RadialGrid::Axisymmetric { nodes: 4 }, vec![1.0, -1.0, 1.0, 1.0]).is_err());
        let s = RadialSurface::constant(RadialGrid::Axisymmetric { nodes: 8 }, 1.0).unwrap();
        assert!(matches!(s.frame_at(8), Err(Error::Chart(_))));
    }
}
