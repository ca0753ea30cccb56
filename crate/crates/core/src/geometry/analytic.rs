//! Quadrics with closed-form jets and curvatures.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{PointFrame, SurfaceJet};
use crate::symcalc::CurvatureVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    Sphere { radius: f64 },
    /// Axis of revolution along `z`: semi-axes `(a, a, c)`.
    Spheroid { a: f64, c: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

/// Ellipsoidal surface `X(theta, phi) = diag(a, b, c) omega(theta, phi)`
/// with `omega` the unit sphere in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSurface {
    pub kind: SurfaceKind,
}

impl AnalyticSurface {
    pub fn new(kind: SurfaceKind) -> Result<Self> {
        let s = Self { kind };
        let (a, b, c) = s.semi_axes();
        if !(a > 0.0 && b > 0.0 && c > 0.0) || ![a, b, c].iter().all(|x| x.is_finite()) {
            return Err(Error::Domain(format!("semi-axes must be positive, got ({a}, {b}, {c})")));
        }
        Ok(s)
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        Self::new(SurfaceKind::Sphere { radius })
    }

    pub fn spheroid(a: f64, c: f64) -> Result<Self> {
        Self::new(SurfaceKind::Spheroid { a, c })
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(SurfaceKind::Ellipsoid { a, b, c })
    }

    pub fn semi_axes(&self) -> (f64, f64, f64) {
        match self.kind {
            SurfaceKind::Sphere { radius } => (radius, radius, radius),
            SurfaceKind::Spheroid { a, c } => (a, a, c),
            SurfaceKind::Ellipsoid { a, b, c } => (a, b, c),
        }
    }

    fn check_chart(theta: f64) -> Result<()> {
        if theta.sin().abs() < 1e-6 {
            return Err(Error::Chart(format!("polar chart is singular at theta = {theta}")));
        }
        Ok(())
    }

    pub fn position(&self, theta: f64, phi: f64) -> DVector<f64> {
        let (a, b, c) = self.semi_axes();
        let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
        DVector::from_vec(vec![a * st * cp, b * st * sp, c * ct])
    }

    /// Exact jet in the coordinates `(theta, phi)`.
    pub fn jet(&self, theta: f64, phi: f64) -> Result<SurfaceJet> {
        Self::check_chart(theta)?;
        let (a, b, c) = self.semi_axes();
        let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
        let v = |x: f64, y: f64, z: f64| DVector::from_vec(vec![a * x, b * y, c * z]);
        let x_t = v(ct * cp, ct * sp, -st);
        let x_p = v(-st * sp, st * cp, 0.0);
        let x_tt = v(-st * cp, -st * sp, -ct);
        let x_tp = v(-ct * sp, ct * cp, 0.0);
        let x_pp = v(-st * cp, -st * sp, 0.0);
        Ok(SurfaceJet {
            position: v(st * cp, st * sp, ct),
            tangents: vec![x_t, x_p],
            second: vec![vec![x_tt, x_tp.clone()], vec![x_tp, x_pp]],
        })
    }

    pub fn frame_at(&self, theta: f64, phi: f64) -> Result<PointFrame> {
        PointFrame::from_jet(&self.jet(theta, phi)?)
    }

    /// Principal curvatures from the classical quadric formulas for Gauss and
    /// mean curvature, independent of the jet route.
    pub fn closed_form_curvatures(&self, theta: f64, phi: f64) -> Result<CurvatureVector> {
        let (a, b, c) = self.semi_axes();
        let x = self.position(theta, phi);
        let s = (x[0].powi(2) / a.powi(4) + x[1].powi(2) / b.powi(4) + x[2].powi(2) / c.powi(4)).sqrt();
        let abc2 = (a * b * c).powi(2);
        let gauss = 1.0 / (abc2 * s.powi(4));
        let sum = (a * a + b * b + c * c - x.norm_squared()) / (abc2 * s.powi(3));
        let disc = (0.25 * sum * sum - gauss).max(0.0).sqrt();
        CurvatureVector::new(vec![0.5 * sum + disc, 0.5 * sum - disc])
    }

    /// Exact support value `<X, nu>`.
    pub fn closed_form_support(&self, theta: f64, phi: f64) -> f64 {
        let (a, b, c) = self.semi_axes();
        let x = self.position(theta, phi);
        let s = (x[0].powi(2) / a.powi(4) + x[1].powi(2) / b.powi(4) + x[2].powi(2) / c.powi(4)).sqrt();
        1.0 / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_of_radius_two() {
        let s = AnalyticSurface::sphere(2.0).unwrap();
        let f = s.frame_at(1.1, -0.4).unwrap();
        assert_eq!(f.principal.dim(), 2);
        for k in f.principal.values() {
            assert!((k - 0.5).abs() < 1e-14);
        }
        assert!((f.support - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spheroid_equator_matches_closed_form() {
        let s = AnalyticSurface::spheroid(1.0, 2.0).unwrap();
        let f = s.frame_at(std::f64::consts::FRAC_PI_2, 0.3).unwrap();
        let k = f.principal.values();
        assert!((k[0] - 1.0).abs() < 1e-14 && (k[1] - 0.25).abs() < 1e-14);
        let cf = s.closed_form_curvatures(std::f64::consts::FRAC_PI_2, 0.3).unwrap();
        assert!((cf.values()[0] - 1.0).abs() < 1e-12 && (cf.values()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_jet_agrees_with_closed_form() {
        let s = AnalyticSurface::ellipsoid(1.0, 1.2, 1.5).unwrap();
        for &(t, p) in &[(0.4, 0.1), (1.2, 2.5), (2.6, -1.0)] {
            let f = s.frame_at(t, p).unwrap();
            let cf = s.closed_form_curvatures(t, p).unwrap();
            for (x, y) in f.principal.values().iter().zip(cf.values()) {
                assert!((x - y).abs() < 1e-8, "{x} vs {y}");
            }
            assert!((f.support - s.closed_form_support(t, p)).abs() < 1e-12);
            assert!(f.invariant_defect() < 1e-12);
        }
    }

    #[test]
    fn chart_and_domain_errors() {
        assert!(AnalyticSurface::sphere(-1.0).is_err());
        let s = AnalyticSurface::sphere(1.0).unwrap();
        assert!(matches!(s.frame_at(0.0, 0.0), Err(Error::Chart(_))));
    }
}
