//! Maximum-principle diagnostic on computed solutions.
//!
//! On a profile surface the second fundamental form is diagonal in the
//! (meridian, parallel) frame at every node, so the perturbed largest
//! curvature near the maximum point is the curvature of the fixed principal
//! direction selected there, extended along the profile. All derivatives
//! below are centred differences in arc length `s` along the meridian; for
//! surfaces the parallel Hessian entry of an axisymmetric function `g` is
//! `(R_s / R) g_s` with `R = rho sin(theta)` the distance to the axis.

use serde::{Deserialize, Serialize};

use super::{node_states, NodeState, PrescribedData};
use crate::geometry::{RadialGrid, RadialSurface};
use crate::perturb::{argmax_q_tilde, first_order_condition};
use crate::symcalc::{sigma_jet, CurvatureVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopDirection {
    Meridian,
    Parallel,
}

/// The named terms of the master inequality at the maximum point, in the
/// frame with `e_1` the top direction (`kappa~_p = kappa_p - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaTerms {
    /// `2 sum_{p>1} sigma_k^{11,pp} h_11p^2 / kappa_1`.
    pub mixed_second: f64,
    /// `2 sum_{p>1} sigma_k^{11} h_11p^2 / (kappa_1 (kappa_1 - kappa~_p))`.
    pub gap_top: f64,
    /// `-sigma_k^{pp,qq} h_pp1 h_qq1 / kappa_1`.
    pub concavity: f64,
    /// `2 sum_{p>1} sigma_k^{pp} h_pp1^2 / (kappa_1 (kappa_1 - kappa~_p))`.
    pub gap_diagonal: f64,
    /// `-sigma_k^{pp} h_11p^2 / kappa_1^2`.
    pub gradient_square: f64,
    /// `sigma_k^{ii} h_ii^2`.
    pub curvature_square: f64,
    /// Sum of the five constant-free terms.
    pub constant_free_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDiagnostic {
    /// `A`.
    pub amplitude: f64,
    pub argmax_node: usize,
    pub argmax_coordinate: f64,
    pub q_tilde_max: f64,
    pub top_direction: TopDirection,
    /// `|Q~_i|` at the argmax, maximised over frame directions.
    pub first_order_residual: f64,
    /// Centred-difference estimate of `sigma_k^{ii} Q~_ii` at the argmax.
    pub hessian_estimate: f64,
    /// Allowed positive part of the estimate: the grid spacing.
    pub tau: f64,
    pub sign_holds: bool,
    pub terms: LemmaTerms,
    /// `(1/kappa_1) sum_p h_p11 (d_nu f)(e_p) - A sum_p h_pp (d_nu f)(e_p) <e_p, X>`.
    pub first_order_cancellation: f64,
    /// The argmax is a first or last profile node and its neighbour across
    /// the axis was evaluated in the chart rotated by half a turn.
    pub near_pole: bool,
}

/// Arc-length derivatives `(g_s, g_ss)` of a nodal field at node `j`.
fn arc_derivatives(grid: &RadialGrid, st: &NodeState, g: &[f64], j: usize) -> (f64, f64) {
    let h = grid.spacing()[0];
    let ji = j as isize;
    let (gm, g0, gp) = (g[grid.fold(ji - 1)], g[j], g[grid.fold(ji + 1)]);
    let g_t = (gp - gm) / (2.0 * h);
    let g_tt = (gp - 2.0 * g0 + gm) / (h * h);
    let w = st.rho.hypot(st.d1);
    let w_t = (st.rho * st.d1 + st.d1 * st.d2) / w;
    (g_t / w, (g_tt - g_t * w_t / w) / (w * w))
}

/// `R_s / R` for surfaces of revolution.
fn parallel_factor(st: &NodeState) -> f64 {
    let (s, c) = st.coordinate.sin_cos();
    let w = st.rho.hypot(st.d1);
    (st.d1 * s + st.rho * c) / (w * st.rho * s)
}

fn parallel_direction(dim: usize) -> Vec<f64> {
    if dim == 2 {
        vec![0.0, 1.0, 0.0]
    } else {
        vec![]
    }
}

/// Locates the discrete maximum of `Q~ = log kappa~_1 - A u` and evaluates
/// the first- and second-order conditions and the terms of the master
/// inequality there. `A` defaults to `2 max(1, 1 / u_min)`.
pub fn q_diagnostic(surface: &RadialSurface, data: &PrescribedData, k: usize, amplitude: Option<f64>) -> Result<QDiagnostic> {
    let grid = surface.grid;
    if matches!(grid, RadialGrid::LatLong { .. }) {
        return Err(Error::Chart("the diagnostic runs on profile grids".into()));
    }
    let n = surface.dim();
    let states = node_states(surface, data, k)?;
    let u_min = states.iter().map(|s| s.support).fold(f64::INFINITY, f64::min);
    let a = amplitude.unwrap_or(2.0 * (1.0f64).max(1.0 / u_min));

    let frame = |j: isize, phi: f64| -> Result<crate::geometry::PointFrame> {
        let nodes = grid.len() as isize;
        match grid {
            RadialGrid::Axisymmetric { .. } => {
                // ghost nodes across a pole are the mirrored node half a turn away
                let (node, shift) = if j < 0 || j >= nodes {
                    (grid.fold(j), std::f64::consts::PI)
                } else {
                    (j as usize, 0.0)
                };
                crate::geometry::PointFrame::from_jet(&surface.axisymmetric_jet(node, phi + shift)?)
            }
            _ => surface.frame_at(grid.fold(j)),
        }
    };
    let frames: Vec<_> = (0..grid.len()).map(|j| frame(j as isize, 0.0)).collect::<Result<_>>()?;
    let (jmax, q) = argmax_q_tilde(&frames, a)?;
    let st = &states[jmax];

    let top = if n == 1 || st.kappa[0] >= st.kappa[1] {
        TopDirection::Meridian
    } else {
        TopDirection::Parallel
    };
    let top_index = if top == TopDirection::Meridian { 0 } else { 1 };

    // first-order condition along the meridian and (surfaces) the parallel
    let ji = jmax as isize;
    let mut first_order = first_order_condition(&[frame(ji - 1, 0.0)?, frames[jmax].clone(), frame(ji + 1, 0.0)?], a)?
        .residual
        .abs();
    if n == 2 {
        let dphi = grid.spacing()[0];
        let par = first_order_condition(&[frame(ji, -dphi)?, frames[jmax].clone(), frame(ji, dphi)?], a)?;
        first_order = first_order.max(par.residual.abs());
    }

    // Q~ along the profile with the top direction frozen
    let q_field: Vec<f64> = states.iter().map(|s| s.kappa[top_index].ln() - a * s.support).collect();
    let (q_s, q_ss) = arc_derivatives(&grid, st, &q_field, jmax);
    let kappa_top_first: Vec<f64> = if n == 2 {
        vec![st.kappa[top_index], st.kappa[1 - top_index]]
    } else {
        st.kappa.clone()
    };
    let jet = sigma_jet(&CurvatureVector::new(kappa_top_first.clone())?, k)?;
    let hess_frame: Vec<f64> = if n == 2 {
        let par = parallel_factor(st) * q_s;
        if top == TopDirection::Meridian {
            vec![q_ss, par]
        } else {
            vec![par, q_ss]
        }
    } else {
        vec![q_ss]
    };
    let hessian_estimate: f64 = (0..n).map(|i| jet.grad[i] * hess_frame[i]).sum();
    let tau = grid.spacing()[0];

    // third-order slice s_ab = h_{ab1} in the top-first frame
    let km: Vec<f64> = states.iter().map(|s| s.kappa[0]).collect();
    let dkm = arc_derivatives(&grid, st, &km, jmax).0;
    let mut s = nalgebra::DMatrix::zeros(n, n);
    if n == 1 {
        s[(0, 0)] = dkm;
    } else {
        let kp: Vec<f64> = states.iter().map(|s| s.kappa[1]).collect();
        let dkp = arc_derivatives(&grid, st, &kp, jmax).0;
        if top == TopDirection::Meridian {
            s[(0, 0)] = dkm;
            s[(1, 1)] = dkp;
        } else {
            s[(0, 1)] = dkp;
            s[(1, 0)] = dkp;
        }
    }
    let k1 = kappa_top_first[0];
    let gap = |p: usize| k1 - (kappa_top_first[p] - 1.0);
    let mut t = LemmaTerms {
        mixed_second: 0.0,
        gap_top: 0.0,
        concavity: 0.0,
        gap_diagonal: 0.0,
        gradient_square: 0.0,
        curvature_square: 0.0,
        constant_free_sum: 0.0,
    };
    for p in 1..n {
        t.mixed_second += 2.0 * jet.hess_diag[(0, p)] * s[(0, p)].powi(2) / k1;
        t.gap_top += 2.0 * jet.grad[0] * s[(0, p)].powi(2) / (k1 * gap(p));
        t.gap_diagonal += 2.0 * jet.grad[p] * s[(p, p)].powi(2) / (k1 * gap(p));
    }
    for p in 0..n {
        for q in 0..n {
            if p != q {
                t.concavity -= jet.hess_diag[(p, q)] * s[(p, p)] * s[(q, q)] / k1;
            }
        }
        t.gradient_square -= jet.grad[p] * s[(0, p)].powi(2) / (k1 * k1);
        t.curvature_square += jet.grad[p] * kappa_top_first[p].powi(2);
    }
    t.constant_free_sum = t.mixed_second + t.gap_top + t.concavity + t.gap_diagonal + t.gradient_square;

    // first-order cancellation, frame vectors in top-first order
    let gn = data.grad_nu(&st.position, &st.normal);
    let mut dirs = vec![st.tangent.clone()];
    if n == 2 {
        dirs.push(parallel_direction(2));
        if top == TopDirection::Parallel {
            dirs.swap(0, 1);
        }
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut cancellation = 0.0;
    for p in 0..n {
        let dnu = dot(&gn, &dirs[p]);
        cancellation += s[(0, p)] * dnu / k1 - a * kappa_top_first[p] * dnu * dot(&dirs[p], &st.position);
    }

    Ok(QDiagnostic {
        amplitude: a,
        argmax_node: jmax,
        argmax_coordinate: st.coordinate,
        q_tilde_max: q.q_tilde,
        top_direction: top,
        first_order_residual: first_order,
        hessian_estimate,
        tau,
        sign_holds: hessian_estimate <= tau,
        terms: t,
        first_order_cancellation: cancellation,
        near_pole: matches!(grid, RadialGrid::Axisymmetric { .. }) && (jmax == 0 || jmax + 1 == grid.len()),
    })
}

/// Max over nodes of `|sum_i sigma_k^{ii} h_iip - h_pp (d_nu f)(e_p) - (d_X f)(e_p)|`
/// with `e_p` the meridian direction (the parallel component vanishes by
/// symmetry).
pub fn differentiated_equation_residual(surface: &RadialSurface, data: &PrescribedData, k: usize) -> Result<f64> {
    let grid = surface.grid;
    let states = node_states(surface, data, k)?;
    let n = surface.dim();
    let fields: Vec<Vec<f64>> = (0..n).map(|i| states.iter().map(|s| s.kappa[i]).collect()).collect();
    let mut worst: f64 = 0.0;
    for (j, st) in states.iter().enumerate() {
        let jet = sigma_jet(&CurvatureVector::new(st.kappa.clone())?, k)?;
        let lhs: f64 = (0..n).map(|i| jet.grad[i] * arc_derivatives(&grid, st, &fields[i], j).0).sum();
        let gn = data.grad_nu(&st.position, &st.normal);
        let gx = data.grad_x(&st.position, &st.normal);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let rhs = st.kappa[0] * dot(&gn, &st.tangent) + dot(&gx, &st.tangent);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
