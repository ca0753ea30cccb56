//! Damped Newton solver for `sigma_k(kappa) = f(X, nu)` on radial profiles.
//!
//! Unknowns are the nodal radii of a [`RadialSurface`] on a one-dimensional
//! grid: closed plane curves (`n = 1`, periodic grid) or surfaces of
//! revolution (`n = 2`, axisymmetric grid). Curvatures come from centred
//! differences of the profile, so a round sphere is an exact discrete
//! solution for constant data.
//!
//! When `f` does not depend on `X`, translates of a solution are solutions
//! and the linearisation is (nearly) singular. The system is then bordered:
//! the unknowns gain one multiplier `lambda_a` per translation direction,
//! the equations become `R(rho) + sum_a lambda_a psi_a = 0` with
//! `psi_a = <omega, e_a>`, and the centring constraints
//! `sum_j w_j psi_a(j) rho_j = 0` fix the gauge. A bordered solution is a
//! genuine one only if every multiplier vanishes; otherwise the data admit
//! no solution at all (the multipliers measure the obstruction) and the
//! report says so.

mod diagnostic;
mod family;
mod sweep;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geometry::{RadialGrid, RadialSurface};
use crate::symcalc::{binomial, sigma_conv};
use crate::{Error, Result};

pub use diagnostic::{differentiated_equation_residual, q_diagnostic, LemmaTerms, QDiagnostic, TopDirection};
pub use family::{Family, PrescribedData};
pub use sweep::{continuation, estimate_sweep, ContinuationReport, ContinuationStep, SweepRow, SweepSummary, SweepTable, CSV_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    /// Centred differences of the residual, one column per node.
    #[default]
    FiniteDifference,
    /// Chain rule through the curvature formulas and the stencils.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    /// Max-norm residual target.
    pub tol: f64,
    pub max_iterations: usize,
    pub jacobian: JacobianMode,
    /// Armijo constant on the squared residual norm.
    pub armijo: f64,
    pub backtrack: f64,
    pub min_step: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iterations: 60,
            jacobian: JacobianMode::FiniteDifference,
            armijo: 1e-4,
            backtrack: 0.5,
            min_step: 1e-12,
        }
    }
}

/// Starting surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGuess {
    /// Sphere of radius `(binom(n, k) / f_avg)^(1/k)`, `f_avg` the mean of
    /// `f` over the unit sphere nodes.
    Sphere,
    /// That sphere times `1 + amplitude cos(mode * t)`.
    Perturbed { amplitude: f64, mode: u32 },
    /// Explicit nodal radii.
    Nodal { rho: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub k: usize,
    pub data: PrescribedData,
    pub grid: RadialGrid,
    pub initial: InitialGuess,
    pub config: SolveConfig,
}

impl ProblemSpec {
    pub fn new(k: usize, family: Family, grid: RadialGrid) -> Result<Self> {
        let spec = Self {
            k,
            data: PrescribedData { family },
            grid,
            initial: InitialGuess::Sphere,
            config: SolveConfig::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if matches!(self.grid, RadialGrid::LatLong { .. }) {
            return Err(Error::validation("grid.kind", "the solver needs a periodic or axisymmetric grid"));
        }
        let n = self.dim();
        if self.k == 0 || self.k > n {
            return Err(Error::validation("k", format!("need 1 <= k <= n = {n}, got {}", self.k)));
        }
        self.data.validate()?;
        let c = &self.config;
        if !(c.tol > 0.0) || c.max_iterations == 0 {
            return Err(Error::validation("config", "tolerance and iteration cap must be positive"));
        }
        if !(c.backtrack > 0.0 && c.backtrack < 1.0 && c.armijo > 0.0 && c.armijo < 0.5) {
            return Err(Error::validation("config", "need 0 < backtrack < 1 and 0 < armijo < 1/2"));
        }
        if let InitialGuess::Nodal { rho } = &self.initial {
            if rho.len() != self.grid.len() {
                return Err(Error::validation(
                    "initial.rho",
                    format!("expected {} values, got {}", self.grid.len(), rho.len()),
                ));
            }
        }
        Ok(())
    }

    /// Radius of the sphere guess.
    pub fn sphere_radius(&self) -> f64 {
        let n = self.dim();
        let nodes = self.grid.len();
        let avg = (0..nodes)
            .map(|j| {
                let omega = unit_direction(&self.grid, j).0;
                self.data.value(&omega, &omega)
            })
            .sum::<f64>()
            / nodes as f64;
        (binomial(n, self.k) / avg).powf(1.0 / self.k as f64)
    }

    pub fn initial_surface(&self) -> Result<RadialSurface> {
        let r = self.sphere_radius();
        match &self.initial {
            InitialGuess::Sphere => RadialSurface::constant(self.grid, r),
            InitialGuess::Perturbed { amplitude, mode } => {
                RadialSurface::from_fn(self.grid, |c| r * (1.0 + amplitude * (*mode as f64 * c[0]).cos()))
            }
            InitialGuess::Nodal { rho } => RadialSurface::new(self.grid, rho.clone()),
        }
    }
}

/// `(omega, d omega / dt)` at a profile node, in the ambient space.
fn unit_direction(grid: &RadialGrid, j: usize) -> (Vec<f64>, Vec<f64>) {
    let t = grid.coords(j)[0];
    let (s, c) = t.sin_cos();
    match grid {
        RadialGrid::Periodic { .. } => (vec![c, s], vec![-s, c]),
        _ => (vec![s, 0.0, c], vec![c, 0.0, -s]),
    }
}

/// Geometry and residual at one profile node, with the partial derivatives
/// of the residual in `(rho, rho', rho'')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub coordinate: f64,
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
    /// `[kappa]` for curves, `[kappa_meridian, kappa_parallel]` for surfaces.
    pub kappa: Vec<f64>,
    pub support: f64,
    pub position: Vec<f64>,
    pub normal: Vec<f64>,
    /// Unit tangent along increasing coordinate.
    pub tangent: Vec<f64>,
    pub sigma: f64,
    pub f: f64,
    pub residual: f64,
    /// `d residual / d (rho, rho', rho'')`.
    pub partials: [f64; 3],
}

impl NodeState {
    pub fn kappa_max(&self) -> f64 {
        self.kappa.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn admissibility(&self) -> Option<String> {
        if !(self.rho > 0.0) {
            Some(format!("radius {} is not positive", self.rho))
        } else if !(self.kappa_min() > 0.0) {
            Some(format!("not strictly convex: curvatures {:?}", self.kappa))
        } else if !(self.support > 0.0) {
            Some(format!("support {} is not positive", self.support))
        } else {
            None
        }
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates node `j` of a profile.
pub fn node_state(surface: &RadialSurface, data: &PrescribedData, k: usize, j: usize) -> Result<NodeState> {
    let (rho, d1, d2) = surface.profile_derivatives(j)?;
    let t = surface.grid.coords(j)[0];
    let (omega, omega_t) = unit_direction(&surface.grid, j);
    let w2 = rho * rho + d1 * d1;
    let w = w2.sqrt();
    let w3 = w2 * w;
    let w5 = w3 * w2;
    let num = rho * rho + 2.0 * d1 * d1 - rho * d2;

    let mut kappa = vec![num / w3];
    // d kappa_i / d (rho, rho', rho'')
    let mut dk = vec![[(2.0 * rho - d2) / w3 - 3.0 * num * rho / w5, 4.0 * d1 / w3 - 3.0 * num * d1 / w5, -rho / w3]];
    if surface.dim() == 2 {
        let cot = t.cos() / t.sin();
        let p = 1.0 - d1 / rho * cot;
        kappa.push(p / w);
        dk.push([d1 * cot / (rho * rho) / w - p * rho / w3, -cot / rho / w - p * d1 / w3, 0.0]);
    }

    let position: Vec<f64> = omega.iter().map(|o| rho * o).collect();
    let normal: Vec<f64> = omega.iter().zip(&omega_t).map(|(o, ot)| (rho * o - d1 * ot) / w).collect();
    let tangent: Vec<f64> = omega.iter().zip(&omega_t).map(|(o, ot)| (d1 * o + rho * ot) / w).collect();
    let support = rho * rho / w;

    let sigma = sigma_conv(&kappa, k as isize, &[]);
    let f = data.value(&position, &normal);
    let (gx, gn) = (data.grad_x(&position, &normal), data.grad_nu(&position, &normal));

    let mut partials = [0.0; 3];
    for (i, dki) in dk.iter().enumerate() {
        let s_ii = sigma_conv(&kappa, k as isize - 1, &[i]);
        for m in 0..3 {
            partials[m] += s_ii * dki[m];
        }
    }
    // d nu / d rho and d nu / d rho'
    let mut dnu_r: Vec<f64> = omega.iter().map(|o| o / w).collect();
    axpy(-rho / w2, &normal, &mut dnu_r);
    let mut dnu_d: Vec<f64> = omega_t.iter().map(|o| -o / w).collect();
    axpy(-d1 / w2, &normal, &mut dnu_d);
    partials[0] -= dot(&gx, &omega) + dot(&gn, &dnu_r);
    partials[1] -= dot(&gn, &dnu_d);

    Ok(NodeState {
        coordinate: t,
        rho,
        d1,
        d2,
        kappa,
        support,
        position,
        normal,
        tangent,
        sigma,
        f,
        residual: sigma - f,
        partials,
    })
}

pub fn node_states(surface: &RadialSurface, data: &PrescribedData, k: usize) -> Result<Vec<NodeState>> {
    (0..surface.len()).map(|j| node_state(surface, data, k, j)).collect()
}

fn check_profile(surface: &RadialSurface, k: usize) -> Result<()> {
    if matches!(surface.grid, RadialGrid::LatLong { .. }) {
        return Err(Error::Chart("the solver works on one-dimensional profile grids".into()));
    }
    if k == 0 || k > surface.dim() {
        return Err(Error::Domain(format!("k = {k} outside 1..={}", surface.dim())));
    }
    Ok(())
}

fn first_breach(states: &[NodeState]) -> Option<Error> {
    states.iter().enumerate().find_map(|(node, s)| {
        s.admissibility().map(|detail| Error::Admissibility { node, detail })
    })
}

/// Nodal residual `sigma_k(kappa) - f(X, nu)`; non-convex nodes are an
/// admissibility breach.
pub fn residual(surface: &RadialSurface, data: &PrescribedData, k: usize) -> Result<Vec<f64>> {
    check_profile(surface, k)?;
    let states = node_states(surface, data, k)?;
    if let Some(e) = first_breach(&states) {
        return Err(e);
    }
    Ok(states.iter().map(|s| s.residual).collect())
}

/// Derivative of the residual field with respect to the nodal radii.
pub fn jacobian(surface: &RadialSurface, data: &PrescribedData, k: usize, mode: JacobianMode) -> Result<DMatrix<f64>> {
    check_profile(surface, k)?;
    let n = surface.len();
    match mode {
        JacobianMode::Analytic => {
            let h = surface.grid.spacing()[0];
            let mut jac = DMatrix::zeros(n, n);
            for j in 0..n {
                let s = node_state(surface, data, k, j)?;
                let ji = j as isize;
                let fold = |i: isize| surface.grid.fold(i);
                let [pr, p1, p2] = s.partials;
                jac[(j, j)] += pr - 2.0 * p2 / (h * h);
                jac[(j, fold(ji + 1))] += p1 / (2.0 * h) + p2 / (h * h);
                jac[(j, fold(ji - 1))] += -p1 / (2.0 * h) + p2 / (h * h);
            }
            Ok(jac)
        }
        JacobianMode::FiniteDifference => {
            let rho = surface.rho().to_vec();
            let eval = |r: &[f64]| -> Result<Vec<f64>> {
                let s = RadialSurface::new(surface.grid, r.to_vec())?;
                node_states(&s, data, k).map(|v| v.iter().map(|x| x.residual).collect())
            };
            let mut jac = DMatrix::zeros(n, n);
            let mut r = rho.clone();
            for i in 0..n {
                let step = 1e-6 * rho[i].max(1e-3);
                r[i] = rho[i] + step;
                let plus = eval(&r)?;
                r[i] = rho[i] - step;
                let minus = eval(&r)?;
                r[i] = rho[i];
                for j in 0..n {
                    jac[(j, i)] = (plus[j] - minus[j]) / (2.0 * step);
                }
            }
            Ok(jac)
        }
    }
}

/// Translation modes `psi_a(j)` and centring weights `w_j psi_a(j)`.
fn gauge_modes(grid: &RadialGrid) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = grid.len();
    let h = grid.spacing()[0];
    match grid {
        RadialGrid::Periodic { .. } => (0..2)
            .map(|a| {
                let psi: Vec<f64> = (0..n).map(|j| unit_direction(grid, j).0[a]).collect();
                let ell = psi.iter().map(|p| p * h).collect();
                (psi, ell)
            })
            .collect(),
        _ => {
            let psi: Vec<f64> = (0..n).map(|j| unit_direction(grid, j).0[2]).collect();
            let ell = (0..n).map(|j| psi[j] * grid.coords(j)[0].sin() * h).collect();
            vec![(psi, ell)]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// The bordered system converged with a non-zero translation multiplier:
    /// no solution exists for these data.
    GaugeObstruction,
    IterationCap,
    LineSearchUnderflow,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::GaugeObstruction => "gauge_obstruction",
            SolveStatus::IterationCap => "iteration_cap",
            SolveStatus::LineSearchUnderflow => "line_search_underflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub k: usize,
    pub grid: RadialGrid,
    pub family: Family,
    /// Max-norm of the (bordered) system residual before each iteration and
    /// at the end.
    pub residual_history: Vec<f64>,
    /// Max-norm of `sigma_k - f` at the final iterate.
    pub residual: f64,
    pub converged: bool,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Translation multipliers (empty when the system is not bordered).
    pub multipliers: Vec<f64>,
    pub kappa1_max: f64,
    pub kappa_min: f64,
    pub support_range: (f64, f64),
    pub rho_range: (f64, f64),
    pub inf_f: f64,
    pub c2_bound: f64,
    /// `max r_{i+1} / r_i^2` over the tail with `r_i <= 1e-3`.
    pub quadratic_constant: Option<f64>,
    /// Final nodal radii.
    pub rho: Vec<f64>,
    pub q_diag: Option<QDiagnostic>,
}

impl SolveReport {
    pub fn surface(&self) -> Result<RadialSurface> {
        RadialSurface::new(self.grid, self.rho.clone())
    }

    /// Converts a non-converged report into the matching error.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            SolveStatus::Converged => Ok(self),
            SolveStatus::LineSearchUnderflow => Err(Error::LineSearchUnderflow {
                iterations: self.iterations,
                residual: self.residual,
            }),
            _ => Err(Error::Domain(format!(
                "solve ended with status {} (residual {:e}, multipliers {:?})",
                self.status.as_str(),
                self.residual,
                self.multipliers
            ))),
        }
    }
}

/// Residuals below this are at the rounding floor of the second-difference
/// stencils (roughly `eps * rho / h^2` on fine grids) and excluded from the
/// quadratic-tail fit.
const TAIL_FLOOR: f64 = 1e-10;

/// Pairs that land on the rounding floor still count when their first
/// residual is at least this, which caps the floor's contribution at
/// `TAIL_FLOOR / TAIL_DENOMINATOR^2 = 100`.
const TAIL_DENOMINATOR: f64 = 1e-6;

pub(crate) fn quadratic_constant(history: &[f64]) -> Option<f64> {
    history
        .windows(2)
        .filter(|w| w[0] <= 1e-3 && w[0] > 0.0 && (w[1] > TAIL_FLOOR || w[0] >= TAIL_DENOMINATOR))
        .map(|w| w[1] / (w[0] * w[0]))
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))))
}

struct System<'a> {
    grid: RadialGrid,
    data: &'a PrescribedData,
    k: usize,
    gauge: Vec<(Vec<f64>, Vec<f64>)>,
}

impl System<'_> {
    fn size(&self) -> usize {
        self.grid.len() + self.gauge.len()
    }

    /// Bordered residual, or the first admissibility breach.
    fn eval(&self, z: &[f64]) -> Result<(Vec<f64>, Vec<NodeState>)> {
        let n = self.grid.len();
        let surface = RadialSurface::new(self.grid, z[..n].to_vec())?;
        let states = node_states(&surface, self.data, self.k)?;
        if let Some(e) = first_breach(&states) {
            return Err(e);
        }
        let mut f: Vec<f64> = states.iter().map(|s| s.residual).collect();
        for (a, (psi, _)) in self.gauge.iter().enumerate() {
            axpy(z[n + a], psi, &mut f);
        }
        for (_, ell) in &self.gauge {
            f.push(dot(ell, &z[..n]));
        }
        Ok((f, states))
    }

    fn jacobian(&self, z: &[f64], mode: JacobianMode) -> Result<DMatrix<f64>> {
        let n = self.grid.len();
        let surface = RadialSurface::new(self.grid, z[..n].to_vec())?;
        let core = jacobian(&surface, self.data, self.k, mode)?;
        let m = self.size();
        let mut jac = DMatrix::zeros(m, m);
        jac.view_mut((0, 0), (n, n)).copy_from(&core);
        for (a, (psi, ell)) in self.gauge.iter().enumerate() {
            for j in 0..n {
                jac[(j, n + a)] = psi[j];
                jac[(n + a, j)] = ell[j];
            }
        }
        Ok(jac)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn solve_linear(jac: DMatrix<f64>, rhs: &[f64]) -> Result<DVector<f64>> {
    let lu = jac.lu();
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|x| x.abs()).collect();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < 1e14) {
        return Err(Error::SingularJacobian { condition });
    }
    lu.solve(&DVector::from_column_slice(rhs))
        .ok_or(Error::SingularJacobian { condition })
}

/// Damped Newton iteration. Admissibility of the starting surface is
/// required; every accepted step keeps all nodes strictly convex with
/// positive support.
pub fn newton_solve(spec: &ProblemSpec) -> Result<SolveReport> {
    spec.validate()?;
    let initial = spec.initial_surface()?;
    solve_from(spec, &initial)
}

/// Newton iteration from an explicit starting surface (used by
/// continuation).
pub fn solve_from(spec: &ProblemSpec, initial: &RadialSurface) -> Result<SolveReport> {
    spec.validate()?;
    if initial.grid != spec.grid {
        return Err(Error::validation("initial", "starting surface lives on a different grid"));
    }
    let cfg = &spec.config;
    let sys = System {
        grid: spec.grid,
        data: &spec.data,
        k: spec.k,
        gauge: if spec.data.translation_invariant() {
            gauge_modes(&spec.grid)
        } else {
            Vec::new()
        },
    };
    let n = spec.grid.len();
    let mut z: Vec<f64> = initial.rho().to_vec();
    z.extend(std::iter::repeat(0.0).take(sys.gauge.len()));
    let (mut f, mut states) = sys.eval(&z)?;
    let mut norm = max_abs(&f);
    let mut history = vec![norm];
    let mut iterations = 0;
    let mut status = None;

    while norm > cfg.tol * 1e-2 && iterations < cfg.max_iterations {
        // stop once the true residual is below tolerance and the last step
        // no longer improves the residual appreciably
        if norm <= cfg.tol && history.len() >= 2 && norm > 0.1 * history[history.len() - 2] {
            break;
        }
        let jac = sys.jacobian(&z, cfg.jacobian)?;
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        let dir = solve_linear(jac, &neg)?;
        let phi0: f64 = f.iter().map(|x| x * x).sum();
        let mut alpha = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = z.iter().zip(dir.iter()).map(|(a, d)| a + alpha * d).collect();
            if let Ok((ft, st)) = sys.eval(&trial) {
                let phi: f64 = ft.iter().map(|x| x * x).sum();
                if phi <= (1.0 - 2.0 * cfg.armijo * alpha) * phi0 || max_abs(&ft) <= cfg.tol * 1e-2 {
                    break Some((trial, ft, st));
                }
            }
            alpha *= cfg.backtrack;
            if alpha < cfg.min_step {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some((zt, ft, st)) => {
                z = zt;
                f = ft;
                states = st;
                norm = max_abs(&f);
                history.push(norm);
            }
            None => {
                // at the rounding floor no descent is possible any more
                if norm > cfg.tol {
                    status = Some(SolveStatus::LineSearchUnderflow);
                }
                break;
            }
        }
    }

    let true_residual = max_abs(&states.iter().map(|s| s.residual).collect::<Vec<_>>());
    let multipliers = z[n..].to_vec();
    let status = status.unwrap_or(if norm <= cfg.tol {
        if true_residual <= cfg.tol {
            SolveStatus::Converged
        } else {
            SolveStatus::GaugeObstruction
        }
    } else {
        SolveStatus::IterationCap
    });
    let rho = z[..n].to_vec();
    let support: Vec<f64> = states.iter().map(|s| s.support).collect();
    let converged = status == SolveStatus::Converged;
    let surface = RadialSurface::new(spec.grid, rho.clone())?;
    let q_diag = if converged {
        q_diagnostic(&surface, &spec.data, spec.k, None).ok()
    } else {
        None
    };
    Ok(SolveReport {
        n: spec.dim(),
        k: spec.k,
        grid: spec.grid,
        family: spec.data.family,
        quadratic_constant: quadratic_constant(&history),
        residual_history: history,
        residual: true_residual,
        converged,
        status,
        iterations,
        multipliers,
        kappa1_max: states.iter().map(NodeState::kappa_max).fold(f64::NEG_INFINITY, f64::max),
        kappa_min: states.iter().map(NodeState::kappa_min).fold(f64::INFINITY, f64::min),
        support_range: range(&support),
        rho_range: range(&rho),
        inf_f: spec.data.inf_f(),
        c2_bound: spec.data.c2_bound(),
        rho,
        q_diag,
    })
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
