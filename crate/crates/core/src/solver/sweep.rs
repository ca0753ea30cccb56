//! Continuation in a family parameter and grid-refinement sweeps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{solve_from, ProblemSpec, SolveReport, SolveStatus};
use crate::geometry::RadialSurface;
use crate::{Error, Result};

/// Bisection stops once a step is shorter than this fraction of the
/// scheduled step.
const BISECTION_FLOOR: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub param: f64,
    /// The value was on the requested schedule (not a bisection midpoint).
    pub scheduled: bool,
    pub report: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    /// Accepted steps in order.
    pub steps: Vec<ContinuationStep>,
    /// Smallest scheduled parameter that could not be reached, if any.
    pub unreachable: Option<f64>,
    /// Status of the last failed attempt before giving up.
    pub failure: Option<String>,
    pub bisections: usize,
}

impl ContinuationReport {
    pub fn completed(&self) -> bool {
        self.unreachable.is_none()
    }

    /// Report for each scheduled parameter that was reached.
    pub fn scheduled(&self) -> impl Iterator<Item = &ContinuationStep> {
        self.steps.iter().filter(|s| s.scheduled)
    }
}

fn attempt(spec: &ProblemSpec, param: f64, start: Option<&RadialSurface>) -> Result<SolveReport> {
    let mut s = spec.clone();
    s.data.family = spec.data.family.with_param(param);
    s.validate()?;
    match start {
        Some(surface) => solve_from(&s, surface),
        None => solve_from(&s, &s.initial_surface()?),
    }
}

/// Solves along `schedule`, each step starting from the previous solution
/// (the first from the problem's initial guess). A failed step is bisected
/// towards the last success; when the bisection floor is reached the
/// remaining schedule is marked unreachable.
pub fn continuation(spec: &ProblemSpec, schedule: &[f64]) -> Result<ContinuationReport> {
    spec.validate()?;
    if schedule.is_empty() {
        return Err(Error::validation("schedule", "at least one parameter value is required"));
    }
    let mut steps: Vec<ContinuationStep> = Vec::new();
    let mut bisections = 0;
    let mut last: Option<(f64, RadialSurface)> = None;
    for &target in schedule {
        let full = last.as_ref().map(|(p, _)| (target - p).abs()).unwrap_or(0.0);
        let mut goal = target;
        loop {
            let outcome = attempt(spec, goal, last.as_ref().map(|(_, s)| s));
            let failure = match outcome {
                Ok(rep) if rep.status == SolveStatus::Converged => {
                    let surface = rep.surface()?;
                    steps.push(ContinuationStep {
                        param: goal,
                        scheduled: goal == target,
                        report: rep,
                    });
                    last = Some((goal, surface));
                    if goal == target {
                        break;
                    }
                    goal = target;
                    continue;
                }
                Ok(rep) => format!("{} (residual {:e}, multipliers {:?})", rep.status.as_str(), rep.residual, rep.multipliers),
                Err(e @ Error::Validation { .. }) => return Err(e),
                Err(e) => e.to_string(),
            };
            let Some((prev, _)) = last.as_ref() else {
                return Ok(ContinuationReport {
                    steps,
                    unreachable: Some(target),
                    failure: Some(failure),
                    bisections,
                });
            };
            let gap = (goal - prev).abs();
            if gap <= BISECTION_FLOOR * full.max(f64::MIN_POSITIVE) {
                return Ok(ContinuationReport {
                    steps,
                    unreachable: Some(target),
                    failure: Some(failure),
                    bisections,
                });
            }
            bisections += 1;
            goal = 0.5 * (goal + prev);
        }
    }
    Ok(ContinuationReport {
        steps,
        unreachable: None,
        failure: None,
        bisections,
    })
}

/// Fixed column order of the sweep CSV.
pub const CSV_COLUMNS: [&str; 8] = ["family_param", "grid", "kappa1_max", "u_min", "u_max", "residual", "iterations", "status"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family_param: f64,
    pub grid: usize,
    pub kappa1_max: Option<f64>,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    /// Solver status, or `unreachable` / `error`.
    pub status: String,
    pub inf_f: f64,
    pub c2_bound: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub family: String,
    pub k: usize,
    pub n: usize,
    pub grids: Vec<usize>,
    /// Largest `kappa1_max` over converged rows.
    pub max_kappa1: Option<f64>,
    /// Relative change of `kappa1_max` between the two finest grids, per
    /// parameter (`None` when either row failed).
    pub refinement_change: Vec<(f64, Option<f64>)>,
    /// Every parameter converged on every grid and changed by at most 1%
    /// between the two finest grids.
    pub stable: bool,
    /// Every row converged.
    pub all_converged: bool,
    pub min_support: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Relative change tolerated between the two finest grids.
pub const REFINEMENT_TOL: f64 = 0.01;

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.family_param,
                r.grid,
                opt(r.kappa1_max),
                opt(r.u_min),
                opt(r.u_max),
                opt(r.residual),
                r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                r.status
            );
        }
        out
    }

    pub fn row(&self, param: f64, grid: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.family_param == param && r.grid == grid)
    }
}

/// Runs continuation over `params` on each grid resolution in `grids`
/// (ascending) and tabulates the curvature bound. Failures are recorded per
/// row; the sweep always completes.
pub fn estimate_sweep(spec: &ProblemSpec, params: &[f64], grids: &[usize]) -> Result<SweepTable> {
    spec.validate()?;
    if grids.is_empty() || params.is_empty() {
        return Err(Error::validation("sweep", "need at least one grid and one parameter"));
    }
    let mut grids = grids.to_vec();
    grids.sort_unstable();
    let mut rows = Vec::new();
    for &g in &grids {
        let mut s = spec.clone();
        s.grid = spec.grid.with_resolution(g);
        if let super::InitialGuess::Nodal { .. } = s.initial {
            s.initial = super::InitialGuess::Sphere;
        }
        let cont = continuation(&s, params);
        for &p in params {
            let data = super::PrescribedData {
                family: spec.data.family.with_param(p),
            };
            let mut row = SweepRow {
                family_param: p,
                grid: g,
                kappa1_max: None,
                u_min: None,
                u_max: None,
                residual: None,
                iterations: None,
                status: String::new(),
                inf_f: data.inf_f(),
                c2_bound: data.c2_bound(),
                error: None,
            };
            match &cont {
                Ok(c) => match c.scheduled().find(|st| st.param == p) {
                    Some(st) => {
                        let r = &st.report;
                        row.kappa1_max = Some(r.kappa1_max);
                        row.u_min = Some(r.support_range.0);
                        row.u_max = Some(r.support_range.1);
                        row.residual = Some(r.residual);
                        row.iterations = Some(r.iterations);
                        row.status = r.status.as_str().into();
                    }
                    None => {
                        row.status = "unreachable".into();
                        row.error = c.failure.clone();
                    }
                },
                Err(e) => {
                    row.status = "error".into();
                    row.error = Some(e.to_string());
                }
            }
            rows.push(row);
        }
    }
    let converged = |r: &SweepRow| r.status == SolveStatus::Converged.as_str();
    let max_kappa1 = rows
        .iter()
        .filter(|r| converged(r))
        .filter_map(|r| r.kappa1_max)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let min_support = rows
        .iter()
        .filter_map(|r| r.u_min)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let refinement_change: Vec<(f64, Option<f64>)> = params
        .iter()
        .map(|&p| {
            if grids.len() < 2 {
                return (p, None);
            }
            let find = |g: usize| rows.iter().find(|r| r.family_param == p && r.grid == g && converged(r));
            let (fine, coarse) = (find(grids[grids.len() - 1]), find(grids[grids.len() - 2]));
            let change = match (fine.and_then(|r| r.kappa1_max), coarse.and_then(|r| r.kappa1_max)) {
                (Some(a), Some(b)) => Some((a - b).abs() / a.abs()),
                _ => None,
            };
            (p, change)
        })
        .collect();
    let all_converged = rows.iter().all(converged);
    let stable = all_converged && refinement_change.iter().all(|(_, c)| c.is_some_and(|c| c <= REFINEMENT_TOL));
    Ok(SweepTable {
        summary: SweepSummary {
            family: spec.data.family.name().into(),
            k: spec.k,
            n: spec.dim(),
            grids,
            max_kappa1,
            refinement_change,
            stable,
            all_converged,
            min_support,
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialGrid;
    use crate::solver::Family;

    #[test]
    fn constant_family_rows_are_spheres() {
        let spec = ProblemSpec::new(2, Family::Constant { c: 1.0 }, RadialGrid::Axisymmetric { nodes: 16 }).unwrap();
        let t = estimate_sweep(&spec, &[1.0, 3.0, 6.0], &[16, 32]).unwrap();
        assert_eq!(t.rows.len(), 6);
        for r in &t.rows {
            assert!((r.kappa1_max.unwrap() - r.family_param.sqrt()).abs() < 1e-9, "{r:?}");
        }
        assert!(t.summary.stable);
        let csv = t.to_csv();
        assert!(csv.starts_with("family_param,grid,kappa1_max,u_min,u_max,residual,iterations,status\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn obstructed_family_is_unreachable_but_isolated() {
        let spec = ProblemSpec::new(1, Family::NormalLinear { c: 2.0, a: 0.0 }, RadialGrid::Axisymmetric { nodes: 16 }).unwrap();
        let c = continuation(&spec, &[0.0, 0.1]).unwrap();
        assert_eq!(c.unreachable, Some(0.1));
        assert_eq!(c.scheduled().count(), 1);
        let t = estimate_sweep(&spec, &[0.0, 0.1], &[16]).unwrap();
        assert_eq!(t.rows[0].status, "converged");
        assert_eq!(t.rows[1].status, "unreachable");
        assert!(!t.summary.stable);
    }

    #[test]
    fn invalid_target_is_rejected() {
        let spec = ProblemSpec::new(2, Family::NormalLinear { c: 1.0, a: 0.0 }, RadialGrid::Axisymmetric { nodes: 16 }).unwrap();
        assert!(matches!(continuation(&spec, &[0.0, 1.5]), Err(Error::Validation { .. })));
    }
}
