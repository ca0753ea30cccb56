//! Seeded verification suites, problem files and report serialisation.
//!
//! Each suite draws from its own ChaCha8 stream, keyed by the run seed and
//! the stream name, so adding a suite never perturbs the samples of
//! another. Reports are JSON with a schema version; sweeps also emit CSV.

pub mod suites;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::geometry::RadialGrid;
use crate::solver::{estimate_sweep, newton_solve, q_diagnostic, Family, InitialGuess, ProblemSpec, SolveConfig, SolveReport, SweepTable};
use crate::{Error, Result};

pub use suites::replay;

/// Version tag written into every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Suites in execution order for `all`.
pub const SUITES: [&str; 13] = [
    "sigma-oracle",
    "sigma-jet",
    "euler",
    "newton-identity",
    "lemma1",
    "quotient-chain",
    "decomposition",
    "exact-identities",
    "eig-jet",
    "perturbation-gap",
    "cascade",
    "geometry-identities",
    "probe-constants",
];

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KCURV_OUT_DIR";

/// Random stream of a suite. The sigma-derivative suites replay the value
/// oracle's curvature vectors.
pub fn stream_name(suite: &str) -> &str {
    match suite {
        "sigma-jet" | "euler" => "sigma-oracle",
        s => s,
    }
}

/// `ChaCha8` seeded with `SHA-256(seed_le || stream)`.
pub fn suite_rng(seed: u64, stream: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Per-check tolerance overrides keyed by `suite/check`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Tolerances {
    pub fn get(&self, check: &str) -> f64 {
        self.0.get(check).copied().unwrap_or_else(|| suites::default_tolerance(check))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub tolerance: f64,
    pub attempted: usize,
    /// Samples inside the check's domain.
    pub admissible: usize,
    pub passed: usize,
    /// Smallest dimensionless margin (negative means failure).
    pub worst_margin: Option<f64>,
    /// The sample realising `worst_margin`, replayable via [`replay`].
    pub worst_sample: Option<Value>,
    /// Samples whose evaluation raised an error; counted as failures.
    pub skipped_errors: usize,
}

impl CheckSummary {
    pub fn failed(&self) -> bool {
        self.passed < self.admissible || self.skipped_errors > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckSummary>,
    pub wall_time_ms: f64,
    /// Some check failed on an admissible sample.
    pub hard_failure: bool,
    /// Informational payload (the constant probe).
    pub details: Option<Value>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Expands `all` and rejects unknown names.
pub fn resolve_suites(names: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(SUITES.iter().map(|s| s.to_string()));
        } else if SUITES.contains(&n.as_str()) {
            out.push(n.clone());
        } else {
            return Err(Error::validation(
                "suite",
                format!("unknown suite `{n}`; available: all, {}", SUITES.join(", ")),
            ));
        }
    }
    Ok(out)
}

pub fn run_suite(suite: &str, samples: usize, seed: u64, tols: &Tolerances) -> Result<SuiteReport> {
    if samples == 0 {
        return Err(Error::validation("samples", "must be at least 1"));
    }
    let start = Instant::now();
    let mut rng = suite_rng(seed, stream_name(suite));
    let (checks, details) = suites::run_suite(suite, &mut rng, samples, tols)?;
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        suite: suite.into(),
        seed,
        samples,
        hard_failure: checks.iter().any(CheckSummary::failed),
        checks,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        details,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Verify,
    Solve,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything that determines a run. Loaded from `--config` and then
/// overridden by explicit flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub suites: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            suites: vec!["all".into()],
            samples: 1000,
            seed: 0,
            tolerances: Tolerances::default(),
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        resolve_suites(&self.suites)?;
        if self.samples == 0 {
            return Err(Error::validation("samples", "must be at least 1"));
        }
        for (k, v) in &self.tolerances.0 {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::validation(format!("tolerances.{k}"), "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Runs the selected suites in order.
pub fn run_verify(config: &RunConfig) -> Result<Vec<SuiteReport>> {
    config.validate()?;
    resolve_suites(&config.suites)?
        .iter()
        .map(|s| run_suite(s, config.samples, config.seed, &config.tolerances))
        .collect()
}

/// Flat CSV view of suite reports.
pub fn suites_csv(reports: &[SuiteReport]) -> String {
    let mut out = String::from("suite,check,attempted,admissible,passed,worst_margin,wall_time_ms\n");
    for r in reports {
        for c in &r.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.1}",
                r.suite,
                c.name,
                c.attempted,
                c.admissible,
                c.passed,
                c.worst_margin.map(|m| format!("{m:.6e}")).unwrap_or_default(),
                r.wall_time_ms
            );
        }
    }
    out
}

/// Parses JSON with the failing field path in the error.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::validation(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
    })
}

fn grid_for(n: usize, nodes: usize) -> Result<RadialGrid> {
    match n {
        1 => Ok(RadialGrid::Periodic { nodes }),
        2 => Ok(RadialGrid::Axisymmetric { nodes }),
        _ => Err(Error::validation("n", format!("the solver supports n = 1 or n = 2, got {n}"))),
    }
}

/// A solve request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveProblem {
    pub n: usize,
    pub k: usize,
    pub family: Family,
    /// Profile nodes.
    pub grid: usize,
    #[serde(default = "sphere")]
    pub initial: InitialGuess,
    #[serde(default)]
    pub config: SolveConfig,
    /// Amplitude `A` of the test quantity (default from the support
    /// function).
    #[serde(default)]
    pub amplitude: Option<f64>,
}

fn sphere() -> InitialGuess {
    InitialGuess::Sphere
}

impl SolveProblem {
    pub fn spec(&self) -> Result<ProblemSpec> {
        let mut spec = ProblemSpec::new(self.k, self.family, grid_for(self.n, self.grid)?)?;
        spec.initial = self.initial.clone();
        spec.config = self.config;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub schema_version: u32,
    pub problem: SolveProblem,
    pub report: SolveReport,
}

pub fn run_solve(problem: &SolveProblem) -> Result<SolveOutput> {
    let spec = problem.spec()?;
    let mut report = newton_solve(&spec)?;
    if report.converged && problem.amplitude.is_some() {
        report.q_diag = Some(q_diagnostic(&report.surface()?, &spec.data, spec.k, problem.amplitude)?);
    }
    Ok(SolveOutput {
        schema_version: SCHEMA_VERSION,
        problem: problem.clone(),
        report,
    })
}

/// A sweep request: continuation over `values` on every grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepProblem {
    pub n: usize,
    pub k: usize,
    /// Base family; its sweep parameter is replaced by each of `values`.
    pub family: Family,
    pub values: Vec<f64>,
    pub grids: Vec<usize>,
    #[serde(default)]
    pub config: SolveConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub schema_version: u32,
    pub problem: SweepProblem,
    pub table: SweepTable,
}

pub fn run_sweep(problem: &SweepProblem) -> Result<SweepOutput> {
    let first = *problem.grids.first().ok_or_else(|| Error::validation("grids", "need at least one grid"))?;
    let base = problem.family.with_param(*problem.values.first().ok_or_else(|| Error::validation("values", "need at least one value"))?);
    let mut spec = ProblemSpec::new(problem.k, base, grid_for(problem.n, first)?)?;
    spec.config = problem.config;
    for (i, &g) in problem.grids.iter().enumerate() {
        grid_for(problem.n, g)?.validate().map_err(|e| Error::validation(format!("grids[{i}]"), e.to_string()))?;
    }
    Ok(SweepOutput {
        schema_version: SCHEMA_VERSION,
        problem: problem.clone(),
        table: estimate_sweep(&spec, &problem.values, &problem.grids)?,
    })
}

/// Output directory: the explicit flag, else `$KCURV_OUT_DIR`, else none.
pub fn output_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let (mut a, mut b, mut c) = (suite_rng(7, "lemma1"), suite_rng(7, "lemma1"), suite_rng(7, "cascade"));
        let x = a.next_u64();
        assert_eq!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
        assert_ne!(suite_rng(8, "lemma1").next_u64(), x);
    }

    #[test]
    fn unknown_suite_lists_alternatives() {
        let e = resolve_suites(&["nope".into()]).unwrap_err().to_string();
        assert!(e.contains("sigma-oracle") && e.contains("all"), "{e}");
        assert_eq!(resolve_suites(&["all".into()]).unwrap().len(), SUITES.len());
    }

    #[test]
    fn small_runs_pass_and_replay() {
        let tols = Tolerances::default();
        for s in ["sigma-oracle", "lemma1", "eig-jet", "cascade"] {
            let r = run_suite(s, 30, 1, &tols).unwrap();
            assert!(!r.hard_failure, "{r:?}");
            for c in &r.checks {
                if let (Some(m), Some(sample)) = (c.worst_margin, &c.worst_sample) {
                    let again = replay(&format!("{s}/{}", c.name), sample, c.tolerance).unwrap().unwrap();
                    assert_eq!(again, m, "{s}/{}", c.name);
                }
            }
        }
    }

    #[test]
    fn identical_configs_give_identical_numbers() {
        let cfg = RunConfig {
            suites: vec!["newton-identity".into(), "perturbation-gap".into()],
            samples: 50,
            seed: 3,
            ..RunConfig::default()
        };
        let strip = |mut r: Vec<SuiteReport>| {
            r.iter_mut().for_each(|x| x.wall_time_ms = 0.0);
            serde_json::to_string(&r).unwrap()
        };
        assert_eq!(strip(run_verify(&cfg).unwrap()), strip(run_verify(&cfg).unwrap()));
        let bad: Result<RunConfig> = parse_json(r#"{"format":"xml"}"#);
        assert!(bad.unwrap_err().to_string().contains("format"));
    }

    #[test]
    fn problem_errors_carry_paths() {
        let e = parse_json::<SolveProblem>(r#"{"n":2,"k":1,"family":{"family":"constant","c":"x"},"grid":16}"#).unwrap_err();
        assert!(e.to_string().contains("family"), "{e}");
        let e = parse_json::<SolveProblem>(r#"{"n":2,"k":1,"family":{"family":"constant","c":1},"grid":16,"bogus":1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let p: SolveProblem = parse_json(r#"{"n":2,"k":3,"family":{"family":"constant","c":1},"grid":16}"#).unwrap();
        assert!(matches!(p.spec(), Err(Error::Validation { .. })));
        let p: SolveProblem = parse_json(r#"{"n":2,"k":2,"family":{"family":"normal_linear","c":1,"a":-1.5},"grid":16}"#).unwrap();
        let e = p.spec().unwrap_err().to_string();
        assert!(e.contains("family.a") && e.contains("positive"), "{e}");
    }

    #[test]
    fn solve_round_trip() {
        let p: SolveProblem = parse_json(r#"{"n":2,"k":2,"family":{"family":"normal_even","c":1,"a":0.1},"grid":24}"#).unwrap();
        let out = run_solve(&p).unwrap();
        assert!(out.report.converged);
        let text = serde_json::to_string(&out).unwrap();
        let back: SolveOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(back.report.rho, out.report.rho);
    }
}
