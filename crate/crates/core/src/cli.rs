//! Command implementations behind the `perdde` binary.
//!
//! Each command returns an [`Outcome`]: a JSON document plus the process exit
//! code. Exit codes: 0 success / SOLVABLE, 1 parse or validation error,
//! 2 UNSOLVABLE or obstructed forcing, 3 INCONCLUSIVE, 4 verification
//! failure, 5 oracle divergence or non-convergence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::certify::{
    analyze_system, delay_family, delay_family_bound, rbound_estimate, scan, tail_mode, RboundConfig, Verdict,
};
use crate::document::{to_text, Cpx, Problem, ProblemFile, SolutionFile};
use crate::error::Error;
use crate::fourier::{grid_node, SampledSignal};
use crate::mild::{fourier_consistency, mild_check_coeffs, MildOptions};
use crate::oracle::{integrate, periodic_compare};
use crate::solver::{default_residual_grid, default_truncation, equation_defect, solve_forced};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNSOLVABLE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_QUAD_PANELS: usize = 2048;
pub const DEFAULT_PERIODS: usize = 30;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub document: Value,
    /// Human-readable diagnostic for stderr.
    pub message: Option<String>,
}

impl Outcome {
    fn ok(document: Value) -> Self {
        Self {
            exit: EXIT_OK,
            document,
            message: None,
        }
    }

    fn fail(exit: i32, error: &str, message: String, mut document: Value) -> Self {
        if let Value::Object(map) = &mut document {
            map.insert("error".into(), Value::String(error.into()));
            map.insert("message".into(), Value::String(message.clone()));
        }
        Self {
            exit,
            document,
            message: Some(message),
        }
    }

    fn input(err: impl std::fmt::Display) -> Self {
        Self::fail(EXIT_INPUT, "InvalidInput", err.to_string(), json!({}))
    }

    /// Document text, 17 significant digits per float.
    pub fn text(&self) -> String {
        to_text(&self.document)
    }

    /// Writes the document to `output` (last writer wins) or stdout.
    pub fn emit(&self, output: Option<&Path>) -> std::io::Result<()> {
        let text = self.text();
        match output {
            Some(path) => fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    }
}

/// Flags shared by all commands; unset values fall back to the problem
/// file's `options` block, then to built-in defaults.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub truncation: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub csv: Option<PathBuf>,
    pub force: bool,
    pub quad_panels: Option<usize>,
    pub periods: Option<usize>,
    pub dt: Option<f64>,
}

pub fn load_problem(path: &Path) -> Result<Problem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemFile::parse(&text)
        .and_then(ProblemFile::into_problem)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn window(problem: &Problem, flags: &Flags) -> usize {
    flags
        .truncation
        .or(problem.options.truncation)
        .unwrap_or_else(|| default_truncation(&problem.system, &problem.forcing))
}

/// Decides solvability and reports the certificate.
pub fn cmd_analyze(path: &Path, flags: &Flags) -> Outcome {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(e) => return Outcome::input(e),
    };
    let sys = &problem.system;
    let k = window(&problem, flags);
    let cfg = RboundConfig {
        p: 2.0,
        trials: flags.trials.or(problem.options.trials).unwrap_or(10_000),
        seed: flags.seed.or(problem.options.seed).unwrap_or(0),
    };
    let report = analyze_system(sys, k, cfg);
    let family = delay_family(sys, k);
    let delay_estimate = rbound_estimate(&family, cfg.p, cfg.trials.min(1000), cfg.seed).ok();
    let delay_bound = delay_family_bound(sys, cfg.p);
    let doc = json!({
        "verdict": report.verdict.label(),
        "singular_modes": report.singular_modes,
        "scan_K": report.scan_k,
        "sup_multiplier_norm": report.sup_multiplier_norm,
        "tail_K": report.tail_k,
        "tail_bound": report.tail_bound,
        "certified_rbound": report.certified_rbound(),
        "rbound_estimate": report.rbound_estimate,
        "rbound_p": cfg.p,
        "rbound_trials": cfg.trials,
        "seed": cfg.seed,
        "variation_sup": report.variation_sup,
        "delay_family_estimate": delay_estimate,
        "delay_family_bound": delay_bound,
        "delay_bound_exceeded": delay_estimate.is_some_and(|e| e > delay_bound + 1e-9),
    });
    let exit = match report.verdict {
        Verdict::Solvable => EXIT_OK,
        Verdict::Unsolvable(_) => EXIT_UNSOLVABLE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Outcome {
        exit,
        document: doc,
        message: None,
    }
}

/// Solves for the periodic solution and optionally exports a CSV trajectory.
pub fn cmd_solve(path: &Path, flags: &Flags) -> Outcome {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(e) => return Outcome::input(e),
    };
    let sys = &problem.system;
    let f = &problem.forcing;
    let k = window(&problem, flags);
    if f.max_mode() > k {
        return Outcome::input(Error::TruncationTooSmall {
            max_mode: f.max_mode(),
            truncation: k,
        });
    }
    let report = scan(sys, k.max(tail_mode(sys)));
    let obstructing: Vec<i64> = report
        .singular_modes
        .iter()
        .copied()
        .filter(|m| f.get(*m).is_some())
        .collect();
    if !report.singular_modes.is_empty() && !flags.force {
        return Outcome::fail(
            EXIT_UNSOLVABLE,
            "SingularMode",
            format!(
                "singular symbol at modes {:?}; forcing obstructed at {:?} (use --force to solve the unobstructed modes)",
                report.singular_modes, obstructing
            ),
            json!({
                "singular_modes": report.singular_modes,
                "obstructed_modes": obstructing,
            }),
        );
    }
    let (mut sol, obstructed) = match solve_forced(sys, f, k) {
        Ok(r) => r,
        Err(e) => return Outcome::input(e),
    };
    sol.forcing_ref = path.display().to_string();
    let doc = SolutionFile::from_coeffs(&sol.coeffs, k, sol.residual_sup, &sol.forcing_ref, obstructed.clone());
    let value = serde_json::to_value(&doc).expect("serializable");

    if let Some(csv) = &flags.csv {
        let samples = flags.samples.unwrap_or_else(|| default_residual_grid(k));
        if let Err(e) = write_csv(csv, &sol.coeffs, samples) {
            return Outcome::input(format!("{}: {e}", csv.display()));
        }
    }
    if obstructed.is_empty() {
        Outcome::ok(value)
    } else {
        Outcome::fail(
            EXIT_UNSOLVABLE,
            "SingularMode",
            format!("forcing modes {obstructed:?} are obstructed and were left at zero"),
            value,
        )
    }
}

fn write_csv(path: &Path, x: &crate::model::FourierCoefficients<f64>, samples: usize) -> std::io::Result<()> {
    let mut out = String::from("t");
    for i in 1..=x.dim() {
        out.push_str(&format!(",x{i}_re,x{i}_im"));
    }
    out.push('\n');
    let samples = samples.max(1);
    for m in 0..samples {
        let t: f64 = grid_node(m, samples);
        out.push_str(&format!("{t:.16e}"));
        for z in x.evaluate(t).iter() {
            out.push_str(&format!(",{:.16e},{:.16e}", z.re, z.im));
        }
        out.push('\n');
    }
    fs::write(path, out)
}

/// Checks a solution file against its problem: strong residual, mild
/// formulation, and modal consistency.
pub fn cmd_verify(problem_path: &Path, solution_path: &Path, flags: &Flags) -> Outcome {
    let problem = match load_problem(problem_path) {
        Ok(p) => p,
        Err(e) => return Outcome::input(e),
    };
    let solution = match fs::read_to_string(solution_path)
        .map_err(|e| e.to_string())
        .and_then(|t| SolutionFile::parse(&t).map_err(|e| e.to_string()))
    {
        Ok(s) => s,
        Err(e) => return Outcome::input(format!("{}: {e}", solution_path.display())),
    };
    let sys = &problem.system;
    let f = &problem.forcing;
    if solution.dim != sys.dim() {
        return Outcome::input(format!(
            "solution dimension {} does not match problem dimension {}",
            solution.dim,
            sys.dim()
        ));
    }
    let x = match solution.coeffs() {
        Ok(x) => x,
        Err(e) => return Outcome::input(e),
    };
    let tol = flags
        .tolerance
        .or(problem.options.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let panels = flags
        .quad_panels
        .or(problem.options.quad_panels)
        .unwrap_or(DEFAULT_QUAD_PANELS);
    if panels < 32 || !panels.is_multiple_of(32) {
        return Outcome::input(format!("--quad-panels {panels} must be a positive multiple of 32"));
    }
    let band = solution.truncation.max(x.max_mode()).max(f.max_mode());
    let grid = default_residual_grid(band);

    let residual_sup = equation_defect(sys, &x, f, grid);
    let periodicity = (x.evaluate(0.0) - x.evaluate(2.0 * std::f64::consts::PI)).norm();
    let mut failed = Vec::new();
    if residual_sup > tol {
        failed.push("residual");
    }
    if periodicity > tol {
        failed.push("periodicity");
    }
    let opts = MildOptions {
        grid: panels / 32,
        panels,
        tol,
    };
    let mild = match mild_check_coeffs(sys, &x, f, opts) {
        Ok(m) => {
            if m.fixed_point_residual > tol {
                failed.push("mild_fixed_point");
            }
            if m.formula_residual_sup > tol {
                failed.push("mild_formula");
            }
            if m.integrated_residual_sup > tol {
                failed.push("mild_integrated");
            }
            json!({
                "phi": m.phi.iter().map(|&z| Cpx::from(z)).collect::<Vec<_>>(),
                "fixed_point_residual": m.fixed_point_residual,
                "formula_residual_sup": m.formula_residual_sup,
                "integrated_residual_sup": m.integrated_residual_sup,
            })
        }
        Err(e) => {
            failed.push("mild_quadrature");
            json!({ "error": e.to_string() })
        }
    };
    let consistency = SampledSignal::from_coeffs(&x, grid)
        .and_then(|s| fourier_consistency(sys, &s, f, band))
        .unwrap_or(f64::INFINITY);
    if !(consistency <= tol) {
        failed.push("fourier_consistency");
    }
    let doc = json!({
        "residual_sup": residual_sup,
        "periodicity_defect": periodicity,
        "mild": mild,
        "fourier_consistency": consistency,
        "tolerance": tol,
        "quad_panels": panels,
        "passed": failed.is_empty(),
        "failed_checks": failed,
    });
    if failed.is_empty() {
        Outcome::ok(doc)
    } else {
        Outcome::fail(
            EXIT_VERIFY_FAILED,
            "VerificationFailed",
            format!("failed checks: {}", failed.join(", ")),
            doc,
        )
    }
}

/// Runs the RK4 oracle and compares its last period with the spectral solution.
pub fn cmd_oracle(path: &Path, flags: &Flags) -> Outcome {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(e) => return Outcome::input(e),
    };
    let sys = &problem.system;
    let f = &problem.forcing;
    let oracle_opts = problem.options.oracle.clone().unwrap_or_default();
    let periods = flags.periods.or(oracle_opts.periods).unwrap_or(DEFAULT_PERIODS);
    let dt = flags.dt.or(oracle_opts.dt).unwrap_or(DEFAULT_DT);
    let k = window(&problem, flags).max(f.max_mode());
    let sol = match crate::solver::solve(sys, f, k) {
        Ok(s) => s,
        Err(Error::SingularMode(modes)) => {
            return Outcome::fail(
                EXIT_UNSOLVABLE,
                "SingularMode",
                format!("no spectral solution to compare against: singular modes {modes:?}"),
                json!({ "obstructed_modes": modes }),
            )
        }
        Err(e) => return Outcome::input(e),
    };
    let history = sol.coeffs.coeff(0);
    let traj = match integrate(sys, f, &history, periods, dt) {
        Ok(t) => t,
        Err(e @ Error::StepTooLarge { .. }) | Err(e @ Error::InvalidArgument(_)) => return Outcome::input(e),
        Err(e) => {
            return Outcome::fail(
                EXIT_ORACLE,
                "Divergence",
                e.to_string(),
                json!({ "dt_requested": dt, "periods": periods }),
            )
        }
    };
    match periodic_compare(&traj, &sol) {
        Ok(cmp) => Outcome::ok(json!({
            "sup_error_last_period": cmp.sup_error_last_period,
            "convergence_ratios": cmp.convergence_ratios,
            "contraction_rate": cmp.contraction_rate,
            "dt": traj.dt,
            "dt_requested": dt,
            "periods": periods,
        })),
        Err(Error::OracleNotConverged { rate }) => Outcome::fail(
            EXIT_ORACLE,
            "OracleNotConverged",
            format!("per-period contraction {rate} exceeds 0.9"),
            json!({ "contraction_rate": rate, "dt": traj.dt, "periods": periods }),
        ),
        Err(e) => Outcome::input(e),
    }
}
