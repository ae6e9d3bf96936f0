//! Command-line front end: one subcommand per operation, JSON or CSV
//! reports on stdout (or a file via --output), deterministic output.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numeric failure.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    fit_energy_curve, fit_theta_harmonic, formula_audit, optimize_theta, sweep_ratio,
    uncertainty_audit,
};
use crate::linalg::{evolve_from, expectation, hermitian_eig, EigenSystem};
use crate::model::{
    build_model, ground_state_analytic, ground_state_numeric, zero_point_check, ModelOperators,
    ModelParams,
};
use crate::protocol::{
    apply_measurement, energy_at_b_spectral, extracted_energy, extracted_energy_swapped,
    measurement_projectors, MeasurementEnsemble,
};
use crate::report::{
    curve_csv, sweep_csv, to_json, AuditReport, CheckRow, CurveReport, CurveSample,
    OptimizeReport, SimulateReport, SweepReport, VerifyReport, UNITS,
};
use crate::tolerances as tol;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "minqet",
    version,
    about = "Simulator and verification suite for the minimal two-qubit \
             quantum energy teleportation protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one protocol round: measure A, wait, rotate B, report energies
    Simulate(SimulateArgs),
    /// Tabulate the post-measurement energy at B over time
    Curve(CurveArgs),
    /// Find the feedback angle maximizing the extracted energy
    Optimize(OptimizeArgs),
    /// Sweep the coupling ratio x = h/k and estimate the extraction ceiling
    Sweep(SweepArgs),
    /// Evaluate the teleportation timing and uncertainty-product conditions
    Audit(AuditArgs),
    /// Run structural invariant checks plus the published-formula audit
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
struct ParamArgs {
    /// Local field strength (energy units, > 0)
    #[arg(long)]
    h: f64,
    /// Two-qubit coupling strength (energy units, > 0)
    #[arg(long)]
    k: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.h, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Report format; csv is available for curve and sweep only
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn require_json(&self, command: &str) -> Result<()> {
        if self.format == Format::Csv {
            return Err(Error::validation(format!(
                "csv format is not available for {command}; use --format json"
            )));
        }
        Ok(())
    }

    fn emit(&self, body: &str) -> Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, body).map_err(|e| {
                Error::validation(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(body.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| Error::numeric(format!("cannot write stdout: {e}")))
            }
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Feedback rotation angle in radians; defaults to the optimum
    #[arg(long)]
    theta: Option<f64>,
    /// Time between measurement and feedback (defaults to 0)
    #[arg(long, default_value_t = 0.0)]
    wait: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of time samples on [0, 4 pi / k]
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Smallest coupling ratio x = h/k (> 0)
    #[arg(long, default_value_t = 0.1)]
    x_min: f64,
    /// Largest coupling ratio
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    /// Number of log-spaced grid points
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Operationalizes "much less than": wait time is epsilon/k
    #[arg(long, default_value_t = tol::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Classical-communication energy cost, reported verbatim
    #[arg(long)]
    e_cc: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutputArgs,
}

/// Parses argv, runs the requested command, and returns the process
/// exit code. Parse failures print usage and return 1; --help and
/// --version print to stdout and return 0.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            args.out.require_json("simulate")?;
            let body = to_json(&simulate_report(&args)?)?;
            args.out.emit(&body)
        }
        Command::Curve(args) => {
            let report = curve_report(&args)?;
            let body = match args.out.format {
                Format::Json => to_json(&report)?,
                Format::Csv => curve_csv(&report),
            };
            args.out.emit(&body)
        }
        Command::Optimize(args) => {
            args.out.require_json("optimize")?;
            let body = to_json(&optimize_report(&args)?)?;
            args.out.emit(&body)
        }
        Command::Sweep(args) => {
            let report = sweep_report(&args)?;
            let body = match args.out.format {
                Format::Json => to_json(&report)?,
                Format::Csv => sweep_csv(&report),
            };
            args.out.emit(&body)
        }
        Command::Audit(args) => {
            args.out.require_json("audit")?;
            let body = to_json(&audit_report(&args)?)?;
            args.out.emit(&body)
        }
        Command::Verify(args) => {
            args.out.require_json("verify")?;
            let report = verify_report(args.params.params()?)?;
            let body = to_json(&report)?;
            args.out.emit(&body)?;
            if !report.all_structural_pass {
                return Err(Error::numeric("structural invariant checks failed"));
            }
            Ok(())
        }
    }
}

fn simulate_report(args: &SimulateArgs) -> Result<SimulateReport> {
    let params = args.params.params()?;
    let ops = build_model(params)?;
    let ensemble = apply_measurement(&ground_state_analytic(params)?)?;
    let theta = match args.theta {
        Some(theta) => theta,
        None => optimize_theta(params)?.theta_star,
    };
    let trace = extracted_energy(&ensemble, &ops, theta, args.wait)?;
    Ok(SimulateReport {
        units: UNITS.to_string(),
        params,
        theta: trace.theta,
        wait_time: trace.wait_time,
        e_injected: trace.e_injected,
        e_after_operation: trace.e_after_operation,
        e_extracted: trace.e_extracted,
        e_injected_over_k: trace.e_injected / params.k,
        e_extracted_over_k: trace.e_extracted / params.k,
        wait_time_times_k: trace.wait_time * params.k,
        branch_details: trace.branch_details.to_vec(),
    })
}

fn curve_report(args: &CurveArgs) -> Result<CurveReport> {
    let params = args.params.params()?;
    if args.samples < 2 {
        return Err(Error::validation("curve needs at least 2 samples"));
    }
    let ops = build_model(params)?;
    let ensemble = apply_measurement(&ground_state_analytic(params)?)?;
    let eig = hermitian_eig(ops.h_total())?;
    let t_max = 4.0 * PI / params.k;
    let n = args.samples;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = t_max * i as f64 / (n - 1) as f64;
        let energy = energy_at_b_spectral(&ensemble, &eig, ops.h_b(), t)?;
        samples.push(CurveSample {
            t,
            t_times_k: t * params.k,
            energy_b: energy,
            energy_b_over_k: energy / params.k,
        });
    }
    Ok(CurveReport {
        units: UNITS.to_string(),
        params,
        n_samples: n,
        samples,
    })
}

fn optimize_report(args: &OptimizeArgs) -> Result<OptimizeReport> {
    let params = args.params.params()?;
    let optimum = optimize_theta(params)?;
    Ok(OptimizeReport {
        units: UNITS.to_string(),
        params,
        theta_star: optimum.theta_star,
        e_b_max: optimum.e_b_max,
        e_b_max_over_k: optimum.e_b_max / params.k,
        harmonic_coeffs: optimum.harmonic_coeffs,
    })
}

fn sweep_report(args: &SweepArgs) -> Result<SweepReport> {
    let table = sweep_ratio(args.x_min, args.x_max, args.n)?;
    Ok(SweepReport {
        units: UNITS.to_string(),
        x_min: args.x_min,
        x_max: args.x_max,
        n: args.n,
        rows: table.rows,
        sup_estimate: table.sup_estimate,
    })
}

fn audit_report(args: &AuditArgs) -> Result<AuditReport> {
    let params = args.params.params()?;
    let audit = uncertainty_audit(params, args.epsilon, args.e_cc)?;
    Ok(AuditReport::from_audit(params, &audit))
}

fn ensemble_total_energy(
    ensemble: &MeasurementEnsemble,
    eig: &EigenSystem,
    ops: &ModelOperators,
    t: f64,
) -> Result<f64> {
    let u = evolve_from(eig, t)?;
    let mut total = 0.0;
    for branch in ensemble.branches() {
        let evolved = u.transform(&branch.state)?;
        total += branch.probability * expectation(&evolved, ops.h_total())?;
    }
    Ok(total)
}

/// Measures every structural invariant the simulator relies on and
/// attaches the published-formula audit rows. Formula mismatches are
/// findings; only structural checks gate the exit status.
fn verify_report(params: ModelParams) -> Result<VerifyReport> {
    let ops = build_model(params)?;
    let eig = hermitian_eig(ops.h_total())?;
    let analytic = ground_state_analytic(params)?;
    let numeric = ground_state_numeric(&ops)?;
    let ensemble = apply_measurement(&analytic)?;
    let optimum = optimize_theta(params)?;
    let mut checks = Vec::new();

    checks.push(CheckRow::at_most(
        "ground_energy_abs",
        eig.eigenvalues[0].abs(),
        tol::DERIVED,
    ));
    let overlap = analytic.state().inner(numeric.state())?.norm();
    checks.push(CheckRow::at_most(
        "ground_state_overlap_deficit",
        1.0 - overlap,
        tol::DERIVED,
    ));
    let zp = zero_point_check(&ops, &analytic)?;
    checks.push(CheckRow::at_most(
        "zero_point_energy_max",
        zp.h_a.abs().max(zp.h_b.abs()).max(zp.v.abs()),
        tol::DERIVED,
    ));

    let [p0, p1] = measurement_projectors();
    let identity = crate::linalg::Operator::identity(4)?;
    let completeness = (&(p0.op() + p1.op()) - &identity).max_abs();
    let idem0 = (&(p0.op() * p0.op()) - p0.op()).max_abs();
    let idem1 = (&(p1.op() * p1.op()) - p1.op()).max_abs();
    let ortho = (p0.op() * p1.op()).max_abs();
    checks.push(CheckRow::at_most(
        "projector_algebra_residual",
        completeness.max(idem0).max(idem1).max(ortho),
        tol::ALGEBRAIC,
    ));

    let prob_dev = ensemble
        .branches()
        .iter()
        .map(|b| (b.probability - 0.5).abs())
        .fold(0.0, f64::max);
    checks.push(CheckRow::at_most(
        "branch_probability_deviation",
        prob_dev,
        tol::ALGEBRAIC,
    ));
    let norm_err = ensemble
        .branches()
        .iter()
        .map(|b| (b.state.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(CheckRow::at_most(
        "branch_state_norm_error",
        norm_err,
        tol::STATE_NORM,
    ));

    let identity_run = extracted_energy(&ensemble, &ops, 0.0, 0.0)?;
    checks.push(CheckRow::at_most(
        "identity_angle_extraction",
        identity_run.e_extracted.abs(),
        tol::ALGEBRAIC,
    ));

    let e_at_zero = ensemble_total_energy(&ensemble, &eig, &ops, 0.0)?;
    let mut conservation_dev: f64 = 0.0;
    for t in [0.3 / params.k, 1.0 / params.k, 3.0 / params.k] {
        let e_at_t = ensemble_total_energy(&ensemble, &eig, &ops, t)?;
        conservation_dev = conservation_dev.max((e_at_t - e_at_zero).abs());
    }
    checks.push(CheckRow::at_most(
        "energy_conservation_deviation",
        conservation_dev,
        tol::DERIVED,
    ));

    let mut min_after = f64::INFINITY;
    for j in 0..64 {
        let theta = PI * j as f64 / 64.0;
        let trace = extracted_energy(&ensemble, &ops, theta, 0.0)?;
        min_after = min_after.min(trace.e_after_operation);
    }
    checks.push(CheckRow::at_most(
        "post_operation_negativity",
        (-min_after).max(0.0),
        tol::ALGEBRAIC,
    ));

    let swapped = extracted_energy_swapped(&ensemble, &ops, optimum.theta_star, 0.0)?;
    checks.push(CheckRow::at_most(
        "label_swap_extraction",
        swapped.e_extracted,
        0.0,
    ));

    let (_, harmonic_residual) = fit_theta_harmonic(params, 64)?;
    checks.push(CheckRow::at_most(
        "harmonic_fit_residual",
        harmonic_residual,
        tol::ALGEBRAIC,
    ));
    checks.push(CheckRow::at_most(
        "optimum_stationarity",
        optimum.harmonic_coeffs.derivative(optimum.theta_star).abs(),
        tol::DERIVED,
    ));
    let coeffs = optimum.harmonic_coeffs;
    let harmonic_peak =
        coeffs.gamma + (coeffs.alpha * coeffs.alpha + coeffs.beta * coeffs.beta).sqrt();
    checks.push(CheckRow::at_most(
        "optimizer_agreement",
        (optimum.e_b_max - harmonic_peak).abs(),
        tol::DERIVED,
    ));
    checks.push(CheckRow::at_most(
        "e_b_max_negativity",
        (-optimum.e_b_max).max(0.0),
        0.0,
    ));

    let fit = fit_energy_curve(params, 64)?;
    checks.push(CheckRow::at_most(
        "curve_fit_residual",
        fit.max_residual,
        tol::CURVE_MULTI_FREQUENCY,
    ));

    let all_structural_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        units: UNITS.to_string(),
        params,
        checks,
        all_structural_pass,
        formula_rows: formula_audit(params)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli> {
        Cli::try_parse_from(args).map_err(|e| Error::validation(e.to_string()))
    }

    #[test]
    fn parses_each_subcommand() {
        assert!(parse(&["minqet", "simulate", "--h", "1", "--k", "1"]).is_ok());
        assert!(parse(&["minqet", "curve", "--h", "1", "--k", "1", "--samples", "32"]).is_ok());
        assert!(parse(&["minqet", "optimize", "--h", "1", "--k", "1"]).is_ok());
        assert!(parse(&["minqet", "sweep", "--x-min", "0.5", "--x-max", "2", "--n", "5"]).is_ok());
        assert!(parse(&["minqet", "audit", "--h", "1", "--k", "1", "--epsilon", "1e-3"]).is_ok());
        assert!(parse(&["minqet", "verify", "--h", "1", "--k", "1"]).is_ok());
    }

    #[test]
    fn rejects_unknown_flags_and_missing_params() {
        assert!(parse(&["minqet", "optimize", "--h", "1"]).is_err());
        assert!(parse(&["minqet", "optimize", "--h", "1", "--k", "1", "--bogus"]).is_err());
        assert!(parse(&["minqet", "launch"]).is_err());
    }

    #[test]
    fn run_reports_exit_codes() {
        // parse error
        assert_eq!(run(["minqet", "nope"]), 1);
        // validation error from domain checks
        assert_eq!(run(["minqet", "optimize", "--h", "-1", "--k", "1"]), 1);
        // csv refused outside curve and sweep
        assert_eq!(
            run(["minqet", "optimize", "--h", "1", "--k", "1", "--format", "csv"]),
            1
        );
        // help prints to stdout and succeeds
        assert_eq!(run(["minqet", "--help"]), 0);
    }

    #[test]
    fn simulate_defaults_theta_to_the_optimum() {
        let args = SimulateArgs {
            params: ParamArgs { h: 1.0, k: 1.0 },
            theta: None,
            wait: 0.0,
            out: OutputArgs {
                format: Format::Json,
                output: None,
            },
        };
        let report = simulate_report(&args).unwrap();
        let optimum = optimize_theta(ModelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(report.theta, optimum.theta_star);
        assert_eq!(report.e_extracted, optimum.e_b_max);
    }

    #[test]
    fn curve_report_is_ascending_and_anchored_at_zero() {
        let args = CurveArgs {
            params: ParamArgs { h: 1.0, k: 2.0 },
            samples: 17,
            out: OutputArgs {
                format: Format::Csv,
                output: None,
            },
        };
        let report = curve_report(&args).unwrap();
        assert_eq!(report.samples.len(), 17);
        assert_eq!(report.samples[0].t, 0.0);
        assert!(report.samples[0].energy_b.abs() < 1e-12);
        assert!(report
            .samples
            .windows(2)
            .all(|w| w[0].t < w[1].t));
        let last = report.samples.last().unwrap();
        assert!((last.t - 4.0 * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn verify_report_passes_structurally_at_reference_params() {
        let report = verify_report(ModelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert!(report.all_structural_pass);
        assert_eq!(report.checks.len(), 15);
        for check in &report.checks {
            assert!(check.pass, "{} = {}", check.name, check.value);
        }
        assert_eq!(report.formula_rows.len(), 5);
        let eb = report
            .formula_rows
            .iter()
            .find(|r| r.quantity == "E_B")
            .unwrap();
        assert!(eb.matches);
    }
}
