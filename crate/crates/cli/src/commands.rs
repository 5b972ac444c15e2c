//! One handler per subcommand.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use qsg_core::composite::{convex_roof, ppt_test, sample_separable, ProductSpace, RoofConfig};
use qsg_core::io::{matrix_to_json, parse_curve, parse_matrix};
use qsg_core::strata::{
    chart_forward, chart_inverse, curve_tangency_report, jacobian_spectrum, stratum_dim, ChartPhi, IndexSet,
    Stratum,
};
use qsg_core::tensors::evaluate;
use qsg_core::{Error, Execution, HermitianMatrix};
use serde_json::json;

use crate::args::{
    ChartArgs, Cli, Command, EntangleCommand, EvalArgs, KahlerCommand, StrataCommand, SystemArgs, TangencyArgs,
    TensorsCommand, VerifyCommand,
};
use crate::batteries::{kahler_battery, verify_all, KahlerSource, VerifyAll, MIN_JACOBIAN_GAP};
use crate::report::{Check, Report};
use crate::{CliError, Outcome};

/// Library errors: numerical breakdowns are failures, everything else
/// points at the named input.
fn lib_err(context: impl fmt::Display) -> impl Fn(Error) -> CliError {
    move |e| match e {
        Error::OptimizerDiverged { .. } | Error::EigenNoConvergence { .. } => {
            CliError::Failure(format!("{context}: {e}"))
        }
        other => CliError::Input(format!("{context}: {other}")),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<HermitianMatrix, CliError> {
    parse_matrix(&read(path)?).map_err(lib_err(path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("finite values serialize")
}

fn execution(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn product_space(system: &SystemArgs, dim: usize, path: &Path) -> Result<ProductSpace, CliError> {
    let n1 = system.n1;
    if n1 == 0 {
        return Err(CliError::Input("--n1 must be >= 1".into()));
    }
    let n2 = system.n2.unwrap_or(dim / n1);
    if n1 * n2 != dim {
        return Err(CliError::Input(format!(
            "{}: dimension {dim} does not match a {n1}x{n2} system",
            path.display()
        )));
    }
    ProductSpace::new(n1, n2).map_err(lib_err("system"))
}

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Tensors(TensorsCommand::Eval(args)) => tensors_eval(args)?,
        Command::Strata(StrataCommand::Chart(args)) => strata_chart(args)?,
        Command::Strata(StrataCommand::Tangency(args)) => strata_tangency(args, execution(cli))?,
        Command::Strata(StrataCommand::Dim { n, k, stratum }) => {
            let d = stratum_dim(*n, *k, Stratum::from(*stratum)).map_err(lib_err("strata dim"))?;
            Outcome::value(d.to_string())
        }
        Command::Kahler(KahlerCommand::Verify { point, trials }) => {
            let xi = load_matrix(point)?;
            let checks = kahler_battery(&KahlerSource::Fixed(xi), *trials, cli.seed, execution(cli))
                .map_err(lib_err(point.display()))?;
            let echo = format!(
                "kahler verify --point {} --seed {} --trials {trials}",
                point.display(),
                cli.seed
            );
            Outcome::report(Report::new(echo, checks, None))
        }
        Command::Entangle(cmd) => entangle(cmd, cli)?,
        Command::Verify(VerifyCommand::All { n, trials, restarts }) => {
            if *n == 0 || *trials == 0 || *restarts == 0 {
                return Err(CliError::Input("--n, --trials and --restarts must be >= 1".into()));
            }
            let cfg = VerifyAll {
                n: *n,
                seed: cli.seed,
                trials: *trials,
                restarts: *restarts,
                execution: execution(cli),
            };
            let checks = verify_all(&cfg).map_err(|e| CliError::Failure(format!("verify all: {e}")))?;
            let echo = format!(
                "verify all --n {n} --seed {} --trials {trials} --restarts {restarts}",
                cli.seed
            );
            Outcome::report(Report::new(echo, checks, None))
        }
    };
    if let Some(report) = &mut outcome.report {
        report.duration_ms = start.elapsed().as_secs_f64() * 1e3;
        outcome.output = report.to_json();
    }
    Ok(outcome)
}

fn tensors_eval(args: &EvalArgs) -> Result<Outcome, CliError> {
    let xi = load_matrix(&args.point)?;
    let a = load_matrix(&args.a)?;
    let b = load_matrix(&args.b)?;
    let value = evaluate(args.kind.into(), &xi, &a, &b).map_err(lib_err("tensors eval"))?;
    Ok(Outcome::value(to_json(&value)))
}

fn strata_chart(args: &ChartArgs) -> Result<Outcome, CliError> {
    let base = load_matrix(&args.base)?;
    let n = base.dim();
    let context = args.base.display();
    let j = IndexSet::from_one_based(&args.j, n).map_err(lib_err(&context))?;
    let chart = ChartPhi::new(base.clone(), j).map_err(lib_err(&context))?;
    let (point, point_name) = match &args.point {
        Some(p) => (load_matrix(p)?, p.display().to_string()),
        None => (base, context.to_string()),
    };
    let y = chart_forward(&chart, &point).map_err(lib_err(&point_name))?;
    let back = chart_inverse(&chart, &y).map_err(lib_err(&point_name))?;
    let round_trip = (&back - &point).max_abs_entry() / point.max_abs_entry().max(1.0);
    let cone = jacobian_spectrum(&chart, Stratum::Cone, args.h).map_err(lib_err(&context))?;
    let density = jacobian_spectrum(&chart, Stratum::Density, args.h).map_err(lib_err(&context))?;
    let mismatches = [&cone, &density]
        .iter()
        .filter(|s| s.numerical_rank != s.expected_rank)
        .count();
    let inverse_gap = (1.0 / cone.gap).max(1.0 / density.gap);
    let checks = vec![
        Check::at_most("chart.round_trip", round_trip, args.tol),
        Check::mismatches("chart.jacobian_rank", mismatches),
        Check::at_most("chart.jacobian_inverse_gap", inverse_gap, 1.0 / MIN_JACOBIAN_GAP),
    ];
    let joined: Vec<String> = args.j.iter().map(|i| i.to_string()).collect();
    let echo = format!("strata chart --base {context} --J {}", joined.join(","));
    let data = json!({
        "n": n,
        "k": chart.k(),
        "J": args.j,
        "coordinates": y.to_real_vector().as_slice(),
        "jacobian": { "cone": cone, "density": density },
    });
    Ok(Outcome::report(Report::new(echo, checks, Some(data))))
}

fn strata_tangency(args: &TangencyArgs, exec: Execution) -> Result<Outcome, CliError> {
    let context = args.curve.display();
    let samples = parse_curve(&read(&args.curve)?).map_err(lib_err(&context))?;
    let stratum = Stratum::from(args.stratum);
    let report = curve_tangency_report(&samples, stratum, args.tol, exec).map_err(lib_err(&context))?;
    let checks = vec![Check::with_pass(
        "tangency.max_residual",
        report.max_residual,
        args.tol,
        report.pass,
    )];
    let echo = format!("strata tangency --curve {context} --stratum {stratum}");
    let data = serde_json::to_value(&report.entries).expect("finite entries serialize");
    Ok(Outcome::report(Report::new(echo, checks, Some(data))))
}

fn entangle(cmd: &EntangleCommand, cli: &Cli) -> Result<Outcome, CliError> {
    match cmd {
        EntangleCommand::Estimate {
            state,
            system,
            restarts,
            max_iter,
        } => {
            let rho = load_matrix(state)?;
            let ps = product_space(system, rho.dim(), state)?;
            let cfg = RoofConfig {
                seed: cli.seed,
                restarts: *restarts,
                max_iter: *max_iter,
                execution: execution(cli),
                ..RoofConfig::default()
            };
            let est = convex_roof(&ps, &rho, &cfg).map_err(lib_err(state.display()))?;
            Ok(Outcome::value(to_json(&est)))
        }
        EntangleCommand::SampleSeparable { n1, n2, terms } => {
            let ps = ProductSpace::new(*n1, *n2).map_err(lib_err("sample-separable"))?;
            let rho = sample_separable(&ps, *terms, cli.seed).map_err(lib_err("sample-separable"))?;
            Ok(Outcome::value(matrix_to_json(&rho)))
        }
        EntangleCommand::Ppt { state, system, tol } => {
            let rho = load_matrix(state)?;
            let ps = product_space(system, rho.dim(), state)?;
            let r = ppt_test(&ps, &rho, *tol).map_err(lib_err(state.display()))?;
            Ok(Outcome::value(to_json(&r)))
        }
    }
}
