//! The five subcommands: integrate, sweep, trace, compare, corpus list.

use std::fs;
use std::io::Write;

use serde::Serialize;

use flannquad::batch;
use flannquad::expr::Integrand;
use flannquad::integrator::TrainedNetwork;
use flannquad::quadrature::{reference, simpson, trapezoid};
use flannquad::trainer::{fit_least_squares, sample_points, train};

use crate::error::CliError;
use crate::fmt::sig12;
use crate::opts::{resolve, CommonOpts, OutputFormat, ResolvedRun, TrainerKind, REF_REL_TOL};
use crate::corpus;

/// Whether training reached its tolerance; non-convergence exits with 2.
pub enum Outcome {
    Success,
    NotConverged,
}

fn outcome(converged: bool) -> Outcome {
    if converged {
        Outcome::Success
    } else {
        Outcome::NotConverged
    }
}

fn emit(run: &ResolvedRun, text: String) -> Result<(), CliError> {
    write_text(run.output.as_deref(), text)
}

fn write_text(path: Option<&std::path::Path>, text: String) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::io("writing to stdout", e))
        }
    }
}

/// Check the integrand is evaluable on the closed interval before training:
/// at both endpoints (the integral is read there) and at every training
/// point. Integrands singular inside [a, b] are improper and refused.
fn preflight(f: &Integrand, a: f64, b: f64, k: usize) -> Result<(), CliError> {
    f.evaluate(a)?;
    f.evaluate(b)?;
    for x in sample_points(a, b, k)? {
        f.evaluate(x)?;
    }
    Ok(())
}

fn obtain_network(
    run: &ResolvedRun,
    trainer: TrainerKind,
) -> Result<(TrainedNetwork, usize, bool), CliError> {
    if let Some(path) = &run.load_model {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let net = TrainedNetwork::from_json(text.trim())?;
        return Ok((net, 0, true));
    }
    let f = run.integrand.as_ref().ok_or_else(|| {
        CliError::Usage("an integrand is required: pass --f, --name, or --load-model".into())
    })?;
    preflight(f, run.a, run.b, run.training.k)?;
    let result = match trainer {
        TrainerKind::Gd => {
            let (net, trace) = train(f, run.a, run.b, &run.training)?;
            (net, trace.iterations_run, trace.converged)
        }
        TrainerKind::Ls => {
            let net = fit_least_squares(f, run.a, run.b, &run.training)?;
            (net, 0, true)
        }
    };
    if let Some(path) = &run.save_model {
        let mut text = result.0.to_json();
        text.push('\n');
        fs::write(path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    Ok(result)
}

/// Query limits: a loaded model supplies its own domain when the flags
/// were omitted.
fn effective_limits(run: &ResolvedRun, net: &TrainedNetwork) -> (f64, f64) {
    if run.a.is_finite() && run.b.is_finite() {
        (run.a, run.b)
    } else {
        net.domain()
    }
}

/// Uniform grid of `steps` points over `(a, b]`, ending exactly at `b`.
fn sweep_grid(a: f64, b: f64, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|j| {
            if j == steps {
                b
            } else {
                a + (b - a) * j as f64 / steps as f64
            }
        })
        .collect()
}

#[derive(Serialize)]
struct IntegrateReport {
    value: f64,
    final_error: f64,
    iterations: usize,
    converged: bool,
}

pub fn cmd_integrate(opts: &CommonOpts) -> Result<Outcome, CliError> {
    let run = resolve(opts)?;
    let (net, iterations, converged) = obtain_network(&run, TrainerKind::Gd)?;
    let (qa, qb) = effective_limits(&run, &net);
    let value = net.integrate(qa, qb)?;
    let report = IntegrateReport {
        value,
        final_error: net.final_error(),
        iterations,
        converged,
    };
    let text = match run.format {
        OutputFormat::Csv => format!(
            "value,final_error,iterations,converged\n{},{},{},{}\n",
            sig12(report.value),
            sig12(report.final_error),
            report.iterations,
            report.converged
        ),
        OutputFormat::Json => to_json_line(&report)?,
    };
    emit(&run, text)?;
    Ok(outcome(converged))
}

#[derive(Serialize)]
struct SweepRow {
    b1: f64,
    flann_value: f64,
    exact_value: f64,
    abs_error: f64,
}

pub fn cmd_sweep(opts: &CommonOpts, steps: usize) -> Result<Outcome, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be at least 2, got {steps}"
        )));
    }
    let run = resolve(opts)?;
    let (net, _, converged) = obtain_network(&run, TrainerKind::Gd)?;
    let f = run.integrand.as_ref().ok_or_else(|| {
        CliError::Usage("sweep needs the integrand for its exact column: pass --f or --name".into())
    })?;
    let (qa, qb) = effective_limits(&run, &net);
    let grid = sweep_grid(qa, qb, steps);
    // rows are independent; evaluated as a batch, emitted in grid order
    let rows: Vec<SweepRow> = batch::try_map(&grid, |&b1| -> Result<SweepRow, CliError> {
        let flann_value = net.integrate(qa, b1)?;
        let exact_value = reference(f, qa, b1, REF_REL_TOL)?.value;
        Ok(SweepRow {
            b1,
            flann_value,
            exact_value,
            abs_error: (flann_value - exact_value).abs(),
        })
    })?;
    let text = match run.format {
        OutputFormat::Csv => {
            let mut out = String::from("b1,flann_value,exact_value,abs_error\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    sig12(r.b1),
                    sig12(r.flann_value),
                    sig12(r.exact_value),
                    sig12(r.abs_error)
                ));
            }
            out
        }
        OutputFormat::Json => to_json_line(&rows)?,
    };
    emit(&run, text)?;
    Ok(outcome(converged))
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    error: f64,
}

pub fn cmd_trace(opts: &CommonOpts) -> Result<Outcome, CliError> {
    let run = resolve(opts)?;
    if run.load_model.is_some() {
        return Err(CliError::Usage(
            "trace reports a training run; --load-model has no trace".into(),
        ));
    }
    let f = run.integrand.as_ref().ok_or_else(|| {
        CliError::Usage("an integrand is required: pass --f or --name".into())
    })?;
    preflight(f, run.a, run.b, run.training.k)?;
    let (net, trace) = train(f, run.a, run.b, &run.training)?;
    if let Some(path) = &run.save_model {
        let mut text = net.to_json();
        text.push('\n');
        fs::write(path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    let text = match run.format {
        OutputFormat::Csv => {
            let mut out = String::with_capacity(trace.errors.len() * 24 + 32);
            out.push_str("iteration,error\n");
            for (i, e) in trace.errors.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, sig12(*e)));
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<TraceRow> = trace
                .errors
                .iter()
                .enumerate()
                .map(|(i, &error)| TraceRow {
                    iteration: i + 1,
                    error,
                })
                .collect();
            to_json_line(&rows)?
        }
    };
    emit(&run, text)?;
    Ok(outcome(trace.converged))
}

#[derive(Serialize)]
struct CompareRow {
    b1: f64,
    exact: f64,
    flann: f64,
    trapezoid: f64,
    simpson: f64,
    flann_err: f64,
    trap_err: f64,
    simpson_err: f64,
}

pub fn cmd_compare(
    opts: &CommonOpts,
    steps: usize,
    trainer: TrainerKind,
) -> Result<Outcome, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be at least 2, got {steps}"
        )));
    }
    let run = resolve(opts)?;
    let (net, _, converged) = obtain_network(&run, trainer)?;
    let f = run.integrand.as_ref().ok_or_else(|| {
        CliError::Usage("compare needs the integrand: pass --f or --name".into())
    })?;
    let (qa, qb) = effective_limits(&run, &net);

    // k training points divide [a,b] into k+1 sub-intervals; Simpson needs
    // an even count, so it gets the next even one.
    let k = run.training.k;
    let m_trap = k + 1;
    let m_simpson = if (k + 1) % 2 == 0 { k + 1 } else { k + 2 };

    let grid = sweep_grid(qa, qb, steps);
    let rows: Vec<CompareRow> = batch::try_map(&grid, |&b1| -> Result<CompareRow, CliError> {
        let exact = reference(f, qa, b1, REF_REL_TOL)?.value;
        let flann = net.integrate(qa, b1)?;
        let trap = trapezoid(f, qa, b1, m_trap)?.value;
        let simp = simpson(f, qa, b1, m_simpson)?.value;
        Ok(CompareRow {
            b1,
            exact,
            flann,
            trapezoid: trap,
            simpson: simp,
            flann_err: flann - exact,
            trap_err: trap - exact,
            simpson_err: simp - exact,
        })
    })?;
    let text = match run.format {
        OutputFormat::Csv => {
            let mut out = format!("# trapezoid_m={m_trap},simpson_m={m_simpson}\n");
            out.push_str("b1,exact,flann,trapezoid,simpson,flann_err,trap_err,simpson_err\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    sig12(r.b1),
                    sig12(r.exact),
                    sig12(r.flann),
                    sig12(r.trapezoid),
                    sig12(r.simpson),
                    sig12(r.flann_err),
                    sig12(r.trap_err),
                    sig12(r.simpson_err)
                ));
            }
            out
        }
        OutputFormat::Json => to_json_line(&rows)?,
    };
    emit(&run, text)?;
    Ok(outcome(converged))
}

#[derive(Serialize)]
struct CorpusRow {
    name: String,
    expression: String,
    a: f64,
    b: f64,
    analytic: Option<f64>,
    note: String,
}

pub fn cmd_corpus_list(
    format: OutputFormat,
    output: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let rows: Vec<CorpusRow> = corpus::entries()
        .into_iter()
        .map(|e| CorpusRow {
            name: e.name.to_string(),
            expression: e.expression.to_string(),
            a: e.a,
            b: e.b,
            analytic: e.analytic,
            note: e.note.to_string(),
        })
        .collect();
    let text = match format {
        OutputFormat::Csv => {
            let mut out = String::from("name,expression,a,b,analytic,note\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.name,
                    r.expression,
                    sig12(r.a),
                    sig12(r.b),
                    r.analytic.map(sig12).unwrap_or_default(),
                    r.note
                ));
            }
            out
        }
        OutputFormat::Json => to_json_line(&rows)?,
    };
    write_text(output, text)?;
    Ok(Outcome::Success)
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Config(format!("serializing output: {e}")))?;
    text.push('\n');
    Ok(text)
}
