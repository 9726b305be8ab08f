use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::{
    roundtrip::{roundtrip, RoundtripOptions},
    Command, JobSpec, ReportFormat, EXIT_FORWARD, EXIT_INVERSE, EXIT_OK, EXIT_RIEMANN, EXIT_USAGE, EXIT_VALIDATION,
    THREADS_ENV,
};
use crate::characterize::{check_index, full_report};
use crate::error::{Error, Stage};
use crate::forward::{diagonal_identity_error, forward, kernel_estimate_ratio, ForwardOptions};
use crate::io;
use crate::marchenko::{extract_data_from_f, invert, ExtractionOptions, InversionConfig};
use crate::model::{BoundState, MomentumGrid, ValidationReport};
use crate::riemann::{solve_riemann, verify_factorization, RiemannOptions};

const K_MAX: f64 = 200.0;
const DK: f64 = 0.05;

struct Failure {
    code: i32,
    message: String,
}

type Outcome = std::result::Result<(i32, String), Failure>;

fn stage_code(err: &Error, default: i32) -> i32 {
    match err.stage() {
        Some(Stage::Forward) => EXIT_FORWARD,
        Some(Stage::Riemann) => EXIT_RIEMANN,
        Some(Stage::Validation) => EXIT_VALIDATION,
        Some(_) => EXIT_INVERSE,
        None => default,
    }
}

fn fail(default: i32) -> impl Fn(Error) -> Failure {
    move |e| Failure {
        code: stage_code(&e, default),
        message: e.to_string(),
    }
}

/// Unreadable or malformed input is a usage error.
fn bad_input(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let text = e.to_string();
        let shown = path.display().to_string();
        Failure {
            code: EXIT_USAGE,
            message: if text.contains(&shown) { text } else { format!("{shown}: {text}") },
        }
    }
}

fn thread_count(job: &JobSpec) -> std::result::Result<Option<usize>, Failure> {
    if job.threads.is_some() {
        return Ok(job.threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure {
                code: EXIT_USAGE,
                message: format!("{THREADS_ENV} must be a positive integer, got '{v}'"),
            }),
        },
        Err(_) => Ok(None),
    }
}

/// Executes the job on a dedicated worker pool. Prints a one-line summary to
/// stdout, diagnostics to stderr, and returns the exit code.
pub fn run(job: &JobSpec) -> i32 {
    let outcome = thread_count(job).and_then(|threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Failure {
                code: EXIT_USAGE,
                message: format!("cannot start worker pool: {e}"),
            })?;
        pool.install(|| execute(job))
    });
    match outcome {
        Ok((code, summary)) => {
            println!("{summary}");
            code
        }
        Err(f) => {
            eprintln!("halfline: {}", f.message);
            f.code
        }
    }
}

fn execute(job: &JobSpec) -> Outcome {
    std::fs::create_dir_all(&job.out_dir).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot create {}: {e}", job.out_dir.display()),
    })?;
    match job.command {
        Command::Forward => run_forward(job),
        Command::Invert => run_invert(job),
        Command::Extract => run_extract(job),
        Command::Riemann => run_riemann(job),
        Command::Validate => run_validate(job),
        Command::Roundtrip => run_roundtrip(job),
    }
}

fn out(job: &JobSpec, name: &str) -> PathBuf {
    job.out_dir.join(name)
}

fn kgrid(job: &JobSpec, code: i32) -> std::result::Result<MomentumGrid, Failure> {
    MomentumGrid::with_spacing(job.grid.k_max.unwrap_or(K_MAX), job.grid.dk.unwrap_or(DK)).map_err(fail(code))
}

/// `key,value` rows from a JSON tree, keys joined with dots.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::Number(n) => {
            let text = match (n.as_i64(), n.as_f64()) {
                (Some(i), _) => i.to_string(),
                (None, Some(f)) => io::fmt_f64(f),
                _ => n.to_string(),
            };
            rows.push((prefix.to_string(), text));
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> crate::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>.json` or `<stem>.csv` and returns the path.
fn write_report<T: Serialize>(job: &JobSpec, stem: &str, report: &T) -> crate::Result<PathBuf> {
    match job.format {
        ReportFormat::Json => {
            let path = out(job, &format!("{stem}.json"));
            io::write_json(&path, report)?;
            Ok(path)
        }
        ReportFormat::Csv => {
            let path = out(job, &format!("{stem}.csv"));
            let mut rows = Vec::new();
            flatten("", &serde_json::to_value(report)?, &mut rows);
            write_rows(&path, &["key", "value"], rows.into_iter().map(|(k, v)| vec![k, v]))?;
            Ok(path)
        }
    }
}

fn write_validation(job: &JobSpec, report: &ValidationReport) -> crate::Result<PathBuf> {
    match job.format {
        ReportFormat::Json => write_report(job, "report", report),
        ReportFormat::Csv => {
            let path = out(job, "report.csv");
            let rows = report.entries.iter().map(|e| {
                vec![
                    e.name.clone(),
                    e.passed.to_string(),
                    io::fmt_f64(e.measured),
                    io::fmt_f64(e.tolerance),
                    e.detail.clone(),
                ]
            });
            write_rows(&path, &["name", "passed", "measured", "tolerance", "detail"], rows)?;
            Ok(path)
        }
    }
}

#[derive(Serialize)]
struct ForwardBoundState {
    kappa: f64,
    s: f64,
    c_regular: f64,
    relative_difference: f64,
}

#[derive(Serialize)]
struct ForwardReport {
    bound_states: Vec<ForwardBoundState>,
    f_at_zero: f64,
    resonance: bool,
    index: Option<i64>,
    phase_oddness: f64,
    jost_tail_deviation: f64,
    jost_reflection_deviation: f64,
    kernel_estimate_ratio: Option<f64>,
}

fn run_forward(job: &JobSpec) -> Outcome {
    let q = io::read_potential(&job.input).map_err(bad_input(&job.input))?;
    let options = ForwardOptions {
        kgrid: kgrid(job, EXIT_FORWARD)?,
        compute_kernel: job.write_kernel,
        row_k_step: 0.0,
        ..ForwardOptions::default()
    };
    let res = forward(&q, &options).map_err(fail(EXIT_FORWARD))?;
    let w = fail(EXIT_FORWARD);
    io::write_scattering(&out(job, "scattering.json"), &res.sd).map_err(&w)?;
    let ks = options.kgrid.nodes();
    io::write_csv(
        &out(job, "phase_shift.csv"),
        &["k", "delta"],
        ks.iter().zip(&res.delta.values).map(|(k, d)| vec![*k, *d]),
    )
    .map_err(&w)?;
    io::write_csv(
        &out(job, "jost.csv"),
        &["k", "f_re", "f_im", "fprime_re", "fprime_im"],
        (0..ks.len()).map(|i| {
            let (f, fp) = (res.jost.f0[i], res.jost.fprime0[i]);
            vec![ks[i], f.re, f.im, fp.re, fp.im]
        }),
    )
    .map_err(&w)?;
    if let Some(a) = &res.kernel {
        io::write_kernel(&out(job, "kernel.csv"), a, job.kernel_stride).map_err(&w)?;
    }
    let (_, index) = check_index(&res.sd, &job.thresholds);
    let report = ForwardReport {
        bound_states: res
            .norming
            .iter()
            .map(|c| ForwardBoundState {
                kappa: c.kappa,
                s: c.s,
                c_regular: c.c_regular,
                relative_difference: c.relative_difference,
            })
            .collect(),
        f_at_zero: res.bound_states.f_at_zero,
        resonance: res.bound_states.resonance,
        index,
        phase_oddness: res.delta.oddness,
        jost_tail_deviation: res.jost.tail_deviation(),
        jost_reflection_deviation: res.jost.reflection_deviation(),
        kernel_estimate_ratio: res.kernel.as_ref().map(|a| kernel_estimate_ratio(a, &q)),
    };
    write_report(job, "forward_report", &report).map_err(&w)?;
    let index = index.map_or("undetermined".to_string(), |i| i.to_string());
    Ok((
        EXIT_OK,
        format!(
            "forward: {} bound state(s), index {index}, resonance {} -> {}",
            res.sd.bound_state_count(),
            res.bound_states.resonance,
            job.out_dir.display()
        ),
    ))
}

#[derive(Serialize)]
struct KernelDiagnostics {
    a_00: f64,
    kernel_sup: f64,
    kernel_estimate_ratio: f64,
    diagonal_identity_error: f64,
    f_imag_residual: f64,
    richardson: bool,
    validation: Option<ValidationReport>,
}

fn inversion_config(job: &JobSpec) -> InversionConfig {
    let d = InversionConfig::default();
    InversionConfig {
        x_max: job.grid.x_max.unwrap_or(d.x_max),
        dx: job.grid.dx.unwrap_or(d.dx),
        k_max: job.grid.k_max.unwrap_or(d.k_max),
        dk: job.grid.dk.unwrap_or(d.dk),
        richardson: job.richardson,
        force: job.force,
        thresholds: job.thresholds,
        ..d
    }
}

fn run_invert(job: &JobSpec) -> Outcome {
    let sd = io::read_scattering(&job.input).map_err(bad_input(&job.input))?;
    let config = inversion_config(job);
    let inv = invert(&sd, &config).map_err(fail(EXIT_INVERSE))?;
    let w = fail(EXIT_INVERSE);
    io::write_potential(&out(job, "potential.csv"), &inv.potential).map_err(&w)?;
    io::write_kernel(&out(job, "kernel.csv"), &inv.kernel, job.kernel_stride).map_err(&w)?;
    io::write_f_data(&out(job, "marchenko_f.csv"), &inv.f).map_err(&w)?;
    let kernel_sup = (0..inv.kernel.grid().len())
        .flat_map(|i| inv.kernel.row(i).iter().copied())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let diag = KernelDiagnostics {
        a_00: inv.kernel.get(0, 0),
        kernel_sup,
        kernel_estimate_ratio: kernel_estimate_ratio(&inv.kernel, &inv.potential),
        diagonal_identity_error: diagonal_identity_error(&inv.kernel, &inv.potential),
        f_imag_residual: inv.f.imag_residual,
        richardson: config.richardson,
        validation: inv.report.clone(),
    };
    write_report(job, "kernel_diagnostics", &diag).map_err(&w)?;
    Ok((
        EXIT_OK,
        format!(
            "invert: q on [0, {}] with dx {}, A(0,0) = {:.6e}, max|q| = {:.6e} -> {}",
            config.x_max,
            config.dx,
            diag.a_00,
            inv.potential.max_abs(),
            job.out_dir.display()
        ),
    ))
}

#[derive(Serialize)]
struct ExtractionReport {
    bound_states: Vec<BoundState>,
    jump: f64,
    remainder: f64,
    s_zero_sign: i8,
}

fn run_extract(job: &JobSpec) -> Outcome {
    let f = io::read_f_data(&job.input).map_err(bad_input(&job.input))?;
    let d = ExtractionOptions::default();
    let options = ExtractionOptions {
        window_fraction: job.window_fraction.unwrap_or(d.window_fraction),
        ..d
    };
    let ex = extract_data_from_f(&f, &kgrid(job, EXIT_INVERSE)?, &options).map_err(fail(EXIT_INVERSE))?;
    let w = fail(EXIT_INVERSE);
    io::write_scattering(&out(job, "scattering.json"), &ex.sd).map_err(&w)?;
    let report = ExtractionReport {
        bound_states: ex.sd.bound_states().to_vec(),
        jump: ex.jump,
        remainder: ex.remainder,
        s_zero_sign: ex.sd.s_at_zero_sign(),
    };
    write_report(job, "extraction_report", &report).map_err(&w)?;
    let states: Vec<String> = report
        .bound_states
        .iter()
        .map(|b| format!("({:.6}, {:.6})", b.kappa, b.s))
        .collect();
    Ok((
        EXIT_OK,
        format!("extract: bound states [{}], jump {:.6e} -> {}", states.join(", "), ex.jump, job.out_dir.display()),
    ))
}

fn run_riemann(job: &JobSpec) -> Outcome {
    let sd = io::read_scattering(&job.input).map_err(bad_input(&job.input))?;
    let options = RiemannOptions {
        kappa_shift: job.kappa_shift,
        tail_correction: job.tail_correction,
    };
    let riemann = fail(EXIT_RIEMANN);
    let sol = solve_riemann(&sd, &options).map_err(&riemann)?;
    let report = verify_factorization(&sol, &sd).map_err(&riemann)?;
    let ks = sol.kgrid.nodes();
    io::write_csv(
        &out(job, "jost_boundary.csv"),
        &["k", "f_re", "f_im", "phi_re", "phi_im"],
        (0..ks.len()).map(|i| vec![ks[i], sol.f0[i].re, sol.f0[i].im, sol.phi_plus[i].re, sol.phi_plus[i].im]),
    )
    .map_err(&riemann)?;
    write_report(job, "factorization_report", &report).map_err(&riemann)?;
    Ok((
        EXIT_OK,
        format!(
            "riemann: {:?} case, index {}, relation residual {:.3e} -> {}",
            sol.case,
            sol.index,
            report.relation_residual,
            job.out_dir.display()
        ),
    ))
}

fn run_validate(job: &JobSpec) -> Outcome {
    let sd = io::read_scattering(&job.input).map_err(bad_input(&job.input))?;
    let report = full_report(&sd, &job.thresholds);
    write_validation(job, &report).map_err(fail(EXIT_VALIDATION))?;
    for e in report.entries.iter().filter(|e| !e.passed) {
        eprintln!("halfline: {} failed: {}", e.name, e.detail);
    }
    let (code, verdict) = if report.passed {
        (EXIT_OK, "pass".to_string())
    } else {
        (EXIT_VALIDATION, format!("fail ({})", report.failed().join(", ")))
    };
    Ok((code, format!("validate: {verdict} -> {}", job.out_dir.display())))
}

fn run_roundtrip(job: &JobSpec) -> Outcome {
    let q = io::read_potential(&job.input).map_err(bad_input(&job.input))?;
    let mut inversion = inversion_config(job);
    inversion.x_max = job.grid.x_max.unwrap_or(inversion.x_max.min(q.grid().x_max()));
    inversion.dx = job.grid.dx.unwrap_or(q.grid().step());
    let options = RoundtripOptions {
        kgrid: kgrid(job, EXIT_FORWARD)?,
        inversion,
        metric: job.potential_metric,
        tolerances: job.tolerances,
    };
    let report = roundtrip(&q, &options).map_err(fail(EXIT_INVERSE))?;
    write_report(job, "roundtrip_report", &report).map_err(fail(EXIT_VALIDATION))?;
    for s in report.stages.iter().filter(|s| !s.passed) {
        eprintln!("halfline: stage {} error {:.3e} exceeds {:.3e}: {}", s.name, s.error, s.tolerance, s.detail);
    }
    let worst: Vec<String> = report.stages.iter().map(|s| format!("{} {:.2e}", s.name, s.error)).collect();
    let code = if report.passed { EXIT_OK } else { EXIT_VALIDATION };
    Ok((
        code,
        format!(
            "roundtrip: {} [{}] -> {}",
            if report.passed { "pass" } else { "fail" },
            worst.join(", "),
            job.out_dir.display()
        ),
    ))
}
