use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use polyfock::coherent::{theta_closed, theta_series, CoherentLabel, SeriesControl};
use polyfock::fockbasis::{h_eval, kernel, BasisForm, BasisIndex};
use polyfock::orthopoly::PolyIndex;
use polyfock::transform::{
    forward_grid, AnalyticSignal, PhaseSpaceGrid, SampledSignal, Signal, TransformConfig,
};
use polyfock::verify::{self, CheckStatus, VerifyConfig};
use serde::Deserialize;

mod parse;

#[derive(Parser)]
#[command(
    name = "polyfock",
    version,
    about = "Extended Bargmann transforms and their special functions"
)]
struct Cli {
    /// Worker threads for grid commands and verification.
    #[arg(long, global = true, env = "POLYFOCK_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the complex Hermite polynomial h_{m,p}.
    Basis {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        /// Single point, e.g. 1.5-2i.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex, conflicts_with = "grid", required_unless_present = "grid")]
        at: Option<Complex64>,
        /// re:min:max:count,im:min:max:count
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<PhaseSpaceGrid>,
        #[arg(long, value_enum, default_value_t = FormArg::Sum)]
        form: FormArg,
    },
    /// Apply B_m to a signal on a grid of z values and write CSV.
    Transform {
        #[arg(long)]
        m: usize,
        /// CSV file with header xi,re,im.
        #[arg(long, conflicts_with = "signal", required_unless_present = "signal")]
        input: Option<PathBuf>,
        /// hermite:q, hermite:q1,q2,... or gaussian:mu,sigma
        #[arg(long)]
        signal: Option<AnalyticSignal>,
        /// re:min:max:count,im:min:max:count
        #[arg(long, allow_hyphen_values = true, default_value = "re:0:0:1,im:0:0:1")]
        grid: PhaseSpaceGrid,
        /// Gauss-Hermite order of the line quadrature.
        #[arg(long, default_value_t = 64)]
        line_order: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the coherent state of level m at z.
    Coherent {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        z: Complex64,
        /// min:max:count
        #[arg(long, allow_hyphen_values = true, value_parser = parse::range)]
        xi: parse::Samples,
        /// Also sum the series form and report the difference.
        #[arg(long)]
        compare_series: bool,
        #[arg(long, default_value_t = 600)]
        max_terms: usize,
        #[arg(long, default_value_t = 1e-16)]
        tail_tol: f64,
    },
    /// Evaluate the reproducing kernel K_m(z, w).
    Kernel {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        z: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        w: Complex64,
    },
    /// Run the identity checks and emit a JSON report.
    Verify {
        #[arg(long, default_value_t = VerifyConfig::default().max_m)]
        max_m: usize,
        #[arg(long, default_value_t = VerifyConfig::default().max_p)]
        max_p: usize,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Report path; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Glob over check names.
        #[arg(long)]
        only: Option<String>,
        /// Leave runtime_ms null so reports are byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Sum,
    Laguerre,
    #[value(name = "1f1")]
    Hyp1f1,
    All,
}

impl FormArg {
    fn forms(self) -> Vec<(&'static str, BasisForm)> {
        match self {
            Self::Sum => vec![("", BasisForm::FiniteSum)],
            Self::Laguerre => vec![("", BasisForm::LaguerreForm)],
            Self::Hyp1f1 => vec![("", BasisForm::Hyp1F1Form)],
            Self::All => vec![
                ("sum_", BasisForm::FiniteSum),
                ("laguerre_", BasisForm::LaguerreForm),
                ("1f1_", BasisForm::Hyp1F1Form),
            ],
        }
    }
}

type Failure = (u8, String);

/// Comma-joined shortest round-trip forms, with `-0.0` printed as `0.0`.
fn row(cells: &[f64]) -> String {
    let parts: Vec<String> = cells.iter().map(|x| format!("{:?}", x + 0.0)).collect();
    parts.join(",")
}

fn usage(e: impl std::fmt::Display) -> Failure {
    (2, e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("polyfock: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("polyfock: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Basis {
            m,
            p,
            at,
            grid,
            form,
        } => basis(m, p, at, grid, form),
        Command::Transform {
            m,
            input,
            signal,
            grid,
            line_order,
            output,
        } => transform(m, input, signal, grid, line_order, output),
        Command::Coherent {
            m,
            z,
            xi,
            compare_series,
            max_terms,
            tail_tol,
        } => coherent(m, z, xi.0, compare_series, max_terms, tail_tol),
        Command::Kernel { m, z, w } => {
            let v = kernel(PolyIndex::new(m).map_err(usage)?, z, w).value();
            let mut out = io::stdout().lock();
            writeln!(out, "re,im").map_err(usage)?;
            writeln!(out, "{}", row(&[v.re, v.im])).map_err(usage)?;
            Ok(0)
        }
        Command::Verify {
            max_m,
            max_p,
            tol_scale,
            report,
            only,
            no_timing,
        } => run_verify(
            VerifyConfig {
                max_m,
                max_p,
                tol_scale,
                only,
                timing: !no_timing,
                ..VerifyConfig::default()
            },
            report,
        ),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn basis(
    m: usize,
    p: usize,
    at: Option<Complex64>,
    grid: Option<PhaseSpaceGrid>,
    form: FormArg,
) -> Result<u8, Failure> {
    let idx = BasisIndex::new(m, p).map_err(usage)?;
    let points = match (at, grid) {
        (Some(z), _) => vec![z],
        (None, Some(g)) => g.points(),
        (None, None) => unreachable!("clap requires --at or --grid"),
    };
    let forms = form.forms();
    let mut header = vec!["re_z".to_string(), "im_z".to_string()];
    for (prefix, _) in &forms {
        header.push(format!("{prefix}re"));
        header.push(format!("{prefix}im"));
    }
    if forms.len() > 1 {
        header.push("max_deviation".into());
    }
    let mut out = io::stdout().lock();
    let mut write = |line: String| writeln!(out, "{line}").map_err(usage);
    write(header.join(","))?;
    for z in points {
        let values: Vec<Complex64> = forms.iter().map(|&(_, f)| h_eval(idx, z, f)).collect();
        let mut cells = vec![z.re, z.im];
        for v in &values {
            cells.extend([v.re, v.im]);
        }
        if values.len() > 1 {
            let mut dev: f64 = 0.0;
            for (i, a) in values.iter().enumerate() {
                for b in &values[i + 1..] {
                    dev = dev.max((a - b).norm());
                }
            }
            cells.push(dev);
        }
        write(row(&cells))?;
    }
    Ok(0)
}

#[derive(Deserialize)]
struct SignalRow {
    xi: f64,
    re: f64,
    im: f64,
}

fn read_signal(path: &Path) -> Result<SampledSignal, Failure> {
    let fail = |e: &dyn std::fmt::Display| usage(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| fail(&e))?;
    let header = reader.headers().map_err(|e| fail(&e))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["xi", "re", "im"] {
        return Err(fail(&"header must be xi,re,im"));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<SignalRow>() {
        let row = row.map_err(|e| fail(&e))?;
        xs.push(row.xi);
        values.push(Complex64::new(row.re, row.im));
    }
    SampledSignal::new(xs, values).map_err(|e| fail(&e))
}

fn transform(
    m: usize,
    input: Option<PathBuf>,
    signal: Option<AnalyticSignal>,
    grid: PhaseSpaceGrid,
    line_order: usize,
    output: Option<PathBuf>,
) -> Result<u8, Failure> {
    let cfg = TransformConfig::with_line_order(m, line_order).map_err(usage)?;
    let f: Box<dyn Signal> = match (input, signal) {
        (Some(path), _) => Box::new(read_signal(&path)?),
        (None, Some(s)) => Box::new(s),
        (None, None) => unreachable!("clap requires --input or --signal"),
    };
    let rows = forward_grid(f.as_ref(), &cfg, &grid);
    let mut out = sink(output.as_deref())?;
    let mut write = |line: String| writeln!(out, "{line}").map_err(usage);
    write("re_z,im_z,re_F,im_F,status".into())?;
    for p in rows {
        let line = match p.result {
            Ok(v) => format!(
                "{},{}",
                row(&[p.z.re, p.z.im, v.value.re, v.value.im]),
                v.status()
            ),
            Err(e) => format!(
                "{},,,error: {}",
                row(&[p.z.re, p.z.im]),
                e.to_string().replace(',', ";")
            ),
        };
        write(line)?;
    }
    out.flush().map_err(usage)?;
    Ok(0)
}

fn coherent(
    m: usize,
    z: Complex64,
    xi: Vec<f64>,
    compare: bool,
    max_terms: usize,
    tail_tol: f64,
) -> Result<u8, Failure> {
    let label = CoherentLabel::new(z, m).map_err(usage)?;
    let ctrl = SeriesControl::new(max_terms, tail_tol).map_err(usage)?;
    let mut out = io::stdout().lock();
    let mut write = |line: String| writeln!(out, "{line}").map_err(usage);
    write(
        if compare {
            "xi,re,im,series_re,series_im,delta"
        } else {
            "xi,re,im"
        }
        .into(),
    )?;
    let mut truncated = false;
    for x in xi {
        let v = theta_closed(label, x);
        let mut cells = vec![x, v.re, v.im];
        if compare {
            let s = theta_series(label, x, ctrl);
            truncated |= !s.converged;
            cells.extend([s.value.re, s.value.im, (s.value - v).norm()]);
        }
        write(row(&cells))?;
    }
    if truncated {
        eprintln!("polyfock: warning: series hit the {max_terms}-term budget before its tail test");
    }
    Ok(0)
}

fn run_verify(cfg: VerifyConfig, report_path: Option<PathBuf>) -> Result<u8, Failure> {
    let report = verify::run(&cfg).map_err(usage)?;
    let mut out = sink(report_path.as_deref())?;
    writeln!(out, "{}", report.to_json()).map_err(usage)?;
    out.flush().map_err(usage)?;
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Passed => "PASS",
            CheckStatus::Failed => "FAIL",
            CheckStatus::Excluded => "----",
        };
        let err = c.max_error.map_or("-".to_string(), |e| format!("{e:.3e}"));
        eprintln!(
            "{status} {:<22} max_error={err} tolerance={:.1e}",
            c.name, c.tolerance
        );
    }
    eprintln!("overall: {}", if report.passed { "pass" } else { "fail" });
    Ok(if report.passed { 0 } else { 1 })
}
