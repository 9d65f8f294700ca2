// Copyright 2026 the wheelbks developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Command-line front end. Every subcommand is a thin adapter over the
//! library: machine-readable payload on stdout (or to `--out`), a short
//! human summary on the other channel, errors on stderr.
//!
//! Exit codes: 0 success, 1 usage, 2 data, 3 numerical.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::analysis::{
    pairs_csv, propagate, report_csv, reproduce_with_source, sig6, write_report, DataSetTable,
    Method, PropagationConfig,
};
use crate::error::{AnalysisError, QalgError, SimError, WeakValueError, WheelError};
use crate::interfsim::{analyze_bundle, reference_config, simulate_bundle, SimBundle};
use crate::qalg::SpinState;
use crate::weakval::{forbidden_projector_wv, witness_c, BasisIndex, WeakValue};
use crate::wheel::{
    build_wheel, prove_no_nchv_exhaustive, prove_no_nchv_gf2, verify_context_products, ContextKind,
    Gf2Outcome, WheelSet, EXHAUSTIVE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "wheelbks",
    version,
    about = "Wheel BKS sets, pre/postselected weak values, contextuality witnesses, and the interferometric weak-measurement pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    FirstOrder,
    MonteCarlo,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::FirstOrder => Method::FirstOrder,
            MethodArg::MonteCarlo => Method::MonteCarlo,
        }
    }
}

#[derive(clap::Args)]
struct PropagationArgs {
    /// Uncertainty propagation scheme.
    #[arg(long, value_enum, default_value = "first-order")]
    method: MethodArg,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Seed for stochastic propagation.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Worker threads for Monte Carlo resampling.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl PropagationArgs {
    fn config(&self) -> PropagationConfig {
        PropagationConfig {
            method: self.method.into(),
            mc_samples: self.samples,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct the N-spin Wheel set and print its observables by context.
    WheelBuild {
        /// Number of spins (odd, >= 3).
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Write the payload here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multiply out every ring and spoke of a set and check the signs.
    WheelVerify {
        /// Build and verify the N-spin set.
        #[arg(long, conflicts_with = "data")]
        n: Option<usize>,
        /// Verify a serialized set instead.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Prove that no noncontextual value assignment fits the set.
    NchvProve {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weak value of forbidden projector j from measured data sets 1..=N.
    WeakValue {
        #[arg(long)]
        n: usize,
        /// Basis index in 0..2^(N-1).
        #[arg(long, default_value_t = 0)]
        j: u64,
        /// Evaluate at the ideal point Z_w = i instead of measured data.
        #[arg(long)]
        ideal: bool,
        /// Single-spin table csv (defaults to WHEEL_DATA_DIR, then bundled).
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        prop: PropagationArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contextuality witness C over data sets 1..=N.
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ideal: bool,
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        prop: PropagationArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one full interferometric acquisition (fringes, blocked
    /// beams, orthogonal-analyzer backgrounds).
    Simulate {
        #[arg(long, default_value_t = 15.0)]
        alpha_deg: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a recorded acquisition bundle and extract the spin weak value.
    Extract {
        /// Bundle json produced by `simulate`.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild every published quantity from the measured table.
    Reproduce {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Report directory (report.csv, report.json, fig1_pairs.csv,
        /// fig3a..d.svg).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        prop: PropagationArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

/// A failed subcommand, classified for the exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<WheelError> for Failure {
    fn from(e: WheelError) -> Failure {
        match e {
            WheelError::BadSize(_) | WheelError::ExhaustiveCapExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            WheelError::MalformedSet(_) | WheelError::Json(_) => Failure::Data(e.to_string()),
            WheelError::Algebra(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<WeakValueError> for Failure {
    fn from(e: WeakValueError) -> Failure {
        match e {
            WeakValueError::BadSpinCount(_)
            | WeakValueError::IndexOutOfRange { .. }
            | WeakValueError::LengthMismatch { .. } => Failure::Usage(e.to_string()),
            WeakValueError::SingularOverlap { .. } | WeakValueError::IncompleteBasis { .. } => {
                Failure::Numerical(e.to_string())
            }
            WeakValueError::Algebra(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<QalgError> for Failure {
    fn from(e: QalgError) -> Failure {
        Failure::Numerical(e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Failure {
        match e {
            AnalysisError::TooFewSamples { .. } => Failure::Usage(e.to_string()),
            AnalysisError::WeakValue(inner) => inner.into(),
            AnalysisError::WrongRowCount { .. }
            | AnalysisError::BadRow { .. }
            | AnalysisError::NonPositiveSigma { .. }
            | AnalysisError::Io(_) => Failure::Data(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Failure {
        match e {
            SimError::BadAlpha(_) | SimError::BadMeanCounts(_) => Failure::Usage(e.to_string()),
            SimError::EmptyChiGrid | SimError::TooFewPoints { .. } | SimError::BadChiSpan { .. } => {
                Failure::Data(e.to_string())
            }
            SimError::FitDidNotConverge { .. }
            | SimError::SingularExtraction(_)
            | SimError::Algebra(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Data(format!("io error: {}", e))
    }
}

/// A closed pipe (`cmd | head`) is the consumer's choice, not an error;
/// swallow it instead of panicking mid-write.
fn pipe_ok(r: std::io::Result<()>) -> Result<(), Failure> {
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Write the machine payload to `--out` or stdout; the human summary goes
/// to stdout when the payload went to a file, stderr otherwise, so stdout
/// stays parseable.
fn emit(out: Option<&PathBuf>, payload: &str, summary: &[String]) -> Result<(), Failure> {
    use std::io::Write;
    match out {
        Some(path) => {
            std::fs::write(path, payload)?;
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for line in summary {
                pipe_ok(writeln!(w, "{}", line))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            pipe_ok(w.write_all(payload.as_bytes()))?;
            if !payload.ends_with('\n') {
                pipe_ok(writeln!(w))?;
            }
            let stderr = std::io::stderr();
            let mut e = stderr.lock();
            for line in summary {
                pipe_ok(writeln!(e, "{}", line))?;
            }
        }
    }
    Ok(())
}

fn complex_summary(label: &str, v: Complex64, sre: f64, sim: f64) -> String {
    format!(
        "{} = {} ± {} + ({} ± {})i",
        label,
        sig6(v.re),
        sig6(sre),
        sig6(v.im),
        sig6(sim)
    )
}

fn wheel_csv(set: &WheelSet) -> String {
    let mut out = String::from("context,kind,label,expected_sign,observables\n");
    for i in 0..set.context_count() {
        let kind = match set.context_kind(i) {
            ContextKind::Ring => "ring",
            ContextKind::Spoke => "spoke",
        };
        let obs: Vec<String> = set
            .context_observables(i)
            .iter()
            .map(|p| p.to_string())
            .collect();
        out.push_str(&format!(
            "{},{},{},{:+},{}\n",
            i,
            kind,
            set.context_label(i),
            set.expected_sign(i),
            obs.join(";")
        ));
    }
    out
}

fn cmd_wheel_build(n: usize, format: FormatArg, out: Option<PathBuf>) -> Result<(), Failure> {
    let set = build_wheel(n)?;
    let payload = match format {
        FormatArg::Json => set.to_json(),
        FormatArg::Csv => wheel_csv(&set),
    };
    let summary = vec![format!(
        "wheel N={}: {} observables in {} contexts",
        n,
        set.observable_count(),
        set.context_count()
    )];
    emit(out.as_ref(), &payload, &summary)
}

fn cmd_wheel_verify(n: Option<usize>, data: Option<PathBuf>) -> Result<(), Failure> {
    let set = match (n, data) {
        (Some(n), None) => build_wheel(n)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)?;
            WheelSet::from_json(&text)?
        }
        _ => {
            return Err(Failure::Usage(
                "wheel-verify needs exactly one of --n or --data".into(),
            ))
        }
    };
    let report = verify_context_products(&set)?;
    let mut lines: Vec<String> = report
        .contexts
        .iter()
        .map(|c| {
            format!(
                "context {} ({}): product {}, expected {}I: {}",
                c.context,
                c.label,
                c.product,
                if c.expected_sign > 0 { "+" } else { "-" },
                if c.ok { "ok" } else { "MISMATCH" }
            )
        })
        .collect();
    if report.all_ok {
        lines.push(format!(
            "all {} context products verified",
            report.contexts.len()
        ));
        emit(None, &lines.join("\n"), &[])
    } else {
        emit(None, &lines.join("\n"), &[])?;
        Err(Failure::Data(
            "context products do not match the declared signs".into(),
        ))
    }
}

fn cmd_nchv_prove(n: usize, format: FormatArg, out: Option<PathBuf>) -> Result<(), Failure> {
    let set = build_wheel(n)?;
    let outcome = prove_no_nchv_gf2(&set)?;
    let exhaustive = if n <= EXHAUSTIVE_CAP {
        Some(prove_no_nchv_exhaustive(&set)?)
    } else {
        None
    };
    let payload = match format {
        FormatArg::Json => {
            let gf2 = match &outcome {
                Gf2Outcome::Inconsistent { certificate } => json!({
                    "outcome": "INCONSISTENT",
                    "certificate": certificate,
                    "certificate_labels": certificate
                        .iter()
                        .map(|&c| set.context_label(c))
                        .collect::<Vec<_>>(),
                }),
                Gf2Outcome::Satisfiable { assignment } => json!({
                    "outcome": "SATISFIABLE",
                    "assignment": assignment.values,
                }),
            };
            let mut doc = json!({ "n": n, "gf2": gf2 });
            if let Some(e) = &exhaustive {
                doc["exhaustive"] = json!({
                    "assignments_checked": e.assignments_checked,
                    "satisfying": e.satisfying,
                    "max_contexts_satisfied": e.max_contexts_satisfied,
                    "context_count": e.context_count,
                });
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        FormatArg::Csv => {
            let mut text = String::new();
            match &outcome {
                Gf2Outcome::Inconsistent { certificate } => {
                    text.push_str("INCONSISTENT\n");
                    for &c in certificate {
                        text.push_str(&format!("certificate,{},{}\n", c, set.context_label(c)));
                    }
                }
                Gf2Outcome::Satisfiable { .. } => text.push_str("SATISFIABLE\n"),
            }
            if let Some(e) = &exhaustive {
                text.push_str(&format!(
                    "exhaustive,{} of {} assignments satisfy all contexts,max simultaneous {} of {}\n",
                    e.satisfying, e.assignments_checked, e.max_contexts_satisfied, e.context_count
                ));
            }
            text
        }
    };
    let summary = vec![match &outcome {
        Gf2Outcome::Inconsistent { certificate } => format!(
            "N={}: no noncontextual assignment exists ({} contexts certify the contradiction)",
            n,
            certificate.len()
        ),
        Gf2Outcome::Satisfiable { .. } => format!("N={}: a noncontextual assignment exists", n),
    }];
    emit(out.as_ref(), &payload, &summary)
}

struct Quantity {
    label: String,
    value: Complex64,
    sigma_re: f64,
    sigma_im: f64,
    method: Option<Method>,
    source: String,
}

fn quantity_payload(n: usize, j: Option<u64>, q: &Quantity, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => {
            let (jh, jv) = match j {
                Some(j) => ("j,", format!("{},", j)),
                None => ("", String::new()),
            };
            format!(
                "n,{}re,re_sigma,im,im_sigma\n{},{}{},{},{},{}\n",
                jh,
                n,
                jv,
                sig6(q.value.re),
                sig6(q.sigma_re),
                sig6(q.value.im),
                sig6(q.sigma_im)
            )
        }
        FormatArg::Json => {
            let mut doc = json!({
                "n": n,
                "re": q.value.re,
                "im": q.value.im,
                "re_sigma": q.sigma_re,
                "im_sigma": q.sigma_im,
                "data": q.source,
            });
            if let Some(j) = j {
                doc["j"] = json!(j);
            }
            if let Some(m) = q.method {
                doc["method"] = json!(m.to_string());
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_quantity(
    n: usize,
    j: Option<u64>,
    ideal: bool,
    data: Option<PathBuf>,
    prop: &PropagationArgs,
    format: FormatArg,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let idx = match j {
        Some(j) => Some(BasisIndex::new(n, j)?),
        None => None,
    };
    let eval = |zw: &[WeakValue]| -> Result<Complex64, WeakValueError> {
        match &idx {
            Some(idx) => forbidden_projector_wv(idx, zw),
            None => witness_c(n, zw),
        }
    };
    let label = match j {
        Some(j) => format!("(Pi_{}^({}))_w", j, n),
        None => format!("C^({})_w", n),
    };
    let q = if ideal {
        let zw = vec![Complex64::new(0.0, 1.0); n];
        let value = eval(&zw)?;
        Quantity {
            label,
            value,
            sigma_re: 0.0,
            sigma_im: 0.0,
            method: None,
            source: "ideal".into(),
        }
    } else {
        let (table, source) = DataSetTable::load(data.as_deref())?;
        if n > table.len() {
            return Err(Failure::Usage(format!(
                "N = {} needs more data sets than the table's {}",
                n,
                table.len()
            )));
        }
        let subset: Vec<usize> = (1..=n).collect();
        let cfg = prop.config();
        let p = propagate(
            |zw| eval(zw).expect("subset length matches N"),
            &table,
            &subset,
            &cfg,
        )?;
        Quantity {
            label,
            value: p.value,
            sigma_re: p.sigma_re,
            sigma_im: p.sigma_im,
            method: Some(cfg.method),
            source,
        }
    };
    let payload = quantity_payload(n, j, &q, format);
    let summary = vec![complex_summary(&q.label, q.value, q.sigma_re, q.sigma_im)];
    emit(out.as_ref(), &payload, &summary)
}

fn bundle_csv(bundle: &SimBundle) -> String {
    let mut out = String::from("mode,chi,count\n");
    let mut rows = |g: &crate::interfsim::Interferogram, tag: &str| {
        for (&chi, &c) in g.chi.iter().zip(&g.counts) {
            out.push_str(&format!("{},{},{}\n", tag, sig6(chi), c));
        }
    };
    rows(&bundle.out_fringe, "OUT");
    rows(&bundle.in_fringe, "IN");
    rows(&bundle.block_p1, "BLOCK_P1");
    rows(&bundle.block_p2, "BLOCK_P2");
    if let Some(g) = &bundle.bg_fringe {
        rows(g, "ORTHOGONAL_BG");
    }
    if let Some(g) = &bundle.bg_block_p1 {
        rows(g, "BG_BLOCK_P1");
    }
    if let Some(g) = &bundle.bg_block_p2 {
        rows(g, "BG_BLOCK_P2");
    }
    out
}

fn cmd_simulate(
    alpha_deg: f64,
    seed: u64,
    format: FormatArg,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut cfg = reference_config(seed);
    cfg.alpha_deg = alpha_deg;
    cfg.subtract_orthogonal_bg = true;
    let (pre, post) = (SpinState::plus_x(), SpinState::plus_y());
    let bundle = simulate_bundle(&cfg, &pre, &post)?;
    let result = analyze_bundle(&bundle, false)?;
    let payload = match format {
        FormatArg::Json => bundle.to_json() + "\n",
        FormatArg::Csv => bundle_csv(&bundle),
    };
    let m = result.measured;
    let summary = vec![
        format!("alpha = {} deg, seed = {}", sig6(alpha_deg), seed),
        complex_summary("Z_w", Complex64::new(m.re, m.im), m.re_sigma, m.im_sigma),
    ];
    emit(out.as_ref(), &payload, &summary)
}

fn cmd_extract(data: PathBuf, format: FormatArg, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&data)?;
    let bundle = SimBundle::from_json(&text)?;
    let result = analyze_bundle(&bundle, false)?;
    let m = result.measured;
    let payload = match format {
        FormatArg::Csv => format!(
            "re,re_sigma,im,im_sigma\n{},{},{},{}\n",
            sig6(m.re),
            sig6(m.re_sigma),
            sig6(m.im),
            sig6(m.im_sigma)
        ),
        FormatArg::Json => {
            let doc = json!({
                "measured": m,
                "in_fit": result.in_fit,
                "out_fit": result.out_fit,
                "alpha_deg": bundle.alpha_deg,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    };
    let summary = vec![complex_summary(
        "Z_w",
        Complex64::new(m.re, m.im),
        m.re_sigma,
        m.im_sigma,
    )];
    emit(out.as_ref(), &payload, &summary)
}

fn cmd_reproduce(
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    prop: &PropagationArgs,
    format: FormatArg,
) -> Result<(), Failure> {
    let (table, source) = DataSetTable::load(data.as_deref())?;
    let cfg = prop.config();
    let report = reproduce_with_source(&table, &cfg, source)?;
    // Summary ratios quote the displayed two-decimal values, matching the
    // convention of the headline numbers.
    let summary: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            let c = (r.witness_re * 100.0).round() / 100.0;
            let s = (r.witness_sigma * 100.0).round() / 100.0;
            format!("N={}: C={:.2}±{:.2} ({:.1}σ)", r.n, c, s, (c / s).abs())
        })
        .collect();
    match out {
        Some(dir) => {
            write_report(&report, &dir)?;
            let mut lines = summary.clone();
            lines.push(format!("report written to {}", dir.display()));
            emit(None, &lines.join("\n"), &[])
        }
        None => {
            let payload = match format {
                FormatArg::Csv => {
                    format!("{}\n{}", report_csv(&report), pairs_csv(&report.pairs))
                }
                FormatArg::Json => {
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&report).expect("report serializes")
                    )
                }
            };
            emit(None, &payload, &summary)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::WheelBuild { n, format, out } => cmd_wheel_build(n, format, out),
        Cmd::WheelVerify { n, data } => cmd_wheel_verify(n, data),
        Cmd::NchvProve { n, format, out } => cmd_nchv_prove(n, format, out),
        Cmd::WeakValue {
            n,
            j,
            ideal,
            data,
            prop,
            format,
            out,
        } => cmd_quantity(n, Some(j), ideal, data, &prop, format, out),
        Cmd::Witness {
            n,
            ideal,
            data,
            prop,
            format,
            out,
        } => cmd_quantity(n, None, ideal, data, &prop, format, out),
        Cmd::Simulate {
            alpha_deg,
            seed,
            format,
            out,
        } => cmd_simulate(alpha_deg, seed, format, out),
        Cmd::Extract { data, format, out } => cmd_extract(data, format, out),
        Cmd::Reproduce {
            data,
            out,
            prop,
            format,
        } => cmd_reproduce(data, out, &prop, format),
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            use std::io::Write;
            let _ = writeln!(std::io::stderr(), "error: {}", f.message());
            f.code()
        }
    }
}

/// Entry point for the binary.
pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}
