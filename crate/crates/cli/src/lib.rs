//! `cvqml` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cvqml::encoders::{
    displace_vacuum, iqp_encode, iqp_phases, squeeze_vacuum, DisplacementParams, SqueezeParams,
};
use cvqml::fock::quadrature_variances;
use cvqml::harness::{format_report, run_grid, write_report, ExperimentConfig, PreprocessSpec};
use cvqml::pipeline::{
    cumulative, elbow_index, load_churn_csv, pca_fit, preprocess, undersample, LabeledDataset,
    Standardizer,
};

#[derive(Debug, Parser)]
#[command(name = "cvqml", version, about = "Quantum data encodings and a classical churn benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment grid described by a config file.
    Run(RunArgs),
    /// Print the preprocessing report: correlations, VIFs, class balance.
    InspectData(DataArgs),
    /// Encode a value or row and print the resulting probabilities.
    Encode(EncodeArgs),
    /// Print the explained-variance curve and the detected elbow.
    Elbow(DataArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `data` in the config.
    #[arg(long, env = "CVQML_DATA")]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Run a single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long, env = "CVQML_DATA")]
    data: Option<PathBuf>,
    /// Take the drop profile and blank policy from this config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the balancing sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Displacement,
    Squeezing,
    Iqp,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, conflicts_with = "values", allow_negative_numbers = true)]
    value: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
    /// Truncation dimension; defaults to 30 (displacement) or 60 (squeezing).
    #[arg(long)]
    fock_dim: Option<usize>,
    /// Photon-number probabilities to print per mode.
    #[arg(long, default_value_t = 5)]
    probs: usize,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut out = std::io::stdout().lock();
    match dispatch(cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut impl Write) -> Result<()> {
    match cmd {
        Command::Run(a) => run(a, out),
        Command::InspectData(a) => inspect(a, out),
        Command::Encode(a) => encode(a, out),
        Command::Elbow(a) => elbow(a, out),
    }
}

fn run(a: RunArgs, out: &mut impl Write) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&a.config)?;
    if let Some(d) = a.data {
        cfg.data = Some(d);
    }
    if let Some(o) = a.out {
        cfg.out = o;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(s) = a.seed {
        cfg.seeds = vec![s];
    }
    if cfg.data.is_none() {
        bail!("no data file: set `data` in the config, pass --data or set CVQML_DATA");
    }
    let result = run_grid(&cfg)?;
    let paths = write_report(&result, &cfg.out)?;
    write!(out, "{}", format_report(&result))?;
    writeln!(out)?;
    for p in paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

fn load(a: &DataArgs) -> Result<(LabeledDataset, PreprocessSpec, String)> {
    let spec = match &a.config {
        Some(p) => ExperimentConfig::from_file(p)?.preprocess,
        None => PreprocessSpec::default(),
    };
    let path: &Path = a
        .data
        .as_deref()
        .context("no data file: pass --data or set CVQML_DATA")?;
    let (ds, report) = load_churn_csv(path, &spec.load)?;
    let summary = format!(
        "file: {}\nrows read: {} (blank TotalCharges: {} dropped, {} imputed)",
        path.display(),
        report.rows_read,
        report.blank_rows_dropped,
        report.blank_cells_imputed
    );
    Ok((ds, spec, summary))
}

fn inspect(a: DataArgs, out: &mut impl Write) -> Result<()> {
    let (ds, spec, summary) = load(&a)?;
    writeln!(out, "{summary}")?;
    let (encoded, report) = preprocess(&ds, &spec.drop)?;
    writeln!(out, "{report}")?;
    let bal = undersample(&encoded, a.seed)?;
    let (pos, neg) = bal.class_counts();
    writeln!(out, "balanced (seed {}): {} rows ({pos} / {neg})", a.seed, bal.rows())?;
    Ok(())
}

fn elbow(a: DataArgs, out: &mut impl Write) -> Result<()> {
    let (ds, spec, summary) = load(&a)?;
    writeln!(out, "{summary}")?;
    let (encoded, _) = preprocess(&ds, &spec.drop)?;
    let x = encoded.to_feature_matrix()?;
    let z = Standardizer::fit(&x).transform(&x)?;
    let ratios = pca_fit(&z, 1)?.full_variance_ratio;
    let cum = cumulative(&ratios);
    writeln!(out, "component,ratio,cumulative")?;
    for (i, (r, c)) in ratios.iter().zip(&cum).enumerate() {
        writeln!(out, "{},{r:.6},{c:.6}", i + 1)?;
    }
    let k = elbow_index(&ratios)? + 1;
    writeln!(out, "elbow: {k} components (cumulative {}; reference 23)", cum[k - 1])?;
    Ok(())
}

fn fmt_probs(p: &[f64]) -> String {
    p.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
}

fn short(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn encode(a: EncodeArgs, out: &mut impl Write) -> Result<()> {
    let values = match (a.value, a.values) {
        (Some(v), None) => vec![v],
        (None, Some(v)) if !v.is_empty() => v,
        _ => bail!("pass --value X or --values X1,X2,..."),
    };
    if a.probs == 0 {
        bail!("--probs must be at least 1");
    }
    match a.method {
        Method::Displacement | Method::Squeezing => {
            let squeeze = matches!(a.method, Method::Squeezing);
            let dim = a.fock_dim.unwrap_or(if squeeze { 60 } else { 30 });
            if a.probs > dim {
                bail!("--probs {} exceeds the truncation dimension {dim}", a.probs);
            }
            for x in values {
                let state = if squeeze {
                    squeeze_vacuum(SqueezeParams::real(x)?, dim)?
                } else {
                    displace_vacuum(DisplacementParams::real(x), dim)?
                };
                let p = state.probabilities();
                writeln!(out, "x = {x} (fock dim {dim})")?;
                writeln!(out, "P(0..{}) = {}", a.probs - 1, fmt_probs(&p[..a.probs]))?;
                let (vx, vp) = quadrature_variances(&state)?;
                writeln!(out, "Var(x) = {vx:.6}, Var(p) = {vp:.6}")?;
            }
        }
        Method::Iqp => {
            let n = values.len();
            let phases = iqp_phases(&values, n)?;
            let state = iqp_encode(&values, n)?;
            let labels: Vec<String> = (0..1usize << n).map(|z| format!("{z:0n$b}")).collect();
            writeln!(
                out,
                "phases: {}",
                phases.phases.iter().map(|&v| short(v)).collect::<Vec<_>>().join(", ")
            )?;
            writeln!(out, "basis:  {}", labels.join(", "))?;
            writeln!(out, "probabilities:")?;
            for (l, p) in labels.iter().zip(state.probabilities()) {
                writeln!(out, "  |{l}> {p:.6}")?;
            }
        }
    }
    Ok(())
}
