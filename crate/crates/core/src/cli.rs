//! Command-line front end: `simulate`, `shots`, `soft`, `fringe`, `verify`.
//!
//! Exit codes: 0 success, 1 diagnostics or validation failure, 2 a `verify`
//! residual over tolerance.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dsl::parse_layout;
use crate::fock::FockError;
use crate::interferometer::{fringe_scan, propagate_analytic, run_shots, DetectorId, Layout, LayoutError};
use crate::soft::{
    corrected_probabilities, fermion_factor_readings, mean_photons, pollution_probability, weinberg_factor_fermion,
    weinberg_factor_general, PollutionConfig, ProcessLeg, SoftError, SoftWindow,
};
use crate::verify::{run_suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;

/// Velocity at which both readings of the fermion factor are reported.
pub const DISCREPANCY_BETA: f64 = 0.9999;

pub const SIMULATE_SCHEMA: &str = include_str!("../schema/simulate.schema.json");
pub const SHOTS_SCHEMA: &str = include_str!("../schema/shots.schema.json");
pub const SOFT_SCHEMA: &str = include_str!("../schema/soft.schema.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}: layout has errors")]
    Diagnostics(PathBuf),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Soft(#[from] SoftError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{path}: {source}")]
    Legs {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("writing output: {0}")]
    Output(std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ifm", version, about = "Interaction-free measurement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact detection probabilities for a layout.
    Simulate {
        layout: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Seeded Monte Carlo detector clicks.
    Shots {
        layout: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, env = "IFM_SEED", default_value_t = 0)]
        seed: u64,
        /// Per-batch tallies as CSV.
        #[arg(long)]
        batch_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Low-energy photon emission and detector pollution.
    Soft {
        #[arg(long, required_unless_present = "legs", allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        e_minus: f64,
        #[arg(long, allow_negative_numbers = true)]
        e_plus: f64,
        #[arg(long, allow_negative_numbers = true)]
        solid_angle: f64,
        /// JSON file with `legs` and `pairwise_beta` for a general process.
        #[arg(long)]
        legs: Option<PathBuf>,
        /// Coupling multiplying A in μ. 1 quotes μ in units of e².
        #[arg(long, default_value_t = 1.0)]
        e_squared: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Detection probabilities against a length change of one arm.
    Fringe {
        layout: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Operator-identity and geometry checks against fixed tolerances.
    Verify {
        #[arg(long, default_value_t = crate::fock::DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Legs file for `soft --legs`.
#[derive(Debug, Deserialize)]
pub struct LegsFile {
    pub legs: Vec<ProcessLeg>,
    pub pairwise_beta: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct SimulateRow {
    p_d1: f64,
    p_d2: f64,
    p_absorbed: f64,
    momentum_d1_x: f64,
    momentum_d1_y: f64,
    momentum_d1_z: f64,
    momentum_d2_x: f64,
    momentum_d2_y: f64,
    momentum_d2_z: f64,
    amplitude_d1_re: f64,
    amplitude_d1_im: f64,
    amplitude_d2_re: f64,
    amplitude_d2_im: f64,
}

/// Parses `argv` (program name first), runs the subcommand, and returns the
/// process exit code.
pub fn run_cli<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch<O: Write, E: Write>(cmd: Command, out: &mut O, err: &mut E) -> Result<i32, CliError> {
    match cmd {
        Command::Simulate { layout, out: o } => {
            let layout = load_layout(&layout, err)?;
            let text = simulate_output(&layout, o.format.unwrap_or(Format::Json))?;
            emit(&text, o.output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Shots {
            layout,
            n,
            seed,
            batch_csv,
            out: o,
        } => {
            let layout = load_layout(&layout, err)?;
            let run = run_shots(&layout, n, seed)?;
            if let Some(path) = batch_csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["batch", "d1", "d2", "absorbed"])?;
                for (i, b) in run.batches.iter().enumerate() {
                    w.write_record([i.to_string(), b.d1.to_string(), b.d2.to_string(), b.absorbed.to_string()])?;
                }
                write_file(&path, &csv_bytes(w)?)?;
            }
            let c = run.counts;
            let text = match o.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({
                    "n_shots": n,
                    "seed": seed,
                    "d1": c.d1,
                    "d2": c.d2,
                    "absorbed": c.absorbed,
                    "batches": run.batches.len(),
                }))?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["n_shots", "seed", "d1", "d2", "absorbed"])?;
                    w.write_record([n, seed, c.d1, c.d2, c.absorbed].map(|x| x.to_string()))?;
                    csv_bytes(w)?
                }
            };
            emit(&text, o.output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Soft {
            beta,
            e_minus,
            e_plus,
            solid_angle,
            legs,
            e_squared,
            out: o,
        } => {
            let legs = match legs {
                None => None,
                Some(path) => {
                    let text = read_file(&path)?;
                    let parsed: LegsFile =
                        serde_json::from_str(&text).map_err(|source| CliError::Legs { path, source })?;
                    Some(parsed)
                }
            };
            let input = SoftInput {
                beta,
                e_minus,
                e_plus,
                solid_angle,
                e_squared,
                legs,
            };
            let text = soft_output(&input, o.format.unwrap_or(Format::Json))?;
            emit(&text, o.output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Fringe {
            layout,
            min,
            max,
            steps,
            out: o,
        } => {
            let layout = load_layout(&layout, err)?;
            let points = fringe_scan(&layout, min, max, steps)?;
            let text = match o.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for p in &points {
                        w.serialize(p)?;
                    }
                    csv_bytes(w)?
                }
                Format::Json => pretty(&points)?,
            };
            emit(&text, o.output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Verify { n_max, tol_scale, out: o } => {
            let cfg = VerifyConfig {
                n_max,
                tol_scale,
                ..VerifyConfig::default()
            };
            let results = run_suite(&cfg)?;
            let text = match o.format {
                Some(Format::Json) => pretty(&results)?,
                Some(Format::Csv) => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for r in &results {
                        w.serialize(r)?;
                    }
                    csv_bytes(w)?
                }
                None => {
                    let mut s = String::new();
                    for r in &results {
                        let tag = if r.passed { "PASS" } else { "FAIL" };
                        s.push_str(&format!(
                            "{tag}  {:<44} residual {:.3e}  tolerance {:.1e}\n",
                            r.name, r.residual, r.tolerance
                        ));
                    }
                    s
                }
            };
            emit(&text, o.output.as_deref(), out)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                let _ = writeln!(err, "verify: {failed} of {} checks over tolerance", results.len());
                return Ok(EXIT_TOLERANCE);
            }
            Ok(EXIT_OK)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit<O: Write>(text: &str, path: Option<&Path>, out: &mut O) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(CliError::Output),
    }
}

fn pretty<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits the utf-8 it was given"))
}

/// Reads and parses a `.ifm` file, printing every diagnostic to `err`.
pub fn load_layout<E: Write>(path: &Path, err: &mut E) -> Result<Layout, CliError> {
    let text = read_file(path)?;
    let doc = parse_layout(&text);
    for d in &doc.diagnostics {
        let _ = writeln!(err, "{}:{d}", path.display());
    }
    doc.layout.ok_or_else(|| CliError::Diagnostics(path.to_owned()))
}

/// `simulate` output. Amplitudes are quoted with the common propagation
/// phase removed.
pub fn simulate_output(layout: &Layout, format: Format) -> Result<String, CliError> {
    let r = propagate_analytic(layout)?;
    let a1 = r.relative_amplitude(DetectorId::D1);
    let a2 = r.relative_amplitude(DetectorId::D2);
    match format {
        Format::Json => pretty(&json!({
            "p_d1": r.p_d1,
            "p_d2": r.p_d2,
            "p_absorbed": r.p_absorbed,
            "momentum_d1": r.momentum_d1.as_array(),
            "momentum_d2": r.momentum_d2.as_array(),
            "amplitude_d1_re": a1.re,
            "amplitude_d1_im": a1.im,
            "amplitude_d2_re": a2.re,
            "amplitude_d2_im": a2.im,
            "reference_phase_re": r.reference_phase.re,
            "reference_phase_im": r.reference_phase.im,
            "events": r.events.iter().map(|e| json!({
                "arm": e.arm.to_string(),
                "position": [e.position.x, e.position.y, e.position.z],
                "absorbed_weight": e.absorbed_weight,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let [m1x, m1y, m1z] = r.momentum_d1.as_array();
            let [m2x, m2y, m2z] = r.momentum_d2.as_array();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(SimulateRow {
                p_d1: r.p_d1,
                p_d2: r.p_d2,
                p_absorbed: r.p_absorbed,
                momentum_d1_x: m1x,
                momentum_d1_y: m1y,
                momentum_d1_z: m1z,
                momentum_d2_x: m2x,
                momentum_d2_y: m2y,
                momentum_d2_z: m2z,
                amplitude_d1_re: a1.re,
                amplitude_d1_im: a1.im,
                amplitude_d2_re: a2.re,
                amplitude_d2_im: a2.im,
            })?;
            csv_bytes(w)
        }
    }
}

#[derive(Debug)]
pub struct SoftInput {
    pub beta: Option<f64>,
    pub e_minus: f64,
    pub e_plus: f64,
    pub solid_angle: f64,
    pub e_squared: f64,
    pub legs: Option<LegsFile>,
}

/// `soft` output: emission factor, mean photon number, pollution, the
/// bomb-case table with pollution folded in, and both readings of the
/// fermion factor near β = 1.
pub fn soft_output(input: &SoftInput, format: Format) -> Result<String, CliError> {
    let window = SoftWindow::new(input.e_minus, input.e_plus)?;
    let config = PollutionConfig::new(input.solid_angle)?;
    let a = match (&input.legs, input.beta) {
        (Some(f), _) => weinberg_factor_general(&f.legs, &f.pairwise_beta)?,
        (None, Some(beta)) => weinberg_factor_fermion(beta)?,
        (None, None) => unreachable!("clap requires --beta or --legs"),
    };
    if !(input.e_squared > 0.0) {
        return Err(SoftError::NegativeFactor(input.e_squared).into());
    }
    let mu = mean_photons(a * input.e_squared, &window)?;
    let pollution = pollution_probability(mu, &config)?;
    let bomb = Layout::square().with_obstruction("lower", 1.0)?;
    let corrected = corrected_probabilities(&propagate_analytic(&bomb)?, pollution)?;
    let (printed, dropped) = fermion_factor_readings(DISCREPANCY_BETA)?;

    match format {
        Format::Json => pretty(&json!({
            "beta": input.beta,
            "e_minus": input.e_minus,
            "e_plus": input.e_plus,
            "solid_angle": input.solid_angle,
            "e_squared": input.e_squared,
            "weinberg_a_e2": a,
            "log_ratio": window.log_ratio(),
            "mu": mu,
            "pollution": pollution,
            "corrected": corrected,
            "high_velocity_readings": {
                "beta": DISCREPANCY_BETA,
                "with_two_pi_squared": printed,
                "without_two_pi_squared": dropped,
            },
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value"])?;
            let rows: [(&str, f64); 17] = [
                ("beta", input.beta.unwrap_or(f64::NAN)),
                ("e_minus", input.e_minus),
                ("e_plus", input.e_plus),
                ("solid_angle", input.solid_angle),
                ("e_squared", input.e_squared),
                ("weinberg_a_e2", a),
                ("mu", mu),
                ("pollution", pollution),
                ("corrected_p_d1", corrected.p_d1),
                ("corrected_p_d2", corrected.p_d2),
                ("corrected_p_absorbed", corrected.p_absorbed),
                ("corrected_absorbed_with_d1", corrected.absorbed_with_d1),
                ("corrected_absorbed_with_d2", corrected.absorbed_with_d2),
                ("corrected_absorbed_only", corrected.absorbed_only),
                ("high_velocity_beta", DISCREPANCY_BETA),
                ("high_velocity_with_two_pi_squared", printed),
                ("high_velocity_without_two_pi_squared", dropped),
            ];
            for (k, v) in rows {
                w.write_record([k.to_string(), v.to_string()])?;
            }
            csv_bytes(w)
        }
    }
}
