use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coopemit::dynamics::{decompose_initial, evolve, uniform_times};
use coopemit::modes::{build_coupling_matrix, eigenmodes, eigenmodes_analytic, eigenmodes_numeric, line_scan};
use coopemit::output;
use coopemit::reproduce::{self, Figure, DEFAULT_DETUNING_MAX, DEFAULT_DETUNING_MIN, DEFAULT_DETUNING_POINTS};
use coopemit::scenario::{parse_initial_arg, Scenario};
use coopemit::spectrum::{directional_spectrum, find_peaks, quadrature_total_spectrum, total_spectrum};
use coopemit::{DetectorDirection, DetuningGrid, Error, ModeSet, ModelParams, Result};

#[derive(Parser)]
#[command(
    name = "coopemit",
    version,
    about = "Cooperative emission of small two-level atom arrays"
)]
struct Cli {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (output directory for `reproduce`); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Analytic,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Peak,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Collective eigenvalues, rates, shifts and eigenvectors.
    Modes {
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Single-excitation amplitudes on a uniform time grid.
    Dynamics {
        /// e1, e2, …, dicke, or a JSON file of [re, im] pairs.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Total or directional emission spectrum.
    Spectrum(SpectrumArgs),
    /// Parameter sweeps.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
    /// Regenerate a figure dataset into the `--out` directory.
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
    },
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    initial: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Detector polar and azimuthal angles, `THETA,PHI` in radians.
    #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
    direction: Option<[f64; 2]>,
    #[arg(long, value_enum, default_value = "peak")]
    normalize: Norm,
    /// Integrate the directional spectrum over the sphere with this order.
    #[arg(long)]
    oracle: Option<usize>,
}

#[derive(Subcommand)]
enum ScanKind {
    /// Collinear sweep of the third atom; rates sorted descending.
    Line {
        #[arg(long)]
        x12: f64,
        /// `START:STOP:STEP`.
        #[arg(long)]
        x23: String,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        eta: f64,
    },
}

fn parse_figure(s: &str) -> std::result::Result<Figure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_angles(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| e.to_string())?;
    match parts[..] {
        [theta, phi] => Ok([theta, phi]),
        _ => Err(format!("expected THETA,PHI, got `{s}`")),
    }
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::domain(format!("bad range `{spec}`: {e}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::domain(format!("range `{spec}` must be START:STOP:STEP")));
    };
    if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(Error::domain(format!(
            "range `{spec}` must satisfy START <= STOP and STEP > 0"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn load_scenario(path: &Option<PathBuf>) -> Result<Scenario> {
    let path = path.as_deref().ok_or_else(|| Error::Scenario {
        path: "--config".into(),
        message: "a scenario file is required".into(),
    })?;
    Scenario::load(path)
}

/// Reformats CSV text as `{"columns": [...], "rows": [[...]]}`.
fn csv_to_json(text: &[u8]) -> Result<Value> {
    let mut reader = csv::Reader::from_reader(text);
    let bad = |e: csv::Error| Error::InternalConsistency(format!("CSV re-read failed: {e}"));
    let columns: Vec<String> = reader.headers().map_err(bad)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let row: Vec<Value> = record
            .map_err(bad)?
            .iter()
            .map(|s| s.parse::<f64>().map(Value::from).unwrap_or(Value::Null))
            .collect();
        rows.push(Value::Array(row));
    }
    Ok(json!({"columns": columns, "rows": rows}))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(path, e))
        }
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| Error::io(Path::new("<stdout>"), e)),
    }
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

/// Writes a table produced by `write`, as CSV or converted to JSON.
fn emit_table(cli: &Cli, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(&cli.out, &buf),
        Format::Json => emit(&cli.out, &json_bytes(&csv_to_json(&buf)?)),
    }
}

fn run_modes(cli: &Cli, method: Option<Method>) -> Result<()> {
    let scenario = load_scenario(&cli.config)?;
    let matrix = build_coupling_matrix(&scenario.config, &scenario.params)?;
    let method = method.unwrap_or(if matrix.n() == 3 {
        Method::Analytic
    } else {
        Method::Numeric
    });
    let (modes, name): (ModeSet, &str) = match method {
        Method::Analytic => (eigenmodes_analytic(&matrix)?, "analytic"),
        Method::Numeric => (eigenmodes_numeric(&matrix)?, "numeric"),
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit(&cli.out, &json_bytes(&output::modes_json(&modes, name))),
        Format::Csv => emit_table(cli, |buf| output::write_modes_csv(buf, &modes)),
    }
}

fn run_dynamics(cli: &Cli, initial: &Option<String>, tmax: Option<f64>, steps: Option<usize>) -> Result<()> {
    let mut scenario = load_scenario(&cli.config)?;
    if let Some(arg) = initial {
        scenario.initial = parse_initial_arg(arg)?;
    }
    let tmax = tmax.or(scenario.times.map(|t| t.tmax)).unwrap_or(10.0);
    let steps = steps.or(scenario.times.map(|t| t.steps)).unwrap_or(1000);
    let state = scenario.initial_state()?;
    let modes = eigenmodes(&build_coupling_matrix(&scenario.config, &scenario.params)?)?;
    let decomp = decompose_initial(&modes, &state)?;
    let traj = evolve(&modes, &decomp, &uniform_times(tmax, steps)?)?;
    emit_table(cli, |buf| output::write_trajectory_csv(buf, &traj))
}

fn run_spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<()> {
    let mut scenario = load_scenario(&cli.config)?;
    if let Some(arg) = &args.initial {
        scenario.initial = parse_initial_arg(arg)?;
    }
    let spec = scenario.detuning;
    let grid = DetuningGrid::uniform(
        args.dmin.or(spec.map(|g| g.min)).unwrap_or(DEFAULT_DETUNING_MIN),
        args.dmax.or(spec.map(|g| g.max)).unwrap_or(DEFAULT_DETUNING_MAX),
        args.points
            .or(spec.map(|g| g.points))
            .unwrap_or(DEFAULT_DETUNING_POINTS),
    )?;
    let direction = args.direction.or(scenario.direction);
    let state = scenario.initial_state()?;
    let (modes, decomp) = reproduce::prepare(&scenario.config, &scenario.params, &state)?;
    let config = &scenario.config;
    let series = match (direction, args.oracle) {
        (Some(_), Some(_)) => return Err(Error::domain("--direction and --oracle are mutually exclusive")),
        (Some([theta, phi]), None) => directional_spectrum(
            config,
            &modes,
            &decomp,
            &DetectorDirection::from_angles(theta, phi),
            &grid,
        )?,
        (None, Some(order)) => {
            let oracle = quadrature_total_spectrum(config, &modes, &decomp, &grid, order)?;
            let closed = total_spectrum(config, &modes, &decomp, &grid)?;
            let scale = closed.max().max(f64::MIN_POSITIVE);
            let dev = oracle
                .values
                .iter()
                .zip(&closed.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / scale;
            eprintln!(
                "quadrature order {order}: max relative deviation from closed form {}",
                output::fmt_num(dev)
            );
            oracle
        }
        (None, None) => total_spectrum(config, &modes, &decomp, &grid)?,
    };
    let series = match args.normalize {
        Norm::Peak => series.normalized(),
        Norm::None => series,
    };
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit_table(cli, |buf| output::write_spectrum_csv(buf, &series)),
        Format::Json => {
            let mut buf = Vec::new();
            output::write_spectrum_csv(&mut buf, &series)?;
            let mut doc = csv_to_json(&buf)?;
            doc["peaks"] = output::peaks_json(&find_peaks(&series));
            emit(&cli.out, &json_bytes(&doc))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Modes { method } => run_modes(cli, *method),
        Command::Dynamics { initial, tmax, steps } => run_dynamics(cli, initial, *tmax, *steps),
        Command::Spectrum(args) => run_spectrum(cli, args),
        Command::Scan {
            kind: ScanKind::Line { x12, x23, eta },
        } => {
            let params = match &cli.config {
                Some(path) => Scenario::load(path)?.params,
                None => ModelParams::default(),
            };
            let scan = line_scan(*x12, &parse_range(x23)?, *eta, &params)?;
            emit_table(cli, |buf| output::write_scan_csv(buf, &scan))
        }
        Command::Reproduce { figure } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(figure.name()));
            for path in reproduce::reproduce(*figure, &dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
