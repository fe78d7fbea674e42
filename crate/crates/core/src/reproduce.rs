//! Regenerates the data behind the kernel, decay-rate and spectrum figures
//! as CSV files plus a `manifest.json` describing every file.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};

use crate::dynamics::{decompose_initial, InitialState, ModeDecomposition};
use crate::error::{Error, Result};
use crate::geometry::{collinear_config, equilateral_config, AtomConfig};
use crate::kernels;
use crate::modes::{build_coupling_matrix, eigenmodes, line_scan, ModeSet, ModelParams};
use crate::output;
use crate::spectrum::{find_peaks, total_spectrum, DetuningGrid, SpectrumSeries};

/// Step 0.01; wide enough for the broad line of the 0.07 triangle near δ = +16.2.
pub const DEFAULT_DETUNING_MIN: f64 = -20.0;
pub const DEFAULT_DETUNING_MAX: f64 = 20.0;
pub const DEFAULT_DETUNING_POINTS: usize = 4001;

pub const FIG3_X12: [f64; 4] = [0.05, 0.1, 0.2, 0.5];
pub const FIG5_SIDES: [f64; 4] = [0.07, 0.1, 0.2, 0.5];
pub const FIG6_X12: f64 = 0.1;
pub const FIG6_X23: [f64; 4] = [0.1, 0.2, 0.4, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig5,
    Fig6,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig5" => Ok(Figure::Fig5),
            "fig6" => Ok(Figure::Fig6),
            other => Err(Error::domain(format!("unknown figure `{other}`"))),
        }
    }
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

/// Modes and mode weights for a configuration and initial state.
pub fn prepare(
    config: &AtomConfig,
    params: &ModelParams,
    state: &InitialState,
) -> Result<(ModeSet, ModeDecomposition)> {
    let modes = eigenmodes(&build_coupling_matrix(config, params)?)?;
    let decomp = decompose_initial(&modes, state)?;
    Ok((modes, decomp))
}

/// Total spectrum on the default figure grid, normalized to unit peak.
pub fn figure_spectrum(config: &AtomConfig, state: &InitialState) -> Result<SpectrumSeries> {
    let (modes, decomp) = prepare(config, &ModelParams::default(), state)?;
    let grid = DetuningGrid::uniform(DEFAULT_DETUNING_MIN, DEFAULT_DETUNING_MAX, DEFAULT_DETUNING_POINTS)?;
    Ok(total_spectrum(config, &modes, &decomp, &grid)?.normalized())
}

/// `x ∈ {0.01, 0.02, …, 2}` for `η ∈ {0, π/4, π/2}`, grouped by angle.
pub fn kernel_curves() -> Result<Vec<kernels::KernelValue>> {
    let mut out = Vec::new();
    for eta in [0.0, FRAC_PI_4, FRAC_PI_2] {
        for k in 1..=200 {
            out.push(kernels::evaluate(k as f64 * 0.01, eta)?);
        }
    }
    Ok(out)
}

/// `x23 ∈ {0.001, 0.002, …, 1}`.
pub fn fig3_grid() -> Vec<f64> {
    (1..=1000).map(|k| k as f64 * 1e-3).collect()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn spectrum_entry(dir: &Path, name: String, config: &AtomConfig, params: Value) -> Result<(PathBuf, Value)> {
    let series = figure_spectrum(config, &InitialState::excited(config.len(), 0)?)?;
    let (path, w) = create(dir, &name)?;
    output::write_spectrum_csv(w, &series)?;
    let entry = json!({
        "file": name,
        "parameters": params,
        "initial": "e1",
        "detuning": {"min": DEFAULT_DETUNING_MIN, "max": DEFAULT_DETUNING_MAX, "points": DEFAULT_DETUNING_POINTS},
        "normalization": "peak",
        "peaks": output::peaks_json(&find_peaks(&series)),
    });
    Ok((path, entry))
}

/// Writes one figure's CSV files and `manifest.json` into `dir`.
pub fn reproduce(figure: Figure, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    match figure {
        Figure::Fig2 => {
            let name = "fig2_kernels.csv".to_string();
            let (path, w) = create(dir, &name)?;
            output::write_kernels_csv(w, &kernel_curves()?)?;
            written.push(path);
            entries.push(
                json!({"file": name, "x": {"min": 0.01, "max": 2.0, "step": 0.01}, "eta": [0.0, FRAC_PI_4, FRAC_PI_2]}),
            );
        }
        Figure::Fig3 => {
            let grid = fig3_grid();
            for x12 in FIG3_X12 {
                let scan = line_scan(x12, &grid, FRAC_PI_2, &ModelParams::default())?;
                let name = format!("fig3_x12_{x12}.csv");
                let (path, w) = create(dir, &name)?;
                output::write_scan_csv(w, &scan)?;
                written.push(path);
                entries.push(json!({"file": name, "x12": x12, "eta": FRAC_PI_2, "x23": {"min": grid[0], "max": grid[grid.len() - 1], "points": grid.len()}}));
            }
        }
        Figure::Fig5 => {
            for side in FIG5_SIDES {
                let name = format!("fig5_side_{side}.csv");
                let (path, entry) = spectrum_entry(
                    dir,
                    name,
                    &equilateral_config(side)?,
                    json!({"preset": "equilateral", "side": side}),
                )?;
                written.push(path);
                entries.push(entry);
            }
        }
        Figure::Fig6 => {
            for (label, eta) in [("90", FRAC_PI_2), ("0", 0.0)] {
                for x23 in FIG6_X23 {
                    let name = format!("fig6_eta_{label}_x23_{x23}.csv");
                    let params = json!({"preset": "collinear", "x12": FIG6_X12, "x23": x23, "eta": eta});
                    let (path, entry) = spectrum_entry(dir, name, &collinear_config(FIG6_X12, x23, eta)?, params)?;
                    written.push(path);
                    entries.push(entry);
                }
            }
        }
    }
    let manifest = json!({
        "figure": figure.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "gamma_eg": 1.0,
        "delta_eg": 0.0,
        "files": entries,
    });
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}
