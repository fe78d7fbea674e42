//! Number formatting and CSV/JSON emission shared by the CLI and the
//! figure harness.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::dynamics::AmplitudeTrajectory;
use crate::error::{Error, Result};
use crate::kernels::KernelValue;
use crate::modes::{ModeSet, ScanResult};
use crate::spectrum::{Peak, SpectrumSeries};

/// Twelve significant digits, shortest of fixed or exponent notation.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}

fn json_num(v: f64) -> Value {
    // re-parse so JSON carries exactly the printed digits
    fmt_num(v).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

fn json_complex(z: Complex64) -> Value {
    json!([json_num(z.re), json_num(z.im)])
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn write_rows<W: Write>(out: W, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv_writer(out);
    let io = |e: csv::Error| Error::InternalConsistency(format!("CSV write failed: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_num)).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InternalConsistency(format!("CSV flush failed: {e}")))?;
    Ok(())
}

pub fn modes_json(modes: &ModeSet, method: &str) -> Value {
    let vectors: Vec<Value> = (0..modes.len())
        .map(|m| Value::Array(modes.eigenvector(m).iter().map(|&z| json_complex(z)).collect()))
        .collect();
    json!({
        "method": method,
        "eigenvalues": modes.eigenvalues().iter().map(|&z| json_complex(z)).collect::<Vec<_>>(),
        "rates": modes.rates().into_iter().map(json_num).collect::<Vec<_>>(),
        "shifts": modes.shifts().into_iter().map(json_num).collect::<Vec<_>>(),
        "eigenvectors": vectors,
        "degeneracy_groups": modes.degeneracy_groups(),
    })
}

pub fn write_modes_csv<W: Write>(out: W, modes: &ModeSet) -> Result<()> {
    let n = modes.len();
    let mut header: Vec<String> = ["mode", "re", "im", "rate", "shift"].map(String::from).to_vec();
    for k in 1..=n {
        header.push(format!("re(b_{k})"));
        header.push(format!("im(b_{k})"));
    }
    let rows = (0..n).map(|m| {
        let z = modes.eigenvalues()[m];
        let mut row = vec![m as f64, z.re, z.im, 2.0 * z.re, z.im];
        for c in modes.eigenvector(m).iter() {
            row.push(c.re);
            row.push(c.im);
        }
        row
    });
    write_rows(out, &header, rows)
}

pub fn write_trajectory_csv<W: Write>(out: W, traj: &AmplitudeTrajectory) -> Result<()> {
    let n = traj.amplitudes.first().map_or(0, |c| c.len());
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("re(C_{k})"));
        header.push(format!("im(C_{k})"));
    }
    header.push("survival".into());
    let rows = traj
        .times
        .iter()
        .zip(&traj.amplitudes)
        .zip(&traj.survival)
        .map(|((&t, c), &s)| {
            let mut row = vec![t];
            for z in c.iter() {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(s);
            row
        });
    write_rows(out, &header, rows)
}

pub fn write_spectrum_csv<W: Write>(out: W, series: &SpectrumSeries) -> Result<()> {
    let rows = series.detunings().iter().zip(&series.values).map(|(&d, &s)| vec![d, s]);
    write_rows(out, &["delta".into(), "S".into()], rows)
}

pub fn write_scan_csv<W: Write>(out: W, scan: &ScanResult) -> Result<()> {
    let mut header = vec![scan.axis.clone()];
    header.extend(scan.columns.iter().cloned());
    let rows = scan
        .values
        .iter()
        .zip(&scan.rows)
        .map(|(&v, r)| std::iter::once(v).chain(r.iter().copied()).collect());
    write_rows(out, &header, rows)
}

pub fn write_kernels_csv<W: Write>(out: W, values: &[KernelValue]) -> Result<()> {
    let rows = values.iter().map(|k| vec![k.x, k.eta, k.d, k.p]);
    write_rows(out, &["x", "eta", "D", "P"].map(String::from), rows)
}

pub fn peaks_json(peaks: &[Peak]) -> Value {
    Value::Array(
        peaks
            .iter()
            .map(|p| json!({"position": json_num(p.position), "height": json_num(p.height), "fwhm": p.fwhm.map(json_num)}))
            .collect(),
    )
}
