//! Plot-ready CSV emission.
//!
//! All numeric output uses 17 significant digits (`{:.16e}`), fixed column
//! order and `\n` line endings, so reruns are byte-identical and oracle
//! comparisons against the files stay meaningful.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{SweepSurface, WidthReport};
use crate::trace::RealTrace;
use crate::wavefunction::VelocityDecomposition;

const NS: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

/// `tau_ns,<column>` rows of a real trace.
pub fn write_real_trace_csv<W: Write>(
    out: &mut W,
    trace: &RealTrace,
    value_column: &str,
) -> std::io::Result<()> {
    writeln!(out, "tau_ns,{value_column}")?;
    for (j, v) in trace.values.iter().enumerate() {
        writeln!(out, "{},{}", fmt(trace.grid.value(j) / NS), fmt(*v))?;
    }
    Ok(())
}

/// `v_mps,weighted_amplitude,phase_rad` rows of a velocity decomposition.
pub fn write_decomposition_csv<W: Write>(
    out: &mut W,
    decomposition: &VelocityDecomposition,
) -> std::io::Result<()> {
    writeln!(out, "v_mps,weighted_amplitude,phase_rad")?;
    for j in 0..decomposition.velocities.len() {
        writeln!(
            out,
            "{},{},{}",
            fmt(decomposition.velocities[j]),
            fmt(decomposition.weighted_amplitude[j]),
            fmt(decomposition.phase[j]),
        )?;
    }
    Ok(())
}

/// Long-form `lambda_c_nm,tau_ns,g2` rows; failed rows contribute nothing.
pub fn write_sweep_long_csv<W: Write>(out: &mut W, surface: &SweepSurface) -> std::io::Result<()> {
    writeln!(out, "lambda_c_nm,tau_ns,g2")?;
    for row in &surface.rows {
        if let Some(values) = &row.values {
            let lambda_nm = fmt(row.lambda_c / NS);
            for (j, v) in values.iter().enumerate() {
                writeln!(out, "{},{},{}", lambda_nm, fmt(surface.grid.value(j) / NS), fmt(*v))?;
            }
        }
    }
    Ok(())
}

/// Per-row width summary of a sweep, ready for JSON serialization.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRowSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowSummary {
    pub lambda_c_nm: f64,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_tau_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepSummary {
    pub fn from_surface(surface: &SweepSurface) -> Self {
        let rows = surface
            .rows
            .iter()
            .map(|row| SweepRowSummary {
                lambda_c_nm: row.lambda_c / NS,
                degenerate: row.degenerate,
                fwhm_ns: row.width.map(|w| w.fwhm / NS),
                peak_tau_ns: row.width.map(|w| w.peak_tau / NS),
                error: row.error.clone(),
            })
            .collect();
        Self { rows }
    }
}

/// Width report with times restated in nanoseconds, for the JSON output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WidthReportNs {
    pub fwhm_ns: f64,
    pub peak_tau_ns: f64,
    pub peak_value: f64,
    pub left_crossing_ns: f64,
    pub right_crossing_ns: f64,
}

impl From<&WidthReport> for WidthReportNs {
    fn from(w: &WidthReport) -> Self {
        Self {
            fwhm_ns: w.fwhm / NS,
            peak_tau_ns: w.peak_tau / NS,
            peak_value: w.peak_value,
            left_crossing_ns: w.left_crossing / NS,
            right_crossing_ns: w.right_crossing / NS,
        }
    }
}
