//! Waveform metrology and the coupling-wavelength sweep.
//!
//! Width convention: outermost half-maximum crossings, located by linear
//! interpolation between the bracketing samples, measured on whichever
//! trace the caller hands in (the headline numbers use the
//! jitter-convolved, peak-normalized curve).

use serde::Serialize;

use crate::detector::{convolve, normalize_peak, JitterModel};
use crate::exec;
use crate::model::ThermalEnsemble;
use crate::quadrature::QuadratureSpec;
use crate::trace::{RealTrace, TauGrid};
use crate::wavefunction::WavefunctionParams;
use crate::{correlator, Error, Result};

/// Half-maximum crossing report of a single trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthReport {
    /// `right_crossing - left_crossing`, seconds.
    pub fwhm: f64,
    /// τ of the maximum sample, seconds.
    pub peak_tau: f64,
    pub peak_value: f64,
    pub left_crossing: f64,
    pub right_crossing: f64,
}

/// Outermost half-maximum crossings with linear interpolation.
pub fn fwhm(trace: &RealTrace) -> Result<WidthReport> {
    let values = &trace.values;
    let grid = &trace.grid;
    let (peak_idx, &peak_value) = values
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite trace values"))
        .expect("trace has at least two points");
    let half = peak_value / 2.0;

    // outermost crossing on the left: first sample at or above half
    let jl = values.iter().position(|&v| v >= half).expect("peak exists");
    if jl == 0 {
        return Err(Error::WidthUnbounded { side: "left" });
    }
    let left_crossing = interpolate_crossing(
        grid.value(jl - 1),
        values[jl - 1],
        grid.value(jl),
        values[jl],
        half,
    );

    // outermost crossing on the right: last sample at or above half
    let jr = values.len() - 1 - values.iter().rev().position(|&v| v >= half).expect("peak exists");
    if jr == values.len() - 1 {
        return Err(Error::WidthUnbounded { side: "right" });
    }
    let right_crossing = interpolate_crossing(
        grid.value(jr),
        values[jr],
        grid.value(jr + 1),
        values[jr + 1],
        half,
    );

    Ok(WidthReport {
        fwhm: right_crossing - left_crossing,
        peak_tau: grid.value(peak_idx),
        peak_value,
        left_crossing,
        right_crossing,
    })
}

fn interpolate_crossing(t0: f64, v0: f64, t1: f64, v1: f64, half: f64) -> f64 {
    if v1 == v0 {
        // flat segment at half height: take the inner edge
        return t1;
    }
    t0 + (half - v0) / (v1 - v0) * (t1 - t0)
}

/// λ_c range of a sweep; rows are spaced uniformly, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub rows: usize,
}

impl SweepConfig {
    /// Fig-4 style default: 700–1000 nm in 5 nm steps.
    pub fn default_range() -> Self {
        Self {
            lambda_min: 700e-9,
            lambda_max: 1000e-9,
            rows: 61,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda_min.is_finite() || self.lambda_min <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sweep.lambda_min",
                value: self.lambda_min,
                reason: "must be finite and strictly positive",
            });
        }
        if !(self.lambda_max > self.lambda_min) {
            return Err(Error::InvalidParameter {
                name: "sweep.lambda_max",
                value: self.lambda_max,
                reason: "must exceed lambda_min",
            });
        }
        if self.rows < 2 {
            return Err(Error::InvalidParameter {
                name: "sweep.rows",
                value: self.rows as f64,
                reason: "need at least two rows",
            });
        }
        Ok(())
    }

    pub fn lambda_values(&self) -> Vec<f64> {
        let step = (self.lambda_max - self.lambda_min) / (self.rows - 1) as f64;
        (0..self.rows)
            .map(|j| self.lambda_min + j as f64 * step)
            .collect()
    }
}

/// One λ_c row of the sweep: a peak-normalized trace or the failure that
/// prevented it. Rows whose λ_c coincides with λ_p carry the degenerate
/// flag (the velocity acceptance is undefined there, the pipeline itself
/// is still well posed).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda_c: f64,
    pub degenerate: bool,
    pub values: Option<Vec<f64>>,
    pub width: Option<WidthReport>,
    pub error: Option<String>,
}

/// Peak-normalized g² surface over (λ_c, τ).
#[derive(Debug, Clone, Serialize)]
pub struct SweepSurface {
    pub grid: TauGrid,
    pub rows: Vec<SweepRow>,
}

impl SweepSurface {
    /// Row whose λ_c is closest to the requested value.
    pub fn row_near(&self, lambda_c: f64) -> Option<&SweepRow> {
        self.rows.iter().min_by(|a, b| {
            (a.lambda_c - lambda_c)
                .abs()
                .partial_cmp(&(b.lambda_c - lambda_c).abs())
                .expect("finite wavelengths")
        })
    }
}

/// Run the full pipeline (raw trace → jitter convolution → peak
/// normalization) for every λ_c in the sweep range; per-row failures are
/// recorded in the row, not raised.
pub fn sweep_lambda_c(
    sweep: &SweepConfig,
    base_params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    grid: &TauGrid,
    quad: &QuadratureSpec,
    jitter: &JitterModel,
) -> Result<SweepSurface> {
    sweep.validate()?;
    quad.validate()?;
    jitter.validate()?;
    let kernel = jitter.kernel(grid.t_step)?;
    let lambdas = sweep.lambda_values();
    let lambda_p = base_params.drive().lambda_p();

    let rows = exec::map_indexed(lambdas.len(), |j| {
        let lambda_c = lambdas[j];
        let degenerate = lambda_c == lambda_p;
        let outcome = base_params
            .drive()
            .with_lambda_c(lambda_c)
            .map(|drive| WavefunctionParams::new(base_params.system().clone(), drive))
            .and_then(|params| correlator::g2_trace(grid, &params, ensemble, quad))
            .and_then(|raw| normalize_peak(&convolve(&raw, &kernel)));
        match outcome {
            Ok(trace) => {
                let width = fwhm(&trace).ok();
                SweepRow {
                    lambda_c,
                    degenerate,
                    values: Some(trace.values),
                    width,
                    error: None,
                }
            }
            Err(e) => SweepRow {
                lambda_c,
                degenerate,
                values: None,
                width: None,
                error: Some(e.to_string()),
            },
        }
    });

    Ok(SweepSurface { grid: *grid, rows })
}

/// Comparison of two waveform reports, with each trace's τ>0 area share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionComparison {
    pub width_ratio_b_over_a: f64,
    pub peak_tau_a: f64,
    pub peak_tau_b: f64,
    pub positive_area_fraction_a: f64,
    pub positive_area_fraction_b: f64,
}

pub fn compare_transitions(
    report_a: &WidthReport,
    report_b: &WidthReport,
    trace_a: &RealTrace,
    trace_b: &RealTrace,
) -> TransitionComparison {
    TransitionComparison {
        width_ratio_b_over_a: report_b.fwhm / report_a.fwhm,
        peak_tau_a: report_a.peak_tau,
        peak_tau_b: report_b.peak_tau,
        positive_area_fraction_a: trace_a.positive_tau_area_fraction(),
        positive_area_fraction_b: trace_b.positive_tau_area_fraction(),
    }
}
