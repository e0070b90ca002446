use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by model construction, quadrature and trace processing.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical parameter is out of its admissible range.
    #[error("invalid parameter `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// k_p = k_c makes the velocity acceptance unbounded.
    #[error("degenerate wavelengths: k_p = k_c = {k} rad/m, velocity acceptance is unbounded")]
    DegenerateWavelengths { k: f64 },

    /// The wavefunction denominator collapsed below representable magnitude.
    #[error("singular wavefunction denominator at v = {velocity} m/s (|den| = {magnitude:.3e})")]
    SingularDenominator { velocity: f64, magnitude: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("velocity integral did not converge after {subdivisions} subdivisions (last {last}, previous {previous}){}", tau_context(.tau_index))]
    ConvergenceFailure {
        subdivisions: usize,
        /// Final estimate.
        last: Complex64,
        /// Estimate before the final refinement sweep.
        previous: Complex64,
        /// Index into the τ grid, when raised from a trace evaluation.
        tau_index: Option<usize>,
    },

    /// Kernel step too coarse for the requested jitter width.
    #[error("jitter kernel undersampled: t_step = {t_step:.3e} s exceeds fwhm/3 = {limit:.3e} s")]
    KernelUndersampled { t_step: f64, limit: f64 },

    /// Peak normalization of a trace without a positive maximum.
    #[error("cannot normalize trace: maximum value is {max}")]
    Normalization { max: f64 },

    /// The trace never falls below half maximum on one side of the grid.
    #[error("half-maximum crossing not bracketed on the {side} side of the grid")]
    WidthUnbounded { side: &'static str },

    /// A velocity grid that is not strictly increasing.
    #[error("velocity grid must be strictly increasing (violated at index {index})")]
    GridNotIncreasing { index: usize },
}

fn tau_context(idx: &Option<usize>) -> String {
    match idx {
        Some(j) => format!(" at tau index {j}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach the τ-grid index to a convergence failure raised inside a trace.
    pub(crate) fn with_tau_index(self, index: usize) -> Self {
        match self {
            Error::ConvergenceFailure {
                subdivisions,
                last,
                previous,
                ..
            } => Error::ConvergenceFailure {
                subdivisions,
                last,
                previous,
                tau_index: Some(index),
            },
            other => other,
        }
    }
}
