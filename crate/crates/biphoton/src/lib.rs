//! Simulator for the collective biphoton temporal waveform of photon pairs
//! generated by spontaneous four-wave mixing in a Doppler-broadened
//! cascade-type atomic ensemble.
//!
//! The second-order cross-correlation between signal and idler photons is
//! obtained by coherently superposing the per-velocity two-photon
//! wavefunction over a Maxwell-Boltzmann velocity distribution:
//!
//! ```text
//! g2_SI(tau) = | Int Psi_v(tau) f(v) dv |^2
//! ```
//!
//! The crate is organized along the processing chain:
//!
//! * [`model`] — cascade system, drive lasers, thermal ensemble, Doppler
//!   kinematics and the velocity-acceptance relation
//! * [`wavefunction`] — the velocity-resolved two-photon wavefunction and
//!   its amplitude/phase decomposition
//! * [`quadrature`] — adaptive Gauss-Legendre panels for the oscillatory
//!   complex velocity integral
//! * [`correlator`] — coherent velocity integration and raw g2 traces
//! * [`detector`] — timing-jitter convolution, peak normalization,
//!   accidental background floor
//! * [`analysis`] — FWHM metrology, coupling-wavelength sweeps and
//!   transition comparisons
//! * [`pipeline`] — the composed raw → convolved → normalized run
//!
//! With the default `parallel` feature, traces and sweeps evaluate their
//! independent points on a rayon pool; results are bitwise identical to
//! the sequential fallback (`--no-default-features`).

pub mod analysis;
pub mod constants;
pub mod correlator;
pub mod detector;
mod error;
mod exec;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod quadrature;
pub mod trace;
pub mod wavefunction;

pub use error::Error;

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub use analysis::{
    compare_transitions, fwhm, sweep_lambda_c, SweepConfig, SweepRow, SweepSurface,
    TransitionComparison, WidthReport,
};
pub use correlator::{
    g2_trace, g2_trace_with_diagnostics, velocity_integral, velocity_integral_detailed,
    QuadratureStats,
};
pub use detector::{
    add_background, convolve, gaussian_kernel, gaussian_kernel_with_support, normalize_peak,
    JitterModel,
};
pub use model::{
    doppler_fwhm, maxwell_boltzmann, most_probable_speed, two_photon_shift, velocity_acceptance,
    CascadeSystem, DriveConfig, Preset, ThermalEnsemble,
};
pub use pipeline::{run_pipeline, BackgroundStage, PipelineConfig, PipelineOutput};
pub use quadrature::QuadratureSpec;
pub use trace::{ComplexTrace, RealTrace, TauGrid};
pub use wavefunction::{decompose, psi_v, VelocityDecomposition, WavefunctionParams};
