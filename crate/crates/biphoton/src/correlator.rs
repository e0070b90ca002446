//! Coherent velocity integration of Ψ_v(τ)·f(v) and raw g²_SI(τ) traces.

use num_complex::Complex64;

use crate::exec;
use crate::model::{maxwell_boltzmann_unchecked, ThermalEnsemble};
use crate::quadrature::{PanelIntegrator, QuadratureSpec};
pub use crate::quadrature::QuadratureStats;
use crate::trace::{RealTrace, TauGrid};
use crate::wavefunction::WavefunctionParams;
use crate::{Error, Result};

/// ∫ Ψ_v(τ) f(v) dv over ±cutoff·u, adaptively refined around the
/// resonance velocities.
pub fn velocity_integral(
    tau: f64,
    params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    velocity_integral_detailed(tau, params, ensemble, quad).map(|(value, _)| value)
}

/// [`velocity_integral`] plus convergence diagnostics.
pub fn velocity_integral_detailed(
    tau: f64,
    params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    quad: &QuadratureSpec,
) -> Result<(Complex64, QuadratureStats)> {
    quad.validate()?;
    let u = ensemble.u();
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "ensemble.u",
            value: u,
            reason: "velocity averaging needs a positive most-probable speed",
        });
    }
    if tau < 0.0 {
        // integrand vanishes identically
        return Ok((
            Complex64::new(0.0, 0.0),
            QuadratureStats {
                panels: 0,
                subdivisions: 0,
                error_estimate: 0.0,
            },
        ));
    }

    let bound = quad.cutoff_sigmas * u;
    let k_p = params.k_p();
    let coefficient = params.drive().coefficient_c();

    // The constant-in-v envelope e^{-(gamma_21/2) tau} multiplies outside.
    let envelope = (-params.system().gamma_21() / 2.0 * tau).exp();
    let integrand = |v: f64| -> Complex64 {
        let phase = Complex64::new(0.0, k_p * v * tau).exp();
        coefficient / params.denominator(v) * phase * maxwell_boltzmann_unchecked(v, u)
    };

    let seeds = resonance_seeds(params);
    // Cap panels at a tenth of the e^{i k_p v tau} velocity period.
    let max_width = if tau > 0.0 {
        Some(std::f64::consts::TAU / (k_p * tau) / 10.0)
    } else {
        None
    };

    let integrator = PanelIntegrator::new();
    let (value, stats) = integrator.integrate(&integrand, -bound, bound, &seeds, max_width, quad)?;
    Ok((envelope * value, stats))
}

/// Panel boundaries at the two resonance velocities plus width-scale guards,
/// so the narrow Lorentzian features always straddle panel edges.
fn resonance_seeds(params: &WavefunctionParams) -> Vec<f64> {
    let k_p = params.k_p();
    let one_photon_center = params.drive().delta_p() / k_p;
    let one_photon_width = params.system().gamma_21() / (2.0 * k_p);
    let delta_k = params.k_c() - k_p;
    let two_photon_width = if delta_k != 0.0 {
        params.system().gamma_3() / (2.0 * delta_k.abs())
    } else {
        // v-independent second factor: no feature to bracket
        one_photon_width
    };
    let mut seeds = Vec::with_capacity(14);
    for scale in [0.0, 1.0, 4.0, 16.0] {
        seeds.push(one_photon_center + scale * one_photon_width);
        seeds.push(one_photon_center - scale * one_photon_width);
        seeds.push(scale * two_photon_width);
        seeds.push(-scale * two_photon_width);
    }
    seeds
}

/// Raw biphoton waveform: `values[j] = |velocity_integral(tau_j)|²`.
///
/// τ points are independent; with the `parallel` feature they evaluate on
/// the rayon pool, bitwise identical to the sequential fallback.
pub fn g2_trace(
    grid: &TauGrid,
    params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    quad: &QuadratureSpec,
) -> Result<RealTrace> {
    g2_trace_with_diagnostics(grid, params, ensemble, quad).map(|(trace, _)| trace)
}

/// [`g2_trace`] plus per-τ quadrature diagnostics (panel counts for the
/// optional JSON sidecar).
pub fn g2_trace_with_diagnostics(
    grid: &TauGrid,
    params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    quad: &QuadratureSpec,
) -> Result<(RealTrace, Vec<QuadratureStats>)> {
    let rows = exec::map_indexed(grid.n_points, |j| {
        velocity_integral_detailed(grid.value(j), params, ensemble, quad)
            .map(|(value, stats)| (value.norm_sqr(), stats))
            .map_err(|e| e.with_tau_index(j))
    });
    // sequential collect keeps "first failing tau wins" deterministic
    let rows: Vec<(f64, QuadratureStats)> = rows.into_iter().collect::<Result<_>>()?;
    let (values, stats): (Vec<f64>, Vec<QuadratureStats>) = rows.into_iter().unzip();
    Ok((RealTrace::new(*grid, values)?, stats))
}
