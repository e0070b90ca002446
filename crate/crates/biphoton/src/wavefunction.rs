//! Velocity-resolved two-photon wavefunction Ψ_v(τ) and its
//! amplitude/phase decomposition over a velocity grid.

use num_complex::Complex64;

use crate::model::{maxwell_boltzmann_unchecked, CascadeSystem, DriveConfig};
use crate::{Error, Result};

/// Everything Ψ_v(τ) needs, with derived quantities cached.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionParams {
    system: CascadeSystem,
    drive: DriveConfig,
    k_p: f64,
    k_c: f64,
    /// k_c − k_p; the residual two-photon Doppler shift is `delta_k * v`.
    delta_k: f64,
    half_gamma_21: f64,
    half_gamma_3: f64,
    omega_c_sq: f64,
}

impl WavefunctionParams {
    pub fn new(system: CascadeSystem, drive: DriveConfig) -> Self {
        let k_p = drive.k_p();
        let k_c = drive.k_c();
        Self {
            k_p,
            k_c,
            delta_k: k_c - k_p,
            half_gamma_21: system.gamma_21() / 2.0,
            half_gamma_3: system.gamma_3() / 2.0,
            omega_c_sq: drive.omega_c() * drive.omega_c(),
            system,
            drive,
        }
    }

    pub fn system(&self) -> &CascadeSystem {
        &self.system
    }

    pub fn drive(&self) -> &DriveConfig {
        &self.drive
    }

    pub fn k_p(&self) -> f64 {
        self.k_p
    }

    pub fn k_c(&self) -> f64 {
        self.k_c
    }

    /// Resonant denominator of the wavefunction,
    /// `4 (Γ₂₁/2 + i(δ_p − k_p v)) (Γ₃/2 + i(−k_p + k_c)v) + Ω_C²`.
    ///
    /// At δ_p = 0 it satisfies `denominator(-v) == conj(denominator(v))`
    /// exactly, which pins the conjugation symmetry of Ψ.
    #[inline]
    pub fn denominator(&self, v: f64) -> Complex64 {
        let one_photon = Complex64::new(self.half_gamma_21, self.drive.delta_p() - self.k_p * v);
        let two_photon = Complex64::new(self.half_gamma_3, self.delta_k * v);
        4.0 * one_photon * two_photon + self.omega_c_sq
    }
}

/// Two-photon wavefunction of a single velocity class.
///
/// Causal: identically zero for τ < 0; H(0) = 1 keeps the waveform
/// right-continuous at the origin.
pub fn psi_v(tau: f64, v: f64, params: &WavefunctionParams) -> Result<Complex64> {
    if tau < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let den = params.denominator(v);
    if den.norm() < 1e-300 {
        return Err(Error::SingularDenominator {
            velocity: v,
            magnitude: den.norm(),
        });
    }
    // e^{i k_p v tau} e^{-(gamma_21/2) tau} in one complex exponential
    let envelope = (Complex64::new(-params.half_gamma_21, params.k_p * v) * tau).exp();
    Ok(params.drive.coefficient_c() / den * envelope)
}

/// Amplitude/phase decomposition of Ψ_v(τ) at fixed τ, weighted by the
/// Maxwell-Boltzmann density: pairs `(A_v f(v), Φ_v)` over a velocity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDecomposition {
    pub tau: f64,
    pub velocities: Vec<f64>,
    pub weighted_amplitude: Vec<f64>,
    /// Principal value in (−π, π]; 0 where the amplitude vanishes.
    pub phase: Vec<f64>,
}

/// Evaluate `|Ψ_v| f(v)` and `arg Ψ_v` on a strictly increasing velocity grid.
pub fn decompose(
    tau: f64,
    velocity_grid: &[f64],
    params: &WavefunctionParams,
    u: f64,
) -> Result<VelocityDecomposition> {
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "u",
            value: u,
            reason: "must be finite and strictly positive",
        });
    }
    for (i, pair) in velocity_grid.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(Error::GridNotIncreasing { index: i + 1 });
        }
    }
    let mut weighted_amplitude = Vec::with_capacity(velocity_grid.len());
    let mut phase = Vec::with_capacity(velocity_grid.len());
    for &v in velocity_grid {
        let psi = psi_v(tau, v, params)?;
        let amp = psi.norm();
        weighted_amplitude.push(amp * maxwell_boltzmann_unchecked(v, u));
        phase.push(if amp == 0.0 { 0.0 } else { principal_arg(psi) });
    }
    Ok(VelocityDecomposition {
        tau,
        velocities: velocity_grid.to_vec(),
        weighted_amplitude,
        phase,
    })
}

/// arg in (−π, π]: `atan2` lands on −π for negative-real inputs with a
/// negative-zero imaginary part; fold that edge onto +π.
#[inline]
fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn six_d_params() -> WavefunctionParams {
        WavefunctionParams::new(Preset::Cs6D52.system(), Preset::Cs6D52.drive())
    }

    #[test]
    fn causality_before_zero() {
        let p = six_d_params();
        for v in [-300.0, 0.0, 17.5, 211.0] {
            let z = psi_v(-1e-9, v, &p).unwrap();
            assert_eq!(z, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn on_resonance_origin_value_without_coupling() {
        // tau = 0, v = 0, delta_p = 0, Omega_C = 0, C = 1:
        // psi = 1 / (Gamma_21 * Gamma_3), purely real.
        let gamma_21 = TAU * 5.2e6;
        let gamma_3 = TAU * 2.6e6;
        let system = CascadeSystem::new(gamma_21, gamma_3 / 2.0, gamma_3 / 2.0, "t").unwrap();
        let drive =
            DriveConfig::new(852e-9, 917e-9, 0.0, 0.0, Complex64::new(1.0, 0.0)).unwrap();
        let p = WavefunctionParams::new(system, drive);
        let z = psi_v(0.0, 0.0, &p).unwrap();
        assert_eq!(z.im, 0.0);
        assert_relative_eq!(z.re, 1.0 / (gamma_21 * gamma_3), max_relative = 1e-15);
    }

    #[test]
    fn phase_anchor_is_pi_over_two() {
        // With C = i and Omega_C = 0 the tau = 0, v = 0 phase is exactly pi/2.
        let gamma_3 = TAU * 2.6e6;
        let system = CascadeSystem::new(TAU * 5.2e6, gamma_3 / 2.0, gamma_3 / 2.0, "t").unwrap();
        let drive =
            DriveConfig::new(852e-9, 917e-9, 0.0, 0.0, Complex64::new(0.0, 1.0)).unwrap();
        let p = WavefunctionParams::new(system, drive);
        let z = psi_v(0.0, 0.0, &p).unwrap();
        assert_eq!(z.arg(), FRAC_PI_2);
    }

    #[test]
    fn envelope_decays_at_half_gamma_21() {
        let p = six_d_params();
        let v = 42.0;
        let a0 = psi_v(0.0, v, &p).unwrap().norm();
        for tau in [0.5e-9, 2e-9, 7e-9] {
            let a = psi_v(tau, v, &p).unwrap().norm();
            let expected = a0 * (-p.system().gamma_21() / 2.0 * tau).exp();
            assert_relative_eq!(a, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn denominator_conjugation_symmetry_on_resonance() {
        let p = six_d_params();
        for v in [0.5, 13.0, 97.0, 250.0] {
            let d_plus = p.denominator(v);
            let d_minus = p.denominator(-v);
            assert_eq!(d_minus, d_plus.conj());
        }
    }

    #[test]
    fn decompose_negative_tau_is_flat_zero() {
        let p = six_d_params();
        let grid: Vec<f64> = (-50..=50).map(|j| j as f64).collect();
        let d = decompose(-1e-9, &grid, &p, 211.0).unwrap();
        assert!(d.weighted_amplitude.iter().all(|&a| a == 0.0));
        assert!(d.phase.iter().all(|&ph| ph == 0.0));
    }

    #[test]
    fn decompose_reconstructs_psi() {
        let p = six_d_params();
        let grid: Vec<f64> = (-200..=200).map(|j| j as f64 * 0.5).collect();
        let u = 211.0;
        let d = decompose(0.4e-9, &grid, &p, u).unwrap();
        for (j, &v) in grid.iter().enumerate() {
            let psi = psi_v(0.4e-9, v, &p).unwrap();
            let f = maxwell_boltzmann_unchecked(v, u);
            if d.weighted_amplitude[j] > 0.0 {
                let rebuilt = d.weighted_amplitude[j] / f
                    * Complex64::new(0.0, d.phase[j]).exp();
                // A e^{i phi} reconstructs Psi to 1e-12 relative
                assert!((rebuilt - psi).norm() <= 1e-12 * psi.norm());
            }
        }
    }

    #[test]
    fn decompose_rejects_unsorted_grid() {
        let p = six_d_params();
        let grid = vec![0.0, 1.0, 1.0];
        assert!(matches!(
            decompose(0.0, &grid, &p, 211.0),
            Err(Error::GridNotIncreasing { index: 2 })
        ));
    }

    #[test]
    fn scaling_c_preserves_phase_and_scales_amplitude() {
        let system = Preset::Cs6D52.system();
        let base = Preset::Cs6D52.drive();
        let scaled = DriveConfig::new(
            base.lambda_p(),
            base.lambda_c(),
            base.delta_p(),
            base.omega_c(),
            base.coefficient_c() * 7.5,
        )
        .unwrap();
        let p1 = WavefunctionParams::new(system.clone(), base);
        let p2 = WavefunctionParams::new(system, scaled);
        let grid: Vec<f64> = (-40..=40).map(|j| j as f64 * 2.0).collect();
        let d1 = decompose(0.0, &grid, &p1, 211.0).unwrap();
        let d2 = decompose(0.0, &grid, &p2, 211.0).unwrap();
        for j in 0..grid.len() {
            assert_relative_eq!(d2.weighted_amplitude[j], 7.5 * d1.weighted_amplitude[j], max_relative = 1e-12);
            // atan2 of the scaled components may differ in the last ulp
            assert_relative_eq!(d1.phase[j], d2.phase[j], epsilon = 1e-14);
        }
    }
}
