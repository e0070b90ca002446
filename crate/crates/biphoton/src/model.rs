//! Physical data model: cascade transition, drive lasers, thermal ensemble,
//! Maxwell-Boltzmann distribution and Doppler kinematics.
//!
//! Unit convention: SI throughout, and every rate, detuning and Rabi
//! frequency is ANGULAR (rad/s). Natural linewidths quoted in MHz enter as
//! 2π·linewidth. Mixing ordinary and angular frequencies inside the
//! wavefunction denominator is the classic 2π bug this convention rules out.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{BOLTZMANN, CS133_MASS, PRESET_TEMPERATURE};
use crate::{Error, Result};

/// Three-level cascade transition: decay rates and identity.
///
/// `gamma_3 = gamma_32 + gamma_32_prime` is the natural (angular) linewidth
/// of the excited state; only the sum enters the wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeSystem {
    gamma_21: f64,
    gamma_32: f64,
    gamma_32_prime: f64,
    label: String,
}

impl CascadeSystem {
    /// Build a cascade system from angular decay rates (rad/s).
    pub fn new(gamma_21: f64, gamma_32: f64, gamma_32_prime: f64, label: impl Into<String>) -> Result<Self> {
        check_positive_finite("gamma_21", gamma_21)?;
        check_positive_finite("gamma_32", gamma_32)?;
        check_positive_finite("gamma_32_prime", gamma_32_prime)?;
        Ok(Self {
            gamma_21,
            gamma_32,
            gamma_32_prime,
            label: label.into(),
        })
    }

    /// Idler-mode (intermediate → ground) angular decay rate, rad/s.
    pub fn gamma_21(&self) -> f64 {
        self.gamma_21
    }

    /// Excited → |2⟩ angular decay rate, rad/s.
    pub fn gamma_32(&self) -> f64 {
        self.gamma_32
    }

    /// Excited → |2′⟩ angular decay rate, rad/s.
    pub fn gamma_32_prime(&self) -> f64 {
        self.gamma_32_prime
    }

    /// Total excited-state angular linewidth Γ₃ = Γ₃₂ + Γ₃₂′, rad/s.
    pub fn gamma_3(&self) -> f64 {
        self.gamma_32 + self.gamma_32_prime
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Pump/coupling laser parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriveConfig {
    lambda_p: f64,
    lambda_c: f64,
    delta_p: f64,
    omega_c: f64,
    coefficient_c: Complex64,
}

impl DriveConfig {
    /// `lambda_p`/`lambda_c` in meters, `delta_p`/`omega_c` angular (rad/s),
    /// `coefficient_c` the overall transition-rate coefficient.
    pub fn new(
        lambda_p: f64,
        lambda_c: f64,
        delta_p: f64,
        omega_c: f64,
        coefficient_c: Complex64,
    ) -> Result<Self> {
        check_positive_finite("lambda_p", lambda_p)?;
        check_positive_finite("lambda_c", lambda_c)?;
        check_finite("delta_p", delta_p)?;
        check_finite("omega_c", omega_c)?;
        if omega_c < 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega_c",
                value: omega_c,
                reason: "Rabi frequency must be non-negative",
            });
        }
        if !coefficient_c.re.is_finite() || !coefficient_c.im.is_finite() {
            return Err(Error::InvalidParameter {
                name: "coefficient_c",
                value: f64::NAN,
                reason: "coefficient must be finite",
            });
        }
        Ok(Self {
            lambda_p,
            lambda_c,
            delta_p,
            omega_c,
            coefficient_c,
        })
    }

    /// Replace the coupling wavelength, keeping everything else (sweep rows).
    pub fn with_lambda_c(&self, lambda_c: f64) -> Result<Self> {
        Self::new(self.lambda_p, lambda_c, self.delta_p, self.omega_c, self.coefficient_c)
    }

    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    /// Pump wave number k_p = 2π/λ_p, rad/m.
    pub fn k_p(&self) -> f64 {
        TAU / self.lambda_p
    }

    /// Coupling wave number k_c = 2π/λ_c, rad/m.
    pub fn k_c(&self) -> f64 {
        TAU / self.lambda_c
    }

    /// Pump detuning δ_p, rad/s.
    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    /// Coupling Rabi frequency Ω_C, rad/s.
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    /// Overall coefficient C.
    pub fn coefficient_c(&self) -> Complex64 {
        self.coefficient_c
    }
}

/// Warm ensemble: temperature, atomic mass and the derived most-probable
/// speed `u = sqrt(2 k_B T / m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalEnsemble {
    temperature: f64,
    atomic_mass: f64,
    u: f64,
}

impl ThermalEnsemble {
    pub fn new(temperature: f64, atomic_mass: f64) -> Result<Self> {
        let u = most_probable_speed(temperature, atomic_mass)?;
        Ok(Self {
            temperature,
            atomic_mass,
            u,
        })
    }

    /// Ensemble whose most-probable speed equals `u` for the given mass
    /// (the matching temperature is back-computed).
    pub fn from_most_probable_speed(u: f64, atomic_mass: f64) -> Result<Self> {
        check_positive_finite("u", u)?;
        check_positive_finite("atomic_mass", atomic_mass)?;
        let temperature = u * u * atomic_mass / (2.0 * BOLTZMANN);
        Self::new(temperature, atomic_mass)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn atomic_mass(&self) -> f64 {
        self.atomic_mass
    }

    /// Most-probable speed u, m/s (cached at construction).
    pub fn u(&self) -> f64 {
        self.u
    }
}

/// Most-probable speed of the one-dimensional ensemble, `sqrt(2 k_B T / m)`.
pub fn most_probable_speed(temperature: f64, mass: f64) -> Result<f64> {
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "must be finite and non-negative",
        });
    }
    check_positive_finite("mass", mass)?;
    Ok((2.0 * BOLTZMANN * temperature / mass).sqrt())
}

/// One-dimensional Maxwell-Boltzmann density `exp(-(v/u)^2) / (sqrt(pi) u)`.
pub fn maxwell_boltzmann(v: f64, u: f64) -> Result<f64> {
    check_positive_finite("u", u)?;
    Ok(maxwell_boltzmann_unchecked(v, u))
}

/// Hot-path form of [`maxwell_boltzmann`]; `u > 0` must hold.
#[inline]
pub(crate) fn maxwell_boltzmann_unchecked(v: f64, u: f64) -> f64 {
    let x = v / u;
    (-x * x).exp() / (PI.sqrt() * u)
}

/// Residual two-photon Doppler shift `(-k_p + k_c) v` for counter-propagating
/// pump and coupling beams; positive `v` is along the pump propagation.
pub fn two_photon_shift(k_p: f64, k_c: f64, v: f64) -> f64 {
    (-k_p + k_c) * v
}

/// Width of the velocity class contributing to two-photon resonance,
/// `|Γ₃ / (k_p - k_c)|`.
pub fn velocity_acceptance(gamma_3: f64, k_p: f64, k_c: f64) -> Result<f64> {
    check_positive_finite("gamma_3", gamma_3)?;
    if k_p == k_c {
        return Err(Error::DegenerateWavelengths { k: k_p });
    }
    Ok((gamma_3 / (k_p - k_c)).abs())
}

/// FWHM of the one-dimensional Doppler profile in ordinary frequency,
/// `2 sqrt(ln 2) u / λ`.
pub fn doppler_fwhm(lambda: f64, u: f64) -> Result<f64> {
    check_positive_finite("lambda", lambda)?;
    if !u.is_finite() || u < 0.0 {
        return Err(Error::InvalidParameter {
            name: "u",
            value: u,
            reason: "must be finite and non-negative",
        });
    }
    Ok(2.0 * f64::ln(2.0).sqrt() * u / lambda)
}

/// The two cascade channels of Fig-style presets.
///
/// Both share the 852 nm pump/idler transition; they differ in the coupling
/// wavelength and the excited-state linewidth:
///
/// * `Cs6D52` — 6S₁/₂–6P₃/₂–6D₅/₂, λ_c = 917 nm, Γ₃ = 2π·2.6 MHz
/// * `Cs8S12` — 6S₁/₂–6P₃/₂–8S₁/₂, λ_c = 795 nm, Γ₃ = 2π·1.7 MHz
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Cs6D52,
    Cs8S12,
}

/// Γ₂₁ is not part of the channel identity; 2π·5.2 MHz is the 6P₃/₂
/// natural linewidth shared by both presets.
const GAMMA_21_PRESET: f64 = TAU * 5.2e6;

/// Default coupling Rabi frequency, 2π·5 MHz.
const OMEGA_C_DEFAULT: f64 = TAU * 5.0e6;

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Cs6D52, Preset::Cs8S12];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Cs6D52 => "Cs-6D5/2",
            Preset::Cs8S12 => "Cs-8S1/2",
        }
    }

    /// Look a preset up by its public name.
    pub fn by_name(name: &str) -> Option<Preset> {
        Preset::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// Excited-state natural linewidth in ordinary frequency, Hz.
    fn linewidth_3_hz(&self) -> f64 {
        match self {
            Preset::Cs6D52 => 2.6e6,
            Preset::Cs8S12 => 1.7e6,
        }
    }

    pub fn system(&self) -> CascadeSystem {
        let gamma_3 = TAU * self.linewidth_3_hz();
        // Only the sum Γ₃₂ + Γ₃₂′ enters the model; split it evenly.
        CascadeSystem::new(GAMMA_21_PRESET, gamma_3 / 2.0, gamma_3 / 2.0, self.name())
            .expect("preset rates are valid")
    }

    pub fn drive(&self) -> DriveConfig {
        let lambda_c = match self {
            Preset::Cs6D52 => 917e-9,
            Preset::Cs8S12 => 795e-9,
        };
        // C = i makes the zero-velocity on-resonance phase at tau = 0 equal
        // pi/2; its magnitude drops out after peak normalization.
        DriveConfig::new(852e-9, lambda_c, 0.0, OMEGA_C_DEFAULT, Complex64::new(0.0, 1.0))
            .expect("preset drive is valid")
    }

    /// 85 °C caesium vapor.
    pub fn ensemble(&self) -> ThermalEnsemble {
        ThermalEnsemble::new(PRESET_TEMPERATURE, CS133_MASS).expect("preset ensemble is valid")
    }
}

fn check_positive_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        });
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    Ok(())
}
