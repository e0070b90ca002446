//! Physical constants used by the model.

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Atomic mass of ¹³³Cs, kg.
pub const CS133_MASS: f64 = 2.2069e-25;

/// Cell temperature used by the presets, K (85 °C).
pub const PRESET_TEMPERATURE: f64 = 358.15;
