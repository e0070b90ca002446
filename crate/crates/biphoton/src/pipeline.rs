//! The composed simulation chain: raw trace → jitter convolution →
//! background/normalization.

use serde::{Deserialize, Serialize};

use crate::correlator::{g2_trace_with_diagnostics, QuadratureStats};
use crate::detector::{add_background, convolve, normalize_peak, JitterModel};
use crate::model::ThermalEnsemble;
use crate::quadrature::QuadratureSpec;
use crate::trace::{RealTrace, TauGrid};
use crate::wavefunction::WavefunctionParams;
use crate::{Error, Result};

/// When the accidental floor enters relative to peak normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackgroundStage {
    PreNormalize,
    PostNormalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub normalize: bool,
    pub background_floor: f64,
    pub background_stage: BackgroundStage,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        // theory outputs carry no accidental floor
        Self {
            normalize: true,
            background_floor: 0.0,
            background_stage: BackgroundStage::PostNormalize,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.background_floor.is_finite() || self.background_floor < 0.0 {
            return Err(Error::InvalidParameter {
                name: "background_floor",
                value: self.background_floor,
                reason: "must be finite and non-negative",
            });
        }
        Ok(())
    }
}

/// Every stage of one run, plus per-τ quadrature diagnostics.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub raw: RealTrace,
    pub convolved: RealTrace,
    /// Final curve after background/normalization per the config.
    pub finished: RealTrace,
    pub quadrature: Vec<QuadratureStats>,
}

pub fn run_pipeline(
    params: &WavefunctionParams,
    ensemble: &ThermalEnsemble,
    grid: &TauGrid,
    quad: &QuadratureSpec,
    jitter: &JitterModel,
    config: &PipelineConfig,
) -> Result<PipelineOutput> {
    config.validate()?;
    jitter.validate()?;
    let kernel = jitter.kernel(grid.t_step)?;
    let (raw, stats) = g2_trace_with_diagnostics(grid, params, ensemble, quad)?;
    let convolved = convolve(&raw, &kernel);
    let finished = match config.background_stage {
        BackgroundStage::PreNormalize => {
            let with_floor = add_background(&convolved, config.background_floor);
            if config.normalize {
                normalize_peak(&with_floor)?
            } else {
                with_floor
            }
        }
        BackgroundStage::PostNormalize => {
            let base = if config.normalize {
                normalize_peak(&convolved)?
            } else {
                convolved.clone()
            };
            add_background(&base, config.background_floor)
        }
    };
    Ok(PipelineOutput {
        raw,
        convolved,
        finished,
        quadrature: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;

    #[test]
    fn stages_are_consistent() {
        let params = WavefunctionParams::new(Preset::Cs6D52.system(), Preset::Cs6D52.drive());
        let ensemble = Preset::Cs6D52.ensemble();
        let grid = TauGrid::new(-1e-9, 1e-11, 301).unwrap();
        let out = run_pipeline(
            &params,
            &ensemble,
            &grid,
            &QuadratureSpec::default(),
            &JitterModel::default(),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(out.raw.values.len(), 301);
        assert_eq!(out.finished.max_value(), 1.0);
        // raw trace vanishes before tau = 0
        for (j, tau) in grid.values().enumerate() {
            if tau < 0.0 {
                assert_eq!(out.raw.values[j], 0.0);
            }
        }
        // negative-tau stats record zero quadrature work
        assert_eq!(out.quadrature[0].panels, 0);
    }

    #[test]
    fn background_stage_changes_floor_semantics() {
        let params = WavefunctionParams::new(Preset::Cs6D52.system(), Preset::Cs6D52.drive());
        let ensemble = Preset::Cs6D52.ensemble();
        let grid = TauGrid::new(-0.5e-9, 1e-11, 151).unwrap();
        let quad = QuadratureSpec::default();
        let jitter = JitterModel::default();
        let post = run_pipeline(
            &params,
            &ensemble,
            &grid,
            &quad,
            &jitter,
            &PipelineConfig {
                normalize: true,
                background_floor: 0.25,
                background_stage: BackgroundStage::PostNormalize,
            },
        )
        .unwrap();
        // floor added after normalization lifts the peak above 1
        assert!((post.finished.max_value() - 1.25).abs() < 1e-12);
        let pre = run_pipeline(
            &params,
            &ensemble,
            &grid,
            &quad,
            &jitter,
            &PipelineConfig {
                normalize: true,
                background_floor: 0.25,
                background_stage: BackgroundStage::PreNormalize,
            },
        )
        .unwrap();
        assert_eq!(pre.finished.max_value(), 1.0);
    }

    #[test]
    fn rejects_negative_floor() {
        let cfg = PipelineConfig {
            normalize: true,
            background_floor: -0.1,
            background_stage: BackgroundStage::PostNormalize,
        };
        assert!(cfg.validate().is_err());
    }
}
