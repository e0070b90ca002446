//! Experiment manifests: a single TOML tree with experiment-friendly units
//! (MHz, nm, ns, °C) at the boundary, converted to the core's SI-angular
//! convention on load.
//!
//! Validation collects every violation before reporting, so a broken
//! manifest surfaces all of its problems in one pass.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use biphoton::{
    constants, BackgroundStage, CascadeSystem, DriveConfig, JitterModel, PipelineConfig, Preset,
    QuadratureSpec, SweepConfig, TauGrid, ThermalEnsemble, WavefunctionParams,
};

use crate::CliError;

const NS: f64 = 1e-9;
const NM: f64 = 1e-9;
const MHZ_ANGULAR: f64 = TAU * 1e6;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<JitterBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

/// Cascade decay rates as natural linewidths in ordinary MHz; the loader
/// multiplies by 2π. Either `gamma_3_mhz` (split evenly between the two
/// spontaneous channels) or both explicit partial rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub label: Option<String>,
    pub gamma_21_mhz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_3_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_32_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_32_prime_mhz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveBlock {
    pub lambda_p_nm: f64,
    pub lambda_c_nm: f64,
    #[serde(default)]
    pub delta_p_mhz: f64,
    #[serde(default = "default_omega_c_mhz")]
    pub omega_c_mhz: f64,
    /// `[re, im]`; defaults to i so the zero-velocity on-resonance phase
    /// at τ = 0 is π/2.
    #[serde(default = "default_coefficient")]
    pub coefficient_c: [f64; 2],
}

fn default_omega_c_mhz() -> f64 {
    5.0
}

fn default_coefficient() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    #[serde(default = "default_temperature_c")]
    pub temperature_c: f64,
    #[serde(default = "default_atomic_mass")]
    pub atomic_mass_kg: f64,
}

fn default_temperature_c() -> f64 {
    85.0
}

fn default_atomic_mass() -> f64 {
    constants::CS133_MASS
}

impl Default for EnsembleBlock {
    fn default() -> Self {
        Self {
            temperature_c: default_temperature_c(),
            atomic_mass_kg: default_atomic_mass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default = "default_tau_start_ns")]
    pub tau_start_ns: f64,
    #[serde(default = "default_tau_step_ns")]
    pub tau_step_ns: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
}

fn default_tau_start_ns() -> f64 {
    -5.0
}

fn default_tau_step_ns() -> f64 {
    0.01
}

fn default_n_points() -> usize {
    2001
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            tau_start_ns: default_tau_start_ns(),
            tau_step_ns: default_tau_step_ns(),
            n_points: default_n_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureBlock {
    pub cutoff_sigmas: f64,
    pub base_panels: usize,
    pub refinement_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureBlock {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            cutoff_sigmas: q.cutoff_sigmas,
            base_panels: q.base_panels,
            refinement_tolerance: q.refinement_tolerance,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JitterBlock {
    pub fwhm_ns: f64,
    pub kernel_support_sigmas: f64,
}

impl Default for JitterBlock {
    fn default() -> Self {
        Self {
            fwhm_ns: 0.35,
            kernel_support_sigmas: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub normalize: bool,
    pub background_floor: f64,
    pub background_stage: BackgroundStage,
    /// Emit a JSON sidecar with per-τ quadrature panel counts.
    pub emit_diagnostics: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            normalize: true,
            background_floor: 0.0,
            background_stage: BackgroundStage::PostNormalize,
            emit_diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeBlock {
    pub tau_ns: Vec<f64>,
    pub velocity_min_mps: f64,
    pub velocity_max_mps: f64,
    pub n_velocities: usize,
}

impl Default for DecomposeBlock {
    fn default() -> Self {
        Self {
            tau_ns: vec![0.0],
            velocity_min_mps: -100.0,
            velocity_max_mps: 100.0,
            n_velocities: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub rows: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            lambda_min_nm: 700.0,
            lambda_max_nm: 1000.0,
            rows: 61,
        }
    }
}

/// Everything a command needs, in core units, after full validation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub params: WavefunctionParams,
    pub ensemble: ThermalEnsemble,
    pub grid: TauGrid,
    pub quadrature: QuadratureSpec,
    pub jitter: JitterModel,
    pub pipeline: PipelineConfig,
    pub emit_diagnostics: bool,
    pub decompose: DecomposeBlock,
    pub sweep: SweepConfig,
}

impl Manifest {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut violations: Vec<String> = Vec::new();

        // exactly one of preset / explicit system+drive
        let explicit = self.system.is_some() || self.drive.is_some();
        match (&self.preset, explicit) {
            (Some(_), true) => violations.push(
                "preset and explicit [system]/[drive] blocks are mutually exclusive".into(),
            ),
            (None, false) => violations
                .push("manifest needs either `preset` or both [system] and [drive] blocks".into()),
            (None, true) if self.system.is_none() || self.drive.is_none() => {
                violations.push("explicit configuration needs both [system] and [drive]".into())
            }
            _ => {}
        }

        let preset = match &self.preset {
            Some(name) => match Preset::by_name(name) {
                Some(p) => Some(p),
                None => {
                    violations.push(format!(
                        "unknown preset `{name}` (available: Cs-6D5/2, Cs-8S1/2)"
                    ));
                    None
                }
            },
            None => None,
        };

        let system = match (preset, &self.system) {
            (Some(p), _) => Some(p.system()),
            (None, Some(block)) => build_system(block, &mut violations),
            (None, None) => None,
        };
        let drive = match (preset, &self.drive) {
            (Some(p), _) => Some(p.drive()),
            (None, Some(block)) => build_drive(block, &mut violations),
            (None, None) => None,
        };

        let ensemble_block = self.ensemble.clone().unwrap_or_default();
        let ensemble = ThermalEnsemble::new(
            ensemble_block.temperature_c + 273.15,
            ensemble_block.atomic_mass_kg,
        )
        .map_err(|e| violations.push(format!("[ensemble] {e}")))
        .ok();

        let grid_block = self.grid.clone().unwrap_or_default();
        let grid = TauGrid::new(
            grid_block.tau_start_ns * NS,
            grid_block.tau_step_ns * NS,
            grid_block.n_points,
        )
        .map_err(|e| violations.push(format!("[grid] {e}")))
        .ok();

        let quad_block = self.quadrature.clone().unwrap_or_default();
        let quadrature = QuadratureSpec {
            cutoff_sigmas: quad_block.cutoff_sigmas,
            base_panels: quad_block.base_panels,
            refinement_tolerance: quad_block.refinement_tolerance,
            max_subdivisions: quad_block.max_subdivisions,
        };
        if let Err(e) = quadrature.validate() {
            violations.push(format!("[quadrature] {e}"));
        }

        let jitter_block = self.jitter.clone().unwrap_or_default();
        let jitter = JitterModel {
            fwhm: jitter_block.fwhm_ns * NS,
            kernel_support_sigmas: jitter_block.kernel_support_sigmas,
        };
        if let Err(e) = jitter.validate() {
            violations.push(format!("[jitter] {e}"));
        }
        if let Some(g) = &grid {
            if jitter.fwhm > 0.0 && g.t_step > jitter.fwhm / 3.0 {
                violations.push(format!(
                    "[jitter] tau_step_ns = {} undersamples the {} ns kernel (needs ≤ fwhm/3)",
                    grid_block.tau_step_ns, jitter_block.fwhm_ns
                ));
            }
        }

        let output = self.output.clone().unwrap_or_default();
        let pipeline = PipelineConfig {
            normalize: output.normalize,
            background_floor: output.background_floor,
            background_stage: output.background_stage,
        };
        if let Err(e) = pipeline.validate() {
            violations.push(format!("[output] {e}"));
        }

        let decompose = self.decompose.clone().unwrap_or_default();
        if decompose.tau_ns.is_empty() {
            violations.push("[decompose] tau_ns list must not be empty".into());
        }
        if !(decompose.velocity_min_mps < decompose.velocity_max_mps) {
            violations.push("[decompose] velocity_min_mps must be below velocity_max_mps".into());
        }
        if decompose.n_velocities < 2 {
            violations.push("[decompose] n_velocities must be at least 2".into());
        }

        let sweep_block = self.sweep.clone().unwrap_or_default();
        let sweep = SweepConfig {
            lambda_min: sweep_block.lambda_min_nm * NM,
            lambda_max: sweep_block.lambda_max_nm * NM,
            rows: sweep_block.rows,
        };
        if let Err(e) = sweep.validate() {
            violations.push(format!("[sweep] {e}"));
        }

        if !violations.is_empty() {
            return Err(CliError::Schema(violations));
        }

        let (system, drive, ensemble, grid) = (
            system.expect("validated above"),
            drive.expect("validated above"),
            ensemble.expect("validated above"),
            grid.expect("validated above"),
        );
        let label = preset
            .map(|p| p.name().to_string())
            .or_else(|| self.system.as_ref().and_then(|s| s.label.clone()))
            .unwrap_or_else(|| "custom".into());
        Ok(Resolved {
            label,
            params: WavefunctionParams::new(system, drive),
            ensemble,
            grid,
            quadrature,
            jitter,
            pipeline,
            emit_diagnostics: output.emit_diagnostics,
            decompose,
            sweep,
        })
    }
}

fn build_system(block: &SystemBlock, violations: &mut Vec<String>) -> Option<CascadeSystem> {
    let (gamma_32, gamma_32_prime) = match (
        block.gamma_3_mhz,
        block.gamma_32_mhz,
        block.gamma_32_prime_mhz,
    ) {
        (Some(total), None, None) => (total / 2.0, total / 2.0),
        (None, Some(a), Some(b)) => (a, b),
        _ => {
            violations.push(
                "[system] give either gamma_3_mhz or both gamma_32_mhz and gamma_32_prime_mhz"
                    .into(),
            );
            return None;
        }
    };
    CascadeSystem::new(
        block.gamma_21_mhz * MHZ_ANGULAR,
        gamma_32 * MHZ_ANGULAR,
        gamma_32_prime * MHZ_ANGULAR,
        block.label.clone().unwrap_or_else(|| "custom".into()),
    )
    .map_err(|e| violations.push(format!("[system] {e}")))
    .ok()
}

fn build_drive(block: &DriveBlock, violations: &mut Vec<String>) -> Option<DriveConfig> {
    DriveConfig::new(
        block.lambda_p_nm * NM,
        block.lambda_c_nm * NM,
        block.delta_p_mhz * MHZ_ANGULAR,
        block.omega_c_mhz * MHZ_ANGULAR,
        Complex64::new(block.coefficient_c[0], block.coefficient_c[1]),
    )
    .map_err(|e| violations.push(format!("[drive] {e}")))
    .ok()
}

/// Parse manifest text, then apply `--preset` and dotted-path overrides on
/// the raw TOML tree before deserializing.
pub fn load_manifest(
    text: Option<&str>,
    preset: Option<&str>,
    overrides: &[String],
) -> Result<Manifest, CliError> {
    let mut tree: toml::Value = match text {
        Some(t) => t
            .parse()
            .map_err(|e| CliError::Schema(vec![format!("manifest is not valid TOML: {e}")]))?,
        None => toml::Value::Table(toml::map::Map::new()),
    };
    if let Some(name) = preset {
        tree.as_table_mut()
            .expect("root is a table")
            .insert("preset".into(), toml::Value::String(name.to_string()));
    }
    let mut violations = Vec::new();
    for entry in overrides {
        if let Err(msg) = apply_override(&mut tree, entry) {
            violations.push(msg);
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Schema(violations));
    }
    Manifest::deserialize(tree).map_err(|e| CliError::Schema(vec![format!("manifest: {e}")]))
}

/// `--override drive.omega_c_mhz=3.0`: dotted path into the TOML tree,
/// value parsed as TOML (falling back to a bare string).
fn apply_override(tree: &mut toml::Value, entry: &str) -> Result<(), String> {
    let (path, raw_value) = entry
        .split_once('=')
        .ok_or_else(|| format!("override `{entry}` is not KEY=VALUE"))?;
    let value = parse_toml_value(raw_value.trim());
    let mut node = tree
        .as_table_mut()
        .ok_or_else(|| "manifest root is not a table".to_string())?;
    let segments: Vec<&str> = path.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(format!("override path `{path}` has an empty segment"));
    }
    for segment in &segments[..segments.len() - 1] {
        node = node
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()))
            .as_table_mut()
            .ok_or_else(|| format!("override path `{path}`: `{segment}` is not a table"))?;
    }
    node.insert(segments[segments.len() - 1].to_string(), value);
    Ok(())
}

fn parse_toml_value(text: &str) -> toml::Value {
    let wrapped = format!("v = {text}");
    match wrapped.parse::<toml::Value>() {
        Ok(toml::Value::Table(mut t)) => t.remove("v").expect("key v exists"),
        _ => toml::Value::String(text.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_manifest_resolves() {
        let m = load_manifest(Some("preset = \"Cs-6D5/2\""), None, &[]).unwrap();
        let r = m.resolve().unwrap();
        assert_eq!(r.label, "Cs-6D5/2");
        assert_eq!(r.grid.n_points, 2001);
        assert!((r.ensemble.temperature() - 358.15).abs() < 1e-12);
    }

    #[test]
    fn explicit_blocks_resolve_with_unit_conversion() {
        let text = r#"
            [system]
            gamma_21_mhz = 5.2
            gamma_3_mhz = 2.6
            [drive]
            lambda_p_nm = 852.0
            lambda_c_nm = 917.0
        "#;
        let m = load_manifest(Some(text), None, &[]).unwrap();
        let r = m.resolve().unwrap();
        assert!((r.params.system().gamma_3() - TAU * 2.6e6).abs() < 1.0);
        assert!((r.params.drive().omega_c() - TAU * 5.0e6).abs() < 1.0);
        assert_eq!(r.params.drive().coefficient_c(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn preset_and_explicit_blocks_conflict() {
        let text = r#"
            preset = "Cs-6D5/2"
            [drive]
            lambda_p_nm = 852.0
            lambda_c_nm = 917.0
        "#;
        let m = load_manifest(Some(text), None, &[]).unwrap();
        match m.resolve() {
            Err(CliError::Schema(v)) => assert!(v[0].contains("mutually exclusive")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_are_collected() {
        let text = r#"
            preset = "Xe-9Z9/9"
            [grid]
            n_points = 1
            [quadrature]
            cutoff_sigmas = 1.0
            [decompose]
            tau_ns = []
        "#;
        let m = load_manifest(Some(text), None, &[]).unwrap();
        match m.resolve() {
            Err(CliError::Schema(v)) => {
                assert!(v.len() >= 4, "expected ≥4 violations, got {v:?}");
                assert!(v.iter().any(|s| s.contains("unknown preset")));
                assert!(v.iter().any(|s| s.contains("n_points")));
                assert!(v.iter().any(|s| s.contains("cutoff_sigmas")));
                assert!(v.iter().any(|s| s.contains("tau_ns")));
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let m = load_manifest(
            Some("preset = \"Cs-8S1/2\""),
            None,
            &[
                "grid.n_points=301".to_string(),
                "jitter.fwhm_ns=0.5".to_string(),
                "output.normalize=false".to_string(),
            ],
        )
        .unwrap();
        let r = m.resolve().unwrap();
        assert_eq!(r.grid.n_points, 301);
        assert!((r.jitter.fwhm - 0.5e-9).abs() < 1e-20);
        assert!(!r.pipeline.normalize);
    }

    #[test]
    fn preset_flag_overrides_file_preset() {
        let m = load_manifest(Some("preset = \"Cs-6D5/2\""), Some("Cs-8S1/2"), &[]).unwrap();
        assert_eq!(m.preset.as_deref(), Some("Cs-8S1/2"));
    }

    #[test]
    fn round_trip_is_idempotent() {
        let text = r#"
            preset = "Cs-6D5/2"
            [grid]
            tau_start_ns = -2.0
            tau_step_ns = 0.02
            n_points = 851
            [output]
            normalize = true
            background_floor = 0.0015
            background_stage = "pre-normalize"
        "#;
        let m1 = load_manifest(Some(text), None, &[]).unwrap();
        let s1 = toml::to_string_pretty(&m1).unwrap();
        let m2 = load_manifest(Some(&s1), None, &[]).unwrap();
        let s2 = toml::to_string_pretty(&m2).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn bad_override_is_reported() {
        let err = load_manifest(Some(""), Some("Cs-6D5/2"), &["grid.n_points".to_string()]);
        match err {
            Err(CliError::Schema(v)) => assert!(v[0].contains("KEY=VALUE")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn split_rates_form_is_accepted() {
        let text = r#"
            [system]
            gamma_21_mhz = 5.2
            gamma_32_mhz = 1.0
            gamma_32_prime_mhz = 1.6
            [drive]
            lambda_p_nm = 852.0
            lambda_c_nm = 795.0
        "#;
        let m = load_manifest(Some(text), None, &[]).unwrap();
        let r = m.resolve().unwrap();
        assert!((r.params.system().gamma_3() - TAU * 2.6e6).abs() < 1.0);
        // both forms at once is a violation
        let text = r#"
            [system]
            gamma_21_mhz = 5.2
            gamma_3_mhz = 2.6
            gamma_32_mhz = 1.3
            [drive]
            lambda_p_nm = 852.0
            lambda_c_nm = 795.0
        "#;
        let m = load_manifest(Some(text), None, &[]).unwrap();
        assert!(matches!(m.resolve(), Err(CliError::Schema(_))));
    }
}
