//! Subcommand implementations: manifests in, CSV/JSON out.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use biphoton::io::{
    write_decomposition_csv, write_real_trace_csv, write_sweep_long_csv, SweepSummary,
    WidthReportNs,
};
use biphoton::{
    decompose, doppler_fwhm, fwhm, run_pipeline, sweep_lambda_c, velocity_acceptance,
    QuadratureStats,
};

use crate::manifest::Resolved;
use crate::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Other(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn diagnostics_json(grid: &biphoton::TauGrid, stats: &[QuadratureStats]) -> impl Serialize {
    #[derive(Serialize)]
    struct Row {
        tau_ns: f64,
        panels: usize,
        subdivisions: usize,
        error_estimate: f64,
    }
    #[derive(Serialize)]
    struct Sidecar {
        rows: Vec<Row>,
    }
    Sidecar {
        rows: stats
            .iter()
            .enumerate()
            .map(|(j, s)| Row {
                tau_ns: grid.value(j) / 1e-9,
                panels: s.panels,
                subdivisions: s.subdivisions,
                error_estimate: s.error_estimate,
            })
            .collect(),
    }
}

/// `simulate`: raw, convolved and finished traces plus a width report.
pub fn cmd_simulate(resolved: &Resolved, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let output = run_pipeline(
        &resolved.params,
        &resolved.ensemble,
        &resolved.grid,
        &resolved.quadrature,
        &resolved.jitter,
        &resolved.pipeline,
    )?;

    write_real_trace_csv(&mut create(&out_dir.join("g2_raw.csv"))?, &output.raw, "g2_raw")?;
    write_real_trace_csv(
        &mut create(&out_dir.join("g2_convolved.csv"))?,
        &output.convolved,
        "g2",
    )?;
    write_real_trace_csv(&mut create(&out_dir.join("g2.csv"))?, &output.finished, "g2")?;

    let report = fwhm(&output.finished)?;
    write_json(&out_dir.join("width_report.json"), &WidthReportNs::from(&report))?;

    if resolved.emit_diagnostics {
        write_json(
            &out_dir.join("quadrature_diagnostics.json"),
            &diagnostics_json(&resolved.grid, &output.quadrature),
        )?;
    }

    println!(
        "{}: FWHM = {:.4} ns, peak at {:.4} ns (wrote g2_raw.csv, g2_convolved.csv, g2.csv, width_report.json)",
        resolved.label,
        report.fwhm / 1e-9,
        report.peak_tau / 1e-9,
    );
    Ok(())
}

/// `sweep`: long-form surface CSV plus a per-row width summary.
pub fn cmd_sweep(resolved: &Resolved, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let surface = sweep_lambda_c(
        &resolved.sweep,
        &resolved.params,
        &resolved.ensemble,
        &resolved.grid,
        &resolved.quadrature,
        &resolved.jitter,
    )?;

    write_sweep_long_csv(&mut create(&out_dir.join("sweep_g2.csv"))?, &surface)?;
    write_json(
        &out_dir.join("sweep_summary.json"),
        &SweepSummary::from_surface(&surface),
    )?;

    let converged = surface.rows.iter().filter(|r| r.values.is_some()).count();
    println!(
        "{}: swept {} rows ({} converged) over {:.0}–{:.0} nm (wrote sweep_g2.csv, sweep_summary.json)",
        resolved.label,
        surface.rows.len(),
        converged,
        resolved.sweep.lambda_min / 1e-9,
        resolved.sweep.lambda_max / 1e-9,
    );
    Ok(())
}

/// `decompose`: one `v_mps,weighted_amplitude,phase_rad` CSV per requested τ.
pub fn cmd_decompose(resolved: &Resolved, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let spec = &resolved.decompose;
    let step =
        (spec.velocity_max_mps - spec.velocity_min_mps) / (spec.n_velocities - 1) as f64;
    let velocities: Vec<f64> = (0..spec.n_velocities)
        .map(|j| spec.velocity_min_mps + j as f64 * step)
        .collect();

    let mut written = Vec::new();
    for &tau_ns in &spec.tau_ns {
        let d = decompose(
            tau_ns * 1e-9,
            &velocities,
            &resolved.params,
            resolved.ensemble.u(),
        )?;
        let name = format!("decomposition_tau_{tau_ns}ns.csv");
        write_decomposition_csv(&mut create(&out_dir.join(&name))?, &d)?;
        written.push(name);
    }
    println!("{}: wrote {}", resolved.label, written.join(", "));
    Ok(())
}

/// `info`: derived kinematic quantities of the configured transition.
pub fn cmd_info(resolved: &Resolved, out: &mut impl Write) -> Result<(), CliError> {
    let drive = resolved.params.drive();
    let system = resolved.params.system();
    let lambda_p = drive.lambda_p();
    let lambda_c = drive.lambda_c();
    let u = resolved.ensemble.u();

    writeln!(out, "transition: {}", resolved.label)?;
    writeln!(out, "lambda_p: {:.2} nm", lambda_p / 1e-9)?;
    writeln!(out, "lambda_c: {:.2} nm", lambda_c / 1e-9)?;
    writeln!(
        out,
        "wavelength difference |lambda_p - lambda_c|: {:.1} nm",
        (lambda_p - lambda_c).abs() / 1e-9
    )?;
    writeln!(out, "wavelength ratio lambda_c : lambda_p: {:.3}", lambda_c / lambda_p)?;
    writeln!(out, "k_p: {:.6e} rad/m", drive.k_p())?;
    writeln!(out, "k_c: {:.6e} rad/m", drive.k_c())?;
    match velocity_acceptance(system.gamma_3(), drive.k_p(), drive.k_c()) {
        Ok(dv) => writeln!(out, "velocity acceptance dv_two: {dv:.3} m/s")?,
        Err(_) => writeln!(out, "velocity acceptance dv_two: unbounded (k_p = k_c)")?,
    }
    writeln!(
        out,
        "temperature: {:.2} K ({:.2} C)",
        resolved.ensemble.temperature(),
        resolved.ensemble.temperature() - 273.15
    )?;
    writeln!(out, "most probable speed u: {u:.3} m/s")?;
    writeln!(
        out,
        "doppler fwhm at lambda_p: {:.4e} Hz",
        doppler_fwhm(lambda_p, u)?
    )?;
    writeln!(
        out,
        "doppler fwhm at lambda_c: {:.4e} Hz",
        doppler_fwhm(lambda_c, u)?
    )?;
    Ok(())
}

pub fn out_dir_of(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone().unwrap_or_else(|| PathBuf::from("."))
}
