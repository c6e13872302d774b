use crate::config::{CliError, CliResult, ExperimentConfig, QMode, Scenario, StateKind};
use crate::plot;
use jcsim_core::observables::{time_series, uniform_grid};
use jcsim_core::states::{
    coherent_state, displaced_thermal, mtcs, pacs, photon_add, photon_distribution, thermal_state,
    DtsMethod, FieldState,
};
use std::path::{Path, PathBuf};

/// Paths written by a successful run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub plot: PathBuf,
}

/// Formats a float with 17 significant digits, the fixed CSV/meta convention.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds the configured field state; the mixing weight is resolved first and
/// photon addition is applied last.
pub fn build_field(config: &ExperimentConfig) -> CliResult<FieldState> {
    let alpha = config.alpha();
    let q = config.resolved_q();
    let cutoff = config.cutoff;
    let state = match config.state_kind {
        StateKind::Coherent => coherent_state(alpha, cutoff)?,
        StateKind::Thermal => thermal_state(config.nbar, cutoff)?,
        StateKind::Dts => displaced_thermal(alpha, config.nbar, cutoff, DtsMethod::Unitary)?,
        StateKind::Mtcs => mtcs(alpha, config.nbar, q, cutoff)?,
        StateKind::Pacs => pacs(alpha, 1, cutoff)?,
        StateKind::PhotonAddedDts => {
            photon_add(&displaced_thermal(alpha, config.nbar, cutoff, DtsMethod::Unitary)?)?
        }
        StateKind::PhotonAddedMtcs => photon_add(&mtcs(alpha, config.nbar, q, cutoff)?)?,
    };
    Ok(state)
}

/// Writes bytes to a sibling temp file, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn distribution_csv(field: &FieldState) -> CliResult<String> {
    let dist = photon_distribution(field);
    let total: f64 = dist.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CliError::Runtime(format!(
            "distribution sums to {total}, outside 1 +- 1e-9; refusing to write"
        )));
    }
    let mut out = String::from("n,p\n");
    for (n, p) in dist {
        out.push_str(&format!("{n},{}\n", fmt_float(p)));
    }
    Ok(out)
}

fn series_csv(config: &ExperimentConfig, field: &FieldState) -> CliResult<String> {
    let grid = uniform_grid(config.t_max, config.steps);
    let series = time_series(field, &grid, config.propagator.to_core())?;
    let mut out = String::from("lambda_t,inversion,negativity\n");
    for row in &series.rows {
        if row.inversion.abs() > 1.0 + 1e-9 {
            return Err(CliError::Runtime(format!(
                "inversion {} at lambda_t {} outside [-1, 1]; refusing to write",
                row.inversion, row.lambda_t
            )));
        }
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_float(row.lambda_t),
            fmt_float(row.inversion),
            fmt_float(row.negativity)
        ));
    }
    Ok(out)
}

fn metadata(config: &ExperimentConfig, field: &FieldState) -> String {
    let mut lines: Vec<(String, String)> = vec![
        ("scenario".into(), config.scenario.as_str().into()),
        ("state".into(), config.state_kind.as_str().into()),
        ("alpha_sq".into(), fmt_float(config.alpha_sq)),
        ("theta".into(), fmt_float(config.theta)),
        ("nbar".into(), fmt_float(config.nbar)),
    ];
    match config.q_mode {
        QMode::Explicit(q) if config.state_kind.needs_q() => {
            lines.push(("q".into(), fmt_float(q)));
            lines.push(("equal_overlap".into(), "false".into()));
        }
        QMode::Explicit(_) => {
            lines.push(("equal_overlap".into(), "false".into()));
        }
        QMode::EqualOverlap => {
            lines.push(("equal_overlap".into(), "true".into()));
        }
    }
    lines.extend([
        ("cutoff".into(), config.cutoff.to_string()),
        ("t_max".into(), fmt_float(config.t_max)),
        ("steps".into(), config.steps.to_string()),
        ("propagator".into(), config.propagator.as_str().into()),
        ("out".into(), config.output_path.display().to_string()),
        ("resolved_q".into(), fmt_float(config.resolved_q())),
        ("tail_mass".into(), fmt_float(field.tail_mass)),
        ("library_version".into(), env!("CARGO_PKG_VERSION").into()),
    ]);
    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}

/// Runs one scenario end to end: builds the state, writes the CSV, the
/// metadata sidecar, and the plot script.
pub fn run_scenario(config: &ExperimentConfig) -> CliResult<RunOutput> {
    let field = build_field(config)?;
    let csv = match config.scenario {
        Scenario::Distribution => distribution_csv(&field)?,
        Scenario::Series => series_csv(config, &field)?,
    };

    let csv_path = config.output_path.clone();
    let mut meta_path = csv_path.as_os_str().to_owned();
    meta_path.push(".meta");
    let meta_path = PathBuf::from(meta_path);
    let mut plot_path = csv_path.as_os_str().to_owned();
    plot_path.push(".plot");
    let plot_path = PathBuf::from(plot_path);

    write_atomic(&csv_path, csv.as_bytes())?;
    write_atomic(&meta_path, metadata(config, &field).as_bytes())?;
    write_atomic(&plot_path, plot::script(config).as_bytes())?;
    Ok(RunOutput { csv: csv_path, meta: meta_path, plot: plot_path })
}
