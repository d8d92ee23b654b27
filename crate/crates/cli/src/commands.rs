//! Command execution. `execute` is pure given the config; `write_outputs`
//! persists its results.

use std::fs;
use std::path::{Path, PathBuf};

use relloc::analysis::{is_bimodal_3d, principal_axis, two_peak_signature};
use relloc::discriminator::{average_sweep, build_hypotheses, ExperimentConfig};
use relloc::momentum::MomentumGrid;
use relloc::rng::seeded;
use relloc::wave1d::{RelativeWavefunction1D, ScatterOutcome1D, Scatterer1D};
use relloc::wave3d::{density_export_3d, RelativeWavefunction3D, ScatterOutcome3D, Scatterer3D};

use crate::config::{
    DiscriminateConfig, RunConfig, Simulate1dConfig, Simulate3dConfig,
};
use crate::error::CliError;
use crate::output::{num, RunRecord, RunResults, Table};
use crate::tof::tof_resolution;

/// Results plus bulky outputs that only go to data files.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub results: RunResults,
    pub cloud: Vec<[f64; 3]>,
}

pub fn execute(config: &RunConfig) -> Result<Execution, CliError> {
    let (results, cloud) = match config {
        RunConfig::Simulate1d(c) => (simulate1d(c)?, Vec::new()),
        RunConfig::Simulate3d(c) => simulate3d(c)?,
        RunConfig::Discriminate(c) => (discriminate(c)?, Vec::new()),
        RunConfig::Tof(p) => (RunResults::Tof(tof_resolution(p)?), Vec::new()),
    };
    Ok(Execution { results, cloud })
}

fn simulate1d(c: &Simulate1dConfig) -> Result<RunResults, CliError> {
    let source = c.spectrum.build()?;
    let grid = MomentumGrid::new(c.momentum.p_max, c.momentum.p_bins)?;
    let mut state = RelativeWavefunction1D::flat(c.half_width, c.grid)?;
    let events = Scatterer1D::default().run_localisation(
        &mut state,
        c.photons,
        &source,
        &mut seeded(c.seed),
    )?;
    let hypotheses = build_hypotheses(&state, &grid)?;
    let density = state.position_density();
    Ok(RunResults::Simulate1d {
        events,
        x: state.positions().to_vec(),
        two_peaks: two_peak_signature(&density, state.axis()).is_some(),
        position_density: density,
        p: grid.points().to_vec(),
        q_induced: hypotheses.q1().values().to_vec(),
        q_prelocalised: hypotheses.q2().values().to_vec(),
    })
}

fn simulate3d(c: &Simulate3dConfig) -> Result<(RunResults, Vec<[f64; 3]>), CliError> {
    let source = c.spectrum.build()?;
    let mut state = RelativeWavefunction3D::flat(c.half_width, c.grid)?;
    let mut rng = seeded(c.seed);
    let events =
        Scatterer3D::default().run_localisation(&mut state, c.photons, &source, &mut rng)?;
    let cloud = density_export_3d(&state, c.cloud_samples, &mut rng);
    let results = RunResults::Simulate3d {
        events,
        x: state.axis().points().to_vec(),
        marginals: state.marginals(),
        principal_axis: principal_axis(&state),
        bimodal: is_bimodal_3d(&state),
        inversion_asymmetry: state.inversion_asymmetry(),
    };
    Ok((results, cloud))
}

fn discriminate(c: &DiscriminateConfig) -> Result<RunResults, CliError> {
    if c.resolutions.is_empty() {
        return Err(CliError::Invalid("--dp needs at least one value".into()));
    }
    let source = c.spectrum.build()?;
    let experiment = ExperimentConfig {
        half_width: c.half_width,
        grid_points: c.grid,
        photons: c.photons,
        runs: c.runs,
        momenta: MomentumGrid::new(c.momentum.p_max, c.momentum.p_bins)?,
        prior: relloc::discriminator::PRIOR,
    };
    let curves = average_sweep(c.truth, c.experiments, &experiment, &c.resolutions, &source, c.seed)?;
    Ok(RunResults::Discriminate { curves })
}

/// Writes the data files and the run record; returns the paths written.
pub fn write_outputs(
    config: &RunConfig,
    execution: &Execution,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let header = |columns: &str| {
        vec![
            format!("{} {}", crate::output::version_tag(), config.name()),
            format!("config: {}", serde_json::to_string(config).expect("config serializes")),
            format!("columns: {columns}"),
        ]
    };
    let mut written = Vec::new();
    let mut table = |name: &str, columns: &[&str], units: &str, rows: Vec<Vec<String>>| {
        let path = dir.join(name);
        Table {
            comments: header(units),
            columns,
        }
        .write(&path, rows)?;
        written.push(path);
        Ok::<_, CliError>(())
    };

    match &execution.results {
        RunResults::Simulate1d {
            events,
            x,
            position_density,
            p,
            q_induced,
            q_prelocalised,
            ..
        } => {
            table(
                "position_density.csv",
                &["x", "density"],
                "x [λ], density [1/λ]",
                x.iter()
                    .zip(position_density)
                    .map(|(x, d)| vec![num(*x), num(*d)])
                    .collect(),
            )?;
            table(
                "momentum_density.csv",
                &["p", "q_induced", "q_prelocalised"],
                "p [h/λ], q_induced [λ/h], q_prelocalised [λ/h]",
                p.iter()
                    .zip(q_induced)
                    .zip(q_prelocalised)
                    .map(|((p, a), b)| vec![num(*p), num(*a), num(*b)])
                    .collect(),
            )?;
            table(
                "events.csv",
                &["photon", "kind", "theta", "wavelength"],
                "photon index, kind, theta [rad] (empty if not scattered), wavelength [λ]",
                events
                    .iter()
                    .enumerate()
                    .map(|(i, e)| match *e {
                        ScatterOutcome1D::NonScattered { wavelength } => {
                            vec![i.to_string(), "non-scattered".into(), String::new(), num(wavelength)]
                        }
                        ScatterOutcome1D::Scattered { theta, wavelength } => {
                            vec![i.to_string(), "scattered".into(), num(theta), num(wavelength)]
                        }
                    })
                    .collect(),
            )?;
        }
        RunResults::Simulate3d {
            events,
            x,
            marginals,
            ..
        } => {
            table(
                "marginals.csv",
                &["coordinate", "marginal_x", "marginal_y", "marginal_z"],
                "coordinate [λ], marginal densities along x, y, z [1/λ]",
                (0..x.len())
                    .map(|i| {
                        vec![num(x[i]), num(marginals[0][i]), num(marginals[1][i]), num(marginals[2][i])]
                    })
                    .collect(),
            )?;
            table(
                "cloud.csv",
                &["x", "y", "z"],
                "x, y, z [λ] of points drawn from the final density",
                execution
                    .cloud
                    .iter()
                    .map(|r| r.iter().map(|v| num(*v)).collect())
                    .collect(),
            )?;
            table(
                "events.csv",
                &["photon", "kind", "theta", "phi", "wavelength"],
                "photon index, kind, theta [rad], phi [rad] (empty if not scattered), wavelength [λ]",
                events
                    .iter()
                    .enumerate()
                    .map(|(i, e)| match *e {
                        ScatterOutcome3D::NonScattered { wavelength } => vec![
                            i.to_string(),
                            "non-scattered".into(),
                            String::new(),
                            String::new(),
                            num(wavelength),
                        ],
                        ScatterOutcome3D::Scattered {
                            theta,
                            phi,
                            wavelength,
                        } => vec![
                            i.to_string(),
                            "scattered".into(),
                            num(theta),
                            num(phi),
                            num(wavelength),
                        ],
                    })
                    .collect(),
            )?;
        }
        RunResults::Discriminate { curves } => {
            let names: Vec<String> = std::iter::once("run".to_string())
                .chain(curves.iter().map(|c| format!("p_nl_dp{}", c.resolution)))
                .collect();
            let columns: Vec<&str> = names.iter().map(String::as_str).collect();
            let runs = curves[0].mean_p_nl.len();
            let rows = |pick: fn(&relloc::discriminator::AveragedPosterior<f64>) -> &Vec<f64>| {
                (0..runs)
                    .map(|k| {
                        std::iter::once(k.to_string())
                            .chain(curves.iter().map(|c| num(pick(c)[k])))
                            .collect()
                    })
                    .collect::<Vec<Vec<String>>>()
            };
            table(
                "posterior.csv",
                &columns,
                "run (0 = prior), mean posterior of induced localisation per resolution δp [h/λ]",
                rows(|c| &c.mean_p_nl),
            )?;
            table(
                "posterior_stderr.csv",
                &columns,
                "run (0 = prior), standard error of each mean posterior per resolution δp [h/λ]",
                rows(|c| &c.std_error),
            )?;
        }
        RunResults::Tof(_) => {}
    }
    let record = RunRecord::new(config.clone(), execution.results.clone());
    written.push(record.write(dir)?);
    Ok(written)
}

/// One-paragraph human summary for stdout.
pub fn summary(results: &RunResults) -> String {
    match results {
        RunResults::Simulate1d {
            events, two_peaks, ..
        } => format!(
            "{} photons ({} scattered); two mirror peaks: {}",
            events.len(),
            events.iter().filter(|e| e.is_scattered()).count(),
            if *two_peaks { "yes" } else { "no" }
        ),
        RunResults::Simulate3d {
            events,
            bimodal,
            principal_axis,
            inversion_asymmetry,
            ..
        } => format!(
            "{} photons ({} scattered); bimodal along ({:.3}, {:.3}, {:.3}): {}; max |P(r) - P(-r)| = {:e}",
            events.len(),
            events.iter().filter(|e| e.is_scattered()).count(),
            principal_axis[0],
            principal_axis[1],
            principal_axis[2],
            if *bimodal { "yes" } else { "no" },
            inversion_asymmetry
        ),
        RunResults::Discriminate { curves } => curves
            .iter()
            .map(|c| {
                format!(
                    "dp = {}: mean P_nl after {} runs = {:.4} ± {:.4} over {} experiments",
                    c.resolution,
                    c.mean_p_nl.len() - 1,
                    c.final_mean(),
                    c.final_std_error(),
                    c.experiments
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
        RunResults::Tof(r) => format!(
            "spatial resolution {:.3} μm; {:.3} μm per h/λ; momentum window spans {:.3} mm (fits detector: {})",
            r.spatial_resolution * 1e6,
            r.displacement_per_unit * 1e6,
            r.window_span * 1e3,
            if r.fits_detector { "yes" } else { "no" }
        ),
    }
}
