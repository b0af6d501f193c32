//! Run orchestration: wires grid, stepper, diagnostics and writers together
//! for the CLI and for the test harnesses.

use std::fs;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::{build_initial_data, ConfigError, RunConfig};
use crate::diagnostics::{
    self, continuous_dependence_experiment, sample_inequality, ContDepRow, InequalitySample,
    TimeSeriesRow,
};
use crate::grid::{build_dofmap, build_mesh, GridSpec};
use crate::io::{
    write_contdep_csv, write_contours_csv, write_mass_compare_csv, write_timeseries_csv,
    write_vtk,
};
use crate::stepper::{ModelVariant, Problem, State, StepError};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Diagnostics(#[from] diagnostics::DiagnosticsError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Everything a single run produces in memory.
pub struct RunOutput {
    pub rows: Vec<TimeSeriesRow>,
    pub samples: Vec<InequalitySample>,
    pub final_state: State,
    pub problem: Problem,
}

/// Runs one model variant. With an output directory the time series, VTK
/// fields and contour polylines are written; without it the run stays in
/// memory (used by the verification suites).
pub fn run_model(cfg: &RunConfig, outdir: Option<&PathBuf>) -> Result<RunOutput, AppError> {
    cfg.validate()?;
    let mesh = build_mesh(GridSpec::new(cfg.n))?;
    let dofmap = build_dofmap(&mesh);
    let model = cfg.material_model()?;
    let problem = Problem::new(mesh, dofmap, model);
    let ts = cfg.time_stepping();

    if let Some(dir) = outdir {
        fs::create_dir_all(dir)?;
    }

    let initial = build_initial_data(&problem.mesh).into_state();
    let zero_report = crate::stepper::DecouplingReport::default();
    let mut rows = vec![diagnostics::time_series_row(
        &problem.mesh,
        &problem.model,
        &initial,
        &zero_report,
    )];
    let mut samples = vec![sample_inequality(&problem.mesh, &initial, None, cfg.dt)];

    if let Some(dir) = outdir {
        if cfg.write_vtk {
            write_fields(dir, cfg, &problem, &initial, 0)?;
        }
    }

    let mut prev = initial.clone();
    let mut io_error: Option<io::Error> = None;
    let final_state = {
        let mut sink = |step: usize, state: &State, report: &crate::stepper::DecouplingReport| {
            rows.push(diagnostics::time_series_row(
                &problem.mesh,
                &problem.model,
                state,
                report,
            ));
            samples.push(sample_inequality(&problem.mesh, state, Some(&prev), cfg.dt));
            if let Some(dir) = outdir {
                if step % cfg.output_every == 0 && io_error.is_none() {
                    if let Err(e) = write_fields(dir, cfg, &problem, state, step) {
                        io_error = Some(e);
                    }
                }
            }
            prev = state.clone();
        };
        problem.run(initial, &ts, &mut sink)?
    };
    if let Some(e) = io_error {
        return Err(AppError::Io(e));
    }

    if let Some(dir) = outdir {
        let path = dir.join(format!("timeseries_{}.csv", cfg.model.name()));
        write_timeseries_csv(&path, &rows)?;
    }

    Ok(RunOutput {
        rows,
        samples,
        final_state,
        problem,
    })
}

fn write_fields(
    dir: &PathBuf,
    cfg: &RunConfig,
    problem: &Problem,
    state: &State,
    step: usize,
) -> io::Result<()> {
    if cfg.write_vtk {
        let darcy =
            diagnostics::darcy_velocity(&problem.mesh, &problem.model, &state.phi, &state.p);
        let path = dir.join(format!("fields_{}_step{:05}.vtk", cfg.model.name(), step));
        write_vtk(&path, &problem.mesh, state, &darcy)?;
    }
    if cfg.write_contours {
        let sets = vec![
            diagnostics::marching_squares(&problem.mesh, &state.phi, 0.5),
            diagnostics::marching_squares(&problem.mesh, &state.phi, 0.9),
        ];
        let path = dir.join(format!("contours_{}_step{:05}.csv", cfg.model.name(), step));
        write_contours_csv(&path, &sets)?;
    }
    Ok(())
}

/// Runs all three model variants on the same configuration and writes the
/// joint tumor-mass table.
pub fn compare_models(cfg: &RunConfig, outdir: Option<&PathBuf>) -> Result<[RunOutput; 3], AppError> {
    let variants = [
        ModelVariant::CahnHilliard,
        ModelVariant::CahnLarche,
        ModelVariant::CahnHilliardBiot,
    ];
    let mut outputs = Vec::new();
    for v in variants {
        let mut sub = cfg.clone();
        sub.model = v;
        outputs.push(run_model(&sub, outdir)?);
    }
    let [ch, cl, chb]: [RunOutput; 3] = outputs
        .try_into()
        .unwrap_or_else(|_| unreachable!("three variants produce three outputs"));
    if let Some(dir) = outdir {
        let times: Vec<f64> = ch.rows.iter().map(|r| r.time).collect();
        let mass = |o: &RunOutput| o.rows.iter().map(|r| r.tumor_mass).collect::<Vec<f64>>();
        write_mass_compare_csv(
            &dir.join("mass_compare.csv"),
            &times,
            &mass(&ch),
            &mass(&cl),
            &mass(&chb),
        )?;
    }
    Ok([ch, cl, chb])
}

/// Default perturbation scales of the continuous-dependence harness.
pub const CONTDEP_SCALES: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Runs the continuous-dependence experiment; requires the
/// constant-coefficient configuration.
pub fn run_continuous_dependence(
    cfg: &RunConfig,
    scales: &[f64],
    outdir: Option<&PathBuf>,
) -> Result<Vec<ContDepRow>, AppError> {
    cfg.validate()?;
    let mesh = build_mesh(GridSpec::new(cfg.n))?;
    let dofmap = build_dofmap(&mesh);
    let model = cfg.material_model()?;
    let problem = Problem::new(mesh, dofmap, model);
    let ts = cfg.time_stepping();
    let initial = build_initial_data(&problem.mesh).into_state();
    let rows = continuous_dependence_experiment(&problem, &initial, &ts, scales)?;
    if let Some(dir) = outdir {
        fs::create_dir_all(dir)?;
        write_contdep_csv(&dir.join("continuous_dependence.csv"), &rows)?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::timeseries_csv_string;

    fn small_cfg() -> RunConfig {
        RunConfig {
            n: 8,
            dt: 2f64.powi(-6),
            t_final: 2f64.powi(-4),
            ..Default::default()
        }
    }

    #[test]
    fn run_produces_rows_per_step() {
        let cfg = small_cfg();
        let out = run_model(&cfg, None).unwrap();
        assert_eq!(out.rows.len(), 5); // initial + 4 steps
        assert_eq!(out.samples.len(), 5);
        assert!((out.final_state.time - cfg.t_final).abs() < 1e-12);
    }

    #[test]
    fn identical_configs_give_identical_csv_bytes() {
        let cfg = small_cfg();
        let a = run_model(&cfg, None).unwrap();
        let b = run_model(&cfg, None).unwrap();
        assert_eq!(
            timeseries_csv_string(&a.rows),
            timeseries_csv_string(&b.rows)
        );
    }

    #[test]
    fn ch_mass_column_is_nondecreasing() {
        let mut cfg = small_cfg();
        cfg.model = ModelVariant::CahnHilliard;
        cfg.t_final = 8.0 * cfg.dt;
        let out = run_model(&cfg, None).unwrap();
        let csv = timeseries_csv_string(&out.rows);
        let masses: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|line| line.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(masses.len(), 9);
        for w in masses.windows(2) {
            assert!(w[1] >= w[0] - 1e-8, "mass decreased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_cfg();
        cfg.output_every = 2;
        let path = dir.path().to_path_buf();
        run_model(&cfg, Some(&path)).unwrap();
        assert!(path.join("timeseries_chb.csv").exists());
        assert!(path.join("fields_chb_step00000.vtk").exists());
        assert!(path.join("contours_chb_step00002.csv").exists());
    }
}
