use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use chb::app::{compare_models, run_continuous_dependence, run_model, CONTDEP_SCALES};
use chb::config::{parse_config, RunConfig};
use chb::stepper::ModelVariant;

/// Finite-element simulator for coupled phase-field / poro-visco-elastic
/// tumor growth on the unit square.
#[derive(Parser, Debug)]
#[command(name = "chb", version, about)]
struct Cli {
    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model variant: ch, cl or chb.
    #[arg(long)]
    model: Option<String>,
    /// Grid divisions per side.
    #[arg(long)]
    n: Option<usize>,
    /// Time-step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    tfinal: Option<f64>,
    /// Output directory.
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Run all three model variants and write the joint mass table.
    #[arg(long)]
    compare_models: bool,
    /// Run the continuous-dependence harness (needs constant coefficients).
    #[arg(long)]
    continuous_dependence: bool,
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    if let Some(model) = &cli.model {
        cfg.model = ModelVariant::parse(model)
            .ok_or_else(|| format!("invalid model `{model}` (expected ch, cl or chb)"))?;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(dt) = cli.dt {
        cfg.dt = dt;
    }
    if let Some(tfinal) = cli.tfinal {
        cfg.t_final = tfinal;
    }
    if let Some(outdir) = &cli.outdir {
        cfg.outdir = outdir.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), String> {
    if cli.compare_models && cli.continuous_dependence {
        return Err("--compare-models conflicts with --continuous-dependence".into());
    }
    if cli.compare_models && cli.model.is_some() {
        return Err("--compare-models conflicts with --model".into());
    }
    let cfg = build_config(&cli)?;
    let outdir = cfg.outdir.clone();

    if cli.continuous_dependence {
        if !cfg.constant_coefficients {
            return Err(
                "--continuous-dependence requires `constant_coefficients = true` in the config"
                    .into(),
            );
        }
        let rows = run_continuous_dependence(&cfg, &CONTDEP_SCALES, Some(&outdir))
            .map_err(|e| e.to_string())?;
        for r in &rows {
            println!(
                "scale {:9.3e}: lhs {:12.6e}  rhs {:12.6e}  ratio {:12.6e}",
                r.scale, r.lhs_total, r.rhs, r.ratio
            );
        }
        return Ok(());
    }

    if cli.compare_models {
        let [ch, cl, chb] = compare_models(&cfg, Some(&outdir)).map_err(|e| e.to_string())?;
        println!(
            "final masses: ch {:.6}  cl {:.6}  chb {:.6}",
            ch.rows.last().unwrap().tumor_mass,
            cl.rows.last().unwrap().tumor_mass,
            chb.rows.last().unwrap().tumor_mass,
        );
        return Ok(());
    }

    let out = run_model(&cfg, Some(&outdir)).map_err(|e| e.to_string())?;
    let last = out.rows.last().unwrap();
    println!(
        "{}: t = {:.6}, mass = {:.6}, E = {:.6e}",
        cfg.model.name(),
        last.time,
        last.tumor_mass,
        last.e_total
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
