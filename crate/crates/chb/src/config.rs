//! Run configuration and initial data.
//!
//! Configuration files are plain `key = value` text, one key per line, with
//! `#` comments. Omitted keys fall back to the reference setup: a 256×256
//! grid (`Δx = 2⁻⁸`), `Δt = 2⁻⁷`, final time `T = 1.5`, interfacial
//! parameter `γ = 10⁻⁴`, proliferation factor 5 and the default material
//! table. Unknown keys are rejected.

use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Mesh;
use crate::material::{MaterialModel, MaterialTable};
use crate::sparse::SolverConfig;
use crate::stepper::{ModelVariant, State, TimeStepConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for key `{key}`")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

/// Full description of one simulation run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub model: ModelVariant,
    pub material: MaterialTable,
    pub outdir: PathBuf,
    /// Fields/contours are written every this many steps.
    pub output_every: usize,
    pub constant_coefficients: bool,
    pub decoupling_tol: f64,
    pub decoupling_max_iters: usize,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub write_vtk: bool,
    pub write_contours: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 256,
            dt: 2f64.powi(-7),
            t_final: 1.5,
            model: ModelVariant::CahnHilliardBiot,
            material: MaterialTable::default(),
            outdir: PathBuf::from("out"),
            output_every: 16,
            constant_coefficients: false,
            decoupling_tol: 1e-6,
            decoupling_max_iters: 50,
            newton_tol: 1e-9,
            newton_max_iters: 25,
            write_vtk: true,
            write_contours: true,
        }
    }
}

impl RunConfig {
    pub fn time_stepping(&self) -> TimeStepConfig {
        TimeStepConfig {
            dt: self.dt,
            t_final: self.t_final,
            model: self.model,
            decoupling_tol: self.decoupling_tol,
            decoupling_max_iters: self.decoupling_max_iters,
            newton_tol: self.newton_tol,
            newton_max_iters: self.newton_max_iters,
            constant_coefficients: self.constant_coefficients,
            linear: SolverConfig::default(),
        }
    }

    pub fn material_model(&self) -> Result<MaterialModel, ConfigError> {
        MaterialModel::new(self.material, self.constant_coefficients)
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::Validation("n must be at least 1".into()));
        }
        if self.dt <= 0.0 {
            return Err(ConfigError::Validation("dt must be positive".into()));
        }
        if self.t_final < 0.0 {
            return Err(ConfigError::Validation("t_final must be nonnegative".into()));
        }
        if self.t_final > 0.0 && self.dt > self.t_final {
            return Err(ConfigError::Validation("dt must not exceed t_final".into()));
        }
        if self.decoupling_tol <= 0.0 || self.newton_tol <= 0.0 {
            return Err(ConfigError::Validation("tolerances must be positive".into()));
        }
        if self.output_every == 0 {
            return Err(ConfigError::Validation("output_every must be at least 1".into()));
        }
        self.material_model().map(|_| ())
    }
}

/// Parses `key = value` text into a [`RunConfig`] starting from the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::MalformedLine {
                line: line_no,
                text: raw.trim().to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value).map_err(|kind| match kind {
            KeyError::Unknown => ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            },
            KeyError::Invalid => ConfigError::InvalidValue {
                line: line_no,
                key: key.to_string(),
                value: value.to_string(),
            },
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

enum KeyError {
    Unknown,
    Invalid,
}

fn apply_key(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), KeyError> {
    fn num(value: &str) -> Result<f64, KeyError> {
        value.parse().map_err(|_| KeyError::Invalid)
    }
    fn int(value: &str) -> Result<usize, KeyError> {
        value.parse().map_err(|_| KeyError::Invalid)
    }
    fn boolean(value: &str) -> Result<bool, KeyError> {
        match value {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(KeyError::Invalid),
        }
    }
    match key {
        "n" => cfg.n = int(value)?,
        "dt" => cfg.dt = num(value)?,
        "t_final" => cfg.t_final = num(value)?,
        "model" => cfg.model = ModelVariant::parse(value).ok_or(KeyError::Invalid)?,
        "outdir" => cfg.outdir = PathBuf::from(value),
        "output_every" => cfg.output_every = int(value)?,
        "constant_coefficients" => cfg.constant_coefficients = boolean(value)?,
        "decoupling_tol" => cfg.decoupling_tol = num(value)?,
        "decoupling_max_iters" => cfg.decoupling_max_iters = int(value)?,
        "newton_tol" => cfg.newton_tol = num(value)?,
        "newton_max_iters" => cfg.newton_max_iters = int(value)?,
        "write_vtk" => cfg.write_vtk = boolean(value)?,
        "write_contours" => cfg.write_contours = boolean(value)?,
        "kappa0" => cfg.material.kappa0 = num(value)?,
        "kappa1" => cfg.material.kappa1 = num(value)?,
        "M0" => cfg.material.m0 = num(value)?,
        "M1" => cfg.material.m1 = num(value)?,
        "alpha0" => cfg.material.alpha0 = num(value)?,
        "alpha1" => cfg.material.alpha1 = num(value)?,
        "E0" => cfg.material.e0 = num(value)?,
        "E1" => cfg.material.e1 = num(value)?,
        "nu0" => cfg.material.nu0 = num(value)?,
        "nu1" => cfg.material.nu1 = num(value)?,
        "gamma" => cfg.material.gamma = num(value)?,
        "cv_scale" => cfg.material.cv_scale = num(value)?,
        "mobility_floor" => cfg.material.mobility_floor = num(value)?,
        "eigenstrain" => cfg.material.eigenstrain_coeff = num(value)?,
        "proliferation" => cfg.material.proliferation = num(value)?,
        "s_theta" => cfg.material.s_theta = num(value)?,
        "s_u_x" => cfg.material.s_u[0] = num(value)?,
        "s_u_y" => cfg.material.s_u[1] = num(value)?,
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}

/// The bump profile of the initial tumor: `exp(1 − 1/(1 − h(x)))` inside the
/// region `h < 1` and zero outside, where
/// `h(x) = (sin(14.4x₁ + 11.2x₂ − 12.8) + 1)(8x₁ − 4.2)²
///        + (sin(16x₁ − 8) + 1)(16x₂ − 8)²`.
pub fn initial_phi(x: [f64; 2]) -> f64 {
    let h = (f64::sin(14.4 * x[0] + 11.2 * x[1] - 12.8) + 1.0) * (8.0 * x[0] - 4.2).powi(2)
        + (f64::sin(16.0 * x[0] - 8.0) + 1.0) * (16.0 * x[1] - 8.0).powi(2);
    if h < 1.0 {
        f64::exp(1.0 - 1.0 / (1.0 - h))
    } else {
        0.0
    }
}

/// Nodal initial fields: the bump profile for φ, `θ₀ ≡ ½`, zeros elsewhere.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub phi0: Vec<f64>,
    pub theta0: Vec<f64>,
    pub mu0: Vec<f64>,
    pub p0: Vec<f64>,
    pub u0: Vec<f64>,
}

pub fn build_initial_data(mesh: &Mesh) -> InitialData {
    let n = mesh.num_nodes();
    InitialData {
        phi0: mesh.node_coords.iter().map(|&c| initial_phi(c)).collect(),
        theta0: vec![0.5; n],
        mu0: vec![0.0; n],
        p0: vec![0.0; n],
        u0: vec![0.0; 2 * n],
    }
}

impl InitialData {
    pub fn into_state(self) -> State {
        State {
            phi: self.phi0,
            mu: self.mu0,
            u: self.u0,
            theta: self.theta0,
            p: self.p0,
            time: 0.0,
        }
    }
}
