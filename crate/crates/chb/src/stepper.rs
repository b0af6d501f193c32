//! Semi-implicit time stepping with iterative decoupling.
//!
//! One step advances the coupled fields from `tⁿ` to `tⁿ⁺¹` by a fixed-point
//! loop that alternates two sub-solves until the iterates stop moving:
//!
//! 1. the linear flow–mechanics block for `(u, θ, p)` with the phase field
//!    frozen at the current outer iterate (monolithic, solved by BiCGStab);
//! 2. the nonlinear Cahn–Hilliard block for `(φ, μ)` by Newton, with
//!    `(u, θ)` frozen at the values just computed.
//!
//! The double well is split convex–concave: the expansive part is evaluated
//! at `φⁿ`, the contractive part implicitly. Mobility and the growth source
//! are frozen at `φⁿ` for the whole step; all other coefficients are
//! re-assembled from the current outer iterate, so the converged fixed point
//! solves the fully coupled semi-implicit system.

use thiserror::Error;

use crate::assembly::{
    assemble_coupling, assemble_div_coupling, assemble_elasticity, assemble_scalar_load,
    assemble_scalar_mass, assemble_weighted_mass, assemble_weighted_stiffness,
    eval_scalar_at_gauss, eval_strain_at_gauss, lumped_mass, map_gauss, GP,
};
use crate::grid::{DofMap, Mesh};
use crate::material::{
    double_well_prime_contractive, double_well_prime_expansive, MaterialModel,
    DOUBLE_WELL_CONTRACTIVE_SLOPE,
};
use crate::sparse::{
    append_scaled_block, append_scaled_block_transposed, eliminate_dirichlet,
    solve_general_with_guess, solve_spd_with_guess, SolverConfig, SparseError, SparseMatrix,
};

#[derive(Debug, Error)]
pub enum StepError {
    #[error("linear solver failed: {0}")]
    Linear(#[from] SparseError),
    #[error("Newton did not converge in {iterations} iterations (residual {residual:.3e})")]
    NewtonNonConvergence { iterations: usize, residual: f64 },
    #[error(
        "decoupling loop did not converge in {iterations} iterations (relative change {change:.3e})"
    )]
    OuterNonConvergence { iterations: usize, change: f64 },
    #[error("step {index} failed after time-step halving: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<StepError>,
    },
}

/// Which model the stepper advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    CahnHilliard,
    CahnLarche,
    CahnHilliardBiot,
}

impl ModelVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ch" => Some(Self::CahnHilliard),
            "cl" => Some(Self::CahnLarche),
            "chb" => Some(Self::CahnHilliardBiot),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CahnHilliard => "ch",
            Self::CahnLarche => "cl",
            Self::CahnHilliardBiot => "chb",
        }
    }
}

/// The five coupled nodal fields at one time level.
#[derive(Debug, Clone)]
pub struct State {
    pub phi: Vec<f64>,
    pub mu: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    pub time: f64,
}

impl State {
    pub fn zeros(num_nodes: usize) -> Self {
        Self {
            phi: vec![0.0; num_nodes],
            mu: vec![0.0; num_nodes],
            u: vec![0.0; 2 * num_nodes],
            theta: vec![0.0; num_nodes],
            p: vec![0.0; num_nodes],
            time: 0.0,
        }
    }
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy)]
pub struct TimeStepConfig {
    pub dt: f64,
    pub t_final: f64,
    pub model: ModelVariant,
    /// Relative change of (φ, u, p) below which the outer loop stops.
    pub decoupling_tol: f64,
    pub decoupling_max_iters: usize,
    /// Tolerance on the Newton residual in the lumped dual norm.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Uniqueness-theorem regime; must match the material model.
    pub constant_coefficients: bool,
    pub linear: SolverConfig,
}

impl Default for TimeStepConfig {
    fn default() -> Self {
        Self {
            dt: 2f64.powi(-7),
            t_final: 1.5,
            model: ModelVariant::CahnHilliardBiot,
            decoupling_tol: 1e-6,
            decoupling_max_iters: 50,
            newton_tol: 1e-9,
            newton_max_iters: 25,
            constant_coefficients: false,
            linear: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NewtonStats {
    pub iterations: usize,
    pub final_residual: f64,
    pub linear_iterations: usize,
}

/// Convergence record of one decoupled step.
#[derive(Debug, Clone, Default)]
pub struct DecouplingReport {
    pub outer_iterations: usize,
    pub final_relative_change: f64,
    /// Relative change after each outer iteration.
    pub outer_changes: Vec<f64>,
    pub newton_iterations_per_outer: Vec<usize>,
    pub linear_iterations_total: usize,
    pub linear_residual_max: f64,
}

/// Mesh, unknown layout and constitutive model of one simulation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub model: MaterialModel,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl Problem {
    pub fn new(mesh: Mesh, dofmap: DofMap, model: MaterialModel) -> Self {
        Self { mesh, dofmap, model }
    }

    fn num_nodes(&self) -> usize {
        self.mesh.num_nodes()
    }

    /// Assembles the constrained monolithic system for `(u, θ, p)` with the
    /// phase field frozen at `phi_iter`. The three equations are the
    /// viscoelastic/elastic row with the `−(α(φ)p, div v)` coupling, the
    /// fluid-content row `(θ−θⁿ)/Δt + (κ(φ)∇p, ∇ζ) = (S_θ, ζ)` and the
    /// pressure closure `(p, ζ) = (M(φ)(θ − α(φ)div u), ζ)`.
    ///
    /// Rows are paired with unknown slots so that every diagonal block is
    /// definite for the Jacobi-preconditioned solver: the (negated) closure
    /// row sits in the θ slot and the fluid-content row in the p slot, whose
    /// diagonal then carries the permeability stiffness:
    ///
    /// ```text
    /// [ Aᵥ/Δt + A_ℂ(φ)    0        −Bᵀ(α) ] [u]   [load_u]
    /// [ −C(Mα)            D(M)     −Mₛ    ] [θ] = [0]
    /// [ 0                 Mₛ/Δt     K(κ)  ] [p]   [Mₛθⁿ/Δt + (S_θ,ζ)]
    /// ```
    pub fn assemble_flow_mechanics(
        &self,
        phi_iter: &[f64],
        state_old: &State,
        dt: f64,
    ) -> (SparseMatrix, Vec<f64>) {
        let n = self.num_nodes();
        let nu = 2 * n;
        let dim = nu + 2 * n;
        let phi_g = eval_scalar_at_gauss(&self.mesh, phi_iter);

        let (a_el, load_u) = assemble_elasticity(&self.mesh, &self.model, &phi_g, &state_old.u, dt);
        let kappa_g = map_gauss(&phi_g, |p| self.model.kappa(p));
        let k_kappa = assemble_weighted_stiffness(&self.mesh, &kappa_g);
        let mass = assemble_scalar_mass(&self.mesh);
        let (b_alpha, d_m) = assemble_coupling(&self.mesh, &self.model, &phi_g);
        let malpha_g = map_gauss(&phi_g, |p| self.model.compressibility(p) * self.model.biot_willis(p));
        let c_malpha = assemble_div_coupling(&self.mesh, &malpha_g);

        let mut triplets = Vec::new();
        append_scaled_block(&mut triplets, &a_el, 0, 0, 1.0);
        append_scaled_block_transposed(&mut triplets, &b_alpha, 0, nu + n, -1.0);
        append_scaled_block(&mut triplets, &c_malpha, nu, 0, -1.0);
        append_scaled_block(&mut triplets, &d_m, nu, nu, 1.0);
        append_scaled_block(&mut triplets, &mass, nu, nu + n, -1.0);
        append_scaled_block(&mut triplets, &mass, nu + n, nu, 1.0 / dt);
        append_scaled_block(&mut triplets, &k_kappa, nu + n, nu + n, 1.0);

        let mut rhs = vec![0.0; dim];
        rhs[..nu].copy_from_slice(&load_u);
        let m_theta_old = mass.spmv(&state_old.theta);
        let s_theta = assemble_scalar_load(
            &self.mesh,
            &vec![self.model.table.s_theta; self.mesh.num_elements() * GP],
        );
        for i in 0..n {
            rhs[nu + n + i] = m_theta_old[i] / dt + s_theta[i];
        }

        let mut constrained = vec![false; dim];
        constrained[..nu].copy_from_slice(&self.dofmap.dirichlet_mask);
        eliminate_dirichlet(&mut triplets, &mut rhs, &constrained);
        let matrix = SparseMatrix::from_triplets(dim, dim, &triplets).expect("indices in range");
        (matrix, rhs)
    }

    /// Solves the flow–mechanics block. For the Cahn–Larché variant the
    /// `(θ, p)` rows are skipped and the pressure coupling is dropped; only
    /// the quasi-static elasticity system is solved.
    #[allow(clippy::type_complexity)]
    pub fn step_flow_mechanics(
        &self,
        state_old: &State,
        phi_iter: &[f64],
        guess: Option<(&[f64], &[f64], &[f64])>,
        cfg: &TimeStepConfig,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, usize, f64), StepError> {
        let n = self.num_nodes();
        let nu = 2 * n;
        match cfg.model {
            ModelVariant::CahnLarche => {
                let phi_g = eval_scalar_at_gauss(&self.mesh, phi_iter);
                let (a_el, mut rhs) =
                    assemble_elasticity(&self.mesh, &self.model, &phi_g, &state_old.u, cfg.dt);
                let mut triplets: Vec<_> = a_el.entries().collect();
                eliminate_dirichlet(&mut triplets, &mut rhs, &self.dofmap.dirichlet_mask);
                let a = SparseMatrix::from_triplets(nu, nu, &triplets).expect("in range");
                let sol = solve_spd_with_guess(&a, &rhs, guess.map(|g| g.0), &cfg.linear)?;
                let mut u = sol.x;
                for (i, &fixed) in self.dofmap.dirichlet_mask.iter().enumerate() {
                    if fixed {
                        u[i] = 0.0;
                    }
                }
                Ok((
                    u,
                    state_old.theta.clone(),
                    state_old.p.clone(),
                    sol.stats.iterations,
                    sol.stats.residual,
                ))
            }
            ModelVariant::CahnHilliardBiot => {
                let (a, rhs) = self.assemble_flow_mechanics(phi_iter, state_old, cfg.dt);
                let stacked_guess = guess.map(|(u, theta, p)| {
                    let mut x = Vec::with_capacity(nu + 2 * n);
                    x.extend_from_slice(u);
                    x.extend_from_slice(theta);
                    x.extend_from_slice(p);
                    x
                });
                let sol =
                    solve_general_with_guess(&a, &rhs, stacked_guess.as_deref(), &cfg.linear)?;
                let mut u = sol.x[..nu].to_vec();
                for (i, &fixed) in self.dofmap.dirichlet_mask.iter().enumerate() {
                    if fixed {
                        u[i] = 0.0;
                    }
                }
                let theta = sol.x[nu..nu + n].to_vec();
                let p = sol.x[nu + n..].to_vec();
                Ok((u, theta, p, sol.stats.iterations, sol.stats.residual))
            }
            ModelVariant::CahnHilliard => {
                unreachable!("the Cahn-Hilliard variant has no flow-mechanics block")
            }
        }
    }

    /// Builds the per-step Cahn–Hilliard data (mobility and sources frozen at
    /// `φⁿ`).
    pub fn cahn_hilliard_step(&self, state_old: &State, cfg: &TimeStepConfig) -> ChStep<'_> {
        let phi_old_g = eval_scalar_at_gauss(&self.mesh, &state_old.phi);
        let mobility_g = map_gauss(&phi_old_g, |p| self.model.mobility(p));
        let k_mobility = assemble_weighted_stiffness(&self.mesh, &mobility_g);
        let unit = vec![1.0; self.mesh.num_elements() * GP];
        let stiffness = assemble_weighted_stiffness(&self.mesh, &unit);
        let mass = assemble_scalar_mass(&self.mesh);
        let src_g = map_gauss(&phi_old_g, |p| self.model.source_phi(p));
        let src_load = assemble_scalar_load(&self.mesh, &src_g);
        let expansive_g = map_gauss(&phi_old_g, double_well_prime_expansive);
        let expansive_load = assemble_scalar_load(&self.mesh, &expansive_g);
        let mass_phi_old = mass.spmv(&state_old.phi);
        ChStep {
            problem: self,
            dt: cfg.dt,
            variant: cfg.model,
            newton_tol: cfg.newton_tol,
            newton_max_iters: cfg.newton_max_iters,
            linear: cfg.linear,
            mass,
            stiffness,
            k_mobility,
            src_load,
            expansive_load,
            mass_phi_old,
            lumped: lumped_mass(&self.mesh),
        }
    }

    /// One time step by the iterative decoupling scheme.
    pub fn advance(
        &self,
        state_old: &State,
        cfg: &TimeStepConfig,
    ) -> Result<(State, DecouplingReport), StepError> {
        debug_assert_eq!(cfg.constant_coefficients, self.model.constant_coefficients);
        let ch = self.cahn_hilliard_step(state_old, cfg);
        let mut report = DecouplingReport::default();

        if cfg.model == ModelVariant::CahnHilliard {
            // no back-coupling: the loop degenerates to a single solve
            let (phi, mu, stats) =
                ch.solve_newton(&state_old.u, &state_old.theta, &state_old.phi, &state_old.mu)?;
            report.outer_iterations = 1;
            report.newton_iterations_per_outer.push(stats.iterations);
            report.linear_iterations_total += stats.linear_iterations;
            report.outer_changes.push(0.0);
            return Ok((
                State {
                    phi,
                    mu,
                    u: state_old.u.clone(),
                    theta: state_old.theta.clone(),
                    p: state_old.p.clone(),
                    time: state_old.time + cfg.dt,
                },
                report,
            ));
        }

        let mut phi_c = state_old.phi.clone();
        let mut mu_c = state_old.mu.clone();
        let mut u_c = state_old.u.clone();
        let mut theta_c = state_old.theta.clone();
        let mut p_c = state_old.p.clone();

        for outer in 1..=cfg.decoupling_max_iters {
            let (u_new, theta_new, p_new, lin_iters, lin_res) = self.step_flow_mechanics(
                state_old,
                &phi_c,
                Some((&u_c, &theta_c, &p_c)),
                cfg,
            )?;
            report.linear_iterations_total += lin_iters;
            report.linear_residual_max = report.linear_residual_max.max(lin_res);

            let (phi_new, mu_new, nstats) = ch.solve_newton(&u_new, &theta_new, &phi_c, &mu_c)?;
            report.newton_iterations_per_outer.push(nstats.iterations);
            report.linear_iterations_total += nstats.linear_iterations;

            let eps = 1e-12;
            let change = [
                diff_norm(&phi_new, &phi_c) / (l2(&phi_new) + eps),
                diff_norm(&u_new, &u_c) / (l2(&u_new) + eps),
                diff_norm(&p_new, &p_c) / (l2(&p_new) + eps),
            ]
            .into_iter()
            .fold(0.0f64, f64::max);

            phi_c = phi_new;
            mu_c = mu_new;
            u_c = u_new;
            theta_c = theta_new;
            p_c = p_new;

            report.outer_iterations = outer;
            report.outer_changes.push(change);
            report.final_relative_change = change;
            if change < cfg.decoupling_tol {
                return Ok((
                    State {
                        phi: phi_c,
                        mu: mu_c,
                        u: u_c,
                        theta: theta_c,
                        p: p_c,
                        time: state_old.time + cfg.dt,
                    },
                    report,
                ));
            }
        }
        Err(StepError::OuterNonConvergence {
            iterations: report.outer_iterations,
            change: report.final_relative_change,
        })
    }

    /// Runs the time loop from `initial.time` over `round(t_final/dt)` steps
    /// of size `dt`. On a step failure the step is retried once as two half
    /// steps; a second failure aborts the run. The sink is invoked after
    /// every completed step.
    pub fn run(
        &self,
        initial: State,
        cfg: &TimeStepConfig,
        sink: &mut dyn FnMut(usize, &State, &DecouplingReport),
    ) -> Result<State, StepError> {
        let steps = (cfg.t_final / cfg.dt).round() as usize;
        let mut state = initial;
        for index in 1..=steps {
            match self.advance(&state, cfg) {
                Ok((next, report)) => {
                    state = next;
                    sink(index, &state, &report);
                }
                Err(_) => {
                    // halve the time step once: two half steps to the same level
                    let half = TimeStepConfig { dt: 0.5 * cfg.dt, ..*cfg };
                    let (mid, _) = self.advance(&state, &half).map_err(|e| StepError::Step {
                        index,
                        source: Box::new(e),
                    })?;
                    let (next, report) =
                        self.advance(&mid, &half).map_err(|e| StepError::Step {
                            index,
                            source: Box::new(e),
                        })?;
                    state = next;
                    sink(index, &state, &report);
                }
            }
        }
        Ok(state)
    }
}

/// Per-step data of the Cahn–Hilliard block: everything frozen at `φⁿ` plus
/// the operators that do not change across outer iterations.
pub struct ChStep<'a> {
    problem: &'a Problem,
    dt: f64,
    variant: ModelVariant,
    newton_tol: f64,
    newton_max_iters: usize,
    linear: SolverConfig,
    pub mass: SparseMatrix,
    stiffness: SparseMatrix,
    k_mobility: SparseMatrix,
    src_load: Vec<f64>,
    expansive_load: Vec<f64>,
    mass_phi_old: Vec<f64>,
    lumped: Vec<f64>,
}

/// Frozen strain and fluid-content data at the Gauss points.
struct FrozenCoupling {
    tr_eps: Vec<f64>,
    eps_dd: Vec<f64>,
    theta: Vec<f64>,
}

impl<'a> ChStep<'a> {
    fn freeze(&self, u: &[f64], theta: &[f64]) -> FrozenCoupling {
        let eps = eval_strain_at_gauss(&self.problem.mesh, u);
        let theta_g = eval_scalar_at_gauss(&self.problem.mesh, theta);
        FrozenCoupling {
            tr_eps: eps.iter().map(|e| e.trace()).collect(),
            eps_dd: eps.iter().map(|e| e.ddot(e)).collect(),
            theta: theta_g,
        }
    }

    fn coupling_density(&self, frozen: &FrozenCoupling, i: usize, phi: f64) -> f64 {
        let model = &self.problem.model;
        match self.variant {
            ModelVariant::CahnHilliard => 0.0,
            ModelVariant::CahnLarche => {
                model.dphi_elastic_density(phi, frozen.tr_eps[i], frozen.eps_dd[i])
            }
            ModelVariant::CahnHilliardBiot => {
                model.dphi_elastic_density(phi, frozen.tr_eps[i], frozen.eps_dd[i])
                    + model.dphi_fluid_density(phi, frozen.theta[i], frozen.tr_eps[i])
            }
        }
    }

    fn coupling_density_prime(&self, frozen: &FrozenCoupling, i: usize, phi: f64) -> f64 {
        let model = &self.problem.model;
        match self.variant {
            ModelVariant::CahnHilliard => 0.0,
            ModelVariant::CahnLarche => {
                model.dphi_elastic_density_prime(phi, frozen.tr_eps[i], frozen.eps_dd[i])
            }
            ModelVariant::CahnHilliardBiot => {
                model.dphi_elastic_density_prime(phi, frozen.tr_eps[i], frozen.eps_dd[i])
                    + model.dphi_fluid_density_prime(phi, frozen.theta[i], frozen.tr_eps[i])
            }
        }
    }

    /// Nonlinear residual of the combined (φ, μ) rows.
    pub fn residual(&self, u: &[f64], theta: &[f64], phi: &[f64], mu: &[f64]) -> Vec<f64> {
        let frozen = self.freeze(u, theta);
        self.residual_frozen(&frozen, phi, mu)
    }

    fn residual_frozen(&self, frozen: &FrozenCoupling, phi: &[f64], mu: &[f64]) -> Vec<f64> {
        let n = self.problem.num_nodes();
        let mesh = &self.problem.mesh;
        let gamma = self.problem.model.table.gamma;
        let phi_g = eval_scalar_at_gauss(mesh, phi);
        let nonlinear_g: Vec<f64> = (0..phi_g.len())
            .map(|i| {
                double_well_prime_contractive(phi_g[i]) + self.coupling_density(frozen, i, phi_g[i])
            })
            .collect();
        let nonlinear = assemble_scalar_load(mesh, &nonlinear_g);

        let m_phi = self.mass.spmv(phi);
        let m_mu = self.mass.spmv(mu);
        let k_mu = self.k_mobility.spmv(mu);
        let k_phi = self.stiffness.spmv(phi);

        let mut r = vec![0.0; 2 * n];
        for i in 0..n {
            r[i] = (m_phi[i] - self.mass_phi_old[i]) / self.dt + k_mu[i] - self.src_load[i];
            r[n + i] =
                m_mu[i] - gamma * k_phi[i] - nonlinear[i] - self.expansive_load[i];
        }
        r
    }

    /// Analytic Newton Jacobian at `phi`.
    pub fn jacobian(&self, u: &[f64], theta: &[f64], phi: &[f64]) -> SparseMatrix {
        let frozen = self.freeze(u, theta);
        self.jacobian_frozen(&frozen, phi)
    }

    fn jacobian_frozen(&self, frozen: &FrozenCoupling, phi: &[f64]) -> SparseMatrix {
        let n = self.problem.num_nodes();
        let mesh = &self.problem.mesh;
        let gamma = self.problem.model.table.gamma;
        let phi_g = eval_scalar_at_gauss(mesh, phi);
        let weight_g: Vec<f64> = (0..phi_g.len())
            .map(|i| {
                DOUBLE_WELL_CONTRACTIVE_SLOPE + self.coupling_density_prime(frozen, i, phi_g[i])
            })
            .collect();
        let w = assemble_weighted_mass(mesh, &weight_g);

        let mut triplets = Vec::new();
        append_scaled_block(&mut triplets, &self.mass, 0, 0, 1.0 / self.dt);
        append_scaled_block(&mut triplets, &self.k_mobility, 0, n, 1.0);
        append_scaled_block(&mut triplets, &self.stiffness, n, 0, -gamma);
        append_scaled_block(&mut triplets, &w, n, 0, -1.0);
        append_scaled_block(&mut triplets, &self.mass, n, n, 1.0);
        SparseMatrix::from_triplets(2 * n, 2 * n, &triplets).expect("in range")
    }

    /// Residual norm in the lumped dual norm (mesh-size independent).
    pub fn residual_norm(&self, r: &[f64]) -> f64 {
        let n = self.problem.num_nodes();
        let mut acc = 0.0;
        for i in 0..n {
            acc += (r[i] * r[i] + r[n + i] * r[n + i]) / self.lumped[i];
        }
        acc.sqrt()
    }

    /// Newton iteration from the initial guess `(phi_guess, mu_guess)`.
    pub fn solve_newton(
        &self,
        u: &[f64],
        theta: &[f64],
        phi_guess: &[f64],
        mu_guess: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>, NewtonStats), StepError> {
        let n = self.problem.num_nodes();
        let frozen = self.freeze(u, theta);
        let mut phi = phi_guess.to_vec();
        let mut mu = mu_guess.to_vec();
        let mut stats = NewtonStats::default();
        for iter in 0..=self.newton_max_iters {
            let r = self.residual_frozen(&frozen, &phi, &mu);
            stats.final_residual = self.residual_norm(&r);
            if stats.final_residual <= self.newton_tol {
                return Ok((phi, mu, stats));
            }
            if iter == self.newton_max_iters {
                break;
            }
            let j = self.jacobian_frozen(&frozen, &phi);
            let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
            let sol = solve_general_with_guess(&j, &neg_r, None, &self.linear)?;
            stats.linear_iterations += sol.stats.iterations;
            for i in 0..n {
                phi[i] += sol.x[i];
                mu[i] += sol.x[n + i];
            }
            stats.iterations = iter + 1;
        }
        Err(StepError::NewtonNonConvergence {
            iterations: stats.iterations,
            residual: stats.final_residual,
        })
    }
}
