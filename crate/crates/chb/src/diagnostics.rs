//! Post-processing and verification: tumor mass, discrete norms, the
//! energy-inequality monitor, iso-contour extraction, Darcy velocity and the
//! continuous-dependence experiment.

use thiserror::Error;

use crate::assembly::{
    assemble_scalar_mass, assemble_weighted_stiffness, eval_scalar_at_gauss, lumped_mass, GP,
};
use crate::energy::{self, EnergyReport};
use crate::grid::Mesh;
use crate::material::{double_well, MaterialModel};
use crate::quad::ElementBasis;
use crate::sparse::{SolverConfig, SparseError, SparseMatrix};
use crate::stepper::{DecouplingReport, Problem, State, StepError, TimeStepConfig};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("continuous-dependence experiment requires constant_coefficients = true")]
    NotConstantCoefficients,
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// One row of the per-step time series.
#[derive(Debug, Clone, Copy)]
pub struct TimeSeriesRow {
    pub time: f64,
    pub tumor_mass: f64,
    pub e_phi: f64,
    pub e_u: f64,
    pub e_theta: f64,
    pub e_total: f64,
    pub grad_mu_norm_sq: f64,
    pub grad_p_norm_sq: f64,
    pub outer_iterations: usize,
}

impl TimeSeriesRow {
    pub fn new(
        time: f64,
        tumor_mass: f64,
        report: &EnergyReport,
        outer_iterations: usize,
    ) -> Self {
        Self {
            time,
            tumor_mass,
            e_phi: report.e_phi,
            e_u: report.e_u,
            e_theta: report.e_theta,
            e_total: report.total,
            grad_mu_norm_sq: report.grad_mu_norm_sq,
            grad_p_norm_sq: report.grad_p_norm_sq,
            outer_iterations,
        }
    }
}

/// Consistent-mass quadrature of `∫ φ`.
pub fn tumor_mass(mesh: &Mesh, phi: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    phi_g.iter().map(|v| basis.weight * v).sum()
}

/// `∫ f²` of a nodal scalar field.
pub fn scalar_l2_sq(mesh: &Mesh, f: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let f_g = eval_scalar_at_gauss(mesh, f);
    f_g.iter().map(|v| basis.weight * v * v).sum()
}

/// `∫ |∇f|²` of a nodal scalar field.
pub fn scalar_h1_semi_sq(mesh: &Mesh, f: &[f64]) -> f64 {
    energy::gradient_norm_sq(mesh, f)
}

pub fn scalar_h1_sq(mesh: &Mesh, f: &[f64]) -> f64 {
    scalar_l2_sq(mesh, f) + scalar_h1_semi_sq(mesh, f)
}

/// `∫ |u|²` of an interleaved vector field.
pub fn vector_l2_sq(mesh: &Mesh, u: &[f64]) -> f64 {
    let n = mesh.num_nodes();
    let ux: Vec<f64> = (0..n).map(|k| u[2 * k]).collect();
    let uy: Vec<f64> = (0..n).map(|k| u[2 * k + 1]).collect();
    scalar_l2_sq(mesh, &ux) + scalar_l2_sq(mesh, &uy)
}

/// `∫ |∇u|²` (componentwise) of an interleaved vector field.
pub fn vector_h1_semi_sq(mesh: &Mesh, u: &[f64]) -> f64 {
    let n = mesh.num_nodes();
    let ux: Vec<f64> = (0..n).map(|k| u[2 * k]).collect();
    let uy: Vec<f64> = (0..n).map(|k| u[2 * k + 1]).collect();
    scalar_h1_semi_sq(mesh, &ux) + scalar_h1_semi_sq(mesh, &uy)
}

pub fn vector_h1_sq(mesh: &Mesh, u: &[f64]) -> f64 {
    vector_l2_sq(mesh, u) + vector_h1_semi_sq(mesh, u)
}

/// `∫ Ψ(φ)` (the double well is nonnegative, so this is the L¹ norm).
pub fn psi_l1(mesh: &Mesh, phi: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    phi_g.iter().map(|&v| basis.weight * double_well(v)).sum()
}

/// Discrete `(H¹)'` norm realized through the Neumann-Laplacian solve on the
/// mean-free part plus the absolute value of the mean: with `K w = Mv − c·M1`
/// and `c = ∫v` (the domain has unit area), the norm is `‖∇w‖ + |c|`.
pub struct DualNormSolver {
    stiffness: SparseMatrix,
    mass: SparseMatrix,
    lumped: Vec<f64>,
}

impl DualNormSolver {
    pub fn new(mesh: &Mesh) -> Self {
        let unit = vec![1.0; mesh.num_elements() * GP];
        Self {
            stiffness: assemble_weighted_stiffness(mesh, &unit),
            mass: assemble_scalar_mass(mesh),
            lumped: lumped_mass(mesh),
        }
    }

    pub fn dual_h1_norm(&self, v: &[f64]) -> Result<f64, SparseError> {
        let n = v.len();
        let rhs_full = self.mass.spmv(v);
        let mean: f64 = rhs_full.iter().sum();
        // subtract M·(mean·1): the lumped weights are exactly M·1
        let rhs: Vec<f64> = (0..n).map(|i| rhs_full[i] - mean * self.lumped[i]).collect();

        // deflated CG on the singular Neumann Laplacian: keep iterates
        // orthogonal to constants
        let project = |x: &mut [f64]| {
            let avg: f64 = x.iter().sum::<f64>() / n as f64;
            x.iter_mut().for_each(|e| *e -= avg);
        };
        let mut rhs_proj = rhs.clone();
        project(&mut rhs_proj);

        let cfg = SolverConfig::default();
        let diag = self.stiffness.diagonal();
        let mut x = vec![0.0; n];
        let mut r = rhs_proj.clone();
        let mut z: Vec<f64> = (0..n).map(|i| r[i] / diag[i]).collect();
        project(&mut z);
        let mut rho: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut p = z.clone();
        let rhs_norm = rhs_proj.iter().map(|a| a * a).sum::<f64>().sqrt();
        let tol = (cfg.rel_tol * rhs_norm).max(cfg.abs_tol);
        let max_iters = 10 * n;
        for _ in 0..max_iters {
            let r_norm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r_norm <= tol {
                break;
            }
            let mut q = self.stiffness.spmv(&p);
            project(&mut q);
            let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
            if pq <= 0.0 {
                break;
            }
            let alpha = rho / pq;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            z = (0..n).map(|i| r[i] / diag[i]).collect();
            project(&mut z);
            let rho_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rho_next / rho;
            rho = rho_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let kx = self.stiffness.spmv(&x);
        let grad_sq: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
        Ok(grad_sq.max(0.0).sqrt() + mean.abs())
    }
}

/// Per-step sample of the quantities entering the energy inequality.
#[derive(Debug, Clone, Copy)]
pub struct InequalitySample {
    pub time: f64,
    pub phi_h1_sq: f64,
    pub psi_l1: f64,
    pub p_l2_sq: f64,
    pub mu_h1_sq: f64,
    pub p_h1_sq: f64,
    pub u_h1_sq: f64,
    pub dtu_h1_sq: f64,
}

/// Collects one sample; `prev` supplies the backward difference for `∂ₜu`.
pub fn sample_inequality(
    mesh: &Mesh,
    state: &State,
    prev: Option<&State>,
    dt: f64,
) -> InequalitySample {
    let dtu_h1_sq = match prev {
        Some(old) => {
            let n = mesh.num_nodes();
            let rate: Vec<f64> = (0..2 * n)
                .map(|i| (state.u[i] - old.u[i]) / dt)
                .collect();
            vector_h1_sq(mesh, &rate)
        }
        None => 0.0,
    };
    InequalitySample {
        time: state.time,
        phi_h1_sq: scalar_h1_sq(mesh, &state.phi),
        psi_l1: psi_l1(mesh, &state.phi),
        p_l2_sq: scalar_l2_sq(mesh, &state.p),
        mu_h1_sq: scalar_h1_sq(mesh, &state.mu),
        p_h1_sq: scalar_h1_sq(mesh, &state.p),
        u_h1_sq: vector_h1_sq(mesh, &state.u),
        dtu_h1_sq,
    }
}

/// Outcome of the boundedness monitor.
#[derive(Debug, Clone, Copy)]
pub struct InequalityReport {
    /// Running maximum of the left-hand-side aggregate over time.
    pub lhs_max: f64,
    /// `1 + ‖φ₀‖²_{H¹} + ‖u₀‖² + ‖θ₀‖²`.
    pub data_functional: f64,
    pub ratio: f64,
    pub bounded: bool,
    /// Set when a sample contains a non-finite value.
    pub failed: bool,
}

/// Aggregates the discrete left-hand side
/// `‖φ(t)‖²_{H¹} + ‖Ψ(φ(t))‖_{L¹} + ‖p(t)‖² + ∫₀ᵗ ‖μ‖²_{H¹} + ‖p‖²_{H¹} +
/// ‖u‖²_{H¹} + ‖∂ₜu‖²_{H¹}` at each sample, tracks its maximum and compares
/// it against `ratio_threshold` times the initial-data functional.
pub fn energy_inequality_monitor(
    samples: &[InequalitySample],
    mesh: &Mesh,
    initial: &State,
    dt: f64,
    ratio_threshold: f64,
) -> InequalityReport {
    let data_functional = 1.0
        + scalar_h1_sq(mesh, &initial.phi)
        + vector_l2_sq(mesh, &initial.u)
        + scalar_l2_sq(mesh, &initial.theta);
    let mut integral = 0.0;
    let mut lhs_max: f64 = 0.0;
    let mut failed = false;
    for (k, s) in samples.iter().enumerate() {
        let fields = [
            s.phi_h1_sq,
            s.psi_l1,
            s.p_l2_sq,
            s.mu_h1_sq,
            s.p_h1_sq,
            s.u_h1_sq,
            s.dtu_h1_sq,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            failed = true;
            break;
        }
        if k > 0 {
            integral += dt * (s.mu_h1_sq + s.p_h1_sq + s.u_h1_sq + s.dtu_h1_sq);
        }
        let lhs = s.phi_h1_sq + s.psi_l1 + s.p_l2_sq + integral;
        lhs_max = lhs_max.max(lhs);
    }
    InequalityReport {
        lhs_max,
        data_functional,
        ratio: lhs_max / data_functional,
        bounded: !failed && lhs_max <= ratio_threshold * data_functional,
        failed,
    }
}

/// Iso-contour of a nodal field: polylines of points in `[0,1]²`.
#[derive(Debug, Clone)]
pub struct ContourSet {
    pub level: f64,
    pub polylines: Vec<Vec<[f64; 2]>>,
}

impl ContourSet {
    pub fn total_length(&self) -> f64 {
        self.polylines
            .iter()
            .map(|line| {
                line.windows(2)
                    .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Even-odd containment test against all closed polylines.
    pub fn contains(&self, point: [f64; 2]) -> bool {
        let mut inside = false;
        for line in &self.polylines {
            if line.len() < 3 || line.first() != line.last() {
                continue;
            }
            for w in line.windows(2) {
                let (a, b) = (w[0], w[1]);
                if (a[1] > point[1]) != (b[1] > point[1]) {
                    let t = (point[1] - a[1]) / (b[1] - a[1]);
                    let x_cross = a[0] + t * (b[0] - a[0]);
                    if point[0] < x_cross {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }
}

/// Edge identifier on the structured grid: the edge starting at grid node
/// `(i, j)` going right (`horizontal = true`) or up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeKey {
    i: usize,
    j: usize,
    horizontal: bool,
}

/// Classic 16-case marching squares with linear edge interpolation; the two
/// ambiguous saddle cases are resolved by comparing the cell average against
/// the level.
pub fn marching_squares(mesh: &Mesh, field: &[f64], level: f64) -> ContourSet {
    let n = mesh.n;
    let h = mesh.h();
    let inside = |v: f64| v > level;
    let node = |i: usize, j: usize| j * (n + 1) + i;

    // crossing point on an edge, interpolated between its two node values
    let edge_point = |key: EdgeKey| -> [f64; 2] {
        let v0 = field[node(key.i, key.j)];
        let (x0, y0) = (key.i as f64 * h, key.j as f64 * h);
        let v1 = if key.horizontal {
            field[node(key.i + 1, key.j)]
        } else {
            field[node(key.i, key.j + 1)]
        };
        let t = if (v1 - v0).abs() < f64::MIN_POSITIVE {
            0.5
        } else {
            ((level - v0) / (v1 - v0)).clamp(0.0, 1.0)
        };
        if key.horizontal {
            [x0 + t * h, y0]
        } else {
            [x0, y0 + t * h]
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = [
                field[node(i, j)],
                field[node(i + 1, j)],
                field[node(i + 1, j + 1)],
                field[node(i, j + 1)],
            ];
            let code = (inside(v[0]) as usize)
                | (inside(v[1]) as usize) << 1
                | (inside(v[2]) as usize) << 2
                | (inside(v[3]) as usize) << 3;
            let bottom = EdgeKey { i, j, horizontal: true };
            let right = EdgeKey { i: i + 1, j, horizontal: false };
            let top = EdgeKey { i, j: j + 1, horizontal: true };
            let left = EdgeKey { i, j, horizontal: false };
            match code {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // saddle: decide connectivity by the cell average
                    let avg = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                    let center_inside = inside(avg);
                    let pairs = if (code == 5) == center_inside {
                        [(left, top), (bottom, right)]
                    } else {
                        [(left, bottom), (right, top)]
                    };
                    segments.push(pairs[0]);
                    segments.push(pairs[1]);
                }
                _ => unreachable!(),
            }
        }
    }

    // stitch segments into polylines by walking the edge adjacency
    use std::collections::HashMap;
    let mut adjacency: HashMap<EdgeKey, Vec<(usize, EdgeKey)>> = HashMap::new();
    for (idx, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push((idx, b));
        adjacency.entry(b).or_default().push((idx, a));
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut chain = vec![start];
        let mut current = start;
        loop {
            let Some(candidates) = adjacency.get(&current) else { break };
            let Some(&(idx, next)) = candidates.iter().find(|(idx, _)| !used[*idx]) else {
                break;
            };
            used[idx] = true;
            chain.push(next);
            current = next;
        }
        chain
    };

    // open curves first (endpoints of odd degree), then closed loops
    let mut keys: Vec<EdgeKey> = adjacency.keys().copied().collect();
    keys.sort_by_key(|k| (k.j, k.i, k.horizontal));
    for &key in &keys {
        let degree = adjacency[&key]
            .iter()
            .filter(|(idx, _)| !used[*idx])
            .count();
        if degree == 1 {
            let chain = walk(key, &mut used);
            polylines.push(chain.iter().map(|&k| edge_point(k)).collect());
        }
    }
    for &key in &keys {
        if adjacency[&key].iter().any(|(idx, _)| !used[*idx]) {
            let chain = walk(key, &mut used);
            let mut points: Vec<[f64; 2]> = chain.iter().map(|&k| edge_point(k)).collect();
            // close the loop
            if let Some(&first) = points.first() {
                points.push(first);
            }
            polylines.push(points);
        }
    }

    ContourSet { level, polylines }
}

/// Darcy velocity `q = −κ(φ)∇p` at element centers.
pub fn darcy_velocity(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    p: &[f64],
) -> Vec<[f64; 2]> {
    let h = mesh.h();
    let values = crate::quad::shape_values(0.5, 0.5);
    let grads = crate::quad::shape_gradients(0.5, 0.5);
    mesh.elements
        .iter()
        .map(|elem| {
            let mut phi_c = 0.0;
            let mut grad_p = [0.0; 2];
            for a in 0..4 {
                phi_c += values[a] * phi[elem[a]];
                grad_p[0] += grads[a][0] / h * p[elem[a]];
                grad_p[1] += grads[a][1] / h * p[elem[a]];
            }
            let kappa = model.kappa(phi_c);
            [-kappa * grad_p[0], -kappa * grad_p[1]]
        })
        .collect()
}

/// One row of the continuous-dependence table.
#[derive(Debug, Clone, Copy)]
pub struct ContDepRow {
    pub scale: f64,
    pub lhs_phi: f64,
    pub lhs_mu: f64,
    pub lhs_u: f64,
    pub lhs_dtu: f64,
    pub lhs_theta: f64,
    pub lhs_p: f64,
    pub lhs_total: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Runs the model twice per scale — once with the base initial data and once
/// with `φ₀ + s·δφ` for the fixed perturbation `δφ = cos(πx₁)cos(πx₂)` — and
/// reports discrete versions of the continuous-dependence norms.
pub fn continuous_dependence_experiment(
    problem: &Problem,
    base_initial: &State,
    cfg: &TimeStepConfig,
    scales: &[f64],
) -> Result<Vec<ContDepRow>, DiagnosticsError> {
    if !problem.model.constant_coefficients || !cfg.constant_coefficients {
        return Err(DiagnosticsError::NotConstantCoefficients);
    }
    let mesh = &problem.mesh;
    let dual = DualNormSolver::new(mesh);

    let perturbation: Vec<f64> = mesh
        .node_coords
        .iter()
        .map(|&[x, y]| (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).cos())
        .collect();

    let record = |initial: State| -> Result<Vec<State>, DiagnosticsError> {
        let mut states = vec![initial.clone()];
        problem.run(initial, cfg, &mut |_, s, _| states.push(s.clone()))?;
        Ok(states)
    };
    let base_states = record(base_initial.clone())?;

    let mut rows = Vec::new();
    for &scale in scales {
        let mut perturbed = base_initial.clone();
        for (p, d) in perturbed.phi.iter_mut().zip(&perturbation) {
            *p += scale * d;
        }
        let pert_states = record(perturbed)?;
        assert_eq!(base_states.len(), pert_states.len());

        let n = mesh.num_nodes();
        let dt = cfg.dt;
        let mut max_phi_dual_sq: f64 = 0.0;
        let mut int_phi_l2_sq = 0.0;
        let mut int_mu_dual_sq = 0.0;
        let mut max_u_h1_sq: f64 = 0.0;
        let mut int_dtu_h1_sq = 0.0;
        let mut int_theta_l2_sq = 0.0;
        let mut max_p_l2_sq: f64 = 0.0;
        let mut int_p_h1_sq = 0.0;

        let mut prev_ud: Option<Vec<f64>> = None;
        for (k, (a, b)) in base_states.iter().zip(&pert_states).enumerate() {
            let phid: Vec<f64> = a.phi.iter().zip(&b.phi).map(|(x, y)| x - y).collect();
            let mud: Vec<f64> = a.mu.iter().zip(&b.mu).map(|(x, y)| x - y).collect();
            let ud: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
            let thetad: Vec<f64> = a.theta.iter().zip(&b.theta).map(|(x, y)| x - y).collect();
            let pd: Vec<f64> = a.p.iter().zip(&b.p).map(|(x, y)| x - y).collect();

            max_phi_dual_sq = max_phi_dual_sq.max(dual.dual_h1_norm(&phid)?.powi(2));
            max_u_h1_sq = max_u_h1_sq.max(vector_h1_sq(mesh, &ud));
            max_p_l2_sq = max_p_l2_sq.max(scalar_l2_sq(mesh, &pd));
            if k > 0 {
                int_phi_l2_sq += dt * scalar_l2_sq(mesh, &phid);
                int_mu_dual_sq += dt * dual.dual_h1_norm(&mud)?.powi(2);
                int_theta_l2_sq += dt * scalar_l2_sq(mesh, &thetad);
                int_p_h1_sq += dt * scalar_h1_sq(mesh, &pd);
                if let Some(prev) = &prev_ud {
                    let rate: Vec<f64> =
                        (0..2 * n).map(|i| (ud[i] - prev[i]) / dt).collect();
                    int_dtu_h1_sq += dt * vector_h1_sq(mesh, &rate);
                }
            }
            prev_ud = Some(ud);
        }

        let phid0: Vec<f64> = base_states[0]
            .phi
            .iter()
            .zip(&pert_states[0].phi)
            .map(|(x, y)| x - y)
            .collect();
        let rhs = dual.dual_h1_norm(&phid0)?.powi(2);

        let lhs_phi = max_phi_dual_sq + int_phi_l2_sq;
        let lhs_total = lhs_phi
            + int_mu_dual_sq
            + max_u_h1_sq
            + int_dtu_h1_sq
            + int_theta_l2_sq
            + max_p_l2_sq
            + int_p_h1_sq;
        rows.push(ContDepRow {
            scale,
            lhs_phi,
            lhs_mu: int_mu_dual_sq,
            lhs_u: max_u_h1_sq,
            lhs_dtu: int_dtu_h1_sq,
            lhs_theta: int_theta_l2_sq,
            lhs_p: max_p_l2_sq + int_p_h1_sq,
            lhs_total,
            rhs,
            ratio: if rhs > 0.0 { lhs_total / rhs } else { 0.0 },
        });
    }
    Ok(rows)
}

/// Convenience: full time-series row from a state.
pub fn time_series_row(
    mesh: &Mesh,
    model: &MaterialModel,
    state: &State,
    report: &DecouplingReport,
) -> TimeSeriesRow {
    let energy = energy::report(
        mesh,
        model,
        &state.phi,
        &state.mu,
        &state.u,
        &state.theta,
        &state.p,
    );
    TimeSeriesRow::new(
        state.time,
        tumor_mass(mesh, &state.phi),
        &energy,
        report.outer_iterations,
    )
}

/// Least-squares slope/intercept/R² of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mean_x) * (a - mean_x);
        sxy += (a - mean_x) * (b - mean_y);
        syy += (b - mean_y) * (b - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_dofmap, build_mesh, GridSpec};
    use crate::material::{MaterialModel, MaterialTable};

    fn mesh(n: usize) -> Mesh {
        build_mesh(GridSpec::new(n)).unwrap()
    }

    fn model() -> MaterialModel {
        MaterialModel::phase_dependent(MaterialTable::default()).unwrap()
    }

    #[test]
    fn tumor_mass_examples() {
        let m = mesh(8);
        let n = m.num_nodes();
        assert!((tumor_mass(&m, &vec![1.0; n]) - 1.0).abs() < 1e-13);
        assert!((tumor_mass(&m, &vec![0.5; n]) - 0.5).abs() < 1e-13);
        let x1: Vec<f64> = m.node_coords.iter().map(|c| c[0]).collect();
        assert!((tumor_mass(&m, &x1) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn contour_of_linear_field_is_vertical_line() {
        let m = mesh(8);
        let field: Vec<f64> = m.node_coords.iter().map(|c| c[0]).collect();
        let set = marching_squares(&m, &field, 0.5);
        assert_eq!(set.polylines.len(), 1, "lines: {:?}", set.polylines);
        assert!((set.total_length() - 1.0).abs() < 1e-9);
        for line in &set.polylines {
            for p in line {
                assert!((p[0] - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contour_above_max_is_empty() {
        let m = mesh(6);
        let field: Vec<f64> = m.node_coords.iter().map(|c| c[0]).collect();
        let set = marching_squares(&m, &field, 2.0);
        assert!(set.polylines.is_empty());
    }

    #[test]
    fn circle_contour_length_matches_perimeter() {
        let m = mesh(128);
        let field: Vec<f64> = m
            .node_coords
            .iter()
            .map(|&[x, y]| ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt())
            .collect();
        let set = marching_squares(&m, &field, 0.25);
        let expected = 2.0 * std::f64::consts::PI * 0.25;
        let got = set.total_length();
        assert!(
            (got - expected).abs() / expected < 0.02,
            "perimeter {got} vs {expected}"
        );
        // a circle is one closed loop
        assert_eq!(set.polylines.len(), 1);
        assert_eq!(set.polylines[0].first(), set.polylines[0].last());
    }

    #[test]
    fn contour_points_stay_in_domain_and_step_at_most_one_cell() {
        let m = mesh(32);
        let field: Vec<f64> = m
            .node_coords
            .iter()
            .map(|&[x, y]| ((x - 0.4).powi(2) + (y - 0.55).powi(2)).sqrt())
            .collect();
        let set = marching_squares(&m, &field, 0.3);
        let diag = m.h() * 2f64.sqrt() + 1e-12;
        for line in &set.polylines {
            for w in line.windows(2) {
                let d = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
                assert!(d <= diag);
            }
            for p in line {
                assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
            }
        }
    }

    #[test]
    fn containment_of_nested_circles() {
        let m = mesh(64);
        let field: Vec<f64> = m
            .node_coords
            .iter()
            .map(|&[x, y]| ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt())
            .collect();
        let set = marching_squares(&m, &field, 0.25);
        assert!(set.contains([0.5, 0.5]));
        assert!(set.contains([0.6, 0.6]));
        assert!(!set.contains([0.9, 0.9]));
        assert!(!set.contains([0.05, 0.5]));
    }

    #[test]
    fn darcy_velocity_examples() {
        let m = mesh(8);
        let model = model();
        let n = m.num_nodes();
        let uniform = vec![3.0; n];
        for q in darcy_velocity(&m, &model, &vec![0.0; n], &uniform) {
            assert!(q[0].abs() < 1e-13 && q[1].abs() < 1e-13);
        }
        let p: Vec<f64> = m.node_coords.iter().map(|c| c[0]).collect();
        for q in darcy_velocity(&m, &model, &vec![0.0; n], &p) {
            assert!((q[0] + 0.5).abs() < 1e-12 && q[1].abs() < 1e-13);
        }
        for q in darcy_velocity(&m, &model, &vec![1.0; n], &p) {
            assert!((q[0] + 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_norm_of_constants_is_their_mean() {
        let m = mesh(8);
        let dual = DualNormSolver::new(&m);
        let n = m.num_nodes();
        let v = vec![0.7; n];
        let norm = dual.dual_h1_norm(&v).unwrap();
        assert!((norm - 0.7).abs() < 1e-10);
    }

    #[test]
    fn dual_norm_scales_linearly() {
        let m = mesh(8);
        let dual = DualNormSolver::new(&m);
        let v: Vec<f64> = m
            .node_coords
            .iter()
            .map(|&[x, y]| (std::f64::consts::PI * x).cos() * y)
            .collect();
        let n1 = dual.dual_h1_norm(&v).unwrap();
        let v2: Vec<f64> = v.iter().map(|a| 2.0 * a).collect();
        let n2 = dual.dual_h1_norm(&v2).unwrap();
        assert!((n2 - 2.0 * n1).abs() < 1e-8 * n1.max(1.0));
    }

    #[test]
    fn monitor_trivial_and_nan_cases() {
        let m = mesh(4);
        let n = m.num_nodes();
        let zero = State::zeros(n);
        let samples = vec![sample_inequality(&m, &zero, None, 0.1)];
        let report = energy_inequality_monitor(&samples, &m, &zero, 0.1, 1e4);
        assert!(report.bounded);
        assert!(!report.failed);
        assert!(report.lhs_max <= report.data_functional);

        let mut bad = zero.clone();
        bad.p[0] = f64::NAN;
        let samples = vec![sample_inequality(&m, &bad, None, 0.1)];
        let report = energy_inequality_monitor(&samples, &m, &zero, 0.1, 1e4);
        assert!(report.failed);
        assert!(!report.bounded);
    }

    #[test]
    fn contdep_requires_constant_coefficients() {
        let m = mesh(4);
        let dofs = build_dofmap(&m);
        let problem = Problem::new(m, dofs, model());
        let init = State::zeros(problem.mesh.num_nodes());
        let cfg = TimeStepConfig {
            dt: 0.25,
            t_final: 0.25,
            ..Default::default()
        };
        let err = continuous_dependence_experiment(&problem, &init, &cfg, &[0.1]);
        assert!(matches!(
            err,
            Err(DiagnosticsError::NotConstantCoefficients)
        ));
    }

    #[test]
    fn contdep_zero_scale_gives_zero_lhs() {
        let m = mesh(4);
        let dofs = build_dofmap(&m);
        let model = MaterialModel::new(MaterialTable::default(), true).unwrap();
        let problem = Problem::new(m, dofs, model);
        let n = problem.mesh.num_nodes();
        let mut init = State::zeros(n);
        for (k, &c) in problem.mesh.node_coords.iter().enumerate() {
            init.phi[k] = crate::config::initial_phi(c);
            init.theta[k] = 0.5;
        }
        let cfg = TimeStepConfig {
            dt: 2f64.powi(-6),
            t_final: 2f64.powi(-5),
            constant_coefficients: true,
            ..Default::default()
        };
        let rows =
            continuous_dependence_experiment(&problem, &init, &cfg, &[0.0]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].lhs_total, 0.0);
        assert_eq!(rows[0].rhs, 0.0);
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|a| 3.0 * a - 0.7).collect();
        let (slope, intercept, r2) = linear_fit(&x, &y);
        assert!((slope - 3.0).abs() < 1e-12);
        assert!((intercept + 0.7).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
