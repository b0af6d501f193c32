//! Free-energy evaluation and its variational derivatives.
//!
//! The total energy splits into three parts,
//!
//! ```text
//! E_φ = ∫ Ψ(φ) + (γ/2)|∇φ|²          (surface)
//! E_u = ∫ ½(ε(u) − 𝒯(φ)) : ℂ(φ)(ε(u) − 𝒯(φ))   (elastic)
//! E_θ = ∫ (M(φ)/2)(θ − α(φ)·div u)²   (fluid)
//! ```
//!
//! and the chemical potential is its φ-derivative. Everything here shares the
//! 2×2 Gauss rule with the assembly module, so the weak derivative vectors
//! returned by `dphi_*_weak` are the exact gradients of the corresponding
//! quadrature-evaluated energies with respect to the nodal coefficients —
//! the finite-difference validator exploits exactly that.

use crate::assembly::{
    assemble_scalar_load, eval_scalar_at_gauss, eval_scalar_gradient_at_gauss,
    eval_strain_at_gauss, lumped_mass,
};
use crate::grid::Mesh;
use crate::material::{double_well, MaterialModel};
use crate::quad::ElementBasis;
use crate::sparse::{solve_spd, SolverConfig, SparseError};

/// Energy components and monitor quantities at one time level.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyReport {
    pub e_phi: f64,
    pub e_u: f64,
    pub e_theta: f64,
    pub total: f64,
    pub grad_mu_norm_sq: f64,
    pub grad_p_norm_sq: f64,
}

/// `∫ Ψ(φ) + (γ/2)|∇φ|²`.
pub fn energy_surface(mesh: &Mesh, model: &MaterialModel, phi: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let grad_g = eval_scalar_gradient_at_gauss(mesh, phi);
    let gamma = model.table.gamma;
    let mut total = 0.0;
    for i in 0..phi_g.len() {
        let g = grad_g[i];
        total += basis.weight * (double_well(phi_g[i]) + 0.5 * gamma * (g[0] * g[0] + g[1] * g[1]));
    }
    total
}

/// `∫ ½(ε(u) − 𝒯(φ)) : ℂ(φ)(ε(u) − 𝒯(φ))`.
pub fn energy_elastic(mesh: &Mesh, model: &MaterialModel, phi: &[f64], u: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let eps_g = eval_strain_at_gauss(mesh, u);
    let mut total = 0.0;
    for i in 0..phi_g.len() {
        let eps = eps_g[i];
        total += basis.weight
            * model.elastic_energy_density(phi_g[i], eps.trace(), eps.ddot(&eps));
    }
    total
}

/// `∫ (M(φ)/2)(θ − α(φ)·div u)²`.
pub fn energy_fluid(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let theta_g = eval_scalar_at_gauss(mesh, theta);
    let eps_g = eval_strain_at_gauss(mesh, u);
    let mut total = 0.0;
    for i in 0..phi_g.len() {
        total += basis.weight
            * model.fluid_energy_density(phi_g[i], theta_g[i], eps_g[i].trace());
    }
    total
}

/// `∫ |∇f|²` of a nodal scalar field.
pub fn gradient_norm_sq(mesh: &Mesh, field: &[f64]) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let grad = eval_scalar_gradient_at_gauss(mesh, field);
    grad.iter()
        .map(|g| basis.weight * (g[0] * g[0] + g[1] * g[1]))
        .sum()
}

/// Full energy report for one state.
pub fn report(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    mu: &[f64],
    u: &[f64],
    theta: &[f64],
    p: &[f64],
) -> EnergyReport {
    let e_phi = energy_surface(mesh, model, phi);
    let e_u = energy_elastic(mesh, model, phi, u);
    let e_theta = energy_fluid(mesh, model, phi, u, theta);
    EnergyReport {
        e_phi,
        e_u,
        e_theta,
        total: e_phi + e_u + e_theta,
        grad_mu_norm_sq: gradient_norm_sq(mesh, mu),
        grad_p_norm_sq: gradient_norm_sq(mesh, p),
    }
}

/// Weak derivative vector of the elastic energy with respect to φ:
/// `rᵢ = ∫ δ_φW(φ, ε(u)) ζᵢ`.
pub fn dphi_elastic_weak(mesh: &Mesh, model: &MaterialModel, phi: &[f64], u: &[f64]) -> Vec<f64> {
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let eps_g = eval_strain_at_gauss(mesh, u);
    let density: Vec<f64> = (0..phi_g.len())
        .map(|i| {
            let eps = eps_g[i];
            model.dphi_elastic_density(phi_g[i], eps.trace(), eps.ddot(&eps))
        })
        .collect();
    assemble_scalar_load(mesh, &density)
}

/// Weak derivative vector of the fluid energy with respect to φ.
pub fn dphi_fluid_weak(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
) -> Vec<f64> {
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let theta_g = eval_scalar_at_gauss(mesh, theta);
    let eps_g = eval_strain_at_gauss(mesh, u);
    let density: Vec<f64> = (0..phi_g.len())
        .map(|i| model.dphi_fluid_density(phi_g[i], theta_g[i], eps_g[i].trace()))
        .collect();
    assemble_scalar_load(mesh, &density)
}

/// Nodal representative of `δ_φE_u` against the lumped inner product.
pub fn dphi_energy_elastic(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    u: &[f64],
) -> Vec<f64> {
    let weak = dphi_elastic_weak(mesh, model, phi, u);
    let lump = lumped_mass(mesh);
    weak.iter().zip(&lump).map(|(r, w)| r / w).collect()
}

/// Nodal representative of `δ_φE_θ` against the lumped inner product.
pub fn dphi_energy_fluid(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
) -> Vec<f64> {
    let weak = dphi_fluid_weak(mesh, model, phi, u, theta);
    let lump = lumped_mass(mesh);
    weak.iter().zip(&lump).map(|(r, w)| r / w).collect()
}

/// Consistent-mass L² projection of `M(φ)(θ − α(φ)·div u)` onto the Q1 space.
pub fn pressure_closure(
    mesh: &Mesh,
    model: &MaterialModel,
    phi: &[f64],
    theta: &[f64],
    u: &[f64],
) -> Result<Vec<f64>, SparseError> {
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let theta_g = eval_scalar_at_gauss(mesh, theta);
    let eps_g = eval_strain_at_gauss(mesh, u);
    let density: Vec<f64> = (0..phi_g.len())
        .map(|i| model.pressure_density(phi_g[i], theta_g[i], eps_g[i].trace()))
        .collect();
    let rhs = assemble_scalar_load(mesh, &density);
    let mass = crate::assembly::assemble_scalar_mass(mesh);
    Ok(solve_spd(&mass, &rhs, &SolverConfig::default())?.x)
}

/// Which energy component a validation probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyComponent {
    Surface,
    Elastic,
    Fluid,
}

/// Direction of a variation: a nodal perturbation of one of the fields.
#[derive(Debug, Clone, Copy)]
pub enum Direction<'a> {
    Phi(&'a [f64]),
    Displacement(&'a [f64]),
    Theta(&'a [f64]),
}

fn component_energy(
    mesh: &Mesh,
    model: &MaterialModel,
    component: EnergyComponent,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
) -> f64 {
    match component {
        EnergyComponent::Surface => energy_surface(mesh, model, phi),
        EnergyComponent::Elastic => energy_elastic(mesh, model, phi, u),
        EnergyComponent::Fluid => energy_fluid(mesh, model, phi, u, theta),
    }
}

/// Analytic directional derivative `⟨δE, v⟩` of a component.
pub fn directional_derivative(
    mesh: &Mesh,
    model: &MaterialModel,
    component: EnergyComponent,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
    direction: Direction,
) -> f64 {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let phi_g = eval_scalar_at_gauss(mesh, phi);
    let theta_g = eval_scalar_at_gauss(mesh, theta);
    let eps_g = eval_strain_at_gauss(mesh, u);
    match (component, direction) {
        (EnergyComponent::Surface, Direction::Phi(v)) => {
            let v_g = eval_scalar_at_gauss(mesh, v);
            let grad_phi = eval_scalar_gradient_at_gauss(mesh, phi);
            let grad_v = eval_scalar_gradient_at_gauss(mesh, v);
            let gamma = model.table.gamma;
            (0..phi_g.len())
                .map(|i| {
                    basis.weight
                        * (crate::material::double_well_prime(phi_g[i]) * v_g[i]
                            + gamma
                                * (grad_phi[i][0] * grad_v[i][0] + grad_phi[i][1] * grad_v[i][1]))
                })
                .sum()
        }
        (EnergyComponent::Elastic, Direction::Phi(v)) => {
            let weak = dphi_elastic_weak(mesh, model, phi, u);
            weak.iter().zip(v).map(|(r, d)| r * d).sum()
        }
        (EnergyComponent::Fluid, Direction::Phi(v)) => {
            let weak = dphi_fluid_weak(mesh, model, phi, u, theta);
            weak.iter().zip(v).map(|(r, d)| r * d).sum()
        }
        (EnergyComponent::Elastic, Direction::Displacement(w)) => {
            // ⟨δ_u E_u, w⟩ = ∫ ℂ(φ)(ε(u) − 𝒯(φ)) : ε(w)
            let eps_w = eval_strain_at_gauss(mesh, w);
            (0..phi_g.len())
                .map(|i| {
                    let e = eps_g[i]
                        .sub(&crate::material::SymTensor2::scaled_identity(
                            model.eigenstrain(phi_g[i]),
                        ));
                    let sigma = model.apply_elasticity_tensor(phi_g[i], &e);
                    basis.weight * sigma.ddot(&eps_w[i])
                })
                .sum()
        }
        (EnergyComponent::Fluid, Direction::Displacement(w)) => {
            // ⟨δ_u E_θ, w⟩ = −∫ α(φ) M(φ)(θ − α div u) div w
            let eps_w = eval_strain_at_gauss(mesh, w);
            (0..phi_g.len())
                .map(|i| {
                    let p = model.pressure_density(phi_g[i], theta_g[i], eps_g[i].trace());
                    -basis.weight * model.biot_willis(phi_g[i]) * p * eps_w[i].trace()
                })
                .sum()
        }
        (EnergyComponent::Fluid, Direction::Theta(v)) => {
            let v_g = eval_scalar_at_gauss(mesh, v);
            (0..phi_g.len())
                .map(|i| {
                    basis.weight
                        * model.pressure_density(phi_g[i], theta_g[i], eps_g[i].trace())
                        * v_g[i]
                })
                .sum()
        }
        // the surface energy does not depend on u or θ, the elastic one not on θ
        (EnergyComponent::Surface, _) | (EnergyComponent::Elastic, Direction::Theta(_)) => 0.0,
    }
}

/// Central-difference validation of a directional derivative. Returns
/// `|⟨δE, v⟩ − FD| / max(1, |⟨δE, v⟩|)`.
pub fn fd_validate(
    mesh: &Mesh,
    model: &MaterialModel,
    component: EnergyComponent,
    phi: &[f64],
    u: &[f64],
    theta: &[f64],
    direction: Direction,
    step: f64,
) -> f64 {
    assert!(step > 0.0);
    let analytic = directional_derivative(mesh, model, component, phi, u, theta, direction);
    let perturb = |sign: f64| -> f64 {
        match direction {
            Direction::Phi(v) => {
                let phi_p: Vec<f64> =
                    phi.iter().zip(v).map(|(a, b)| a + sign * step * b).collect();
                component_energy(mesh, model, component, &phi_p, u, theta)
            }
            Direction::Displacement(w) => {
                let u_p: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + sign * step * b).collect();
                component_energy(mesh, model, component, phi, &u_p, theta)
            }
            Direction::Theta(v) => {
                let t_p: Vec<f64> =
                    theta.iter().zip(v).map(|(a, b)| a + sign * step * b).collect();
                component_energy(mesh, model, component, phi, u, &t_p)
            }
        }
    };
    let fd = (perturb(1.0) - perturb(-1.0)) / (2.0 * step);
    (analytic - fd).abs() / 1f64.max(analytic.abs())
}
