//! Sparse operator and load-vector assembly for the weak forms.
//!
//! Every operator is assembled element by element with the shared 2×2 Gauss
//! rule. Coefficient fields enter through their Q1 interpolant evaluated at
//! the Gauss points, never through nodal averaging, so the operators stay
//! consistent with the energy evaluation.

use crate::grid::Mesh;
use crate::material::{MaterialModel, SymTensor2};
use crate::quad::ElementBasis;
use crate::sparse::SparseMatrix;

/// Number of Gauss points per element.
pub const GP: usize = 4;

/// Evaluates a nodal scalar field at every Gauss point of every element.
/// The result is indexed as `elem * 4 + q`.
pub fn eval_scalar_at_gauss(mesh: &Mesh, field: &[f64]) -> Vec<f64> {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut out = vec![0.0; mesh.num_elements() * GP];
    for (e, elem) in mesh.elements.iter().enumerate() {
        for q in 0..GP {
            let mut v = 0.0;
            for a in 0..4 {
                v += basis.values[q][a] * field[elem[a]];
            }
            out[e * GP + q] = v;
        }
    }
    out
}

/// Gradient of a nodal scalar field at every Gauss point (`elem * 4 + q`).
pub fn eval_scalar_gradient_at_gauss(mesh: &Mesh, field: &[f64]) -> Vec<[f64; 2]> {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut out = vec![[0.0; 2]; mesh.num_elements() * GP];
    for (e, elem) in mesh.elements.iter().enumerate() {
        for q in 0..GP {
            let mut g = [0.0; 2];
            for a in 0..4 {
                g[0] += basis.grads[q][a][0] * field[elem[a]];
                g[1] += basis.grads[q][a][1] * field[elem[a]];
            }
            out[e * GP + q] = g;
        }
    }
    out
}

/// Symmetric gradient (strain) of an interleaved vector field at every Gauss
/// point.
pub fn eval_strain_at_gauss(mesh: &Mesh, u: &[f64]) -> Vec<SymTensor2> {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut out = vec![SymTensor2::default(); mesh.num_elements() * GP];
    for (e, elem) in mesh.elements.iter().enumerate() {
        for q in 0..GP {
            let mut eps = SymTensor2::default();
            for a in 0..4 {
                let ux = u[2 * elem[a]];
                let uy = u[2 * elem[a] + 1];
                let g = basis.grads[q][a];
                eps.xx += g[0] * ux;
                eps.yy += g[1] * uy;
                eps.xy += 0.5 * (g[1] * ux + g[0] * uy);
            }
            out[e * GP + q] = eps;
        }
    }
    out
}

/// Maps a per-Gauss-point buffer through a scalar function.
pub fn map_gauss(values: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    values.iter().map(|&v| f(v)).collect()
}

/// Consistent Q1 mass matrix `(ζᵢ, ζⱼ)`.
pub fn assemble_scalar_mass(mesh: &Mesh) -> SparseMatrix {
    assemble_weighted_mass(mesh, &vec![1.0; mesh.num_elements() * GP])
}

/// Mass matrix with a per-Gauss-point coefficient `(w ζᵢ, ζⱼ)`.
pub fn assemble_weighted_mass(mesh: &Mesh, w_gauss: &[f64]) -> SparseMatrix {
    let n = mesh.num_nodes();
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 16);
    for (e, elem) in mesh.elements.iter().enumerate() {
        let mut local = [[0.0; 4]; 4];
        for q in 0..GP {
            let w = w_gauss[e * GP + q] * basis.weight;
            for a in 0..4 {
                for b in 0..4 {
                    local[a][b] += w * basis.values[q][a] * basis.values[q][b];
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                triplets.push((elem[a], elem[b], local[a][b]));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("connectivity indices in range")
}

/// Stiffness matrix with a per-Gauss-point coefficient `(w ∇ζᵢ, ∇ζⱼ)`.
pub fn assemble_weighted_stiffness(mesh: &Mesh, w_gauss: &[f64]) -> SparseMatrix {
    let n = mesh.num_nodes();
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 16);
    for (e, elem) in mesh.elements.iter().enumerate() {
        let mut local = [[0.0; 4]; 4];
        for q in 0..GP {
            let w = w_gauss[e * GP + q] * basis.weight;
            for a in 0..4 {
                for b in 0..4 {
                    local[a][b] += w
                        * (basis.grads[q][a][0] * basis.grads[q][b][0]
                            + basis.grads[q][a][1] * basis.grads[q][b][1]);
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                triplets.push((elem[a], elem[b], local[a][b]));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("connectivity indices in range")
}

/// Lumped mass weights `∫ ζᵢ` (row sums of the consistent mass).
pub fn lumped_mass(mesh: &Mesh) -> Vec<f64> {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut w = vec![0.0; mesh.num_nodes()];
    for elem in &mesh.elements {
        for q in 0..GP {
            for a in 0..4 {
                w[elem[a]] += basis.weight * basis.values[q][a];
            }
        }
    }
    w
}

/// Strain of the vector basis function of local node `a`, component `comp`,
/// given its physical gradient.
fn basis_strain(grad: [f64; 2], comp: usize) -> SymTensor2 {
    if comp == 0 {
        SymTensor2 { xx: grad[0], yy: 0.0, xy: 0.5 * grad[1] }
    } else {
        SymTensor2 { xx: 0.0, yy: grad[1], xy: 0.5 * grad[0] }
    }
}

/// Elasticity operator `(ℂᵥ/Δt)·Aᵥ + A_ℂ(φ)` and its load vector
/// `(ℂ(φ)𝒯(φ), ε(ζ)) + (1/Δt)(ℂᵥ ε(uⁿ), ε(ζ)) + (S_u, ζ)`, both without
/// Dirichlet elimination.
pub fn assemble_elasticity(
    mesh: &Mesh,
    model: &MaterialModel,
    phi_gauss: &[f64],
    u_old: &[f64],
    dt: f64,
) -> (SparseMatrix, Vec<f64>) {
    let n = mesh.num_nodes();
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let cv = model.table.cv_scale / dt;
    let eps_old = eval_strain_at_gauss(mesh, u_old);
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 64);
    let mut load = vec![0.0; 2 * n];
    for (e, elem) in mesh.elements.iter().enumerate() {
        let mut local = [[0.0; 8]; 8];
        let mut local_load = [0.0; 8];
        for q in 0..GP {
            let phi = phi_gauss[e * GP + q];
            let w = basis.weight;
            let strains: [SymTensor2; 8] = std::array::from_fn(|i| {
                basis_strain(basis.grads[q][i / 2], i % 2)
            });
            let moduli = model.moduli(phi);
            for i in 0..8 {
                let si = &strains[i];
                // σ(εᵢ) under ℂ(φ) plus the viscoelastic scalar part
                let lt = moduli.lame * si.trace();
                let sig = SymTensor2 {
                    xx: lt + 2.0 * moduli.shear * si.xx + cv * si.xx,
                    yy: lt + 2.0 * moduli.shear * si.yy + cv * si.yy,
                    xy: 2.0 * moduli.shear * si.xy + cv * si.xy,
                };
                for j in 0..8 {
                    local[i][j] += w * strains[j].ddot(&sig);
                }
                // eigenstrain load: ℂ(φ)𝒯(φ) : εᵢ = c·φ·(2λ+2G)·tr(εᵢ)
                let eig = model.eigenstrain(phi) * (2.0 * moduli.lame + 2.0 * moduli.shear);
                local_load[i] += w * eig * si.trace();
                // viscoelastic history load: (ℂᵥ/Δt) ε(uⁿ) : εᵢ
                local_load[i] += w * cv * eps_old[e * GP + q].ddot(si);
                // body force (S_u, ζᵢ)
                let comp = i % 2;
                local_load[i] += w * model.table.s_u[comp] * basis.values[q][i / 2];
            }
        }
        for i in 0..8 {
            let gi = 2 * elem[i / 2] + i % 2;
            load[gi] += local_load[i];
            for j in 0..8 {
                let gj = 2 * elem[j / 2] + j % 2;
                triplets.push((gi, gj, local[i][j]));
            }
        }
    }
    let matrix =
        SparseMatrix::from_triplets(2 * n, 2 * n, &triplets).expect("indices in range");
    (matrix, load)
}

/// Divergence coupling `(w ζᵢ, div vⱼ)` of shape `(nodes × 2·nodes)` with a
/// per-Gauss-point weight.
pub fn assemble_div_coupling(mesh: &Mesh, w_gauss: &[f64]) -> SparseMatrix {
    let n = mesh.num_nodes();
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 32);
    for (e, elem) in mesh.elements.iter().enumerate() {
        for q in 0..GP {
            let w = w_gauss[e * GP + q] * basis.weight;
            for a in 0..4 {
                for b in 0..4 {
                    // div of basis (b, comp): comp 0 → ∂x N_b, comp 1 → ∂y N_b
                    triplets.push((
                        elem[a],
                        2 * elem[b],
                        w * basis.values[q][a] * basis.grads[q][b][0],
                    ));
                    triplets.push((
                        elem[a],
                        2 * elem[b] + 1,
                        w * basis.values[q][a] * basis.grads[q][b][1],
                    ));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, 2 * n, &triplets).expect("indices in range")
}

/// The pressure–displacement coupling pair: `B` with weight `α(φ)` and the
/// `M(φ)`-weighted scalar mass `D`.
pub fn assemble_coupling(
    mesh: &Mesh,
    model: &MaterialModel,
    phi_gauss: &[f64],
) -> (SparseMatrix, SparseMatrix) {
    let alpha = map_gauss(phi_gauss, |p| model.biot_willis(p));
    let m = map_gauss(phi_gauss, |p| model.compressibility(p));
    let b = assemble_div_coupling(mesh, &alpha);
    let d = assemble_weighted_mass(mesh, &m);
    (b, d)
}

/// Load vector `(f, ζᵢ)` from a per-Gauss-point value of `f`.
pub fn assemble_scalar_load(mesh: &Mesh, f_gauss: &[f64]) -> Vec<f64> {
    let basis = ElementBasis::for_mesh_width(mesh.h());
    let mut load = vec![0.0; mesh.num_nodes()];
    for (e, elem) in mesh.elements.iter().enumerate() {
        for q in 0..GP {
            let w = f_gauss[e * GP + q] * basis.weight;
            for a in 0..4 {
                load[elem[a]] += w * basis.values[q][a];
            }
        }
    }
    load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_dofmap, build_mesh, GridSpec};
    use crate::material::MaterialTable;
    use crate::quad::gauss_points;
    use crate::sparse::{eliminate_dirichlet, solve_spd, SolverConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> MaterialModel {
        MaterialModel::phase_dependent(MaterialTable::default()).unwrap()
    }

    fn unit_gauss(mesh: &Mesh) -> Vec<f64> {
        vec![1.0; mesh.num_elements() * GP]
    }

    #[test]
    fn mass_sums_to_domain_area() {
        let mesh = build_mesh(GridSpec::new(5)).unwrap();
        let m = assemble_scalar_mass(&mesh);
        let total: f64 = m.entries().map(|(_, _, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-13);
        let ones = vec![1.0; mesh.num_nodes()];
        let prod = m.spmv(&ones);
        let sum: f64 = prod.iter().sum();
        assert!((sum - 1.0).abs() < 1e-13);
    }

    #[test]
    fn element_mass_diagonal_matches_quadrature_oracle() {
        // independent oracle: direct 2×2 Gauss integration of N₀² on one cell
        let mesh = build_mesh(GridSpec::new(1)).unwrap();
        let m = assemble_scalar_mass(&mesh);
        let h = mesh.h();
        let oracle: f64 = gauss_points()
            .iter()
            .map(|g| {
                let n0 = (1.0 - g.xi) * (1.0 - g.eta);
                g.weight * h * h * n0 * n0
            })
            .sum();
        assert!((m.get(0, 0) - oracle).abs() < 1e-15);
        assert!((m.get(0, 0) - h * h / 9.0).abs() < 1e-15);
    }

    #[test]
    fn stiffness_diagonal_and_kernel() {
        let mesh = build_mesh(GridSpec::new(1)).unwrap();
        let k = assemble_weighted_stiffness(&mesh, &unit_gauss(&mesh));
        assert!((k.get(0, 0) - 2.0 / 3.0).abs() < 1e-14);

        let mesh = build_mesh(GridSpec::new(6)).unwrap();
        let k = assemble_weighted_stiffness(&mesh, &unit_gauss(&mesh));
        let ones = vec![1.0; mesh.num_nodes()];
        for v in k.spmv(&ones) {
            assert!(v.abs() < 1e-13);
        }
    }

    #[test]
    fn stiffness_linear_in_coefficient() {
        let mesh = build_mesh(GridSpec::new(3)).unwrap();
        let k1 = assemble_weighted_stiffness(&mesh, &unit_gauss(&mesh));
        let w2 = vec![2.0; mesh.num_elements() * GP];
        let k2 = assemble_weighted_stiffness(&mesh, &w2);
        for ((r1, c1, v1), (r2, c2, v2)) in k1.entries().zip(k2.entries()) {
            assert_eq!((r1, c1), (r2, c2));
            assert!((v2 - 2.0 * v1).abs() < 1e-14);
        }
    }

    #[test]
    fn rigid_translation_has_zero_internal_force() {
        let mesh = build_mesh(GridSpec::new(3)).unwrap();
        let model = model();
        let phi = vec![0.4; mesh.num_nodes()];
        let phi_g = eval_scalar_at_gauss(&mesh, &phi);
        let u_old = vec![0.0; 2 * mesh.num_nodes()];
        let (a, _) = assemble_elasticity(&mesh, &model, &phi_g, &u_old, 0.1);
        let mut translation = vec![0.0; 2 * mesh.num_nodes()];
        for k in 0..mesh.num_nodes() {
            translation[2 * k] = 0.7;
            translation[2 * k + 1] = -0.3;
        }
        for v in a.spmv(&translation) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phase_has_zero_eigenstrain_load() {
        let mesh = build_mesh(GridSpec::new(2)).unwrap();
        let model = model();
        let phi_g = vec![0.0; mesh.num_elements() * GP];
        let u_old = vec![0.0; 2 * mesh.num_nodes()];
        let (_, load) = assemble_elasticity(&mesh, &model, &phi_g, &u_old, 0.1);
        for v in load {
            assert!(v.abs() < 1e-15);
        }
    }

    /// Independent dense element-loop oracle for the elasticity operator.
    fn dense_elasticity_oracle(
        mesh: &Mesh,
        model: &MaterialModel,
        phi_gauss: &[f64],
        dt: f64,
    ) -> Vec<Vec<f64>> {
        let n2 = 2 * mesh.num_nodes();
        let mut dense = vec![vec![0.0; n2]; n2];
        let h = mesh.h();
        let cv = model.table.cv_scale / dt;
        for (e, elem) in mesh.elements.iter().enumerate() {
            for (q, gp) in gauss_points().iter().enumerate() {
                let phi = phi_gauss[e * GP + q];
                let grads = crate::quad::shape_gradients(gp.xi, gp.eta);
                let w = gp.weight * h * h;
                for i in 0..8 {
                    let gi = [grads[i / 2][0] / h, grads[i / 2][1] / h];
                    let si = basis_strain(gi, i % 2);
                    for j in 0..8 {
                        let gj = [grads[j / 2][0] / h, grads[j / 2][1] / h];
                        let sj = basis_strain(gj, j % 2);
                        let sig = model.apply_elasticity_tensor(phi, &sj);
                        let val = w * (si.ddot(&sig) + cv * si.ddot(&sj));
                        dense[2 * elem[i / 2] + i % 2][2 * elem[j / 2] + j % 2] += val;
                    }
                }
            }
        }
        dense
    }

    #[test]
    fn elasticity_matches_dense_oracle() {
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        let model = model();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi: Vec<f64> = (0..mesh.num_nodes()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let phi_g = eval_scalar_at_gauss(&mesh, &phi);
        let u_old = vec![0.0; 2 * mesh.num_nodes()];
        let (a, _) = assemble_elasticity(&mesh, &model, &phi_g, &u_old, 0.25);
        let dense = dense_elasticity_oracle(&mesh, &model, &phi_g, 0.25);
        for (r, c, v) in a.entries() {
            assert!((v - dense[r][c]).abs() < 1e-12, "entry ({r},{c})");
        }
    }

    #[test]
    fn coupling_matches_dense_oracle() {
        let mesh = build_mesh(GridSpec::new(2)).unwrap();
        let model = model();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let phi: Vec<f64> = (0..mesh.num_nodes()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let phi_g = eval_scalar_at_gauss(&mesh, &phi);
        let (b, _) = assemble_coupling(&mesh, &model, &phi_g);

        let h = mesh.h();
        let n = mesh.num_nodes();
        let mut dense = vec![vec![0.0; 2 * n]; n];
        for (e, elem) in mesh.elements.iter().enumerate() {
            for (q, gp) in gauss_points().iter().enumerate() {
                let alpha = model.biot_willis(phi_g[e * GP + q]);
                let vals = crate::quad::shape_values(gp.xi, gp.eta);
                let grads = crate::quad::shape_gradients(gp.xi, gp.eta);
                let w = gp.weight * h * h * alpha;
                for a in 0..4 {
                    for bb in 0..4 {
                        dense[elem[a]][2 * elem[bb]] += w * vals[a] * grads[bb][0] / h;
                        dense[elem[a]][2 * elem[bb] + 1] += w * vals[a] * grads[bb][1] / h;
                    }
                }
            }
        }
        for (r, c, v) in b.entries() {
            assert!((v - dense[r][c]).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_residual_vanishes_for_constant_pressure() {
        // with clamped boundary, ∫ α p div v = 0 for constant p and α
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        let dofs = build_dofmap(&mesh);
        let model = MaterialModel::new(MaterialTable::default(), true).unwrap();
        let phi_g = vec![0.3; mesh.num_elements() * GP];
        let (b, _) = assemble_coupling(&mesh, &model, &phi_g);
        let p = vec![1.0; mesh.num_nodes()];
        // residual on v: Bᵀ p restricted to the interior dofs
        let bt = b.transpose();
        let r = bt.spmv(&p);
        let mut total = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..2 * mesh.num_nodes())
            .map(|d| if dofs.dirichlet_mask[d] { 0.0 } else { rng.gen_range(-1.0..1.0) })
            .collect();
        for i in 0..v.len() {
            total += r[i] * v[i];
        }
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn coupling_adjointness_against_quadrature_oracle() {
        let mesh = build_mesh(GridSpec::new(3)).unwrap();
        let dofs = build_dofmap(&mesh);
        let model = model();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi: Vec<f64> = (0..mesh.num_nodes()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let phi_g = eval_scalar_at_gauss(&mesh, &phi);
        let (b, _) = assemble_coupling(&mesh, &model, &phi_g);
        let p: Vec<f64> = (0..mesh.num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..2 * mesh.num_nodes())
            .map(|d| if dofs.dirichlet_mask[d] { 0.0 } else { rng.gen_range(-1.0..1.0) })
            .collect();

        // quadrature oracle for ∫ α(φ) p div v
        let basis = ElementBasis::for_mesh_width(mesh.h());
        let mut oracle = 0.0;
        for (e, elem) in mesh.elements.iter().enumerate() {
            for q in 0..GP {
                let alpha = model.biot_willis(phi_g[e * GP + q]);
                let mut p_g = 0.0;
                let mut div_v = 0.0;
                for a in 0..4 {
                    p_g += basis.values[q][a] * p[elem[a]];
                    div_v += basis.grads[q][a][0] * v[2 * elem[a]]
                        + basis.grads[q][a][1] * v[2 * elem[a] + 1];
                }
                oracle += basis.weight * alpha * p_g * div_v;
            }
        }

        // ⟨p, B v⟩ and ⟨Bᵀ p, v⟩ must both equal the oracle
        let bv = b.spmv(&v);
        let lhs: f64 = p.iter().zip(&bv).map(|(a, b)| a * b).sum();
        assert!((lhs - oracle).abs() < 1e-12);
        let btp = b.transpose().spmv(&p);
        let rhs: f64 = btp.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn weighted_mass_for_zero_phase_is_half_mass() {
        let mesh = build_mesh(GridSpec::new(3)).unwrap();
        let model = model();
        let phi_g = vec![0.0; mesh.num_elements() * GP];
        let (_, d) = assemble_coupling(&mesh, &model, &phi_g);
        let m = assemble_scalar_mass(&mesh);
        for ((r1, c1, v1), (r2, c2, v2)) in d.entries().zip(m.entries()) {
            assert_eq!((r1, c1), (r2, c2));
            assert!((v1 - 0.5 * v2).abs() < 1e-14);
        }
    }

    #[test]
    fn elasticity_spd_on_constrained_subspace() {
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        let dofs = build_dofmap(&mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for phi_val in [0.0, 0.5, 1.0] {
            let model = model();
            let phi_g = vec![phi_val; mesh.num_elements() * GP];
            let u_old = vec![0.0; 2 * mesh.num_nodes()];
            let (a, mut load) = assemble_elasticity(&mesh, &model, &phi_g, &u_old, 0.1);
            let mut triplets: Vec<_> = a.entries().collect();
            eliminate_dirichlet(&mut triplets, &mut load, &dofs.dirichlet_mask);
            let a = SparseMatrix::from_triplets(
                2 * mesh.num_nodes(),
                2 * mesh.num_nodes(),
                &triplets,
            )
            .unwrap();
            for _ in 0..50 {
                let v: Vec<f64> = (0..2 * mesh.num_nodes())
                    .map(|d| {
                        if dofs.dirichlet_mask[d] {
                            0.0
                        } else {
                            rng.gen_range(-1.0..1.0)
                        }
                    })
                    .collect();
                let av = a.spmv(&v);
                let quad: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
                let norm: f64 = v.iter().map(|x| x * x).sum();
                if norm > 1e-12 {
                    assert!(quad > 0.0, "phi={phi_val}");
                }
            }
        }
    }

    #[test]
    fn korn_smoke_zero_load_gives_zero_solution() {
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        let dofs = build_dofmap(&mesh);
        let model = model();
        let phi_g = vec![0.5; mesh.num_elements() * GP];
        let u_old = vec![0.0; 2 * mesh.num_nodes()];
        let (a, _) = assemble_elasticity(&mesh, &model, &phi_g, &u_old, 0.1);
        let mut rhs = vec![0.0; 2 * mesh.num_nodes()];
        let mut triplets: Vec<_> = a.entries().collect();
        eliminate_dirichlet(&mut triplets, &mut rhs, &dofs.dirichlet_mask);
        let a =
            SparseMatrix::from_triplets(2 * mesh.num_nodes(), 2 * mesh.num_nodes(), &triplets)
                .unwrap();
        let sol = solve_spd(&a, &rhs, &SolverConfig::default()).unwrap();
        for v in sol.x {
            assert!(v.abs() <= 1e-12);
        }
    }
}
