//! Phase-dependent constitutive laws.
//!
//! All material functions interpolate between a healthy-tissue endpoint
//! (phase 0) and a tumor endpoint (phase 1) through the cubic smoothstep
//! `π(φ) = −2φ³ + 3φ²`, clamped to `[0,1]` outside the unit interval:
//! `κ(φ) = κ₀ + π(φ)(κ₁ − κ₀)` and likewise for the compressibility `M`,
//! the Biot–Willis coefficient `α` and the plane-strain elasticity tensor
//! `ℂ` (equivalently, for its Lamé pair `(λ, G)`, in which the Voigt matrix
//! is linear).
//!
//! The double well `Ψ(φ) = ¼φ²(1−φ)²` is split as `Ψ' = Ψₑ' + Ψ꜀'` with an
//! expansive part `Ψₑ'(φ) = φ³ − (3/2)φ² − ¼φ` treated explicitly in time and
//! a contractive part `Ψ꜀'(φ) = ¾φ` treated implicitly.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("Poisson ratio must lie in [0, 0.5), got {0}")]
    InvalidPoisson(f64),
    #[error("Young modulus must be positive, got {0}")]
    InvalidYoung(f64),
}

/// Endpoint material parameters plus the scalar model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialTable {
    /// Permeability endpoints κ₀, κ₁.
    pub kappa0: f64,
    pub kappa1: f64,
    /// Compressibility endpoints M₀, M₁.
    pub m0: f64,
    pub m1: f64,
    /// Biot–Willis endpoints α₀, α₁.
    pub alpha0: f64,
    pub alpha1: f64,
    /// Young moduli E₀, E₁.
    pub e0: f64,
    pub e1: f64,
    /// Poisson ratios ν₀, ν₁.
    pub nu0: f64,
    pub nu1: f64,
    /// Interfacial parameter γ.
    pub gamma: f64,
    /// Viscoelastic modulus scale: ℂᵥ = cᵥ·I on symmetric tensors.
    pub cv_scale: f64,
    /// Additive floor of the degenerate mobility.
    pub mobility_floor: f64,
    /// Eigenstrain slope: 𝒯(φ) = c·φ·I.
    pub eigenstrain_coeff: f64,
    /// Proliferation factor λ in S_φ = λ·𝒞(φ)(1 − 𝒞(φ)).
    pub proliferation: f64,
    /// Constant fluid source S_θ (zero in the standard setup).
    pub s_theta: f64,
    /// Constant body force S_u (zero in the standard setup).
    pub s_u: [f64; 2],
}

impl Default for MaterialTable {
    fn default() -> Self {
        Self {
            kappa0: 0.5,
            kappa1: 5.0,
            m0: 0.5,
            m1: 1.0,
            alpha0: 0.5,
            alpha1: 1.0,
            e0: 2.8,
            e1: 1.4,
            nu0: 0.4,
            nu1: 0.2,
            gamma: 1e-4,
            cv_scale: 1e-16,
            mobility_floor: 1e-16,
            eigenstrain_coeff: 0.3,
            proliferation: 5.0,
            s_theta: 0.0,
            s_u: [0.0, 0.0],
        }
    }
}

/// Cubic smoothstep clamped to `[0,1]`.
pub fn smoothstep(phi: f64) -> f64 {
    if phi <= 0.0 {
        0.0
    } else if phi >= 1.0 {
        1.0
    } else {
        phi * phi * (3.0 - 2.0 * phi)
    }
}

/// `π'(φ) = 6φ(1−φ)` on `[0,1]`, zero outside (π is C¹).
pub fn smoothstep_prime(phi: f64) -> f64 {
    if phi <= 0.0 || phi >= 1.0 {
        0.0
    } else {
        6.0 * phi * (1.0 - phi)
    }
}

/// Second derivative of π on the open unit interval, zero outside.
pub fn smoothstep_second(phi: f64) -> f64 {
    if phi <= 0.0 || phi >= 1.0 {
        0.0
    } else {
        6.0 - 12.0 * phi
    }
}

/// `v₀ + π(φ)(v₁ − v₀)`.
pub fn interpolate_property(phi: f64, v0: f64, v1: f64) -> f64 {
    v0 + smoothstep(phi) * (v1 - v0)
}

/// Plane-strain Lamé pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticModuli {
    /// Shear modulus G.
    pub shear: f64,
    /// Lamé parameter λ.
    pub lame: f64,
}

/// `G = E/(2+2ν)`, `λ = Eν/((1+ν)(1−2ν))`.
pub fn lame_from_young_poisson(e: f64, nu: f64) -> Result<ElasticModuli, MaterialError> {
    if e <= 0.0 {
        return Err(MaterialError::InvalidYoung(e));
    }
    if !(0.0..0.5).contains(&nu) {
        return Err(MaterialError::InvalidPoisson(nu));
    }
    Ok(ElasticModuli {
        shear: e / (2.0 + 2.0 * nu),
        lame: e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
    })
}

/// Symmetric 2×2 tensor stored as (xx, yy, xy).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymTensor2 {
    pub fn identity() -> Self {
        Self { xx: 1.0, yy: 1.0, xy: 0.0 }
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self { xx: s, yy: s, xy: 0.0 }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Full contraction `a : b` (the off-diagonal counts twice).
    pub fn ddot(&self, other: &SymTensor2) -> f64 {
        self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy
    }

    pub fn scale(&self, s: f64) -> SymTensor2 {
        SymTensor2 {
            xx: s * self.xx,
            yy: s * self.yy,
            xy: s * self.xy,
        }
    }

    pub fn sub(&self, other: &SymTensor2) -> SymTensor2 {
        SymTensor2 {
            xx: self.xx - other.xx,
            yy: self.yy - other.yy,
            xy: self.xy - other.xy,
        }
    }
}

/// `Ψ(φ) = ¼φ²(1−φ)²`.
pub fn double_well(phi: f64) -> f64 {
    let w = phi * (1.0 - phi);
    0.25 * w * w
}

/// Analytic `Ψ'(φ) = φ³ − (3/2)φ² + ½φ`.
pub fn double_well_prime(phi: f64) -> f64 {
    phi * phi * phi - 1.5 * phi * phi + 0.5 * phi
}

/// Expansive part `Ψₑ'(φ) = φ³ − (3/2)φ² − ¼φ`, evaluated at the old iterate.
pub fn double_well_prime_expansive(phi: f64) -> f64 {
    phi * phi * phi - 1.5 * phi * phi - 0.25 * phi
}

/// Contractive part `Ψ꜀'(φ) = ¾φ`, treated implicitly.
pub fn double_well_prime_contractive(phi: f64) -> f64 {
    0.75 * phi
}

/// Slope of the contractive part (its φ-derivative).
pub const DOUBLE_WELL_CONTRACTIVE_SLOPE: f64 = 0.75;

/// Clamp to `[0,1]`.
pub fn cutoff(phi: f64) -> f64 {
    phi.clamp(0.0, 1.0)
}

/// Constitutive model: either the phase-dependent laws above, or the
/// constant-coefficient regime (constant `m`, `κ`, `α`, `M`, `ℂ`; the affine
/// eigenstrain is kept) used by the continuous-dependence experiment.
#[derive(Debug, Clone, Copy)]
pub struct MaterialModel {
    pub table: MaterialTable,
    pub constant_coefficients: bool,
    moduli0: ElasticModuli,
    moduli1: ElasticModuli,
}

/// Values of constant mobility and permeability in constant-coefficient mode.
pub const CONSTANT_MOBILITY: f64 = 1.0;
pub const CONSTANT_KAPPA: f64 = 1.0;

impl MaterialModel {
    pub fn new(table: MaterialTable, constant_coefficients: bool) -> Result<Self, MaterialError> {
        Ok(Self {
            table,
            constant_coefficients,
            moduli0: lame_from_young_poisson(table.e0, table.nu0)?,
            moduli1: lame_from_young_poisson(table.e1, table.nu1)?,
        })
    }

    pub fn phase_dependent(table: MaterialTable) -> Result<Self, MaterialError> {
        Self::new(table, false)
    }

    pub fn kappa(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            CONSTANT_KAPPA
        } else {
            interpolate_property(phi, self.table.kappa0, self.table.kappa1)
        }
    }

    pub fn compressibility(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            self.table.m0
        } else {
            interpolate_property(phi, self.table.m0, self.table.m1)
        }
    }

    pub fn compressibility_prime(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            0.0
        } else {
            smoothstep_prime(phi) * (self.table.m1 - self.table.m0)
        }
    }

    pub fn biot_willis(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            self.table.alpha0
        } else {
            interpolate_property(phi, self.table.alpha0, self.table.alpha1)
        }
    }

    pub fn biot_willis_prime(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            0.0
        } else {
            smoothstep_prime(phi) * (self.table.alpha1 - self.table.alpha0)
        }
    }

    /// Interpolated Lamé pair of `ℂ(φ)`.
    pub fn moduli(&self, phi: f64) -> ElasticModuli {
        if self.constant_coefficients {
            return self.moduli0;
        }
        let s = smoothstep(phi);
        ElasticModuli {
            shear: self.moduli0.shear + s * (self.moduli1.shear - self.moduli0.shear),
            lame: self.moduli0.lame + s * (self.moduli1.lame - self.moduli0.lame),
        }
    }

    /// Lamé pair of `ℂ'(φ) = π'(φ)(ℂ₁ − ℂ₀)`.
    pub fn moduli_prime(&self, phi: f64) -> ElasticModuli {
        if self.constant_coefficients {
            return ElasticModuli { shear: 0.0, lame: 0.0 };
        }
        let s = smoothstep_prime(phi);
        ElasticModuli {
            shear: s * (self.moduli1.shear - self.moduli0.shear),
            lame: s * (self.moduli1.lame - self.moduli0.lame),
        }
    }

    pub fn moduli_second(&self, phi: f64) -> ElasticModuli {
        if self.constant_coefficients {
            return ElasticModuli { shear: 0.0, lame: 0.0 };
        }
        let s = smoothstep_second(phi);
        ElasticModuli {
            shear: s * (self.moduli1.shear - self.moduli0.shear),
            lame: s * (self.moduli1.lame - self.moduli0.lame),
        }
    }

    /// Degenerate mobility `m(φ) = floor + ½φ²(1−φ)²`.
    pub fn mobility(&self, phi: f64) -> f64 {
        if self.constant_coefficients {
            return CONSTANT_MOBILITY;
        }
        let w = phi * (1.0 - phi);
        self.table.mobility_floor + 0.5 * w * w
    }

    /// Logistic growth source `S_φ = λ·𝒞(φ)(1 − 𝒞(φ))`.
    pub fn source_phi(&self, phi: f64) -> f64 {
        let c = cutoff(phi);
        self.table.proliferation * c * (1.0 - c)
    }

    /// Diagonal value of the eigenstrain `𝒯(φ) = c·φ·I`.
    pub fn eigenstrain(&self, phi: f64) -> f64 {
        self.table.eigenstrain_coeff * phi
    }

    /// `σ = ℂ(φ)ε = λ(φ)tr(ε)I + 2G(φ)ε`.
    pub fn apply_elasticity_tensor(&self, phi: f64, strain: &SymTensor2) -> SymTensor2 {
        let m = self.moduli(phi);
        let lt = m.lame * strain.trace();
        SymTensor2 {
            xx: lt + 2.0 * m.shear * strain.xx,
            yy: lt + 2.0 * m.shear * strain.yy,
            xy: 2.0 * m.shear * strain.xy,
        }
    }

    /// `ℂ'(φ)ε`, zero in the clamped regions of π.
    pub fn elasticity_tensor_phi_derivative(&self, phi: f64, strain: &SymTensor2) -> SymTensor2 {
        let m = self.moduli_prime(phi);
        let lt = m.lame * strain.trace();
        SymTensor2 {
            xx: lt + 2.0 * m.shear * strain.xx,
            yy: lt + 2.0 * m.shear * strain.yy,
            xy: 2.0 * m.shear * strain.xy,
        }
    }

    /// Elastic energy density `½(ε − 𝒯(φ)) : ℂ(φ)(ε − 𝒯(φ))` from the strain
    /// invariants `tr ε` and `ε : ε`.
    pub fn elastic_energy_density(&self, phi: f64, tr_eps: f64, eps_dd: f64) -> f64 {
        let c = self.table.eigenstrain_coeff;
        let te = tr_eps - 2.0 * c * phi;
        let ee = eps_dd - 2.0 * c * phi * tr_eps + 2.0 * c * c * phi * phi;
        let m = self.moduli(phi);
        0.5 * m.lame * te * te + m.shear * ee
    }

    /// Fluid energy density `(M(φ)/2)(θ − α(φ)·div u)²`.
    pub fn fluid_energy_density(&self, phi: f64, theta: f64, div_u: f64) -> f64 {
        let xi = theta - self.biot_willis(phi) * div_u;
        0.5 * self.compressibility(phi) * xi * xi
    }

    /// Pressure density `M(φ)(θ − α(φ)·div u)`.
    pub fn pressure_density(&self, phi: f64, theta: f64, div_u: f64) -> f64 {
        self.compressibility(phi) * (theta - self.biot_willis(phi) * div_u)
    }

    /// `δ_φ` of the elastic energy density:
    /// `½(ε−𝒯):ℂ'(φ)(ε−𝒯) − 𝒯'(φ):ℂ(φ)(ε−𝒯)`.
    pub fn dphi_elastic_density(&self, phi: f64, tr_eps: f64, eps_dd: f64) -> f64 {
        let c = self.table.eigenstrain_coeff;
        let te = tr_eps - 2.0 * c * phi;
        let ee = eps_dd - 2.0 * c * phi * tr_eps + 2.0 * c * c * phi * phi;
        let m = self.moduli(phi);
        let mp = self.moduli_prime(phi);
        // 𝒯' : ℂ e = c·tr(e)·(2λ + 2G) in two dimensions
        0.5 * mp.lame * te * te + mp.shear * ee - c * te * (2.0 * m.lame + 2.0 * m.shear)
    }

    /// φ-derivative of [`dphi_elastic_density`](Self::dphi_elastic_density),
    /// used in the Newton Jacobian.
    pub fn dphi_elastic_density_prime(&self, phi: f64, tr_eps: f64, eps_dd: f64) -> f64 {
        let c = self.table.eigenstrain_coeff;
        let te = tr_eps - 2.0 * c * phi;
        let ee = eps_dd - 2.0 * c * phi * tr_eps + 2.0 * c * c * phi * phi;
        let te_p = -2.0 * c;
        let ee_p = -2.0 * c * tr_eps + 4.0 * c * c * phi;
        let m = self.moduli(phi);
        let mp = self.moduli_prime(phi);
        let ms = self.moduli_second(phi);
        0.5 * ms.lame * te * te + mp.lame * te * te_p + ms.shear * ee + mp.shear * ee_p
            - c * (te_p * (2.0 * m.lame + 2.0 * m.shear) + te * (2.0 * mp.lame + 2.0 * mp.shear))
    }

    /// `δ_φ` of the fluid energy density:
    /// `(M'(φ)/2)ξ² − M(φ)ξα'(φ)·div u` with `ξ = θ − α(φ)·div u`.
    pub fn dphi_fluid_density(&self, phi: f64, theta: f64, div_u: f64) -> f64 {
        let xi = theta - self.biot_willis(phi) * div_u;
        0.5 * self.compressibility_prime(phi) * xi * xi
            - self.compressibility(phi) * xi * self.biot_willis_prime(phi) * div_u
    }

    /// φ-derivative of [`dphi_fluid_density`](Self::dphi_fluid_density).
    pub fn dphi_fluid_density_prime(&self, phi: f64, theta: f64, div_u: f64) -> f64 {
        if self.constant_coefficients {
            return 0.0;
        }
        let d = div_u;
        let alpha_p = self.biot_willis_prime(phi) * d;
        let alpha_pp = smoothstep_second(phi) * (self.table.alpha1 - self.table.alpha0) * d;
        let m = self.compressibility(phi);
        let m_p = self.compressibility_prime(phi);
        let m_pp = smoothstep_second(phi) * (self.table.m1 - self.table.m0);
        let xi = theta - self.biot_willis(phi) * d;
        0.5 * m_pp * xi * xi - 2.0 * m_p * alpha_p * xi + m * alpha_p * alpha_p - m * xi * alpha_pp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> MaterialModel {
        MaterialModel::phase_dependent(MaterialTable::default()).unwrap()
    }

    #[test]
    fn smoothstep_endpoints_and_clamp() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
        assert_eq!(smoothstep(1.3), 1.0);
        assert_eq!(smoothstep(-0.4), 0.0);
    }

    #[test]
    fn smoothstep_monotone() {
        let mut prev = smoothstep(-1.0);
        let mut x = -1.0;
        while x < 2.0 {
            x += 0.01;
            let v = smoothstep(x);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn kappa_interpolation_values() {
        let t = MaterialTable::default();
        assert_eq!(interpolate_property(0.0, t.kappa0, t.kappa1), 0.5);
        assert_eq!(interpolate_property(1.0, t.kappa0, t.kappa1), 5.0);
        assert!((interpolate_property(0.5, t.kappa0, t.kappa1) - 2.75).abs() < 1e-15);
    }

    #[test]
    fn lame_conversion() {
        let m = lame_from_young_poisson(2.8, 0.4).unwrap();
        assert!((m.shear - 1.0).abs() < 1e-14);
        assert!((m.lame - 4.0).abs() < 1e-14);
        let m1 = lame_from_young_poisson(1.4, 0.2).unwrap();
        assert!((m1.shear - 0.583333333333333).abs() < 1e-12);
        assert!((m1.lame - 0.388888888888889).abs() < 1e-12);
        let m2 = lame_from_young_poisson(1.0, 0.0).unwrap();
        assert!((m2.shear - 0.5).abs() < 1e-15);
        assert_eq!(m2.lame, 0.0);
        assert!(lame_from_young_poisson(1.0, 0.5).is_err());
        assert!(lame_from_young_poisson(-1.0, 0.2).is_err());
    }

    #[test]
    fn elasticity_tensor_examples() {
        let m = model();
        let zero = m.apply_elasticity_tensor(0.3, &SymTensor2::default());
        assert_eq!(zero, SymTensor2::default());

        // φ=1, ε = 0.3·I: σ = (0.6λ₁ + 0.6G₁)·I = 0.5833...·I
        let s = m.apply_elasticity_tensor(1.0, &SymTensor2::scaled_identity(0.3));
        assert!((s.xx - 0.583333333333333).abs() < 1e-12);
        assert!((s.yy - 0.583333333333333).abs() < 1e-12);
        assert!(s.xy.abs() < 1e-15);

        // φ=0, ε = diag(1,0): σ = diag(λ₀+2G₀, λ₀) = diag(6, 4)
        let s = m.apply_elasticity_tensor(0.0, &SymTensor2 { xx: 1.0, yy: 0.0, xy: 0.0 });
        assert!((s.xx - 6.0).abs() < 1e-13);
        assert!((s.yy - 4.0).abs() < 1e-13);
    }

    #[test]
    fn elasticity_phi_derivative_examples() {
        let m = model();
        let eps = SymTensor2::identity();
        let d = m.elasticity_tensor_phi_derivative(-0.5, &eps);
        assert_eq!(d, SymTensor2::default());
        let d = m.elasticity_tensor_phi_derivative(1.0, &eps);
        assert_eq!(d, SymTensor2::default());

        // π'(0.5) = 1.5 times (ℂ₁−ℂ₀)·I
        let d = m.elasticity_tensor_phi_derivative(0.5, &eps);
        let dl = 0.388888888888889 - 4.0;
        let dg = 0.583333333333333 - 1.0;
        let expected = 1.5 * (2.0 * dl + 2.0 * dg);
        assert!((d.xx - expected).abs() < 1e-12);
        assert!((d.yy - expected).abs() < 1e-12);
    }

    #[test]
    fn elasticity_phi_derivative_matches_finite_differences() {
        let m = model();
        let eps = SymTensor2 { xx: 0.4, yy: -0.2, xy: 0.15 };
        let h = 1e-5;
        for &phi in &[0.12, 0.35, 0.5, 0.77, 0.93] {
            let up = m.apply_elasticity_tensor(phi + h, &eps);
            let dn = m.apply_elasticity_tensor(phi - h, &eps);
            let fd = SymTensor2 {
                xx: (up.xx - dn.xx) / (2.0 * h),
                yy: (up.yy - dn.yy) / (2.0 * h),
                xy: (up.xy - dn.xy) / (2.0 * h),
            };
            let an = m.elasticity_tensor_phi_derivative(phi, &eps);
            assert!((fd.xx - an.xx).abs() < 1e-7, "phi={phi}");
            assert!((fd.yy - an.yy).abs() < 1e-7);
            assert!((fd.xy - an.xy).abs() < 1e-7);
        }
    }

    #[test]
    fn double_well_splitting_values() {
        assert_eq!(double_well(0.0), 0.0);
        assert_eq!(double_well_prime_expansive(0.0), 0.0);
        assert_eq!(double_well_prime_contractive(0.0), 0.0);
        assert!((double_well_prime_expansive(1.0) + 0.75).abs() < 1e-15);
        assert!((double_well_prime_contractive(1.0) - 0.75).abs() < 1e-15);
        assert!((double_well_prime(2.0) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn mobility_values() {
        let m = model();
        assert_eq!(m.mobility(0.0), 1e-16);
        assert_eq!(m.mobility(1.0), 1e-16);
        assert!((m.mobility(0.5) - (1e-16 + 0.03125)).abs() < 1e-18);
        for i in 0..100 {
            let phi = -1.0 + 3.0 * i as f64 / 99.0;
            assert!(m.mobility(phi) >= 1e-16);
        }
    }

    #[test]
    fn cutoff_values() {
        assert_eq!(cutoff(-0.2), 0.0);
        assert_eq!(cutoff(0.4), 0.4);
        assert_eq!(cutoff(1.3), 1.0);
    }

    #[test]
    fn source_values() {
        let m = model();
        assert!((m.source_phi(0.5) - 1.25).abs() < 1e-15);
        assert_eq!(m.source_phi(0.0), 0.0);
        assert_eq!(m.source_phi(1.2), 0.0);
        for i in 0..200 {
            let phi = -0.5 + 2.0 * i as f64 / 199.0;
            let s = m.source_phi(phi);
            assert!((0.0..=1.25).contains(&s));
        }
    }

    #[test]
    fn tensor_contraction_is_positive_semidefinite() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let phi: f64 = rng.gen_range(0.0..1.0);
            let eps = SymTensor2 {
                xx: rng.gen_range(-1.0..1.0),
                yy: rng.gen_range(-1.0..1.0),
                xy: rng.gen_range(-1.0..1.0),
            };
            let sigma = m.apply_elasticity_tensor(phi, &eps);
            let quad = eps.ddot(&sigma);
            let norm = eps.ddot(&eps);
            assert!(quad >= -1e-12);
            if norm > 1e-12 {
                assert!(quad > 1e-12 * norm);
            }
        }
    }

    #[test]
    fn tensor_major_symmetry() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let phi: f64 = rng.gen_range(-0.2..1.2);
            let a = SymTensor2 {
                xx: rng.gen_range(-1.0..1.0),
                yy: rng.gen_range(-1.0..1.0),
                xy: rng.gen_range(-1.0..1.0),
            };
            let b = SymTensor2 {
                xx: rng.gen_range(-1.0..1.0),
                yy: rng.gen_range(-1.0..1.0),
                xy: rng.gen_range(-1.0..1.0),
            };
            let lhs = a.ddot(&m.apply_elasticity_tensor(phi, &b));
            let rhs = b.ddot(&m.apply_elasticity_tensor(phi, &a));
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn interpolations_monotone_for_default_table() {
        let m = model();
        let mut prev = (m.kappa(-0.1), m.compressibility(-0.1), m.biot_willis(-0.1));
        let mut x = -0.1;
        while x < 1.1 {
            x += 0.005;
            let cur = (m.kappa(x), m.compressibility(x), m.biot_willis(x));
            assert!(cur.0 >= prev.0 - 1e-14);
            assert!(cur.1 >= prev.1 - 1e-14);
            assert!(cur.2 >= prev.2 - 1e-14);
            prev = cur;
        }
    }

    #[test]
    fn density_phi_derivatives_match_finite_differences() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..100 {
            let phi: f64 = rng.gen_range(0.05..0.95);
            let tr: f64 = rng.gen_range(-0.6..0.6);
            let dd: f64 = tr * tr / 2.0 + rng.gen_range(0.0..0.5);
            let theta: f64 = rng.gen_range(-0.5..0.5);
            let fd = (m.dphi_elastic_density(phi + h, tr, dd)
                - m.dphi_elastic_density(phi - h, tr, dd))
                / (2.0 * h);
            let an = m.dphi_elastic_density_prime(phi, tr, dd);
            assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "elastic {phi}");
            let fd = (m.dphi_fluid_density(phi + h, theta, tr)
                - m.dphi_fluid_density(phi - h, theta, tr))
                / (2.0 * h);
            let an = m.dphi_fluid_density_prime(phi, theta, tr);
            assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "fluid {phi}");
        }
    }

    #[test]
    fn dphi_densities_are_derivatives_of_energy_densities() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = 1e-6;
        for _ in 0..100 {
            let phi: f64 = rng.gen_range(0.05..0.95);
            let tr: f64 = rng.gen_range(-0.6..0.6);
            let dd: f64 = tr * tr / 2.0 + rng.gen_range(0.0..0.5);
            let theta: f64 = rng.gen_range(-0.5..0.5);
            let fd = (m.elastic_energy_density(phi + h, tr, dd)
                - m.elastic_energy_density(phi - h, tr, dd))
                / (2.0 * h);
            assert!((fd - m.dphi_elastic_density(phi, tr, dd)).abs() < 1e-6 * (1.0 + fd.abs()));
            let fd = (m.fluid_energy_density(phi + h, theta, tr)
                - m.fluid_energy_density(phi - h, theta, tr))
                / (2.0 * h);
            assert!((fd - m.dphi_fluid_density(phi, theta, tr)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn constant_mode_freezes_coefficients() {
        let m = MaterialModel::new(MaterialTable::default(), true).unwrap();
        for &phi in &[-0.3, 0.0, 0.4, 1.0, 1.7] {
            assert_eq!(m.kappa(phi), CONSTANT_KAPPA);
            assert_eq!(m.mobility(phi), CONSTANT_MOBILITY);
            assert_eq!(m.compressibility(phi), 0.5);
            assert_eq!(m.biot_willis(phi), 0.5);
            assert_eq!(m.dphi_fluid_density(phi, 0.3, 0.2), 0.0);
        }
        // eigenstrain stays affine, so the elastic coupling survives
        assert!(m.dphi_elastic_density(0.5, 0.0, 0.0).abs() > 0.0);
    }

    proptest! {
        #[test]
        fn splitting_sums_to_analytic_derivative(phi in -1.0f64..2.0) {
            let sum = double_well_prime_expansive(phi) + double_well_prime_contractive(phi);
            prop_assert!((sum - double_well_prime(phi)).abs() <= 1e-12);
        }
    }
}
