//! Q1 shape functions and the 2×2 Gauss rule shared by assembly and energy
//! evaluation.
//!
//! The reference element is `[0,1]²` with nodes ordered counterclockwise
//! from the origin, matching the mesh connectivity. Every operator and every
//! energy integral in this crate uses the same four Gauss points, which keeps
//! discrete energies and their derivatives mutually consistent.

/// Offset of the two 1D Gauss points from the interval midpoint on `[0,1]`.
const GAUSS_OFFSET: f64 = 0.288675134594812882; // 1/(2·√3)

/// One quadrature point on the reference square with its weight.
#[derive(Debug, Clone, Copy)]
pub struct GaussPoint {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
}

/// The 2×2 tensor-product Gauss rule on `[0,1]²` (weights sum to 1).
pub fn gauss_points() -> [GaussPoint; 4] {
    let lo = 0.5 - GAUSS_OFFSET;
    let hi = 0.5 + GAUSS_OFFSET;
    [
        GaussPoint { xi: lo, eta: lo, weight: 0.25 },
        GaussPoint { xi: hi, eta: lo, weight: 0.25 },
        GaussPoint { xi: hi, eta: hi, weight: 0.25 },
        GaussPoint { xi: lo, eta: hi, weight: 0.25 },
    ]
}

/// Values of the four bilinear shape functions at `(xi, eta)`.
pub fn shape_values(xi: f64, eta: f64) -> [f64; 4] {
    [
        (1.0 - xi) * (1.0 - eta),
        xi * (1.0 - eta),
        xi * eta,
        (1.0 - xi) * eta,
    ]
}

/// Reference-coordinate gradients `(∂ξ, ∂η)` of the shape functions.
pub fn shape_gradients(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    [
        [-(1.0 - eta), -(1.0 - xi)],
        [1.0 - eta, -xi],
        [eta, xi],
        [-eta, 1.0 - xi],
    ]
}

/// Shape data evaluated once per assembly: values, physical gradients and the
/// physical quadrature weight for an axis-aligned square element of side `h`.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    /// `values[q][a]` — shape function `a` at Gauss point `q`.
    pub values: [[f64; 4]; 4],
    /// `grads[q][a]` — physical gradient of shape function `a` at point `q`.
    pub grads: [[[f64; 2]; 4]; 4],
    /// Physical quadrature weight `h²/4` per Gauss point.
    pub weight: f64,
}

impl ElementBasis {
    pub fn for_mesh_width(h: f64) -> Self {
        let mut values = [[0.0; 4]; 4];
        let mut grads = [[[0.0; 2]; 4]; 4];
        for (q, gp) in gauss_points().iter().enumerate() {
            values[q] = shape_values(gp.xi, gp.eta);
            let reference = shape_gradients(gp.xi, gp.eta);
            for a in 0..4 {
                grads[q][a] = [reference[a][0] / h, reference[a][1] / h];
            }
        }
        Self {
            values,
            grads,
            weight: h * h / 4.0,
        }
    }
}
