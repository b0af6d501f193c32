//! Structured quadrilateral mesh of the unit square and degree-of-freedom maps.
//!
//! The domain is always `[0,1]²`, divided into `n × n` axis-aligned square
//! elements of side `h = 1/n`. Nodes are numbered lexicographically, row by
//! row in `x₂` and within a row by `x₁`, so node `(i, j)` has index
//! `j·(n+1) + i` and sits at `(i·h, j·h)`. Element `(i, j)` has index
//! `j·n + i` and lists its four nodes counterclockwise starting at the
//! bottom-left corner.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid must have at least one division per side")]
    EmptyGrid,
}

/// Resolution of the structured grid on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Number of element divisions per side (`n ≥ 1`).
    pub divisions: usize,
}

impl GridSpec {
    pub fn new(divisions: usize) -> Self {
        Self { divisions }
    }
}

/// Structured Q1 mesh: node coordinates, element connectivity, boundary set.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub n: usize,
    pub node_coords: Vec<[f64; 2]>,
    /// Four node indices per element, counterclockwise from the bottom-left.
    pub elements: Vec<[usize; 4]>,
    /// Sorted indices of the nodes on `∂Ω`.
    pub boundary_nodes: Vec<usize>,
    on_boundary: Vec<bool>,
}

impl Mesh {
    /// Mesh width `h = 1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.on_boundary[node]
    }

    /// Node index of grid position `(i, j)`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }
}

/// Builds the structured mesh for `spec`. Rejects `n = 0`.
pub fn build_mesh(spec: GridSpec) -> Result<Mesh, GridError> {
    let n = spec.divisions;
    if n == 0 {
        return Err(GridError::EmptyGrid);
    }
    let nn = n + 1;
    let h = 1.0 / n as f64;

    let mut node_coords = Vec::with_capacity(nn * nn);
    let mut on_boundary = Vec::with_capacity(nn * nn);
    let mut boundary_nodes = Vec::new();
    for j in 0..nn {
        for i in 0..nn {
            node_coords.push([i as f64 * h, j as f64 * h]);
            let bnd = i == 0 || i == n || j == 0 || j == n;
            on_boundary.push(bnd);
            if bnd {
                boundary_nodes.push(j * nn + i);
            }
        }
    }

    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let sw = j * nn + i;
            elements.push([sw, sw + 1, sw + nn + 1, sw + nn]);
        }
    }

    Ok(Mesh {
        n,
        node_coords,
        elements,
        boundary_nodes,
        on_boundary,
    })
}

/// Scalar and vector unknown layouts over a mesh.
///
/// Scalar fields carry one unknown per node in node order. Vector fields
/// interleave the two displacement components per node, so node `k` owns
/// unknowns `2k` and `2k+1`. The Dirichlet mask flags the vector unknowns
/// clamped to zero on the boundary; scalar fields have no essential
/// constraints.
#[derive(Debug, Clone)]
pub struct DofMap {
    num_nodes: usize,
    pub dirichlet_mask: Vec<bool>,
}

impl DofMap {
    pub fn scalar_count(&self) -> usize {
        self.num_nodes
    }

    pub fn vector_count(&self) -> usize {
        2 * self.num_nodes
    }

    /// Vector unknown of `node`'s component `comp ∈ {0, 1}`.
    pub fn vector_dof(&self, node: usize, comp: usize) -> usize {
        2 * node + comp
    }

    /// Inverse of [`vector_dof`](Self::vector_dof).
    pub fn node_of_vector_dof(&self, dof: usize) -> (usize, usize) {
        (dof / 2, dof % 2)
    }

    pub fn num_constrained(&self) -> usize {
        self.dirichlet_mask.iter().filter(|&&m| m).count()
    }
}

pub fn build_dofmap(mesh: &Mesh) -> DofMap {
    let num_nodes = mesh.num_nodes();
    let mut dirichlet_mask = vec![false; 2 * num_nodes];
    for &b in &mesh.boundary_nodes {
        dirichlet_mask[2 * b] = true;
        dirichlet_mask[2 * b + 1] = true;
    }
    DofMap {
        num_nodes,
        dirichlet_mask,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_element_counts() {
        let mesh = build_mesh(GridSpec::new(1)).unwrap();
        assert_eq!(mesh.num_nodes(), 4);
        assert_eq!(mesh.num_elements(), 1);
        assert_eq!(mesh.boundary_nodes.len(), 4);
    }

    #[test]
    fn n4_counts() {
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        assert_eq!(mesh.num_nodes(), 25);
        assert_eq!(mesh.num_elements(), 16);
        assert_eq!(mesh.boundary_nodes.len(), 16);
    }

    #[test]
    fn n256_node_count() {
        let mesh = build_mesh(GridSpec::new(256)).unwrap();
        assert_eq!(mesh.num_nodes(), 66049);
    }

    #[test]
    fn zero_divisions_rejected() {
        assert!(build_mesh(GridSpec::new(0)).is_err());
    }

    #[test]
    fn elements_are_ccw_squares_of_side_h() {
        let mesh = build_mesh(GridSpec::new(3)).unwrap();
        let h = mesh.h();
        for elem in &mesh.elements {
            let p: Vec<[f64; 2]> = elem.iter().map(|&k| mesh.node_coords[k]).collect();
            assert!((p[1][0] - p[0][0] - h).abs() < 1e-15);
            assert!((p[1][1] - p[0][1]).abs() < 1e-15);
            assert!((p[2][0] - p[0][0] - h).abs() < 1e-15);
            assert!((p[2][1] - p[0][1] - h).abs() < 1e-15);
            assert!((p[3][0] - p[0][0]).abs() < 1e-15);
            assert!((p[3][1] - p[0][1] - h).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_classification_matches_coordinates() {
        let mesh = build_mesh(GridSpec::new(5)).unwrap();
        for (k, &[x, y]) in mesh.node_coords.iter().enumerate() {
            let expected = x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0;
            assert_eq!(mesh.is_boundary(k), expected, "node {k} at ({x},{y})");
        }
    }

    #[test]
    fn element_areas_sum_to_one() {
        for n in [1usize, 3, 7, 64] {
            let mesh = build_mesh(GridSpec::new(n)).unwrap();
            let h = mesh.h();
            let total: f64 = mesh.elements.iter().map(|_| h * h).sum();
            assert!((total - 1.0).abs() <= 1e-12, "n={n} total={total}");
        }
    }

    #[test]
    fn node_element_valence() {
        let mesh = build_mesh(GridSpec::new(6)).unwrap();
        let mut count = vec![0usize; mesh.num_nodes()];
        for elem in &mesh.elements {
            for &k in elem {
                count[k] += 1;
            }
        }
        for (k, &[x, y]) in mesh.node_coords.iter().enumerate() {
            let corner = (x == 0.0 || x == 1.0) && (y == 0.0 || y == 1.0);
            let expected = if corner {
                1
            } else if mesh.is_boundary(k) {
                2
            } else {
                4
            };
            assert_eq!(count[k], expected);
        }
    }

    #[test]
    fn dofmap_counts() {
        for (n, scalar, vector, constrained) in [(1, 4, 8, 8), (2, 9, 18, 16), (4, 25, 50, 32)] {
            let mesh = build_mesh(GridSpec::new(n)).unwrap();
            let dofs = build_dofmap(&mesh);
            assert_eq!(dofs.scalar_count(), scalar);
            assert_eq!(dofs.vector_count(), vector);
            assert_eq!(dofs.num_constrained(), constrained);
        }
    }

    #[test]
    fn dirichlet_mask_marks_exactly_boundary_vector_dofs() {
        let mesh = build_mesh(GridSpec::new(4)).unwrap();
        let dofs = build_dofmap(&mesh);
        for node in 0..mesh.num_nodes() {
            for comp in 0..2 {
                let dof = dofs.vector_dof(node, comp);
                assert_eq!(dofs.dirichlet_mask[dof], mesh.is_boundary(node));
            }
        }
    }

    proptest! {
        #[test]
        fn vector_dof_round_trip(node in 0usize..10_000, comp in 0usize..2) {
            let mesh = build_mesh(GridSpec::new(2)).unwrap();
            let dofs = build_dofmap(&mesh);
            let dof = dofs.vector_dof(node, comp);
            prop_assert_eq!(dofs.node_of_vector_dof(dof), (node, comp));
        }
    }
}
