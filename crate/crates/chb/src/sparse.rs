//! Compressed-row sparse matrices and Jacobi-preconditioned iterative
//! solvers: conjugate gradients for symmetric positive definite systems and
//! a stabilized bi-conjugate-gradient method (BiCGstab(2)) for the
//! nonsymmetric coupled blocks. The degree-2 stabilizing polynomial damps
//! the complex-conjugate eigenpairs of the coupled phase-field block, where
//! the classic degree-1 method stalls.
//!
//! Convergence is declared on the preconditioned residual (diagonal scaling)
//! and, simultaneously, on the true residual, so the returned solution
//! satisfies `‖Ax − b‖ ≤ max(rel_tol·‖b‖, abs_tol)` in both metrics.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("triplet index ({row}, {col}) outside matrix shape {rows}x{cols}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has length {len}")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("solver did not converge in {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("solver breakdown after {iterations} iterations (residual {residual:.3e})")]
    Breakdown { iterations: usize, residual: f64 },
}

/// Sparse matrix in compressed-row storage. Column indices are strictly
/// increasing within each row and duplicates are merged at construction.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets; duplicate positions
    /// are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(SparseError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }
        // bucket by row, sort the short per-row runs, then merge duplicates
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _, _) in triplets {
            offsets[r + 1] += 1;
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        let mut scratch: Vec<(usize, f64)> = vec![(0, 0.0); triplets.len()];
        let mut cursor = offsets.clone();
        for &(r, c, v) in triplets {
            scratch[cursor[r]] = (c, v);
            cursor[r] += 1;
        }
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for r in 0..rows {
            let run = &mut scratch[offsets[r]..offsets[r + 1]];
            run.sort_unstable_by_key(|e| e.0);
            for &(c, v) in run.iter() {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A·x`.
    pub fn spmv(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.spmv_into(x, &mut y);
        y
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for (r, c, v) in self.entries() {
            triplets.push((c, r, v));
        }
        SparseMatrix::from_triplets(self.cols, self.rows, &triplets)
            .expect("transpose indices are in range")
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows];
        for (r, c, v) in self.entries() {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        for k in self.row_ptr[row]..self.row_ptr[row + 1] {
            if self.col_idx[k] == col {
                return self.values[k];
            }
        }
        0.0
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }
}

/// Appends `scale · mat` into a triplet buffer at a block offset.
pub fn append_scaled_block(
    triplets: &mut Vec<(usize, usize, f64)>,
    mat: &SparseMatrix,
    row_offset: usize,
    col_offset: usize,
    scale: f64,
) {
    for (r, c, v) in mat.entries() {
        triplets.push((row_offset + r, col_offset + c, scale * v));
    }
}

/// Appends `scale · matᵀ` without materializing the transpose.
pub fn append_scaled_block_transposed(
    triplets: &mut Vec<(usize, usize, f64)>,
    mat: &SparseMatrix,
    row_offset: usize,
    col_offset: usize,
    scale: f64,
) {
    for (r, c, v) in mat.entries() {
        triplets.push((row_offset + c, col_offset + r, scale * v));
    }
}

/// Symmetric elimination of Dirichlet rows/columns for homogeneous values:
/// entries touching a constrained index are dropped, a unit diagonal is
/// inserted, and the constrained right-hand side entries are zeroed.
pub fn eliminate_dirichlet(
    triplets: &mut Vec<(usize, usize, f64)>,
    rhs: &mut [f64],
    constrained: &[bool],
) {
    triplets.retain(|&(r, c, _)| !constrained[r] && !constrained[c]);
    for (i, &fixed) in constrained.iter().enumerate() {
        if fixed {
            triplets.push((i, i, 1.0));
            if i < rhs.len() {
                rhs[i] = 0.0;
            }
        }
    }
}

/// Iterative solver tolerances. `max_iterations = None` means `10 · dim`.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iterations: Option<usize>,
    /// Diagonal (Jacobi) preconditioning; disabled only for comparisons.
    pub jacobi: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_iterations: None,
            jacobi: true,
        }
    }
}

impl SolverConfig {
    fn max_iters(&self, dim: usize) -> usize {
        self.max_iterations.unwrap_or(10 * dim.max(1))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final unpreconditioned residual norm `‖b − Ax‖`.
    pub residual: f64,
    /// Final preconditioned residual norm.
    pub precond_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub stats: SolveStats,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_dims(a: &SparseMatrix, b: &[f64]) -> Result<(), SparseError> {
    let (rows, cols) = a.shape();
    if rows != cols || b.len() != rows {
        return Err(SparseError::DimensionMismatch {
            rows,
            cols,
            len: b.len(),
        });
    }
    Ok(())
}

fn jacobi_diagonal(a: &SparseMatrix, enabled: bool) -> Vec<f64> {
    let n = a.shape().0;
    if !enabled {
        return vec![1.0; n];
    }
    a.diagonal()
        .into_iter()
        .map(|d| if d.abs() > f64::MIN_POSITIVE { d } else { 1.0 })
        .collect()
}

/// Conjugate gradients for symmetric positive definite `A` (caller contract).
pub fn solve_spd(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Solution, SparseError> {
    solve_spd_with_guess(a, b, None, cfg)
}

pub fn solve_spd_with_guess(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<Solution, SparseError> {
    check_dims(a, b)?;
    let n = b.len();
    let diag = jacobi_diagonal(a, cfg.jacobi);
    let apply_prec = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
    };

    let mut x = x0.map(|g| g.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut r = b.to_vec();
    if x0.is_some() {
        let ax = a.spmv(&x);
        for i in 0..n {
            r[i] -= ax[i];
        }
    }
    let norm_b = norm(b);
    let mut zb = vec![0.0; n];
    apply_prec(b, &mut zb);
    let precond_norm_b = dot(b, &zb).max(0.0).sqrt();
    let tol_true = (cfg.rel_tol * norm_b).max(cfg.abs_tol);
    let tol_prec = (cfg.rel_tol * precond_norm_b).max(cfg.abs_tol);

    let mut z = vec![0.0; n];
    apply_prec(&r, &mut z);
    let mut rho = dot(&r, &z);
    let mut p = z.clone();
    let mut stats = SolveStats {
        iterations: 0,
        residual: norm(&r),
        precond_residual: rho.max(0.0).sqrt(),
    };
    if stats.residual <= tol_true && stats.precond_residual <= tol_prec {
        return Ok(Solution { x, stats });
    }

    let max_iters = cfg.max_iters(n);
    let mut q = vec![0.0; n];
    for iter in 1..=max_iters {
        a.spmv_into(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 || !pq.is_finite() {
            return Err(SparseError::Breakdown {
                iterations: iter,
                residual: stats.residual,
            });
        }
        let alpha = rho / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        apply_prec(&r, &mut z);
        let rho_next = dot(&r, &z);
        stats.iterations = iter;
        stats.residual = norm(&r);
        stats.precond_residual = rho_next.max(0.0).sqrt();
        if stats.residual <= tol_true && stats.precond_residual <= tol_prec {
            return Ok(Solution { x, stats });
        }
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SparseError::NonConvergence {
        iterations: max_iters,
        residual: stats.residual,
    })
}

/// BiCGStab for general nonsingular `A`.
pub fn solve_general(
    a: &SparseMatrix,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<Solution, SparseError> {
    solve_general_with_guess(a, b, None, cfg)
}

/// Degree of the stabilizing polynomial.
const BICGSTAB_ELL: usize = 2;

pub fn solve_general_with_guess(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<Solution, SparseError> {
    check_dims(a, b)?;
    let n = b.len();
    let ell = BICGSTAB_ELL;
    let diag = jacobi_diagonal(a, cfg.jacobi);
    // Right preconditioning: iterate on A D⁻¹ y = r0 with x = x0 + D⁻¹y, so
    // the recursive residual equals the true residual of the original system.
    let amul = |v: &[f64], out: &mut Vec<f64>| {
        let vh: Vec<f64> = (0..n).map(|i| v[i] / diag[i]).collect();
        a.spmv_into(&vh, out);
    };
    let prec_norm =
        |r: &[f64]| -> f64 { (0..n).map(|i| (r[i] / diag[i]).powi(2)).sum::<f64>().sqrt() };
    let norm_b = norm(b);
    let tol_true = (cfg.rel_tol * norm_b).max(cfg.abs_tol);
    let tol_prec = (cfg.rel_tol * prec_norm(b)).max(cfg.abs_tol);
    let converged =
        |r: &[f64]| -> bool { norm(r) <= tol_true && prec_norm(r) <= tol_prec };

    let x_base = x0.map(|g| g.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut r0 = b.to_vec();
    if x0.is_some() {
        let ax = a.spmv(&x_base);
        for i in 0..n {
            r0[i] -= ax[i];
        }
    }
    // r[0] is the current residual; y accumulates the preconditioned update
    let mut y = vec![0.0; n];
    let mut r: Vec<Vec<f64>> = (0..=ell).map(|_| vec![0.0; n]).collect();
    let mut u: Vec<Vec<f64>> = (0..=ell).map(|_| vec![0.0; n]).collect();
    r[0].copy_from_slice(&r0);

    let finish = |y: &[f64], r0: &[f64], mv: usize| -> Solution {
        let mut x = x_base.clone();
        for i in 0..n {
            x[i] += y[i] / diag[i];
        }
        Solution {
            x,
            stats: SolveStats {
                iterations: mv,
                residual: norm(r0),
                precond_residual: prec_norm(r0),
            },
        }
    };

    if converged(&r[0]) {
        return Ok(finish(&y, &r[0], 0));
    }

    let mut r_shadow = r[0].clone();
    let mut rho0 = 1.0f64;
    let mut alpha = 0.0f64;
    let mut omega = 1.0f64;
    let mut mv = 0usize;
    let max_mv = cfg.max_iters(n);
    let mut restarted = false;
    // breakdown: exact convergence first, then one retry with a fresh
    // shadow residual, then give up
    macro_rules! breakdown {
        () => {{
            if converged(&r[0]) {
                return Ok(finish(&y, &r[0], mv));
            }
            if restarted {
                return Err(SparseError::Breakdown {
                    iterations: mv,
                    residual: norm(&r[0]),
                });
            }
            r_shadow.copy_from_slice(&r[0]);
            rho0 = 1.0;
            alpha = 0.0;
            omega = 1.0;
            for ui in u.iter_mut() {
                ui.iter_mut().for_each(|e| *e = 0.0);
            }
            restarted = true;
            continue;
        }};
    }

    while mv < max_mv {
        rho0 = -omega * rho0;
        // BiCG half: ell conjugate-direction steps
        let mut broke = false;
        for j in 0..ell {
            let rho1 = dot(&r[j], &r_shadow);
            if rho0.abs() < 1e-300 || !rho1.is_finite() {
                broke = true;
                break;
            }
            let beta = alpha * rho1 / rho0;
            rho0 = rho1;
            for i in 0..=j {
                for k in 0..n {
                    u[i][k] = r[i][k] - beta * u[i][k];
                }
            }
            let mut au = vec![0.0; n];
            amul(&u[j], &mut au);
            mv += 1;
            u[j + 1] = au;
            let gamma = dot(&u[j + 1], &r_shadow);
            if gamma.abs() < 1e-300 || !gamma.is_finite() {
                broke = true;
                break;
            }
            alpha = rho0 / gamma;
            for i in 0..=j {
                for k in 0..n {
                    r[i][k] -= alpha * u[i + 1][k];
                }
            }
            let mut ar = vec![0.0; n];
            amul(&r[j], &mut ar);
            mv += 1;
            r[j + 1] = ar;
            for k in 0..n {
                y[k] += alpha * u[0][k];
            }
        }
        if broke {
            breakdown!();
        }
        // minimal-residual half: modified Gram-Schmidt over r[1..=ell]
        let mut tau = vec![[0.0f64; BICGSTAB_ELL + 1]; BICGSTAB_ELL + 1];
        let mut sigma = [0.0f64; BICGSTAB_ELL + 1];
        let mut gamma_p = [0.0f64; BICGSTAB_ELL + 1];
        for j in 1..=ell {
            for i in 1..j {
                let t = dot(&r[j], &r[i]) / sigma[i];
                tau[i][j] = t;
                for k in 0..n {
                    r[j][k] -= t * r[i][k];
                }
            }
            sigma[j] = dot(&r[j], &r[j]);
            if sigma[j].abs() < 1e-300 || !sigma[j].is_finite() {
                broke = true;
                break;
            }
            gamma_p[j] = dot(&r[0], &r[j]) / sigma[j];
        }
        if broke {
            breakdown!();
        }
        let mut gamma = [0.0f64; BICGSTAB_ELL + 1];
        gamma[ell] = gamma_p[ell];
        omega = gamma[ell];
        for j in (1..ell).rev() {
            let mut acc = gamma_p[j];
            for i in j + 1..=ell {
                acc -= tau[j][i] * gamma[i];
            }
            gamma[j] = acc;
        }
        let mut gamma_pp = [0.0f64; BICGSTAB_ELL];
        for j in 1..ell {
            let mut acc = gamma[j + 1];
            for i in j + 1..ell {
                acc += tau[j][i] * gamma[i + 1];
            }
            gamma_pp[j] = acc;
        }
        for k in 0..n {
            y[k] += gamma[1] * r[0][k];
        }
        let r_ell = std::mem::take(&mut r[ell]);
        for k in 0..n {
            r[0][k] -= gamma_p[ell] * r_ell[k];
        }
        r[ell] = r_ell;
        let u_ell = std::mem::take(&mut u[ell]);
        for k in 0..n {
            u[0][k] -= gamma[ell] * u_ell[k];
        }
        u[ell] = u_ell;
        for j in 1..ell {
            let rj = std::mem::take(&mut r[j]);
            let uj = std::mem::take(&mut u[j]);
            for k in 0..n {
                u[0][k] -= gamma[j] * uj[k];
                y[k] += gamma_pp[j] * rj[k];
                r[0][k] -= gamma_p[j] * rj[k];
            }
            r[j] = rj;
            u[j] = uj;
        }
        if converged(&r[0]) {
            return Ok(finish(&y, &r[0], mv));
        }
        if omega.abs() < 1e-300 {
            breakdown!();
        }
    }
    Err(SparseError::NonConvergence {
        iterations: mv,
        residual: norm(&r[0]),
    })
}
