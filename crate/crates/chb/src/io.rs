//! Output writers: CSV time series, legacy ASCII VTK fields and contour
//! polylines. All numeric output uses 17 significant digits, which round
//! trips 64-bit floats exactly, so identical runs produce byte-identical
//! files.

use std::fs;
use std::io;
use std::path::Path;

use crate::diagnostics::{ContDepRow, ContourSet, TimeSeriesRow};
use crate::grid::Mesh;
use crate::stepper::State;

/// Decimal representation with 17 significant digits.
pub fn format_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn timeseries_csv_string(rows: &[TimeSeriesRow]) -> String {
    let mut out =
        String::from("time,mass,E_phi,E_u,E_theta,E_total,grad_mu_sq,grad_p_sq,outer_iters\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            format_g17(r.time),
            format_g17(r.tumor_mass),
            format_g17(r.e_phi),
            format_g17(r.e_u),
            format_g17(r.e_theta),
            format_g17(r.e_total),
            format_g17(r.grad_mu_norm_sq),
            format_g17(r.grad_p_norm_sq),
            r.outer_iterations,
        ));
    }
    out
}

pub fn write_timeseries_csv(path: &Path, rows: &[TimeSeriesRow]) -> io::Result<()> {
    fs::write(path, timeseries_csv_string(rows))
}

/// Joint mass table of the three model variants.
pub fn mass_compare_csv_string(times: &[f64], ch: &[f64], cl: &[f64], chb: &[f64]) -> String {
    let mut out = String::from("time,mass_ch,mass_cl,mass_chb\n");
    for i in 0..times.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_g17(times[i]),
            format_g17(ch[i]),
            format_g17(cl[i]),
            format_g17(chb[i]),
        ));
    }
    out
}

pub fn write_mass_compare_csv(
    path: &Path,
    times: &[f64],
    ch: &[f64],
    cl: &[f64],
    chb: &[f64],
) -> io::Result<()> {
    fs::write(path, mass_compare_csv_string(times, ch, cl, chb))
}

pub fn contdep_csv_string(rows: &[ContDepRow]) -> String {
    let mut out =
        String::from("scale,lhs_phi,lhs_mu,lhs_u,lhs_dtu,lhs_theta,lhs_p,lhs_total,rhs,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            format_g17(r.scale),
            format_g17(r.lhs_phi),
            format_g17(r.lhs_mu),
            format_g17(r.lhs_u),
            format_g17(r.lhs_dtu),
            format_g17(r.lhs_theta),
            format_g17(r.lhs_p),
            format_g17(r.lhs_total),
            format_g17(r.rhs),
            format_g17(r.ratio),
        ));
    }
    out
}

pub fn write_contdep_csv(path: &Path, rows: &[ContDepRow]) -> io::Result<()> {
    fs::write(path, contdep_csv_string(rows))
}

/// Contour polylines as `level,polyline,x,y` rows.
pub fn contours_csv_string(sets: &[ContourSet]) -> String {
    let mut out = String::from("level,polyline,x,y\n");
    for set in sets {
        for (k, line) in set.polylines.iter().enumerate() {
            for p in line {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    format_g17(set.level),
                    k,
                    format_g17(p[0]),
                    format_g17(p[1]),
                ));
            }
        }
    }
    out
}

pub fn write_contours_csv(path: &Path, sets: &[ContourSet]) -> io::Result<()> {
    fs::write(path, contours_csv_string(sets))
}

/// Legacy ASCII VTK structured grid with nodal scalars `phi`, `mu`, `theta`,
/// `p`, the nodal vector `u` and the cell vector `darcy_velocity`.
pub fn vtk_string(mesh: &Mesh, state: &State, darcy: &[[f64; 2]]) -> String {
    let nn = mesh.n + 1;
    let num_nodes = mesh.num_nodes();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("coupled phase-field poroelasticity fields\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET STRUCTURED_GRID\n");
    out.push_str(&format!("DIMENSIONS {nn} {nn} 1\n"));
    out.push_str(&format!("POINTS {num_nodes} double\n"));
    for &[x, y] in &mesh.node_coords {
        out.push_str(&format!("{} {} 0\n", format_g17(x), format_g17(y)));
    }
    out.push_str(&format!("POINT_DATA {num_nodes}\n"));
    for (name, field) in [
        ("phi", &state.phi),
        ("mu", &state.mu),
        ("theta", &state.theta),
        ("p", &state.p),
    ] {
        out.push_str(&format!("SCALARS {name} double 1\n"));
        out.push_str("LOOKUP_TABLE default\n");
        for &v in field.iter() {
            out.push_str(&format_g17(v));
            out.push('\n');
        }
    }
    out.push_str("VECTORS u double\n");
    for k in 0..num_nodes {
        out.push_str(&format!(
            "{} {} 0\n",
            format_g17(state.u[2 * k]),
            format_g17(state.u[2 * k + 1])
        ));
    }
    out.push_str(&format!("CELL_DATA {}\n", mesh.num_elements()));
    out.push_str("VECTORS darcy_velocity double\n");
    for q in darcy {
        out.push_str(&format!("{} {} 0\n", format_g17(q[0]), format_g17(q[1])));
    }
    out
}

pub fn write_vtk(path: &Path, mesh: &Mesh, state: &State, darcy: &[[f64; 2]]) -> io::Result<()> {
    fs::write(path, vtk_string(mesh, state, darcy))
}
