//! Field exporters: VTK legacy ASCII STRUCTURED_POINTS and flat CSV.
//!
//! Both formats are plain ASCII with 17-significant-digit numbers, so
//! identical configs reproduce byte-identical files. VTK stores points with
//! x fastest (2D fields are zero-padded to 3 components on an nz = 1
//! lattice); the CSV keeps the library's axis-major order (axis 0 slowest)
//! with columns x1,x2[,x3],v1,v2[,v3],p.

use super::report::fmt_f64;
use crate::fields::SampledState;

/// VTK legacy ASCII STRUCTURED_POINTS with velocity, pressure and force
/// arrays.
pub fn render_vtk(state: &SampledState, title: &str) -> String {
    let grid = state.velocity.grid();
    let dim = grid.dim();
    let res = grid.resolution();
    let (nx, ny, nz) = (res[0], res[1], if dim == 3 { res[2] } else { 1 });
    let npoints = nx * ny * nz;

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push('\n');
    out.push_str("ASCII\n");
    out.push_str("DATASET STRUCTURED_POINTS\n");
    out.push_str(&format!("DIMENSIONS {nx} {ny} {nz}\n"));
    let origin = grid.origin();
    let (ox, oy, oz) = (origin[0], origin[1], if dim == 3 { origin[2] } else { 0.0 });
    out.push_str(&format!(
        "ORIGIN {} {} {}\n",
        fmt_f64(ox),
        fmt_f64(oy),
        fmt_f64(oz)
    ));
    let (sx, sy, sz) = (
        grid.spacing(0),
        grid.spacing(1),
        if dim == 3 { grid.spacing(2) } else { 1.0 },
    );
    out.push_str(&format!(
        "SPACING {} {} {}\n",
        fmt_f64(sx),
        fmt_f64(sy),
        fmt_f64(sz)
    ));
    out.push_str(&format!("POINT_DATA {npoints}\n"));

    // VTK point order: x fastest, z slowest.
    let flat_at = |i: usize, j: usize, k: usize| -> usize {
        if dim == 2 {
            grid.flat_index(&[i, j])
        } else {
            grid.flat_index(&[i, j, k])
        }
    };
    let write_vectors = |out: &mut String, name: &str, field: &crate::fields::VectorField| {
        out.push_str(&format!("VECTORS {name} double\n"));
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let flat = flat_at(i, j, k);
                    let vx = field.component(0).samples()[flat];
                    let vy = field.component(1).samples()[flat];
                    let vz = if dim == 3 {
                        field.component(2).samples()[flat]
                    } else {
                        0.0
                    };
                    out.push_str(&format!(
                        "{} {} {}\n",
                        fmt_f64(vx),
                        fmt_f64(vy),
                        fmt_f64(vz)
                    ));
                }
            }
        }
    };
    write_vectors(&mut out, "velocity", &state.velocity);
    out.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                out.push_str(&fmt_f64(state.pressure.samples()[flat_at(i, j, k)]));
                out.push('\n');
            }
        }
    }
    write_vectors(&mut out, "force", &state.force);
    out
}

/// Flat CSV in axis-major row order: x1,x2[,x3],v1,v2[,v3],p.
pub fn render_csv(state: &SampledState) -> String {
    let grid = state.velocity.grid();
    let dim = grid.dim();
    let mut out = String::new();
    out.push_str(match dim {
        2 => "x1,x2,v1,v2,p\n",
        _ => "x1,x2,x3,v1,v2,v3,p\n",
    });
    for (flat, x) in grid.points() {
        for c in x.iter() {
            out.push_str(&fmt_f64(*c));
            out.push(',');
        }
        for comp in 0..dim {
            out.push_str(&fmt_f64(state.velocity.component(comp).samples()[flat]));
            out.push(',');
        }
        out.push_str(&fmt_f64(state.pressure.samples()[flat]));
        out.push('\n');
    }
    out
}
