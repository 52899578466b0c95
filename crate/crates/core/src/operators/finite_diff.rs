//! Second-order centered finite differences with periodic wrap.

use crate::fields::{Grid, ScalarField};

/// Flat index of the neighbor of `flat` shifted by +-1 along `axis`.
fn neighbor(grid: &Grid, flat: usize, axis: usize, up: bool) -> usize {
    let res = grid.resolution();
    let stride: usize = res[axis + 1..].iter().product();
    let n = res[axis];
    let i = (flat / stride) % n;
    if up {
        if i + 1 == n {
            flat - (n - 1) * stride
        } else {
            flat + stride
        }
    } else if i == 0 {
        flat + (n - 1) * stride
    } else {
        flat - stride
    }
}

/// Centered first derivative along `axis`.
pub fn derivative(s: &ScalarField, axis: usize) -> ScalarField {
    let grid = s.grid();
    let h2 = 2.0 * grid.spacing(axis);
    let src = s.samples();
    let out: Vec<f64> = (0..src.len())
        .map(|flat| {
            let up = src[neighbor(grid, flat, axis, true)];
            let dn = src[neighbor(grid, flat, axis, false)];
            (up - dn) / h2
        })
        .collect();
    ScalarField::from_raw(grid.clone(), out)
}

/// Standard (2n+1)-point Laplacian: sum of per-axis second differences.
pub fn laplacian(s: &ScalarField) -> ScalarField {
    let grid = s.grid();
    let src = s.samples();
    let mut out = vec![0.0; src.len()];
    for axis in 0..grid.dim() {
        let h2 = grid.spacing(axis) * grid.spacing(axis);
        for (flat, o) in out.iter_mut().enumerate() {
            let up = src[neighbor(grid, flat, axis, true)];
            let dn = src[neighbor(grid, flat, axis, false)];
            *o += (up - 2.0 * src[flat] + dn) / h2;
        }
    }
    ScalarField::from_raw(grid.clone(), out)
}
