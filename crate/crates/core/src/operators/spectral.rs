//! Multi-dimensional FFT workspace on the flat axis-major sample layout.
//!
//! Wavenumber conventions: axis `j` of length `N` carries the signed modes
//! k(m) = 2 pi m~ / L with m~ = m for m < N/2 and m - N for m > N/2. The
//! Nyquist mode m = N/2 is kept at frequency N/2 for even-order operators
//! (`k_sq`) and zeroed for odd-order ones (`k_deriv`) so derivatives of real
//! fields stay real.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::fields::{Grid, ScalarField, VectorField};

pub struct SpectralWorkspace {
    grid: Grid,
    k_deriv: Vec<Vec<f64>>,
    k_sq: Vec<Vec<f64>>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl SpectralWorkspace {
    pub fn new(grid: &Grid) -> Result<Self> {
        let mut planner = FftPlanner::new();
        let mut forward = HashMap::new();
        let mut inverse = HashMap::new();
        let mut k_deriv = Vec::new();
        let mut k_sq = Vec::new();
        for axis in 0..grid.dim() {
            let n = grid.resolution()[axis];
            let l = grid.period()[axis];
            forward
                .entry(n)
                .or_insert_with(|| planner.plan_fft_forward(n));
            inverse
                .entry(n)
                .or_insert_with(|| planner.plan_fft_inverse(n));
            let mut kd = vec![0.0; n];
            let mut ks = vec![0.0; n];
            for m in 0..n {
                let signed = if m <= n / 2 {
                    m as i64
                } else {
                    m as i64 - n as i64
                };
                let k = 2.0 * PI * signed as f64 / l;
                kd[m] = if m == n / 2 { 0.0 } else { k };
                ks[m] = k * k;
            }
            k_deriv.push(kd);
            k_sq.push(ks);
        }
        Ok(Self {
            grid: grid.clone(),
            k_deriv,
            k_sq,
            forward,
            inverse,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// First-derivative wavenumbers (Nyquist zeroed) on `axis`.
    pub fn k_deriv(&self, axis: usize) -> &[f64] {
        &self.k_deriv[axis]
    }

    /// Squared wavenumbers (Nyquist kept) on `axis`.
    pub fn k_sq(&self, axis: usize) -> &[f64] {
        &self.k_sq[axis]
    }

    fn apply_axis(&self, data: &mut [Complex64], axis: usize, inv: bool) {
        let res = self.grid.resolution();
        let n = res[axis];
        let stride: usize = res[axis + 1..].iter().product();
        let block = n * stride;
        let outer = data.len() / block;
        let plan = if inv {
            &self.inverse[&n]
        } else {
            &self.forward[&n]
        };
        let mut line = vec![Complex64::default(); n];
        for o in 0..outer {
            for i in 0..stride {
                let base = o * block + i;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                plan.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }

    /// Forward DFT of a real sample array (unnormalized).
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for axis in 0..self.grid.dim() {
            self.apply_axis(&mut data, axis, false);
        }
        data
    }

    /// Inverse DFT, normalized, real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        for axis in 0..self.grid.dim() {
            self.apply_axis(&mut spectrum, axis, true);
        }
        let scale = 1.0 / self.grid.len() as f64;
        spectrum.into_iter().map(|v| v.re * scale).collect()
    }

    /// Visit every spectral mode as (flat index, per-axis mode indices).
    pub(crate) fn for_each_mode(&self, mut f: impl FnMut(usize, &[usize])) {
        let res = self.grid.resolution();
        let dim = res.len();
        let mut idx = vec![0usize; dim];
        for flat in 0..self.grid.len() {
            f(flat, &idx);
            for axis in (0..dim).rev() {
                idx[axis] += 1;
                if idx[axis] < res[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Spectral derivative of `s` along `axis`.
    pub fn derivative(&self, s: &ScalarField, axis: usize) -> ScalarField {
        let mut spec = self.forward(s.samples());
        let kd = &self.k_deriv[axis];
        self.for_each_mode(|flat, modes| {
            let k = kd[modes[axis]];
            let v = spec[flat];
            spec[flat] = Complex64::new(-v.im * k, v.re * k);
        });
        ScalarField::from_raw(self.grid.clone(), self.inverse_real(spec))
    }

    /// Spectral Laplacian of `s`.
    pub fn laplacian(&self, s: &ScalarField) -> ScalarField {
        let mut spec = self.forward(s.samples());
        self.for_each_mode(|flat, modes| {
            let k2: f64 = (0..self.grid.dim()).map(|a| self.k_sq[a][modes[a]]).sum();
            spec[flat] *= -k2;
        });
        ScalarField::from_raw(self.grid.clone(), self.inverse_real(spec))
    }

    /// Forward transforms of every component of `v`.
    pub(crate) fn forward_vector(&self, v: &VectorField) -> Vec<Vec<Complex64>> {
        v.components()
            .iter()
            .map(|c| self.forward(c.samples()))
            .collect()
    }

    pub(crate) fn field_from_spectrum(&self, spectrum: Vec<Complex64>) -> ScalarField {
        ScalarField::from_raw(self.grid.clone(), self.inverse_real(spectrum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wavenumber_layout() {
        let grid = Grid::square(8).unwrap();
        let ws = SpectralWorkspace::new(&grid).unwrap();
        let kd = ws.k_deriv(0);
        assert_eq!(kd[0], 0.0);
        assert_abs_diff_eq!(kd[1], PI, epsilon = 1e-15);
        assert_eq!(kd[4], 0.0, "Nyquist zeroed for derivatives");
        assert_abs_diff_eq!(kd[7], -PI, epsilon = 1e-15);
        let ks = ws.k_sq(0);
        assert_abs_diff_eq!(ks[4], (4.0 * PI).powi(2), epsilon = 1e-12);
    }

    #[test]
    fn roundtrip_is_identity() {
        let grid = Grid::square(8).unwrap();
        let ws = SpectralWorkspace::new(&grid).unwrap();
        let f = ScalarField::from_fn(grid, |x| (PI * x[0]).sin() + 0.3 * (2.0 * PI * x[1]).cos());
        let back = ws.inverse_real(ws.forward(f.samples()));
        for (a, b) in f.samples().iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn derivative_of_single_mode() {
        let grid = Grid::square(16).unwrap();
        let ws = SpectralWorkspace::new(&grid).unwrap();
        let f = ScalarField::from_fn(grid.clone(), |x| (2.0 * PI * x[0]).cos());
        let d = ws.derivative(&f, 0);
        let want = ScalarField::from_fn(grid, |x| -2.0 * PI * (2.0 * PI * x[0]).sin());
        assert!(d.sup_distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn laplacian_eigenfunction() {
        let grid = Grid::square(16).unwrap();
        let ws = SpectralWorkspace::new(&grid).unwrap();
        let f = ScalarField::from_fn(grid, |x| (PI * x[0]).sin() * (PI * x[1]).cos());
        let lap = ws.laplacian(&f);
        let want = f.scale(-2.0 * PI * PI);
        assert!(lap.sup_distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_3d_axis_strides() {
        let grid = Grid::cube(8).unwrap();
        let ws = SpectralWorkspace::new(&grid).unwrap();
        for axis in 0..3 {
            let f = ScalarField::from_fn(grid.clone(), |x| (PI * x[axis]).sin());
            let d = ws.derivative(&f, axis);
            let want = ScalarField::from_fn(grid.clone(), |x| PI * (PI * x[axis]).cos());
            assert!(d.sup_distance(&want).unwrap() < 1e-12, "axis {axis}");
        }
    }
}
