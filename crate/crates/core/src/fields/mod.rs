//! Grids and grid-sampled fields shared by every other module, plus the
//! closed-form solution families and their pointwise evaluators.

mod family;
mod profile;

pub use family::{FamilyTag, SampledState, SolutionFamily};
pub use profile::{omega, TimeProfile};

use crate::error::{Error, Result};

/// Rectilinear periodic sampling lattice in 2 or 3 dimensions.
///
/// Axis `j` carries `resolution[j]` samples at `origin[j] + m * spacing(j)`
/// for `m = 0..N_j`; the point at `origin + period` is identified with the
/// origin and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    resolution: Vec<usize>,
    period: Vec<f64>,
    origin: Vec<f64>,
}

impl Grid {
    /// Grid with explicit per-axis resolution, period and origin.
    pub fn new(resolution: &[usize], period: &[f64], origin: &[f64]) -> Result<Self> {
        let dim = resolution.len();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDim(dim));
        }
        if period.len() != dim || origin.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: period.len().max(origin.len()),
            });
        }
        for (axis, &n) in resolution.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(Error::BadResolution { axis, n });
            }
        }
        for (axis, &p) in period.iter().enumerate() {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::BadPeriod { axis, period: p });
            }
        }
        Ok(Self {
            resolution: resolution.to_vec(),
            period: period.to_vec(),
            origin: origin.to_vec(),
        })
    }

    /// Uniform grid with `n` samples per axis on the default period-2 cell.
    pub fn uniform(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDim(dim));
        }
        Grid::new(&vec![n; dim], &vec![2.0; dim], &vec![0.0; dim])
    }

    /// `n x n` cell `[0,2)^2`.
    pub fn square(n: usize) -> Result<Self> {
        Grid::uniform(2, n)
    }

    /// `n x n x n` cell `[0,2)^3`.
    pub fn cube(n: usize) -> Result<Self> {
        Grid::uniform(3, n)
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn period(&self) -> &[f64] {
        &self.period
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Sample spacing on `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.resolution[axis] as f64
    }

    /// Total sample count.
    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of sample `m` on `axis`.
    pub fn coord(&self, axis: usize, m: usize) -> f64 {
        self.origin[axis] + m as f64 * self.spacing(axis)
    }

    /// Flat index of the multi-index `idx` (axis 0 slowest).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (axis, &i) in idx.iter().enumerate() {
            flat = flat * self.resolution[axis] + i;
        }
        flat
    }

    /// Iterate every sample point as (flat index, coordinates).
    pub fn points(&self) -> GridPoints<'_> {
        GridPoints {
            grid: self,
            next: 0,
            idx: vec![0; self.dim()],
        }
    }

    /// Cell volume element h_1 h_2 (h_3).
    pub fn volume_element(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// True when every axis has the period-2 cell required by the solution
    /// families.
    pub fn assert_unit_families_cell(&self) -> Result<()> {
        for (axis, &p) in self.period.iter().enumerate() {
            if (p - 2.0).abs() > 1e-12 {
                return Err(Error::PeriodMismatch { axis, period: p });
            }
        }
        Ok(())
    }
}

/// Iterator over grid points in axis-major (axis 0 slowest) order.
pub struct GridPoints<'a> {
    grid: &'a Grid,
    next: usize,
    idx: Vec<usize>,
}

impl Iterator for GridPoints<'_> {
    type Item = (usize, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.grid.len() {
            return None;
        }
        let flat = self.next;
        let coords: Vec<f64> = self
            .idx
            .iter()
            .enumerate()
            .map(|(a, &m)| self.grid.coord(a, m))
            .collect();
        self.next += 1;
        // Increment the multi-index, last axis fastest.
        for axis in (0..self.idx.len()).rev() {
            self.idx[axis] += 1;
            if self.idx[axis] < self.grid.resolution[axis] {
                break;
            }
            self.idx[axis] = 0;
        }
        Some((flat, coords))
    }
}

/// Fluid constants: kinematic viscosity and density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    pub kappa: f64,
    pub rho: f64,
}

impl FluidParams {
    pub fn new(kappa: f64, rho: f64) -> Result<Self> {
        if kappa <= 0.0 || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive, got {rho}"
            )));
        }
        Ok(Self { kappa, rho })
    }
}

/// Real scalar field sampled on a [`Grid`] in axis-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    samples: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                actual: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self { grid, samples })
    }

    /// All-zero field.
    pub fn zeros(grid: Grid) -> Self {
        let samples = vec![0.0; grid.len()];
        Self { grid, samples }
    }

    /// Constant field.
    pub fn constant(grid: Grid, value: f64) -> Self {
        let samples = vec![value; grid.len()];
        Self { grid, samples }
    }

    /// Sample a closure over every grid node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut samples = vec![0.0; grid.len()];
        for (flat, x) in grid.points() {
            samples[flat] = f(&x);
        }
        Self { grid, samples }
    }

    pub(crate) fn from_raw(grid: Grid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete cell mean (equals the trapezoidal cell average on a
    /// periodic lattice).
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("scalar field subtraction"));
        }
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// Sup-norm of the difference.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

/// Vector field with `dim` scalar components on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let dim = components.len();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDim(dim));
        }
        let grid = components[0].grid().clone();
        if grid.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                actual: dim,
            });
        }
        for c in &components {
            if c.grid() != &grid {
                return Err(Error::GridMismatch("vector field components"));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        let components = (0..grid.dim())
            .map(|_| ScalarField::zeros(grid.clone()))
            .collect();
        Self { grid, components }
    }

    /// Sample a closure writing all components at once.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64], &mut [f64])) -> Self {
        let dim = grid.dim();
        let mut data: Vec<Vec<f64>> = (0..dim).map(|_| vec![0.0; grid.len()]).collect();
        let mut out = [0.0f64; 3];
        for (flat, x) in grid.points() {
            f(&x, &mut out[..dim]);
            for (c, column) in data.iter_mut().enumerate() {
                column[flat] = out[c];
            }
        }
        let components = data
            .into_iter()
            .map(|samples| ScalarField::from_raw(grid.clone(), samples))
            .collect();
        Self { grid, components }
    }

    pub(crate) fn from_components_unchecked(grid: Grid, components: Vec<ScalarField>) -> Self {
        Self { grid, components }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Sup over nodes and components.
    pub fn sup_norm(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.sup_norm()))
    }

    /// Cell-integrated L2 norm: sqrt(h^n sum |v|^2).
    pub fn l2_norm(&self) -> f64 {
        let vol = self.grid.volume_element();
        let sum: f64 = self
            .components
            .iter()
            .map(|c| c.samples().iter().map(|v| v * v).sum::<f64>())
            .sum();
        (vol * sum).sqrt()
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("vector field subtraction"));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            components,
        })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("vector field addition"));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                ScalarField::from_raw(
                    self.grid.clone(),
                    a.samples()
                        .iter()
                        .zip(b.samples())
                        .map(|(x, y)| x + y)
                        .collect(),
                )
            })
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            components,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    pub fn sup_distance(&self, other: &VectorField) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid::uniform(1, 8).is_err());
        assert!(Grid::uniform(4, 8).is_err());
        assert!(Grid::uniform(2, 7).is_err(), "odd resolution");
        assert!(Grid::uniform(2, 2).is_err(), "too coarse");
        assert!(Grid::new(&[8, 8], &[2.0, -1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn grid_points_are_axis_major() {
        let g = Grid::square(4).unwrap();
        let pts: Vec<_> = g.points().collect();
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0].1, vec![0.0, 0.0]);
        assert_eq!(pts[1].1, vec![0.0, 0.5]); // axis 1 fastest
        assert_eq!(pts[4].1, vec![0.5, 0.0]);
        assert_eq!(pts[15].1, vec![1.5, 1.5]);
    }

    #[test]
    fn flat_index_matches_iteration() {
        let g = Grid::cube(4).unwrap();
        for (flat, _) in g.points() {
            let i0 = flat / 16;
            let i1 = (flat / 4) % 4;
            let i2 = flat % 4;
            assert_eq!(g.flat_index(&[i0, i1, i2]), flat);
        }
    }

    #[test]
    fn scalar_field_validates() {
        let g = Grid::square(4).unwrap();
        assert!(ScalarField::new(g.clone(), vec![0.0; 15]).is_err());
        assert!(ScalarField::new(g.clone(), vec![f64::NAN; 16]).is_err());
        let f = ScalarField::from_fn(g, |x| x[0] + 2.0 * x[1]);
        assert_eq!(f.samples()[1], 1.0); // (0, 0.5)
    }

    #[test]
    fn vector_field_requires_shared_grid() {
        let g1 = Grid::square(4).unwrap();
        let g2 = Grid::square(8).unwrap();
        let a = ScalarField::zeros(g1.clone());
        let b = ScalarField::zeros(g2);
        assert!(VectorField::new(vec![a.clone(), b]).is_err());
        assert!(
            VectorField::new(vec![a.clone(), a.clone(), a]).is_err(),
            "2D grid, 3 components"
        );
    }

    #[test]
    fn norms() {
        let g = Grid::square(4).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| {
            if x[0] == 0.5 && x[1] == 0.0 {
                -3.0
            } else {
                1.0
            }
        });
        assert_eq!(f.sup_norm(), 3.0);
        let v = VectorField::from_fn(g, |_, out| out.copy_from_slice(&[3.0, 4.0]));
        // |v|^2 = 25 over cell area 4.
        assert!((v.l2_norm() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn family_cell_assertion() {
        let ok = Grid::square(8).unwrap();
        assert!(ok.assert_unit_families_cell().is_ok());
        let bad = Grid::new(&[8, 8], &[2.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!(bad.assert_unit_families_cell().is_err());
    }
}
