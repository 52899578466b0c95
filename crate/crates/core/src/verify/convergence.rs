//! Grid- and panel-refinement studies with least-squares order fits.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::evolution::{duhamel_evolve_with_panels, EvolutionSpec, ForceModel, TimeQuadrature};
use crate::fields::{FluidParams, Grid, ScalarField, SolutionFamily, TimeProfile};
use crate::operators::{gradient, laplacian, OperatorBackend};

/// What gets refined and measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    /// Spectral gradient of sin(pi x1); error floor, no order.
    SpectralGradient,
    /// Finite-difference gradient of sin(pi x1); second order.
    FdGradient,
    /// Finite-difference Laplacian of sin(pi x1); second order.
    FdLaplacian,
    /// Simpson panel refinement of the Duhamel integral on the
    /// constant-forced Taylor family; fourth order.
    DuhamelPanels,
}

impl StudyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spectral-gradient" => Ok(StudyKind::SpectralGradient),
            "fd-gradient" => Ok(StudyKind::FdGradient),
            "fd-laplacian" => Ok(StudyKind::FdLaplacian),
            "duhamel-panels" => Ok(StudyKind::DuhamelPanels),
            other => Err(Error::Config(format!(
                "unknown study '{other}' (expected spectral-gradient, fd-gradient, \
                 fd-laplacian or duhamel-panels)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::SpectralGradient => "spectral-gradient",
            StudyKind::FdGradient => "fd-gradient",
            StudyKind::FdLaplacian => "fd-laplacian",
            StudyKind::DuhamelPanels => "duhamel-panels",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    /// Grid resolution or panel count, depending on the study.
    pub resolution: usize,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub kind: StudyKind,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of ln(error) against ln(h), h = 1/resolution.
    pub fitted_order: f64,
}

fn operator_error(kind: StudyKind, n: usize) -> Result<f64> {
    let grid = Grid::square(n)?;
    let field = ScalarField::from_fn(grid.clone(), |x| (PI * x[0]).sin());
    match kind {
        StudyKind::SpectralGradient | StudyKind::FdGradient => {
            let backend = if kind == StudyKind::SpectralGradient {
                OperatorBackend::Spectral
            } else {
                OperatorBackend::FiniteDifference2
            };
            let g = gradient(&field, backend)?;
            let want = ScalarField::from_fn(grid, |x| PI * (PI * x[0]).cos());
            g.component(0).sup_distance(&want)
        }
        StudyKind::FdLaplacian => {
            let lap = laplacian(&field, OperatorBackend::FiniteDifference2)?;
            let want = field.scale(-PI * PI);
            lap.sup_distance(&want)
        }
        StudyKind::DuhamelPanels => unreachable!("handled separately"),
    }
}

fn duhamel_error(panels: usize) -> Result<f64> {
    let fluid = FluidParams::new(0.02, 1.0)?;
    // Constant forcing keeps the time integrand a true exponential, so the
    // Simpson error is measurable at every panel count.
    let family = SolutionFamily::ForcedTaylorVortex2D {
        forcing: TimeProfile::Constant(1.0),
    };
    let grid = Grid::square(16)?;
    let v0 = family.sample_velocity(&fluid, &grid, 0.0)?;
    let spec = EvolutionSpec::new(
        fluid,
        v0,
        ForceModel::Family(family.clone()),
        None,
        TimeQuadrature::default(),
    )?;
    let t = 1.0;
    let evolved = duhamel_evolve_with_panels(&spec, t, panels)?;
    let want = family.sample_velocity(&fluid, &grid, t)?;
    evolved.sup_distance(&want)
}

/// Run a refinement study over at least three resolutions (or panel
/// counts) and fit the observed order.
pub fn convergence_study(kind: StudyKind, resolutions: &[usize]) -> Result<ConvergenceStudy> {
    if resolutions.len() < 3 {
        return Err(Error::TooFewResolutions(resolutions.len()));
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let error = match kind {
            StudyKind::DuhamelPanels => duhamel_error(n)?,
            _ => operator_error(kind, n)?,
        };
        rows.push(ConvergenceRow {
            resolution: n,
            error,
        });
    }
    let fitted_order = fit_order(&rows);
    Ok(ConvergenceStudy {
        kind,
        rows,
        fitted_order,
    })
}

/// Least-squares slope of ln(error) vs ln(h). Errors at the round-off floor
/// are clamped away from zero so the fit stays finite.
fn fit_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let h = 1.0 / r.resolution as f64;
            (h.ln(), r.error.max(1e-300).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}
