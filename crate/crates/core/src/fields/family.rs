//! The five closed-form solution families and their pointwise evaluators.
//!
//! Velocities follow the decaying Taylor-vortex and ABC/Beltrami closed
//! forms; forced variants multiply the initial profile by the amplitude law
//! Omega(t) e^{-rt}. The pressure closed forms are derived from the momentum
//! balance of these velocity conventions (p = -rho * potential of the
//! inertial term), which fixes their overall sign; all of them have zero
//! cell mean.

use std::f64::consts::PI;

use super::profile::{omega, TimeProfile};
use super::{FluidParams, Grid, ScalarField, VectorField};
use crate::error::{Error, Result};

/// Discriminant for the five families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    TaylorVortex2D,
    ForcedTaylorVortex2D,
    AbcFlow3D,
    ForcedAbcFlow3D,
    AbcExpForced3D,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [
        FamilyTag::TaylorVortex2D,
        FamilyTag::ForcedTaylorVortex2D,
        FamilyTag::AbcFlow3D,
        FamilyTag::ForcedAbcFlow3D,
        FamilyTag::AbcExpForced3D,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::TaylorVortex2D => "taylor2d",
            FamilyTag::ForcedTaylorVortex2D => "forced-taylor2d",
            FamilyTag::AbcFlow3D => "abc3d",
            FamilyTag::ForcedAbcFlow3D => "forced-abc3d",
            FamilyTag::AbcExpForced3D => "abc-exp-forced3d",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilyTag::TaylorVortex2D | FamilyTag::ForcedTaylorVortex2D => 2,
            _ => 3,
        }
    }

    /// Coefficient of kappa in the viscous decay exponent: 2 pi^2 for the 2D
    /// families, pi^2 for the 3D ones.
    pub fn decay_rate_coefficient(&self) -> f64 {
        match self.dim() {
            2 => 2.0 * PI * PI,
            _ => PI * PI,
        }
    }
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the five closed-form solution families with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionFamily {
    TaylorVortex2D,
    ForcedTaylorVortex2D {
        forcing: TimeProfile,
    },
    AbcFlow3D {
        a: f64,
        b: f64,
        c: f64,
    },
    ForcedAbcFlow3D {
        a: f64,
        b: f64,
        c: f64,
        forcing: TimeProfile,
    },
    AbcExpForced3D {
        a: f64,
        b: f64,
        c: f64,
        force_amplitude: f64,
        force_rate: f64,
    },
}

/// Velocity, pressure and applied force sampled on one grid at one time.
#[derive(Debug, Clone)]
pub struct SampledState {
    pub velocity: VectorField,
    pub pressure: ScalarField,
    pub force: VectorField,
}

impl SolutionFamily {
    pub fn tag(&self) -> FamilyTag {
        match self {
            SolutionFamily::TaylorVortex2D => FamilyTag::TaylorVortex2D,
            SolutionFamily::ForcedTaylorVortex2D { .. } => FamilyTag::ForcedTaylorVortex2D,
            SolutionFamily::AbcFlow3D { .. } => FamilyTag::AbcFlow3D,
            SolutionFamily::ForcedAbcFlow3D { .. } => FamilyTag::ForcedAbcFlow3D,
            SolutionFamily::AbcExpForced3D { .. } => FamilyTag::AbcExpForced3D,
        }
    }

    pub fn dim(&self) -> usize {
        self.tag().dim()
    }

    /// Viscous decay rate r = (2)pi^2 kappa of the velocity amplitude.
    pub fn decay_rate(&self, fluid: &FluidParams) -> f64 {
        self.tag().decay_rate_coefficient() * fluid.kappa
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SolutionFamily::ForcedTaylorVortex2D { forcing }
            | SolutionFamily::ForcedAbcFlow3D { forcing, .. } => forcing.validate(),
            SolutionFamily::AbcExpForced3D { force_rate, .. } => {
                if *force_rate < 0.0 || !force_rate.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "force decay rate must be >= 0, got {force_rate}"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn check_point(&self, x: &[f64], t: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(())
    }

    /// Amplitude law Omega(t) for the forced families; 1 for the others.
    pub fn omega_at(&self, fluid: &FluidParams, t: f64) -> Result<f64> {
        match self {
            SolutionFamily::ForcedTaylorVortex2D { forcing }
            | SolutionFamily::ForcedAbcFlow3D { forcing, .. } => {
                omega(forcing, self.decay_rate(fluid), t)
            }
            _ => Ok(1.0),
        }
    }

    /// Forcing amplitude G(t) for the forced families; 0 for the others.
    fn forcing_value(&self, t: f64) -> Result<f64> {
        match self {
            SolutionFamily::ForcedTaylorVortex2D { forcing }
            | SolutionFamily::ForcedAbcFlow3D { forcing, .. } => forcing.value(t),
            _ => Ok(0.0),
        }
    }

    /// Accumulated uniform-stream speed h(t) of the exponentially forced ABC
    /// family: f_I t when the rate is zero, (f_I/rate)(1 - e^{-rate t})
    /// otherwise.
    pub fn uniform_stream(&self, t: f64) -> f64 {
        match self {
            SolutionFamily::AbcExpForced3D {
                force_amplitude,
                force_rate,
                ..
            } => {
                if *force_rate == 0.0 {
                    force_amplitude * t
                } else {
                    force_amplitude / force_rate * (1.0 - (-force_rate * t).exp())
                }
            }
            _ => 0.0,
        }
    }

    /// Initial velocity profile v0 at `x` written into `out`.
    pub fn initial_velocity_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            SolutionFamily::TaylorVortex2D | SolutionFamily::ForcedTaylorVortex2D { .. } => {
                out[0] = (PI * x[0]).sin() * (PI * x[1]).cos();
                out[1] = -(PI * x[0]).cos() * (PI * x[1]).sin();
            }
            SolutionFamily::AbcFlow3D { a, b, c }
            | SolutionFamily::ForcedAbcFlow3D { a, b, c, .. }
            | SolutionFamily::AbcExpForced3D { a, b, c, .. } => {
                out[0] = a * (PI * x[2]).sin() - c * (PI * x[1]).cos();
                out[1] = b * (PI * x[0]).sin() - a * (PI * x[2]).cos();
                out[2] = c * (PI * x[1]).sin() - b * (PI * x[0]).cos();
            }
        }
    }

    /// Initial velocity v0 at `x`.
    pub fn initial_velocity(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x, 0.0)?;
        let mut out = vec![0.0; self.dim()];
        self.initial_velocity_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn velocity_into(
        &self,
        fluid: &FluidParams,
        x: &[f64],
        t: f64,
        amplitude: f64,
        out: &mut [f64],
    ) {
        let decay = (-self.decay_rate(fluid) * t).exp();
        self.initial_velocity_into(x, out);
        for v in out.iter_mut() {
            *v *= amplitude * decay;
        }
        if let SolutionFamily::AbcExpForced3D { .. } = self {
            out[0] += self.uniform_stream(t);
        }
    }

    /// Closed-form velocity at `(x, t)`.
    pub fn velocity(&self, fluid: &FluidParams, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_point(x, t)?;
        let amplitude = self.omega_at(fluid, t)?;
        let mut out = vec![0.0; self.dim()];
        self.velocity_into(fluid, x, t, amplitude, &mut out);
        Ok(out)
    }

    /// Analytic time derivative of the velocity at `(x, t)`.
    pub fn velocity_time_derivative(
        &self,
        fluid: &FluidParams,
        x: &[f64],
        t: f64,
    ) -> Result<Vec<f64>> {
        self.check_point(x, t)?;
        let r = self.decay_rate(fluid);
        let decay = (-r * t).exp();
        let mut v0 = vec![0.0; self.dim()];
        self.initial_velocity_into(x, &mut v0);
        match self {
            SolutionFamily::TaylorVortex2D | SolutionFamily::AbcFlow3D { .. } => {
                // d/dt e^{-rt} v0 = -r e^{-rt} v0
                Ok(v0.into_iter().map(|v| -r * decay * v).collect())
            }
            SolutionFamily::ForcedTaylorVortex2D { .. }
            | SolutionFamily::ForcedAbcFlow3D { .. } => {
                // d/dt [Omega e^{-rt}] = G(t) - r Omega(t) e^{-rt}
                let amp = self.forcing_value(t)? - r * self.omega_at(fluid, t)? * decay;
                Ok(v0.into_iter().map(|v| amp * v).collect())
            }
            SolutionFamily::AbcExpForced3D {
                force_amplitude,
                force_rate,
                ..
            } => {
                // ABC part decays; the additive stream grows at h'(t) = f_I e^{-lam t}.
                let mut d: Vec<f64> = v0.into_iter().map(|v| -r * decay * v).collect();
                d[0] += force_amplitude * (-force_rate * t).exp();
                Ok(d)
            }
        }
    }

    fn pressure_base(&self, x: &[f64], rho: f64) -> f64 {
        match self {
            SolutionFamily::TaylorVortex2D | SolutionFamily::ForcedTaylorVortex2D { .. } => {
                rho / 4.0 * ((2.0 * PI * x[0]).cos() + (2.0 * PI * x[1]).cos())
            }
            SolutionFamily::AbcFlow3D { a, b, c }
            | SolutionFamily::ForcedAbcFlow3D { a, b, c, .. }
            | SolutionFamily::AbcExpForced3D { a, b, c, .. } => {
                rho * (b * c * (PI * x[0]).cos() * (PI * x[1]).sin()
                    + a * b * (PI * x[2]).cos() * (PI * x[0]).sin()
                    + a * c * (PI * x[1]).cos() * (PI * x[2]).sin())
            }
        }
    }

    /// Closed-form pressure at `(x, t)` in the zero-cell-mean gauge.
    ///
    /// The sign is the one demanded by the momentum balance of this crate's
    /// velocity conventions: grad p = -rho * (inertial term).
    pub fn pressure(&self, fluid: &FluidParams, x: &[f64], t: f64) -> Result<f64> {
        self.check_point(x, t)?;
        let amp = self.omega_at(fluid, t)?;
        let decay = (-2.0 * self.decay_rate(fluid) * t).exp();
        Ok(self.pressure_base(x, fluid.rho) * amp * amp * decay)
    }

    /// Externally applied force at `(x, t)`.
    pub fn force(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_point(x, t)?;
        let mut out = vec![0.0; self.dim()];
        self.force_into(x, t, &mut out)?;
        Ok(out)
    }

    pub(crate) fn force_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        match self {
            SolutionFamily::TaylorVortex2D | SolutionFamily::AbcFlow3D { .. } => {}
            SolutionFamily::ForcedTaylorVortex2D { .. }
            | SolutionFamily::ForcedAbcFlow3D { .. } => {
                let g = self.forcing_value(t)?;
                self.initial_velocity_into(x, out);
                for v in out.iter_mut() {
                    *v *= g;
                }
            }
            SolutionFamily::AbcExpForced3D {
                force_amplitude,
                force_rate,
                ..
            } => {
                out[0] = force_amplitude * (-force_rate * t).exp();
            }
        }
        Ok(())
    }

    /// Closed-form nonlinear inertial term g(x, t), including the
    /// Omega^2 e^{-2rt} amplitude factor of the forced families. Not
    /// available for the exponentially forced ABC family.
    pub fn inertial_closed_form(&self, fluid: &FluidParams, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_point(x, t)?;
        if matches!(self, SolutionFamily::AbcExpForced3D { .. }) {
            return Err(Error::NoClosedFormInertial(self.tag().name()));
        }
        let amp = self.omega_at(fluid, t)?;
        let decay = (-2.0 * self.decay_rate(fluid) * t).exp();
        let factor = amp * amp * decay;
        let g = match self {
            SolutionFamily::TaylorVortex2D | SolutionFamily::ForcedTaylorVortex2D { .. } => {
                vec![
                    0.5 * PI * (2.0 * PI * x[0]).sin() * factor,
                    0.5 * PI * (2.0 * PI * x[1]).sin() * factor,
                ]
            }
            SolutionFamily::AbcFlow3D { a, b, c }
            | SolutionFamily::ForcedAbcFlow3D { a, b, c, .. } => {
                let (s1, c1) = (PI * x[0]).sin_cos();
                let (s2, c2) = (PI * x[1]).sin_cos();
                let (s3, c3) = (PI * x[2]).sin_cos();
                vec![
                    PI * (b * c * s1 * s2 - a * b * c1 * c3) * factor,
                    PI * (a * c * s2 * s3 - b * c * c1 * c2) * factor,
                    PI * (a * b * s1 * s3 - a * c * c2 * c3) * factor,
                ]
            }
            SolutionFamily::AbcExpForced3D { .. } => unreachable!(),
        };
        Ok(g)
    }

    /// Sample velocity, pressure and force over every node of `grid` at time
    /// `t`, in axis-major order.
    pub fn sample(&self, fluid: &FluidParams, grid: &Grid, t: f64) -> Result<SampledState> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: grid.dim(),
            });
        }
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        grid.assert_unit_families_cell()?;
        self.validate()?;
        let dim = self.dim();
        let amplitude = self.omega_at(fluid, t)?;

        let mut vel: Vec<Vec<f64>> = (0..dim).map(|_| vec![0.0; grid.len()]).collect();
        let mut frc: Vec<Vec<f64>> = (0..dim).map(|_| vec![0.0; grid.len()]).collect();
        let mut prs = vec![0.0; grid.len()];
        let mut buf = [0.0f64; 3];
        for (flat, x) in grid.points() {
            self.velocity_into(fluid, &x, t, amplitude, &mut buf[..dim]);
            for (c, column) in vel.iter_mut().enumerate() {
                column[flat] = buf[c];
            }
            self.force_into(&x, t, &mut buf[..dim])?;
            for (c, column) in frc.iter_mut().enumerate() {
                column[flat] = buf[c];
            }
            let decay = (-2.0 * self.decay_rate(fluid) * t).exp();
            prs[flat] = self.pressure_base(&x, fluid.rho) * amplitude * amplitude * decay;
        }
        let to_field = |cols: Vec<Vec<f64>>| {
            VectorField::from_components_unchecked(
                grid.clone(),
                cols.into_iter()
                    .map(|s| ScalarField::from_raw(grid.clone(), s))
                    .collect(),
            )
        };
        Ok(SampledState {
            velocity: to_field(vel),
            pressure: ScalarField::from_raw(grid.clone(), prs),
            force: to_field(frc),
        })
    }

    /// Sample just the velocity.
    pub fn sample_velocity(&self, fluid: &FluidParams, grid: &Grid, t: f64) -> Result<VectorField> {
        Ok(self.sample(fluid, grid, t)?.velocity)
    }

    /// Sample just the applied force.
    pub fn sample_force(&self, grid: &Grid, t: f64) -> Result<VectorField> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: grid.dim(),
            });
        }
        grid.assert_unit_families_cell()?;
        let dim = self.dim();
        let mut cols: Vec<Vec<f64>> = (0..dim).map(|_| vec![0.0; grid.len()]).collect();
        let mut buf = [0.0f64; 3];
        for (flat, x) in grid.points() {
            self.force_into(&x, t, &mut buf[..dim])?;
            for (c, column) in cols.iter_mut().enumerate() {
                column[flat] = buf[c];
            }
        }
        Ok(VectorField::from_components_unchecked(
            grid.clone(),
            cols.into_iter()
                .map(|s| ScalarField::from_raw(grid.clone(), s))
                .collect(),
        ))
    }
}
