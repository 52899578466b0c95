//! The solution operator for the projected momentum equation: heat-kernel
//! propagation of the initial data plus a Duhamel integral of the projected
//! forcing and an optional spatially uniform drift.

mod oracle;

pub use oracle::{free_space_oracle_heat, free_space_oracle_pressure_gradient, OracleConfig};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{FluidParams, SolutionFamily, TimeProfile, VectorField};
use crate::operators::{divergence, leray_project, OperatorBackend, SpectralWorkspace};

/// Per-mode heat multiplier e^{-kappa |k|^2 t} applied in place.
fn apply_heat_multiplier(ws: &SpectralWorkspace, specs: &mut [Vec<Complex64>], kappa: f64, t: f64) {
    let dim = ws.grid().dim();
    ws.for_each_mode(|flat, modes| {
        let k2: f64 = (0..dim).map(|a| ws.k_sq(a)[modes[a]]).sum();
        let damp = (-kappa * k2 * t).exp();
        for spec in specs.iter_mut() {
            spec[flat] *= damp;
        }
    });
}

/// Leray projection applied to the spectra in place (derivative-convention
/// wavenumbers; unresolvable modes pass through).
fn apply_leray_multiplier(ws: &SpectralWorkspace, specs: &mut [Vec<Complex64>]) {
    let dim = ws.grid().dim();
    ws.for_each_mode(|flat, modes| {
        let mut k = [0.0f64; 3];
        let mut k2 = 0.0;
        for axis in 0..dim {
            let kk = ws.k_deriv(axis)[modes[axis]];
            k[axis] = kk;
            k2 += kk * kk;
        }
        if k2 == 0.0 {
            return;
        }
        let mut dot = Complex64::default();
        for (axis, spec) in specs.iter().enumerate() {
            dot += spec[flat] * k[axis];
        }
        let scale = dot / k2;
        for (axis, spec) in specs.iter_mut().enumerate() {
            spec[flat] -= scale * k[axis];
        }
    });
}

/// Diffusion semigroup: per-mode multiplication by e^{-kappa |k|^2 t}.
/// `t = 0` returns the input unchanged.
pub fn heat_propagate(v0: &VectorField, fluid: &FluidParams, t: f64) -> Result<VectorField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(v0.clone());
    }
    let ws = SpectralWorkspace::new(v0.grid())?;
    let mut specs = ws.forward_vector(v0);
    apply_heat_multiplier(&ws, &mut specs, fluid.kappa, t);
    let comps = specs
        .into_iter()
        .map(|s| ws.field_from_spectrum(s))
        .collect();
    Ok(VectorField::from_components_unchecked(
        v0.grid().clone(),
        comps,
    ))
}

/// Projected forcing F = leray_project(f); divergence-free forces pass
/// through unchanged and pure gradients map to zero.
pub fn project_force(f: &VectorField) -> Result<VectorField> {
    leray_project(f)
}

/// Forcing description for [`EvolutionSpec`]: absent, bound to a solution
/// family's closed form, or a tabulated time series of sampled fields
/// (linearly interpolated in time).
#[derive(Debug, Clone)]
pub enum ForceModel {
    Zero,
    Family(SolutionFamily),
    Sampled(ForceSeries),
}

/// Strictly increasing snapshots of the applied force.
#[derive(Debug, Clone)]
pub struct ForceSeries {
    times: Vec<f64>,
    snapshots: Vec<VectorField>,
}

impl ForceSeries {
    pub fn new(times: Vec<f64>, snapshots: Vec<VectorField>) -> Result<Self> {
        if times.is_empty() || times.len() != snapshots.len() {
            return Err(Error::InvalidParameter(
                "force series needs matching, non-empty times and snapshots".into(),
            ));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(
                    "force series timestamps must be strictly increasing".into(),
                ));
            }
        }
        let grid = snapshots[0].grid().clone();
        for s in &snapshots {
            if s.grid() != &grid {
                return Err(Error::GridMismatch("force series snapshots"));
            }
        }
        Ok(Self { times, snapshots })
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    fn eval(&self, t: f64) -> Result<VectorField> {
        let first = self.times[0];
        let last = self.end();
        if t < first || t > last {
            return Err(Error::HorizonNotCovered { t, end: last });
        }
        match self.times.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => Ok(self.snapshots[i].clone()),
            Err(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let w = (t - t0) / (t1 - t0);
                let a = self.snapshots[i - 1].scale(1.0 - w);
                let b = self.snapshots[i].scale(w);
                a.add(&b)
            }
        }
    }
}

/// Time quadrature for the Duhamel integral: composite Simpson with a fixed
/// panel density, so runs are reproducible bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeQuadrature {
    /// Simpson panels per unit of simulated time.
    pub panels_per_unit: u32,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self {
            panels_per_unit: 64,
        }
    }
}

/// Everything needed to evolve one initial state: fluid constants, the
/// (divergence-free) initial velocity, the forcing model, an optional
/// per-component uniform drift profile, and the time quadrature.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    pub fluid: FluidParams,
    initial: VectorField,
    force: ForceModel,
    drift: Option<Vec<TimeProfile>>,
    pub time_quadrature: TimeQuadrature,
}

impl EvolutionSpec {
    /// Checked constructor. The initial field must be divergence-free to
    /// 1e-8 in the sup norm; a tabulated force must live on the same grid.
    pub fn new(
        fluid: FluidParams,
        initial: VectorField,
        force: ForceModel,
        drift: Option<Vec<TimeProfile>>,
        time_quadrature: TimeQuadrature,
    ) -> Result<Self> {
        let div_sup = divergence(&initial, OperatorBackend::Spectral)?.sup_norm();
        if div_sup > 1e-8 {
            return Err(Error::NotSolenoidal(div_sup));
        }
        match &force {
            ForceModel::Zero => {}
            ForceModel::Family(fam) => {
                if fam.dim() != initial.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: initial.dim(),
                        actual: fam.dim(),
                    });
                }
            }
            ForceModel::Sampled(series) => {
                if series.snapshots[0].grid() != initial.grid() {
                    return Err(Error::GridMismatch("force series vs initial field"));
                }
            }
        }
        if let Some(profiles) = &drift {
            if profiles.len() != initial.dim() {
                return Err(Error::DimensionMismatch {
                    expected: initial.dim(),
                    actual: profiles.len(),
                });
            }
            for p in profiles {
                p.validate()?;
            }
        }
        if time_quadrature.panels_per_unit == 0 {
            return Err(Error::InvalidParameter(
                "time quadrature needs at least one panel per unit time".into(),
            ));
        }
        Ok(Self {
            fluid,
            initial,
            force,
            drift,
            time_quadrature,
        })
    }

    pub fn initial(&self) -> &VectorField {
        &self.initial
    }

    pub fn force(&self) -> &ForceModel {
        &self.force
    }

    fn force_at(&self, t: f64) -> Result<Option<VectorField>> {
        match &self.force {
            ForceModel::Zero => Ok(None),
            ForceModel::Family(fam) => Ok(Some(fam.sample_force(self.initial.grid(), t)?)),
            ForceModel::Sampled(series) => Ok(Some(series.eval(t)?)),
        }
    }
}

/// Evolve to time `t` with the spec's own panel density.
pub fn duhamel_evolve(spec: &EvolutionSpec, t: f64) -> Result<VectorField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let panels = ((spec.time_quadrature.panels_per_unit as f64 * t).ceil() as usize).max(1);
    duhamel_evolve_with_panels(spec, t, panels)
}

/// Evolve to time `t` integrating the forcing with exactly `panels`
/// composite-Simpson panels over [0, t]:
///
/// v(t) = heat(v0, t) + int_0^t heat(project(f(., tau)), t - tau) d tau
///        + int_0^t drift(tau) d tau.
pub fn duhamel_evolve_with_panels(
    spec: &EvolutionSpec,
    t: f64,
    panels: usize,
) -> Result<VectorField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if panels == 0 {
        return Err(Error::InvalidParameter(
            "panel count must be positive".into(),
        ));
    }
    // Fail early when a tabulated force cannot cover the horizon.
    if let ForceModel::Sampled(series) = &spec.force {
        if t > series.end() {
            return Err(Error::HorizonNotCovered {
                t,
                end: series.end(),
            });
        }
    }

    let mut result = heat_propagate(&spec.initial, &spec.fluid, t)?;

    let has_force = !matches!(spec.force, ForceModel::Zero);
    if has_force && t > 0.0 {
        let ws = SpectralWorkspace::new(spec.initial.grid())?;
        let dim = spec.initial.dim();
        let n = spec.initial.grid().len();
        let mut acc: Vec<Vec<Complex64>> =
            (0..dim).map(|_| vec![Complex64::default(); n]).collect();
        // Composite Simpson nodes tau_i = i h, i = 0..2P, weights
        // (h/3)[1,4,2,...,2,4,1] with h = t / (2P). The forcing is projected
        // and heat-propagated in spectral space before accumulation.
        let m = 2 * panels;
        let h = t / m as f64;
        for i in 0..=m {
            let tau = if i == m { t } else { i as f64 * h };
            let base = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let w = base * h / 3.0;
            let f = spec.force_at(tau)?.expect("force present");
            let mut specs = ws.forward_vector(&f);
            apply_leray_multiplier(&ws, &mut specs);
            apply_heat_multiplier(&ws, &mut specs, spec.fluid.kappa, t - tau);
            for (a, s) in acc.iter_mut().zip(&specs) {
                for (av, sv) in a.iter_mut().zip(s) {
                    *av += *sv * w;
                }
            }
        }
        let integral = VectorField::from_components_unchecked(
            spec.initial.grid().clone(),
            acc.into_iter().map(|s| ws.field_from_spectrum(s)).collect(),
        );
        result = result.add(&integral)?;
    }

    if let Some(profiles) = &spec.drift {
        for (axis, profile) in profiles.iter().enumerate() {
            // Closed forms where the profile admits one; tabulated profiles
            // integrate with the same composite Simpson rule as the force.
            let shift = match profile {
                TimeProfile::Tabulated(knots) => {
                    let end = knots.last().map(|k| k.0).unwrap_or(0.0);
                    if t > end {
                        return Err(Error::HorizonNotCovered { t, end });
                    }
                    crate::quadrature::composite_simpson(
                        |tau| profile.value(tau).expect("within tabulated range"),
                        0.0,
                        t,
                        panels,
                    )
                }
                _ => profile.integral(t)?,
            };
            if shift != 0.0 {
                for v in result.component_mut(axis).samples_mut() {
                    *v += shift;
                }
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FamilyTag, Grid, ScalarField};
    use crate::operators::gradient;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn fluid() -> FluidParams {
        FluidParams::new(0.02, 1.0).unwrap()
    }

    fn taylor_v0(n: usize) -> VectorField {
        SolutionFamily::TaylorVortex2D
            .sample_velocity(&fluid(), &Grid::square(n).unwrap(), 0.0)
            .unwrap()
    }

    #[test]
    fn heat_propagate_identity_at_zero_time() {
        let v = taylor_v0(16);
        let out = heat_propagate(&v, &fluid(), 0.0).unwrap();
        assert_eq!(out, v);
        assert!(heat_propagate(&v, &fluid(), -0.1).is_err());
    }

    #[test]
    fn heat_propagate_matches_eigen_decay() {
        let fl = fluid();
        let v = taylor_v0(16);
        let t = 0.7;
        let out = heat_propagate(&v, &fl, t).unwrap();
        let want = v.scale((-2.0 * PI * PI * fl.kappa * t).exp());
        assert!(out.sup_distance(&want).unwrap() < 1e-12);

        let abc = SolutionFamily::AbcFlow3D {
            a: 1.0,
            b: 0.5,
            c: 0.25,
        };
        let v3 = abc
            .sample_velocity(&fl, &Grid::cube(8).unwrap(), 0.0)
            .unwrap();
        let out3 = heat_propagate(&v3, &fl, t).unwrap();
        let want3 = v3.scale((-PI * PI * fl.kappa * t).exp());
        assert!(out3.sup_distance(&want3).unwrap() < 1e-12);
    }

    #[test]
    fn heat_semigroup_property() {
        let fl = fluid();
        let grid = Grid::square(16).unwrap();
        let v = VectorField::from_fn(grid, |x, out| {
            out[0] = (PI * x[0]).sin() * (PI * x[1]).cos() + 0.2 * (2.0 * PI * x[1]).cos();
            out[1] = -(PI * x[0]).cos() * (PI * x[1]).sin() + 0.1 * (3.0 * PI * x[0]).sin();
        });
        let one = heat_propagate(&heat_propagate(&v, &fl, 0.3).unwrap(), &fl, 0.45).unwrap();
        let two = heat_propagate(&v, &fl, 0.75).unwrap();
        assert!(one.sup_distance(&two).unwrap() < 1e-13);
    }

    #[test]
    fn heat_commutes_with_projection() {
        let fl = fluid();
        let grid = Grid::square(16).unwrap();
        let w = VectorField::from_fn(grid, |x, out| {
            out[0] = (PI * x[0]).sin() * (2.0 * PI * x[1]).cos();
            out[1] = (3.0 * PI * x[0]).cos() + 0.4 * (PI * x[1]).sin();
        });
        let a = leray_project(&heat_propagate(&w, &fl, 0.4).unwrap()).unwrap();
        let b = heat_propagate(&leray_project(&w).unwrap(), &fl, 0.4).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn project_force_behaviour() {
        let grid = Grid::square(16).unwrap();
        // Divergence-free force passes through.
        let f = taylor_v0(16).scale(0.37);
        assert!(project_force(&f).unwrap().sup_distance(&f).unwrap() < 1e-12);
        // Pure gradient maps to zero.
        let s = ScalarField::from_fn(grid.clone(), |x| (PI * x[0]).sin() * (PI * x[1]).sin());
        let g = gradient(&s, OperatorBackend::Spectral).unwrap();
        assert!(project_force(&g).unwrap().sup_norm() < 1e-11);
        // Spatially constant force passes through (k = 0 passthrough).
        let c = VectorField::from_fn(grid, |_, out| out.copy_from_slice(&[0.3, -0.7]));
        assert!(project_force(&c).unwrap().sup_distance(&c).unwrap() < 1e-13);
    }

    #[test]
    fn spec_rejects_non_solenoidal_initial_data() {
        let grid = Grid::square(16).unwrap();
        let bad = VectorField::from_fn(grid, |x, out| {
            out[0] = (PI * x[0]).sin();
            out[1] = 0.0;
        });
        let err = EvolutionSpec::new(
            fluid(),
            bad,
            ForceModel::Zero,
            None,
            TimeQuadrature::default(),
        );
        assert!(matches!(err, Err(Error::NotSolenoidal(_))));
    }

    #[test]
    fn zero_force_zero_drift_equals_pure_heat() {
        let fl = fluid();
        let v0 = taylor_v0(16);
        let spec = EvolutionSpec::new(
            fl,
            v0.clone(),
            ForceModel::Zero,
            None,
            TimeQuadrature::default(),
        )
        .unwrap();
        let t = 0.8;
        let evolved = duhamel_evolve(&spec, t).unwrap();
        let heat = heat_propagate(&v0, &fl, t).unwrap();
        assert!(evolved.sup_distance(&heat).unwrap() == 0.0);
    }

    #[test]
    fn matched_forcing_reproduces_amplitude_law() {
        // G(tau) = e^{-r tau} against rate r gives Omega = 1 + t.
        let fl = fluid();
        let rate = FamilyTag::ForcedTaylorVortex2D.decay_rate_coefficient() * fl.kappa;
        let fam = SolutionFamily::ForcedTaylorVortex2D {
            forcing: TimeProfile::Exponential {
                amplitude: 1.0,
                rate,
            },
        };
        let grid = Grid::square(32).unwrap();
        let v0 = fam.sample_velocity(&fl, &grid, 0.0).unwrap();
        let spec = EvolutionSpec::new(
            fl,
            v0.clone(),
            ForceModel::Family(fam.clone()),
            None,
            TimeQuadrature {
                panels_per_unit: 128,
            },
        )
        .unwrap();
        let t = 1.0;
        let evolved = duhamel_evolve(&spec, t).unwrap();
        let want = fam.sample_velocity(&fl, &grid, t).unwrap();
        assert!(evolved.sup_distance(&want).unwrap() < 1e-8);
        // Explicit amplitude: Omega(t) e^{-rt} v0 with Omega = 1 + t.
        let amp = (1.0 + t) * (-rate * t).exp();
        assert!(evolved.sup_distance(&v0.scale(amp)).unwrap() < 1e-8);
    }

    #[test]
    fn constant_force_integrates_exactly() {
        // Spatially constant force (f_I, 0, 0) on a zero field accumulates
        // f_I t; Simpson is exact for the constant integrand.
        let fl = fluid();
        let grid = Grid::cube(8).unwrap();
        let fam = SolutionFamily::AbcExpForced3D {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            force_amplitude: 2.0,
            force_rate: 0.0,
        };
        let spec = EvolutionSpec::new(
            fl,
            VectorField::zeros(grid.clone()),
            ForceModel::Family(fam),
            None,
            TimeQuadrature::default(),
        )
        .unwrap();
        let t = 3.0;
        let out = duhamel_evolve(&spec, t).unwrap();
        let want = VectorField::from_fn(grid, |_, o| o.copy_from_slice(&[2.0 * t, 0.0, 0.0]));
        assert!(out.sup_distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn drift_profiles_accumulate() {
        let fl = fluid();
        let v0 = taylor_v0(8);
        let drift = vec![
            TimeProfile::Constant(0.5),
            TimeProfile::Exponential {
                amplitude: 1.0,
                rate: 1.0,
            },
        ];
        let spec = EvolutionSpec::new(
            fl,
            v0.clone(),
            ForceModel::Zero,
            Some(drift),
            TimeQuadrature::default(),
        )
        .unwrap();
        let t = 2.0;
        let out = duhamel_evolve(&spec, t).unwrap();
        let heat = heat_propagate(&v0, &fl, t).unwrap();
        let d = out.sub(&heat).unwrap();
        // int_0^2 0.5 = 1; int_0^2 e^{-tau} = 1 - e^{-2}.
        assert_abs_diff_eq!(d.component(0).mean(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            d.component(1).mean(),
            1.0 - (-2.0f64).exp(),
            epsilon = 1e-12
        );
        let ones = ScalarField::constant(d.grid().clone(), 1.0);
        assert!(d.component(0).sup_distance(&ones).unwrap() < 1e-12);
    }

    #[test]
    fn sampled_force_series_interpolates_and_enforces_horizon() {
        let fl = fluid();
        let grid = Grid::square(8).unwrap();
        let v0 = taylor_v0(8);
        let f0 = v0.scale(1.0);
        let f1 = v0.scale(3.0);
        let series = ForceSeries::new(vec![0.0, 1.0], vec![f0, f1]).unwrap();
        assert!(
            series
                .eval(0.5)
                .unwrap()
                .sup_distance(&v0.scale(2.0))
                .unwrap()
                < 1e-13
        );

        let spec = EvolutionSpec::new(
            fl,
            VectorField::zeros(grid),
            ForceModel::Sampled(series),
            None,
            TimeQuadrature::default(),
        )
        .unwrap();
        assert!(matches!(
            duhamel_evolve(&spec, 2.0),
            Err(Error::HorizonNotCovered { .. })
        ));
        assert!(duhamel_evolve(&spec, 1.0).is_ok());
    }

    #[test]
    fn force_series_validation() {
        let v = taylor_v0(8);
        assert!(ForceSeries::new(vec![0.0, 0.0], vec![v.clone(), v.clone()]).is_err());
        assert!(ForceSeries::new(vec![0.0], vec![]).is_err());
        let other = taylor_v0(16);
        assert!(ForceSeries::new(vec![0.0, 1.0], vec![v, other]).is_err());
    }

    #[test]
    fn duhamel_preserves_divergence_freedom() {
        // Solenoidal initial data plus projected forcing stays solenoidal.
        let fl = fluid();
        let grid = Grid::square(16).unwrap();
        let v0 = taylor_v0(16);
        // A deliberately non-solenoidal force: the projector inside the
        // Duhamel integral must strip its gradient part.
        let messy = VectorField::from_fn(grid, |x, out| {
            out[0] = (PI * x[0]).sin() * (PI * x[1]).cos() + 0.4 * (2.0 * PI * x[0]).cos();
            out[1] = 0.3 * (PI * x[1]).sin();
        });
        let series = ForceSeries::new(vec![0.0, 2.0], vec![messy.clone(), messy]).unwrap();
        let spec = EvolutionSpec::new(
            fl,
            v0,
            ForceModel::Sampled(series),
            None,
            TimeQuadrature::default(),
        )
        .unwrap();
        let evolved = duhamel_evolve(&spec, 1.2).unwrap();
        let div = crate::operators::divergence(&evolved, OperatorBackend::Spectral).unwrap();
        assert!(div.sup_norm() < 1e-9, "{}", div.sup_norm());
    }

    #[test]
    fn panel_doubling_reduces_quadrature_error() {
        // Constant G makes the Duhamel integrand a genuine exponential, so
        // the Simpson error is measurable and drops ~16x per doubling.
        let fl = fluid();
        let fam = SolutionFamily::ForcedTaylorVortex2D {
            forcing: TimeProfile::Constant(1.0),
        };
        let grid = Grid::square(16).unwrap();
        let v0 = fam.sample_velocity(&fl, &grid, 0.0).unwrap();
        let spec = EvolutionSpec::new(
            fl,
            v0,
            ForceModel::Family(fam.clone()),
            None,
            TimeQuadrature::default(),
        )
        .unwrap();
        let t = 1.0;
        let want = fam.sample_velocity(&fl, &grid, t).unwrap();
        let err16 = duhamel_evolve_with_panels(&spec, t, 16)
            .unwrap()
            .sup_distance(&want)
            .unwrap();
        let err32 = duhamel_evolve_with_panels(&spec, t, 32)
            .unwrap()
            .sup_distance(&want)
            .unwrap();
        assert!(err16 > 1e-12, "error must be measurable, got {err16}");
        let ratio = err16 / err32;
        assert!(ratio >= 8.0, "panel doubling ratio {ratio}");
    }
}
