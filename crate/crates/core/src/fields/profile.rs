//! Scalar forcing amplitudes G(t) and the induced amplitude law
//! Omega(t) = 1 + int_0^t G(tau) e^{r tau} d tau.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Scalar function of time used for forcing amplitudes and drift profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    Zero,
    Constant(f64),
    /// `amplitude * exp(-rate * t)` with `rate >= 0`.
    Exponential {
        amplitude: f64,
        rate: f64,
    },
    /// Piecewise-linear between strictly increasing knots starting at t = 0.
    Tabulated(Vec<(f64, f64)>),
}

impl TimeProfile {
    /// Validate the variant's invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            TimeProfile::Zero | TimeProfile::Constant(_) => Ok(()),
            TimeProfile::Exponential { rate, .. } => {
                if *rate < 0.0 || !rate.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "exponential profile needs rate >= 0, got {rate}"
                    )))
                } else {
                    Ok(())
                }
            }
            TimeProfile::Tabulated(knots) => {
                if knots.is_empty() {
                    return Err(Error::InvalidParameter(
                        "tabulated profile needs at least one knot".into(),
                    ));
                }
                if knots[0].0 != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "tabulated profile must start at t = 0, got {}",
                        knots[0].0
                    )));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidParameter(
                            "tabulated knots must be strictly increasing".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Value at time `t`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        match self {
            TimeProfile::Zero => Ok(0.0),
            TimeProfile::Constant(c) => Ok(*c),
            TimeProfile::Exponential { amplitude, rate } => Ok(amplitude * (-rate * t).exp()),
            TimeProfile::Tabulated(knots) => {
                let last = knots.last().expect("validated non-empty").0;
                if t > last {
                    return Err(Error::HorizonNotCovered { t, end: last });
                }
                let i = match knots.binary_search_by(|k| k.0.partial_cmp(&t).unwrap()) {
                    Ok(i) => return Ok(knots[i].1),
                    Err(i) => i,
                };
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TimeProfile::Zero)
            | matches!(self, TimeProfile::Constant(c) if *c == 0.0)
            | matches!(self, TimeProfile::Exponential { amplitude, .. } if *amplitude == 0.0)
    }

    /// Plain integral int_0^t of the profile (the drift accumulation).
    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(omega(self, 0.0, t)? - 1.0)
    }
}

/// Amplitude law `Omega(t) = 1 + int_0^t G(tau) e^{decay_rate tau} d tau`.
///
/// Closed forms cover the zero, constant and exponential profiles; the
/// tabulated profile is integrated by adaptive Simpson to 1e-12 absolute,
/// one knot interval at a time.
pub fn omega(profile: &TimeProfile, decay_rate: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    profile.validate()?;
    let r = decay_rate;
    match profile {
        TimeProfile::Zero => Ok(1.0),
        TimeProfile::Constant(c) => {
            if r == 0.0 {
                Ok(1.0 + c * t)
            } else {
                Ok(1.0 + c * ((r * t).exp() - 1.0) / r)
            }
        }
        TimeProfile::Exponential { amplitude, rate } => {
            let s = r - rate;
            if s == 0.0 {
                Ok(1.0 + amplitude * t)
            } else {
                Ok(1.0 + amplitude * ((s * t).exp() - 1.0) / s)
            }
        }
        TimeProfile::Tabulated(knots) => {
            let last = knots.last().expect("validated non-empty").0;
            if t > last {
                return Err(Error::HorizonNotCovered { t, end: last });
            }
            let mut acc = 0.0;
            for w in knots.windows(2) {
                let (t0, _) = w[0];
                if t0 >= t {
                    break;
                }
                let t1 = w[1].0.min(t);
                let f = |tau: f64| {
                    // value() cannot fail inside the covered range
                    let g = profile.value(tau).expect("within tabulated range");
                    g * (r * tau).exp()
                };
                acc += adaptive_simpson(&f, t0, t1, 1e-12);
            }
            Ok(1.0 + acc)
        }
    }
}
