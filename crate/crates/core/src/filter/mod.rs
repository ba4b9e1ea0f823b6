//! Per-sample filter kernels.
//!
//! Every filter here is a first-order exponential low-pass whose cutoff
//! frequency is chosen per sample. They differ in how the cutoff is chosen:
//!
//! * [`HpfState`] / [`HalfPoundFilter`]: cutoff interpolated linearly between
//!   two bounds by the ratio of the instantaneous speed to the maximum
//!   expected speed.
//! * [`StackedState`]: the speed driving each level is itself smoothed by a
//!   filter one derivative order higher.
//! * [`OneEuroState`]: cutoff grows proportionally to the smoothed speed.

mod hpf;
mod one_euro;
mod stacked;

pub use hpf::{cutoff_for_speed, HalfPoundFilter, HpfParams, HpfState};
pub use one_euro::{OneEuroFilter, OneEuroParams, OneEuroState};
pub use stacked::{StackedParams, StackedState};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Blend factor of a discretized RC low-pass: `1 / (1 + 1 / (2π f_c dt))`.
///
/// Returns 0 exactly for `f_c == 0` and tends to 1 as `f_c` grows.
pub fn lowpass_alpha<T: Real>(f_c: T, dt: T) -> Result<T> {
    check_dt(dt)?;
    if !(f_c >= T::zero()) {
        return Err(Error::param("f_c", "cutoff must be >= 0"));
    }
    let r = T::tau() * f_c * dt;
    Ok(r / (r + T::one()))
}

/// Moves `prev` toward `x` by `alpha`, never leaving the closed interval
/// between them.
#[inline]
pub(crate) fn blend_toward<T: Real>(prev: T, x: T, alpha: T) -> T {
    let out = prev + alpha * (x - prev);
    // rounding in `x - prev` can land one ulp past `x`
    out.max(prev.min(x)).min(prev.max(x))
}

#[inline]
pub(crate) fn check_dt<T: Real>(dt: T) -> Result<()> {
    if dt > T::zero() && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTimestep(dt.to_f64().unwrap_or(f64::NAN)))
    }
}

#[inline]
pub(crate) fn check_sample<T: Real>(x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSample(x.to_f64().unwrap_or(f64::NAN)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_five_hz_at_thirty_fps() {
        // hand evaluation: 1 / (1 + 30 / (10 pi))
        let expected = 1.0 / (1.0 + 30.0 / (10.0 * std::f64::consts::PI));
        assert_relative_eq!(expected, 0.511528, epsilon = 1e-6);
        assert_relative_eq!(lowpass_alpha(5.0, 1.0 / 30.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn alpha_limits() {
        assert_eq!(lowpass_alpha(0.0, 1.0 / 30.0).unwrap(), 0.0);
        let a = lowpass_alpha(1e9, 1.0 / 30.0).unwrap();
        assert!(a > 0.999_999 && a <= 1.0);
    }

    #[test]
    fn alpha_rejects_bad_dt() {
        assert!(matches!(lowpass_alpha(1.0, 0.0), Err(Error::InvalidTimestep(_))));
        assert!(matches!(lowpass_alpha(1.0, -0.1), Err(Error::InvalidTimestep(_))));
        assert!(lowpass_alpha(-1.0, 0.1).is_err());
    }

    #[test]
    fn alpha_is_monotone() {
        let mut prev = 0.0;
        for k in 1..200 {
            let a = lowpass_alpha(k as f64 * 0.1, 1.0 / 30.0).unwrap();
            assert!(a > prev);
            prev = a;
        }
        let mut prev = 0.0;
        for k in 1..200 {
            let a = lowpass_alpha(2.0, k as f64 * 1e-3).unwrap();
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn alpha_in_f32() {
        let a: f32 = lowpass_alpha(5.0f32, 1.0 / 30.0).unwrap();
        assert!((a - 0.511528).abs() < 1e-5);
    }
}
