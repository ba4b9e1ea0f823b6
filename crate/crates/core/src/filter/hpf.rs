use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::{clamp01, lerp, Real};

use super::{blend_toward, check_dt, check_sample, lowpass_alpha};

/// Offline-tuned parameters of the Half Pound Filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpfParams<T: Real = f64> {
    f_c_min: T,
    f_c_max: T,
    max_abs_dx: T,
}

impl<T: Real> HpfParams<T> {
    /// Requires `0 < f_c_min <= f_c_max` and `max_abs_dx > 0`, all finite.
    pub fn new(f_c_min: T, f_c_max: T, max_abs_dx: T) -> Result<Self> {
        if !(f_c_min > T::zero() && f_c_min.is_finite()) {
            return Err(Error::param(
                "f_c_min",
                format!("must be finite and > 0, got {f_c_min}"),
            ));
        }
        if !(f_c_max >= f_c_min && f_c_max.is_finite()) {
            return Err(Error::param(
                "f_c_max",
                format!("must be finite and >= f_c_min ({f_c_min}), got {f_c_max}"),
            ));
        }
        if !(max_abs_dx > T::zero() && max_abs_dx.is_finite()) {
            return Err(Error::param(
                "max_abs_dx",
                format!("must be finite and > 0, got {max_abs_dx}"),
            ));
        }
        Ok(Self {
            f_c_min,
            f_c_max,
            max_abs_dx,
        })
    }

    /// Both bounds at `f_c`: a plain RC low-pass.
    pub fn pinned(f_c: T, max_abs_dx: T) -> Result<Self> {
        Self::new(f_c, f_c, max_abs_dx)
    }

    pub fn f_c_min(&self) -> T {
        self.f_c_min
    }

    pub fn f_c_max(&self) -> T {
        self.f_c_max
    }

    pub fn max_abs_dx(&self) -> T {
        self.max_abs_dx
    }
}

/// Cutoff frequency for a given speed: `lerp(f_c_min, f_c_max, clamp01(|speed| / max_abs_dx))`.
///
/// Always inside `[f_c_min, f_c_max]`.
pub fn cutoff_for_speed<T: Real>(params: &HpfParams<T>, speed: T) -> T {
    let alpha_f = clamp01(speed.abs() / params.max_abs_dx);
    lerp(params.f_c_min, params.f_c_max, alpha_f)
        .max(params.f_c_min)
        .min(params.f_c_max)
}

/// The single retained estimate of a Half Pound Filter.
///
/// Parameters are passed to every step rather than stored, so a schedule can
/// change them between samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HpfState<T: Real = f64> {
    prev: Option<T>,
}

impl<T: Real> HpfState<T> {
    pub fn new() -> Self {
        Self { prev: None }
    }

    pub fn seeded(x: T) -> Self {
        Self { prev: Some(x) }
    }

    pub fn estimate(&self) -> Option<T> {
        self.prev
    }

    pub fn is_initialized(&self) -> bool {
        self.prev.is_some()
    }

    pub fn seed(&mut self, x: T) {
        self.prev = Some(x);
    }

    pub fn reset(&mut self) {
        self.prev = None;
    }

    /// Filters one sample.
    ///
    /// An uninitialized state is seeded with `x` and `x` is returned.
    pub fn step(&mut self, params: &HpfParams<T>, x: T, dt: T) -> Result<T> {
        check_dt(dt)?;
        check_sample(x)?;
        let Some(prev) = self.prev else {
            self.prev = Some(x);
            return Ok(x);
        };
        let speed = (x - prev) / dt;
        self.step_with_speed(params, x, dt, speed)
    }

    /// Like [`HpfState::step`] but with an externally supplied speed measure
    /// driving the cutoff. The state must already be initialized.
    pub(crate) fn step_with_speed(&mut self, params: &HpfParams<T>, x: T, dt: T, speed: T) -> Result<T> {
        let prev = self.prev.expect("initialized state");
        let f_c = cutoff_for_speed(params, speed);
        let alpha = lowpass_alpha(f_c, dt)?;
        let out = blend_toward(prev, x, alpha);
        self.prev = Some(out);
        Ok(out)
    }
}

/// Parameters and state bundled together.
#[derive(Debug, Clone, Copy)]
pub struct HalfPoundFilter<T: Real = f64> {
    pub params: HpfParams<T>,
    pub state: HpfState<T>,
}

impl<T: Real> HalfPoundFilter<T> {
    pub fn new(params: HpfParams<T>) -> Self {
        Self {
            params,
            state: HpfState::new(),
        }
    }

    pub fn filter(&mut self, x: T, dt: T) -> Result<T> {
        self.state.step(&self.params, x, dt)
    }

    /// Filters a whole channel from a fresh state.
    pub fn filter_channel(params: HpfParams<T>, input: &Channel<T>) -> Result<Channel<T>> {
        let mut f = Self::new(params);
        let out = input
            .steps()
            .map(|(dt, x)| f.filter(x, dt))
            .collect::<Result<Vec<_>>>()?;
        input.with_values(out)
    }
}
