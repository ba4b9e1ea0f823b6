use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{blend_toward, check_dt, check_sample, lowpass_alpha};

/// 1 Euro Filter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneEuroParams<T: Real = f64> {
    min_cutoff: T,
    beta: T,
    d_cutoff: T,
}

impl<T: Real> OneEuroParams<T> {
    pub fn new(min_cutoff: T, beta: T, d_cutoff: T) -> Result<Self> {
        if !(min_cutoff > T::zero() && min_cutoff.is_finite()) {
            return Err(Error::param("min_cutoff", "must be finite and > 0"));
        }
        if !(beta >= T::zero() && beta.is_finite()) {
            return Err(Error::param("beta", "must be finite and >= 0"));
        }
        if !(d_cutoff > T::zero() && d_cutoff.is_finite()) {
            return Err(Error::param("d_cutoff", "must be finite and > 0"));
        }
        Ok(Self {
            min_cutoff,
            beta,
            d_cutoff,
        })
    }

    pub fn min_cutoff(&self) -> T {
        self.min_cutoff
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn d_cutoff(&self) -> T {
        self.d_cutoff
    }
}

/// Signal and derivative low-pass states of a 1 Euro Filter.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OneEuroState<T: Real = f64> {
    x_hat: Option<T>,
    dx_hat: Option<T>,
}

impl<T: Real> OneEuroState<T> {
    pub fn new() -> Self {
        Self {
            x_hat: None,
            dx_hat: None,
        }
    }

    pub fn estimate(&self) -> Option<T> {
        self.x_hat
    }

    pub fn reset(&mut self) {
        *self = Self::new();
    }

    /// Starts from a known estimate and derivative estimate.
    pub fn seed(&mut self, x: T, dx: T) {
        self.x_hat = Some(x);
        self.dx_hat = Some(dx);
    }

    pub fn step(&mut self, params: &OneEuroParams<T>, x: T, dt: T) -> Result<T> {
        check_dt(dt)?;
        check_sample(x)?;
        // the derivative is taken against the previous *filtered* value and
        // is zero on the very first sample
        let dx = match self.x_hat {
            Some(prev) => (x - prev) / dt,
            None => T::zero(),
        };
        let edx = match self.dx_hat {
            Some(prev) => blend_toward(prev, dx, lowpass_alpha(params.d_cutoff, dt)?),
            None => dx,
        };
        let cutoff = params.min_cutoff + params.beta * edx.abs();
        let out = match self.x_hat {
            Some(prev) => blend_toward(prev, x, lowpass_alpha(cutoff, dt)?),
            None => x,
        };
        self.dx_hat = Some(edx);
        self.x_hat = Some(out);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OneEuroFilter<T: Real = f64> {
    pub params: OneEuroParams<T>,
    pub state: OneEuroState<T>,
}

impl<T: Real> OneEuroFilter<T> {
    pub fn new(params: OneEuroParams<T>) -> Self {
        Self {
            params,
            state: OneEuroState::new(),
        }
    }

    pub fn filter(&mut self, x: T, dt: T) -> Result<T> {
        self.state.step(&self.params, x, dt)
    }

    pub fn filter_channel(params: OneEuroParams<T>, input: &Channel<T>) -> Result<Channel<T>> {
        let mut f = Self::new(params);
        let out = input
            .steps()
            .map(|(dt, x)| f.filter(x, dt))
            .collect::<Result<Vec<_>>>()?;
        input.with_values(out)
    }
}
