//! Scalar time series with explicit timestamps.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One animation curve: strictly increasing timestamps and finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T: Real = f64> {
    name: String,
    times: Vec<T>,
    values: Vec<T>,
    rate_hint: T,
}

impl<T: Real> Channel<T> {
    /// Builds a channel from explicit timestamps.
    pub fn new(name: impl Into<String>, times: Vec<T>, values: Vec<T>, rate_hint: T) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: times.len(),
                right: values.len(),
            });
        }
        if !(rate_hint > T::zero() && rate_hint.is_finite()) {
            return Err(Error::param("rate_hint", "must be finite and > 0"));
        }
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            if !(dt > T::zero() && dt.is_finite()) {
                return Err(Error::InvalidTimestep(dt.to_f64().unwrap_or(f64::NAN)));
            }
        }
        if let Some(bad) = values.iter().chain(times.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(bad.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            name: name.into(),
            times,
            values,
            rate_hint,
        })
    }

    /// Uniformly sampled channel starting at t = 0.
    pub fn uniform(name: impl Into<String>, rate: T, values: Vec<T>) -> Result<Self> {
        Self::uniform_from(name, rate, T::zero(), values)
    }

    /// Uniformly sampled channel with timestamps `start + k / rate`.
    pub fn uniform_from(name: impl Into<String>, rate: T, start: T, values: Vec<T>) -> Result<Self> {
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(Error::param("rate", "must be finite and > 0"));
        }
        let times = (0..values.len())
            .map(|k| start + T::from_usize_lossy(k) / rate)
            .collect();
        Self::new(name, times, values, rate)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn rate_hint(&self) -> T {
        self.rate_hint
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Step preceding sample `i` (`t_i - t_{i-1}`); for `i == 0` the nominal
    /// step `1 / rate_hint`.
    pub fn dt(&self, i: usize) -> T {
        if i == 0 {
            T::one() / self.rate_hint
        } else {
            self.times[i] - self.times[i - 1]
        }
    }

    /// Iterates `(dt, x)` pairs in order, using [`Channel::dt`] for each step.
    pub fn steps(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &x)| (self.dt(i), x))
    }

    /// Same timestamps, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.name.clone(), self.times.clone(), values, self.rate_hint)
    }

    /// True when every step matches `1 / rate_hint` to a relative tolerance of 1e-6.
    pub fn is_uniform(&self) -> bool {
        let nominal = T::one() / self.rate_hint;
        let tol = nominal * T::lit(1e-6);
        self.times.windows(2).all(|w| ((w[1] - w[0]) - nominal).abs() <= tol)
    }

    /// Linear resampling onto a uniform grid at `rate_hint`, starting at the
    /// first timestamp and ending at or before the last one.
    pub fn resample_uniform(&self) -> Result<Self> {
        if self.is_uniform() {
            return Ok(self.clone());
        }
        if self.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: self.len(),
            });
        }
        let t0 = self.times[0];
        let span = self.times[self.len() - 1] - t0;
        let n = (span * self.rate_hint).floor().to_usize().unwrap_or(0) + 1;
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for k in 0..n {
            let t = t0 + T::from_usize_lossy(k) / self.rate_hint;
            while seg + 2 < self.len() && self.times[seg + 1] < t {
                seg += 1;
            }
            let (ta, tb) = (self.times[seg], self.times[seg + 1]);
            let w = ((t - ta) / (tb - ta)).max(T::zero()).min(T::one());
            out.push(crate::scalar::lerp(self.values[seg], self.values[seg + 1], w));
        }
        Self::uniform_from(self.name.clone(), self.rate_hint, t0, out)
    }
}

/// Removes ±360° wraps so consecutive samples differ by less than 180°.
///
/// Every output value is congruent to its input modulo 360°.
pub fn unwrap_degrees<T: Real>(values: &[T]) -> Vec<T> {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut out = Vec::with_capacity(values.len());
    let mut shift = T::zero();
    let mut prev: Option<T> = None;
    for &v in values {
        if let Some(p) = prev {
            let d = v - p;
            if d.abs() >= half {
                shift = shift - full * ((d + half) / full).floor();
            }
        }
        prev = Some(v);
        out.push(v + shift);
    }
    out
}
