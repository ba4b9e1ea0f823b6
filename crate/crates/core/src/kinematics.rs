//! Backward finite differences up to jerk.
//!
//! Clip scans and the trigger policy share these expressions so a clip
//! replayed through the policy reproduces the scanned values bit for bit.

use crate::channel::Channel;
use crate::scalar::Real;

/// Velocity, acceleration and jerk at sample `i` from the three previous
/// values and the three most recent steps (`dt0 = t_i - t_{i-1}`,
/// `dt1 = t_{i-1} - t_{i-2}`, `dt2 = t_{i-2} - t_{i-3}`).
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn stencil<T: Real>(x: T, h1: T, h2: T, h3: T, dt0: T, dt1: T, dt2: T) -> (T, T, T) {
    let v0 = (x - h1) / dt0;
    let v1 = (h1 - h2) / dt1;
    let v2 = (h2 - h3) / dt2;
    let a0 = (v0 - v1) / dt0;
    let a1 = (v1 - v2) / dt1;
    let j = (a0 - a1) / dt0;
    (v0, a0, j)
}

/// Derivative series of a channel. `velocity[k]` belongs to sample `k + 1`,
/// `acceleration[k]` to `k + 2` and `jerk[k]` to `k + 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives<T: Real = f64> {
    pub velocity: Vec<T>,
    pub acceleration: Vec<T>,
    pub jerk: Vec<T>,
}

impl<T: Real> Derivatives<T> {
    pub fn of(channel: &Channel<T>) -> Self {
        let x = channel.values();
        let n = x.len();
        let velocity: Vec<T> = (1..n).map(|i| (x[i] - x[i - 1]) / channel.dt(i)).collect();
        let acceleration: Vec<T> = (2..n)
            .map(|i| (velocity[i - 1] - velocity[i - 2]) / channel.dt(i))
            .collect();
        let jerk: Vec<T> = (3..n)
            .map(|i| (acceleration[i - 2] - acceleration[i - 3]) / channel.dt(i))
            .collect();
        Self {
            velocity,
            acceleration,
            jerk,
        }
    }
}
