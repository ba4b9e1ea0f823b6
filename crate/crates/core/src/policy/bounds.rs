use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::kinematics::Derivatives;
use crate::scalar::Real;

use super::Violation;

pub const DEFAULT_SAFETY_MARGIN: f64 = 1.05;

/// Closed `(min, max)` envelopes for value, velocity, acceleration and jerk,
/// plus the acceleration envelope used by the recovery check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBounds<T: Real = f64> {
    orders: [(T, T); 4],
    recovery: (T, T),
}

impl<T: Real> DerivativeBounds<T> {
    pub fn new(orders: [(T, T); 4], recovery: (T, T)) -> Result<Self> {
        for (lo, hi) in orders.iter().chain(std::iter::once(&recovery)) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param(
                    "bounds",
                    format!("need finite min <= max, got ({lo}, {hi})"),
                ));
            }
        }
        Ok(Self { orders, recovery })
    }

    /// `(min, max)` for derivative order `k` (0 = value, 3 = jerk).
    pub fn order(&self, k: usize) -> (T, T) {
        self.orders[k]
    }

    pub fn orders(&self) -> [(T, T); 4] {
        self.orders
    }

    pub fn recovery(&self) -> (T, T) {
        self.recovery
    }

    pub fn with_recovery(mut self, lo: T, hi: T) -> Result<Self> {
        self.recovery = (lo, hi);
        Self::new(self.orders, self.recovery)
    }

    /// The lowest order outside its envelope, if any.
    pub fn violation(&self, x: T, v: T, a: T, j: T) -> Option<Violation> {
        const KINDS: [Violation; 4] = [
            Violation::Value,
            Violation::Velocity,
            Violation::Acceleration,
            Violation::Jerk,
        ];
        [x, v, a, j]
            .into_iter()
            .zip(self.orders)
            .zip(KINDS)
            // written so a NaN counts as a violation
            .find(|((q, (lo, hi)), _)| !(*q >= *lo && *q <= *hi))
            .map(|(_, kind)| kind)
    }
}

/// True when every quantity lies inside its closed envelope.
pub fn are_in_range<T: Real>(x: T, v: T, a: T, j: T, bounds: &DerivativeBounds<T>) -> bool {
    bounds.violation(x, v, a, j).is_none()
}

fn widen<T: Real>((lo, hi): (T, T), margin: T) -> (T, T) {
    let pad = (margin - T::one()) * (hi - lo) / T::lit(2.0);
    (lo - pad, hi + pad)
}

fn extent<T: Real>(values: &[T], acc: Option<(T, T)>) -> Option<(T, T)> {
    values.iter().fold(acc, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Envelopes over every sample of every clip, each widened about its
/// midpoint to `safety_margin` times its width. The recovery envelope
/// copies the acceleration envelope.
///
/// The derivatives come from the same backward differences the policy
/// evaluates, so replaying a source clip never leaves the envelopes.
pub fn extract_bounds<T: Real>(channels: &[Channel<T>], safety_margin: T) -> Result<DerivativeBounds<T>> {
    if !(safety_margin >= T::one() && safety_margin.is_finite()) {
        return Err(Error::param("safety_margin", "must be finite and >= 1"));
    }
    if channels.is_empty() {
        return Err(Error::InsufficientSamples { needed: 4, got: 0 });
    }
    let mut orders: [Option<(T, T)>; 4] = [None; 4];
    for c in channels {
        if c.len() < 4 {
            return Err(Error::InsufficientSamples {
                needed: 4,
                got: c.len(),
            });
        }
        let d = Derivatives::of(c);
        orders[0] = extent(c.values(), orders[0]);
        orders[1] = extent(&d.velocity, orders[1]);
        orders[2] = extent(&d.acceleration, orders[2]);
        orders[3] = extent(&d.jerk, orders[3]);
    }
    let orders = orders.map(|o| widen(o.expect("at least one clip"), safety_margin));
    DerivativeBounds::new(orders, orders[2])
}
