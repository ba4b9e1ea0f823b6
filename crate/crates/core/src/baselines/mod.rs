//! Fixed-window transition baselines: cross-fade, dead blending and quintic
//! inertialization.
//!
//! All three take the outgoing clip (`source`) and the incoming clip
//! (`target`) on a shared timeline and return a channel that equals `target`
//! everywhere outside the blend window.

mod crossfade;
mod deadblend;
mod inertialize;

pub use crossfade::crossfade;
pub use deadblend::{deadblend, DeadBlendConfig, DeadBlendExtrapolation};
pub use inertialize::{inertialize, InertializeConfig, InertializerState};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Where a transition starts and how long it lasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec<T: Real = f64> {
    pub trigger_frame: usize,
    pub blend_duration: T,
}

impl<T: Real> TransitionSpec<T> {
    pub fn new(trigger_frame: usize, blend_duration: T) -> Result<Self> {
        if !(blend_duration > T::zero() && blend_duration.is_finite()) {
            return Err(Error::param("blend_duration", "must be finite and > 0"));
        }
        Ok(Self {
            trigger_frame,
            blend_duration,
        })
    }
}

/// Linear blend weight `tau / duration`, saturating at 1. Values within
/// 1e-9 of 1 snap to 1 so rounding in the timestamps cannot leave a frame
/// just short of the target.
pub fn window_weight<T: Real>(tau: T, duration: T) -> T {
    let w = tau / duration;
    if w >= T::one() - T::lit(1e-9) {
        T::one()
    } else {
        w.max(T::zero())
    }
}

/// Shared validation: equal lengths, trigger in range, at least `history`
/// source samples before the trigger, and the whole window inside both clips.
pub(crate) fn check_coverage<T: Real>(
    source: &Channel<T>,
    target: &Channel<T>,
    spec: &TransitionSpec<T>,
    history: usize,
) -> Result<()> {
    if source.len() != target.len() {
        return Err(Error::LengthMismatch {
            left: source.len(),
            right: target.len(),
        });
    }
    let k = spec.trigger_frame;
    if k >= target.len() {
        return Err(Error::OutOfRange {
            index: k,
            len: target.len(),
        });
    }
    if k < history {
        return Err(Error::Coverage(format!(
            "trigger frame {k} leaves fewer than {history} source samples before it"
        )));
    }
    let times = target.times();
    let span = times[times.len() - 1] - times[k];
    if span < spec.blend_duration * (T::one() - T::lit(1e-9)) {
        return Err(Error::Coverage(format!(
            "window of {}s from frame {k} runs past the clip end ({}s available)",
            spec.blend_duration, span
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_saturates() {
        assert_eq!(window_weight(0.5, 1.0), 0.5);
        assert_eq!(window_weight(1.0 - 1e-12, 1.0), 1.0);
        assert_eq!(window_weight(2.0, 1.0), 1.0);
        assert_eq!(window_weight(-1.0, 1.0), 0.0);
    }

    #[test]
    fn coverage_errors() {
        let a = Channel::uniform("a", 30.0, vec![0.0; 20]).unwrap();
        let b = Channel::uniform("b", 30.0, vec![0.0; 21]).unwrap();
        let spec = TransitionSpec::new(5, 0.2).unwrap();
        assert!(matches!(
            check_coverage(&a, &b, &spec, 0),
            Err(Error::LengthMismatch { .. })
        ));
        let late = TransitionSpec::new(15, 0.2).unwrap();
        assert!(matches!(check_coverage(&a, &a, &late, 0), Err(Error::Coverage(_))));
        let early = TransitionSpec::new(1, 0.2).unwrap();
        assert!(matches!(check_coverage(&a, &a, &early, 2), Err(Error::Coverage(_))));
        assert!(matches!(
            check_coverage(&a, &a, &TransitionSpec::new(20, 0.2).unwrap(), 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(TransitionSpec::new(1, 0.0f64).is_err());
    }
}
