use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::filter::blend_toward;
use crate::scalar::Real;

use super::{check_coverage, window_weight, TransitionSpec};

/// Dead blending: the source is no longer sampled past the trigger; it is
/// extrapolated from its exit velocity, which decays exponentially, and
/// cross-faded into the target.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DeadBlendConfig<T: Real = f64> {
    /// Half-life of the extrapolated velocity. `None` uses a quarter of the
    /// blend duration; zero freezes the source at its last pose.
    pub half_life: Option<T>,
}

impl<T: Real> DeadBlendConfig<T> {
    pub fn half_life_for(&self, blend_duration: T) -> T {
        self.half_life.unwrap_or(blend_duration / T::lit(4.0))
    }
}

/// Extrapolated source pose `anchor + v (1 - e^{-λτ}) / λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadBlendExtrapolation<T: Real = f64> {
    pub anchor: T,
    pub velocity: T,
    pub half_life: T,
}

impl<T: Real> DeadBlendExtrapolation<T> {
    pub fn new(anchor: T, velocity: T, half_life: T) -> Result<Self> {
        if !(half_life >= T::zero()) {
            return Err(Error::param("half_life", "must be >= 0"));
        }
        Ok(Self {
            anchor,
            velocity,
            half_life,
        })
    }

    /// Pose `tau` seconds after the anchor sample.
    pub fn at(&self, tau: T) -> T {
        if self.half_life == T::zero() || !self.half_life.is_finite() {
            if self.half_life.is_infinite() {
                return self.anchor + self.velocity * tau;
            }
            return self.anchor;
        }
        let lambda = T::LN_2() / self.half_life;
        self.anchor + self.velocity * (T::one() - (-lambda * tau).exp()) / lambda
    }
}

/// Dead-blend transition. The extrapolation is anchored at the last source
/// sample before the trigger, with velocity from the two samples before it.
pub fn deadblend<T: Real>(
    source: &Channel<T>,
    target: &Channel<T>,
    spec: &TransitionSpec<T>,
    config: DeadBlendConfig<T>,
) -> Result<Channel<T>> {
    check_coverage(source, target, spec, 2)?;
    let k = spec.trigger_frame;
    let s = source.values();
    let ext = DeadBlendExtrapolation::new(
        s[k - 1],
        (s[k - 1] - s[k - 2]) / source.dt(k - 1),
        config.half_life_for(spec.blend_duration),
    )?;
    let times = target.times();
    let (t_anchor, t0) = (times[k - 1], times[k]);
    let out = target
        .values()
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if i < k {
                return g;
            }
            let w = window_weight(times[i] - t0, spec.blend_duration);
            if w >= T::one() {
                g
            } else {
                blend_toward(ext.at(times[i] - t_anchor), g, w)
            }
        })
        .collect();
    target.with_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::crossfade;

    #[test]
    fn still_source_equals_crossfade() {
        let src = Channel::uniform("s", 30.0, vec![-1.0; 40]).unwrap();
        let dst = Channel::uniform("t", 30.0, (0..40).map(|i| i as f64 * 0.1).collect()).unwrap();
        let spec = TransitionSpec::new(10, 0.3).unwrap();
        let a = deadblend(&src, &dst, &spec, DeadBlendConfig::default()).unwrap();
        let b = crossfade(&src, &dst, &spec).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn infinite_decay_freezes_source() {
        // a source that holds still from the anchor onward, so freezing at
        // the anchor and sampling it coincide
        let mut v: Vec<f64> = (0..9).map(|i| i as f64).collect();
        v.extend(std::iter::repeat_n(8.0, 31));
        let src = Channel::uniform("s", 30.0, v).unwrap();
        let dst = Channel::uniform("t", 30.0, vec![3.0; 40]).unwrap();
        let spec = TransitionSpec::new(10, 0.3).unwrap();
        let frozen = deadblend(&src, &dst, &spec, DeadBlendConfig { half_life: Some(0.0) }).unwrap();
        let xf = crossfade(&src, &dst, &spec).unwrap();
        assert_eq!(frozen.values(), xf.values());
        let fast = deadblend(&src, &dst, &spec, DeadBlendConfig { half_life: Some(1e-9) }).unwrap();
        for (a, b) in fast.values().iter().zip(xf.values()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn linear_source_per_frame_oracle() {
        let rate = 30.0;
        let src = Channel::uniform("s", rate, (0..40).map(|i| 2.0 * i as f64 / rate).collect()).unwrap();
        let dst = Channel::uniform("t", rate, vec![5.0; 40]).unwrap();
        let spec = TransitionSpec::new(12, 0.2).unwrap();
        let out = deadblend(&src, &dst, &spec, DeadBlendConfig::default()).unwrap();

        // oracle: anchor 2*11/30, velocity 2, half-life 0.05 s,
        // extrapolate then lerp with w = m / 6 on window frame m
        let anchor = 2.0 * 11.0 / rate;
        let lambda = std::f64::consts::LN_2 / 0.05;
        for m in 0..6 {
            let tau = (m + 1) as f64 / rate;
            let e = anchor + 2.0 * (1.0 - (-lambda * tau).exp()) / lambda;
            let w = m as f64 / 6.0;
            let want = e + (5.0 - e) * w;
            assert!((out.values()[12 + m] - want).abs() < 1e-12, "frame {m}");
        }
        assert!(out.values()[18..].iter().all(|&v| v == 5.0));
        assert!(out.values()[..12].iter().all(|&v| v == 5.0));
    }

    #[test]
    fn needs_exit_history() {
        let c = Channel::uniform("c", 30.0, vec![0.0; 40]).unwrap();
        let spec = TransitionSpec::new(1, 0.2).unwrap();
        assert!(matches!(
            deadblend(&c, &c, &spec, DeadBlendConfig::default()),
            Err(Error::Coverage(_))
        ));
    }
}
