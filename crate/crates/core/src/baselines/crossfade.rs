use crate::channel::Channel;
use crate::error::Result;
use crate::filter::blend_toward;
use crate::scalar::Real;

use super::{check_coverage, window_weight, TransitionSpec};

/// Linear interpolation from `source` to `target` over the blend window.
pub fn crossfade<T: Real>(source: &Channel<T>, target: &Channel<T>, spec: &TransitionSpec<T>) -> Result<Channel<T>> {
    check_coverage(source, target, spec, 0)?;
    let k = spec.trigger_frame;
    let t0 = target.times()[k];
    let out = target
        .values()
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if i < k {
                return g;
            }
            let w = window_weight(target.times()[i] - t0, spec.blend_duration);
            if w >= T::one() {
                g
            } else {
                blend_toward(source.values()[i], g, w)
            }
        })
        .collect();
    target.with_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_inputs_pass_through() {
        let c = Channel::uniform("c", 30.0, (0..40).map(|i| (i as f64 * 0.3).sin()).collect()).unwrap();
        let out = crossfade(&c, &c, &TransitionSpec::new(10, 0.3).unwrap()).unwrap();
        assert_eq!(out.values(), c.values());
    }

    #[test]
    fn ramp_table() {
        let src = Channel::uniform("s", 30.0, vec![0.0; 40]).unwrap();
        let dst = Channel::uniform("t", 30.0, vec![1.0; 40]).unwrap();
        let spec = TransitionSpec::new(5, 10.0 / 30.0).unwrap();
        let out = crossfade(&src, &dst, &spec).unwrap();
        for k in 0..10 {
            assert!((out.values()[5 + k] - k as f64 / 10.0).abs() < 1e-12, "frame {k}");
        }
        assert!(out.values()[..5].iter().all(|&v| v == 1.0));
        assert!(out.values()[15..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn midpoint_weight_is_half() {
        let src = Channel::uniform("s", 10.0, vec![2.0; 30]).unwrap();
        let dst = Channel::uniform("t", 10.0, vec![4.0; 30]).unwrap();
        let out = crossfade(&src, &dst, &TransitionSpec::new(4, 1.0).unwrap()).unwrap();
        assert_eq!(out.values()[9], 3.0);
    }
}
