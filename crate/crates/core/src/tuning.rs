//! Data-driven estimation of Half Pound Filter parameters.
//!
//! The lower cutoff comes from the slope/amplitude relation of a band-limited
//! signal, `f_c_min = max|x'| / (2π max|x|)`, which is exact for a single
//! tone. The upper cutoff is the frequency below which a given fraction
//! (99.99% by default) of the clip's power lies. Both can be raised by a
//! tuning gain, clamped strictly below Nyquist.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::filter::HpfParams;
use crate::kinematics::Derivatives;
use crate::scalar::{clamp01, lerp, Real};
use crate::spectrum::{PowerSpectrum, SpectrumConfig, Window};

/// Cumulative power fraction used for `f_c_max`.
pub const DEFAULT_POWER_FRACTION: f64 = 0.9999;
/// Margin kept between any tuned frequency and Nyquist, in Hz.
pub const NYQUIST_MARGIN_HZ: f64 = 0.01;
/// Nyquist frequency of 30 fps animation.
pub const ANIMATION_NYQUIST_HZ: f64 = 15.0;

pub const GB_HPF_MIN_HZ: f64 = 1.0;
pub const GB_HPF_MAX_HZ: f64 = 5.0;
pub const GB_HPF_TERMINAL_HZ: f64 = 15.0;
/// Gain Blend ramp length used when none is given.
pub const GB_DEFAULT_DURATION_S: f64 = 0.3;

/// Spectrum used for `f_c_max`: one Hann-tapered window over the whole clip.
/// A clip rarely ends where it starts, and without a taper that wrap-around
/// step leaks enough power to push the 99.99% point toward Nyquist.
pub const TUNING_SPECTRUM: SpectrumConfig = SpectrumConfig {
    window: Window::Hann,
    segment_len: None,
};

/// Largest magnitudes of a channel and its first three derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChannelExtrema<T: Real = f64> {
    pub max_abs_x: T,
    pub max_abs_dx: T,
    pub max_abs_ddx: T,
    pub max_abs_jerk: T,
}

impl<T: Real> ChannelExtrema<T> {
    /// Per-field maximum; used to aggregate a library of clips.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            max_abs_x: self.max_abs_x.max(other.max_abs_x),
            max_abs_dx: self.max_abs_dx.max(other.max_abs_dx),
            max_abs_ddx: self.max_abs_ddx.max(other.max_abs_ddx),
            max_abs_jerk: self.max_abs_jerk.max(other.max_abs_jerk),
        }
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Scans `|x|` and its finite-difference derivatives. Needs at least four
/// samples so that one jerk value exists.
pub fn scan_extrema<T: Real>(channel: &Channel<T>) -> Result<ChannelExtrema<T>> {
    if channel.len() < 4 {
        return Err(Error::InsufficientSamples {
            needed: 4,
            got: channel.len(),
        });
    }
    let d = Derivatives::of(channel);
    Ok(ChannelExtrema {
        max_abs_x: max_abs(channel.values()),
        max_abs_dx: max_abs(&d.velocity),
        max_abs_ddx: max_abs(&d.acceleration),
        max_abs_jerk: max_abs(&d.jerk),
    })
}

/// Scans every clip of a library and keeps the per-field maximum.
pub fn scan_library<T: Real>(clips: &[Channel<T>]) -> Result<ChannelExtrema<T>> {
    let mut iter = clips.iter();
    let first = iter.next().ok_or(Error::InsufficientSamples { needed: 1, got: 0 })?;
    iter.try_fold(scan_extrema(first)?, |acc, c| Ok(acc.merge(&scan_extrema(c)?)))
}

/// `max|x'| / (2π max|x|)`.
pub fn estimate_fc_min<T: Real>(extrema: &ChannelExtrema<T>) -> Result<T> {
    if !(extrema.max_abs_x > T::zero()) {
        return Err(Error::DegenerateChannel("max |x| is zero".into()));
    }
    Ok(extrema.max_abs_dx / (T::tau() * extrema.max_abs_x))
}

/// Smallest frequency below which `power_fraction` of the mean-removed
/// clip's power lies, using [`TUNING_SPECTRUM`].
pub fn estimate_fc_max<T: Real>(channel: &Channel<T>, power_fraction: T) -> Result<T> {
    estimate_fc_max_with(channel, power_fraction, TUNING_SPECTRUM)
}

pub fn estimate_fc_max_with<T: Real>(channel: &Channel<T>, power_fraction: T, config: SpectrumConfig) -> Result<T> {
    if !(power_fraction > T::zero() && power_fraction <= T::one()) {
        return Err(Error::param("power_fraction", "must lie in (0, 1]"));
    }
    if is_constant(channel.values()) {
        return Err(Error::DegenerateChannel(format!(
            "channel `{}` is constant",
            channel.name()
        )));
    }
    PowerSpectrum::of_channel(channel, config)?.frequency_containing(power_fraction)
}

pub(crate) fn is_constant<T: Real>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// `min(f * gain, nyquist - NYQUIST_MARGIN_HZ)`.
pub fn apply_tuning_gain<T: Real>(f: T, gain: T, nyquist: T) -> Result<T> {
    if !(gain > T::zero() && gain.is_finite()) {
        return Err(Error::param("gain", "must be finite and > 0"));
    }
    let ceiling = nyquist - T::lit(NYQUIST_MARGIN_HZ);
    if !(ceiling > T::zero()) {
        return Err(Error::param("nyquist", "must exceed the margin"));
    }
    Ok((f * gain).min(ceiling))
}

/// Which tuned frequencies the gain is applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningGain<T: Real = f64> {
    pub gain: T,
    pub apply_to_min: bool,
    pub apply_to_max: bool,
}

impl<T: Real> Default for TuningGain<T> {
    fn default() -> Self {
        Self {
            gain: T::one(),
            apply_to_min: true,
            apply_to_max: true,
        }
    }
}

/// Tuned parameters of one channel across a library of clips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedChannel<T: Real = f64> {
    pub extrema: ChannelExtrema<T>,
    pub params: HpfParams<T>,
}

/// Full tuning pass over all clips of one channel.
///
/// `f_c_min` uses the library-wide extrema; `f_c_max` is the largest per-clip
/// estimate. If the lower estimate ends above the upper one it is lowered to
/// match, since the filter needs `f_c_min <= f_c_max`.
pub fn tune_channel<T: Real>(clips: &[Channel<T>], power_fraction: T, gain: TuningGain<T>) -> Result<TunedChannel<T>> {
    let extrema = scan_library(clips)?;
    let fc_min = estimate_fc_min(&extrema)?;
    let mut fc_max = T::zero();
    for clip in clips {
        fc_max = fc_max.max(estimate_fc_max(clip, power_fraction)?);
    }
    let nyquist = clips
        .iter()
        .map(|c| c.rate_hint() / T::lit(2.0))
        .fold(T::infinity(), T::min);
    let fc_min = if gain.apply_to_min {
        apply_tuning_gain(fc_min, gain.gain, nyquist)?
    } else {
        fc_min
    };
    let fc_max = if gain.apply_to_max {
        apply_tuning_gain(fc_max, gain.gain, nyquist)?
    } else {
        fc_max
    };
    let params = HpfParams::new(fc_min.min(fc_max), fc_max, extrema.max_abs_dx)?;
    Ok(TunedChannel { extrema, params })
}

/// Progressive raising of both cutoff bounds toward `terminal_freq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainBlendSchedule<T: Real = f64> {
    base: HpfParams<T>,
    terminal_freq: T,
    duration: T,
}

impl<T: Real> GainBlendSchedule<T> {
    pub fn new(base: HpfParams<T>, terminal_freq: T, duration: T) -> Result<Self> {
        if !(terminal_freq >= base.f_c_max() && terminal_freq.is_finite()) {
            return Err(Error::param("terminal_freq", "must be finite and >= f_c_max"));
        }
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("duration", "must be finite and > 0"));
        }
        Ok(Self {
            base,
            terminal_freq,
            duration,
        })
    }

    pub fn base(&self) -> &HpfParams<T> {
        &self.base
    }

    pub fn terminal_freq(&self) -> T {
        self.terminal_freq
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn with_duration(mut self, duration: T) -> Result<Self> {
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("duration", "must be finite and > 0"));
        }
        self.duration = duration;
        Ok(self)
    }

    /// Parameters at `elapsed` seconds into the blend.
    pub fn params_at(&self, elapsed: T) -> HpfParams<T> {
        gain_blend_params(self, elapsed / self.duration)
    }
}

/// Both bounds interpolated linearly from the base values (progress 0) to
/// `terminal_freq` (progress 1). Progress outside `[0, 1]` saturates.
pub fn gain_blend_params<T: Real>(schedule: &GainBlendSchedule<T>, progress: T) -> HpfParams<T> {
    let w = clamp01(progress);
    let base = &schedule.base;
    let lo = lerp(base.f_c_min(), schedule.terminal_freq, w);
    let hi = lerp(base.f_c_max(), schedule.terminal_freq, w).max(lo);
    HpfParams::new(lo, hi, base.max_abs_dx()).expect("interpolation keeps the base invariants")
}

/// The untuned configuration: 1 Hz to 5 Hz, both raised to 15 Hz over
/// [`GB_DEFAULT_DURATION_S`].
pub fn gb_hpf_defaults<T: Real>(max_abs_dx: T) -> Result<GainBlendSchedule<T>> {
    let base = HpfParams::new(T::lit(GB_HPF_MIN_HZ), T::lit(GB_HPF_MAX_HZ), max_abs_dx)?;
    GainBlendSchedule::new(base, T::lit(GB_HPF_TERMINAL_HZ), T::lit(GB_DEFAULT_DURATION_S))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sine(f: f64, amp: f64, rate: f64, n: usize) -> Channel<f64> {
        let v = (0..n)
            .map(|i| amp * (std::f64::consts::TAU * f * i as f64 / rate).sin())
            .collect();
        Channel::uniform("s", rate, v).unwrap()
    }

    #[test]
    fn constant_channel_extrema() {
        let c = Channel::uniform("c", 30.0, vec![-3.0; 10]).unwrap();
        let e = scan_extrema(&c).unwrap();
        assert_eq!(
            e,
            ChannelExtrema {
                max_abs_x: 3.0,
                ..Default::default()
            }
        );
    }

    #[test]
    fn ramp_extrema() {
        let c = Channel::uniform("r", 30.0, (0..30).map(|i| 2.0 * i as f64 / 30.0).collect()).unwrap();
        let e = scan_extrema(&c).unwrap();
        assert_relative_eq!(e.max_abs_dx, 2.0, max_relative = 1e-12);
        assert!(e.max_abs_ddx < 1e-9);
    }

    #[test]
    fn too_short_channel() {
        let c = Channel::uniform("c", 30.0, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            scan_extrema(&c),
            Err(Error::InsufficientSamples { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn sinusoid_derivative_peak() {
        // dense sampling: backward differences approach 2 pi f A
        let e = scan_extrema(&sine(1.5, 2.0, 1000.0, 5000)).unwrap();
        let analytic = std::f64::consts::TAU * 1.5 * 2.0;
        assert!((e.max_abs_dx - analytic).abs() / analytic < 0.02);
    }

    #[test]
    fn fc_min_formula() {
        let e = ChannelExtrema {
            max_abs_x: 2.0,
            max_abs_dx: 10.0,
            ..Default::default()
        };
        assert_relative_eq!(estimate_fc_min(&e).unwrap(), 0.795_774_715, epsilon = 1e-8);
        let still = ChannelExtrema {
            max_abs_x: 2.0,
            ..Default::default()
        };
        assert_eq!(estimate_fc_min(&still).unwrap(), 0.0);
        assert!(matches!(
            estimate_fc_min(&ChannelExtrema::<f64>::default()),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn fc_min_recovers_tone_frequency() {
        for f in [0.5, 1.0, 2.0, 3.0] {
            let e = scan_extrema(&sine(f, 7.0, 20.0 * f.max(3.0), 4000)).unwrap();
            let est = estimate_fc_min(&e).unwrap();
            assert!((est - f).abs() / f < 0.02, "{f}: {est}");
        }
    }

    #[test]
    fn fc_max_of_bin_centred_tone() {
        // 525 samples at 30 Hz put 2 Hz exactly on bin 35
        let est = estimate_fc_max(&sine(2.0, 1.0, 30.0, 525), 0.9999).unwrap();
        assert!((est - 2.0).abs() <= 30.0 / 525.0);
    }

    #[test]
    fn fc_max_off_grid_tones_stay_band_limited() {
        let v: Vec<f64> = (0..2000)
            .map(|i| {
                let t = i as f64 / 30.0;
                30.0 + 30.0 * (std::f64::consts::TAU * 1.437 * t + 0.4).sin()
                    + 2.0 * (std::f64::consts::TAU * 4.311 * t).sin()
            })
            .collect();
        let c = Channel::uniform("c", 30.0, v).unwrap();
        let est = estimate_fc_max(&c, 0.9999).unwrap();
        assert!(est > 4.311 && est < 4.311 + 3.0 * 30.0 / 2000.0, "{est}");
    }

    #[test]
    fn fc_max_two_tones() {
        let a = sine(1.0, 1.0, 30.0, 600);
        let b = sine(6.0, 1.0, 30.0, 600);
        let sum: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
        let c = a.with_values(sum).unwrap();
        assert!(estimate_fc_max(&c, 0.9999).unwrap() >= 6.0);
    }

    #[test]
    fn fc_max_degenerate_and_bad_fraction() {
        let c = Channel::uniform("c", 30.0, vec![1.0; 64]).unwrap();
        assert!(matches!(estimate_fc_max(&c, 0.9999), Err(Error::DegenerateChannel(_))));
        let s = sine(2.0, 1.0, 30.0, 64);
        assert!(estimate_fc_max(&s, 0.0).is_err());
        assert!(estimate_fc_max(&s, 1.5).is_err());
    }

    #[test]
    fn tuning_gain_examples() {
        assert_eq!(apply_tuning_gain(5.0, 2.0, 15.0).unwrap(), 10.0);
        assert_eq!(apply_tuning_gain(5.0, 10.0, 15.0).unwrap(), 15.0 - NYQUIST_MARGIN_HZ);
        assert_eq!(apply_tuning_gain(4.2, 1.0, 15.0).unwrap(), 4.2);
        assert!(apply_tuning_gain(4.2, 0.0, 15.0).is_err());
    }

    #[test]
    fn gain_blend_examples() {
        let base = HpfParams::new(1.0, 5.0, 3.0).unwrap();
        let s = GainBlendSchedule::new(base, 15.0, 0.3).unwrap();
        assert_eq!(gain_blend_params(&s, 0.0), base);
        let end = gain_blend_params(&s, 1.0);
        assert_eq!((end.f_c_min(), end.f_c_max()), (15.0, 15.0));
        let mid = gain_blend_params(&s, 0.5);
        assert_eq!((mid.f_c_min(), mid.f_c_max(), mid.max_abs_dx()), (8.0, 10.0, 3.0));
        assert!(GainBlendSchedule::new(base, 4.0, 0.3).is_err());
        assert!(GainBlendSchedule::new(base, 15.0, 0.0).is_err());
    }

    #[test]
    fn gb_defaults() {
        let s = gb_hpf_defaults(42.0).unwrap();
        assert_eq!(s.base().f_c_min(), 1.0);
        assert_eq!(s.base().f_c_max(), 5.0);
        assert_eq!(s.terminal_freq(), 15.0);
        assert_eq!(s.base().max_abs_dx(), 42.0);
        assert!(gb_hpf_defaults(0.0).is_err());
    }

    #[test]
    fn tune_channel_clamps_order() {
        let clip = sine(2.0, 3.0, 30.0, 525);
        let t = tune_channel(
            &[clip],
            0.9999,
            TuningGain {
                gain: 10.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(t.params.f_c_max() < 15.0);
        assert!(t.params.f_c_min() <= t.params.f_c_max());
    }
}
