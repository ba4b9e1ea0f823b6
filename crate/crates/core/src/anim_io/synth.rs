//! Deterministic stand-in for a pair of motion-capture clips.
//!
//! Both clips are 5000 frames at 30 fps of a knee-pitch-like angle in
//! degrees. Generation, for a `u64` seed:
//!
//! 1. `ChaCha8Rng::seed_from_u64(seed)` drives every random draw, in the
//!    order listed below.
//! 2. Run clip: fundamental `f0 ~ U[1.3, 1.6)` Hz; harmonics `f0, 2 f0, 3 f0`
//!    with amplitudes `30, 8, 2` degrees each scaled by `U[0.85, 1.15)` and
//!    phases `U[0, 2π)`; offset 30°.
//! 3. Fall clip: three tones `U[0.15, 0.35)`, `U[0.5, 0.9)`, `U[1.8, 2.6)` Hz
//!    with amplitudes `25, 10, 4` degrees scaled and phased as above; offset
//!    140°.
//! 4. Every frequency is rounded to the clip's DFT grid (`k · 30 / 5000` Hz)
//!    so each tone occupies a single spectral bin.
//! 5. Gaussian noise with σ = 0.05° is added to each sample, run clip first.
//!
//! All tones lie below 5 Hz. The offsets keep the two clips' value ranges
//! at least 19° apart, so any splice of run into fall is a real
//! discontinuity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::Channel;
use crate::scalar::Real;

pub const SYNTH_FRAMES: usize = 5000;
pub const SYNTH_RATE: f64 = 30.0;
const NOISE_SIGMA: f64 = 0.05;

/// Tone set behind one generated clip.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthClip {
    pub offset: f64,
    /// `(frequency Hz, amplitude, phase rad)`
    pub tones: Vec<(f64, f64, f64)>,
}

impl SynthClip {
    pub fn max_frequency(&self) -> f64 {
        self.tones.iter().map(|t| t.0).fold(0.0, f64::max)
    }

    fn sample(&self, t: f64) -> f64 {
        self.offset
            + self
                .tones
                .iter()
                .map(|&(f, a, p)| a * (std::f64::consts::TAU * f * t + p).sin())
                .sum::<f64>()
    }
}

fn snap(f: f64) -> f64 {
    let df = SYNTH_RATE / SYNTH_FRAMES as f64;
    (f / df).round() * df
}

fn tone(rng: &mut ChaCha8Rng, f: f64, amp: f64) -> (f64, f64, f64) {
    let a = amp * rng.random_range(0.85..1.15);
    let p = rng.random_range(0.0..std::f64::consts::TAU);
    (snap(f), a, p)
}

/// The tone sets for `seed`, without noise.
pub fn synth_tones(seed: u64) -> (SynthClip, SynthClip, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0: f64 = rng.random_range(1.3..1.6);
    let run = SynthClip {
        offset: 30.0,
        tones: vec![
            tone(&mut rng, f0, 30.0),
            tone(&mut rng, 2.0 * f0, 8.0),
            tone(&mut rng, 3.0 * f0, 2.0),
        ],
    };
    let slow = rng.random_range(0.15..0.35);
    let mid = rng.random_range(0.5..0.9);
    let fast = rng.random_range(1.8..2.6);
    let fall = SynthClip {
        offset: 140.0,
        tones: vec![
            tone(&mut rng, slow, 25.0),
            tone(&mut rng, mid, 10.0),
            tone(&mut rng, fast, 4.0),
        ],
    };
    (run, fall, rng)
}

/// Two band-limited clips, "run" then "fall", fully determined by `seed`.
pub fn synth_benchmark<T: Real>(seed: u64) -> (Channel<T>, Channel<T>) {
    let (run, fall, mut rng) = synth_tones(seed);
    let noise = Normal::new(0.0, NOISE_SIGMA).expect("valid sigma");
    let mut render = |clip: &SynthClip, name: &str| {
        let values = (0..SYNTH_FRAMES)
            .map(|i| {
                let t = i as f64 / SYNTH_RATE;
                T::lit(clip.sample(t) + noise.sample(&mut rng))
            })
            .collect();
        Channel::uniform(name, T::lit(SYNTH_RATE), values).expect("finite synthetic samples")
    };
    let a = render(&run, "run");
    let b = render(&fall, "fall");
    (a, b)
}
