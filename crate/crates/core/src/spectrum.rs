//! One-sided power spectra of uniformly sampled channels.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Taper applied to each analysed segment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// How a spectrum is estimated.
///
/// The default is one rectangular window over the whole mean-removed clip.
/// Setting `segment_len` switches to Welch averaging with 50% overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpectrumConfig {
    pub window: Window,
    pub segment_len: Option<usize>,
}

/// Magnitude-squared spectrum on bins `0, df, 2 df, ..., nyquist`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum<T: Real = f64> {
    bin_freqs: Vec<T>,
    power: Vec<T>,
    resolution: T,
}

impl<T: Real> PowerSpectrum<T> {
    /// Spectrum of a mean-removed channel. Non-uniform channels are
    /// resampled to their `rate_hint` first.
    pub fn of_channel(channel: &Channel<T>, config: SpectrumConfig) -> Result<Self> {
        let uniform = channel.resample_uniform()?;
        Self::of_samples(uniform.values(), uniform.rate_hint(), config)
    }

    pub fn of_samples(values: &[T], rate: T, config: SpectrumConfig) -> Result<Self> {
        let n = config.segment_len.unwrap_or(values.len()).min(values.len());
        if n < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: values.len(),
            });
        }
        let mean = values.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(values.len());
        let taper: Vec<T> = match config.window {
            Window::Rectangular => vec![T::one(); n],
            Window::Hann => (0..n)
                .map(|i| {
                    let phase = T::tau() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                    T::lit(0.5) * (T::one() - phase.cos())
                })
                .collect(),
        };

        let fft = FftPlanner::<T>::new().plan_fft_forward(n);
        let bins = n / 2 + 1;
        let mut power = vec![T::zero(); bins];
        let hop = (n / 2).max(1);
        let mut segments = 0usize;
        let mut start = 0;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        while start + n <= values.len() {
            for (slot, (&v, &w)) in buf.iter_mut().zip(values[start..start + n].iter().zip(&taper)) {
                *slot = Complex::new((v - mean) * w, T::zero());
            }
            fft.process(&mut buf);
            for (k, p) in power.iter_mut().enumerate() {
                let mut m = buf[k].norm_sqr();
                // fold negative frequencies into the one-sided spectrum
                if k != 0 && !(n.is_multiple_of(2) && k == n / 2) {
                    m = m + m;
                }
                *p = *p + m;
            }
            segments += 1;
            if config.segment_len.is_none() {
                break;
            }
            start += hop;
        }
        let count = T::from_usize_lossy(segments);
        power.iter_mut().for_each(|p| *p = *p / count);

        let resolution = rate / T::from_usize_lossy(n);
        let bin_freqs = (0..bins).map(|k| T::from_usize_lossy(k) * resolution).collect();
        Ok(Self {
            bin_freqs,
            power,
            resolution,
        })
    }

    /// Builds a spectrum from parts; `power` must be non-negative and the
    /// frequencies strictly increasing.
    pub fn from_parts(bin_freqs: Vec<T>, power: Vec<T>) -> Result<Self> {
        if bin_freqs.len() != power.len() {
            return Err(Error::LengthMismatch {
                left: bin_freqs.len(),
                right: power.len(),
            });
        }
        if bin_freqs.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: bin_freqs.len(),
            });
        }
        if bin_freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::IncompatibleGrid("bin frequencies must increase".into()));
        }
        if power.iter().any(|p| !(*p >= T::zero() && p.is_finite())) {
            return Err(Error::param("power", "must be finite and >= 0"));
        }
        let resolution = bin_freqs[1] - bin_freqs[0];
        Ok(Self {
            bin_freqs,
            power,
            resolution,
        })
    }

    pub fn bin_freqs(&self) -> &[T] {
        &self.bin_freqs
    }

    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn total_power(&self) -> T {
        self.power.iter().fold(T::zero(), |a, &p| a + p)
    }

    /// Scales the bins to sum to one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_power();
        if !(total > T::zero()) {
            return Err(Error::DegenerateChannel("spectrum has zero total power".into()));
        }
        Ok(Self {
            bin_freqs: self.bin_freqs.clone(),
            power: self.power.iter().map(|&p| p / total).collect(),
            resolution: self.resolution,
        })
    }

    /// Running sum of bin power.
    pub fn cumulative(&self) -> Vec<T> {
        self.power
            .iter()
            .scan(T::zero(), |acc, &p| {
                *acc = *acc + p;
                Some(*acc)
            })
            .collect()
    }

    /// Smallest bin frequency whose cumulative power reaches `fraction` of
    /// the total.
    pub fn frequency_containing(&self, fraction: T) -> Result<T> {
        if !(fraction > T::zero() && fraction <= T::one()) {
            return Err(Error::param("power_fraction", "must lie in (0, 1]"));
        }
        let total = self.total_power();
        if !(total > T::zero()) {
            return Err(Error::DegenerateChannel("spectrum has zero total power".into()));
        }
        if fraction == T::one() {
            // the highest bin holding any power
            let k = self.power.iter().rposition(|&p| p > T::zero()).unwrap_or(0);
            return Ok(self.bin_freqs[k]);
        }
        let threshold = fraction * total;
        let cumulative = self.cumulative();
        let k = cumulative
            .iter()
            .position(|&c| c >= threshold)
            .unwrap_or(self.power.len() - 1);
        Ok(self.bin_freqs[k])
    }

    /// True when both spectra share bin count and frequencies (to 1e-9 relative).
    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .bin_freqs
                .iter()
                .zip(&other.bin_freqs)
                .all(|(&a, &b)| (a - b).abs() <= T::lit(1e-9) * a.abs().max(b.abs()).max(T::one()))
    }

    /// Linearly interpolates the power density onto `grid`'s bins, keeping
    /// total power. Bins outside this spectrum's range receive zero.
    pub fn regrid(&self, grid: &Self) -> Result<Self> {
        if self.same_grid(grid) {
            return Ok(self.clone());
        }
        let density: Vec<T> = self.power.iter().map(|&p| p / self.resolution).collect();
        let last = *self.bin_freqs.last().expect("non-empty spectrum");
        let mut seg = 0;
        let mut power = Vec::with_capacity(grid.len());
        for &f in &grid.bin_freqs {
            if f > last {
                power.push(T::zero());
                continue;
            }
            while seg + 2 < self.len() && self.bin_freqs[seg + 1] < f {
                seg += 1;
            }
            let (fa, fb) = (self.bin_freqs[seg], self.bin_freqs[seg + 1]);
            let w = ((f - fa) / (fb - fa)).max(T::zero()).min(T::one());
            power.push(crate::scalar::lerp(density[seg], density[seg + 1], w) * grid.resolution);
        }
        let mut out = Self {
            bin_freqs: grid.bin_freqs.clone(),
            power,
            resolution: grid.resolution,
        };
        let (before, after) = (self.total_power(), out.total_power());
        if after > T::zero() {
            let scale = before / after;
            out.power.iter_mut().for_each(|p| *p = *p * scale);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(f: f64, rate: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / rate).sin())
            .collect()
    }

    #[test]
    fn bin_centred_tone_is_one_bin() {
        // 32 Hz sampling, 512 samples: 2 Hz falls exactly on bin 32
        let s = PowerSpectrum::of_samples(&tone(2.0, 32.0, 512), 32.0, SpectrumConfig::default()).unwrap();
        let n = s.normalized().unwrap();
        assert!((n.power()[32] - 1.0).abs() < 1e-12);
        assert_eq!(s.bin_freqs()[32], 2.0);
        assert_eq!(s.len(), 257);
    }

    #[test]
    fn parseval_holds_for_rectangular() {
        let x: Vec<f64> = (0..100).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let mean = x.iter().sum::<f64>() / 100.0;
        let energy: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let s = PowerSpectrum::of_samples(&x, 10.0, SpectrumConfig::default()).unwrap();
        // sum |X_k|^2 over all N bins = N * energy
        assert!((s.total_power() - 100.0 * energy).abs() < 1e-8 * energy * 100.0);
    }

    #[test]
    fn frequency_containing_full_fraction() {
        let s = PowerSpectrum::from_parts(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.frequency_containing(1.0).unwrap(), 2.0);
        assert_eq!(s.frequency_containing(0.5).unwrap(), 1.0);
        assert_eq!(s.frequency_containing(0.7).unwrap(), 2.0);
        assert!(s.frequency_containing(0.0).is_err());
    }

    #[test]
    fn welch_hann_runs() {
        let cfg = SpectrumConfig {
            window: Window::Hann,
            segment_len: Some(64),
        };
        let s = PowerSpectrum::of_samples(&tone(4.0, 32.0, 1024), 32.0, cfg).unwrap();
        assert_eq!(s.len(), 33);
        let peak = s
            .power()
            .iter()
            .cloned()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert_eq!(s.bin_freqs()[peak], 4.0);
    }

    #[test]
    fn regrid_preserves_total() {
        let a = PowerSpectrum::of_samples(&tone(2.0, 30.0, 300), 30.0, SpectrumConfig::default()).unwrap();
        let b = PowerSpectrum::of_samples(&tone(2.0, 30.0, 450), 30.0, SpectrumConfig::default()).unwrap();
        let r = a.regrid(&b).unwrap();
        assert!(r.same_grid(&b));
        assert!((r.total_power() - a.total_power()).abs() < 1e-9 * a.total_power());
    }
}
