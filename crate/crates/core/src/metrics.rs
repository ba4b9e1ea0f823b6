//! Evaluation metrics: windowed MSE and Normalized Power Spectrum Similarity.
//!
//! NPSS is the earth mover's distance between two normalized power spectra.
//! On a one-dimensional grid with unit spacing between bins that distance
//! equals the L1 norm of the difference of the cumulative spectra, which is
//! what [`npss_spectra`] computes. Lower is more similar; zero means the
//! normalized spectra match.

use std::fmt::Write as _;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::{PowerSpectrum, SpectrumConfig};
use crate::tuning::is_constant;

/// Frames averaged by the benchmark's MSE, starting at the transition.
pub const DEFAULT_MSE_WINDOW: usize = 60;
const MIN_SPECTRUM_SAMPLES: usize = 16;

/// Mean squared error over `window_frames` samples starting at frame 0.
pub fn mse<T: Real>(filtered: &Channel<T>, target: &Channel<T>, window_frames: usize) -> Result<T> {
    mse_window(filtered, target, 0, window_frames)
}

/// Mean squared error over `filtered[start..start + window_frames]`.
pub fn mse_window<T: Real>(
    filtered: &Channel<T>,
    target: &Channel<T>,
    start: usize,
    window_frames: usize,
) -> Result<T> {
    if filtered.len() != target.len() {
        return Err(Error::LengthMismatch {
            left: filtered.len(),
            right: target.len(),
        });
    }
    if window_frames == 0 {
        return Err(Error::param("window_frames", "must be > 0"));
    }
    let end = start + window_frames;
    if end > target.len() {
        return Err(Error::OutOfRange {
            index: end,
            len: target.len(),
        });
    }
    let sum = filtered.values()[start..end]
        .iter()
        .zip(&target.values()[start..end])
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    Ok(sum / T::from_usize_lossy(window_frames))
}

fn raw_spectrum<T: Real>(channel: &Channel<T>) -> Result<PowerSpectrum<T>> {
    if channel.len() < MIN_SPECTRUM_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SPECTRUM_SAMPLES,
            got: channel.len(),
        });
    }
    if is_constant(channel.values()) {
        return Err(Error::DegenerateChannel(format!(
            "channel `{}` is constant",
            channel.name()
        )));
    }
    PowerSpectrum::of_channel(channel, SpectrumConfig::default())
}

/// Mean-removed magnitude-squared spectrum scaled to sum to one.
pub fn normalized_power_spectrum<T: Real>(channel: &Channel<T>) -> Result<PowerSpectrum<T>> {
    raw_spectrum(channel)?.normalized()
}

/// Per-bin maximum of the two clips' raw power spectra, then normalized.
/// `clip_b`'s spectrum is interpolated onto `clip_a`'s grid when their
/// lengths differ; the sampling rates must agree.
pub fn reference_spectrum<T: Real>(clip_a: &Channel<T>, clip_b: &Channel<T>) -> Result<PowerSpectrum<T>> {
    let a = raw_spectrum(clip_a)?;
    let b = raw_spectrum(clip_b)?;
    let (na, nb) = (a.bin_freqs()[a.len() - 1], b.bin_freqs()[b.len() - 1]);
    if (na - nb).abs() > a.resolution().max(b.resolution()) {
        return Err(Error::IncompatibleGrid(format!("nyquist {na} Hz vs {nb} Hz")));
    }
    let b = b.regrid(&a)?;
    let power = a.power().iter().zip(b.power()).map(|(&x, &y)| x.max(y)).collect();
    PowerSpectrum::from_parts(a.bin_freqs().to_vec(), power)?.normalized()
}

/// L1 distance between the cumulative sums of two normalized spectra on the
/// same grid.
pub fn npss_spectra<T: Real>(test: &PowerSpectrum<T>, reference: &PowerSpectrum<T>) -> Result<T> {
    if !test.same_grid(reference) {
        return Err(Error::IncompatibleGrid(format!(
            "{} bins vs {} bins",
            test.len(),
            reference.len()
        )));
    }
    let (ct, cr) = (test.cumulative(), reference.cumulative());
    Ok(ct.iter().zip(&cr).fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs()))
}

/// NPSS of a channel against a normalized reference spectrum. The channel's
/// spectrum is interpolated onto the reference grid when lengths differ.
pub fn npss<T: Real>(test: &Channel<T>, reference: &PowerSpectrum<T>) -> Result<T> {
    let spec = raw_spectrum(test)?.regrid(reference)?.normalized()?;
    npss_spectra(&spec, reference)
}

/// Power-weighted mean of per-channel NPSS values: `(npss, weight)` pairs,
/// with each weight the channel's total unnormalized reference power.
pub fn npss_weighted<T: Real>(items: &[(T, T)]) -> Result<T> {
    let total = items.iter().fold(T::zero(), |a, &(_, w)| a + w);
    if !(total > T::zero()) {
        return Err(Error::param("weights", "total weight must be > 0"));
    }
    Ok(items.iter().fold(T::zero(), |a, &(n, w)| a + n * w) / total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub name: String,
    pub mse: f64,
    pub npss: f64,
}

/// Table of per-configuration scores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn push(&mut self, name: impl Into<String>, mse: f64, npss: f64) {
        self.rows.push(EvalRow {
            name: name.into(),
            mse,
            npss,
        });
    }

    pub fn get(&self, name: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Aligned text table with columns Name, MSE and NPSS.
    pub fn render_table(&self) -> String {
        let fmt = |v: f64| format!("{v:.4}");
        let name_w = self.rows.iter().map(|r| r.name.len()).chain([4]).max().unwrap_or(4);
        let mse_w = self.rows.iter().map(|r| fmt(r.mse).len()).chain([3]).max().unwrap_or(3);
        let npss_w = self
            .rows
            .iter()
            .map(|r| fmt(r.npss).len())
            .chain([4])
            .max()
            .unwrap_or(4);
        let rule = "-".repeat(name_w + mse_w + npss_w + 6);
        let mut out = String::new();
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, " {:<name_w$}   {:>mse_w$}  {:>npss_w$}", "Name", "MSE", "NPSS");
        let _ = writeln!(out, "{rule}");
        for r in &self.rows {
            let _ = writeln!(
                out,
                " {:<name_w$}   {:>mse_w$}  {:>npss_w$}",
                r.name,
                fmt(r.mse),
                fmt(r.npss)
            );
        }
        let _ = writeln!(out, "{rule}");
        out
    }

    /// `name,mse,npss` rows with full precision.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("name,mse,npss\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.name, r.mse, r.npss);
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "name,mse,npss" => {}
            other => return Err(Error::Input(format!("unexpected report header {other:?}"))),
        }
        let mut report = Self::default();
        for (i, line) in lines.enumerate() {
            let mut parts = line.rsplitn(3, ',');
            let (npss, mse, name) = (parts.next(), parts.next(), parts.next());
            let (Some(npss), Some(mse), Some(name)) = (npss, mse, name) else {
                return Err(Error::Input(format!("report row {}: expected 3 fields", i + 2)));
            };
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("report row {}: invalid number `{s}`", i + 2)))
            };
            report.push(name, num(mse)?, num(npss)?);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(values: Vec<f64>) -> Channel<f64> {
        Channel::uniform("c", 30.0, values).unwrap()
    }

    fn tone(f: f64, n: usize, rate: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / rate).sin())
            .collect()
    }

    #[test]
    fn mse_examples() {
        let a = ch((0..100).map(|i| (i as f64).sqrt()).collect());
        assert_eq!(mse(&a, &a, 60).unwrap(), 0.0);
        let b = ch(a.values().iter().map(|v| v + 1.0).collect());
        assert!((mse(&b, &a, 17).unwrap() - 1.0).abs() < 1e-12);
        let c = ch(a
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { v + 2.0 } else { v - 2.0 })
            .collect());
        assert!((mse_window(&c, &a, 10, 33).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mse_errors() {
        let a = ch(vec![0.0; 10]);
        let b = ch(vec![0.0; 11]);
        assert!(matches!(mse(&a, &b, 5), Err(Error::LengthMismatch { .. })));
        assert!(mse(&a, &a, 11).is_err());
        assert!(mse(&a, &a, 0).is_err());
    }

    #[test]
    fn normalized_spectrum_sums_to_one() {
        let s = normalized_power_spectrum(&ch(tone(3.0, 300, 30.0))).unwrap();
        assert!((s.total_power() - 1.0).abs() < 1e-9);
        // bin-centred: 3 Hz is bin 30
        assert!(s.power()[30] > 1.0 - 1e-9);
        let scaled = normalized_power_spectrum(&ch(tone(3.0, 300, 30.0).iter().map(|v| -4.0 * v).collect())).unwrap();
        for (a, b) in s.power().iter().zip(scaled.power()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_preconditions() {
        assert!(matches!(
            normalized_power_spectrum(&ch(vec![1.0; 8])),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            normalized_power_spectrum(&ch(vec![1.0; 64])),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn reference_of_identical_clips() {
        let a = ch(tone(2.0, 300, 30.0)
            .iter()
            .zip(tone(5.0, 300, 30.0))
            .map(|(x, y)| x + 0.3 * y)
            .collect());
        let r = reference_spectrum(&a, &a).unwrap();
        assert_eq!(r, normalized_power_spectrum(&a).unwrap());
    }

    #[test]
    fn reference_of_disjoint_tones() {
        let r = reference_spectrum(&ch(tone(2.0, 300, 30.0)), &ch(tone(5.0, 300, 30.0))).unwrap();
        assert!((r.power()[20] - 0.5).abs() < 1e-9);
        assert!((r.power()[50] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn npss_of_adjacent_tones() {
        // bins 20 and 21: the cumulative spectra differ by one on one bin
        let reference = normalized_power_spectrum(&ch(tone(2.0, 300, 30.0))).unwrap();
        let d = npss(&ch(tone(2.1, 300, 30.0)), &reference).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
        assert!(npss(&ch(tone(2.0, 300, 30.0)), &reference).unwrap() < 1e-12);
    }

    #[test]
    fn npss_grid_mismatch() {
        let a = normalized_power_spectrum(&ch(tone(2.0, 300, 30.0))).unwrap();
        let b = normalized_power_spectrum(&ch(tone(2.0, 330, 30.0))).unwrap();
        assert!(matches!(npss_spectra(&a, &b), Err(Error::IncompatibleGrid(_))));
    }

    #[test]
    fn weighted_mean() {
        assert_eq!(npss_weighted(&[(1.0, 1.0), (4.0, 3.0)]).unwrap(), 3.25);
        assert!(npss_weighted::<f64>(&[]).is_err());
    }

    #[test]
    fn report_rendering() {
        let mut r = EvalReport::default();
        r.push("Raw Combined", 0.0, 0.0445);
        r.push("HPF Auto", 0.0006, 0.044);
        let table = r.render_table();
        assert!(table.contains(" HPF Auto       0.0006  0.0440"), "{table}");
        assert!(table.contains(" Raw Combined   0.0000  0.0445"), "{table}");
        assert_eq!(EvalReport::parse_csv(&r.render_csv()).unwrap(), r);
    }
}
