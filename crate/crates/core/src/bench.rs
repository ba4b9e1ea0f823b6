//! End-to-end comparison of every smoothing technique on one joined clip,
//! under both the fixed-window and the automatic policy.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::anim_io::{export_csv, join_clips, parse_bvh, synth_benchmark, JoinedBenchmark};
use crate::baselines::{
    crossfade, deadblend, inertialize, window_weight, DeadBlendConfig, InertializeConfig, TransitionSpec,
};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::filter::{HpfParams, OneEuroParams};
use crate::metrics::{mse_window, npss, reference_spectrum, EvalReport, DEFAULT_MSE_WINDOW};
use crate::policy::{
    extract_bounds, run_auto, run_fixed_window, AutoConfig, CrossfadeSmoother, DeadBlendSmoother, DerivativeBounds,
    GainBlendSmoother, HpfSmoother, InertializeSmoother, OneEuroSmoother, PolicyRun, DEFAULT_SAFETY_MARGIN,
};
use crate::tuning::{gb_hpf_defaults, tune_channel, TunedChannel, TuningGain, DEFAULT_POWER_FRACTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technique {
    XFade,
    DeadMan,
    Bollo,
    Hpf,
    GbHpf,
    OneEuro,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::XFade,
        Technique::DeadMan,
        Technique::Bollo,
        Technique::Hpf,
        Technique::GbHpf,
        Technique::OneEuro,
    ];

    /// Row label in the report.
    pub fn label(self) -> &'static str {
        match self {
            Technique::XFade => "XFade",
            Technique::DeadMan => "DeadMan",
            Technique::Bollo => "Bollo",
            Technique::Hpf => "HPF",
            Technique::GbHpf => "GB-HPF",
            Technique::OneEuro => "1EF",
        }
    }

    /// Name used on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Technique::XFade => "xfade",
            Technique::DeadMan => "deadman",
            Technique::Bollo => "bollo",
            Technique::Hpf => "hpf",
            Technique::GbHpf => "gb-hpf",
            Technique::OneEuro => "1ef",
        }
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Technique::ALL
            .into_iter()
            .find(|t| t.key() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                let keys: Vec<_> = Technique::ALL.iter().map(|t| t.key()).collect();
                Error::param(
                    "filters",
                    format!("unknown filter `{s}`, expected one of {}", keys.join(", ")),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    FixedWindow,
    Auto,
}

/// One row of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RosterEntry {
    pub mode: Mode,
    pub technique: Technique,
}

impl RosterEntry {
    pub fn new(technique: Technique, mode: Mode) -> Self {
        Self { mode, technique }
    }

    pub fn label(&self) -> String {
        match self.mode {
            Mode::FixedWindow => self.technique.label().to_string(),
            Mode::Auto => format!("{} Auto", self.technique.label()),
        }
    }
}

impl fmt::Display for RosterEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `techniques × modes` in report order: the fixed-window block, then the
/// automatic block, each in [`Technique::ALL`] order.
pub fn roster(techniques: &[Technique], modes: &[Mode]) -> Vec<RosterEntry> {
    let mut out: Vec<RosterEntry> = techniques
        .iter()
        .flat_map(|&t| modes.iter().map(move |&m| RosterEntry::new(t, m)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The five techniques of the standard table in both modes (ten rows plus
/// the raw splice).
pub fn default_roster() -> Vec<RosterEntry> {
    roster(&Technique::ALL[..5], &[Mode::FixedWindow, Mode::Auto])
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchInput {
    Synthetic {
        seed: u64,
    },
    /// Two BVH files and a `joint:Label` channel selector.
    Bvh {
        clip_a: PathBuf,
        clip_b: PathBuf,
        channel: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub input: BenchInput,
    pub cut_a: usize,
    pub cut_b: usize,
    pub roster: Vec<RosterEntry>,
    /// MSE window length in frames, starting at the joint.
    pub window_frames: usize,
    /// Fixed-window length and blend duration of every technique, seconds.
    pub blend_duration: f64,
    pub gain: TuningGain<f64>,
    pub safety_margin: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            input: BenchInput::Synthetic { seed: 0 },
            cut_a: 2500,
            cut_b: 2500,
            roster: default_roster(),
            window_frames: DEFAULT_MSE_WINDOW,
            blend_duration: 0.3,
            gain: TuningGain::default(),
            safety_margin: DEFAULT_SAFETY_MARGIN,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::param("roster", "must not be empty"));
        }
        if self.window_frames == 0 {
            return Err(Error::param("window_frames", "must be > 0"));
        }
        if !(self.blend_duration > 0.0 && self.blend_duration.is_finite()) {
            return Err(Error::param("blend_duration", "must be finite and > 0"));
        }
        if !(self.gain.gain > 0.0 && self.gain.gain.is_finite()) {
            return Err(Error::param("gain", "must be finite and > 0"));
        }
        if !(self.safety_margin >= 1.0 && self.safety_margin.is_finite()) {
            return Err(Error::param("safety_margin", "must be finite and >= 1"));
        }
        if let BenchInput::Bvh { clip_a, clip_b, .. } = &self.input {
            for p in [clip_a, clip_b] {
                if !p.is_file() {
                    return Err(Error::param("input", format!("{} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }
}

/// Loads one channel of a BVH file. `selector` is `joint:Label`.
pub fn load_bvh_channel(path: &Path, selector: &str) -> Result<Channel<f64>> {
    let (joint, label) = selector
        .split_once(':')
        .ok_or_else(|| Error::param("channel", format!("expected `joint:Label`, got `{selector}`")))?;
    let text = fs::read_to_string(path)?;
    let skeleton = parse_bvh::<f64>(&text).map_err(|source| Error::BvhFile {
        path: path.display().to_string(),
        source,
    })?;
    skeleton.extract_channel(joint, label)
}

/// The two source clips named by `input`.
pub fn load_sources(input: &BenchInput) -> Result<(Channel<f64>, Channel<f64>)> {
    match input {
        BenchInput::Synthetic { seed } => Ok(synth_benchmark(*seed)),
        BenchInput::Bvh {
            clip_a,
            clip_b,
            channel,
        } => Ok((load_bvh_channel(clip_a, channel)?, load_bvh_channel(clip_b, channel)?)),
    }
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigRun {
    pub name: String,
    pub output: Channel<f64>,
    pub active: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub report: EvalReport,
    /// Raw splice first, then the roster in order.
    pub runs: Vec<ConfigRun>,
    pub joined: JoinedBenchmark<f64>,
    pub tuned: TunedChannel<f64>,
    pub bounds: DerivativeBounds<f64>,
}

/// Parameters of the 1 Euro Filter derived from the tuned bounds: the
/// minimum cutoff is `f_c_min` and `beta` reaches `f_c_max` at the library's
/// maximum speed.
pub fn one_euro_from_tuned(params: &HpfParams<f64>) -> Result<OneEuroParams<f64>> {
    let beta = if params.max_abs_dx() > 0.0 {
        (params.f_c_max() - params.f_c_min()) / params.max_abs_dx()
    } else {
        0.0
    };
    OneEuroParams::new(params.f_c_min(), beta, 1.0)
}

fn window_mask(combined: &Channel<f64>, spec: &TransitionSpec<f64>) -> Vec<bool> {
    let t = combined.times();
    let k = spec.trigger_frame;
    (0..combined.len())
        .map(|i| i >= k && window_weight(t[i] - t[k], spec.blend_duration) < 1.0)
        .collect()
}

fn evaluate(entry: RosterEntry, ctx: &Context) -> Result<PolicyRun<f64>> {
    let combined = &ctx.joined.combined;
    let d = ctx.spec.blend_duration;
    let params = ctx.tuned.params;
    let gb = || -> Result<GainBlendSmoother<f64>> {
        Ok(GainBlendSmoother::new(
            gb_hpf_defaults(params.max_abs_dx())?.with_duration(d)?,
        ))
    };
    let baseline = |out: Channel<f64>| PolicyRun {
        active: window_mask(combined, &ctx.spec),
        violations: vec![None; out.len()],
        output: out,
    };
    let auto = AutoConfig::default();
    match (entry.mode, entry.technique) {
        (Mode::FixedWindow, Technique::XFade) => Ok(baseline(crossfade(&ctx.outgoing, combined, &ctx.spec)?)),
        (Mode::FixedWindow, Technique::DeadMan) => Ok(baseline(deadblend(
            &ctx.outgoing,
            combined,
            &ctx.spec,
            DeadBlendConfig::default(),
        )?)),
        (Mode::FixedWindow, Technique::Bollo) => Ok(baseline(inertialize(
            &ctx.outgoing,
            combined,
            &ctx.spec,
            InertializeConfig::default(),
        )?)),
        (Mode::FixedWindow, Technique::Hpf) => run_fixed_window(combined, &ctx.spec, HpfSmoother::new(params)),
        (Mode::FixedWindow, Technique::GbHpf) => run_fixed_window(combined, &ctx.spec, gb()?),
        (Mode::FixedWindow, Technique::OneEuro) => {
            run_fixed_window(combined, &ctx.spec, OneEuroSmoother::new(one_euro_from_tuned(&params)?))
        }
        (Mode::Auto, Technique::XFade) => run_auto(
            combined,
            &ctx.bounds,
            CrossfadeSmoother::new(ctx.outgoing.values().to_vec(), d)?,
            auto,
        ),
        (Mode::Auto, Technique::DeadMan) => run_auto(combined, &ctx.bounds, DeadBlendSmoother::new(d, None)?, auto),
        (Mode::Auto, Technique::Bollo) => run_auto(combined, &ctx.bounds, InertializeSmoother::new(d)?, auto),
        (Mode::Auto, Technique::Hpf) => run_auto(combined, &ctx.bounds, HpfSmoother::new(params), auto),
        (Mode::Auto, Technique::GbHpf) => run_auto(combined, &ctx.bounds, gb()?, auto),
        (Mode::Auto, Technique::OneEuro) => run_auto(
            combined,
            &ctx.bounds,
            OneEuroSmoother::new(one_euro_from_tuned(&params)?),
            auto,
        ),
    }
}

struct Context {
    joined: JoinedBenchmark<f64>,
    outgoing: Channel<f64>,
    spec: TransitionSpec<f64>,
    tuned: TunedChannel<f64>,
    bounds: DerivativeBounds<f64>,
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchOutcome> {
    config.validate()?;
    let (a, b) = load_sources(&config.input)?;
    let tuned = tune_channel(&[a.clone(), b.clone()], DEFAULT_POWER_FRACTION, config.gain)?;
    let bounds = extract_bounds(&[a.clone(), b.clone()], config.safety_margin)?;
    let joined = join_clips(&a, &b, config.cut_a, config.cut_b)?;
    let reference = reference_spectrum(&a, &b)?;
    let ctx = Context {
        outgoing: joined.outgoing()?,
        spec: TransitionSpec::new(joined.joint_frame, config.blend_duration)?,
        joined,
        tuned,
        bounds,
    };
    let target = &ctx.joined.target;
    let k = ctx.joined.joint_frame;

    let mut report = EvalReport::default();
    let mut runs = Vec::with_capacity(config.roster.len() + 1);
    let mut record = |name: String, run: PolicyRun<f64>| -> Result<()> {
        let m = mse_window(&run.output, target, k, config.window_frames)?;
        let n = npss(&run.output, &reference)?;
        report.push(name.clone(), m, n);
        runs.push(ConfigRun {
            name,
            output: run.output,
            active: run.active,
        });
        Ok(())
    };
    let raw = PolicyRun {
        output: ctx.joined.combined.clone(),
        active: vec![false; ctx.joined.combined.len()],
        violations: vec![None; ctx.joined.combined.len()],
    };
    record("Raw Combined".to_string(), raw)?;
    for entry in &config.roster {
        record(entry.label(), evaluate(*entry, &ctx)?)?;
    }
    Ok(BenchOutcome {
        report,
        runs,
        joined: ctx.joined,
        tuned: ctx.tuned,
        bounds: ctx.bounds,
    })
}

/// File-name form of a row label: `GB-HPF Auto` → `gb-hpf-auto`.
pub fn trace_slug(name: &str) -> String {
    name.to_ascii_lowercase().replace(' ', "-")
}

impl BenchOutcome {
    /// Writes `report.txt`, `report.csv` and `traces/<row>.csv` (columns
    /// `time, raw, target, filtered, active`) under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("traces"))?;
        fs::write(dir.join("report.txt"), self.report.render_table())?;
        fs::write(dir.join("report.csv"), self.report.render_csv())?;
        let combined = &self.joined.combined;
        for run in &self.runs {
            let active: Vec<f64> = run.active.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
            export_csv(
                dir.join("traces").join(format!("{}.csv", trace_slug(&run.name))),
                &[
                    ("time", combined.times()),
                    ("raw", combined.values()),
                    ("target", self.joined.target.values()),
                    ("filtered", run.output.values()),
                    ("active", &active),
                ],
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roster_order() {
        let names: Vec<String> = default_roster().iter().map(|e| e.label()).collect();
        assert_eq!(
            names,
            [
                "XFade",
                "DeadMan",
                "Bollo",
                "HPF",
                "GB-HPF",
                "XFade Auto",
                "DeadMan Auto",
                "Bollo Auto",
                "HPF Auto",
                "GB-HPF Auto"
            ]
        );
    }

    #[test]
    fn parse_technique() {
        assert_eq!("GB-HPF".parse::<Technique>().unwrap(), Technique::GbHpf);
        assert_eq!("1ef".parse::<Technique>().unwrap(), Technique::OneEuro);
        assert!("kalman".parse::<Technique>().is_err());
    }

    #[test]
    fn hpf_only_roster() {
        let cfg = BenchConfig {
            roster: roster(&[Technique::Hpf], &[Mode::FixedWindow]),
            ..BenchConfig::default()
        };
        let out = run_bench(&cfg).unwrap();
        let names: Vec<&str> = out.report.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["Raw Combined", "HPF"]);
        assert_eq!(out.report.rows[0].mse, 0.0);
    }

    #[test]
    fn full_roster_has_eleven_rows() {
        let out = run_bench(&BenchConfig::default()).unwrap();
        assert_eq!(out.report.rows.len(), 11);
        assert_eq!(out.report.get("Raw Combined").unwrap().mse, 0.0);
        for r in &out.report.rows {
            assert!(r.mse.is_finite() && r.npss.is_finite() && r.npss >= 0.0, "{r:?}");
        }
    }

    #[test]
    fn validation_names_fields() {
        let cfg = BenchConfig {
            roster: vec![],
            ..BenchConfig::default()
        };
        assert!(run_bench(&cfg).unwrap_err().to_string().contains("roster"));
        let cfg = BenchConfig {
            blend_duration: 0.0,
            ..BenchConfig::default()
        };
        assert!(run_bench(&cfg).unwrap_err().to_string().contains("blend_duration"));
    }
}
