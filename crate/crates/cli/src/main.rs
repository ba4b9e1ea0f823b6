use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use halfpound::anim_io::{import_csv, parse_bvh, synth_benchmark, write_csv, Skeleton};
use halfpound::baselines::TransitionSpec;
use halfpound::bench::{one_euro_from_tuned, roster, run_bench, BenchConfig, BenchInput, Mode, Technique};
use halfpound::filter::{HalfPoundFilter, HpfParams, HpfState, OneEuroFilter};
use halfpound::metrics::EvalReport;
use halfpound::params_file::{ChannelParams, ParamFile};
use halfpound::policy::{
    extract_bounds, run_auto, run_fixed_window, AutoConfig, GainBlendSmoother, HpfSmoother, OneEuroSmoother, PolicyRun,
    DEFAULT_SAFETY_MARGIN,
};
use halfpound::tuning::{gb_hpf_defaults, scan_extrema, tune_channel, TuningGain, DEFAULT_POWER_FRACTION};
use halfpound::{Channel, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

/// Channel key used for the synthetic benchmark in parameter files.
const SYNTHETIC_CHANNEL: &str = "synthetic";

#[derive(Parser)]
#[command(
    name = "halfpound",
    version,
    about = "Tune, run and benchmark Half Pound Filters on animation channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate filter parameters and derivative bounds from clips.
    Tune(TuneArgs),
    /// Run the transition benchmark and write the report and traces.
    Bench(BenchArgs),
    /// Filter one channel and write time, raw, filtered, active rows.
    Filter(FilterArgs),
    /// Show per-row differences between two report CSV files.
    Compare(CompareArgs),
}

#[derive(clap::Args)]
struct TuneArgs {
    /// BVH or CSV clips; every clip contributes to every channel.
    #[arg(long, conflicts_with = "seed")]
    input: Vec<PathBuf>,
    /// Tune the two synthetic benchmark clips of this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `joint:Label` for BVH, column name for CSV. Default: every channel.
    #[arg(long)]
    channel: Vec<String>,
    /// Multiplier on both estimated cutoffs.
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    /// Symmetric widening of the derivative bounds.
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    margin: f64,
    /// Parameter file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutoSelect {
    /// Fixed-window and automatic rows.
    Both,
    /// Fixed-window rows only.
    Off,
    /// Automatic rows only.
    Only,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Two BVH clips: the outgoing clip, then the incoming one.
    #[arg(long, num_args = 1, conflicts_with = "seed")]
    input: Vec<PathBuf>,
    /// Synthetic benchmark seed, used when no inputs are given.
    #[arg(long)]
    seed: Option<u64>,
    /// `joint:Label` channel of the BVH inputs.
    #[arg(long)]
    channel: Option<String>,
    /// Cut frame in the first clip, optionally followed by the cut frame in the second.
    #[arg(long, num_args = 1..=2, default_values_t = [2500])]
    join_frame: Vec<usize>,
    /// Techniques: xfade, deadman, bollo, hpf, gb-hpf, 1ef.
    #[arg(long, value_delimiter = ',', default_value = "xfade,deadman,bollo,hpf,gb-hpf")]
    filters: Vec<Technique>,
    /// Which trigger modes to run.
    #[arg(long, value_enum, default_value_t = AutoSelect::Both)]
    auto: AutoSelect,
    /// MSE window in frames, starting at the joint.
    #[arg(long, default_value_t = halfpound::metrics::DEFAULT_MSE_WINDOW)]
    window_frames: usize,
    /// Fixed-window length and blend duration, seconds.
    #[arg(long, default_value_t = 0.3)]
    blend_duration: f64,
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterMode {
    Hpf,
    GbHpf,
    #[value(name = "1ef")]
    OneEuro,
    Auto,
    GbHpfAuto,
}

#[derive(clap::Args)]
struct FilterArgs {
    /// BVH or CSV clip. CSV needs a `time` column.
    #[arg(long)]
    input: PathBuf,
    /// `joint:Label` for BVH, column name for CSV.
    #[arg(long)]
    channel: Option<String>,
    #[arg(long, value_enum)]
    mode: FilterMode,
    /// Parameter file from `tune`. Optional for gb-hpf.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Entry of the parameter file to use. Default: the channel's name.
    #[arg(long)]
    params_channel: Option<String>,
    /// Smooth only a fixed window starting at this frame.
    #[arg(long)]
    join_frame: Option<usize>,
    /// Fixed-window length and Gain Blend duration, seconds.
    #[arg(long, default_value_t = 0.3)]
    blend_duration: f64,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// Baseline report CSV, then the report to compare against it.
    #[arg(long, num_args = 1, required = true)]
    input: Vec<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tune(a) => tune(a),
        Command::Bench(a) => bench(a),
        Command::Filter(a) => filter(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parse_error() { EXIT_PARSE } else { EXIT_RUNTIME })
        }
    }
}

fn is_bvh(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bvh"))
}

fn read_skeleton(path: &Path) -> halfpound::Result<Skeleton<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_bvh(&text).map_err(|source| Error::BvhFile {
        path: path.display().to_string(),
        source,
    })
}

/// CSV columns other than `time`, as channels on the `time` column.
fn read_csv_channels(path: &Path) -> halfpound::Result<Vec<Channel<f64>>> {
    let columns = import_csv::<f64>(path).map_err(|e| match e {
        Error::Csv(c) => Error::Input(format!("{}: {c}", path.display())),
        other => other,
    })?;
    let times = columns
        .iter()
        .find(|(n, _)| n == "time")
        .map(|(_, t)| t.clone())
        .ok_or_else(|| Error::Input(format!("{}: no `time` column", path.display())))?;
    let rate = match (times.first(), times.last()) {
        (Some(a), Some(b)) if times.len() > 1 && b > a => (times.len() - 1) as f64 / (b - a),
        _ => 1.0,
    };
    columns
        .into_iter()
        .filter(|(n, _)| n != "time")
        .map(|(n, v)| Channel::new(n, times.clone(), v, rate))
        .collect()
}

fn all_bvh_selectors(sk: &Skeleton<f64>) -> Vec<String> {
    sk.joints
        .iter()
        .flat_map(|j| j.channels.iter().map(move |c| format!("{}:{}", j.name, c.as_str())))
        .collect()
}

/// Clips of every named channel across all inputs, keyed by channel name.
fn load_library(inputs: &[PathBuf], selectors: &[String]) -> CliResult<Vec<(String, Vec<Channel<f64>>)>> {
    let mut library: Vec<(String, Vec<Channel<f64>>)> = Vec::new();
    let mut add = |c: Channel<f64>| match library.iter_mut().find(|(n, _)| n == c.name()) {
        Some((_, clips)) => clips.push(c),
        None => library.push((c.name().to_string(), vec![c])),
    };
    for path in inputs {
        if is_bvh(path) {
            let sk = read_skeleton(path)?;
            let wanted = if selectors.is_empty() {
                all_bvh_selectors(&sk)
            } else {
                selectors.to_vec()
            };
            for sel in &wanted {
                let (joint, label) = sel
                    .split_once(':')
                    .ok_or_else(|| Failure::Usage(format!("channel `{sel}` must be `joint:Label` for BVH input")))?;
                add(sk.extract_channel(joint, label)?);
            }
        } else {
            let channels = read_csv_channels(path)?;
            for sel in selectors {
                if !channels.iter().any(|c| c.name() == sel) {
                    return Err(Error::Input(format!("{}: no column `{sel}`", path.display())).into());
                }
            }
            for c in channels {
                if selectors.is_empty() || selectors.iter().any(|s| s == c.name()) {
                    add(c);
                }
            }
        }
    }
    Ok(library)
}

fn tune(args: TuneArgs) -> CliResult {
    let library = match args.seed {
        Some(seed) => {
            if args.channel.len() > 1 {
                return Err(Failure::Usage("synthetic input has a single channel".into()));
            }
            let (a, b) = synth_benchmark::<f64>(seed);
            let name = args.channel.first().map_or(SYNTHETIC_CHANNEL, String::as_str);
            vec![(name.to_string(), vec![a, b])]
        }
        None if args.input.is_empty() => return Err(Failure::Usage("tune needs --input or --seed".into())),
        None => load_library(&args.input, &args.channel)?,
    };
    let gain = TuningGain {
        gain: args.gain,
        ..TuningGain::default()
    };
    let implicit = args.channel.is_empty() && args.seed.is_none();
    let mut file = ParamFile::default();
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{:<28} {:>10} {:>10} {:>12}",
        "channel", "f_c_min", "f_c_max", "max|dx|"
    );
    for (name, clips) in &library {
        let tuned = tune_channel(clips, DEFAULT_POWER_FRACTION, gain)
            .and_then(|t| Ok((t, extract_bounds(clips, args.margin)?)));
        let (tuned, bounds) = match tuned {
            Ok(v) => v,
            // constant or too-short channels of a whole skeleton are skipped
            Err(e @ (Error::DegenerateChannel(_) | Error::InsufficientSamples { .. })) if implicit => {
                eprintln!("skipping {name}: {e}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let p = tuned.params;
        let _ = writeln!(
            summary,
            "{name:<28} {:>10.4} {:>10.4} {:>12.4}",
            p.f_c_min(),
            p.f_c_max(),
            p.max_abs_dx()
        );
        file.insert(name.clone(), ChannelParams::new(&p, Some(&bounds)));
    }
    if file.channels.is_empty() {
        return Err(Error::DegenerateChannel("no tunable channel in the inputs".into()).into());
    }
    file.save(&args.out)?;
    print!("{summary}");
    println!("wrote {}", args.out.display());
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let input = match (args.input.as_slice(), args.seed) {
        ([], seed) => BenchInput::Synthetic {
            seed: seed.unwrap_or(0),
        },
        ([a, b], _) => BenchInput::Bvh {
            clip_a: a.clone(),
            clip_b: b.clone(),
            channel: args
                .channel
                .clone()
                .ok_or_else(|| Failure::Usage("BVH inputs need --channel joint:Label".into()))?,
        },
        _ => {
            return Err(Failure::Usage(
                "bench needs exactly two --input clips or a --seed".into(),
            ))
        }
    };
    let modes: &[Mode] = match args.auto {
        AutoSelect::Both => &[Mode::FixedWindow, Mode::Auto],
        AutoSelect::Off => &[Mode::FixedWindow],
        AutoSelect::Only => &[Mode::Auto],
    };
    if args.filters.is_empty() {
        return Err(Failure::Usage("--filters must name at least one technique".into()));
    }
    let cut_a = args.join_frame[0];
    let config = BenchConfig {
        input,
        cut_a,
        cut_b: args.join_frame.get(1).copied().unwrap_or(cut_a),
        roster: roster(&args.filters, modes),
        window_frames: args.window_frames,
        blend_duration: args.blend_duration,
        gain: TuningGain {
            gain: args.gain,
            ..TuningGain::default()
        },
        ..BenchConfig::default()
    };
    let outcome = run_bench(&config)?;
    outcome.write(&args.out)?;
    print!("{}", outcome.report.render_table());
    println!("wrote {}", args.out.display());
    Ok(())
}

fn load_filter_channel(path: &Path, selector: Option<&str>) -> CliResult<Channel<f64>> {
    if is_bvh(path) {
        let sel = selector.ok_or_else(|| Failure::Usage("BVH input needs --channel joint:Label".into()))?;
        let (joint, label) = sel
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("channel `{sel}` must be `joint:Label`")))?;
        return Ok(read_skeleton(path)?.extract_channel(joint, label)?);
    }
    let mut channels = read_csv_channels(path)?;
    let idx = match selector {
        Some(name) => channels
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| Error::Input(format!("{}: no column `{name}`", path.display())))?,
        None if channels.len() == 1 => 0,
        None => return Err(Failure::Usage("CSV input with several columns needs --channel".into())),
    };
    Ok(channels.swap_remove(idx))
}

fn filter(args: FilterArgs) -> CliResult {
    let channel = load_filter_channel(&args.input, args.channel.as_deref())?;
    let params = match &args.params {
        Some(p) => {
            let key = args.params_channel.as_deref().unwrap_or(channel.name());
            Some(ParamFile::load(p)?.channel(key)?.clone())
        }
        None if args.mode == FilterMode::GbHpf => None,
        None => return Err(Failure::Usage("this mode needs --params".into())),
    };
    let hpf = || -> CliResult<HpfParams<f64>> {
        params
            .as_ref()
            .map(|p| p.hpf_params())
            .expect("params present for this mode")
            .map_err(Failure::from)
    };
    let bounds = || -> CliResult<_> {
        let entry = params.as_ref().expect("params present for this mode");
        match entry.derivative_bounds() {
            Some(b) => Ok(b?),
            None => Err(Error::ParamFile(format!("channel `{}` has no bounds", channel.name())).into()),
        }
    };
    let max_abs_dx = match &params {
        Some(p) => p.max_abs_dx,
        None => scan_extrema(&channel)?.max_abs_dx,
    };
    let schedule = gb_hpf_defaults(max_abs_dx)?.with_duration(args.blend_duration)?;
    let window = args
        .join_frame
        .map(|k| TransitionSpec::new(k, args.blend_duration))
        .transpose()?;

    let run = match (args.mode, window) {
        (FilterMode::Auto, _) => run_auto(&channel, &bounds()?, HpfSmoother::new(hpf()?), AutoConfig::default())?,
        (FilterMode::GbHpfAuto, _) => run_auto(
            &channel,
            &bounds()?,
            GainBlendSmoother::new(schedule),
            AutoConfig::default(),
        )?,
        (FilterMode::Hpf, Some(w)) => run_fixed_window(&channel, &w, HpfSmoother::new(hpf()?))?,
        (FilterMode::GbHpf, Some(w)) => run_fixed_window(&channel, &w, GainBlendSmoother::new(schedule))?,
        (FilterMode::OneEuro, Some(w)) => {
            run_fixed_window(&channel, &w, OneEuroSmoother::new(one_euro_from_tuned(&hpf()?)?))?
        }
        (FilterMode::Hpf, None) => everywhere(HalfPoundFilter::filter_channel(hpf()?, &channel)?),
        (FilterMode::GbHpf, None) => {
            let mut state = HpfState::new();
            let mut elapsed = 0.0;
            let mut out = Vec::with_capacity(channel.len());
            for (dt, x) in channel.steps() {
                out.push(state.step(&schedule.params_at(elapsed), x, dt)?);
                elapsed += dt;
            }
            everywhere(channel.with_values(out)?)
        }
        (FilterMode::OneEuro, None) => {
            let mut f = OneEuroFilter::new(one_euro_from_tuned(&hpf()?)?);
            let out = channel
                .steps()
                .map(|(dt, x)| f.filter(x, dt))
                .collect::<Result<Vec<_>, _>>()?;
            everywhere(channel.with_values(out)?)
        }
    };

    let active: Vec<f64> = run.active.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    let columns: [(&str, &[f64]); 4] = [
        ("time", channel.times()),
        ("raw", channel.values()),
        ("filtered", run.output.values()),
        ("active", &active),
    ];
    match &args.out {
        Some(path) => write_csv(std::fs::File::create(path).map_err(Error::from)?, &columns)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, &columns)?;
            lock.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn everywhere(output: Channel<f64>) -> PolicyRun<f64> {
    let n = output.len();
    PolicyRun {
        output,
        active: vec![true; n],
        violations: vec![None; n],
    }
}

fn compare(args: CompareArgs) -> CliResult {
    let [base, other] = args.input.as_slice() else {
        return Err(Failure::Usage("compare needs exactly two --input reports".into()));
    };
    let load = |p: &Path| -> CliResult<EvalReport> {
        let text = std::fs::read_to_string(p).map_err(Error::from)?;
        EvalReport::parse_csv(&text).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{}: {m}", p.display())).into(),
            other => other.into(),
        })
    };
    let (a, b) = (load(base)?, load(other)?);
    let mut names: Vec<&str> = a.rows.iter().map(|r| r.name.as_str()).collect();
    for r in &b.rows {
        if !names.contains(&r.name.as_str()) {
            names.push(&r.name);
        }
    }
    let w = names.iter().map(|n| n.len()).chain([4]).max().unwrap_or(4);
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    let delta = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => format!("{:+.4}", y - x),
        _ => "-".to_string(),
    };
    println!(
        "{:<w$}  {:>9} {:>9} {:>9}  {:>9} {:>9} {:>9}",
        "Name", "MSE a", "MSE b", "dMSE", "NPSS a", "NPSS b", "dNPSS"
    );
    for name in names {
        let (ra, rb) = (a.get(name), b.get(name));
        let (ma, mb) = (ra.map(|r| r.mse), rb.map(|r| r.mse));
        let (na, nb) = (ra.map(|r| r.npss), rb.map(|r| r.npss));
        println!(
            "{name:<w$}  {:>9} {:>9} {:>9}  {:>9} {:>9} {:>9}",
            cell(ma),
            cell(mb),
            delta(ma, mb),
            cell(na),
            cell(nb),
            delta(na, nb)
        );
    }
    Ok(())
}
