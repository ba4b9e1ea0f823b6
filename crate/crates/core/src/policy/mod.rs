//! When to smooth: a fixed window after a known cut, or the automatic
//! trigger that watches value, velocity, acceleration and jerk against
//! envelopes learned from the source clips.

mod bounds;
mod smoothers;

use std::io::Write;

use crate::baselines::{window_weight, TransitionSpec};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::filter::{check_dt, check_sample};
use crate::kinematics::stencil;
use crate::scalar::Real;

pub use bounds::{are_in_range, extract_bounds, DerivativeBounds, DEFAULT_SAFETY_MARGIN};
pub use smoothers::{
    CrossfadeSmoother, DeadBlendSmoother, GainBlendSmoother, HpfSmoother, InertializeSmoother, OneEuroSmoother,
};

/// Why a step was active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    Value,
    Velocity,
    Acceleration,
    Jerk,
    /// Everything was back in range but the estimate's acceleration
    /// relative to the raw stream was not.
    Recovery,
    /// Everything was back in range but the estimate and the raw stream
    /// still moved at different speeds.
    VelocityHold,
}

impl Violation {
    /// Derivative order for bound violations, `None` for the hold reasons.
    pub fn order(self) -> Option<usize> {
        match self {
            Violation::Value => Some(0),
            Violation::Velocity => Some(1),
            Violation::Acceleration => Some(2),
            Violation::Jerk => Some(3),
            Violation::Recovery | Violation::VelocityHold => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Violation::Value => "0",
            Violation::Velocity => "1",
            Violation::Acceleration => "2",
            Violation::Jerk => "3",
            Violation::Recovery => "recovery",
            Violation::VelocityHold => "hold",
        }
    }
}

/// What a policy knows at the moment it switches a smoother on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation<T: Real = f64> {
    /// Index of the sample being processed.
    pub frame: usize,
    /// Last output `x̂_{i-1}`.
    pub last: T,
    /// Output before that, `x̂_{i-2}`.
    pub before_last: T,
    /// `t_{i-1} - t_{i-2}`.
    pub last_dt: T,
    /// Incoming raw sample.
    pub x: T,
    pub dt: T,
}

impl<T: Real> Activation<T> {
    /// Velocity of the output just before activation.
    pub fn exit_velocity(&self) -> T {
        (self.last - self.before_last) / self.last_dt
    }
}

/// A filter or transition that a policy can switch on and off.
pub trait Smoother<T: Real> {
    /// Prepares for a run of active steps starting at `ctx.frame`.
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()>;

    /// Output for one active step. The first call after
    /// [`Smoother::activate`] receives `ctx.x` and `ctx.dt`.
    fn step(&mut self, x: T, dt: T) -> Result<T>;

    fn deactivate(&mut self) {}
}

/// Options of the automatic policy beyond the bounds themselves.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AutoConfig<T: Real = f64> {
    /// Keep filtering while `|v_0 - v^t_0|` exceeds this many units/s after
    /// the bounds are satisfied again. Off by default.
    pub velocity_hold: Option<T>,
}

/// One step of the automatic policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoStep<T: Real = f64> {
    pub value: T,
    pub active: bool,
    pub violation: Option<Violation>,
}

/// Trigger-and-recover state for one channel, wrapping the smoother used
/// while active.
#[derive(Debug, Clone)]
pub struct AutoState<S, T: Real = f64> {
    prev_raw: T,
    /// `x̂_{i-1}, x̂_{i-2}, x̂_{i-3}`
    estimates: [T; 3],
    /// `Δt_{i-1}, Δt_{i-2}`
    steps: [T; 2],
    active: bool,
    sample_count: usize,
    config: AutoConfig<T>,
    inner: S,
}

impl<S: Smoother<T>, T: Real> AutoState<S, T> {
    pub fn new(inner: S) -> Self {
        Self::with_config(inner, AutoConfig::default())
    }

    pub fn with_config(inner: S, config: AutoConfig<T>) -> Self {
        Self {
            prev_raw: T::zero(),
            estimates: [T::zero(); 3],
            steps: [T::zero(); 2],
            active: false,
            sample_count: 0,
            config,
            inner,
        }
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// `[x̂_{i-1}, x̂_{i-2}, x̂_{i-3}]`; meaningful once three samples were seen.
    pub fn estimates(&self) -> [T; 3] {
        self.estimates
    }

    pub fn prev_raw(&self) -> T {
        self.prev_raw
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    /// Back to the freshly constructed state, keeping the smoother's
    /// parameters.
    pub fn reset(&mut self) {
        if self.active {
            self.inner.deactivate();
        }
        self.active = false;
        self.sample_count = 0;
    }

    fn update(&mut self, out: T, x: T, dt: T) {
        self.estimates = [out, self.estimates[0], self.estimates[1]];
        self.steps = [dt, self.steps[0]];
        self.prev_raw = x;
        self.sample_count += 1;
    }

    /// Processes one raw sample taken `dt` seconds after the previous one.
    pub fn step(&mut self, bounds: &DerivativeBounds<T>, x: T, dt: T) -> Result<AutoStep<T>> {
        check_dt(dt)?;
        check_sample(x)?;
        if self.sample_count < 3 {
            self.update(x, x, dt);
            return Ok(AutoStep {
                value: x,
                active: false,
                violation: None,
            });
        }
        let [h1, h2, h3] = self.estimates;
        let (v0, a0, jerk) = stencil(x, h1, h2, h3, dt, self.steps[0], self.steps[1]);
        let mut violation = bounds.violation(x, v0, a0, jerk);
        if violation.is_none() && self.active {
            let v_raw = (x - self.prev_raw) / dt;
            let a_rel = (v0 - v_raw) / dt;
            let (lo, hi) = bounds.recovery();
            if a_rel > hi || a_rel < lo {
                violation = Some(Violation::Recovery);
            } else if let Some(limit) = self.config.velocity_hold {
                if (v0 - v_raw).abs() > limit {
                    violation = Some(Violation::VelocityHold);
                }
            }
        }
        let active = violation.is_some();
        if !active {
            if self.active {
                self.inner.deactivate();
            }
            self.active = false;
            self.update(x, x, dt);
            return Ok(AutoStep {
                value: x,
                active: false,
                violation: None,
            });
        }
        if !self.active {
            self.inner.activate(&Activation {
                frame: self.sample_count,
                last: h1,
                before_last: h2,
                last_dt: self.steps[0],
                x,
                dt,
            })?;
            self.active = true;
        }
        let out = self.inner.step(x, dt)?;
        self.update(out, x, dt);
        Ok(AutoStep {
            value: out,
            active: true,
            violation,
        })
    }
}

/// The automatic policy around a Half Pound Filter.
pub type AutoHpfState<T = f64> = AutoState<HpfSmoother<T>, T>;

/// One step of the automatic policy with a Half Pound Filter (fixed bounds
/// or a Gain Blend schedule, depending on the smoother).
pub fn auto_hpf_step<S: Smoother<T>, T: Real>(
    state: &mut AutoState<S, T>,
    bounds: &DerivativeBounds<T>,
    x: T,
    dt: T,
) -> Result<(T, bool)> {
    let s = state.step(bounds, x, dt)?;
    Ok((s.value, s.active))
}

/// A whole channel pushed through a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun<T: Real = f64> {
    pub output: Channel<T>,
    pub active: Vec<bool>,
    pub violations: Vec<Option<Violation>>,
}

impl<T: Real> PolicyRun<T> {
    /// Frames where the policy switched on.
    pub fn onsets(&self) -> Vec<usize> {
        (0..self.active.len())
            .filter(|&i| self.active[i] && (i == 0 || !self.active[i - 1]))
            .collect()
    }

    pub fn active_frames(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// `frame,active,violated_order` rows.
    pub fn write_trace<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["frame", "active", "violated_order"])?;
        for (i, (a, v)) in self.active.iter().zip(&self.violations).enumerate() {
            w.write_record([
                i.to_string(),
                u8::from(*a).to_string(),
                v.map_or(String::new(), |v| v.label().to_string()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the automatic policy over a whole channel.
pub fn run_auto<S: Smoother<T>, T: Real>(
    input: &Channel<T>,
    bounds: &DerivativeBounds<T>,
    smoother: S,
    config: AutoConfig<T>,
) -> Result<PolicyRun<T>> {
    let mut state = AutoState::with_config(smoother, config);
    let mut values = Vec::with_capacity(input.len());
    let mut active = Vec::with_capacity(input.len());
    let mut violations = Vec::with_capacity(input.len());
    for (dt, x) in input.steps() {
        let s = state.step(bounds, x, dt)?;
        values.push(s.value);
        active.push(s.active);
        violations.push(s.violation);
    }
    Ok(PolicyRun {
        output: input.with_values(values)?,
        active,
        violations,
    })
}

/// Runs `smoother` from `spec.trigger_frame` for `spec.blend_duration`
/// seconds and passes the input through everywhere else.
///
/// The smoother is activated with the two samples before the trigger as its
/// history, so at least two are required.
pub fn run_fixed_window<S: Smoother<T>, T: Real>(
    input: &Channel<T>,
    spec: &TransitionSpec<T>,
    mut smoother: S,
) -> Result<PolicyRun<T>> {
    let k = spec.trigger_frame;
    if k >= input.len() {
        return Err(Error::OutOfRange {
            index: k,
            len: input.len(),
        });
    }
    if k < 2 {
        return Err(Error::Coverage(format!(
            "trigger frame {k} leaves fewer than 2 samples before it"
        )));
    }
    let (x, times) = (input.values(), input.times());
    let mut values = x[..k].to_vec();
    let mut active = vec![false; k];
    smoother.activate(&Activation {
        frame: k,
        last: x[k - 1],
        before_last: x[k - 2],
        last_dt: input.dt(k - 1),
        x: x[k],
        dt: input.dt(k),
    })?;
    let mut running = true;
    for i in k..x.len() {
        if running && window_weight(times[i] - times[k], spec.blend_duration) >= T::one() {
            smoother.deactivate();
            running = false;
        }
        if running {
            values.push(smoother.step(x[i], input.dt(i))?);
        } else {
            values.push(x[i]);
        }
        active.push(running);
    }
    if running {
        smoother.deactivate();
    }
    let violations = vec![None; x.len()];
    Ok(PolicyRun {
        output: input.with_values(values)?,
        active,
        violations,
    })
}
