use crate::baselines::{window_weight, DeadBlendExtrapolation, InertializerState};
use crate::error::{Error, Result};
use crate::filter::{blend_toward, HpfParams, HpfState, OneEuroParams, OneEuroState};
use crate::scalar::Real;
use crate::tuning::GainBlendSchedule;

use super::{Activation, Smoother};

/// Half Pound Filter seeded with the last output on activation.
#[derive(Debug, Clone, Copy)]
pub struct HpfSmoother<T: Real = f64> {
    pub params: HpfParams<T>,
    state: HpfState<T>,
}

impl<T: Real> HpfSmoother<T> {
    pub fn new(params: HpfParams<T>) -> Self {
        Self {
            params,
            state: HpfState::new(),
        }
    }

    pub fn state(&self) -> &HpfState<T> {
        &self.state
    }
}

impl<T: Real> Smoother<T> for HpfSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        self.state.seed(ctx.last);
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        self.state.step(&self.params, x, dt)
    }
}

/// Half Pound Filter whose bounds follow a Gain Blend schedule, with
/// progress measured from the latest activation.
#[derive(Debug, Clone, Copy)]
pub struct GainBlendSmoother<T: Real = f64> {
    pub schedule: GainBlendSchedule<T>,
    state: HpfState<T>,
    elapsed: T,
}

impl<T: Real> GainBlendSmoother<T> {
    pub fn new(schedule: GainBlendSchedule<T>) -> Self {
        Self {
            schedule,
            state: HpfState::new(),
            elapsed: T::zero(),
        }
    }

    pub fn elapsed(&self) -> T {
        self.elapsed
    }
}

impl<T: Real> Smoother<T> for GainBlendSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        self.state.seed(ctx.last);
        self.elapsed = T::zero();
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        let params = self.schedule.params_at(self.elapsed);
        let out = self.state.step(&params, x, dt)?;
        self.elapsed = self.elapsed + dt;
        Ok(out)
    }
}

/// 1 Euro Filter seeded with the last output and its velocity.
#[derive(Debug, Clone, Copy)]
pub struct OneEuroSmoother<T: Real = f64> {
    pub params: OneEuroParams<T>,
    state: OneEuroState<T>,
}

impl<T: Real> OneEuroSmoother<T> {
    pub fn new(params: OneEuroParams<T>) -> Self {
        Self {
            params,
            state: OneEuroState::new(),
        }
    }
}

impl<T: Real> Smoother<T> for OneEuroSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        self.state.seed(ctx.last, ctx.exit_velocity());
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        self.state.step(&self.params, x, dt)
    }
}

/// Linear cross-fade from a recorded outgoing stream into the input.
///
/// The outgoing stream is indexed by frame; past its end it holds its last
/// value.
#[derive(Debug, Clone)]
pub struct CrossfadeSmoother<T: Real = f64> {
    outgoing: Vec<T>,
    duration: T,
    frame: usize,
    elapsed: T,
}

impl<T: Real> CrossfadeSmoother<T> {
    pub fn new(outgoing: Vec<T>, duration: T) -> Result<Self> {
        if outgoing.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("blend_duration", "must be finite and > 0"));
        }
        Ok(Self {
            outgoing,
            duration,
            frame: 0,
            elapsed: T::zero(),
        })
    }
}

impl<T: Real> Smoother<T> for CrossfadeSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        self.frame = ctx.frame;
        self.elapsed = T::zero();
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        let src = self.outgoing[self.frame.min(self.outgoing.len() - 1)];
        let w = window_weight(self.elapsed, self.duration);
        self.frame += 1;
        self.elapsed = self.elapsed + dt;
        Ok(if w >= T::one() { x } else { blend_toward(src, x, w) })
    }
}

/// Dead blending from the last output: the output's exit velocity is
/// extrapolated with exponential decay and cross-faded into the input.
#[derive(Debug, Clone, Copy)]
pub struct DeadBlendSmoother<T: Real = f64> {
    duration: T,
    half_life: T,
    ext: Option<DeadBlendExtrapolation<T>>,
    since_anchor: T,
    elapsed: T,
}

impl<T: Real> DeadBlendSmoother<T> {
    /// `half_life: None` uses a quarter of `duration`.
    pub fn new(duration: T, half_life: Option<T>) -> Result<Self> {
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("blend_duration", "must be finite and > 0"));
        }
        let half_life = half_life.unwrap_or(duration / T::lit(4.0));
        if !(half_life >= T::zero()) {
            return Err(Error::param("half_life", "must be >= 0"));
        }
        Ok(Self {
            duration,
            half_life,
            ext: None,
            since_anchor: T::zero(),
            elapsed: T::zero(),
        })
    }
}

impl<T: Real> Smoother<T> for DeadBlendSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        self.ext = Some(DeadBlendExtrapolation::new(
            ctx.last,
            ctx.exit_velocity(),
            self.half_life,
        )?);
        self.since_anchor = T::zero();
        self.elapsed = T::zero();
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        let ext = self
            .ext
            .ok_or_else(|| Error::param("smoother", "stepped before activation"))?;
        self.since_anchor = self.since_anchor + dt;
        let w = window_weight(self.elapsed, self.duration);
        self.elapsed = self.elapsed + dt;
        Ok(if w >= T::one() {
            x
        } else {
            blend_toward(ext.at(self.since_anchor), x, w)
        })
    }
}

/// Inertialization of the offset between the last output, carried forward
/// one step at its exit velocity, and the input.
///
/// The input's own velocity is not known at activation (the previous raw
/// sample belongs to the old clip), so it is taken as zero.
#[derive(Debug, Clone, Copy)]
pub struct InertializeSmoother<T: Real = f64> {
    duration: T,
    state: Option<InertializerState<T>>,
    started: bool,
}

impl<T: Real> InertializeSmoother<T> {
    pub fn new(duration: T) -> Result<Self> {
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::param("blend_duration", "must be finite and > 0"));
        }
        Ok(Self {
            duration,
            state: None,
            started: false,
        })
    }

    pub fn inertializer(&self) -> Option<&InertializerState<T>> {
        self.state.as_ref()
    }
}

impl<T: Real> Smoother<T> for InertializeSmoother<T> {
    fn activate(&mut self, ctx: &Activation<T>) -> Result<()> {
        let v = ctx.exit_velocity();
        let x0 = ctx.last + v * ctx.dt - ctx.x;
        self.state = Some(InertializerState::new(x0, v, T::zero(), self.duration)?);
        self.started = false;
        Ok(())
    }

    fn step(&mut self, x: T, dt: T) -> Result<T> {
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| Error::param("smoother", "stepped before activation"))?;
        let offset = if self.started {
            state.advance(dt)
        } else {
            state.offset(T::zero())
        };
        self.started = true;
        Ok(x + offset)
    }
}
