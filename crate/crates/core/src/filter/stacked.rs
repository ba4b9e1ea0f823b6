use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_dt, check_sample, HpfParams, HpfState};

/// One [`HpfParams`] per derivative order: level 0 filters the signal,
/// level 1 its velocity, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedParams<T: Real = f64> {
    levels: Vec<HpfParams<T>>,
}

impl<T: Real> StackedParams<T> {
    pub fn new(levels: Vec<HpfParams<T>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::param("levels", "at least one level is required"));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[HpfParams<T>] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Stack of Half Pound Filters.
///
/// Level `k` receives the finite-difference derivative of level `k - 1`'s
/// input against level `k - 1`'s previous estimate, and its smoothed output
/// replaces the raw speed that drives level `k - 1`'s cutoff. Only level 0
/// reconstructs the signal; the higher levels shape the speed measure. The
/// top level is driven by its own raw finite difference, so a one-level
/// stack is exactly the plain filter.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedState<T: Real = f64> {
    levels: Vec<HpfState<T>>,
    scratch: Vec<T>,
}

impl<T: Real> StackedState<T> {
    pub fn new(depth: usize) -> Self {
        Self {
            levels: vec![HpfState::new(); depth],
            scratch: Vec::with_capacity(depth),
        }
    }

    pub fn for_params(params: &StackedParams<T>) -> Self {
        Self::new(params.depth())
    }

    /// Latest estimate of level `k` (level 0 is the filtered signal).
    pub fn level_estimate(&self, k: usize) -> Option<T> {
        self.levels.get(k).and_then(HpfState::estimate)
    }

    pub fn reset(&mut self) {
        self.levels.iter_mut().for_each(HpfState::reset);
    }

    pub fn step(&mut self, params: &StackedParams<T>, x: T, dt: T) -> Result<T> {
        check_dt(dt)?;
        check_sample(x)?;
        if self.levels.len() != params.depth() {
            return Err(Error::param(
                "levels",
                format!("state depth {} != params depth {}", self.levels.len(), params.depth()),
            ));
        }

        // raw inputs per level, up to the first uninitialized level
        let inputs = &mut self.scratch;
        inputs.clear();
        inputs.push(x);
        for k in 1..self.levels.len() {
            match self.levels[k - 1].estimate() {
                Some(prev) => {
                    let below = inputs[k - 1];
                    inputs.push((below - prev) / dt);
                }
                None => break,
            }
        }

        let top = inputs.len() - 1;
        let mut speed_from_above: Option<T> = None;
        for k in (0..=top).rev() {
            let input = inputs[k];
            let level = &mut self.levels[k];
            let out = match (level.estimate(), speed_from_above) {
                (None, _) => {
                    level.seed(input);
                    input
                }
                (Some(prev), None) => {
                    let speed = (input - prev) / dt;
                    level.step_with_speed(&params.levels[k], input, dt, speed)?
                }
                (Some(_), Some(speed)) => level.step_with_speed(&params.levels[k], input, dt, speed)?,
            };
            speed_from_above = Some(out);
        }
        Ok(speed_from_above.expect("level 0 always runs"))
    }
}
