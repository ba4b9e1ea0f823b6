//! Tuned parameters on disk, as TOML keyed by channel name:
//!
//! ```toml
//! [channels."knee:Xrotation"]
//! f_c_min = 0.41
//! f_c_max = 4.5
//! max_abs_dx = 512.0
//!
//! [channels."knee:Xrotation".bounds]
//! value = [-12.0, 181.0]
//! velocity = [-540.0, 530.0]
//! acceleration = [-7100.0, 7000.0]
//! jerk = [-2.1e5, 2.0e5]
//! recovery_acceleration = [-7100.0, 7000.0]
//! ```
//!
//! `bounds` is optional; only the automatic policy needs it.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::HpfParams;
use crate::policy::DerivativeBounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsEntry {
    pub value: [f64; 2],
    pub velocity: [f64; 2],
    pub acceleration: [f64; 2],
    pub jerk: [f64; 2],
    pub recovery_acceleration: [f64; 2],
}

impl BoundsEntry {
    pub fn from_bounds(b: &DerivativeBounds<f64>) -> Self {
        let o = |k: usize| [b.order(k).0, b.order(k).1];
        Self {
            value: o(0),
            velocity: o(1),
            acceleration: o(2),
            jerk: o(3),
            recovery_acceleration: [b.recovery().0, b.recovery().1],
        }
    }

    pub fn to_bounds(&self) -> Result<DerivativeBounds<f64>> {
        let p = |[lo, hi]: [f64; 2]| (lo, hi);
        DerivativeBounds::new(
            [p(self.value), p(self.velocity), p(self.acceleration), p(self.jerk)],
            p(self.recovery_acceleration),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub f_c_min: f64,
    pub f_c_max: f64,
    pub max_abs_dx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsEntry>,
}

impl ChannelParams {
    pub fn new(params: &HpfParams<f64>, bounds: Option<&DerivativeBounds<f64>>) -> Self {
        Self {
            f_c_min: params.f_c_min(),
            f_c_max: params.f_c_max(),
            max_abs_dx: params.max_abs_dx(),
            bounds: bounds.map(BoundsEntry::from_bounds),
        }
    }

    pub fn hpf_params(&self) -> Result<HpfParams<f64>> {
        HpfParams::new(self.f_c_min, self.f_c_max, self.max_abs_dx)
    }

    pub fn derivative_bounds(&self) -> Option<Result<DerivativeBounds<f64>>> {
        self.bounds.as_ref().map(BoundsEntry::to_bounds)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(default)]
    pub channels: BTreeMap<String, ChannelParams>,
}

impl ParamFile {
    pub fn insert(&mut self, name: impl Into<String>, params: ChannelParams) {
        self.channels.insert(name.into(), params);
    }

    pub fn channel(&self, name: &str) -> Result<&ChannelParams> {
        self.channels
            .get(name)
            .ok_or_else(|| Error::ParamFile(format!("no parameters for channel `{name}`")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::ParamFile(e.to_string()))
    }

    /// Parses and validates every entry.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: Self = toml::from_str(text).map_err(|e| Error::ParamFile(e.to_string()))?;
        for (name, c) in &file.channels {
            let ctx = |e: Error| Error::ParamFile(format!("channel `{name}`: {e}"));
            c.hpf_params().map_err(ctx)?;
            if let Some(b) = c.derivative_bounds() {
                b.map_err(ctx)?;
            }
        }
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::ParamFile(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }
}
