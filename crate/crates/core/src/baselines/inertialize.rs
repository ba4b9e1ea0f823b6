use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_coverage, TransitionSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InertializeConfig {
    /// Capture the offset's initial acceleration. Off by default, in which
    /// case only position and velocity are matched and `a0 = 0`.
    pub capture_acceleration: bool,
}

/// Quintic decay of the source-minus-target offset.
///
/// The offset starts at `(x0, v0, a0)` and reaches zero value, velocity and
/// acceleration at `t1`:
///
/// `x(t) = A t^5 + B t^4 + C t^3 + a0/2 t^2 + v0 t + x0`
///
/// It is evaluated in the equivalent factored form
/// `x(t) = u^3 (c0 + c1 u + c2 u^2)` with `u = t1 - t`, which is exactly zero
/// at `t1` and keeps full relative precision close to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertializerState<T: Real = f64> {
    pub offset_x0: T,
    pub offset_v0: T,
    pub offset_a0: T,
    pub blend_time_t1: T,
    pub elapsed: T,
    pub a: T,
    pub b: T,
    pub c: T,
    factored: [T; 3],
}

impl<T: Real> InertializerState<T> {
    /// Applies the overshoot guards before solving for the coefficients:
    /// a velocity pushing the offset away from zero is dropped, and a
    /// velocity pulling it toward zero shortens `t1` to at most `-5 x0 / v0`.
    pub fn new(x0: T, v0: T, a0: T, t1: T) -> Result<Self> {
        if !(t1 > T::zero() && t1.is_finite()) {
            return Err(Error::param("blend_time_t1", "must be finite and > 0"));
        }
        if !(x0.is_finite() && v0.is_finite() && a0.is_finite()) {
            return Err(Error::InvalidSample(f64::NAN));
        }
        let mut v0 = v0;
        let mut t1 = t1;
        if v0 * x0 > T::zero() {
            v0 = T::zero();
        } else if v0 * x0 < T::zero() {
            t1 = t1.min(T::lit(-5.0) * x0 / v0);
        }
        Ok(Self::solve(x0, v0, a0, t1))
    }

    /// No guards: the quintic through exactly these boundary values.
    pub fn unclamped(x0: T, v0: T, a0: T, t1: T) -> Result<Self> {
        if !(t1 > T::zero() && t1.is_finite()) {
            return Err(Error::param("blend_time_t1", "must be finite and > 0"));
        }
        Ok(Self::solve(x0, v0, a0, t1))
    }

    fn solve(x0: T, v0: T, a0: T, t1: T) -> Self {
        let two = T::lit(2.0);
        let t2 = t1 * t1;
        let t3 = t2 * t1;
        let t4 = t3 * t1;
        let t5 = t4 * t1;
        let a = -(a0 * t2 + T::lit(6.0) * v0 * t1 + T::lit(12.0) * x0) / (two * t5);
        let b = (T::lit(3.0) * a0 * t2 + T::lit(16.0) * v0 * t1 + T::lit(30.0) * x0) / (two * t4);
        let c = -(T::lit(3.0) * a0 * t2 + T::lit(12.0) * v0 * t1 + T::lit(20.0) * x0) / (two * t3);
        // Taylor coefficients around t1 (value, velocity and acceleration vanish there)
        let c0 = -(c + T::lit(4.0) * b * t1 + T::lit(10.0) * a * t2);
        let c1 = b + T::lit(5.0) * a * t1;
        let c2 = -a;
        Self {
            offset_x0: x0,
            offset_v0: v0,
            offset_a0: a0,
            blend_time_t1: t1,
            elapsed: T::zero(),
            a,
            b,
            c,
            factored: [c0, c1, c2],
        }
    }

    /// The quintic itself, valid for any `t` (no clipping at `t1`).
    pub fn polynomial(&self, t: T) -> T {
        let u = self.blend_time_t1 - t;
        let [c0, c1, c2] = self.factored;
        u * u * u * (c0 + u * (c1 + u * c2))
    }

    /// Offset at `t` seconds after the trigger; zero from `t1` on.
    pub fn offset(&self, t: T) -> T {
        if t >= self.blend_time_t1 {
            T::zero()
        } else if t <= T::zero() {
            self.offset_x0
        } else {
            self.polynomial(t)
        }
    }

    pub fn velocity(&self, t: T) -> T {
        if t >= self.blend_time_t1 {
            return T::zero();
        }
        let u = self.blend_time_t1 - t;
        let [c0, c1, c2] = self.factored;
        -(u * u * (T::lit(3.0) * c0 + u * (T::lit(4.0) * c1 + u * T::lit(5.0) * c2)))
    }

    pub fn acceleration(&self, t: T) -> T {
        if t >= self.blend_time_t1 {
            return T::zero();
        }
        let u = self.blend_time_t1 - t;
        let [c0, c1, c2] = self.factored;
        u * (T::lit(6.0) * c0 + u * (T::lit(12.0) * c1 + u * T::lit(20.0) * c2))
    }

    /// Advances `elapsed` by `dt` and returns the offset there.
    pub fn advance(&mut self, dt: T) -> T {
        self.elapsed = (self.elapsed + dt).min(self.blend_time_t1);
        self.offset(self.elapsed)
    }

    pub fn is_finished(&self) -> bool {
        self.elapsed >= self.blend_time_t1
    }
}

/// Inertialized transition: plays `target` plus a decaying offset captured at
/// the trigger.
///
/// The offset velocity is the source's backward difference minus the
/// target's forward difference at the trigger (the new clip's past is not
/// available on the shared timeline).
pub fn inertialize<T: Real>(
    source: &Channel<T>,
    target: &Channel<T>,
    spec: &TransitionSpec<T>,
    config: InertializeConfig,
) -> Result<Channel<T>> {
    let history = if config.capture_acceleration { 2 } else { 1 };
    check_coverage(source, target, spec, history)?;
    let k = spec.trigger_frame;
    let (s, g) = (source.values(), target.values());
    let lookahead = if config.capture_acceleration { 2 } else { 1 };
    if k + lookahead >= g.len() {
        return Err(Error::Coverage(format!(
            "target needs {lookahead} samples after frame {k}"
        )));
    }
    let src_v = (s[k] - s[k - 1]) / source.dt(k);
    let dst_v = (g[k + 1] - g[k]) / target.dt(k + 1);
    let a0 = if config.capture_acceleration {
        let src_a = (src_v - (s[k - 1] - s[k - 2]) / source.dt(k - 1)) / source.dt(k);
        let dst_a = ((g[k + 2] - g[k + 1]) / target.dt(k + 2) - dst_v) / target.dt(k + 1);
        src_a - dst_a
    } else {
        T::zero()
    };
    let state = InertializerState::new(s[k] - g[k], src_v - dst_v, a0, spec.blend_duration)?;
    let t0 = target.times()[k];
    let out = g
        .iter()
        .enumerate()
        .map(|(i, &gi)| {
            if i < k {
                gi
            } else {
                gi + state.offset(target.times()[i] - t0)
            }
        })
        .collect();
    target.with_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Solves the six boundary conditions with Gaussian elimination.
    #[allow(clippy::needless_range_loop)]
    fn quintic_oracle(x0: f64, v0: f64, a0: f64, t1: f64) -> [f64; 6] {
        let mut m = [[0.0f64; 7]; 6];
        // p(0)=x0, p'(0)=v0, p''(0)=a0
        m[0][0] = 1.0;
        m[0][6] = x0;
        m[1][1] = 1.0;
        m[1][6] = v0;
        m[2][2] = 2.0;
        m[2][6] = a0;
        for j in 0..6 {
            m[3][j] = t1.powi(j as i32);
            if j >= 1 {
                m[4][j] = j as f64 * t1.powi(j as i32 - 1);
            }
            if j >= 2 {
                m[5][j] = (j * (j - 1)) as f64 * t1.powi(j as i32 - 2);
            }
        }
        for col in 0..6 {
            let piv = (col..6)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap();
            m.swap(col, piv);
            for r in 0..6 {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for c in col..7 {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        let mut out = [0.0; 6];
        for i in 0..6 {
            out[i] = m[i][6] / m[i][i];
        }
        out
    }

    fn eval(coef: &[f64; 6], t: f64) -> f64 {
        coef.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    #[test]
    fn matches_six_condition_oracle() {
        let s = InertializerState::new(1.0, 0.0, 0.0, 0.5).unwrap();
        let coef = quintic_oracle(1.0, 0.0, 0.0, 0.5);
        for f in 0..=15 {
            let t = f as f64 / 30.0;
            assert!((s.offset(t) - eval(&coef, t)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn general_coefficients_match_oracle() {
        let s = InertializerState::unclamped(0.7, 3.0, -4.0, 0.4).unwrap();
        let coef = quintic_oracle(0.7, 3.0, -4.0, 0.4);
        assert!((s.a - coef[5]).abs() < 1e-9 * coef[5].abs().max(1.0));
        assert!((s.b - coef[4]).abs() < 1e-9 * coef[4].abs().max(1.0));
        assert!((s.c - coef[3]).abs() < 1e-9 * coef[3].abs().max(1.0));
        for f in 0..12 {
            let t = f as f64 / 30.0;
            assert!((s.polynomial(t) - eval(&coef, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_at_t1_is_zero() {
        let s = InertializerState::new(-2.0, 1.0, 0.0, 0.3).unwrap();
        let t1 = s.blend_time_t1;
        assert_eq!(s.polynomial(t1), 0.0);
        assert_eq!(s.velocity(t1 - 1e-300), 0.0);
        assert_eq!(s.offset(t1), 0.0);
    }

    #[test]
    fn zero_offset_is_identity() {
        let src = Channel::uniform("s", 30.0, (0..40).map(|i| i as f64 * 0.2).collect()).unwrap();
        let out = inertialize(
            &src,
            &src,
            &TransitionSpec::new(10, 0.3).unwrap(),
            InertializeConfig::default(),
        )
        .unwrap();
        for (a, b) in out.values().iter().zip(src.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_away_from_target_is_dropped() {
        let s = InertializerState::new(1.0, 2.0, 0.0, 0.5).unwrap();
        assert_eq!(s.offset_v0, 0.0);
        let s = InertializerState::new(1.0, -20.0, 0.0, 0.5).unwrap();
        assert_eq!(s.blend_time_t1, 0.25);
    }

    #[test]
    fn transition_is_exact_after_window() {
        let src = Channel::uniform("s", 30.0, vec![1.0; 40]).unwrap();
        let dst = Channel::uniform("t", 30.0, vec![0.0; 40]).unwrap();
        let out = inertialize(
            &src,
            &dst,
            &TransitionSpec::new(5, 0.3).unwrap(),
            InertializeConfig::default(),
        )
        .unwrap();
        assert_eq!(out.values()[5], 1.0);
        assert!(out.values()[14..].iter().all(|&v| v == 0.0));
        assert!(out.values()[6..14].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn acceleration_capture_needs_lookahead() {
        let c = Channel::uniform("c", 30.0, vec![0.0; 12]).unwrap();
        let cfg = InertializeConfig {
            capture_acceleration: true,
        };
        assert!(inertialize(&c, &c, &TransitionSpec::new(1, 0.1).unwrap(), cfg).is_err());
        assert!(inertialize(&c, &c, &TransitionSpec::new(4, 0.1).unwrap(), cfg).is_ok());
    }
}
