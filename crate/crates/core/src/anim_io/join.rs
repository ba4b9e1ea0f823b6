use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two clips spliced together at a single frame, the construction used to
/// benchmark discontinuity hiding.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinedBenchmark<T: Real = f64> {
    pub combined: Channel<T>,
    /// Ground truth the filters are scored against: the raw splice itself.
    pub target: Channel<T>,
    /// Index in `combined` of the first sample taken from `source_b`.
    pub joint_frame: usize,
    pub source_a: Channel<T>,
    pub source_b: Channel<T>,
    pub cut_b: usize,
}

impl<T: Real> JoinedBenchmark<T> {
    /// `source_a` laid on the combined timeline: it keeps playing past the
    /// joint (holding its last value if it runs out). Cross-fades blend from
    /// this.
    pub fn outgoing(&self) -> Result<Channel<T>> {
        let a = self.source_a.values();
        let last = *a.last().expect("non-empty source");
        let values = (0..self.combined.len())
            .map(|i| a.get(i).copied().unwrap_or(last))
            .collect();
        self.combined.with_values(values)
    }
}

/// Concatenates `a[..cut_a]` and `b[cut_b..]` on a continuous timeline; the
/// joint frame is `cut_a`.
pub fn join_clips<T: Real>(a: &Channel<T>, b: &Channel<T>, cut_a: usize, cut_b: usize) -> Result<JoinedBenchmark<T>> {
    if cut_a == 0 || cut_a > a.len() {
        return Err(Error::OutOfRange {
            index: cut_a,
            len: a.len(),
        });
    }
    if cut_b >= b.len() {
        return Err(Error::OutOfRange {
            index: cut_b,
            len: b.len(),
        });
    }
    let mut values = a.values()[..cut_a].to_vec();
    values.extend_from_slice(&b.values()[cut_b..]);

    let combined = if a.is_uniform() && b.is_uniform() && a.rate_hint() == b.rate_hint() {
        Channel::uniform_from("joined", a.rate_hint(), a.times()[0], values)?
    } else {
        let mut times = a.times()[..cut_a].to_vec();
        let base = a.times()[cut_a - 1] + b.dt(cut_b);
        let b0 = b.times()[cut_b];
        times.extend(b.times()[cut_b..].iter().map(|&t| base + (t - b0)));
        Channel::new("joined", times, values, a.rate_hint())?
    };
    Ok(JoinedBenchmark {
        target: combined.clone(),
        combined,
        joint_frame: cut_a,
        source_a: a.clone(),
        source_b: b.clone(),
        cut_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_join_is_identity() {
        let a = Channel::uniform("a", 30.0, (0..50).map(|i| (i as f64 * 0.2).sin()).collect()).unwrap();
        let j = join_clips(&a, &a, 20, 20).unwrap();
        assert_eq!(j.combined.values(), a.values());
        assert_eq!(j.combined.times(), a.times());
        assert_eq!(j.joint_frame, 20);
    }

    #[test]
    fn step_construction() {
        let a = Channel::uniform("a", 30.0, vec![0.0; 10]).unwrap();
        let b = Channel::uniform("b", 30.0, vec![1.0; 10]).unwrap();
        let j = join_clips(&a, &b, 4, 2).unwrap();
        assert_eq!(j.combined.len(), 4 + 8);
        assert_eq!(&j.combined.values()[..4], &[0.0; 4]);
        assert_eq!(&j.combined.values()[4..], &[1.0; 8]);
        assert_eq!(j.target, j.combined);
        assert_eq!(j.outgoing().unwrap().values(), &[0.0; 12]);
    }

    #[test]
    fn non_uniform_timeline_stays_increasing() {
        let a = Channel::<f64>::new("a", vec![0.0, 0.1, 0.25, 0.3], vec![1.0, 2.0, 3.0, 4.0], 10.0).unwrap();
        let b = Channel::new("b", vec![5.0, 5.2, 5.3], vec![7.0, 8.0, 9.0], 10.0).unwrap();
        let j = join_clips(&a, &b, 3, 1).unwrap();
        let t = j.combined.times();
        assert_eq!(t.len(), 5);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!((t[3] - 0.45).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_cuts() {
        let a = Channel::uniform("a", 30.0, vec![0.0; 10]).unwrap();
        assert!(join_clips(&a, &a, 0, 0).is_err());
        assert!(join_clips(&a, &a, 11, 0).is_err());
        assert!(join_clips(&a, &a, 5, 10).is_err());
    }
}
