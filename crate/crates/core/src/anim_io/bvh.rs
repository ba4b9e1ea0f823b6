//! BVH motion-capture text format.
//!
//! ```text
//! HIERARCHY
//! ROOT Hips
//! {
//!     OFFSET 0 0 0
//!     CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
//!     JOINT Knee
//!     {
//!         OFFSET 0 -40 0
//!         CHANNELS 3 Zrotation Xrotation Yrotation
//!         End Site
//!         {
//!             OFFSET 0 -40 0
//!         }
//!     }
//! }
//! MOTION
//! Frames: 2
//! Frame Time: 0.0333333
//! 0 90 0 0 0 0 10 20 30
//! 0 91 0 0 0 0 11 21 31
//! ```
//!
//! End sites are kept so files round-trip, but carry no channels.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::channel::{unwrap_degrees, Channel};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct BvhError {
    pub line: usize,
    pub kind: BvhErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BvhErrorKind {
    #[error("malformed hierarchy: {0}")]
    MalformedHierarchy(String),
    #[error("CHANNELS declares {declared} channels but lists {listed}")]
    ChannelCountMismatch { declared: usize, listed: usize },
    #[error("frame row has {found} values, skeleton has {expected} channels")]
    RowLengthMismatch { expected: usize, found: usize },
    #[error("missing MOTION section")]
    MissingMotion,
    #[error("Frames: declares {declared} frames but {found} rows are present")]
    FrameCountMismatch { declared: usize, found: usize },
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("frame time must be > 0")]
    InvalidFrameTime,
    #[error("unknown channel label `{0}`")]
    UnknownChannelLabel(String),
}

fn err<T>(line: usize, kind: BvhErrorKind) -> Result<T, BvhError> {
    Err(BvhError { line, kind })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelLabel {
    Xposition,
    Yposition,
    Zposition,
    Xrotation,
    Yrotation,
    Zrotation,
}

impl ChannelLabel {
    pub fn is_rotation(self) -> bool {
        matches!(self, Self::Xrotation | Self::Yrotation | Self::Zrotation)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Xposition => "Xposition",
            Self::Yposition => "Yposition",
            Self::Zposition => "Zposition",
            Self::Xrotation => "Xrotation",
            Self::Yrotation => "Yrotation",
            Self::Zrotation => "Zrotation",
        }
    }
}

impl fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "xposition" => Self::Xposition,
            "yposition" => Self::Yposition,
            "zposition" => Self::Zposition,
            "xrotation" => Self::Xrotation,
            "yrotation" => Self::Yrotation,
            "zrotation" => Self::Zrotation,
            _ => return Err(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint<T: Real = f64> {
    pub name: String,
    pub parent: Option<usize>,
    pub offset: [T; 3],
    pub channels: Vec<ChannelLabel>,
    /// Column of this joint's first channel in each frame row.
    pub first_column: usize,
    pub end_site: Option<[T; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton<T: Real = f64> {
    /// Depth-first order, as declared.
    pub joints: Vec<Joint<T>>,
    pub frame_time: T,
    pub frames: Vec<Vec<T>>,
}

impl<T: Real> Skeleton<T> {
    pub fn channel_count(&self) -> usize {
        self.joints.iter().map(|j| j.channels.len()).sum()
    }

    pub fn joint(&self, name: &str) -> Option<&Joint<T>> {
        self.joints.iter().find(|j| j.name == name)
    }

    /// One column of the motion data as a channel with timestamps
    /// `k * frame_time`. Rotation channels are unwrapped across ±360° jumps.
    pub fn extract_channel(&self, joint: &str, label: &str) -> Result<Channel<T>> {
        let j = self
            .joint(joint)
            .ok_or_else(|| Error::UnknownJoint(joint.to_string()))?;
        let unknown = || Error::UnknownChannel {
            joint: joint.to_string(),
            label: label.to_string(),
        };
        let wanted: ChannelLabel = label.parse().map_err(|_| unknown())?;
        let idx = j.channels.iter().position(|&c| c == wanted).ok_or_else(unknown)?;
        let column = j.first_column + idx;
        let raw: Vec<T> = self.frames.iter().map(|row| row[column]).collect();
        let values = if wanted.is_rotation() {
            unwrap_degrees(&raw)
        } else {
            raw
        };
        Channel::uniform(format!("{joint}:{wanted}"), T::one() / self.frame_time, values)
    }
}

struct Tokens<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    line: usize,
    tok: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.line < self.lines.len() {
            let (no, toks) = &self.lines[self.line];
            if self.tok < toks.len() {
                self.tok += 1;
                return Some((*no, toks[self.tok - 1]));
            }
            self.line += 1;
            self.tok = 0;
        }
        None
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |(n, _)| *n)
    }

    fn expect(&mut self, want: &str) -> Result<usize, BvhError> {
        match self.next() {
            Some((n, t)) if t == want => Ok(n),
            Some((n, t)) => err(
                n,
                BvhErrorKind::MalformedHierarchy(format!("expected `{want}`, found `{t}`")),
            ),
            None => err(
                self.last_line(),
                BvhErrorKind::MalformedHierarchy(format!("expected `{want}`, found end of input")),
            ),
        }
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), BvhError> {
        self.next().map_or_else(
            || {
                err(
                    self.last_line(),
                    BvhErrorKind::MalformedHierarchy(format!("expected {what}, found end of input")),
                )
            },
            Ok,
        )
    }

    fn number<T: Real>(&mut self) -> Result<T, BvhError> {
        let (n, t) = self.word("a number")?;
        t.parse()
            .or_else(|_| err(n, BvhErrorKind::InvalidNumber(t.to_string())))
    }

    fn vec3<T: Real>(&mut self) -> Result<[T; 3], BvhError> {
        Ok([self.number()?, self.number()?, self.number()?])
    }
}

/// Parses BVH text, keeping joint and channel order exactly as declared.
pub fn parse_bvh<T: Real>(text: &str) -> Result<Skeleton<T>, BvhError> {
    let all: Vec<&str> = text.lines().collect();
    let motion_at = all.iter().position(|l| l.trim() == "MOTION");
    let hierarchy_end = motion_at.unwrap_or(all.len());

    let mut tokens = Tokens {
        lines: all[..hierarchy_end]
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect()))
            .collect(),
        line: 0,
        tok: 0,
    };
    tokens.expect("HIERARCHY")?;
    let mut joints = Vec::new();
    let mut columns = 0;
    let (n, root) = tokens.word("ROOT")?;
    if root != "ROOT" {
        return err(
            n,
            BvhErrorKind::MalformedHierarchy(format!("expected `ROOT`, found `{root}`")),
        );
    }
    parse_joint(&mut tokens, None, &mut joints, &mut columns)?;
    if let Some((n, t)) = tokens.next() {
        return err(
            n,
            BvhErrorKind::MalformedHierarchy(format!("unexpected `{t}` after the root joint")),
        );
    }

    let Some(motion_at) = motion_at else {
        return err(all.len().max(1), BvhErrorKind::MissingMotion);
    };
    let mut rows = all
        .iter()
        .enumerate()
        .skip(motion_at + 1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, frames_line) = rows.next().ok_or(BvhError {
        line: motion_at + 1,
        kind: BvhErrorKind::MissingMotion,
    })?;
    let declared = frames_line
        .strip_prefix("Frames:")
        .ok_or_else(|| BvhError {
            line: n,
            kind: BvhErrorKind::MalformedHierarchy("expected `Frames:`".into()),
        })?
        .trim();
    let declared: usize = declared.parse().map_err(|_| BvhError {
        line: n,
        kind: BvhErrorKind::InvalidNumber(declared.to_string()),
    })?;

    let (n, time_line) = rows.next().ok_or(BvhError {
        line: n,
        kind: BvhErrorKind::MissingMotion,
    })?;
    let ft = time_line
        .strip_prefix("Frame Time:")
        .ok_or_else(|| BvhError {
            line: n,
            kind: BvhErrorKind::MalformedHierarchy("expected `Frame Time:`".into()),
        })?
        .trim();
    let frame_time: T = ft.parse().map_err(|_| BvhError {
        line: n,
        kind: BvhErrorKind::InvalidNumber(ft.to_string()),
    })?;
    if !(frame_time > T::zero() && frame_time.is_finite()) {
        return err(n, BvhErrorKind::InvalidFrameTime);
    }

    let mut frames = Vec::with_capacity(declared);
    let mut last_line = n;
    for (n, row) in rows {
        last_line = n;
        let values = row
            .split_whitespace()
            .map(|t| {
                t.parse::<T>().map_err(|_| BvhError {
                    line: n,
                    kind: BvhErrorKind::InvalidNumber(t.to_string()),
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        if values.len() != columns {
            return err(
                n,
                BvhErrorKind::RowLengthMismatch {
                    expected: columns,
                    found: values.len(),
                },
            );
        }
        frames.push(values);
    }
    if frames.len() != declared {
        return err(
            last_line,
            BvhErrorKind::FrameCountMismatch {
                declared,
                found: frames.len(),
            },
        );
    }
    Ok(Skeleton {
        joints,
        frame_time,
        frames,
    })
}

fn parse_joint<T: Real>(
    tokens: &mut Tokens<'_>,
    parent: Option<usize>,
    joints: &mut Vec<Joint<T>>,
    columns: &mut usize,
) -> Result<(), BvhError> {
    let (_, name) = tokens.word("a joint name")?;
    tokens.expect("{")?;
    tokens.expect("OFFSET")?;
    let offset = tokens.vec3()?;
    let (n, kw) = tokens.word("CHANNELS")?;
    if kw != "CHANNELS" {
        return err(
            n,
            BvhErrorKind::MalformedHierarchy(format!("expected `CHANNELS`, found `{kw}`")),
        );
    }
    let (n, count) = tokens.word("a channel count")?;
    let declared: usize = count
        .parse()
        .or_else(|_| err(n, BvhErrorKind::InvalidNumber(count.to_string())))?;
    // labels must sit on the CHANNELS line
    let mut channels = Vec::with_capacity(declared);
    while let Some((no, toks)) = tokens.lines.get(tokens.line) {
        if *no != n || tokens.tok >= toks.len() {
            break;
        }
        let t = toks[tokens.tok];
        tokens.tok += 1;
        channels.push(
            t.parse::<ChannelLabel>()
                .or_else(|t| err(n, BvhErrorKind::UnknownChannelLabel(t)))?,
        );
    }
    if channels.len() != declared {
        return err(
            n,
            BvhErrorKind::ChannelCountMismatch {
                declared,
                listed: channels.len(),
            },
        );
    }
    let index = joints.len();
    joints.push(Joint {
        name: name.to_string(),
        parent,
        offset,
        first_column: *columns,
        channels,
        end_site: None,
    });
    *columns += declared;

    loop {
        let (n, t) = tokens.word("`JOINT`, `End Site` or `}`")?;
        match t {
            "JOINT" => parse_joint(tokens, Some(index), joints, columns)?,
            "End" => {
                tokens.expect("Site")?;
                tokens.expect("{")?;
                tokens.expect("OFFSET")?;
                joints[index].end_site = Some(tokens.vec3()?);
                tokens.expect("}")?;
            }
            "}" => return Ok(()),
            other => {
                return err(
                    n,
                    BvhErrorKind::MalformedHierarchy(format!("unexpected `{other}` in joint `{name}`")),
                );
            }
        }
    }
}

/// Renders a skeleton back to BVH text. Numbers use the shortest decimal
/// form that parses back to the same value.
pub fn serialize_bvh<T: Real>(skeleton: &Skeleton<T>) -> String {
    let mut out = String::from("HIERARCHY\n");
    let children = |p: usize| {
        skeleton
            .joints
            .iter()
            .enumerate()
            .filter(move |(_, j)| j.parent == Some(p))
            .map(|(i, _)| i)
    };
    fn write_joint<T: Real>(
        out: &mut String,
        sk: &Skeleton<T>,
        i: usize,
        depth: usize,
        children: &dyn Fn(usize) -> Vec<usize>,
    ) {
        let pad = "\t".repeat(depth);
        let j = &sk.joints[i];
        let kw = if j.parent.is_none() { "ROOT" } else { "JOINT" };
        let _ = writeln!(out, "{pad}{kw} {}", j.name);
        let _ = writeln!(out, "{pad}{{");
        let _ = writeln!(out, "{pad}\tOFFSET {} {} {}", j.offset[0], j.offset[1], j.offset[2]);
        let labels: Vec<&str> = j.channels.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(out, "{pad}\tCHANNELS {} {}", j.channels.len(), labels.join(" "));
        for c in children(i) {
            write_joint(out, sk, c, depth + 1, children);
        }
        if let Some(e) = j.end_site {
            let _ = writeln!(out, "{pad}\tEnd Site");
            let _ = writeln!(out, "{pad}\t{{");
            let _ = writeln!(out, "{pad}\t\tOFFSET {} {} {}", e[0], e[1], e[2]);
            let _ = writeln!(out, "{pad}\t}}");
        }
        let _ = writeln!(out, "{pad}}}");
    }
    let collect = |p: usize| children(p).collect::<Vec<_>>();
    if let Some(root) = skeleton.joints.iter().position(|j| j.parent.is_none()) {
        write_joint(&mut out, skeleton, root, 0, &collect);
    }
    out.push_str("MOTION\n");
    let _ = writeln!(out, "Frames: {}", skeleton.frames.len());
    let _ = writeln!(out, "Frame Time: {}", skeleton.frame_time);
    for row in &skeleton.frames {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
