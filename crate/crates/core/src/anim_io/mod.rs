//! Motion data in and out: BVH files, clip joining, the synthetic benchmark
//! generator and CSV traces.

pub mod bvh;
mod csv_io;
mod join;
mod synth;

pub use bvh::{parse_bvh, serialize_bvh, BvhError, BvhErrorKind, ChannelLabel, Joint, Skeleton};
pub use csv_io::{export_csv, import_csv, read_csv, write_csv};
pub use join::{join_clips, JoinedBenchmark};
pub use synth::{synth_benchmark, synth_tones, SynthClip, SYNTH_FRAMES, SYNTH_RATE};
