//! Tracker-to-viewer protocol: wire format, sample sources and the
//! latest-sample mailbox.

pub mod mailbox;
pub mod source;
pub mod synth;
pub mod wire;

pub use mailbox::{Mailbox, MailboxWriter};
pub use source::{
    open_pull_source, pump, source_run, LineSource, Pacer, ReplaySource, SampleSource,
    SessionReport, SourceError, SourceSpec, SynthSource, UdpSource, DEFAULT_UDP_PORT,
    FREE_RUNNING_RATE,
};
pub use synth::{TrajectoryKind, TrajectorySpec};
pub use wire::{decode, encode, encode_into, StreamDecoder, WireError, WireMessage};
