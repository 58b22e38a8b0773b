//! Eye-sample sources: UDP datagrams, stdin lines, replay files and synthetic
//! trajectories.
//!
//! Replay and synthetic sources can be pulled directly through
//! [`SampleSource`]; every source can also be run into a mailbox with
//! [`source_run`].

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::net::{SocketAddr, UdpSocket};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use crate::gaze::EyeSample;
use crate::protocol::mailbox::MailboxWriter;
use crate::protocol::synth::{TrajectoryKind, TrajectorySpec};
use crate::protocol::wire::{StreamDecoder, WireError};

pub const DEFAULT_UDP_PORT: u16 = 9870;

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("cannot bind UDP port {port}: {source}")]
    BindFailed {
        port: u16,
        #[source]
        source: io::Error,
    },
    #[error("replay file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("invalid tracker source {spec:?}: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Message counts for one source session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionReport {
    pub accepted: u64,
    pub malformed: u64,
    pub stale: u64,
}

impl SessionReport {
    fn record(&mut self, r: &Result<EyeSample, WireError>) {
        match r {
            Ok(_) => self.accepted += 1,
            Err(WireError::Malformed(e)) => {
                log::debug!("dropping malformed message: {e}");
                self.malformed += 1
            }
            Err(WireError::Stale { .. }) => self.stale += 1,
        }
    }
}

/// Which tracker feeds the viewer.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Udp { port: u16 },
    Stdin,
    Replay { path: PathBuf, realtime: bool },
    Synth { trajectory: TrajectorySpec, paced: bool },
}

impl SourceSpec {
    /// Live sources deliver samples on their own clock and need an ingestion
    /// thread; the rest can be pulled in lockstep with rendering.
    pub fn is_live(&self) -> bool {
        matches!(self, Self::Udp { .. } | Self::Stdin)
    }
}

impl FromStr for SourceSpec {
    type Err = SourceError;

    /// `udp:PORT`, `stdin`, `replay:PATH[,realtime]` or
    /// `synth:KIND,AMP,PERIOD,SEP,RATE,DURATION[,fast]`. A rate of 0 is
    /// shorthand for an unpaced stream stamped at [`FREE_RUNNING_RATE`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = |reason: String| SourceError::InvalidSpec {
            spec: s.to_owned(),
            reason,
        };
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "stdin" if rest.is_empty() => Ok(Self::Stdin),
            "udp" => {
                let port = if rest.is_empty() {
                    DEFAULT_UDP_PORT
                } else {
                    rest.parse().map_err(|e| invalid(format!("bad port: {e}")))?
                };
                Ok(Self::Udp { port })
            }
            "replay" => {
                let (path, realtime) = match rest.rsplit_once(',') {
                    Some((p, "realtime")) => (p, true),
                    _ => (rest, false),
                };
                if path.is_empty() {
                    return Err(invalid("missing replay path".into()));
                }
                Ok(Self::Replay {
                    path: PathBuf::from(path),
                    realtime,
                })
            }
            "synth" => {
                let mut parts: Vec<&str> = rest.split(',').collect();
                let paced = match parts.last() {
                    Some(&"fast") => {
                        parts.pop();
                        false
                    }
                    _ => true,
                };
                if parts.len() != 6 {
                    return Err(invalid(
                        "expected KIND,AMP,PERIOD,SEP,RATE,DURATION[,fast]".into(),
                    ));
                }
                let kind: TrajectoryKind = parts[0].parse().map_err(invalid)?;
                let mut nums = [0.0; 5];
                for (n, p) in nums.iter_mut().zip(&parts[1..]) {
                    *n = p
                        .parse()
                        .map_err(|_| invalid(format!("{p:?} is not a number")))?;
                }
                let [amp, period, sep, mut rate, duration] = nums;
                let mut paced = paced;
                if rate == 0.0 {
                    rate = FREE_RUNNING_RATE;
                    paced = false;
                }
                let trajectory = TrajectorySpec::new(kind, amp, period, sep, rate, duration);
                trajectory.validate().map_err(|e| invalid(e.0))?;
                Ok(Self::Synth { trajectory, paced })
            }
            _ => Err(invalid(
                "expected udp:PORT, stdin, replay:PATH[,realtime] or synth:...".into(),
            )),
        }
    }
}

/// Sample clock of a synthetic stream given with rate 0.
pub const FREE_RUNNING_RATE: f64 = 30.0;

/// A pull-based sample stream.
pub trait SampleSource {
    /// The next accepted sample, or `None` at end of stream. Rejected
    /// messages are skipped and counted.
    fn next_sample(&mut self) -> Option<EyeSample>;

    fn report(&self) -> SessionReport;

    /// Whether samples should be released on their `t_us` schedule.
    fn realtime(&self) -> bool;
}

/// Newline-delimited wire messages from any reader (replay file, stdin).
pub struct LineSource<R> {
    reader: R,
    line: String,
    decoder: StreamDecoder,
    report: SessionReport,
    realtime: bool,
}

pub type ReplaySource = LineSource<BufReader<File>>;

impl<R: BufRead> LineSource<R> {
    pub fn new(reader: R, realtime: bool) -> Self {
        Self {
            reader,
            line: String::with_capacity(256),
            decoder: StreamDecoder::new(),
            report: SessionReport::default(),
            realtime,
        }
    }
}

impl ReplaySource {
    pub fn open(path: &Path, realtime: bool) -> Result<Self, SourceError> {
        let file = File::open(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => SourceError::FileNotFound(path.to_path_buf()),
            _ => SourceError::Io(e),
        })?;
        Ok(Self::new(BufReader::new(file), realtime))
    }
}

impl<R: BufRead> SampleSource for LineSource<R> {
    fn next_sample(&mut self) -> Option<EyeSample> {
        loop {
            self.line.clear();
            match self.reader.read_line(&mut self.line) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    log::warn!("tracker input ended: {e}");
                    return None;
                }
            }
            if self.line.trim().is_empty() {
                continue;
            }
            let r = self.decoder.decode(self.line.as_bytes());
            self.report.record(&r);
            if let Ok(s) = r {
                return Some(s);
            }
        }
    }

    fn report(&self) -> SessionReport {
        self.report
    }

    fn realtime(&self) -> bool {
        self.realtime
    }
}

/// Generates a [`TrajectorySpec`] stream.
#[derive(Debug, Clone)]
pub struct SynthSource {
    trajectory: TrajectorySpec,
    next: u64,
    count: u64,
    paced: bool,
}

impl SynthSource {
    pub fn new(trajectory: TrajectorySpec, paced: bool) -> Self {
        let count = trajectory.sample_count();
        Self {
            trajectory,
            next: 0,
            count,
            paced,
        }
    }

    pub fn trajectory(&self) -> &TrajectorySpec {
        &self.trajectory
    }
}

impl SampleSource for SynthSource {
    fn next_sample(&mut self) -> Option<EyeSample> {
        if self.next >= self.count {
            return None;
        }
        let s = self.trajectory.nth(self.next);
        self.next += 1;
        Some(s)
    }

    fn report(&self) -> SessionReport {
        SessionReport {
            accepted: self.next,
            ..Default::default()
        }
    }

    fn realtime(&self) -> bool {
        self.paced
    }
}

/// Opens a pull source for a replay or synthetic spec.
pub fn open_pull_source(spec: &SourceSpec) -> Result<Box<dyn SampleSource + Send>, SourceError> {
    match spec {
        SourceSpec::Replay { path, realtime } => Ok(Box::new(ReplaySource::open(path, *realtime)?)),
        SourceSpec::Synth { trajectory, paced } => {
            Ok(Box::new(SynthSource::new(trajectory.clone(), *paced)))
        }
        SourceSpec::Udp { .. } | SourceSpec::Stdin => Err(SourceError::InvalidSpec {
            spec: format!("{spec:?}"),
            reason: "live sources are push-only".into(),
        }),
    }
}

/// Releases samples on their source-clock schedule: the first sample goes out
/// immediately and each later one at `start + (t_us - first_t_us)`.
#[derive(Debug, Clone, Default)]
pub struct Pacer {
    origin: Option<(Instant, u64)>,
}

impl Pacer {
    pub fn deadline(&mut self, t_us: u64) -> Instant {
        let (start, t0) = *self.origin.get_or_insert_with(|| (Instant::now(), t_us));
        start + Duration::from_micros(t_us.saturating_sub(t0))
    }

    pub fn wait(&mut self, t_us: u64) {
        let due = self.deadline(t_us);
        let now = Instant::now();
        if due > now {
            std::thread::sleep(due - now);
        }
    }
}

/// Drains a pull source into the mailbox, pacing if the source asks for it.
pub fn pump(
    source: &mut dyn SampleSource,
    sink: &mut MailboxWriter,
    stop: &AtomicBool,
) -> SessionReport {
    let mut pacer = Pacer::default();
    while !stop.load(Ordering::Relaxed) {
        let Some(s) = source.next_sample() else { break };
        if source.realtime() {
            pacer.wait(s.t_us);
        }
        sink.publish(&s);
    }
    source.report()
}

/// UDP datagrams on localhost, one message each.
pub struct UdpSource {
    socket: UdpSocket,
    decoder: StreamDecoder,
    report: SessionReport,
}

impl UdpSource {
    /// Binds `127.0.0.1:port`; port 0 picks a free port.
    pub fn bind(port: u16) -> Result<Self, SourceError> {
        let socket = UdpSocket::bind(("127.0.0.1", port))
            .map_err(|source| SourceError::BindFailed { port, source })?;
        socket.set_read_timeout(Some(Duration::from_millis(20)))?;
        Ok(Self {
            socket,
            decoder: StreamDecoder::new(),
            report: SessionReport::default(),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.socket.local_addr()
    }

    /// Receives until `stop` is set.
    pub fn run(
        mut self,
        sink: &mut MailboxWriter,
        stop: &AtomicBool,
    ) -> Result<SessionReport, SourceError> {
        let mut buf = [0u8; 2048];
        log::info!("listening for tracker samples on udp://{}", self.local_addr()?);
        while !stop.load(Ordering::Relaxed) {
            let n = match self.socket.recv(&mut buf) {
                Ok(n) => n,
                Err(e)
                    if matches!(
                        e.kind(),
                        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut | io::ErrorKind::Interrupted
                    ) =>
                {
                    continue
                }
                Err(e) => return Err(e.into()),
            };
            let r = self.decoder.decode(&buf[..n]);
            self.report.record(&r);
            if let Ok(s) = r {
                sink.publish(&s);
            }
        }
        Ok(self.report)
    }
}

/// Runs `spec` to completion (or until `stop`), publishing every accepted
/// sample into `sink`.
pub fn source_run(
    spec: &SourceSpec,
    sink: &mut MailboxWriter,
    stop: &AtomicBool,
) -> Result<SessionReport, SourceError> {
    match spec {
        SourceSpec::Udp { port } => UdpSource::bind(*port)?.run(sink, stop),
        SourceSpec::Stdin => Ok(pump(
            &mut LineSource::new(io::stdin().lock(), false),
            sink,
            stop,
        )),
        other => {
            let mut source = open_pull_source(other)?;
            Ok(pump(source.as_mut(), sink, stop))
        }
    }
}
