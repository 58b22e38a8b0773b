//! Per-stage frame timings, rolling FPS and view-transition counts.
//!
//! Everything is kept in fixed-size rings so recording a frame never
//! allocates.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::gaze::ViewSelection;

/// Frames in the rolling window (4 s at 30 Hz).
pub const WINDOW: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Smooth,
    Map,
    Compose,
    Present,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Ingest,
        Stage::Smooth,
        Stage::Map,
        Stage::Compose,
        Stage::Present,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Smooth => "smooth",
            Stage::Map => "map",
            Stage::Compose => "compose",
            Stage::Present => "present",
        }
    }
}

/// Durations of one frame's stages.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub ingest: Duration,
    pub smooth: Duration,
    pub map: Duration,
    pub compose: Duration,
    pub present: Duration,
}

impl StageTimings {
    fn get(&self, stage: Stage) -> Duration {
        match stage {
            Stage::Ingest => self.ingest,
            Stage::Smooth => self.smooth,
            Stage::Map => self.map,
            Stage::Compose => self.compose,
            Stage::Present => self.present,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Ring<T, const N: usize> {
    buf: [T; N],
    head: usize,
    len: usize,
}

impl<T: Copy, const N: usize> Ring<T, N> {
    fn new(fill: T) -> Self {
        Self {
            buf: [fill; N],
            head: 0,
            len: 0,
        }
    }

    fn push(&mut self, v: T) {
        self.buf[self.head] = v;
        self.head = (self.head + 1) % N;
        self.len = (self.len + 1).min(N);
    }

    fn oldest(&self) -> Option<T> {
        (self.len > 0).then(|| self.buf[(self.head + N - self.len) % N])
    }

    fn newest(&self) -> Option<T> {
        (self.len > 0).then(|| self.buf[(self.head + N - 1) % N])
    }

    /// Stored values in slot order. Until the ring wraps they occupy the
    /// first `len` slots.
    fn values(&self) -> &[T] {
        &self.buf[..self.len]
    }
}

/// Rolling statistics for one stage, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub mean_us: f64,
    pub p99_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Transitions {
    pub left: u64,
    pub right: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub ingest: StageStats,
    pub smooth: StageStats,
    pub map: StageStats,
    pub compose: StageStats,
    pub present: StageStats,
}

/// The metrics document written at exit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Presented frames per second over the rolling window.
    pub fps: f64,
    /// Sample arrival rate on the source clock over the same window.
    pub source_fps: f64,
    pub frames: u64,
    pub stages: StageReport,
    pub transitions: Transitions,
}

#[derive(Debug, Clone)]
pub struct FrameMetrics {
    stages: [Ring<f64, WINDOW>; 5],
    // one more stamp than frames: N frames span N intervals
    presents: Ring<Instant, { WINDOW + 1 }>,
    sample_times: Ring<u64, { WINDOW + 1 }>,
    frames: u64,
    transitions: Transitions,
    last_selection: Option<ViewSelection>,
}

impl Default for FrameMetrics {
    fn default() -> Self {
        Self::new()
    }
}

impl FrameMetrics {
    pub fn new() -> Self {
        Self {
            stages: [Ring::new(0.0); 5],
            presents: Ring::new(Instant::now()),
            sample_times: Ring::new(0),
            frames: 0,
            transitions: Transitions::default(),
            last_selection: None,
        }
    }

    pub fn record_frame(
        &mut self,
        timings: &StageTimings,
        presented_at: Instant,
        sample_t_us: u64,
        selection: ViewSelection,
    ) {
        for (ring, stage) in self.stages.iter_mut().zip(Stage::ALL) {
            ring.push(timings.get(stage).as_secs_f64() * 1e6);
        }
        self.presents.push(presented_at);
        self.sample_times.push(sample_t_us);
        if let Some(prev) = self.last_selection {
            self.transitions.left += u64::from(prev.left != selection.left);
            self.transitions.right += u64::from(prev.right != selection.right);
        }
        self.last_selection = Some(selection);
        self.frames += 1;
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    pub fn transitions(&self) -> Transitions {
        self.transitions
    }

    /// Frames presented per second of wall time over the last
    /// [`WINDOW`] frames.
    pub fn fps(&self) -> f64 {
        match (self.presents.oldest(), self.presents.newest()) {
            (Some(a), Some(b)) if self.presents.len > 1 && b > a => {
                (self.presents.len - 1) as f64 / (b - a).as_secs_f64()
            }
            _ => 0.0,
        }
    }

    pub fn source_fps(&self) -> f64 {
        match (self.sample_times.oldest(), self.sample_times.newest()) {
            (Some(a), Some(b)) if self.sample_times.len > 1 && b > a => {
                (self.sample_times.len - 1) as f64 / ((b - a) as f64 / 1e6)
            }
            _ => 0.0,
        }
    }

    pub fn stage(&self, stage: Stage) -> StageStats {
        let ring = &self.stages[stage as usize];
        let values = ring.values();
        if values.is_empty() {
            return StageStats {
                mean_us: 0.0,
                p99_us: 0.0,
            };
        }
        let mut sorted = [0.0f64; WINDOW];
        let sorted = &mut sorted[..values.len()];
        sorted.copy_from_slice(values);
        sorted.sort_unstable_by(f64::total_cmp);
        StageStats {
            mean_us: values.iter().sum::<f64>() / values.len() as f64,
            p99_us: percentile(sorted, 0.99),
        }
    }

    pub fn report(&self) -> MetricsReport {
        MetricsReport {
            fps: self.fps(),
            source_fps: self.source_fps(),
            frames: self.frames,
            stages: StageReport {
                ingest: self.stage(Stage::Ingest),
                smooth: self.stage(Stage::Smooth),
                map: self.stage(Stage::Map),
                compose: self.stage(Stage::Compose),
                present: self.stage(Stage::Present),
            },
            transitions: self.transitions,
        }
    }
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Serializes the report as pretty JSON.
pub fn report_metrics(metrics: &FrameMetrics) -> String {
    serde_json::to_string_pretty(&metrics.report()).expect("metrics report is plain data")
}
