//! The render loop: newest sample -> smooth -> select views -> compose ->
//! present, once per tracker sample.

use std::io;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use super::config::{DisplayMode, ViewerConfig};
use super::metrics::{FrameMetrics, MetricsReport, StageTimings};
use super::sink::{FrameSink, HeadlessSink};
use crate::anaglyph::{compose_into, AnaglyphFrame, DimensionMismatch};
use crate::gaze::{select_views, EyeSample, GazeError, GazeTracker, GridConfig, SmoothingFilter, ViewSelection};
use crate::lightfield::{LightFieldGrid, LoadError};
use crate::protocol::{
    open_pull_source, Mailbox, Pacer, SessionReport, SourceError, SourceSpec, UdpSource,
};

#[derive(Debug, thiserror::Error)]
pub enum ViewerError {
    #[error("cannot load light field: {0}")]
    Load(#[from] LoadError),
    #[error("tracker source: {0}")]
    Source(#[from] SourceError),
    #[error("invalid grid settings: {0}")]
    Gaze(#[from] GazeError),
    #[error("stereo needs at least two view columns, light field has {0}")]
    MonoGrid(usize),
    #[error("grid is {grid_rows}x{grid_cols} but the light field is {rows}x{cols}")]
    GridMismatch {
        grid_rows: usize,
        grid_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error(transparent)]
    Compose(#[from] DimensionMismatch),
    #[error("display: {0}")]
    Display(#[source] io::Error),
    #[error("cannot write metrics: {0}")]
    Metrics(#[source] io::Error),
    #[error("this build has no window support; use --headless or build with the `window` feature")]
    NoWindowSupport,
}

/// What a finished session produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunReport {
    pub frames: u64,
    pub session: SessionReport,
    pub metrics: MetricsReport,
}

/// Per-frame pipeline state. Owns every buffer the loop touches, so a step
/// does not allocate once the output frame exists.
pub struct Renderer<'g> {
    grid: &'g LightFieldGrid,
    layout: GridConfig,
    tracker: GazeTracker,
    frame: AnaglyphFrame,
    metrics: FrameMetrics,
    present_interval: Option<Duration>,
    last_present: Option<Instant>,
}

impl<'g> Renderer<'g> {
    pub fn new(
        grid: &'g LightFieldGrid,
        layout: GridConfig,
        tracker: GazeTracker,
    ) -> Result<Self, ViewerError> {
        if grid.cols() < 2 {
            return Err(ViewerError::MonoGrid(grid.cols()));
        }
        if (layout.rows(), layout.cols()) != (grid.rows(), grid.cols()) {
            return Err(ViewerError::GridMismatch {
                grid_rows: layout.rows(),
                grid_cols: layout.cols(),
                rows: grid.rows(),
                cols: grid.cols(),
            });
        }
        Ok(Self {
            grid,
            layout,
            tracker,
            frame: AnaglyphFrame::with_size(grid.view_width(), grid.view_height()),
            metrics: FrameMetrics::new(),
            present_interval: None,
            last_present: None,
        })
    }

    /// Present at most `rate` frames per second; smoothing still sees every
    /// sample.
    pub fn with_present_rate(mut self, rate: Option<f64>) -> Self {
        self.present_interval = rate
            .filter(|r| r.is_finite() && *r > 0.0)
            .map(|r| Duration::from_secs_f64(1.0 / r));
        self
    }

    pub fn metrics(&self) -> &FrameMetrics {
        &self.metrics
    }

    pub fn frame(&self) -> &AnaglyphFrame {
        &self.frame
    }

    /// Both eyes at the grid center, used until the first usable sample.
    fn rest_position(&self, t_us: u64) -> EyeSample {
        let (w, h) = self.layout.frame_size();
        let c = self.layout.center();
        EyeSample {
            t_us,
            left: c,
            right: c,
            frame_w: w,
            frame_h: h,
            confidence: 0.0,
        }
    }

    /// Runs one sample through the pipeline. Returns the presented selection,
    /// or `None` if the present-rate cap skipped this frame.
    pub fn step(
        &mut self,
        sample: Option<EyeSample>,
        ingest: Duration,
        sink: &mut dyn FrameSink,
    ) -> Result<Option<ViewSelection>, ViewerError> {
        let t_us = sample.map_or(0, |s| s.t_us);
        let t0 = Instant::now();
        let pos = match self.tracker.update(sample) {
            Some(p) => p,
            None => self.rest_position(t_us),
        };
        let t1 = Instant::now();
        let sel = select_views(&pos, &self.layout);
        let t2 = Instant::now();

        if let (Some(iv), Some(last)) = (self.present_interval, self.last_present) {
            // 5% slack so a source at exactly the cap rate is not decimated by jitter
            if t2 - last < iv.mul_f64(0.95) {
                return Ok(None);
            }
        }

        compose_into(
            self.grid.view(sel.left.row, sel.left.col),
            self.grid.view(sel.right.row, sel.right.col),
            &mut self.frame,
        )?;
        let t3 = Instant::now();
        sink.present(&self.frame).map_err(ViewerError::Display)?;
        let t4 = Instant::now();

        let timings = StageTimings {
            ingest,
            smooth: t1 - t0,
            map: t2 - t1,
            compose: t3 - t2,
            present: t4 - t3,
        };
        self.metrics.record_frame(&timings, t4, t_us, sel);
        self.last_present = Some(t4);
        Ok(Some(sel))
    }
}

fn reached(max: Option<u64>, frames: u64) -> bool {
    max.is_some_and(|m| frames >= m)
}

/// Drives `renderer` from a pull source: every sample is rendered, released on
/// its timestamp schedule if the source is realtime.
fn drive_pull(
    cfg: &ViewerConfig,
    renderer: &mut Renderer<'_>,
    sink: &mut dyn FrameSink,
    stop: &AtomicBool,
) -> Result<SessionReport, ViewerError> {
    let mut source = open_pull_source(&cfg.source)?;
    let mut pacer = Pacer::default();
    while !stop.load(Ordering::Relaxed) && sink.is_open() && !reached(cfg.max_frames, renderer.metrics.frames()) {
        let t = Instant::now();
        let Some(sample) = source.next_sample() else { break };
        let ingest = t.elapsed();
        if source.realtime() {
            pacer.wait(sample.t_us);
        }
        renderer.step(Some(sample), ingest, sink)?;
    }
    Ok(source.report())
}

const POLL: Duration = Duration::from_micros(250);
const IDLE_EVERY: Duration = Duration::from_millis(10);

/// Drives `renderer` from a live source through the mailbox; frames are
/// rendered for the newest sample only.
fn drive_live(
    cfg: &ViewerConfig,
    renderer: &mut Renderer<'_>,
    sink: &mut dyn FrameSink,
    stop: &Arc<AtomicBool>,
) -> Result<SessionReport, ViewerError> {
    let (mut writer, mailbox) = Mailbox::new();
    let thread_stop = stop.clone();
    let handle = match &cfg.source {
        SourceSpec::Udp { port } => {
            // bind here so a busy port aborts startup
            let udp = UdpSource::bind(*port)?;
            thread::Builder::new()
                .name("tracker-udp".into())
                .spawn(move || udp.run(&mut writer, &thread_stop))
        }
        spec => {
            let spec = spec.clone();
            thread::Builder::new()
                .name("tracker-stdin".into())
                .spawn(move || crate::protocol::source_run(&spec, &mut writer, &thread_stop))
        }
    }
    .map_err(|e| ViewerError::Source(e.into()))?;

    let mut seen = 0;
    let mut last_idle = Instant::now();
    while !stop.load(Ordering::Relaxed) && sink.is_open() && !reached(cfg.max_frames, renderer.metrics.frames()) {
        let t = Instant::now();
        match mailbox.newer_than(seen) {
            Some((version, sample)) => {
                seen = version;
                renderer.step(Some(sample), t.elapsed(), sink)?;
            }
            None if mailbox.is_closed() && mailbox.version() == seen => break,
            None => {
                if last_idle.elapsed() >= IDLE_EVERY {
                    sink.idle();
                    last_idle = Instant::now();
                }
                thread::sleep(POLL);
            }
        }
    }
    stop.store(true, Ordering::Relaxed);

    // a blocked stdin read cannot observe the stop flag; leave it detached
    if matches!(cfg.source, SourceSpec::Udp { .. }) || mailbox.is_closed() {
        match handle.join() {
            Ok(r) => Ok(r?),
            Err(_) => Err(ViewerError::Source(SourceError::Io(io::Error::other(
                "tracker thread panicked",
            )))),
        }
    } else {
        Ok(SessionReport {
            accepted: seen,
            ..Default::default()
        })
    }
}

/// Runs a session on an already loaded light field into `sink`.
pub fn drive(
    cfg: &ViewerConfig,
    grid: &LightFieldGrid,
    sink: &mut dyn FrameSink,
    stop: &Arc<AtomicBool>,
) -> Result<RunReport, ViewerError> {
    let layout = cfg.grid_config(grid.rows(), grid.cols())?;
    let tracker = GazeTracker::new(SmoothingFilter::new(cfg.smooth_k)?)
        .with_min_confidence(cfg.min_confidence);
    let mut renderer = Renderer::new(grid, layout, tracker)?.with_present_rate(cfg.present_rate);

    let session = if cfg.source.is_live() {
        drive_live(cfg, &mut renderer, sink, stop)?
    } else {
        drive_pull(cfg, &mut renderer, sink, stop)?
    };
    let metrics = renderer.metrics().report();
    log::info!(
        "session done: {} frames, {:.2} fps, {} accepted / {} malformed / {} stale messages",
        metrics.frames,
        metrics.fps,
        session.accepted,
        session.malformed,
        session.stale
    );
    Ok(RunReport {
        frames: metrics.frames,
        session,
        metrics,
    })
}

fn open_sink(cfg: &ViewerConfig, grid: &LightFieldGrid) -> Result<Box<dyn FrameSink>, ViewerError> {
    match &cfg.display {
        DisplayMode::Headless { out_dir } => Ok(Box::new(
            HeadlessSink::new(out_dir).map_err(ViewerError::Display)?,
        )),
        #[cfg(feature = "window")]
        mode => Ok(Box::new(
            super::window::WindowSink::open(
                &format!("pforge - {}", grid.source_id()),
                grid.view_width(),
                grid.view_height(),
                *mode == DisplayMode::Fullscreen,
            )
            .map_err(ViewerError::Display)?,
        )),
        #[cfg(not(feature = "window"))]
        _ => {
            let _ = grid;
            Err(ViewerError::NoWindowSupport)
        }
    }
}

/// Loads the light field, runs the session and writes the metrics JSON.
pub fn run(cfg: &ViewerConfig, stop: &Arc<AtomicBool>) -> Result<RunReport, ViewerError> {
    let grid = cfg.lightfield.load()?;
    let mut sink = open_sink(cfg, &grid)?;
    let report = drive(cfg, &grid, sink.as_mut(), stop)?;
    if let Some(path) = &cfg.metrics_path {
        let json = serde_json::to_string_pretty(&report.metrics).expect("plain data");
        std::fs::write(path, json + "\n").map_err(ViewerError::Metrics)?;
    }
    Ok(report)
}
