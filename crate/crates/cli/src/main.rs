use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Parser};
use pforge_core::gaze::Point;
use pforge_core::protocol::SourceSpec;
use pforge_core::viewer::config::{parse_point, parse_size, DEFAULT_ALPHA};
use pforge_core::viewer::{run, DisplayMode, Layout, LightFieldSpec, RunReport, ViewerConfig};

/// Gaze-driven light-field viewer: shows a red/cyan anaglyph of the two
/// views nearest the tracked eye positions.
#[derive(Debug, Parser)]
#[command(name = "pforge", version, about)]
struct Args {
    /// Light-field directory (pattern layout) or atlas image (atlas layout).
    #[arg(long, env = "PFORGE_LIGHTFIELD")]
    lightfield: Option<PathBuf>,

    /// `pattern:TEMPLATE` (e.g. `pattern:input_Cam{index:03}.png`), `atlas`,
    /// or `demo[:WxH]` for a generated scene.
    #[arg(long, env = "PFORGE_LAYOUT", default_value = "atlas", value_parser = clap::value_parser!(Layout))]
    layout: Layout,

    #[arg(long, env = "PFORGE_ROWS", default_value_t = 9)]
    rows: usize,

    #[arg(long, env = "PFORGE_COLS", default_value_t = 9)]
    cols: usize,

    /// Grid spacing in camera-frame pixels.
    #[arg(long, env = "PFORGE_ALPHA", default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    /// Moving-average window, in samples.
    #[arg(long, env = "PFORGE_SMOOTH_K", default_value_t = 5)]
    smooth_k: usize,

    #[arg(long, env = "PFORGE_MIRROR_X", default_value_t = true, action = ArgAction::Set)]
    mirror_x: bool,

    #[arg(long, env = "PFORGE_INVERT_Y", default_value_t = true, action = ArgAction::Set)]
    invert_y: bool,

    /// Grid center in camera pixels, `X,Y`; defaults to the frame center.
    #[arg(long, env = "PFORGE_CENTER", value_parser = parse_point)]
    center: Option<Point>,

    /// Camera frame size the tracker reports positions in, `WxH`.
    #[arg(long, env = "PFORGE_FRAME_SIZE", default_value = "640x480", value_parser = parse_size)]
    frame_size: (u32, u32),

    /// `udp:PORT`, `stdin`, `replay:PATH[,realtime]` or
    /// `synth:KIND,AMP,PERIOD,SEP,RATE,DURATION[,fast]`.
    #[arg(long, env = "PFORGE_TRACKER", default_value = "udp:9870", value_parser = clap::value_parser!(SourceSpec))]
    tracker: SourceSpec,

    /// Write frames as PPM files into this directory instead of opening a window.
    #[arg(long, env = "PFORGE_HEADLESS", value_name = "OUT_DIR", conflicts_with = "fullscreen")]
    headless: Option<PathBuf>,

    /// Stop after this many frames.
    #[arg(long, env = "PFORGE_FRAMES", value_name = "N")]
    frames: Option<u64>,

    /// Write the metrics JSON here on exit.
    #[arg(long, env = "PFORGE_METRICS", value_name = "PATH")]
    metrics: Option<PathBuf>,

    #[arg(long, env = "PFORGE_FULLSCREEN")]
    fullscreen: bool,

    /// Cap on frames presented per second.
    #[arg(long, env = "PFORGE_PRESENT_RATE")]
    present_rate: Option<f64>,

    /// Samples below this confidence are treated as dropouts.
    #[arg(long, env = "PFORGE_MIN_CONFIDENCE", default_value_t = 0.5)]
    min_confidence: f64,
}

impl Args {
    fn into_config(self) -> Result<ViewerConfig> {
        if self.lightfield.is_none() && !matches!(self.layout, Layout::Demo { .. }) {
            bail!("--lightfield is required unless --layout is demo");
        }
        let display = match (self.headless, self.fullscreen) {
            (Some(out_dir), _) => DisplayMode::Headless { out_dir },
            (None, true) => DisplayMode::Fullscreen,
            (None, false) => DisplayMode::Windowed,
        };
        let lightfield = LightFieldSpec {
            path: self.lightfield.unwrap_or_default(),
            layout: self.layout,
            rows: self.rows,
            cols: self.cols,
        };
        let mut cfg = ViewerConfig::new(lightfield, self.tracker, display);
        cfg.alpha = self.alpha;
        cfg.smooth_k = self.smooth_k;
        cfg.mirror_x = self.mirror_x;
        cfg.invert_y = self.invert_y;
        cfg.center = self.center;
        (cfg.frame_w, cfg.frame_h) = self.frame_size;
        cfg.max_frames = self.frames;
        cfg.metrics_path = self.metrics;
        cfg.present_rate = self.present_rate;
        cfg.min_confidence = self.min_confidence;
        if let SourceSpec::Synth { trajectory, .. } = &mut cfg.source {
            trajectory.frame_w = cfg.frame_w;
            trajectory.frame_h = cfg.frame_h;
            trajectory.center = cfg.center.unwrap_or(Point::new(
                f64::from(cfg.frame_w) / 2.0,
                f64::from(cfg.frame_h) / 2.0,
            ));
        }
        Ok(cfg)
    }
}

fn summary(report: &RunReport) -> String {
    let m = &report.metrics;
    let s = &m.stages;
    format!(
        "{} frames, {:.2} fps (source {:.2}); transitions L{} R{}; \
         messages {} accepted, {} malformed, {} stale; \
         p99 us: ingest {:.0}, smooth {:.0}, map {:.0}, compose {:.0}, present {:.0}",
        m.frames,
        m.fps,
        m.source_fps,
        m.transitions.left,
        m.transitions.right,
        report.session.accepted,
        report.session.malformed,
        report.session.stale,
        s.ingest.p99_us,
        s.smooth.p99_us,
        s.map.p99_us,
        s.compose.p99_us,
        s.present.p99_us,
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match try_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main() -> Result<()> {
    let args = Args::parse();
    let cfg = args.into_config()?;

    let stop = Arc::new(AtomicBool::new(false));
    let handler_stop = stop.clone();
    ctrlc::set_handler(move || handler_stop.store(true, Ordering::Relaxed))
        .context("cannot install the interrupt handler")?;

    let report = run(&cfg, &stop)?;
    println!("{}", summary(&report));
    Ok(())
}
