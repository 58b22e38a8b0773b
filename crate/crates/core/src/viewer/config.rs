use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::gaze::{GazeError, GridConfig, Point, DEFAULT_MIN_CONFIDENCE, DEFAULT_SMOOTHING_K};
use crate::lightfield::{self, FilenameTemplate, LightFieldGrid, LoadError};
use crate::protocol::SourceSpec;

/// How the light field is laid out on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    /// One file per view, `pattern:TEMPLATE`.
    Pattern(FilenameTemplate),
    /// A single tiled image, `atlas`.
    Atlas,
    /// A generated scene of the given view size, `demo[:WxH]`; no files read.
    Demo { width: u32, height: u32 },
}

impl FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "atlas" {
            return Ok(Self::Atlas);
        }
        if let Some(t) = s.strip_prefix("pattern:") {
            return t.parse().map(Self::Pattern).map_err(|e| e.to_string());
        }
        if let Some(rest) = s.strip_prefix("demo") {
            let size = rest.strip_prefix(':').unwrap_or("256x256");
            let (w, h) = parse_size(size)?;
            return Ok(Self::Demo {
                width: w,
                height: h,
            });
        }
        Err(format!(
            "unknown layout {s:?} (expected pattern:TEMPLATE, atlas or demo[:WxH])"
        ))
    }
}

pub fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| format!("size {s:?} is not WxH"))?;
    let parse = |v: &str| {
        v.parse::<u32>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("size {s:?} is not WxH"))
    };
    Ok((parse(w)?, parse(h)?))
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("point {s:?} is not X,Y"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|n| n.is_finite())
            .ok_or_else(|| format!("point {s:?} is not X,Y"))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LightFieldSpec {
    pub path: PathBuf,
    pub layout: Layout,
    pub rows: usize,
    pub cols: usize,
}

impl LightFieldSpec {
    pub fn load(&self) -> Result<LightFieldGrid, LoadError> {
        match &self.layout {
            Layout::Pattern(t) => lightfield::load_from_directory(&self.path, t, self.rows, self.cols),
            Layout::Atlas => lightfield::load_from_atlas(&self.path, self.rows, self.cols),
            Layout::Demo { width, height } => {
                if self.rows == 0 || self.cols == 0 {
                    return Err(LoadError::EmptyGrid {
                        rows: self.rows,
                        cols: self.cols,
                    });
                }
                Ok(lightfield::demo_grid(self.rows, self.cols, *width, *height))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisplayMode {
    Windowed,
    Fullscreen,
    Headless { out_dir: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewerConfig {
    pub lightfield: LightFieldSpec,
    /// Grid spacing in camera pixels.
    pub alpha: f64,
    pub mirror_x: bool,
    pub invert_y: bool,
    /// Grid center; defaults to the camera-frame center.
    pub center: Option<Point>,
    pub frame_w: u32,
    pub frame_h: u32,
    pub smooth_k: usize,
    pub min_confidence: f64,
    pub source: SourceSpec,
    pub display: DisplayMode,
    /// Stop after this many presented frames.
    pub max_frames: Option<u64>,
    /// Cap on presentation rate; `None` presents on every new sample.
    pub present_rate: Option<f64>,
    pub metrics_path: Option<PathBuf>,
}

pub const DEFAULT_ALPHA: f64 = 40.0;

impl ViewerConfig {
    /// Defaults: 640x480 camera frame, mirrored/inverted grid centered in it,
    /// 5-frame smoothing.
    pub fn new(lightfield: LightFieldSpec, source: SourceSpec, display: DisplayMode) -> Self {
        Self {
            lightfield,
            alpha: DEFAULT_ALPHA,
            mirror_x: true,
            invert_y: true,
            center: None,
            frame_w: 640,
            frame_h: 480,
            smooth_k: DEFAULT_SMOOTHING_K,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            source,
            display,
            max_frames: None,
            present_rate: None,
            metrics_path: None,
        }
    }

    pub fn headless(lightfield: LightFieldSpec, source: SourceSpec, out_dir: &Path) -> Self {
        Self::new(
            lightfield,
            source,
            DisplayMode::Headless {
                out_dir: out_dir.to_path_buf(),
            },
        )
    }

    pub fn grid_config(&self, rows: usize, cols: usize) -> Result<GridConfig, GazeError> {
        let mut cfg = GridConfig::new(rows, cols, self.alpha, self.frame_w, self.frame_h)?
            .with_mirror_x(self.mirror_x)
            .with_invert_y(self.invert_y);
        if let Some(c) = self.center {
            cfg = cfg.with_center(c)?;
        }
        Ok(cfg)
    }
}
