//! Application shell around the render loop.

pub mod config;
pub mod metrics;
pub mod render;
pub mod sink;
#[cfg(feature = "window")]
pub mod window;

pub use config::{DisplayMode, Layout, LightFieldSpec, ViewerConfig};
pub use metrics::{report_metrics, FrameMetrics, MetricsReport, Stage, StageTimings};
pub use render::{drive, run, Renderer, RunReport, ViewerError};
pub use sink::{FrameSink, HeadlessSink, MemorySink, NullSink};
