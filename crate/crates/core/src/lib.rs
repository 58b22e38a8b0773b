//! Head-coupled light-field viewing on an ordinary monitor.
//!
//! Tracked eye positions in a webcam frame pick two views out of an m x n
//! light-field grid, which are combined into a red/cyan anaglyph:
//!
//! - [`lightfield`]: loading and serving the view grid
//! - [`gaze`]: smoothing eye positions and mapping them to view indices
//! - [`anaglyph`]: compositing the stereo pair
//! - [`protocol`]: the tracker wire format and sample sources
//! - [`viewer`]: the render loop and where its frames go

pub mod anaglyph;
pub mod gaze;
pub mod lightfield;
pub mod protocol;
pub mod view;
pub mod viewer;

pub use anaglyph::{compose, compose_into, AnaglyphFrame};
pub use gaze::{
    map_eye_to_view, select_views, EyeSample, GazeTracker, GridConfig, Point, SmoothingFilter,
    ViewIndex, ViewSelection,
};
pub use lightfield::{load_from_atlas, load_from_directory, FilenameTemplate, LightFieldGrid};
pub use view::ViewImage;
