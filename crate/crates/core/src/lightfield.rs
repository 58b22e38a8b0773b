//! The m x n grid of sub-aperture views and its loaders.
//!
//! Views are stored row-major with `(0, 0)` at the top-left viewpoint of the
//! capture grid; rows grow downward and columns grow rightward. Everything is
//! decoded eagerly, so once a [`LightFieldGrid`] exists the render loop never
//! touches the filesystem or allocates for view access.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::view::{self, ViewImage};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("view ({row}, {col}) is missing: {}", path.display())]
    MissingView { row: usize, col: usize, path: PathBuf },
    #[error(
        "view ({row}, {col}) is {}x{}, expected {}x{}",
        found.0, found.1, expected.0, expected.1
    )]
    DimensionMismatch {
        row: usize,
        col: usize,
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("cannot decode {}: {source}", path.display())]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("atlas {width}x{height} cannot be split into {rows} rows x {cols} columns")]
    IndivisibleAtlas {
        width: u32,
        height: u32,
        rows: usize,
        cols: usize,
    },
    #[error("grid must have at least one row and one column (got {rows}x{cols})")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("expected {expected} views for the grid, got {found}")]
    ViewCount { expected: usize, found: usize },
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("view ({row}, {col}) is outside the {rows}x{cols} grid")]
pub struct OutOfBounds {
    pub row: usize,
    pub col: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone)]
pub struct LightFieldGrid {
    rows: usize,
    cols: usize,
    views: Vec<ViewImage>,
    view_width: u32,
    view_height: u32,
    source_id: String,
}

impl LightFieldGrid {
    /// Validates and wraps row-major views.
    pub fn new(
        rows: usize,
        cols: usize,
        views: Vec<ViewImage>,
        source_id: impl Into<String>,
    ) -> Result<Self, LoadError> {
        if rows == 0 || cols == 0 {
            return Err(LoadError::EmptyGrid { rows, cols });
        }
        if views.len() != rows * cols {
            return Err(LoadError::ViewCount {
                expected: rows * cols,
                found: views.len(),
            });
        }
        let expected = views[0].dimensions();
        if let Some((i, v)) = views
            .iter()
            .enumerate()
            .find(|(_, v)| v.dimensions() != expected)
        {
            return Err(LoadError::DimensionMismatch {
                row: i / cols,
                col: i % cols,
                expected,
                found: v.dimensions(),
            });
        }
        Ok(Self {
            rows,
            cols,
            views,
            view_width: expected.0,
            view_height: expected.1,
            source_id: source_id.into(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn view_width(&self) -> u32 {
        self.view_width
    }

    pub fn view_height(&self) -> u32 {
        self.view_height
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn views(&self) -> &[ViewImage] {
        &self.views
    }

    pub fn get_view(&self, row: usize, col: usize) -> Result<&ViewImage, OutOfBounds> {
        if row >= self.rows || col >= self.cols {
            return Err(OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(&self.views[row * self.cols + col])
    }

    /// Like [`get_view`](Self::get_view) but panics on a bad index.
    pub fn view(&self, row: usize, col: usize) -> &ViewImage {
        match self.get_view(row, col) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    /// Re-tiles the views into one atlas image, row-major.
    pub fn to_atlas(&self) -> ViewImage {
        let (vw, vh) = (self.view_width as usize, self.view_height as usize);
        let atlas_w = vw * self.cols;
        let mut pixels = vec![0u8; atlas_w * vh * self.rows * 3];
        for (i, v) in self.views.iter().enumerate() {
            let (r, c) = (i / self.cols, i % self.cols);
            for y in 0..vh {
                let src = &v.pixels()[y * vw * 3..(y + 1) * vw * 3];
                let dst = ((r * vh + y) * atlas_w + c * vw) * 3;
                pixels[dst..dst + vw * 3].copy_from_slice(src);
            }
        }
        ViewImage::new(atlas_w as u32, (vh * self.rows) as u32, pixels)
            .expect("atlas buffer sized from grid dimensions")
    }
}

impl std::fmt::Debug for LightFieldGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LightFieldGrid")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("view_width", &self.view_width)
            .field("view_height", &self.view_height)
            .field("source_id", &self.source_id)
            .finish()
    }
}

/// Loads one file per view, named by `pattern`.
pub fn load_from_directory(
    dir: &Path,
    pattern: &FilenameTemplate,
    rows: usize,
    cols: usize,
) -> Result<LightFieldGrid, LoadError> {
    if rows == 0 || cols == 0 {
        return Err(LoadError::EmptyGrid { rows, cols });
    }
    let mut views: Vec<ViewImage> = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            let path = dir.join(pattern.render(row, col, cols));
            if !path.is_file() {
                return Err(LoadError::MissingView { row, col, path });
            }
            let v = view::decode_file(&path).map_err(|source| LoadError::Decode {
                path: path.clone(),
                source,
            })?;
            if let Some(first) = views.first() {
                if first.dimensions() != v.dimensions() {
                    return Err(LoadError::DimensionMismatch {
                        row,
                        col,
                        expected: first.dimensions(),
                        found: v.dimensions(),
                    });
                }
            }
            views.push(v);
        }
    }
    log::info!(
        "loaded {rows}x{cols} light field from {} ({})",
        dir.display(),
        pattern
    );
    LightFieldGrid::new(rows, cols, views, format!("{}/{}", dir.display(), pattern))
}

/// Loads a single atlas image and slices it into `rows` x `cols` tiles.
pub fn load_from_atlas(path: &Path, rows: usize, cols: usize) -> Result<LightFieldGrid, LoadError> {
    let atlas = view::decode_file(path).map_err(|source| LoadError::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    slice_atlas(&atlas, rows, cols, path.display().to_string())
}

/// Tile `(r, c)` covers `[c*W/n, (c+1)*W/n) x [r*H/m, (r+1)*H/m)`.
pub fn slice_atlas(
    atlas: &ViewImage,
    rows: usize,
    cols: usize,
    source_id: impl Into<String>,
) -> Result<LightFieldGrid, LoadError> {
    if rows == 0 || cols == 0 {
        return Err(LoadError::EmptyGrid { rows, cols });
    }
    let (w, h) = atlas.dimensions();
    if !(w as usize).is_multiple_of(cols) || !(h as usize).is_multiple_of(rows) {
        return Err(LoadError::IndivisibleAtlas {
            width: w,
            height: h,
            rows,
            cols,
        });
    }
    let (tw, th) = (w / cols as u32, h / rows as u32);
    let views = (0..rows * cols)
        .map(|i| atlas.crop((i % cols) as u32 * tw, (i / cols) as u32 * th, tw, th))
        .collect();
    LightFieldGrid::new(rows, cols, views, source_id)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("filename template {0:?} needs {{row}} and {{col}}, or a single {{index}}")]
    MissingPlaceholders(String),
    #[error("filename template {0:?} mixes {{index}} with {{row}}/{{col}}")]
    MixedPlaceholders(String),
    #[error("unknown placeholder {{{name}}} in filename template")]
    UnknownPlaceholder { name: String },
    #[error("bad placeholder {{{0}}} in filename template")]
    BadPlaceholder(String),
    #[error("unterminated placeholder in filename template {0:?}")]
    Unterminated(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Row,
    Col,
    Index,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Field { field: Field, width: usize },
}

/// A filename pattern such as `v_{row}_{col}.ppm` or `input_Cam{index:03}.png`.
///
/// Placeholders are zero-based decimals; `{name:NN}` zero-pads to `NN` digits.
/// `{index}` counts row-major: `index = row * cols + col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilenameTemplate {
    source: String,
    segments: Vec<Segment>,
}

impl FilenameTemplate {
    pub fn parse(pattern: &str) -> Result<Self, TemplateError> {
        let mut segments = Vec::new();
        let mut literal = String::new();
        let mut rest = pattern;
        while let Some(open) = rest.find('{') {
            literal.push_str(&rest[..open]);
            let close = rest[open..]
                .find('}')
                .ok_or_else(|| TemplateError::Unterminated(pattern.to_owned()))?
                + open;
            let body = &rest[open + 1..close];
            let (name, spec) = body.split_once(':').unwrap_or((body, ""));
            let field = match name {
                "row" => Field::Row,
                "col" => Field::Col,
                "index" => Field::Index,
                _ => {
                    return Err(TemplateError::UnknownPlaceholder {
                        name: name.to_owned(),
                    })
                }
            };
            let width = if spec.is_empty() {
                0
            } else {
                spec.parse::<usize>()
                    .map_err(|_| TemplateError::BadPlaceholder(body.to_owned()))?
            };
            if !literal.is_empty() {
                segments.push(Segment::Literal(std::mem::take(&mut literal)));
            }
            segments.push(Segment::Field { field, width });
            rest = &rest[close + 1..];
        }
        literal.push_str(rest);
        if !literal.is_empty() {
            segments.push(Segment::Literal(literal));
        }

        let has = |f: Field| {
            segments
                .iter()
                .any(|s| matches!(s, Segment::Field { field, .. } if *field == f))
        };
        let (row, col, index) = (has(Field::Row), has(Field::Col), has(Field::Index));
        if index && (row || col) {
            return Err(TemplateError::MixedPlaceholders(pattern.to_owned()));
        }
        if !index && !(row && col) {
            return Err(TemplateError::MissingPlaceholders(pattern.to_owned()));
        }
        Ok(Self {
            source: pattern.to_owned(),
            segments,
        })
    }

    pub fn render(&self, row: usize, col: usize, cols: usize) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(s) => out.push_str(s),
                Segment::Field { field, width } => {
                    let v = match field {
                        Field::Row => row,
                        Field::Col => col,
                        Field::Index => row * cols + col,
                    };
                    let _ = write!(out, "{v:0width$}");
                }
            }
        }
        out
    }
}

impl FromStr for FilenameTemplate {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl std::fmt::Display for FilenameTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.source)
    }
}

/// A procedurally generated light field with horizontal and vertical
/// parallax: a gradient backdrop, a mid-depth stripe band and a near square
/// that shift by different amounts per view.
pub fn demo_grid(rows: usize, cols: usize, width: u32, height: u32) -> LightFieldGrid {
    let mut views = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let du = c as f64 - (cols as f64 - 1.0) / 2.0;
            let dv = r as f64 - (rows as f64 - 1.0) / 2.0;
            let (w, h) = (width as f64, height as f64);
            let near = 0.02 * w;
            let mid = 0.006 * w;
            views.push(ViewImage::from_fn(width, height, |x, y| {
                let (x, y) = (x as f64, y as f64);
                let (sx, sy) = (x + du * near, y + dv * near);
                if (sx - w * 0.5).abs() < w * 0.12 && (sy - h * 0.5).abs() < h * 0.12 {
                    return [230, 200, 40];
                }
                let (mx, my) = (x + du * mid, y + dv * mid);
                if (my - h * 0.3).abs() < h * 0.06 && ((mx / (w * 0.08)) as i64) % 2 == 0 {
                    return [40, 160, 220];
                }
                [
                    (x / w * 180.0) as u8,
                    (y / h * 120.0) as u8 + 40,
                    120,
                ]
            }));
        }
    }
    LightFieldGrid::new(rows, cols, views, format!("demo:{rows}x{cols}"))
        .expect("demo views share dimensions")
}
