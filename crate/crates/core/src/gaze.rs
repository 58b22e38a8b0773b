//! Eye positions in the camera frame and their mapping onto the view grid.
//!
//! A virtual `rows x cols` lattice with spacing `alpha` (camera pixels) is laid
//! over the camera frame around `center`. Each eye selects the lattice point
//! nearest to it, and that point's `(row, col)` names the view for that eye.

/// A position in camera-frame pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// One tracker observation: both eye centers plus the frame they were seen in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeSample {
    /// Source clock, microseconds, strictly increasing within a stream.
    pub t_us: u64,
    pub left: Point,
    pub right: Point,
    pub frame_w: u32,
    pub frame_h: u32,
    /// Detector confidence in `[0, 1]`.
    pub confidence: f64,
}

impl EyeSample {
    /// Clamps both eyes into `[0, frame_w) x [0, frame_h)`.
    pub fn clamped(mut self) -> Self {
        self.left = clamp_to_frame(self.left, self.frame_w, self.frame_h);
        self.right = clamp_to_frame(self.right, self.frame_w, self.frame_h);
        self
    }
}

/// Largest `f64` strictly below `v` (for positive finite `v`).
fn below(v: f64) -> f64 {
    debug_assert!(v > 0.0 && v.is_finite());
    f64::from_bits(v.to_bits() - 1)
}

pub fn clamp_to_frame(p: Point, frame_w: u32, frame_h: u32) -> Point {
    let clamp = |v: f64, hi: u32| {
        let hi = hi.max(1) as f64;
        if v.is_nan() {
            0.0
        } else {
            v.clamp(0.0, below(hi))
        }
    };
    Point::new(clamp(p.x, frame_w), clamp(p.y, frame_h))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GazeError {
    #[error("smoothing window must hold at least one frame")]
    ZeroWindow,
    #[error("grid spacing must be a positive finite number of pixels, got {0}")]
    InvalidSpacing(f64),
    #[error("view grid must have at least one row and one column (got {rows}x{cols})")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("camera frame must be non-empty (got {0}x{1})")]
    EmptyFrame(u32, u32),
    #[error("grid center must be finite")]
    InvalidCenter,
}

/// k-frame moving average over both eyes, each coordinate independently.
///
/// The window starts empty; until `k` samples have arrived the output is the
/// mean of however many exist.
#[derive(Debug, Clone)]
pub struct SmoothingFilter {
    k: usize,
    // ring of [lx, ly, rx, ry]; `head` is the slot the next sample goes into
    ring: Vec<[f64; 4]>,
    head: usize,
    len: usize,
}

impl SmoothingFilter {
    pub fn new(k: usize) -> Result<Self, GazeError> {
        if k == 0 {
            return Err(GazeError::ZeroWindow);
        }
        Ok(Self {
            k,
            ring: vec![[0.0; 4]; k],
            head: 0,
            len: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of samples currently averaged, `min(count, k)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn reset(&mut self) {
        self.head = 0;
        self.len = 0;
    }

    /// Pushes one frame and returns the smoothed sample. Timestamp, frame
    /// size and confidence pass through unchanged.
    pub fn smooth(&mut self, sample: EyeSample) -> EyeSample {
        self.ring[self.head] = [sample.left.x, sample.left.y, sample.right.x, sample.right.y];
        self.head = (self.head + 1) % self.k;
        self.len = (self.len + 1).min(self.k);

        // running mean, oldest first; exact when every value in the window is equal
        let oldest = (self.head + self.k - self.len) % self.k;
        let mut mean = self.ring[oldest];
        for i in 1..self.len {
            let v = self.ring[(oldest + i) % self.k];
            let n = (i + 1) as f64;
            for (m, x) in mean.iter_mut().zip(v) {
                *m += (x - *m) / n;
            }
        }
        EyeSample {
            left: Point::new(mean[0], mean[1]),
            right: Point::new(mean[2], mean[3]),
            ..sample
        }
    }
}

/// Placement of the virtual view grid over the camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    rows: usize,
    cols: usize,
    alpha: f64,
    frame_w: u32,
    frame_h: u32,
    center: Point,
    mirror_x: bool,
    invert_y: bool,
}

impl GridConfig {
    /// Grid centered on the frame, mirrored in x and inverted in y.
    pub fn new(
        rows: usize,
        cols: usize,
        alpha: f64,
        frame_w: u32,
        frame_h: u32,
    ) -> Result<Self, GazeError> {
        if rows == 0 || cols == 0 {
            return Err(GazeError::EmptyGrid { rows, cols });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(GazeError::InvalidSpacing(alpha));
        }
        if frame_w == 0 || frame_h == 0 {
            return Err(GazeError::EmptyFrame(frame_w, frame_h));
        }
        Ok(Self {
            rows,
            cols,
            alpha,
            frame_w,
            frame_h,
            center: Point::new(frame_w as f64 / 2.0, frame_h as f64 / 2.0),
            mirror_x: true,
            invert_y: true,
        })
    }

    pub fn with_center(mut self, center: Point) -> Result<Self, GazeError> {
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(GazeError::InvalidCenter);
        }
        self.center = center;
        Ok(self)
    }

    pub fn with_mirror_x(mut self, mirror_x: bool) -> Self {
        self.mirror_x = mirror_x;
        self
    }

    pub fn with_invert_y(mut self, invert_y: bool) -> Self {
        self.invert_y = invert_y;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn frame_size(&self) -> (u32, u32) {
        (self.frame_w, self.frame_h)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn mirror_x(&self) -> bool {
        self.mirror_x
    }

    pub fn invert_y(&self) -> bool {
        self.invert_y
    }

    fn sign_x(&self) -> f64 {
        if self.mirror_x {
            -1.0
        } else {
            1.0
        }
    }

    fn sign_y(&self) -> f64 {
        if self.invert_y {
            -1.0
        } else {
            1.0
        }
    }

    /// Camera-frame position of lattice point `(row, col)`.
    pub fn grid_point(&self, row: usize, col: usize) -> Point {
        let half_c = (self.cols as f64 - 1.0) / 2.0;
        let half_r = (self.rows as f64 - 1.0) / 2.0;
        Point::new(
            self.center.x + self.sign_x() * (col as f64 - half_c) * self.alpha,
            self.center.y + self.sign_y() * (row as f64 - half_r) * self.alpha,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ViewIndex {
    pub row: usize,
    pub col: usize,
}

impl ViewIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// The view chosen for each eye.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ViewSelection {
    pub left: ViewIndex,
    pub right: ViewIndex,
}

/// Nearest lattice point to `pos`, ties going to the smaller row and then the
/// smaller column. `pos` is first clamped into the camera frame.
pub fn map_eye_to_view(pos: Point, cfg: &GridConfig) -> ViewIndex {
    let pos = clamp_to_frame(pos, cfg.frame_w, cfg.frame_h);

    // The lattice is separable, so rounding each axis lands within one step
    // of the minimizer; the 3x3 pass settles it with true distances.
    let axis = |p: f64, c: f64, sign: f64, count: usize| -> usize {
        let u = sign * (p - c) / cfg.alpha + (count as f64 - 1.0) / 2.0;
        u.round().clamp(0.0, (count - 1) as f64) as usize
    };
    let r0 = axis(pos.y, cfg.center.y, cfg.sign_y(), cfg.rows);
    let c0 = axis(pos.x, cfg.center.x, cfg.sign_x(), cfg.cols);

    let mut best = ViewIndex::new(r0, c0);
    let mut best_d = f64::INFINITY;
    for row in r0.saturating_sub(1)..=(r0 + 1).min(cfg.rows - 1) {
        for col in c0.saturating_sub(1)..=(c0 + 1).min(cfg.cols - 1) {
            let g = cfg.grid_point(row, col);
            let (dx, dy) = (pos.x - g.x, pos.y - g.y);
            let d = dx * dx + dy * dy;
            // scan order is (row, col) ascending, so strict < keeps the tie-break
            if d < best_d {
                best_d = d;
                best = ViewIndex::new(row, col);
            }
        }
    }
    best
}

/// Maps each eye independently; no minimum disparity is enforced.
pub fn select_views(sample: &EyeSample, cfg: &GridConfig) -> ViewSelection {
    ViewSelection {
        left: map_eye_to_view(sample.left, cfg),
        right: map_eye_to_view(sample.right, cfg),
    }
}

/// Samples below this confidence count as tracking loss.
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.5;

pub const DEFAULT_SMOOTHING_K: usize = 5;

/// Smoothing plus hold-last-position on dropouts.
///
/// Missing or low-confidence samples leave the filter untouched and return
/// the previous smoothed position.
#[derive(Debug, Clone)]
pub struct GazeTracker {
    filter: SmoothingFilter,
    min_confidence: f64,
    last: Option<EyeSample>,
}

impl GazeTracker {
    pub fn new(filter: SmoothingFilter) -> Self {
        Self {
            filter,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            last: None,
        }
    }

    pub fn with_min_confidence(mut self, min_confidence: f64) -> Self {
        self.min_confidence = min_confidence;
        self
    }

    pub fn filter(&self) -> &SmoothingFilter {
        &self.filter
    }

    pub fn last(&self) -> Option<&EyeSample> {
        self.last.as_ref()
    }

    /// Returns the current smoothed position, or `None` before the first
    /// usable sample.
    pub fn update(&mut self, sample: Option<EyeSample>) -> Option<EyeSample> {
        match sample {
            Some(s) if s.confidence >= self.min_confidence => {
                self.last = Some(self.filter.smooth(s.clamped()));
            }
            _ => {}
        }
        self.last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: u64, lx: f64, ly: f64, rx: f64, ry: f64) -> EyeSample {
        EyeSample {
            t_us: t,
            left: Point::new(lx, ly),
            right: Point::new(rx, ry),
            frame_w: 640,
            frame_h: 480,
            confidence: 1.0,
        }
    }

    fn brute_force(pos: Point, cfg: &GridConfig) -> ViewIndex {
        let pos = clamp_to_frame(pos, cfg.frame_w, cfg.frame_h);
        let mut best = (f64::INFINITY, ViewIndex::default());
        for r in 0..cfg.rows() {
            for c in 0..cfg.cols() {
                let g = cfg.grid_point(r, c);
                let d = (pos.x - g.x).powi(2) + (pos.y - g.y).powi(2);
                if d < best.0 {
                    best = (d, ViewIndex::new(r, c));
                }
            }
        }
        best.1
    }

    #[test]
    fn window_of_one_is_identity() {
        let mut f = SmoothingFilter::new(1).unwrap();
        for (i, x) in [3.5, 100.25, 7.0, 639.0].into_iter().enumerate() {
            let s = sample(i as u64, x, x / 2.0, x + 1.0, 3.0);
            assert_eq!(f.smooth(s), s);
        }
    }

    #[test]
    fn growing_then_sliding_window() {
        let mut f = SmoothingFilter::new(3).unwrap();
        let out: Vec<f64> = [0.0, 10.0, 20.0, 30.0]
            .into_iter()
            .enumerate()
            .map(|(i, x)| f.smooth(sample(i as u64, x, 0.0, 0.0, 0.0)).left.x)
            .collect();
        assert_eq!(out, vec![0.0, 5.0, 10.0, 20.0]);
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn constant_input_stays_constant() {
        let mut f = SmoothingFilter::new(5).unwrap();
        for i in 0..10 {
            let out = f.smooth(sample(i, 320.0, 240.0, 320.0, 240.0));
            assert_eq!((out.left.x, out.left.y), (320.0, 240.0));
        }
        // awkward decimal still exact after k repeats
        let mut f = SmoothingFilter::new(3).unwrap();
        f.smooth(sample(0, 1.0, 2.0, 3.0, 4.0));
        for i in 1..4 {
            f.smooth(sample(i, 0.1, 0.7, 0.3, 1e-3));
        }
        let out = f.smooth(sample(5, 0.1, 0.7, 0.3, 1e-3));
        assert_eq!(out.left, Point::new(0.1, 0.7));
        assert_eq!(out.right, Point::new(0.3, 1e-3));
    }

    #[test]
    fn zero_window_rejected() {
        assert_eq!(SmoothingFilter::new(0).unwrap_err(), GazeError::ZeroWindow);
    }

    #[test]
    fn grid_config_validation() {
        assert!(GridConfig::new(0, 9, 40.0, 640, 480).is_err());
        assert!(GridConfig::new(9, 9, 0.0, 640, 480).is_err());
        assert!(GridConfig::new(9, 9, f64::NAN, 640, 480).is_err());
        assert!(GridConfig::new(9, 9, 40.0, 0, 480).is_err());
        let cfg = GridConfig::new(9, 9, 40.0, 640, 480).unwrap();
        assert_eq!(cfg.center(), Point::new(320.0, 240.0));
        assert!(cfg.mirror_x() && cfg.invert_y());
        assert!(cfg.with_center(Point::new(f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn center_maps_to_center_view() {
        for alpha in [1.0, 20.0, 40.0, 120.0, 200.0] {
            let cfg = GridConfig::new(9, 9, alpha, 640, 480).unwrap();
            assert_eq!(map_eye_to_view(Point::new(320.0, 240.0), &cfg), ViewIndex::new(4, 4));
        }
    }

    #[test]
    fn four_steps_right() {
        let cfg = GridConfig::new(9, 9, 40.0, 640, 480)
            .unwrap()
            .with_mirror_x(false);
        let pos = Point::new(480.0, 240.0);
        assert_eq!(brute_force(pos, &cfg), ViewIndex::new(4, 8));
        assert_eq!(map_eye_to_view(pos, &cfg), ViewIndex::new(4, 8));
    }

    #[test]
    fn frame_corner_with_wide_spacing() {
        // lattice spans 1600 px, so the frame corner sits near an interior point
        let cfg = GridConfig::new(9, 9, 200.0, 640, 480)
            .unwrap()
            .with_mirror_x(false)
            .with_invert_y(false);
        let pos = Point::new(0.0, 0.0);
        assert_eq!(brute_force(pos, &cfg), ViewIndex::new(3, 2));
        assert_eq!(map_eye_to_view(pos, &cfg), ViewIndex::new(3, 2));
    }

    #[test]
    fn frame_corner_clamps_to_corner_view() {
        let cfg = GridConfig::new(9, 9, 20.0, 640, 480)
            .unwrap()
            .with_mirror_x(false)
            .with_invert_y(false);
        assert_eq!(map_eye_to_view(Point::new(0.0, 0.0), &cfg), ViewIndex::new(0, 0));
        assert_eq!(map_eye_to_view(Point::new(-1e9, -1e9), &cfg), ViewIndex::new(0, 0));
        assert_eq!(map_eye_to_view(Point::new(1e9, 1e9), &cfg), ViewIndex::new(8, 8));
        assert_eq!(map_eye_to_view(Point::new(f64::NAN, 1e9), &cfg), ViewIndex::new(8, 0));
    }

    #[test]
    fn mirrored_stereo_pair_on_exact_midpoints() {
        // 300 and 340 are exactly halfway between lattice columns, so the
        // smaller column wins for each eye
        let cfg = GridConfig::new(9, 9, 40.0, 640, 480).unwrap();
        let s = sample(0, 300.0, 240.0, 340.0, 240.0);
        let sel = select_views(&s, &cfg);
        assert_eq!(sel.left, brute_force(s.left, &cfg));
        assert_eq!(sel.right, brute_force(s.right, &cfg));
        assert_eq!(sel.left, ViewIndex::new(4, 4));
        assert_eq!(sel.right, ViewIndex::new(4, 3));

        // nudged off the midpoints, mirroring sends the left eye to a higher column
        let s = sample(0, 299.0, 240.0, 341.0, 240.0);
        let sel = select_views(&s, &cfg);
        assert_eq!(sel.left, ViewIndex::new(4, 5));
        assert_eq!(sel.right, ViewIndex::new(4, 3));
    }

    #[test]
    fn identical_eyes_collapse() {
        let cfg = GridConfig::new(9, 9, 40.0, 640, 480).unwrap();
        let sel = select_views(&sample(0, 320.0, 240.0, 320.0, 240.0), &cfg);
        assert_eq!(sel.left, ViewIndex::new(4, 4));
        assert_eq!(sel.left, sel.right);
    }

    #[test]
    fn narrow_separation_with_sparse_grid() {
        let cfg = GridConfig::new(9, 9, 200.0, 640, 480).unwrap();
        let s = sample(0, 320.0 - 32.5, 240.0, 320.0 + 32.5, 240.0);
        let sel = select_views(&s, &cfg);
        assert_eq!(sel.left, brute_force(s.left, &cfg));
        assert_eq!(sel.right, brute_force(s.right, &cfg));
        assert_eq!(sel.left.col, sel.right.col);
    }

    #[test]
    fn tracker_holds_last_on_dropout() {
        let mut t = GazeTracker::new(SmoothingFilter::new(2).unwrap());
        assert_eq!(t.update(None), None);
        let a = t.update(Some(sample(1, 100.0, 100.0, 200.0, 100.0))).unwrap();
        let mut weak = sample(2, 500.0, 400.0, 600.0, 400.0);
        weak.confidence = 0.2;
        assert_eq!(t.update(Some(weak)), Some(a));
        assert_eq!(t.update(None), Some(a));
        assert_eq!(t.filter().len(), 1);
        let b = t.update(Some(sample(3, 200.0, 100.0, 300.0, 100.0))).unwrap();
        assert_eq!(b.left.x, 150.0);
    }

    #[test]
    fn clamping_stays_inside_frame() {
        let s = sample(0, -5.0, 480.0, 640.0, 1e9).clamped();
        assert_eq!(s.left.x, 0.0);
        assert!(s.left.y < 480.0 && s.left.y > 479.99);
        assert!(s.right.x < 640.0);
    }
}
