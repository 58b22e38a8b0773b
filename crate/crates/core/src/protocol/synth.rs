//! Closed-form head trajectories used in place of a live tracker.

use std::f64::consts::TAU;
use std::str::FromStr;

use crate::gaze::{EyeSample, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    /// Midpoint oscillates horizontally: `x = cx + A sin(2πt/T)`.
    SweepX,
    /// Midpoint oscillates vertically: `y = cy + A sin(2πt/T)`.
    SweepY,
    /// Midpoint orbits the center: `(cx + A cos(2πt/T), cy + A sin(2πt/T))`.
    Circle,
    /// Midpoint stays at the center.
    Hold,
}

impl FromStr for TrajectoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sweep-x" => Ok(Self::SweepX),
            "sweep-y" => Ok(Self::SweepY),
            "circle" => Ok(Self::Circle),
            "hold" => Ok(Self::Hold),
            other => Err(format!(
                "unknown trajectory {other:?} (expected sweep-x, sweep-y, circle or hold)"
            )),
        }
    }
}

impl std::fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::SweepX => "sweep-x",
            Self::SweepY => "sweep-y",
            Self::Circle => "circle",
            Self::Hold => "hold",
        })
    }
}

/// A synthetic eye-sample stream.
///
/// Eyes sit at `midpoint ∓ eye_separation / 2` along x (left eye at the
/// smaller x). Samples are taken at `t = i / rate` for
/// `i in 0..round(rate * duration)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    /// Pixels.
    pub amplitude: f64,
    /// Seconds per cycle.
    pub period: f64,
    pub center: Point,
    /// Pixels between the two eyes.
    pub eye_separation: f64,
    /// Samples per second.
    pub rate: f64,
    /// Seconds.
    pub duration: f64,
    pub frame_w: u32,
    pub frame_h: u32,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid trajectory: {0}")]
pub struct InvalidTrajectory(pub String);

impl TrajectorySpec {
    /// A trajectory centered in a 640x480 frame.
    pub fn new(
        kind: TrajectoryKind,
        amplitude: f64,
        period: f64,
        eye_separation: f64,
        rate: f64,
        duration: f64,
    ) -> Self {
        Self {
            kind,
            amplitude,
            period,
            center: Point::new(320.0, 240.0),
            eye_separation,
            rate,
            duration,
            frame_w: 640,
            frame_h: 480,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidTrajectory> {
        let fail = |m: &str| Err(InvalidTrajectory(m.to_owned()));
        if !(self.rate.is_finite() && self.rate > 0.0 && self.rate <= 1e6) {
            return fail("rate must be in (0, 1e6] Hz");
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return fail("amplitude must be >= 0");
        }
        if !(self.eye_separation.is_finite() && self.eye_separation >= 0.0) {
            return fail("eye separation must be >= 0");
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return fail("duration must be >= 0");
        }
        if self.kind != TrajectoryKind::Hold && !(self.period.is_finite() && self.period > 0.0) {
            return fail("period must be > 0");
        }
        if self.frame_w == 0 || self.frame_h == 0 {
            return fail("frame must be non-empty");
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return fail("center must be finite");
        }
        Ok(())
    }

    pub fn sample_count(&self) -> u64 {
        (self.rate * self.duration).round() as u64
    }

    /// Eye midpoint at time `t` seconds.
    pub fn midpoint(&self, t: f64) -> Point {
        let Point { x: cx, y: cy } = self.center;
        let phase = TAU * t / self.period;
        let a = self.amplitude;
        match self.kind {
            TrajectoryKind::SweepX => Point::new(cx + a * phase.sin(), cy),
            TrajectoryKind::SweepY => Point::new(cx, cy + a * phase.sin()),
            TrajectoryKind::Circle => Point::new(cx + a * phase.cos(), cy + a * phase.sin()),
            TrajectoryKind::Hold => self.center,
        }
    }

    /// The sample at time `t` seconds; confidence is always 1.
    pub fn sample_at(&self, t: f64) -> EyeSample {
        let mid = self.midpoint(t);
        let half = self.eye_separation / 2.0;
        EyeSample {
            t_us: (t * 1e6).round() as u64,
            left: Point::new(mid.x - half, mid.y),
            right: Point::new(mid.x + half, mid.y),
            frame_w: self.frame_w,
            frame_h: self.frame_h,
            confidence: 1.0,
        }
        .clamped()
    }

    /// The `index`-th sample of the stream, at `t = index / rate`.
    pub fn nth(&self, index: u64) -> EyeSample {
        self.sample_at(index as f64 / self.rate)
    }

    pub fn samples(&self) -> impl Iterator<Item = EyeSample> + '_ {
        (0..self.sample_count()).map(|i| self.nth(i))
    }
}
