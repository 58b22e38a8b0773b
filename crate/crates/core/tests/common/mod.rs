//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

/// Grid overlay parameters, restated independently of `GridConfig`.
#[derive(Debug, Clone, Copy)]
pub struct Overlay {
    pub rows: usize,
    pub cols: usize,
    pub alpha: f64,
    pub cx: f64,
    pub cy: f64,
    pub mirror_x: bool,
    pub invert_y: bool,
}

impl Overlay {
    pub fn centered(rows: usize, cols: usize, alpha: f64, mirror_x: bool, invert_y: bool) -> Self {
        Self {
            rows,
            cols,
            alpha,
            cx: 320.0,
            cy: 240.0,
            mirror_x,
            invert_y,
        }
    }

    pub fn point(&self, r: usize, c: usize) -> (f64, f64) {
        let sx = if self.mirror_x { -1.0 } else { 1.0 };
        let sy = if self.invert_y { -1.0 } else { 1.0 };
        (
            self.cx + sx * (c as f64 - (self.cols as f64 - 1.0) / 2.0) * self.alpha,
            self.cy + sy * (r as f64 - (self.rows as f64 - 1.0) / 2.0) * self.alpha,
        )
    }

    /// Exhaustive nearest lattice point; ties go to the smaller row, then
    /// the smaller column.
    pub fn brute_force(&self, x: f64, y: f64) -> (usize, usize) {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (gx, gy) = self.point(r, c);
                let (dx, dy) = (x - gx, y - gy);
                let d = dx * dx + dy * dy;
                let better = d < best_d || (d == best_d && (r, c) < best);
                if better {
                    best_d = d;
                    best = (r, c);
                }
            }
        }
        best
    }

    /// Column from the step rule: transitions sit at midpoints between
    /// neighbouring lattice columns, ties resolved toward the smaller column.
    pub fn analytic_col(&self, x: f64) -> usize {
        let s = if self.mirror_x { -1.0 } else { 1.0 };
        let u = s * (x - self.cx) / self.alpha + (self.cols as f64 - 1.0) / 2.0;
        (u - 0.5).ceil().clamp(0.0, (self.cols - 1) as f64) as usize
    }
}

/// Plain arithmetic mean by summation.
pub fn resum_mean(window: &[f64]) -> f64 {
    window.iter().sum::<f64>() / window.len() as f64
}

/// Eye x positions of a horizontal sweep, `cx + A sin(2πt/T) ∓ sep/2` at
/// `t = i / rate`, clamped into `[0, frame_w)`.
pub fn sweep_eyes(
    cx: f64,
    amplitude: f64,
    period: f64,
    sep: f64,
    rate: f64,
    count: usize,
    frame_w: f64,
) -> Vec<(f64, f64)> {
    let clamp = |v: f64| v.max(0.0).min(frame_w - 1e-9);
    (0..count)
        .map(|i| {
            let t = i as f64 / rate;
            let mid = cx + amplitude * (2.0 * PI * t / period).sin();
            (clamp(mid - sep / 2.0), clamp(mid + sep / 2.0))
        })
        .collect()
}

/// Number of samples whose column differs from the previous sample's.
pub fn count_changes(cols: impl IntoIterator<Item = usize>) -> u64 {
    let mut prev = None;
    let mut n = 0;
    for c in cols {
        if prev.is_some_and(|p| p != c) {
            n += 1;
        }
        prev = Some(c);
    }
    n
}

/// Binary P6 writer, independent of the crate's own.
pub fn write_p6(path: &Path, w: usize, h: usize, rgb: &[u8]) {
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    bytes.extend_from_slice(rgb);
    fs::write(path, bytes).unwrap();
}

/// Minimal P6 reader for frames written by the headless sink.
pub fn read_p6(path: &Path) -> (usize, usize, Vec<u8>) {
    let bytes = fs::read(path).unwrap();
    let mut fields = Vec::new();
    let mut i = 0;
    while fields.len() < 4 {
        while bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        fields.push(String::from_utf8(bytes[start..i].to_vec()).unwrap());
    }
    assert_eq!(fields[0], "P6");
    assert_eq!(fields[3], "255");
    let (w, h): (usize, usize) = (fields[1].parse().unwrap(), fields[2].parse().unwrap());
    let data = bytes[i + 1..].to_vec();
    assert_eq!(data.len(), w * h * 3);
    (w, h, data)
}

/// All `frame_*.ppm` files in a directory, in name order.
pub fn frame_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".ppm"))
        })
        .collect();
    v.sort();
    v
}

/// Deterministic RGB tile content that differs per view and per pixel.
pub fn tile_pixels(r: usize, c: usize, w: usize, h: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            out.push((r * 37 + x * 3) as u8);
            out.push((c * 53 + y * 5) as u8);
            out.push((r * 11 + c * 7 + x * y) as u8);
        }
    }
    out
}

/// Assembles tiles into one atlas buffer, row-major.
pub fn atlas_pixels(rows: usize, cols: usize, w: usize, h: usize) -> Vec<u8> {
    let aw = w * cols;
    let mut out = vec![0u8; aw * h * rows * 3];
    for r in 0..rows {
        for c in 0..cols {
            let tile = tile_pixels(r, c, w, h);
            for y in 0..h {
                let dst = ((r * h + y) * aw + c * w) * 3;
                out[dst..dst + w * 3].copy_from_slice(&tile[y * w * 3..(y + 1) * w * 3]);
            }
        }
    }
    out
}
