//! Red/cyan anaglyph compositing.
//!
//! Red comes from the left-eye view, green and blue from the right-eye view.
//! Channels are copied as 8-bit integers with no gamma or color matrix.

use crate::view::{rgb_len, ViewImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("left view is {}x{} but right view is {}x{}", left.0, left.1, right.0, right.1)]
pub struct DimensionMismatch {
    pub left: (u32, u32),
    pub right: (u32, u32),
}

/// A composited frame. Reusable as the output buffer of [`compose_into`].
#[derive(Clone, PartialEq, Eq, Default)]
pub struct AnaglyphFrame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl AnaglyphFrame {
    /// A zeroed frame, for use as a reusable output buffer.
    pub fn with_size(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; rgb_len(width, height)],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_image(self) -> ViewImage {
        ViewImage::new(self.width, self.height, self.pixels)
            .expect("frame buffer always matches its dimensions")
    }
}

impl std::fmt::Debug for AnaglyphFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnaglyphFrame")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

fn check(left: &ViewImage, right: &ViewImage) -> Result<(), DimensionMismatch> {
    if left.dimensions() != right.dimensions() {
        return Err(DimensionMismatch {
            left: left.dimensions(),
            right: right.dimensions(),
        });
    }
    Ok(())
}

pub fn compose(left: &ViewImage, right: &ViewImage) -> Result<AnaglyphFrame, DimensionMismatch> {
    let mut out = AnaglyphFrame::default();
    compose_into(left, right, &mut out)?;
    Ok(out)
}

/// Same contract as [`compose`], writing into `out`.
///
/// `out` is resized if its dimensions differ from the views; when it already
/// matches, nothing is allocated.
pub fn compose_into(
    left: &ViewImage,
    right: &ViewImage,
    out: &mut AnaglyphFrame,
) -> Result<(), DimensionMismatch> {
    check(left, right)?;
    let (w, h) = left.dimensions();
    if out.dimensions() != (w, h) || out.pixels.len() != rgb_len(w, h) {
        out.width = w;
        out.height = h;
        out.pixels.resize(rgb_len(w, h), 0);
    }
    for ((o, l), r) in out
        .pixels
        .chunks_exact_mut(3)
        .zip(left.pixels().chunks_exact(3))
        .zip(right.pixels().chunks_exact(3))
    {
        o[0] = l[0];
        o[1] = r[1];
        o[2] = r[2];
    }
    Ok(())
}
