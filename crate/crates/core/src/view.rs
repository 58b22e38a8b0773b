//! RGB8 image buffers and the two codecs the viewer reads and writes.

use std::io::{self, Write};
use std::path::Path;

use image::{DynamicImage, ImageReader};

/// A row-major RGB8 image with 3 bytes per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct ViewImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

#[derive(Debug, thiserror::Error)]
#[error("pixel buffer of {len} bytes does not match {width}x{height} RGB8")]
pub struct BufferSizeError {
    pub width: u32,
    pub height: u32,
    pub len: usize,
}

impl ViewImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, BufferSizeError> {
        if width == 0 || height == 0 || pixels.len() != rgb_len(width, height) {
            return Err(BufferSizeError {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn solid(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let pixels = rgb
            .iter()
            .copied()
            .cycle()
            .take(rgb_len(width, height))
            .collect();
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut pixels = Vec::with_capacity(rgb_len(width, height));
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
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

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Copies the rectangle at `(x0, y0)` of size `width` x `height`.
    pub fn crop(&self, x0: u32, y0: u32, width: u32, height: u32) -> ViewImage {
        assert!(x0 + width <= self.width && y0 + height <= self.height);
        let stride = self.width as usize * 3;
        let row_bytes = width as usize * 3;
        let mut pixels = Vec::with_capacity(rgb_len(width, height));
        for y in y0..y0 + height {
            let start = y as usize * stride + x0 as usize * 3;
            pixels.extend_from_slice(&self.pixels[start..start + row_bytes]);
        }
        ViewImage {
            width,
            height,
            pixels,
        }
    }

    pub fn write_ppm(&self, out: impl Write) -> io::Result<()> {
        write_ppm(out, self.width, self.height, &self.pixels)
    }
}

impl std::fmt::Debug for ViewImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ViewImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

pub(crate) fn rgb_len(width: u32, height: u32) -> usize {
    width as usize * height as usize * 3
}

/// Writes a binary PPM (P6, maxval 255). Performs no heap allocation.
pub fn write_ppm(mut out: impl Write, width: u32, height: u32, pixels: &[u8]) -> io::Result<()> {
    debug_assert_eq!(pixels.len(), rgb_len(width, height));
    write!(out, "P6\n{width} {height}\n255\n")?;
    out.write_all(pixels)
}

/// Decodes a PNG or PPM file into RGB8.
///
/// 16-bit sources keep only the high byte of each channel; alpha is dropped
/// and grayscale is replicated across the three channels.
pub fn decode_file(path: &Path) -> Result<ViewImage, image::ImageError> {
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?;
    Ok(from_dynamic(img))
}

pub fn from_dynamic(img: DynamicImage) -> ViewImage {
    let (width, height) = (img.width(), img.height());
    let pixels = match img {
        DynamicImage::ImageRgb8(buf) => buf.into_raw(),
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| (v >> 8) as u8)
            .collect(),
        other => other.to_rgb8().into_raw(),
    };
    ViewImage {
        width,
        height,
        pixels,
    }
}
