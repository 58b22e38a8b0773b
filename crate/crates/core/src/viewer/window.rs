//! Native window display via minifb. Nearest-neighbor scaling, no color
//! management.

use std::io;

use minifb::{Key, Scale, ScaleMode, Window, WindowOptions};

use super::sink::FrameSink;
use crate::anaglyph::AnaglyphFrame;

pub struct WindowSink {
    window: Window,
    buffer: Vec<u32>,
    width: usize,
    height: usize,
}

impl WindowSink {
    pub fn open(title: &str, width: u32, height: u32, fullscreen: bool) -> io::Result<Self> {
        let opts = WindowOptions {
            borderless: fullscreen,
            resize: true,
            scale: if fullscreen { Scale::FitScreen } else { Scale::X1 },
            scale_mode: ScaleMode::AspectRatioStretch,
            topmost: fullscreen,
            ..WindowOptions::default()
        };
        let (w, h) = (width as usize, height as usize);
        let window = Window::new(title, w, h, opts).map_err(|e| io::Error::other(e.to_string()))?;
        Ok(Self {
            window,
            buffer: vec![0; w * h],
            width: w,
            height: h,
        })
    }
}

impl FrameSink for WindowSink {
    fn present(&mut self, frame: &AnaglyphFrame) -> io::Result<()> {
        let (w, h) = (frame.width() as usize, frame.height() as usize);
        if (w, h) != (self.width, self.height) {
            self.buffer.resize(w * h, 0);
            self.width = w;
            self.height = h;
        }
        for (dst, p) in self.buffer.iter_mut().zip(frame.pixels().chunks_exact(3)) {
            *dst = u32::from(p[0]) << 16 | u32::from(p[1]) << 8 | u32::from(p[2]);
        }
        self.window
            .update_with_buffer(&self.buffer, self.width, self.height)
            .map_err(|e| io::Error::other(e.to_string()))
    }

    fn idle(&mut self) {
        self.window.update();
    }

    fn is_open(&self) -> bool {
        self.window.is_open() && !self.window.is_key_down(Key::Escape)
    }
}
