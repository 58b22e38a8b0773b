//! Where composited frames go.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use crate::anaglyph::AnaglyphFrame;
use crate::view::write_ppm;

pub trait FrameSink {
    fn present(&mut self, frame: &AnaglyphFrame) -> io::Result<()>;

    /// Called while waiting for the next sample; a display repeats the last
    /// frame and pumps its events here.
    fn idle(&mut self) {}

    /// False once the user closed the display.
    fn is_open(&self) -> bool {
        true
    }
}

/// Writes every frame as `frame_{index:06}.ppm` into a directory.
///
/// After the first frame the path and name buffers are reused, so steady
/// state presentation does not allocate.
#[derive(Debug)]
pub struct HeadlessSink {
    path: PathBuf,
    name: String,
    index: u64,
}

impl HeadlessSink {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let mut path = dir.to_path_buf();
        path.push("frame_000000.ppm");
        Ok(Self {
            path,
            name: String::with_capacity(32),
            index: 0,
        })
    }

    pub fn frames_written(&self) -> u64 {
        self.index
    }

    pub fn frame_name(index: u64) -> String {
        format!("frame_{index:06}.ppm")
    }
}

impl FrameSink for HeadlessSink {
    fn present(&mut self, frame: &AnaglyphFrame) -> io::Result<()> {
        self.name.clear();
        let _ = write!(self.name, "frame_{:06}.ppm", self.index);
        self.path.set_file_name(&self.name);
        let file = File::create(&self.path)?;
        write_ppm(file, frame.width(), frame.height(), frame.pixels())?;
        self.index += 1;
        Ok(())
    }
}

/// Discards frames.
#[derive(Debug, Default)]
pub struct NullSink {
    pub presented: u64,
}

impl FrameSink for NullSink {
    fn present(&mut self, _frame: &AnaglyphFrame) -> io::Result<()> {
        self.presented += 1;
        Ok(())
    }
}

/// Keeps a copy of every frame in memory.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub frames: Vec<AnaglyphFrame>,
}

impl FrameSink for MemorySink {
    fn present(&mut self, frame: &AnaglyphFrame) -> io::Result<()> {
        self.frames.push(frame.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anaglyph::compose;
    use crate::view::{decode_file, ViewImage};

    #[test]
    fn headless_names_and_contents() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = HeadlessSink::new(&dir.path().join("out")).unwrap();
        let a = ViewImage::from_fn(3, 2, |x, y| [x as u8, y as u8, 9]);
        let frame = compose(&a, &a).unwrap();
        for _ in 0..3 {
            sink.present(&frame).unwrap();
        }
        assert_eq!(sink.frames_written(), 3);
        for i in 0..3 {
            let p = dir.path().join("out").join(HeadlessSink::frame_name(i));
            assert_eq!(decode_file(&p).unwrap(), a);
        }
        assert_eq!(HeadlessSink::frame_name(12), "frame_000012.ppm");
    }
}
