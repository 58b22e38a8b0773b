//! One JSON object per line (or per datagram):
//!
//! ```text
//! {"t_us":1000,"lx":300,"ly":240,"rx":340,"ry":240,"w":640,"h":480,"conf":1}
//! ```
//!
//! Canonical form has exactly these keys in this order with no whitespace.
//! `t_us`/`w`/`h` are integers; coordinates and `conf` use the shortest
//! decimal that round-trips. Lines are LF-terminated.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::gaze::{EyeSample, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireMessage {
    pub t_us: u64,
    pub lx: f64,
    pub ly: f64,
    pub rx: f64,
    pub ry: f64,
    pub w: u32,
    pub h: u32,
    pub conf: f64,
}

impl From<&EyeSample> for WireMessage {
    fn from(s: &EyeSample) -> Self {
        Self {
            t_us: s.t_us,
            lx: s.left.x,
            ly: s.left.y,
            rx: s.right.x,
            ry: s.right.y,
            w: s.frame_w,
            h: s.frame_h,
            conf: s.confidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("stale message: t_us {t_us} is not after {last}")]
    Stale { t_us: u64, last: u64 },
}

impl WireMessage {
    fn into_sample(self) -> Result<EyeSample, WireError> {
        if self.w == 0 || self.h == 0 {
            return Err(WireError::Malformed(format!(
                "frame size {}x{} must be positive",
                self.w, self.h
            )));
        }
        if !(0.0..=1.0).contains(&self.conf) {
            return Err(WireError::Malformed(format!(
                "conf {} outside [0, 1]",
                self.conf
            )));
        }
        Ok(EyeSample {
            t_us: self.t_us,
            left: Point::new(self.lx, self.ly),
            right: Point::new(self.rx, self.ry),
            frame_w: self.w,
            frame_h: self.h,
            confidence: self.conf,
        }
        .clamped())
    }
}

/// Canonical line for `sample`, including the trailing LF.
pub fn encode(sample: &EyeSample) -> String {
    let mut out = String::with_capacity(128);
    encode_into(sample, &mut out);
    out
}

/// Appends the canonical line to `out`.
pub fn encode_into(sample: &EyeSample, out: &mut String) {
    let m = WireMessage::from(sample);
    // f64 Display is the shortest round-trip decimal and drops a zero fraction
    let _ = writeln!(
        out,
        r#"{{"t_us":{},"lx":{},"ly":{},"rx":{},"ry":{},"w":{},"h":{},"conf":{}}}"#,
        m.t_us, m.lx, m.ly, m.rx, m.ry, m.w, m.h, m.conf
    );
}

/// Parses one message without any stream state. Coordinates are clamped
/// into the frame.
pub fn decode(bytes: &[u8]) -> Result<EyeSample, WireError> {
    let msg: WireMessage =
        serde_json::from_slice(bytes).map_err(|e| WireError::Malformed(e.to_string()))?;
    msg.into_sample()
}

/// Decoder for one session stream; rejects timestamps that do not advance.
#[derive(Debug, Clone, Default)]
pub struct StreamDecoder {
    last_t_us: Option<u64>,
}

impl StreamDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_t_us(&self) -> Option<u64> {
        self.last_t_us
    }

    pub fn decode(&mut self, bytes: &[u8]) -> Result<EyeSample, WireError> {
        let s = decode(bytes)?;
        if let Some(last) = self.last_t_us {
            if s.t_us <= last {
                return Err(WireError::Stale { t_us: s.t_us, last });
            }
        }
        self.last_t_us = Some(s.t_us);
        Ok(s)
    }
}
