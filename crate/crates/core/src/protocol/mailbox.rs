//! Latest-value slot between one ingestion context and any number of readers.
//!
//! Writes overwrite; readers only ever see the newest complete sample. The
//! slot is a sequence lock over atomic words: the writer never waits, and a
//! reader retries only while a write is in flight, so a reader can never
//! observe a mix of two samples.

use std::sync::atomic::{fence, AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use crate::gaze::{EyeSample, Point};

const WORDS: usize = 7;

#[derive(Debug, Default)]
struct Slot {
    // even = stable, odd = write in progress; version = seq / 2
    seq: AtomicU64,
    words: [AtomicU64; WORDS],
    closed: AtomicBool,
}

fn pack(s: &EyeSample) -> [u64; WORDS] {
    [
        s.t_us,
        s.left.x.to_bits(),
        s.left.y.to_bits(),
        s.right.x.to_bits(),
        s.right.y.to_bits(),
        (u64::from(s.frame_w) << 32) | u64::from(s.frame_h),
        s.confidence.to_bits(),
    ]
}

fn unpack(w: [u64; WORDS]) -> EyeSample {
    EyeSample {
        t_us: w[0],
        left: Point::new(f64::from_bits(w[1]), f64::from_bits(w[2])),
        right: Point::new(f64::from_bits(w[3]), f64::from_bits(w[4])),
        frame_w: (w[5] >> 32) as u32,
        frame_h: w[5] as u32,
        confidence: f64::from_bits(w[6]),
    }
}

/// Reading side of the slot. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Mailbox {
    slot: Arc<Slot>,
}

/// The single writer. Not `Clone`; dropping it closes the mailbox.
#[derive(Debug)]
pub struct MailboxWriter {
    slot: Arc<Slot>,
}

impl Mailbox {
    pub fn new() -> (MailboxWriter, Mailbox) {
        let slot = Arc::new(Slot::default());
        (MailboxWriter { slot: slot.clone() }, Mailbox { slot })
    }

    /// Number of samples published so far.
    pub fn version(&self) -> u64 {
        self.slot.seq.load(Ordering::Acquire) / 2
    }

    /// The newest sample and its version, or `None` if nothing was published.
    pub fn latest(&self) -> Option<(u64, EyeSample)> {
        loop {
            let before = self.slot.seq.load(Ordering::Acquire);
            if before == 0 {
                return None;
            }
            if before % 2 == 1 {
                std::hint::spin_loop();
                continue;
            }
            let mut w = [0u64; WORDS];
            for (dst, src) in w.iter_mut().zip(&self.slot.words) {
                *dst = src.load(Ordering::Relaxed);
            }
            fence(Ordering::Acquire);
            if self.slot.seq.load(Ordering::Relaxed) == before {
                return Some((before / 2, unpack(w)));
            }
        }
    }

    /// The newest sample if it is newer than `seen`.
    pub fn newer_than(&self, seen: u64) -> Option<(u64, EyeSample)> {
        if self.version() <= seen {
            return None;
        }
        self.latest().filter(|(v, _)| *v > seen)
    }

    /// True once the writer is gone; no further samples will arrive.
    pub fn is_closed(&self) -> bool {
        self.slot.closed.load(Ordering::Acquire)
    }
}

impl MailboxWriter {
    pub fn publish(&mut self, sample: &EyeSample) {
        let seq = self.slot.seq.load(Ordering::Relaxed);
        self.slot.seq.store(seq + 1, Ordering::Relaxed);
        fence(Ordering::Release);
        for (dst, v) in self.slot.words.iter().zip(pack(sample)) {
            dst.store(v, Ordering::Relaxed);
        }
        self.slot.seq.store(seq + 2, Ordering::Release);
    }

    pub fn reader(&self) -> Mailbox {
        Mailbox {
            slot: self.slot.clone(),
        }
    }
}

impl Drop for MailboxWriter {
    fn drop(&mut self) {
        self.slot.closed.store(true, Ordering::Release);
    }
}
