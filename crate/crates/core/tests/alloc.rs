//! Steady-state frames must not touch the heap.

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::time::Duration;

use pforge_core::gaze::{EyeSample, GazeTracker, GridConfig, Point, SmoothingFilter};
use pforge_core::lightfield::demo_grid;
use pforge_core::viewer::{FrameSink, HeadlessSink, NullSink, Renderer};

struct Counting;

thread_local! {
    static TRACKING: Cell<bool> = const { Cell::new(false) };
    static COUNT: Cell<u64> = const { Cell::new(0) };
}

fn note() {
    // try_with: the allocator can run while thread locals are torn down
    let _ = TRACKING.try_with(|t| {
        if t.get() {
            let _ = COUNT.try_with(|c| c.set(c.get() + 1));
        }
    });
}

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        note();
        unsafe { System.alloc(layout) }
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) }
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        note();
        unsafe { System.realloc(ptr, layout, new_size) }
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

fn allocations_during(f: impl FnOnce()) -> u64 {
    COUNT.with(|c| c.set(0));
    TRACKING.with(|t| t.set(true));
    f();
    TRACKING.with(|t| t.set(false));
    COUNT.with(|c| c.get())
}

fn sample(i: u64) -> EyeSample {
    let x = 320.0 + 200.0 * (i as f64 * 0.13).sin();
    EyeSample {
        t_us: i * 16_667,
        left: Point::new(x - 30.0, 240.0 + (i % 40) as f64),
        right: Point::new(x + 30.0, 240.0 - (i % 40) as f64),
        frame_w: 640,
        frame_h: 480,
        confidence: if i.is_multiple_of(11) { 0.1 } else { 1.0 },
    }
}

fn steady_state(sink: &mut dyn FrameSink) -> u64 {
    let grid = demo_grid(9, 9, 64, 48);
    let layout = GridConfig::new(9, 9, 40.0, 640, 480).unwrap();
    let tracker = GazeTracker::new(SmoothingFilter::new(5).unwrap());
    let mut renderer = Renderer::new(&grid, layout, tracker).unwrap();
    // warm up: fills the metric rings and any lazily created state
    for i in 0..200 {
        renderer.step(Some(sample(i)), Duration::ZERO, sink).unwrap();
    }
    allocations_during(|| {
        for i in 200..500 {
            let s = if i % 17 == 0 { None } else { Some(sample(i)) };
            renderer.step(s, Duration::from_micros(3), sink).unwrap();
        }
        let _ = renderer.metrics().report();
    })
}

#[test]
fn render_step_does_not_allocate() {
    let mut sink = NullSink::default();
    assert_eq!(steady_state(&mut sink), 0);
    assert_eq!(sink.presented, 500);
}

#[test]
fn headless_presentation_does_not_allocate() {
    let dir = tempfile::tempdir().unwrap();
    let mut sink = HeadlessSink::new(dir.path()).unwrap();
    assert_eq!(steady_state(&mut sink), 0);
    assert_eq!(sink.frames_written(), 500);
}

#[test]
fn counter_sees_allocations() {
    let n = allocations_during(|| {
        std::hint::black_box(vec![1u8; 64]);
    });
    assert_eq!(n, 1);
}
