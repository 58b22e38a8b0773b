mod common;

use pforge_core::anaglyph::{compose, compose_into, AnaglyphFrame};
use pforge_core::gaze::{EyeSample, GazeTracker, Point, SmoothingFilter};
use pforge_core::view::ViewImage;
use proptest::prelude::*;

fn sample(t_us: u64, c: [f64; 4], confidence: f64) -> EyeSample {
    EyeSample {
        t_us,
        left: Point::new(c[0], c[1]),
        right: Point::new(c[2], c[3]),
        frame_w: 640,
        frame_h: 480,
        confidence,
    }
}

fn coords() -> impl Strategy<Value = [f64; 4]> {
    [0.0f64..640.0, 0.0f64..480.0, 0.0f64..640.0, 0.0f64..480.0]
}

fn image(w: u32, h: u32) -> impl Strategy<Value = ViewImage> {
    proptest::collection::vec(any::<u8>(), (w * h * 3) as usize)
        .prop_map(move |px| ViewImage::new(w, h, px).unwrap())
}

fn image_pair() -> impl Strategy<Value = (ViewImage, ViewImage)> {
    (1u32..24, 1u32..24).prop_flat_map(|(w, h)| (image(w, h), image(w, h)))
}

proptest! {
    #[test]
    fn smoothing_equals_windowed_mean(k in 1usize..40, seq in proptest::collection::vec(coords(), 1..120)) {
        let mut filter = SmoothingFilter::new(k).unwrap();
        for (i, c) in seq.iter().enumerate() {
            let out = filter.smooth(sample(i as u64, *c, 1.0));
            let start = (i + 1).saturating_sub(k);
            let window = &seq[start..=i];
            let expected: Vec<f64> = (0..4)
                .map(|j| common::resum_mean(&window.iter().map(|c| c[j]).collect::<Vec<_>>()))
                .collect();
            let got = [out.left.x, out.left.y, out.right.x, out.right.y];
            for j in 0..4 {
                prop_assert!((got[j] - expected[j]).abs() <= 1e-9, "k={} i={} got={} want={}", k, i, got[j], expected[j]);
            }
            prop_assert_eq!(out.t_us, i as u64);
        }
    }

    #[test]
    fn smoothed_output_stays_within_window_hull(k in 1usize..10, seq in proptest::collection::vec(coords(), 1..60)) {
        let mut filter = SmoothingFilter::new(k).unwrap();
        for (i, c) in seq.iter().enumerate() {
            let out = filter.smooth(sample(i as u64, *c, 1.0));
            let window = &seq[(i + 1).saturating_sub(k)..=i];
            let lo = window.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
            let hi = window.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(out.left.x >= lo - 1e-9 && out.left.x <= hi + 1e-9);
        }
    }

    #[test]
    fn dropouts_hold_the_last_position(
        seq in proptest::collection::vec((coords(), 0.0f64..1.0), 1..80),
    ) {
        let mut tracker = GazeTracker::new(SmoothingFilter::new(3).unwrap());
        let mut reference = SmoothingFilter::new(3).unwrap();
        let mut last = None;
        for (i, (c, conf)) in seq.iter().enumerate() {
            let s = sample(i as u64, *c, *conf);
            if *conf >= 0.5 {
                last = Some(reference.smooth(s));
            }
            prop_assert_eq!(tracker.update(Some(s)), last);
            prop_assert_eq!(tracker.update(None), last);
        }
    }

    #[test]
    fn anaglyph_red_from_left_green_blue_from_right((l, r) in image_pair()) {
        let out = compose(&l, &r).unwrap();
        prop_assert_eq!(out.dimensions(), l.dimensions());
        for ((o, a), b) in out.pixels().chunks_exact(3).zip(l.pixels().chunks_exact(3)).zip(r.pixels().chunks_exact(3)) {
            prop_assert_eq!(o, &[a[0], b[1], b[2]][..]);
        }
    }

    #[test]
    fn anaglyph_of_identical_views_is_the_view(img in (1u32..24, 1u32..24).prop_flat_map(|(w, h)| image(w, h))) {
        let out = compose(&img, &img).unwrap();
        prop_assert_eq!(out.into_image(), img);
    }

    #[test]
    fn anaglyph_is_deterministic_and_buffer_reuse_agrees((l, r) in image_pair()) {
        let a = compose(&l, &r).unwrap();
        let b = compose(&l, &r).unwrap();
        prop_assert_eq!(&a, &b);
        let mut reused = AnaglyphFrame::with_size(3, 3);
        compose_into(&r, &l, &mut reused).unwrap();
        compose_into(&l, &r, &mut reused).unwrap();
        prop_assert_eq!(&reused, &a);
    }
}

#[test]
fn mismatched_views_are_rejected() {
    let a = ViewImage::solid(4, 4, [1, 2, 3]);
    let b = ViewImage::solid(4, 5, [1, 2, 3]);
    assert!(compose(&a, &b).is_err());
    let mut out = AnaglyphFrame::default();
    assert!(compose_into(&a, &b, &mut out).is_err());
}
