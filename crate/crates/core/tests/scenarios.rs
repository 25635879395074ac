use jpegcompat::experiment::{cell_pipeline, ExperimentConfig};
use jpegcompat::scenarios::{sample_forgery, sample_region, DonorSpec, SurrogateKind};
use jpegcompat::{
    analyze_image, decompress_image, compress_image, forge, recompress_scenario, synthetic_image, CodecSettings,
    DctImpl, ForgeryKind, ForgerySpec, ImagePlane, Label, MismatchClass, Rect, SearchConfig, Verdict,
};
use rand::SeedableRng;

fn host(qf: u32, ch: usize) -> (ImagePlane, CodecSettings) {
    let s = CodecSettings::from_qf(qf, ch).unwrap();
    let img = synthetic_image(64, 64, ch, 3).unwrap();
    (decompress_image(&compress_image(&img, &s).unwrap(), &s).unwrap(), s)
}

fn spec(kind: ForgeryKind, region: Rect, aligned: bool) -> ForgerySpec {
    ForgerySpec { kind, region, aligned, seed: 1 }
}

fn manipulated(t: &jpegcompat::GroundTruth) -> Vec<usize> {
    t.labels.iter().enumerate().filter(|(_, &l)| l == Label::Manipulated).map(|(i, _)| i).collect()
}

#[test]
fn blur_of_one_block_marks_that_block() {
    let (c, s) = host(75, 1);
    let sp = spec(ForgeryKind::Blur { radius: 2 }, Rect { x: 24, y: 16, w: 8, h: 8 }, false);
    let (_, t) = forge(&c, &sp, &s, None).unwrap();
    assert_eq!(manipulated(&t), vec![2 * 8 + 3]);
    assert_eq!(t.classes[19], Some(MismatchClass::Grid));
}

#[test]
fn aligned_copy_move_has_no_mismatch() {
    let (c, s) = host(75, 1);
    let sp = spec(ForgeryKind::CopyMove { src_x: 0, src_y: 0 }, Rect { x: 32, y: 32, w: 16, h: 16 }, true);
    let (_, t) = forge(&c, &sp, &s, None).unwrap();
    assert_eq!(t.n_manipulated(), 4);
    assert!(manipulated(&t).iter().all(|&i| t.classes[i] == Some(MismatchClass::None)));
}

#[test]
fn aligned_splice_classes() {
    let (c, s) = host(60, 1);
    let region = Rect { x: 16, y: 16, w: 24, h: 24 };
    let donor = |qf, dct| ForgeryKind::Splice { donor: DonorSpec { qf, dct, color: Default::default(), offset_x: 0, offset_y: 0 } };
    let (_, t) = forge(&c, &spec(donor(90, DctImpl::IntegerSlow), region, true), &s, None).unwrap();
    assert_eq!(t.n_manipulated(), 9);
    assert!(manipulated(&t).iter().all(|&i| t.classes[i] == Some(MismatchClass::Quantization)));
    let (_, t) = forge(&c, &spec(donor(60, DctImpl::FloatFast), region, true), &s, None).unwrap();
    assert!(manipulated(&t).iter().all(|&i| t.classes[i] == Some(MismatchClass::Pipeline)));
    // A region off the grid but in phase with it: partially covered blocks
    // are grid mismatches, the fully covered ones keep the donor's class.
    let region = Rect { x: 13, y: 13, w: 20, h: 20 };
    let (_, t) = forge(&c, &spec(donor(90, DctImpl::IntegerSlow), region, false), &s, None).unwrap();
    assert_eq!(t.n_manipulated(), 16);
    for i in manipulated(&t) {
        let want = if [18, 19, 26, 27].contains(&i) { MismatchClass::Quantization } else { MismatchClass::Grid };
        assert_eq!(t.classes[i], Some(want), "block {i}");
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let (c, s) = host(75, 1);
    let bad = [
        spec(ForgeryKind::Blur { radius: 2 }, Rect { x: 60, y: 0, w: 8, h: 8 }, false),
        spec(ForgeryKind::Blur { radius: 0 }, Rect { x: 0, y: 0, w: 8, h: 8 }, false),
        spec(ForgeryKind::GridShift { dx: 8, dy: -16 }, Rect { x: 16, y: 16, w: 8, h: 8 }, false),
        spec(ForgeryKind::CopyMove { src_x: 3, src_y: 0 }, Rect { x: 16, y: 16, w: 8, h: 8 }, true),
        spec(ForgeryKind::CopyMove { src_x: 0, src_y: 0 }, Rect { x: 17, y: 16, w: 8, h: 8 }, true),
        spec(ForgeryKind::CopyMove { src_x: 60, src_y: 0 }, Rect { x: 16, y: 16, w: 8, h: 8 }, false),
    ];
    for sp in bad {
        assert!(forge(&c, &sp, &s, None).is_err(), "{sp:?}");
    }
}

#[test]
fn forgeries_are_reproducible_and_masks_consistent() {
    let (c, s) = host(75, 3);
    for seed in 0..10 {
        for kind in [SurrogateKind::Blur, SurrogateKind::Shift] {
            let sp = sample_forgery(kind, 64, 64, seed);
            assert_eq!(sp, sample_forgery(kind, 64, 64, seed));
            let (d1, t1) = forge(&c, &sp, &s, None).unwrap();
            let (d2, t2) = forge(&c, &sp, &s, None).unwrap();
            assert_eq!((d1.samples(), &t1), (d2.samples(), &t2));
            for ch in 0..3 {
                for y in 0..64 {
                    for x in 0..64 {
                        let differs = c.get(ch, x, y) != d1.get(ch, x, y);
                        assert!(!differs || sp.region.contains(x, y));
                        if differs {
                            assert_eq!(t1.labels[(y / 8) * 8 + x / 8], Label::Manipulated);
                        }
                    }
                }
            }
            for i in manipulated(&t1) {
                let (bx, by) = (i % 8, i / 8);
                let same = (0..3).all(|ch| {
                    (0..64).all(|p| c.get(ch, bx * 8 + p % 8, by * 8 + p / 8) == d1.get(ch, bx * 8 + p % 8, by * 8 + p / 8))
                });
                assert!(!same);
            }
        }
    }
}

#[test]
fn grid_shift_never_copies_a_whole_host_block() {
    for seed in 0..50 {
        let sp = sample_forgery(SurrogateKind::Shift, 64, 64, seed);
        let ForgeryKind::GridShift { dx, dy } = sp.kind else { panic!() };
        let r = sp.region;
        for by in 0..8 {
            for bx in 0..8 {
                let (x0, y0) = (bx * 8, by * 8);
                if !(r.contains(x0, y0) && r.contains(x0 + 7, y0 + 7)) {
                    continue;
                }
                let (sx, sy) = (x0 as i64 + dx, y0 as i64 + dy);
                assert!(sx.rem_euclid(8) != 0 || sy.rem_euclid(8) != 0);
            }
        }
    }
}

#[test]
fn sampled_regions_cover_five_to_twenty_percent() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let r = sample_region(256, 192, false, &mut rng);
        let share = (r.w * r.h) as f64 / (256.0 * 192.0);
        assert!((0.04..=0.21).contains(&share), "{share}");
        assert!(r.x + r.w <= 256 && r.y + r.h <= 192);
        assert!(sample_region(256, 192, true, &mut rng).is_aligned());
    }
}

#[test]
fn authentic_double_compression_stays_compatible() {
    let (c, s) = host(75, 1);
    let (_, f) = recompress_scenario(&c, &s).unwrap();
    let cfg = ExperimentConfig::default();
    let p = cell_pipeline(&cfg, 1, 75, Some(75)).unwrap();
    let r = analyze_image(&f, &p, &SearchConfig { max_iterations: 1000, ..Default::default() }, 1).unwrap();
    assert!(r.blocks.iter().filter(|b| !b.clipped).all(|b| b.verdict == Verdict::Compatible));
}
