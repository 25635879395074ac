use jpegcompat::forensics::{build_mask, AnalysisReport, BlockReport, MaskLabel, UnsolvedPolicy};
use jpegcompat::{
    analyze_image, compress_image, decompress_image, forge, make_pipeline, split_into_blocks, synthetic_image,
    CodecSettings, ColorImpl, DctImpl, Domain, ForgeryKind, ForgerySpec, ImagePlane, Label, QuantTable, Rect,
    SearchConfig, Stage, Verdict,
};

fn report(verdicts: &[Verdict]) -> AnalysisReport {
    AnalysisReport {
        grid_w: verdicts.len(),
        grid_h: 1,
        blocks: verdicts
            .iter()
            .enumerate()
            .map(|(x, &verdict)| BlockReport { x, y: 0, verdict, iterations: 0, clipped: false, cost: 0 })
            .collect(),
    }
}

fn single(qf: u32, ch: usize) -> jpegcompat::Pipeline {
    let t = QuantTable::from_qf(qf, ch).unwrap();
    make_pipeline(vec![Stage::decompress(t, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle)]).unwrap()
}

fn decoded(qf: u32, ch: usize, seed: u64) -> (ImagePlane, CodecSettings) {
    let s = CodecSettings::from_qf(qf, ch).unwrap();
    let img = synthetic_image(96, 64, ch, seed).unwrap();
    (decompress_image(&compress_image(&img, &s).unwrap(), &s).unwrap(), s)
}

#[test]
fn split_examples() {
    let img = |w, h| ImagePlane::new(w, h, 1, Domain::Pixel, vec![0; w * h]).unwrap();
    let b = split_into_blocks(&img(16, 16), false).unwrap();
    let coords: Vec<(usize, usize)> = b.iter().map(|g| (g.x, g.y)).collect();
    assert_eq!(coords, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    assert_eq!(split_into_blocks(&img(8, 8), false).unwrap().len(), 1);
    assert!(split_into_blocks(&img(12, 8), false).is_err());
    assert_eq!(split_into_blocks(&img(12, 8), true).unwrap().len(), 1);
}

#[test]
fn mask_examples() {
    let all = build_mask(&report(&[Verdict::Compatible; 3]), UnsolvedPolicy::Manipulated);
    assert!(all.labels.iter().all(|&l| l == MaskLabel::Authentic));
    let one = build_mask(&report(&[Verdict::Compatible, Verdict::Incompatible, Verdict::Compatible]), UnsolvedPolicy::Authentic);
    assert_eq!(one.labels, vec![MaskLabel::Authentic, MaskLabel::Manipulated, MaskLabel::Authentic]);
    let r = report(&[Verdict::Unsolved]);
    assert_eq!(build_mask(&r, UnsolvedPolicy::default()).labels, vec![MaskLabel::Manipulated]);
    assert_eq!(build_mask(&r, UnsolvedPolicy::Authentic).labels, vec![MaskLabel::Authentic]);
    let sep = build_mask(&report(&[Verdict::Unsolved, Verdict::Incompatible]), UnsolvedPolicy::Separate);
    let (pred, truth) = sep.scored_pairs(&[Label::Manipulated, Label::Manipulated]);
    assert_eq!((pred.len(), truth.len()), (1, 1));
}

#[test]
fn authentic_image_is_all_compatible() {
    let (d, _) = decoded(75, 3, 1);
    let r = analyze_image(&d, &single(75, 3), &SearchConfig { max_iterations: 2000, ..Default::default() }, 1).unwrap();
    assert_eq!((r.grid_w, r.grid_h), (12, 8));
    assert!(r.blocks.iter().filter(|b| !b.clipped).all(|b| b.verdict == Verdict::Compatible));
}

#[test]
fn blurred_region_is_flagged() {
    let (c, s) = decoded(60, 1, 2);
    let spec = ForgerySpec { kind: ForgeryKind::Blur { radius: 2 }, region: Rect { x: 20, y: 12, w: 30, h: 28 }, aligned: false, seed: 0 };
    let (d, truth) = forge(&c, &spec, &s, None).unwrap();
    let r = analyze_image(&d, &single(60, 1), &SearchConfig { max_iterations: 100, ..Default::default() }, 1).unwrap();
    for (b, &l) in r.blocks.iter().zip(&truth.labels) {
        if b.clipped {
            continue;
        }
        match l {
            Label::Authentic => assert_eq!(b.verdict, Verdict::Compatible),
            Label::Manipulated => assert_eq!(b.verdict, Verdict::Incompatible),
        }
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let (c, s) = decoded(75, 1, 3);
    let spec = ForgerySpec { kind: ForgeryKind::GridShift { dx: 3, dy: -5 }, region: Rect { x: 30, y: 20, w: 40, h: 30 }, aligned: false, seed: 0 };
    let (d, _) = forge(&c, &spec, &s, None).unwrap();
    let cfg = SearchConfig { max_iterations: 200, ..Default::default() };
    let base = analyze_image(&d, &single(75, 1), &cfg, 1).unwrap();
    for w in [4, 16] {
        assert_eq!(analyze_image(&d, &single(75, 1), &cfg, w).unwrap(), base);
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let (d, _) = decoded(75, 1, 4);
    let cfg = SearchConfig::default();
    assert!(analyze_image(&d, &single(75, 3), &cfg, 1).is_err());
    assert!(analyze_image(&d, &single(75, 1), &cfg, 0).is_err());
    let coefs = compress_image(&d, &CodecSettings::from_qf(75, 1).unwrap()).unwrap();
    assert!(analyze_image(&coefs, &single(75, 1), &cfg, 1).is_err());
}
