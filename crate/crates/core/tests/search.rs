mod common;

use common::golden::{gen_blocks, SplitMix};
use jpegcompat::pipeline::{make_pipeline, Stage};
use jpegcompat::search::{find_antecedent_traced, neighbors, SearchSpace};
use jpegcompat::{
    compress_block, decompress_block, find_antecedent, is_clipped, run_backward, Block,
    BoundMode, CoefBlock, ColorImpl, DctImpl, PixelBlock, QuantTable, SearchConfig, Verdict,
};

fn decompress_pipeline(qf: u32) -> jpegcompat::Pipeline {
    let t = QuantTable::from_qf(qf, 1).unwrap();
    make_pipeline(vec![Stage::decompress(t, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle)]).unwrap()
}

fn box_blur(px: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; 64];
    for y in 0..8i32 {
        for x in 0..8i32 {
            let (mut s, mut n) = (0u32, 0u32);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (yy, xx) = (y + dy, x + dx);
                    if (0..8).contains(&yy) && (0..8).contains(&xx) {
                        s += px[(yy * 8 + xx) as usize] as u32;
                        n += 1;
                    }
                }
            }
            out[(y * 8 + x) as usize] = ((s + n / 2) / n) as u8;
        }
    }
    out
}

#[test]
fn decompressed_blocks_are_compatible() {
    let table = QuantTable::from_qf(75, 1).unwrap();
    let p = decompress_pipeline(75);
    let blocks = gen_blocks(&mut SplitMix(11), 200, 1);
    for chunk in blocks.chunks(64) {
        let px = PixelBlock::new(1, chunk.to_vec()).unwrap();
        let c = compress_block(&px, &table, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle).unwrap();
        let y = decompress_block(&c, &table, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle).unwrap();
        let out = find_antecedent(&Block::Pixels(y.clone()), &p, &SearchConfig::default()).unwrap();
        if is_clipped(&y) {
            continue;
        }
        assert_eq!(out.verdict, Verdict::Compatible);
        let a = out.antecedent.unwrap();
        assert_eq!(jpegcompat::run_forward(&p, &a).unwrap(), Block::Pixels(y));
    }
}

#[test]
fn incompatible_verdicts_cover_the_whole_ellipsoid() {
    let p = decompress_pipeline(75);
    let weights = p.input_weights();
    let blocks = gen_blocks(&mut SplitMix(5), 400, 1);
    let mut checked = 0;
    for chunk in blocks.chunks(64) {
        let px = PixelBlock::new(1, box_blur(chunk)).unwrap();
        if is_clipped(&px) {
            continue;
        }
        let obs = Block::Pixels(px);
        let (out, seen) = find_antecedent_traced(&obs, &p, &SearchConfig::default()).unwrap();
        if out.verdict != Verdict::Incompatible {
            continue;
        }
        let center = run_backward(&p, &obs).unwrap().data;
        let all = common::lattice::in_ellipsoid(&center, &weights, p.bound());
        let seen: std::collections::HashSet<Vec<i32>> = seen.into_iter().collect();
        for x in &all {
            assert!(seen.contains(x), "lattice point inside the radius was never tested");
            assert_ne!(p.forward(x), obs.to_ints());
        }
        checked += 1;
    }
    assert!(checked > 50, "only {checked} incompatible blocks");
}

#[test]
fn zero_radius_keeps_only_exact_hits() {
    let space = SearchSpace::weighted(jpegcompat::Domain::Dct, vec![1.0; 64]);
    let x = vec![0i32; 64];
    let mut center = vec![0.0; 64];
    assert!(neighbors(&x, &center, 0.0, false, &space).is_empty());
    center[3] = 1.0;
    let n = neighbors(&x, &center, 1.0, false, &space);
    assert_eq!(n.len(), 1);
    assert_eq!(n[0][3], 1);
}

#[test]
fn boundary_neighbour_moves_toward_center_only() {
    let space = SearchSpace::weighted(jpegcompat::Domain::Dct, vec![4.0; 64]);
    let mut x = vec![0i32; 64];
    let center = vec![0.0; 64];
    // Weighted distance of x is 2*3 = 6; the radius leaves a margin of 0.5.
    x[0] = 3;
    let n = neighbors(&x, &center, 6.5, false, &space);
    assert!(n.iter().all(|v| v[0] <= 3));
    assert!(n.iter().any(|v| v[0] == 2));
    // A clipped observation lifts the radius.
    let n = neighbors(&x, &center, 6.5, true, &space);
    assert!(n.iter().any(|v| v[0] == 4));
}

#[test]
fn pixel_neighbours_stay_in_range() {
    let space = SearchSpace::weighted(jpegcompat::Domain::Pixel, vec![1.0; 64]);
    let mut x = vec![128i32; 64];
    x[0] = 255;
    x[1] = 0;
    for n in neighbors(&x, &vec![128.0; 64], 1e9, false, &space) {
        assert!(n.iter().all(|&v| (0..=255).contains(&v)));
    }
}

#[test]
fn clipping_is_detected_on_samples() {
    let mut data = vec![100u8; 64];
    assert!(!is_clipped(&PixelBlock::new(1, data.clone()).unwrap()));
    data[10] = 255;
    assert!(is_clipped(&PixelBlock::new(1, data.clone()).unwrap()));
    data[10] = 0;
    assert!(is_clipped(&PixelBlock::new(1, data).unwrap()));
}

#[test]
fn unbounded_search_never_reports_incompatible() {
    let p = decompress_pipeline(90);
    let blocks = gen_blocks(&mut SplitMix(9), 30, 1);
    let cfg = SearchConfig { max_iterations: 20, bound: BoundMode::Disabled, ..Default::default() };
    for chunk in blocks.chunks(64) {
        let obs = Block::Pixels(PixelBlock::new(1, box_blur(chunk)).unwrap());
        let out = find_antecedent(&obs, &p, &cfg).unwrap();
        assert_ne!(out.verdict, Verdict::Incompatible);
        if out.verdict == Verdict::Unsolved {
            assert_eq!(out.iterations, 20);
        }
    }
}

#[test]
fn domain_mismatch_is_rejected() {
    let p = decompress_pipeline(75);
    let obs = Block::Coefs(CoefBlock::new(1, vec![0; 64]).unwrap());
    assert!(find_antecedent(&obs, &p, &SearchConfig::default()).is_err());
}

#[test]
fn forward_generated_blocks_are_never_incompatible() {
    let cfg = SearchConfig { max_iterations: 2000, ..Default::default() };
    let mut checked = 0;
    for (i, qf) in [50, 60, 75, 90].into_iter().enumerate() {
        for ch in [1, 3] {
            let img = jpegcompat::synthetic_image(if ch == 1 { 2048 } else { 1024 }, 640, ch, 40 + i as u64).unwrap();
            let s = jpegcompat::CodecSettings::from_qf(qf, ch).unwrap();
            let d = jpegcompat::decompress_image(&jpegcompat::compress_image(&img, &s).unwrap(), &s).unwrap();
            let p = make_pipeline(vec![Stage::decompress(s.table.clone(), s.dct, s.color)]).unwrap();
            let r = jpegcompat::analyze_image(&d, &p, &cfg, 1).unwrap();
            assert_eq!(r.count(Verdict::Incompatible), 0, "qf {qf}, {ch} channels");
            checked += r.blocks.len();
        }
    }
    assert!(checked >= 100_000);
}

#[test]
fn compressed_blocks_have_pixel_antecedents() {
    let table = QuantTable::from_qf(75, 1).unwrap();
    let p = make_pipeline(vec![Stage::compress(table.clone(), DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle)]).unwrap();
    let img = jpegcompat::synthetic_image(320, 200, 1, 21).unwrap();
    let mut checked = 0;
    for by in 0..25 {
        for bx in 0..40 {
            let mut b = vec![0; 64];
            img.block_ints(bx, by, &mut b);
            let px = PixelBlock::new(1, b.iter().map(|&v| v as u8).collect()).unwrap();
            let c = compress_block(&px, &table, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle).unwrap();
            let obs = Block::Coefs(c);
            let out = find_antecedent(&obs, &p, &SearchConfig::default()).unwrap();
            assert_eq!(out.verdict, Verdict::Compatible);
            assert_eq!(jpegcompat::run_forward(&p, &out.antecedent.unwrap()).unwrap(), obs);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn decoded_constant_blocks_are_compatible() {
    for qf in [50, 60, 75, 90] {
        let table = QuantTable::from_qf(qf, 1).unwrap();
        let p = decompress_pipeline(qf);
        for dc in -20..=20 {
            let mut c = vec![0; 64];
            c[0] = dc;
            let y = decompress_block(&CoefBlock::new(1, c).unwrap(), &table, DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle)
                .unwrap();
            assert!(y.data().iter().all(|&v| v == y.data()[0]));
            let out = find_antecedent(&Block::Pixels(y), &p, &SearchConfig::default()).unwrap();
            assert_eq!(out.verdict, Verdict::Compatible, "qf {qf}, dc {dc}");
        }
    }
}

#[test]
fn unreachable_constant_is_incompatible() {
    // DC steps of 16 move a flat block in steps of 2 levels: 201 is between.
    let p = decompress_pipeline(50);
    let obs = Block::Pixels(PixelBlock::new(1, vec![201; 64]).unwrap());
    assert_eq!(find_antecedent(&obs, &p, &SearchConfig::default()).unwrap().verdict, Verdict::Incompatible);
}

#[test]
fn searches_are_deterministic_and_budget_monotone() {
    let p = decompress_pipeline(90);
    let blocks = gen_blocks(&mut SplitMix(17), 40, 1);
    for chunk in blocks.chunks(64) {
        let obs = Block::Pixels(PixelBlock::new(1, box_blur(chunk)).unwrap());
        let small = SearchConfig { max_iterations: 50, ..Default::default() };
        let a = find_antecedent(&obs, &p, &small).unwrap();
        assert_eq!(a, find_antecedent(&obs, &p, &small).unwrap());
        if a.verdict == Verdict::Compatible {
            let big = find_antecedent(&obs, &p, &SearchConfig { max_iterations: 500, ..Default::default() }).unwrap();
            assert_eq!((big.verdict, big.antecedent), (Verdict::Compatible, a.antecedent));
        }
    }
}

#[test]
fn unbounded_neighbourhood_has_every_single_step() {
    let space = SearchSpace::weighted(jpegcompat::Domain::Dct, vec![1.0; 64]);
    assert_eq!(neighbors(&vec![0; 64], &vec![0.0; 64], f64::INFINITY, false, &space).len(), 128);
}
