use jpegcompat::codec::color::{rgb_to_ycc_exact, ycc_to_rgb_exact, RGB_TO_YCC};
use jpegcompat::codec::{color_forward, forward_dct, inverse_dct};
use jpegcompat::{compress_block, decompress_block, CoefBlock, ColorImpl, DctImpl, PixelBlock, QuantTable};
use proptest::prelude::*;

const ALL_DCT: [DctImpl; 3] = [DctImpl::IntegerSlow, DctImpl::FloatFast, DctImpl::ExactOrthonormal];

#[test]
fn quality_factor_tables() {
    assert!(QuantTable::from_qf(100, 1).unwrap().steps().iter().all(|&q| q == 1));
    assert_eq!(QuantTable::from_qf(50, 1).unwrap().steps()[0], 16);
    assert_eq!(QuantTable::from_qf(50, 3).unwrap().channel(1)[0], 17);
    let (q90, q50) = (QuantTable::from_qf(90, 3).unwrap(), QuantTable::from_qf(50, 3).unwrap());
    assert!(q90.steps().iter().zip(q50.steps()).all(|(a, b)| a <= b));
    assert!(QuantTable::from_qf(1, 1).unwrap().steps().iter().all(|&q| (1..=255).contains(&q)));
    assert!(QuantTable::from_qf(0, 1).is_err());
    assert!(QuantTable::from_qf(101, 1).is_err());
    assert!(QuantTable::from_qf(75, 2).is_err());
}

#[test]
fn constant_plane_has_only_a_dc_term() {
    for dct in ALL_DCT {
        let c = forward_dct(&[200; 64], dct);
        assert!((c[0] - 8.0 * 72.0).abs() < 1e-6, "{dct:?}");
        assert!(c[1..].iter().all(|v| v.abs() < 1e-6), "{dct:?}");
    }
}

#[test]
fn impulse_gives_a_basis_column() {
    let mut x = [0u8; 64];
    x[9] = 255;
    let c = forward_dct(&x, DctImpl::ExactOrthonormal);
    let level = forward_dct(&[0; 64], DctImpl::ExactOrthonormal);
    let s = |k: usize, n: usize| {
        let a = if k == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
        a * ((2 * n + 1) as f64 * k as f64 * std::f64::consts::PI / 16.0).cos()
    };
    for v in 0..8 {
        for u in 0..8 {
            let want = 255.0 * s(v, 1) * s(u, 1);
            assert!((c[v * 8 + u] - level[v * 8 + u] - want).abs() < 1e-9);
        }
    }
}

#[test]
fn inverse_of_simple_planes() {
    for dct in ALL_DCT {
        assert!(inverse_dct(&[0.0; 64], dct).iter().all(|&v| v == 128.0), "{dct:?}");
    }
    let mut c = [0.0; 64];
    c[0] = 80.0;
    assert!(inverse_dct(&c, DctImpl::ExactOrthonormal).iter().all(|&v| (v - 138.0).abs() < 1e-12));
}

#[test]
fn color_examples() {
    assert_eq!(color_forward([0.0; 3], ColorImpl::IntegerLibStyle), [0.0, 128.0, 128.0]);
    assert_eq!(color_forward([255.0; 3], ColorImpl::IntegerLibStyle), [255.0, 128.0, 128.0]);
    let w = rgb_to_ycc_exact([255.0; 3]);
    assert!((w[0] - 255.0).abs() < 1e-9 && (w[1] - 128.0).abs() < 1e-9 && (w[2] - 128.0).abs() < 1e-9);
    for row in RGB_TO_YCC {
        assert!(row.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + 1e-12);
    }
}

#[test]
fn block_examples() {
    let t = QuantTable::from_qf(75, 1).unwrap();
    let (d, c) = (DctImpl::IntegerSlow, ColorImpl::IntegerLibStyle);
    let gray = PixelBlock::new(1, vec![128; 64]).unwrap();
    assert!(compress_block(&gray, &t, d, c).unwrap().data().iter().all(|&v| v == 0));
    let zero = CoefBlock::new(1, vec![0; 64]).unwrap();
    assert!(decompress_block(&zero, &t, d, c).unwrap().data().iter().all(|&v| v == 128));
    let mut big = vec![0; 64];
    big[0] = 200;
    let out = decompress_block(&CoefBlock::new(1, big).unwrap(), &t, d, c).unwrap();
    assert!(out.data().iter().all(|&v| v == 255));
    assert!(jpegcompat::is_clipped(&out));
    let color = QuantTable::from_qf(75, 3).unwrap();
    assert!(compress_block(&gray, &color, d, c).is_err());
}

#[test]
fn identity_quantization_rounds_the_transform() {
    let t = QuantTable::from_qf(100, 1).unwrap();
    let px: Vec<u8> = (0..64).map(|i| (i * 37 % 251) as u8).collect();
    let raw = forward_dct(&px.clone().try_into().unwrap(), DctImpl::ExactOrthonormal);
    let c = compress_block(&PixelBlock::new(1, px).unwrap(), &t, DctImpl::ExactOrthonormal, ColorImpl::IntegerLibStyle)
        .unwrap();
    for (a, b) in c.data().iter().zip(raw) {
        assert_eq!(*a, b.round() as i32);
    }
}

#[test]
fn invalid_blocks_are_rejected() {
    assert!(PixelBlock::new(2, vec![0; 128]).is_err());
    assert!(PixelBlock::new(1, vec![0; 63]).is_err());
    assert!(CoefBlock::new(3, vec![0; 64]).is_err());
}

proptest! {
    #[test]
    fn exact_dct_is_unitary(px in prop::collection::vec(any::<u8>(), 64)) {
        let arr: [u8; 64] = px.clone().try_into().unwrap();
        let c = forward_dct(&arr, DctImpl::ExactOrthonormal);
        let x2: f64 = px.iter().map(|&v| (v as f64 - 128.0).powi(2)).sum();
        let c2: f64 = c.iter().map(|v| v * v).sum();
        prop_assert!((x2 - c2).abs() <= 1e-9 * x2.max(1.0));
        let back = inverse_dct(&c, DctImpl::ExactOrthonormal);
        for (a, b) in back.iter().zip(&px) {
            prop_assert!((a - *b as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_color_round_trips(r in 0.0..255.0f64, g in 0.0..255.0f64, b in 0.0..255.0f64) {
        let back = ycc_to_rgb_exact(rgb_to_ycc_exact([r, g, b]));
        prop_assert!((back[0] - r).abs() < 1e-9 && (back[1] - g).abs() < 1e-9 && (back[2] - b).abs() < 1e-9);
    }

    #[test]
    fn integer_color_rounds_to_nearest(r in 0u8.., g in 0u8.., b in 0u8..) {
        let rgb = [r as f64, g as f64, b as f64];
        let int = color_forward(rgb, ColorImpl::IntegerLibStyle);
        let exact = rgb_to_ycc_exact(rgb);
        for k in 0..3 {
            prop_assert!((int[k] - exact[k].clamp(0.0, 255.0)).abs() <= 0.5 + 1e-6);
        }
    }

    #[test]
    fn exact_round_trip_error_stays_within_four(px in prop::collection::vec(30u8..225, 64)) {
        let t = QuantTable::from_qf(100, 1).unwrap();
        let (d, c) = (DctImpl::ExactOrthonormal, ColorImpl::IntegerLibStyle);
        let x = PixelBlock::new(1, px).unwrap();
        let y = decompress_block(&compress_block(&x, &t, d, c).unwrap(), &t, d, c).unwrap();
        let e2: f64 = x.data().iter().zip(y.data()).map(|(a, b)| (*a as f64 - *b as f64).powi(2)).sum();
        prop_assert!(e2.sqrt() <= 4.0 + 1e-9);
    }
}
