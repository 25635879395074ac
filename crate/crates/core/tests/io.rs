use jpegcompat::io::{encode_jpeg, parse_jpeg, read_png, render_verdict_mask, write_png, EncodeOptions, MASK_PALETTE};
use jpegcompat::{
    build_mask, compress_image, decompress_image, synthetic_image, AnalysisReport, BlockReport, CodecSettings, Domain,
    Error, ImagePlane, UnsolvedPolicy, Verdict,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/jpeg");

#[derive(Deserialize)]
struct Dump {
    file: String,
    width: usize,
    height: usize,
    components: usize,
    restart_interval: u16,
    qtables: Vec<Vec<u16>>,
    blocks: Vec<[usize; 2]>,
    coef_sha256: Vec<String>,
    pixels_sha256: String,
}

fn dumps() -> Vec<Dump> {
    std::fs::read_to_string(format!("{FIXTURES}/libjpeg_dump.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(format!("{FIXTURES}/{name}")).unwrap()
}

#[test]
fn parsed_coefficients_and_pixels_match_reference_decoder() {
    let all = dumps();
    assert!(all.len() >= 5);
    for d in all {
        let m = parse_jpeg(&read(&d.file)).unwrap();
        assert_eq!((m.width, m.height, m.components.len()), (d.width, d.height, d.components), "{}", d.file);
        assert_eq!(m.restart_interval, d.restart_interval, "{}", d.file);
        for c in 0..d.components {
            assert_eq!(m.qtables[c].to_vec(), d.qtables[c], "{} table {c}", d.file);
            assert_eq!([m.components[c].blocks_w, m.components[c].blocks_h], d.blocks[c]);
            let raw: Vec<u8> = m.coefficients[c].iter().flat_map(|&v| (v as i16).to_le_bytes()).collect();
            assert_eq!(sha_hex(&raw), d.coef_sha256[c], "{} coefficients of component {c}", d.file);
        }
        let settings = CodecSettings::new(m.quant_table().unwrap(), Default::default(), Default::default());
        let pixels = decompress_image(&m.to_coef_image().unwrap(), &settings).unwrap();
        let pixels = pixels.cropped(d.width, d.height).unwrap();
        assert_eq!(sha_hex(&pixels.to_interleaved()), d.pixels_sha256, "{} pixels", d.file);
    }
}

#[test]
fn own_encoder_output_is_frozen_and_reference_decodable() {
    for (name, w, h, ch, qf, ri, seed) in
        [("ours_gray_q80.jpg", 48, 40, 1, 80, 0u16, 1u64), ("ours_color_q70_dri.jpg", 32, 24, 3, 70, 3, 2)]
    {
        let set = CodecSettings::from_qf(qf, ch).unwrap();
        let e = compress_image(&synthetic_image(w, h, ch, seed).unwrap(), &set).unwrap();
        let bytes = encode_jpeg(&e, &set.table, &EncodeOptions { frame: None, restart_interval: ri }).unwrap();
        assert_eq!(bytes, read(name), "{name}");
    }
}

#[test]
fn encode_parse_round_trip_is_exact() {
    for (ch, qf, ri) in [(1, 50, 0), (3, 95, 1), (3, 100, 5), (1, 100, 7)] {
        let set = CodecSettings::from_qf(qf, ch).unwrap();
        let e = compress_image(&synthetic_image(72, 56, ch, qf as u64).unwrap(), &set).unwrap();
        let bytes = encode_jpeg(&e, &set.table, &EncodeOptions { frame: Some((70, 50)), restart_interval: ri }).unwrap();
        let m = parse_jpeg(&bytes).unwrap();
        assert_eq!((m.width, m.height), (70, 50));
        assert_eq!(m.to_coef_image().unwrap(), e);
        assert_eq!(m.quant_table().unwrap(), set.table);
        assert_eq!(parse_jpeg(&bytes).unwrap(), m);
    }
}

#[test]
fn unsupported_streams_name_the_marker() {
    for (file, marker) in
        [("color420_q75.jpg", "SOF0"), ("progressive_q75.jpg", "SOF2"), ("arithmetic_q75.jpg", "SOF9")]
    {
        let err = parse_jpeg(&read(file)).unwrap_err();
        assert!(err.is_format_error(), "{file}: {err}");
        assert!(err.to_string().contains(marker), "{file}: {err}");
    }
    let mut twelve = read("gray_q75.jpg");
    let sof = twelve.windows(2).position(|w| w == [0xFF, 0xC0]).unwrap();
    twelve[sof + 4] = 12;
    let err = parse_jpeg(&twelve).unwrap_err();
    assert!(err.is_format_error() && err.to_string().contains("12-bit"), "{err}");
}

#[test]
fn truncated_streams_are_errors() {
    let full = read("color444_q90_dri.jpg");
    for cut in [0, 1, 2, 10, full.len() / 2, full.len() - 40, full.len() - 2] {
        assert!(matches!(parse_jpeg(&full[..cut]), Err(Error::Malformed(_))), "cut at {cut}");
    }
}

#[test]
fn png_round_trip_and_rejections() {
    for ch in [1, 3] {
        let img = synthetic_image(24, 16, ch, 3).unwrap();
        assert_eq!(read_png(&write_png(&img).unwrap()).unwrap(), img);
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, 4, 4);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        enc.write_header().unwrap().write_image_data(&[0u8; 32]).unwrap();
    }
    assert!(read_png(&out).unwrap_err().is_format_error());
    let coefs = ImagePlane::new(8, 8, 1, Domain::Dct, vec![0; 64]).unwrap();
    assert!(write_png(&coefs).is_err());
}

#[test]
fn one_incompatible_block_renders_a_red_square() {
    let blocks = (0..6)
        .map(|i| BlockReport {
            x: i % 3,
            y: i / 3,
            verdict: if i == 4 { Verdict::Incompatible } else { Verdict::Compatible },
            iterations: 0,
            clipped: false,
            cost: 0,
        })
        .collect();
    let report = AnalysisReport { grid_w: 3, grid_h: 2, blocks };
    let png_bytes = render_verdict_mask(&build_mask(&report, UnsolvedPolicy::Manipulated)).unwrap();
    let mut reader = png::Decoder::new(std::io::Cursor::new(png_bytes)).read_info().unwrap();
    let palette = reader.info().palette.as_ref().unwrap().to_vec();
    assert_eq!(&palette[3..6], &MASK_PALETTE[1]);
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap()];
    reader.next_frame(&mut buf).unwrap();
    for y in 0..16 {
        for x in 0..24 {
            let red = (8..16).contains(&x) && y >= 8;
            assert_eq!(buf[y * 24 + x], red as u8, "({x},{y})");
        }
    }
}
