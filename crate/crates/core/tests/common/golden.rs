//! Mirror of the block generator in tools/libjpeg-oracle/oracle.c, and the
//! comparison against its frozen output.

use jpegcompat::{compress_block, decompress_block, CoefBlock, ColorImpl, DctImpl, PixelBlock, QuantTable};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn rnd(&mut self, n: i32) -> i32 {
        (self.next_u64() % n as u64) as i32
    }
}

fn gen_plane(rng: &mut SplitMix, kind: i32, out: &mut [u8]) {
    match kind {
        0 => out.iter_mut().for_each(|v| *v = rng.rnd(256) as u8),
        1 => {
            let base = 32 + rng.rnd(192);
            let gx = rng.rnd(33) - 16;
            let gy = rng.rnd(33) - 16;
            let a = rng.rnd(9);
            for y in 0..8 {
                for x in 0..8 {
                    let v = base + (gx * (x - 4) + gy * (y - 4)) / 4 + rng.rnd(2 * a + 1) - a;
                    out[(y * 8 + x) as usize] = v.clamp(0, 255) as u8;
                }
            }
        }
        2 => {
            let v = rng.rnd(256) as u8;
            out.iter_mut().for_each(|o| *o = v);
        }
        _ => out.iter_mut().for_each(|v| *v = (64 + rng.rnd(128)) as u8),
    }
}

/// Blocks in (block, channel, 64) layout.
pub fn gen_blocks(rng: &mut SplitMix, nblocks: usize, channels: usize) -> Vec<u8> {
    let mut out = vec![0u8; nblocks * channels * 64];
    for b in 0..nblocks {
        let kind = rng.rnd(4);
        for ch in 0..channels {
            let off = (b * channels + ch) * 64;
            gen_plane(rng, kind, &mut out[off..off + 64]);
        }
    }
    out
}

/// Random quantized coefficients for one plane.
pub fn gen_coefs(rng: &mut SplitMix, q: &[u16], out: &mut [i32]) {
    let sparse = rng.rnd(2) == 1;
    for k in 0..64 {
        let (row, col) = ((k / 8) as i32, (k % 8) as i32);
        let amp = if k == 0 {
            1 + 1000 / q[0] as i32
        } else if sparse {
            0
        } else {
            1 + 400 / (q[k] as i32 * (1 + row + col))
        };
        out[k] = rng.rnd(2 * amp + 1) - amp;
    }
}

const GOLDEN: &str = include_str!("../fixtures/libjpeg_golden.jsonl");

fn hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

fn dct_of(name: &str) -> DctImpl {
    match name {
        "islow" => DctImpl::IntegerSlow,
        "float" => DctImpl::FloatFast,
        other => panic!("unknown dct {other}"),
    }
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()
}

struct Outputs {
    coefs: Vec<i32>,
    decoded: Vec<u8>,
    random_coefs: Vec<i32>,
    random_decoded: Vec<u8>,
}

fn run_config(cfg: &Value) -> (Vec<u8>, Outputs, QuantTable) {
    let channels = cfg["channels"].as_u64().unwrap() as usize;
    let qf = cfg["qf"].as_u64().unwrap() as u32;
    let nblocks = cfg["blocks"].as_u64().unwrap() as usize;
    let dct = dct_of(cfg["dct"].as_str().unwrap());
    let color = ColorImpl::IntegerLibStyle;
    let table = QuantTable::from_qf(qf, channels).unwrap();

    let mut rng = SplitMix(cfg["seed"].as_u64().unwrap());
    let blocks = gen_blocks(&mut rng, nblocks, channels);
    let n = channels * 64;
    let mut out = Outputs {
        coefs: Vec::with_capacity(blocks.len()),
        decoded: Vec::with_capacity(blocks.len()),
        random_coefs: vec![0; blocks.len()],
        random_decoded: Vec::with_capacity(blocks.len()),
    };
    for chunk in blocks.chunks(n) {
        let px = PixelBlock::new(channels, chunk.to_vec()).unwrap();
        let c = compress_block(&px, &table, dct, color).unwrap();
        let d = decompress_block(&c, &table, dct, color).unwrap();
        out.coefs.extend_from_slice(c.data());
        out.decoded.extend_from_slice(d.data());
    }
    for b in 0..nblocks {
        for ch in 0..channels {
            let off = (b * channels + ch) * 64;
            gen_coefs(&mut rng, table.channel(ch), &mut out.random_coefs[off..off + 64]);
        }
    }
    for chunk in out.random_coefs.chunks(n) {
        let c = CoefBlock::new(channels, chunk.to_vec()).unwrap();
        let d = decompress_block(&c, &table, dct, color).unwrap();
        out.random_decoded.extend_from_slice(d.data());
    }
    (blocks, out, table)
}

/// Checks every fixture configuration accepted by `select` against the
/// reference library; returns the number of blocks checked and the
/// mismatches found.
pub fn check_fixtures(select: impl Fn(&Value) -> bool) -> (usize, Vec<String>) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for line in GOLDEN.lines().filter(|l| !l.trim().is_empty()) {
        let cfg: Value = serde_json::from_str(line).unwrap();
        if !select(&cfg) {
            continue;
        }
        checked += cfg["blocks"].as_u64().unwrap() as usize;
        let tag = format!("{}ch {} qf{}", cfg["channels"], cfg["dct"], cfg["qf"]);
        let (blocks, out, table) = run_config(&cfg);

        let qt: Vec<i64> = cfg["qtables"].as_array().unwrap().iter().flat_map(ints).collect();
        let ours: Vec<i64> = table.steps().iter().map(|&v| v as i64).collect();
        assert_eq!(ours, qt, "{tag}: quantization tables");
        assert_eq!(hex(&blocks), cfg["input_sha256"], "{tag}: generator out of sync");

        let n = table.channels() * 64;
        for (s, sample) in cfg["samples"].as_array().unwrap().iter().enumerate() {
            let r = s * n..(s + 1) * n;
            let checks: [(&str, Vec<i64>, &Value); 4] = [
                ("coefs", out.coefs[r.clone()].iter().map(|&v| v as i64).collect(), &sample["coefs"]),
                ("decoded", out.decoded[r.clone()].iter().map(|&v| v as i64).collect(), &sample["decoded"]),
                ("random_coefs", out.random_coefs[r.clone()].iter().map(|&v| v as i64).collect(), &sample["random_coefs"]),
                ("random_decoded", out.random_decoded[r.clone()].iter().map(|&v| v as i64).collect(), &sample["random_decoded"]),
            ];
            for (name, ours, theirs) in checks {
                if ours != ints(theirs) {
                    failures.push(format!("{tag}: sample {s} {name} differs"));
                }
            }
        }

        let le: Vec<u8> = out.coefs.iter().flat_map(|&v| (v as i16).to_le_bytes()).collect();
        for (name, digest, key) in [
            ("coefficients", hex(&le), "coefs_sha256"),
            ("decoded pixels", hex(&out.decoded), "decoded_sha256"),
            ("random-coefficient pixels", hex(&out.random_decoded), "random_coef_decoded_sha256"),
        ] {
            if cfg[key] != digest.as_str() {
                failures.push(format!("{tag}: {name} digest differs"));
            }
        }
    }
    (checked, failures)
}
