//! Single-precision AAN DCT in the reference library's float path.
//!
//! Constants are the library's literals, not the nearest `std` values.

#![allow(clippy::approx_constant, clippy::excessive_precision)]

/// AAN scale factors: `1` for k = 0, else `cos(k*pi/16) * sqrt(2)`.
const AAN_SCALE: [f64; 8] = [
    1.0,
    1.387039845,
    1.306562965,
    1.175875602,
    1.0,
    0.785694958,
    0.541196100,
    0.275899379,
];

pub fn aan_scale(k: usize) -> f64 {
    AAN_SCALE[k]
}

#[inline(always)]
fn fdct_1d(d: &mut [f32; 64], base: usize, stride: usize) {
    let at = |i: usize| d[base + i * stride];
    let tmp0 = at(0) + at(7);
    let tmp7 = at(0) - at(7);
    let tmp1 = at(1) + at(6);
    let tmp6 = at(1) - at(6);
    let tmp2 = at(2) + at(5);
    let tmp5 = at(2) - at(5);
    let tmp3 = at(3) + at(4);
    let tmp4 = at(3) - at(4);

    let tmp10 = tmp0 + tmp3;
    let tmp13 = tmp0 - tmp3;
    let tmp11 = tmp1 + tmp2;
    let tmp12 = tmp1 - tmp2;

    let o0 = tmp10 + tmp11;
    let o4 = tmp10 - tmp11;
    let z1 = (tmp12 + tmp13) * 0.707106781f32;
    let o2 = tmp13 + z1;
    let o6 = tmp13 - z1;

    let tmp10 = tmp4 + tmp5;
    let tmp11 = tmp5 + tmp6;
    let tmp12 = tmp6 + tmp7;
    let z5 = (tmp10 - tmp12) * 0.382683433f32;
    let z2 = 0.541196100f32 * tmp10 + z5;
    let z4 = 1.306562965f32 * tmp12 + z5;
    let z3 = tmp11 * 0.707106781f32;
    let z11 = tmp7 + z3;
    let z13 = tmp7 - z3;

    let out = [o0, z11 + z4, o2, z13 - z2, o4, z13 + z2, o6, z11 - z4];
    for (i, v) in out.into_iter().enumerate() {
        d[base + i * stride] = v;
    }
}

/// Forward AAN DCT of level-shifted samples (unnormalized AAN output).
pub fn fdct(block: &mut [f32; 64]) {
    for row in 0..8 {
        fdct_1d(block, row * 8, 1);
    }
    for col in 0..8 {
        fdct_1d(block, col, 8);
    }
}

/// Per-entry quantization multipliers `1 / (q * s_r * s_c * 8)`.
pub fn quant_divisors(steps: &[u16]) -> [f32; 64] {
    let mut out = [0f32; 64];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (1.0 / (steps[k] as f64 * AAN_SCALE[k / 8] * AAN_SCALE[k % 8] * 8.0)) as f32;
    }
    out
}

#[inline(always)]
pub fn quantize(raw: f32, divisor: f32) -> i32 {
    let t = raw * divisor;
    (t + 16384.5f32) as i32 - 16384
}

/// Per-entry dequantization multipliers.
pub fn dequant_multipliers(steps: &[u16]) -> [f32; 64] {
    let mut out = [0f32; 64];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (steps[k] as f64 * AAN_SCALE[k / 8] * AAN_SCALE[k % 8] * 0.125) as f32;
    }
    out
}

/// `sample_range_limit[x & 1023]`.
#[inline(always)]
fn sample_range_limit(x: i32) -> i32 {
    let idx = x & 1023;
    match idx {
        0..=255 => idx,
        256..=639 => 255,
        _ => 0,
    }
}

#[inline(always)]
fn idct_1d(inp: [f32; 8], dc_bias: f32) -> [f32; 8] {
    let z5 = inp[0] + dc_bias;
    let tmp10 = z5 + inp[4];
    let tmp11 = z5 - inp[4];
    let tmp13 = inp[2] + inp[6];
    let tmp12 = (inp[2] - inp[6]) * 1.414213562f32 - tmp13;
    let tmp0 = tmp10 + tmp13;
    let tmp3 = tmp10 - tmp13;
    let tmp1 = tmp11 + tmp12;
    let tmp2 = tmp11 - tmp12;

    let z13 = inp[5] + inp[3];
    let z10 = inp[5] - inp[3];
    let z11 = inp[1] + inp[7];
    let z12 = inp[1] - inp[7];
    let tmp7 = z11 + z13;
    let tmp11 = (z11 - z13) * 1.414213562f32;
    let z5 = (z10 + z12) * 1.847759065f32;
    let tmp10 = z5 - z12 * 1.082392200f32;
    let tmp12 = z5 - z10 * 2.613125930f32;
    let tmp6 = tmp12 - tmp7;
    let tmp5 = tmp11 - tmp6;
    let tmp4 = tmp10 - tmp5;

    [
        tmp0 + tmp7,
        tmp1 + tmp6,
        tmp2 + tmp5,
        tmp3 + tmp4,
        tmp3 - tmp4,
        tmp2 - tmp5,
        tmp1 - tmp6,
        tmp0 - tmp7,
    ]
}

/// Dequantize (with precomputed multipliers) and inverse-transform one plane.
pub fn idct(coefs: &[i32], mult: &[f32; 64], out: &mut [i32]) {
    let mut ws = [0f32; 64];
    for col in 0..8 {
        let mut inp = [0f32; 8];
        for (r, v) in inp.iter_mut().enumerate() {
            let k = r * 8 + col;
            *v = coefs[k] as f32 * mult[k];
        }
        let o = idct_1d(inp, 0.0);
        for r in 0..8 {
            ws[r * 8 + col] = o[r];
        }
    }
    for row in 0..8 {
        let mut inp = [0f32; 8];
        inp.copy_from_slice(&ws[row * 8..row * 8 + 8]);
        let o = idct_1d(inp, 128.5);
        for c in 0..8 {
            out[row * 8 + c] = sample_range_limit(o[c] as i32);
        }
    }
}
