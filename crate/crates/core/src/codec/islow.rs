//! Accurate integer DCT (LL&M, 13-bit fixed point) with the reference
//! library's rounding, reciprocal quantizer and range-limit wraparound.

const CONST_BITS: i32 = 13;
const PASS1_BITS: i32 = 2;

const FIX_0_298631336: i64 = 2446;
const FIX_0_390180644: i64 = 3196;
const FIX_0_541196100: i64 = 4433;
const FIX_0_765366865: i64 = 6270;
const FIX_0_899976223: i64 = 7373;
const FIX_1_175875602: i64 = 9633;
const FIX_1_501321110: i64 = 12299;
const FIX_1_847759065: i64 = 15137;
const FIX_1_961570560: i64 = 16069;
const FIX_2_053119869: i64 = 16819;
const FIX_2_562915447: i64 = 20995;
const FIX_3_072711026: i64 = 25172;

#[inline(always)]
fn descale(x: i64, n: i32) -> i64 {
    (x + (1 << (n - 1))) >> n
}

/// One 1-D forward pass over 8 values with the given stride.
#[inline(always)]
fn fdct_1d(d: &mut [i32; 64], base: usize, stride: usize, pass2: bool) {
    let at = |i: usize| d[base + i * stride] as i64;
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

    let (shift, out04): (i32, [i64; 2]) = if pass2 {
        (
            CONST_BITS + PASS1_BITS,
            [descale(tmp10 + tmp11, PASS1_BITS), descale(tmp10 - tmp11, PASS1_BITS)],
        )
    } else {
        (CONST_BITS - PASS1_BITS, [(tmp10 + tmp11) << PASS1_BITS, (tmp10 - tmp11) << PASS1_BITS])
    };

    let z1 = (tmp12 + tmp13) * FIX_0_541196100;
    let out2 = descale(z1 + tmp13 * FIX_0_765366865, shift);
    let out6 = descale(z1 - tmp12 * FIX_1_847759065, shift);

    let z1 = tmp4 + tmp7;
    let z2 = tmp5 + tmp6;
    let z3 = tmp4 + tmp6;
    let z4 = tmp5 + tmp7;
    let z5 = (z3 + z4) * FIX_1_175875602;
    let tmp4 = tmp4 * FIX_0_298631336;
    let tmp5 = tmp5 * FIX_2_053119869;
    let tmp6 = tmp6 * FIX_3_072711026;
    let tmp7 = tmp7 * FIX_1_501321110;
    let z1 = -z1 * FIX_0_899976223;
    let z2 = -z2 * FIX_2_562915447;
    let z3 = -z3 * FIX_1_961570560 + z5;
    let z4 = -z4 * FIX_0_390180644 + z5;

    let out = [
        out04[0],
        descale(tmp7 + z1 + z4, shift),
        out2,
        descale(tmp6 + z2 + z3, shift),
        out04[1],
        descale(tmp5 + z2 + z4, shift),
        out6,
        descale(tmp4 + z1 + z3, shift),
    ];
    for (i, v) in out.into_iter().enumerate() {
        d[base + i * stride] = v as i32;
    }
}

/// Forward DCT of level-shifted samples. Output is scaled by 8 relative to
/// the orthonormal DCT.
pub fn fdct(block: &mut [i32; 64]) {
    for row in 0..8 {
        fdct_1d(block, row * 8, 1, false);
    }
    for col in 0..8 {
        fdct_1d(block, col, 8, true);
    }
}

/// Reciprocal-multiply quantizer entry for divisor `8 * q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reciprocal {
    recip: u32,
    corr: u32,
    shift: u32,
}

impl Reciprocal {
    pub fn new(q: u16) -> Self {
        let divisor = (q as u32) << 3;
        if divisor == 1 {
            return Reciprocal { recip: 1, corr: 0, shift: 0 };
        }
        let b = 31 - divisor.leading_zeros();
        let mut r = 16 + b;
        let mut fq = (1u32 << r) / divisor;
        let fr = (1u32 << r) % divisor;
        let mut c = divisor / 2;
        if fr == 0 {
            fq >>= 1;
            r -= 1;
        } else if fr <= divisor / 2 {
            c += 1;
        } else {
            fq += 1;
        }
        Reciprocal { recip: fq & 0xffff, corr: c & 0xffff, shift: r }
    }

    #[inline(always)]
    pub fn quantize(self, raw: i32) -> i32 {
        let mag = raw.unsigned_abs();
        let q = ((mag.wrapping_add(self.corr)).wrapping_mul(self.recip) >> self.shift) as i32;
        let q = q as i16 as i32;
        if raw < 0 {
            -q
        } else {
            q
        }
    }
}

/// `IDCT_range_limit[x & 1023]`: clamps `x + 128` for moderate overshoot and
/// wraps for extreme values, as the reference table does.
#[inline(always)]
pub fn idct_range_limit(x: i64) -> i32 {
    let idx = (x & 1023) as i32;
    match idx {
        0..=127 => idx + 128,
        128..=511 => 255,
        512..=895 => 0,
        _ => idx - 896,
    }
}

#[inline(always)]
fn idct_1d(inp: [i64; 8], pass2: bool) -> [i64; 8] {
    let z2 = inp[2];
    let z3 = inp[6];
    let z1 = (z2 + z3) * FIX_0_541196100;
    let tmp2 = z1 - z3 * FIX_1_847759065;
    let tmp3 = z1 + z2 * FIX_0_765366865;

    let tmp0 = (inp[0] + inp[4]) << CONST_BITS;
    let tmp1 = (inp[0] - inp[4]) << CONST_BITS;

    let tmp10 = tmp0 + tmp3;
    let tmp13 = tmp0 - tmp3;
    let tmp11 = tmp1 + tmp2;
    let tmp12 = tmp1 - tmp2;

    let (t0, t1, t2, t3) = (inp[7], inp[5], inp[3], inp[1]);
    let z1 = t0 + t3;
    let z2 = t1 + t2;
    let z3 = t0 + t2;
    let z4 = t1 + t3;
    let z5 = (z3 + z4) * FIX_1_175875602;
    let t0 = t0 * FIX_0_298631336;
    let t1 = t1 * FIX_2_053119869;
    let t2 = t2 * FIX_3_072711026;
    let t3 = t3 * FIX_1_501321110;
    let z1 = -z1 * FIX_0_899976223;
    let z2 = -z2 * FIX_2_562915447;
    let z3 = -z3 * FIX_1_961570560 + z5;
    let z4 = -z4 * FIX_0_390180644 + z5;
    let t0 = t0 + z1 + z3;
    let t1 = t1 + z2 + z4;
    let t2 = t2 + z2 + z3;
    let t3 = t3 + z1 + z4;

    let shift = if pass2 { CONST_BITS + PASS1_BITS + 3 } else { CONST_BITS - PASS1_BITS };
    [
        descale(tmp10 + t3, shift),
        descale(tmp11 + t2, shift),
        descale(tmp12 + t1, shift),
        descale(tmp13 + t0, shift),
        descale(tmp13 - t0, shift),
        descale(tmp12 - t1, shift),
        descale(tmp11 - t2, shift),
        descale(tmp10 - t3, shift),
    ]
}

/// Dequantize and inverse-transform one plane into samples in `0..=255`.
pub fn idct(coefs: &[i32], steps: &[u16], out: &mut [i32]) {
    let mut ws = [0i32; 64];
    for col in 0..8 {
        let mut inp = [0i64; 8];
        for (r, v) in inp.iter_mut().enumerate() {
            let k = r * 8 + col;
            *v = (coefs[k].wrapping_mul(steps[k] as i32)) as i64;
        }
        let o = idct_1d(inp, false);
        for r in 0..8 {
            ws[r * 8 + col] = o[r] as i32;
        }
    }
    for row in 0..8 {
        let mut inp = [0i64; 8];
        for (c, v) in inp.iter_mut().enumerate() {
            *v = ws[row * 8 + c] as i64;
        }
        let o = idct_1d(inp, true);
        for c in 0..8 {
            out[row * 8 + c] = idct_range_limit(o[c]);
        }
    }
}
