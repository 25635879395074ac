//! RGB <-> YCbCr conversions: the reference library's 16-bit fixed-point
//! tables, and the exact real-valued matrix.

use std::sync::OnceLock;

const SCALEBITS: i32 = 16;
const ONE_HALF: i32 = 1 << (SCALEBITS - 1);
const CBCR_OFFSET: i32 = 128 << SCALEBITS;

const fn fix(x: f64) -> i32 {
    (x * (1i64 << SCALEBITS) as f64 + 0.5) as i32
}

/// Full-range forward matrix (rows Y, Cb, Cr).
pub const RGB_TO_YCC: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [-0.168735892, -0.331264108, 0.5],
    [0.5, -0.418687589, -0.081312411],
];

/// Offsets added after the forward matrix.
pub const YCC_OFFSET: [f64; 3] = [0.0, 128.0, 128.0];

/// Inverse of `RGB_TO_YCC`, computed once in double precision.
pub fn ycc_to_rgb_matrix() -> &'static [[f64; 3]; 3] {
    static INV: OnceLock<[[f64; 3]; 3]> = OnceLock::new();
    INV.get_or_init(|| invert3(&RGB_TO_YCC))
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *v = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}

struct ForwardTables {
    r_y: [i32; 256],
    g_y: [i32; 256],
    b_y: [i32; 256],
    r_cb: [i32; 256],
    g_cb: [i32; 256],
    b_cb: [i32; 256],
    g_cr: [i32; 256],
    b_cr: [i32; 256],
}

fn forward_tables() -> &'static ForwardTables {
    static T: OnceLock<ForwardTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = ForwardTables {
            r_y: [0; 256],
            g_y: [0; 256],
            b_y: [0; 256],
            r_cb: [0; 256],
            g_cb: [0; 256],
            b_cb: [0; 256],
            g_cr: [0; 256],
            b_cr: [0; 256],
        };
        for i in 0..256 {
            let x = i as i32;
            t.r_y[i] = fix(0.29900) * x;
            t.g_y[i] = fix(0.58700) * x;
            t.b_y[i] = fix(0.11400) * x + ONE_HALF;
            t.r_cb[i] = -fix(0.16874) * x;
            t.g_cb[i] = -fix(0.33126) * x;
            t.b_cb[i] = fix(0.50000) * x + CBCR_OFFSET + ONE_HALF - 1;
            t.g_cr[i] = -fix(0.41869) * x;
            t.b_cr[i] = -fix(0.08131) * x;
        }
        t
    })
}

struct InverseTables {
    cr_r: [i32; 256],
    cb_b: [i32; 256],
    cr_g: [i32; 256],
    cb_g: [i32; 256],
}

fn inverse_tables() -> &'static InverseTables {
    static T: OnceLock<InverseTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = InverseTables { cr_r: [0; 256], cb_b: [0; 256], cr_g: [0; 256], cb_g: [0; 256] };
        for i in 0..256 {
            let x = i as i32 - 128;
            t.cr_r[i] = (fix(1.40200) * x + ONE_HALF) >> SCALEBITS;
            t.cb_b[i] = (fix(1.77200) * x + ONE_HALF) >> SCALEBITS;
            t.cr_g[i] = -fix(0.71414) * x;
            t.cb_g[i] = -fix(0.34414) * x + ONE_HALF;
        }
        t
    })
}

#[inline(always)]
fn idx(v: i32) -> usize {
    v.clamp(0, 255) as usize
}

/// Fixed-point forward conversion of one pixel (inputs clamped to 0..=255).
#[inline]
pub fn rgb_to_ycc_int(r: i32, g: i32, b: i32) -> [i32; 3] {
    let t = forward_tables();
    let (r, g, b) = (idx(r), idx(g), idx(b));
    [
        (t.r_y[r] + t.g_y[g] + t.b_y[b]) >> SCALEBITS,
        (t.r_cb[r] + t.g_cb[g] + t.b_cb[b]) >> SCALEBITS,
        (t.b_cb[r] + t.g_cr[g] + t.b_cr[b]) >> SCALEBITS,
    ]
}

/// Fixed-point inverse conversion of one pixel, clamped to 0..=255.
#[inline]
pub fn ycc_to_rgb_int(y: i32, cb: i32, cr: i32) -> [i32; 3] {
    let t = inverse_tables();
    let (cb, cr) = (idx(cb), idx(cr));
    [
        (y + t.cr_r[cr]).clamp(0, 255),
        (y + ((t.cb_g[cb] + t.cr_g[cr]) >> SCALEBITS)).clamp(0, 255),
        (y + t.cb_b[cb]).clamp(0, 255),
    ]
}

/// Exact forward conversion (no rounding).
#[inline]
pub fn rgb_to_ycc_exact(rgb: [f64; 3]) -> [f64; 3] {
    let m = &RGB_TO_YCC;
    let mut out = YCC_OFFSET;
    for (i, o) in out.iter_mut().enumerate() {
        *o += m[i][0] * rgb[0] + m[i][1] * rgb[1] + m[i][2] * rgb[2];
    }
    out
}

/// Exact inverse conversion (no rounding).
#[inline]
pub fn ycc_to_rgb_exact(ycc: [f64; 3]) -> [f64; 3] {
    let m = ycc_to_rgb_matrix();
    let d = [ycc[0] - YCC_OFFSET[0], ycc[1] - YCC_OFFSET[1], ycc[2] - YCC_OFFSET[2]];
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i][0] * d[0] + m[i][1] * d[1] + m[i][2] * d[2];
    }
    out
}
