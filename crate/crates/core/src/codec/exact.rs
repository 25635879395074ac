//! Orthonormal 8x8 DCT-II in double precision.

use std::sync::OnceLock;

fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut c = [[0.0; 8]; 8];
        for (u, row) in c.iter_mut().enumerate() {
            let alpha = if u == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = alpha * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        c
    })
}

/// Forward transform; `out[u*8+v]` is vertical frequency `u`, horizontal `v`.
pub fn fdct(input: &[f64], out: &mut [f64]) {
    let c = basis();
    let mut tmp = [0.0; 64];
    for y in 0..8 {
        for v in 0..8 {
            let mut s = 0.0;
            for x in 0..8 {
                s += input[y * 8 + x] * c[v][x];
            }
            tmp[y * 8 + v] = s;
        }
    }
    for u in 0..8 {
        for v in 0..8 {
            let mut s = 0.0;
            for y in 0..8 {
                s += c[u][y] * tmp[y * 8 + v];
            }
            out[u * 8 + v] = s;
        }
    }
}

/// Inverse transform.
pub fn idct(input: &[f64], out: &mut [f64]) {
    let c = basis();
    let mut tmp = [0.0; 64];
    for u in 0..8 {
        for x in 0..8 {
            let mut s = 0.0;
            for v in 0..8 {
                s += input[u * 8 + v] * c[v][x];
            }
            tmp[u * 8 + x] = s;
        }
    }
    for y in 0..8 {
        for x in 0..8 {
            let mut s = 0.0;
            for u in 0..8 {
                s += c[u][y] * tmp[u * 8 + x];
            }
            out[y * 8 + x] = s;
        }
    }
}
