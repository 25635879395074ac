//! Seeded synthetic "natural" images: smooth illumination, soft-edged
//! shapes, mid-frequency texture and sensor-like grain, kept away from the
//! 0/255 limits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::codec::{color, Domain};
use crate::error::Result;
use crate::image::ImagePlane;

const LOW: f64 = 20.0;
const HIGH: f64 = 235.0;

struct Wave {
    fx: f64,
    fy: f64,
    phase: f64,
    amp: f64,
}

impl Wave {
    fn random(rng: &mut ChaCha8Rng, size: f64, cycles: (f64, f64), amp: (f64, f64)) -> Self {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let f = rng.random_range(cycles.0..cycles.1) / size;
        Wave {
            fx: f * theta.cos(),
            fy: f * theta.sin(),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
            amp: rng.random_range(amp.0..amp.1),
        }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        self.amp * (std::f64::consts::TAU * (self.fx * x + self.fy * y) + self.phase).sin()
    }
}

struct Shape {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    rect: bool,
    soft: f64,
    luma: f64,
    chroma: [f64; 2],
}

impl Shape {
    /// Coverage in [0, 1] with a soft edge.
    fn coverage(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = ((x - self.cx) / self.rx, (y - self.cy) / self.ry);
        let d = if self.rect { dx.abs().max(dy.abs()) } else { (dx * dx + dy * dy).sqrt() };
        let edge = (1.0 - d) * self.rx.min(self.ry) / self.soft;
        (edge.clamp(-1.0, 1.0) + 1.0) / 2.0
    }
}

/// Bilinear upsampling of a coarse Gaussian field: mid-frequency texture.
fn texture(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: usize, sigma: f64) -> Vec<f64> {
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let (gw, gh) = (width / cell + 2, height / cell + 2);
    let grid: Vec<f64> = (0..gw * gh).map(|_| normal.sample(rng)).collect();
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64 / cell as f64, y as f64 / cell as f64);
            let (ix, iy) = (fx as usize, fy as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            let g = |i: usize, j: usize| grid[j * gw + i];
            out[y * width + x] = (1.0 - ty) * ((1.0 - tx) * g(ix, iy) + tx * g(ix + 1, iy))
                + ty * ((1.0 - tx) * g(ix, iy + 1) + tx * g(ix + 1, iy + 1));
        }
    }
    out
}

/// A `width x height` pixel image with 1 or 3 channels, fully determined by
/// `seed`.
pub fn synthetic_image(width: usize, height: usize, channels: usize, seed: u64) -> Result<ImagePlane> {
    crate::codec::quant::check_channels(channels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = width.max(height) as f64;

    let base = rng.random_range(90.0..165.0);
    let waves: Vec<Wave> = (0..5).map(|_| Wave::random(&mut rng, size, (0.3, 3.0), (6.0, 22.0))).collect();
    let chroma_waves: Vec<Wave> =
        (0..4).map(|_| Wave::random(&mut rng, size, (0.2, 2.0), (4.0, 14.0))).collect();
    let n_shapes = rng.random_range(6..14);
    let shapes: Vec<Shape> = (0..n_shapes)
        .map(|_| Shape {
            cx: rng.random_range(0.0..width as f64),
            cy: rng.random_range(0.0..height as f64),
            rx: rng.random_range(0.05..0.3) * size,
            ry: rng.random_range(0.05..0.3) * size,
            rect: rng.random_bool(0.4),
            soft: rng.random_range(0.6..4.0),
            luma: rng.random_range(-45.0..45.0),
            chroma: [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)],
        })
        .collect();
    let tex_cell = rng.random_range(2..6);
    let tex_sigma = rng.random_range(3.0..9.0);
    let tex = texture(&mut rng, width, height, tex_cell, tex_sigma);
    let grain = Normal::new(0.0, rng.random_range(1.0..3.5)).expect("valid sigma");
    let chroma_grain = Normal::new(0.0, 1.0).expect("valid sigma");

    let plane = width * height;
    let mut samples = vec![0i32; plane * channels];
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64, y as f64);
            let mut luma = base + waves.iter().map(|w| w.at(fx, fy)).sum::<f64>();
            let mut cb = chroma_waves[0].at(fx, fy) + chroma_waves[1].at(fx, fy);
            let mut cr = chroma_waves[2].at(fx, fy) + chroma_waves[3].at(fx, fy);
            for s in &shapes {
                let a = s.coverage(fx, fy);
                luma += a * s.luma;
                cb += a * s.chroma[0];
                cr += a * s.chroma[1];
            }
            let i = y * width + x;
            luma += tex[i] + grain.sample(&mut rng);
            if channels == 1 {
                samples[i] = luma.clamp(LOW, HIGH).round() as i32;
            } else {
                let ycc = [
                    luma.clamp(LOW, HIGH),
                    128.0 + cb + chroma_grain.sample(&mut rng),
                    128.0 + cr + chroma_grain.sample(&mut rng),
                ];
                let rgb = color::ycc_to_rgb_exact(ycc);
                for c in 0..3 {
                    samples[c * plane + i] = rgb[c].clamp(LOW, HIGH).round() as i32;
                }
            }
        }
    }
    ImagePlane::new(width, height, channels, Domain::Pixel, samples)
}
