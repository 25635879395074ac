//! Block codec: quantization tables, the three DCT implementations, the two
//! color conversions, and single-block compression/decompression.

pub mod color;
pub mod exact;
pub mod float;
pub mod islow;
pub mod quant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use quant::QuantTable;

/// DCT implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DctImpl {
    /// The reference library's accurate integer transform.
    #[default]
    IntegerSlow,
    /// The reference library's single-precision AAN transform.
    FloatFast,
    /// Orthonormal transform in double precision.
    ExactOrthonormal,
}

/// Color conversion implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ColorImpl {
    /// The reference library's fixed-point tables, rounding each direction.
    #[default]
    IntegerLibStyle,
    /// Real-valued matrix; values stay unrounded until the next integer stage.
    ExactMatrix,
}

/// The space a block lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Pixel,
    Dct,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Pixel => "pixel",
            Domain::Dct => "dct",
        }
    }
}

/// 8x8 samples per channel, channel-major, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PixelBlock {
    channels: usize,
    data: Vec<u8>,
}

impl PixelBlock {
    pub fn new(channels: usize, data: Vec<u8>) -> Result<Self> {
        quant::check_channels(channels)?;
        check_len(data.len(), channels)?;
        Ok(PixelBlock { channels, data })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn to_ints(&self) -> Vec<i32> {
        self.data.iter().map(|&v| v as i32).collect()
    }
}

/// Quantized coefficients, 64 per channel in natural (row-major) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefBlock {
    channels: usize,
    data: Vec<i32>,
}

impl CoefBlock {
    pub fn new(channels: usize, data: Vec<i32>) -> Result<Self> {
        quant::check_channels(channels)?;
        check_len(data.len(), channels)?;
        Ok(CoefBlock { channels, data })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[i32] {
        &self.data
    }
}

/// An integer block in either domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Pixels(PixelBlock),
    Coefs(CoefBlock),
}

impl Block {
    pub fn domain(&self) -> Domain {
        match self {
            Block::Pixels(_) => Domain::Pixel,
            Block::Coefs(_) => Domain::Dct,
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            Block::Pixels(b) => b.channels,
            Block::Coefs(b) => b.channels,
        }
    }

    pub fn to_ints(&self) -> Vec<i32> {
        match self {
            Block::Pixels(b) => b.to_ints(),
            Block::Coefs(b) => b.data.clone(),
        }
    }

    /// Builds a block of the given domain from integers. Pixel values must
    /// lie in `0..=255`.
    pub fn from_ints(domain: Domain, channels: usize, data: Vec<i32>) -> Result<Self> {
        match domain {
            Domain::Dct => Ok(Block::Coefs(CoefBlock::new(channels, data)?)),
            Domain::Pixel => {
                if let Some(v) = data.iter().find(|v| !(0..=255).contains(*v)) {
                    return Err(Error::Malformed(format!("pixel value {v} outside 0..=255")));
                }
                Ok(Block::Pixels(PixelBlock::new(channels, data.into_iter().map(|v| v as u8).collect())?))
            }
        }
    }
}

/// Real-valued block in either domain.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatBlock {
    pub channels: usize,
    pub domain: Domain,
    pub data: Vec<f64>,
}

fn check_len(len: usize, channels: usize) -> Result<()> {
    if len != 64 * channels {
        return Err(Error::LengthMismatch { expected: 64 * channels, got: len });
    }
    Ok(())
}

/// Precomputed per-table state for one (table, DCT, color) combination.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    channels: usize,
    steps: Vec<u16>,
    dct: DctImpl,
    color: ColorImpl,
    recips: Vec<islow::Reciprocal>,
    fdiv: Vec<[f32; 64]>,
    fmul: Vec<[f32; 64]>,
}

impl Kernel {
    pub(crate) fn new(table: &QuantTable, dct: DctImpl, color: ColorImpl) -> Self {
        let channels = table.channels();
        let steps = table.steps().to_vec();
        let recips = steps.iter().map(|&q| islow::Reciprocal::new(q)).collect();
        let fdiv = (0..channels).map(|c| float::quant_divisors(table.channel(c))).collect();
        let fmul = (0..channels).map(|c| float::dequant_multipliers(table.channel(c))).collect();
        Kernel { channels, steps, dct, color, recips, fdiv, fmul }
    }

    /// Pixels (possibly RGB) to quantized coefficients.
    pub(crate) fn compress(&self, px: &[i32], out: &mut [i32]) {
        let mut ints = [[0i32; 64]; 3];
        let mut reals = [[0f64; 64]; 3];
        let mut real = false;
        if self.channels == 3 {
            match self.color {
                ColorImpl::IntegerLibStyle => {
                    for p in 0..64 {
                        let ycc = color::rgb_to_ycc_int(px[p], px[64 + p], px[128 + p]);
                        for c in 0..3 {
                            ints[c][p] = ycc[c];
                        }
                    }
                }
                ColorImpl::ExactMatrix => {
                    real = self.dct == DctImpl::ExactOrthonormal;
                    for p in 0..64 {
                        let rgb = [px[p] as f64, px[64 + p] as f64, px[128 + p] as f64];
                        let ycc = color::rgb_to_ycc_exact(rgb);
                        for c in 0..3 {
                            reals[c][p] = ycc[c];
                            ints[c][p] = (ycc[c].round() as i32).clamp(0, 255);
                        }
                    }
                }
            }
        } else {
            ints[0].copy_from_slice(&px[..64]);
        }

        for c in 0..self.channels {
            let o = &mut out[c * 64..(c + 1) * 64];
            match self.dct {
                DctImpl::IntegerSlow => {
                    let mut b = [0i32; 64];
                    for p in 0..64 {
                        b[p] = ints[c][p] - 128;
                    }
                    islow::fdct(&mut b);
                    for k in 0..64 {
                        o[k] = self.recips[c * 64 + k].quantize(b[k]);
                    }
                }
                DctImpl::FloatFast => {
                    let mut b = [0f32; 64];
                    for p in 0..64 {
                        b[p] = (ints[c][p] - 128) as f32;
                    }
                    float::fdct(&mut b);
                    for k in 0..64 {
                        o[k] = float::quantize(b[k], self.fdiv[c][k]);
                    }
                }
                DctImpl::ExactOrthonormal => {
                    let mut b = [0f64; 64];
                    for p in 0..64 {
                        let v = if real { reals[c][p] } else { ints[c][p] as f64 };
                        b[p] = v - 128.0;
                    }
                    let mut f = [0f64; 64];
                    exact::fdct(&b, &mut f);
                    for k in 0..64 {
                        o[k] = (f[k] / self.steps[c * 64 + k] as f64).round() as i32;
                    }
                }
            }
        }
    }

    /// Quantized coefficients to pixels in `0..=255`.
    pub(crate) fn decompress(&self, coefs: &[i32], out: &mut [i32]) {
        let mut ints = [[0i32; 64]; 3];
        let mut reals = [[0f64; 64]; 3];
        let exact_dct = self.dct == DctImpl::ExactOrthonormal;
        for c in 0..self.channels {
            let cf = &coefs[c * 64..(c + 1) * 64];
            let steps = &self.steps[c * 64..(c + 1) * 64];
            match self.dct {
                DctImpl::IntegerSlow => islow::idct(cf, steps, &mut ints[c]),
                DctImpl::FloatFast => float::idct(cf, &self.fmul[c], &mut ints[c]),
                DctImpl::ExactOrthonormal => {
                    let mut v = [0f64; 64];
                    for k in 0..64 {
                        v[k] = cf[k] as f64 * steps[k] as f64;
                    }
                    exact::idct(&v, &mut reals[c]);
                    for p in 0..64 {
                        reals[c][p] += 128.0;
                        ints[c][p] = round_clamp(reals[c][p]);
                    }
                }
            }
        }

        if self.channels == 1 {
            out[..64].copy_from_slice(&ints[0]);
            return;
        }
        for p in 0..64 {
            let rgb = match self.color {
                ColorImpl::IntegerLibStyle => {
                    color::ycc_to_rgb_int(ints[0][p], ints[1][p], ints[2][p])
                }
                ColorImpl::ExactMatrix => {
                    let ycc = if exact_dct {
                        [reals[0][p], reals[1][p], reals[2][p]]
                    } else {
                        [ints[0][p] as f64, ints[1][p] as f64, ints[2][p] as f64]
                    };
                    color::ycc_to_rgb_exact(ycc).map(round_clamp)
                }
            };
            for c in 0..3 {
                out[c * 64 + p] = rgb[c];
            }
        }
    }
}

/// A quantization table together with the implementations that apply it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodecSettings {
    pub table: QuantTable,
    pub dct: DctImpl,
    pub color: ColorImpl,
}

impl CodecSettings {
    pub fn new(table: QuantTable, dct: DctImpl, color: ColorImpl) -> Self {
        CodecSettings { table, dct, color }
    }

    /// Standard table at `qf` with the default implementations.
    pub fn from_qf(qf: u32, channels: usize) -> Result<Self> {
        Ok(CodecSettings::new(QuantTable::from_qf(qf, channels)?, DctImpl::default(), ColorImpl::default()))
    }

    pub(crate) fn kernel(&self) -> Kernel {
        Kernel::new(&self.table, self.dct, self.color)
    }
}

#[inline(always)]
pub(crate) fn round_clamp(v: f64) -> i32 {
    (v.round() as i32).clamp(0, 255)
}

fn check_table(table: &QuantTable, channels: usize) -> Result<()> {
    if table.channels() != channels {
        return Err(Error::ChannelMismatch { expected: table.channels(), got: channels });
    }
    Ok(())
}

/// Color conversion, DCT and quantization of one block.
pub fn compress_block(
    block: &PixelBlock,
    table: &QuantTable,
    dct: DctImpl,
    color: ColorImpl,
) -> Result<CoefBlock> {
    check_table(table, block.channels)?;
    let mut out = vec![0; block.data.len()];
    Kernel::new(table, dct, color).compress(&block.to_ints(), &mut out);
    CoefBlock::new(block.channels, out)
}

/// Dequantization, inverse DCT, clamping and color conversion of one block.
pub fn decompress_block(
    block: &CoefBlock,
    table: &QuantTable,
    dct: DctImpl,
    color: ColorImpl,
) -> Result<PixelBlock> {
    check_table(table, block.channels)?;
    let mut out = vec![0; block.data.len()];
    Kernel::new(table, dct, color).decompress(&block.data, &mut out);
    PixelBlock::new(block.channels, out.into_iter().map(|v| v as u8).collect())
}

/// Forward DCT of one 8x8 plane of samples (level shift included).
///
/// All implementations return coefficients on the orthonormal scale, so a
/// constant plane `v` yields DC `8 * (v - 128)`. The integer transform's
/// native output is exactly 8 times these values and the float transform's
/// native output is these values times `8 * s_u * s_v` (AAN scale factors);
/// both are divided back out in double precision.
pub fn forward_dct(samples: &[u8; 64], dct: DctImpl) -> [f64; 64] {
    let mut out = [0f64; 64];
    match dct {
        DctImpl::IntegerSlow => {
            let mut b = [0i32; 64];
            for p in 0..64 {
                b[p] = samples[p] as i32 - 128;
            }
            islow::fdct(&mut b);
            for k in 0..64 {
                out[k] = b[k] as f64 / 8.0;
            }
        }
        DctImpl::FloatFast => {
            let mut b = [0f32; 64];
            for p in 0..64 {
                b[p] = (samples[p] as i32 - 128) as f32;
            }
            float::fdct(&mut b);
            for k in 0..64 {
                out[k] = b[k] as f64 / (8.0 * float::aan_scale(k / 8) * float::aan_scale(k % 8));
            }
        }
        DctImpl::ExactOrthonormal => {
            let b: Vec<f64> = samples.iter().map(|&v| v as f64 - 128.0).collect();
            exact::fdct(&b, &mut out);
        }
    }
    out
}

/// Inverse DCT of one plane of dequantized, orthonormal-scale coefficients,
/// level shift included.
///
/// The exact transform returns unrounded, unclamped samples. The integer and
/// float transforms round their inputs to integers (unit quantizer) and
/// return the reference library's range-limited output samples.
pub fn inverse_dct(coefs: &[f64; 64], dct: DctImpl) -> [f64; 64] {
    let mut out = [0f64; 64];
    match dct {
        DctImpl::ExactOrthonormal => {
            exact::idct(coefs, &mut out);
            for v in out.iter_mut() {
                *v += 128.0;
            }
        }
        DctImpl::IntegerSlow | DctImpl::FloatFast => {
            let ints: Vec<i32> = coefs.iter().map(|v| v.round() as i32).collect();
            let ones = [1u16; 64];
            let mut o = [0i32; 64];
            if dct == DctImpl::IntegerSlow {
                islow::idct(&ints, &ones, &mut o);
            } else {
                float::idct(&ints, &float::dequant_multipliers(&ones), &mut o);
            }
            for p in 0..64 {
                out[p] = o[p] as f64;
            }
        }
    }
    out
}

/// Forward color conversion of one pixel. The integer implementation rounds
/// (and clamps its inputs to `0..=255`); the exact one does not.
pub fn color_forward(rgb: [f64; 3], color: ColorImpl) -> [f64; 3] {
    match color {
        ColorImpl::IntegerLibStyle => color::rgb_to_ycc_int(
            rgb[0].round() as i32,
            rgb[1].round() as i32,
            rgb[2].round() as i32,
        )
        .map(|v| v as f64),
        ColorImpl::ExactMatrix => color::rgb_to_ycc_exact(rgb),
    }
}

/// Inverse color conversion of one pixel. The integer implementation rounds
/// and clamps; the exact one does not.
pub fn color_inverse(ycc: [f64; 3], color: ColorImpl) -> [f64; 3] {
    match color {
        ColorImpl::IntegerLibStyle => color::ycc_to_rgb_int(
            ycc[0].round() as i32,
            ycc[1].round() as i32,
            ycc[2].round() as i32,
        )
        .map(|v| v as f64),
        ColorImpl::ExactMatrix => color::ycc_to_rgb_exact(ycc),
    }
}
