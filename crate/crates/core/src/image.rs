//! Whole images: planar sample storage, block splitting, and blockwise
//! compression/decompression.

use crate::codec::{Block, CodecSettings, Domain};
use crate::error::{Error, Result};

/// A raster of pixels or of quantized coefficients, channel-major.
///
/// Coefficient images use the usual "DCT image" layout: coefficient `k` of
/// block `(bx, by)` lives at column `8*bx + k%8`, row `8*by + k/8`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    channels: usize,
    domain: Domain,
    samples: Vec<i32>,
}

/// One block and its grid coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridBlock {
    pub x: usize,
    pub y: usize,
    pub block: Block,
}

impl ImagePlane {
    pub fn new(width: usize, height: usize, channels: usize, domain: Domain, samples: Vec<i32>) -> Result<Self> {
        crate::codec::quant::check_channels(channels)?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry("empty image".into()));
        }
        let n = width * height * channels;
        if samples.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: samples.len() });
        }
        if domain == Domain::Pixel {
            if let Some(v) = samples.iter().find(|v| !(0..=255).contains(*v)) {
                return Err(Error::Malformed(format!("pixel value {v} outside 0..=255")));
            }
        }
        Ok(ImagePlane { width, height, channels, domain, samples })
    }

    /// Pixel image from interleaved 8-bit samples.
    pub fn from_interleaved(width: usize, height: usize, channels: usize, data: &[u8]) -> Result<Self> {
        crate::codec::quant::check_channels(channels)?;
        let n = width * height * channels;
        if data.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: data.len() });
        }
        let plane = width * height;
        let mut samples = vec![0i32; n];
        for (i, px) in data.chunks(channels).enumerate() {
            for (c, &v) in px.iter().enumerate() {
                samples[c * plane + i] = v as i32;
            }
        }
        ImagePlane::new(width, height, channels, Domain::Pixel, samples)
    }

    /// Interleaved 8-bit samples of a pixel image.
    pub fn to_interleaved(&self) -> Vec<u8> {
        let plane = self.width * self.height;
        let mut out = vec![0u8; plane * self.channels];
        for i in 0..plane {
            for c in 0..self.channels {
                out[i * self.channels + c] = self.samples[c * plane + i].clamp(0, 255) as u8;
            }
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.width / 8, self.height / 8)
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> i32 {
        self.samples[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: i32) {
        self.samples[(c * self.height + y) * self.width + x] = v;
    }

    /// The top-left `width x height` sub-image.
    pub fn cropped(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return Err(Error::InvalidGeometry(format!(
                "cannot crop {}x{} to {width}x{height}",
                self.width, self.height
            )));
        }
        let mut samples = Vec::with_capacity(width * height * self.channels);
        for c in 0..self.channels {
            for y in 0..height {
                let row = (c * self.height + y) * self.width;
                samples.extend_from_slice(&self.samples[row..row + width]);
            }
        }
        ImagePlane::new(width, height, self.channels, self.domain, samples)
    }

    /// Block `(bx, by)` as integers, channel-major.
    pub fn block_ints(&self, bx: usize, by: usize, out: &mut [i32]) {
        for c in 0..self.channels {
            for r in 0..8 {
                let row = (c * self.height + by * 8 + r) * self.width + bx * 8;
                out[c * 64 + r * 8..c * 64 + r * 8 + 8].copy_from_slice(&self.samples[row..row + 8]);
            }
        }
    }

    /// Overwrites block `(bx, by)`.
    pub fn set_block_ints(&mut self, bx: usize, by: usize, data: &[i32]) {
        for c in 0..self.channels {
            for r in 0..8 {
                let row = (c * self.height + by * 8 + r) * self.width + bx * 8;
                self.samples[row..row + 8].copy_from_slice(&data[c * 64 + r * 8..c * 64 + r * 8 + 8]);
            }
        }
    }

    fn check_blockable(&self) -> Result<()> {
        if !self.width.is_multiple_of(8) || !self.height.is_multiple_of(8) {
            return Err(Error::InvalidGeometry(format!(
                "{}x{} is not a multiple of 8 in both dimensions",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Applies `f` to every block, producing an image in `domain`.
    fn map_blocks(&self, domain: Domain, f: impl Fn(&[i32], &mut [i32])) -> Result<Self> {
        self.check_blockable()?;
        let n = self.channels * 64;
        let mut out = ImagePlane {
            width: self.width,
            height: self.height,
            channels: self.channels,
            domain,
            samples: vec![0; self.samples.len()],
        };
        let (mut inp, mut res) = (vec![0i32; n], vec![0i32; n]);
        let (gw, gh) = self.grid();
        for by in 0..gh {
            for bx in 0..gw {
                self.block_ints(bx, by, &mut inp);
                f(&inp, &mut res);
                out.set_block_ints(bx, by, &res);
            }
        }
        Ok(out)
    }
}

/// Splits an image into row-major blocks. With `crop`, trailing rows and
/// columns that do not fill a block are dropped; without it they are an
/// error.
pub fn split_into_blocks(img: &ImagePlane, crop: bool) -> Result<Vec<GridBlock>> {
    let cropped;
    let img = if !img.width.is_multiple_of(8) || !img.height.is_multiple_of(8) {
        if !crop {
            img.check_blockable()?;
        }
        let (w, h) = (img.width / 8 * 8, img.height / 8 * 8);
        if w == 0 || h == 0 {
            return Err(Error::InvalidGeometry("image smaller than one block".into()));
        }
        cropped = img.cropped(w, h)?;
        &cropped
    } else {
        img
    };
    let (gw, gh) = img.grid();
    let mut buf = vec![0i32; img.channels * 64];
    let mut out = Vec::with_capacity(gw * gh);
    for y in 0..gh {
        for x in 0..gw {
            img.block_ints(x, y, &mut buf);
            let block = Block::from_ints(img.domain, img.channels, buf.clone())?;
            out.push(GridBlock { x, y, block });
        }
    }
    Ok(out)
}

fn check_settings(img: &ImagePlane, settings: &CodecSettings, domain: Domain) -> Result<()> {
    if img.domain != domain {
        return Err(Error::DomainMismatch { expected: domain.name(), got: img.domain.name() });
    }
    if settings.table.channels() != img.channels {
        return Err(Error::ChannelMismatch { expected: settings.table.channels(), got: img.channels });
    }
    Ok(())
}

/// Blockwise compression of a pixel image.
pub fn compress_image(img: &ImagePlane, settings: &CodecSettings) -> Result<ImagePlane> {
    check_settings(img, settings, Domain::Pixel)?;
    let k = settings.kernel();
    img.map_blocks(Domain::Dct, |i, o| k.compress(i, o))
}

/// Blockwise decompression of a coefficient image.
pub fn decompress_image(img: &ImagePlane, settings: &CodecSettings) -> Result<ImagePlane> {
    check_settings(img, settings, Domain::Dct)?;
    let k = settings.kernel();
    img.map_blocks(Domain::Pixel, |i, o| k.decompress(i, o))
}
